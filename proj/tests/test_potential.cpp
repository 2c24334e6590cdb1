#include <doctest.h>

#include <cmath>

#include "feketelab/potential.hpp"
#include "feketelab/pullback.hpp"
#include "testutil.hpp"

using namespace feketelab;

namespace {

GreenEvaluator square_green() {
  return GreenEvaluator(HomLift(Form{1.0, 0.0, 0.0}, Form{0.0, 0.0, 1.0}));
}

// closed form for F = (X^2, Y^2): g_F(z) = log max(|z|,1) - (1/2) log(1+|z|^2)
double square_gF(const ProjPoint& p) {
  if (p.is_infinity()) return 0.0;
  double a = std::abs(p.affine_value());
  return std::log(std::max(a, 1.0)) - 0.5 * std::log1p(a * a);
}

}  // namespace

TEST_CASE("escape rate closed form for the squaring map") {
  GreenEvaluator g = square_green();
  CHECK(g.vf() == 0.0);

  CHECK(std::abs(g.escape_rate(ProjPoint(1.0, 0.0))) <= 1e-13);
  CHECK(std::abs(g.escape_rate(ProjPoint(2.0, 1.0)) - (std::log(2.0) - std::log(std::sqrt(5.0)))) <=
        1e-12);

  auto rng = testutil::engine(41);
  for (int i = 0; i < 100; ++i) {
    ProjPoint p = testutil::random_sphere_point(rng);
    CHECK(std::abs(g.escape_rate(p) - square_gF(p)) <= 1e-10);
  }
}

TEST_CASE("functional equation G(F p / |F p|) + log|F p| = d G(p)") {
  GreenEvaluator g(HomLift(Form{1.0, 0.0, Cpx(0.0, 1.0)}, Form{0.0, 0.0, 1.0}));  // z^2 + i
  auto rng = testutil::engine(43);
  for (int i = 0; i < 100; ++i) {
    ProjPoint p = testutil::random_sphere_point(rng);
    Cpx w0 = form_eval(g.lift().P(), p), w1 = form_eval(g.lift().Q(), p);
    double nrm = std::sqrt(std::norm(w0) + std::norm(w1));
    double lhs = g.escape_rate(ProjPoint(w0 / nrm, w1 / nrm)) + std::log(nrm);
    CHECK(std::abs(lhs - 2.0 * g.escape_rate(p)) <= 1e-11);
  }
}

TEST_CASE("V_F and g_f examples") {
  // raw lift (X^2+Y^2, 2XY): Res = 4, so the raw-lift energy constant is -log 2
  HomLift jouk(Form{1.0, 0.0, 1.0}, Form{0.0, 2.0, 0.0});
  double vf_raw = -jouk.log_abs_resultant_raw() / (jouk.degree() * (jouk.degree() - 1));
  CHECK(std::abs(vf_raw - (-std::log(2.0))) <= 1e-12);

  GreenEvaluator g = square_green();
  CHECK(std::abs(g.green_gf(ProjPoint::affine(0.0))) <= 1e-13);
  CHECK(std::abs(g.green_gf(ProjPoint::affine(1.0)) + 0.5 * std::log(2.0)) <= 1e-12);
  CHECK(std::abs(g.green_gf(ProjPoint::infinity())) <= 1e-13);
}

TEST_CASE("g_f is independent of the lift scaling") {
  HomLift a(Form{1.0, 0.0, 1.0}, Form{0.0, 2.0, 0.0});
  HomLift b(Form{3.0, 0.0, 3.0}, Form{0.0, 6.0, 0.0});
  GreenEvaluator ga(a), gb(b);
  auto rng = testutil::engine(47);
  for (int i = 0; i < 30; ++i) {
    ProjPoint p = testutil::random_sphere_point(rng);
    CHECK(std::abs(ga.green_gf(p) - gb.green_gf(p)) <= 1e-10);
  }
}

TEST_CASE("phi_f values for the squaring map") {
  GreenEvaluator g = square_green();
  CHECK(std::abs(g.phi_f(ProjPoint::affine(1.0), ProjPoint::affine(0.0))) <= 1e-12);
  CHECK(std::abs(g.phi_f(ProjPoint::affine(2.0), ProjPoint::infinity()) + std::log(2.0)) <= 1e-12);
  ProjPoint x = ProjPoint::affine(Cpx(0.4, -0.7));
  CHECK(g.phi_f(x, x) == -std::numeric_limits<double>::infinity());
  // symmetry is exact
  auto rng = testutil::engine(53);
  for (int i = 0; i < 20; ++i) {
    ProjPoint p = testutil::random_sphere_point(rng);
    ProjPoint q = testutil::random_sphere_point(rng);
    CHECK(g.phi_f(p, q) == g.phi_f(q, p));
  }
}

TEST_CASE("bifurcation potential") {
  GreenEvaluator g = square_green();
  CHECK(std::abs(g.bifurcation_potential() - std::log(4.0)) <= 1e-10);

  // invariance under lift rescaling
  GreenEvaluator g3(HomLift(Form{3.0, 0.0, 0.0}, Form{0.0, 0.0, 3.0}));
  CHECK(std::abs(g3.bifurcation_potential() - std::log(4.0)) <= 1e-9);

  // invariance under unitary conjugation (B enters c_z, which transports)
  auto rng = testutil::engine(59);
  HomLift f(Form{1.0, 0.0, Cpx(0.0, 1.0)}, Form{0.0, 0.0, 1.0});
  double base = GreenEvaluator(f).bifurcation_potential();
  for (int i = 0; i < 3; ++i) {
    Mat2 h = testutil::random_unitary(rng);
    CHECK(std::abs(GreenEvaluator(f.conjugate(h)).bifurcation_potential() - base) <= 1e-9);
  }
}

TEST_CASE("bifurcation potential against an explicit factorization") {
  // det DF = 4XY factors over unit directions as -4 * (p ^ (0,1)) * (p ^ (1,0)),
  // so by hand B = G^F(0,1) + G^F(1,0) + log|-4| = 0 + 0 + log 4.
  GreenEvaluator g = square_green();
  double by_hand = g.escape_rate(ProjPoint(Cpx(0.0), Cpx(1.0))) +
                   g.escape_rate(ProjPoint(Cpx(1.0), Cpx(0.0))) + std::log(4.0);
  CHECK(std::abs(g.bifurcation_potential() - by_hand) <= 1e-10);
}

TEST_CASE("kernel transports under unitary conjugation") {
  // Phi_{f_h}(z, w) = Phi_f(h z, h w)
  HomLift f(Form{1.0, 0.0, Cpx(0.0, 1.0)}, Form{0.0, 0.0, 1.0});
  GreenEvaluator g(f);
  auto rng = testutil::engine(79);
  for (int trial = 0; trial < 3; ++trial) {
    Mat2 h = testutil::random_unitary(rng);
    GreenEvaluator gh(f.conjugate(h));
    for (int i = 0; i < 10; ++i) {
      ProjPoint z = testutil::random_sphere_point(rng);
      ProjPoint w = testutil::random_sphere_point(rng);
      double lhs = gh.phi_f(z, w);
      double rhs = g.phi_f(mobius_apply(h, z), mobius_apply(h, w));
      CHECK(std::abs(lhs - rhs) <= 1e-8);
    }
  }
}

TEST_CASE("chordal derivative") {
  GreenEvaluator g = square_green();
  CHECK(std::abs(g.chordal_derivative(ProjPoint::affine(1.0)) - 2.0) <= 1e-13);
  CHECK(std::abs(g.chordal_derivative(ProjPoint::affine(2.0)) - 20.0 / 17.0) <= 1e-13);
  CHECK(g.chordal_derivative(ProjPoint::affine(0.0)) <= 1e-14);

  // matches the difference quotient [f(u), f(z)] / [u, z]
  GreenEvaluator gj(HomLift(Form{1.0, 0.0, 1.0}, Form{0.0, 2.0, 0.0}));
  auto rng = testutil::engine(61);
  for (int i = 0; i < 10; ++i) {
    ProjPoint z = testutil::random_sphere_point(rng);
    if (gj.lift().local_degree(z) > 1) continue;
    Cpx p0 = z.z0(), p1 = z.z1();
    double s = 1e-6;
    ProjPoint u(std::cos(s) * p0 - std::sin(s) * std::conj(p1),
                std::cos(s) * p1 + std::sin(s) * std::conj(p0));
    double quotient = chordal(gj.lift().evaluate(u), gj.lift().evaluate(z)) / chordal(u, z);
    CHECK(std::abs(quotient - gj.chordal_derivative(z)) <= 1e-5 * (1.0 + quotient));
  }
}

TEST_CASE("chordal Taylor coefficient generalizes f#") {
  GreenEvaluator gj(HomLift(Form{1.0, 0.0, 1.0}, Form{0.0, 2.0, 0.0}));
  auto rng = testutil::engine(67);
  for (int i = 0; i < 20; ++i) {
    ProjPoint z = testutil::random_sphere_point(rng);
    if (gj.lift().local_degree(z) > 1) continue;
    CHECK(std::abs(gj.chordal_taylor_coeff(z, 1) - gj.chordal_derivative(z)) <=
          1e-12 * (1.0 + gj.chordal_derivative(z)));
  }
  // at the superattracting fixed point 1 (local degree 2):
  // f(u) - 1 = (u-1)^2/(2u), so the second-order chordal coefficient is
  // |1/2| * (1+1)/(1+1) ... computed against a small-radius quotient instead
  ProjPoint one = ProjPoint::affine(1.0);
  double a2 = gj.chordal_taylor_coeff(one, 2);
  double s = 1e-5;
  Cpx p0 = one.z0(), p1 = one.z1();
  ProjPoint u(std::cos(s) * p0 - std::sin(s) * std::conj(p1),
              std::cos(s) * p1 + std::sin(s) * std::conj(p0));
  double quotient = chordal(gj.lift().evaluate(u), one) / std::pow(chordal(u, one), 2);
  CHECK(std::abs(a2 - quotient) <= 1e-4 * (1.0 + quotient));
}

TEST_CASE("Riesz identity: Phi_f(f(z), a) = U_{f^*(a)}(z)") {
  HomLift maps[] = {HomLift(Form{1.0, 0.0, 0.0}, Form{0.0, 0.0, 1.0}),
                    HomLift(Form{1.0, 0.0, Cpx(0.0, 1.0)}, Form{0.0, 0.0, 1.0}),
                    HomLift(Form{1.0, 0.0, 1.0}, Form{0.0, 2.0, 0.0})};
  auto rng = testutil::engine(71);
  for (const HomLift& f : maps) {
    GreenEvaluator g(f);
    for (int i = 0; i < 30; ++i) {
      ProjPoint z = testutil::random_sphere_point(rng);
      ProjPoint a = testutil::random_sphere_point(rng);
      PullbackMeasure nu = pullback_levels(f, a, 1)[0];
      std::vector<std::pair<ProjPoint, double>> atoms;
      for (const auto& w : nu.atoms) atoms.emplace_back(w.point, static_cast<double>(w.weight));
      double rhs = g.potential_of_atoms(atoms, z);
      double lhs = g.phi_f(f.evaluate(z), a);
      CHECK(std::abs(lhs - rhs) <= 1e-7);
    }
  }
}

TEST_CASE("Frostman: the f-potential of the equilibrium measure vanishes") {
  // approximate mu_f by the normalized level-8 pullback of a generic point
  HomLift f(Form{1.0, 0.0, Cpx(0.0, 1.0)}, Form{0.0, 0.0, 1.0});  // z^2+i
  GreenEvaluator g(f);
  PullbackMeasure nu = pullback_levels(f, ProjPoint::affine(2.0), 8).back();
  std::vector<std::pair<ProjPoint, double>> atoms;
  for (const auto& w : nu.atoms)
    atoms.emplace_back(w.point, static_cast<double>(w.weight) / 256.0);

  auto rng = testutil::engine(73);
  int probes = 0;
  for (int i = 0; i < 200 && probes < 20; ++i) {
    ProjPoint z = testutil::random_sphere_point(rng);
    double dist = 2.0;
    for (const auto& [pt, w] : atoms) dist = std::min(dist, chordal(z, pt));
    if (dist < 0.05) continue;
    ++probes;
    CHECK(std::abs(g.potential_of_atoms(atoms, z)) <= 0.05);
  }
  CHECK(probes == 20);
}

TEST_CASE("truncation error bound is reported and tiny") {
  GreenEvaluator g = square_green();
  CHECK(g.tf_sup() > 0.0);
  CHECK(g.truncation_error_bound() <= 1e-15);
  CHECK(g.truncation_error_bound() > 0.0);
}
