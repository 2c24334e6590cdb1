// Acceptance suite: runs every top-level criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion. Exits nonzero on any failure.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <vector>

#include "feketelab/equidist.hpp"
#include "feketelab/fekete.hpp"
#include "feketelab/mapexpr.hpp"
#include "feketelab/nonarch.hpp"
#include "feketelab/pullback.hpp"
#include "testutil.hpp"

using namespace feketelab;

namespace {

int g_failures = 0;

void report(int criterion, const std::string& name, bool ok, const std::string& detail = "") {
  if (criterion == 0)
    std::cout << "INTERFACE " << (ok ? "PASS" : "FAIL") << ": " << name;
  else
    std::cout << "CRITERION " << criterion << " " << (ok ? "PASS" : "FAIL") << ": " << name;
  if (!detail.empty()) std::cout << " (" << detail << ")";
  std::cout << std::endl;
  if (!ok) ++g_failures;
}

struct GridCase {
  std::string map, point;
};

const std::vector<std::string> kGridMaps = {"z^2", "z^2-1", "z^2+i", "(z^2+1)/(2*z)"};
const std::vector<std::string> kGridPoints = {"1", "2", "0.3+0.4i"};

struct MapBundle {
  HomLift lift;
  GreenEvaluator green;
  FeketeAnalyzer fekete;
  explicit MapBundle(const std::string& text)
      : lift(parse_map(text)), green(lift), fekete(green) {}
};

void criterion_1_closed_form_energy() {
  MapBundle m("z^2");
  auto levels = pullback_levels(m.lift, ProjPoint::affine(1.0), 10);
  double worst = 0.0;
  bool oracle_ok = true;
  for (int k = 1; k <= 10; ++k) {
    double expect = k * std::pow(2.0, -k) * std::log(2.0);
    worst = std::max(worst, std::abs(m.fekete.energy_direct(levels[k - 1]) - expect));
    if (k <= 5) {
      // oracle: the level-k atoms are the 2^k-th roots of unity, checked via
      // the discriminant-style product  prod_{i != j} |z_i - z_j| = n^n
      const auto& atoms = levels[k - 1].atoms;
      int n = 1 << k;
      oracle_ok = oracle_ok && static_cast<int>(atoms.size()) == n;
      if (k >= 2 && static_cast<int>(atoms.size()) == n) {
        double logprod = 0.0;
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            if (i != j)
              logprod +=
                  std::log(std::abs(atoms[i].point.affine_value() - atoms[j].point.affine_value()));
        oracle_ok = oracle_ok && std::abs(logprod - n * std::log(n)) <= 1e-8 * n * std::log(n);
      }
    }
  }
  report(1, "closed-form energy k 2^-k log 2 for k = 1..10 within 1e-9", worst <= 1e-9 && oracle_ok,
         "max deviation " + fmt_g17(worst));
}

void criterion_2_route_equivalence(std::vector<MapBundle>& bundles) {
  double worst_rel = 0.0;
  bool ok = true;
  for (auto& m : bundles) {
    for (const auto& pt : kGridPoints) {
      auto levels = pullback_levels(m.lift, parse_point(pt), 5);
      for (int k = 1; k <= 5; ++k) {
        double ed = m.fekete.energy_direct(levels[k - 1]);
        double ec = m.fekete.energy_cz(levels[k - 1]);
        double scale = std::max(std::abs(ed), std::abs(ec));
        double dev = std::abs(ed - ec);
        if (dev > 1e-6 * scale + 1e-9) ok = false;
        worst_rel = std::max(worst_rel, dev / (1e-6 * scale + 1e-9));
      }
    }
  }
  report(2, "energy_direct vs energy_cz within 1e-6 relative on the 4x3 grid, k <= 5", ok,
         "worst tolerance utilization " + fmt_g17(worst_rel));
}

void criterion_3_cz_identity(std::vector<MapBundle>& bundles) {
  double worst = 0.0;
  bool ok = true;
  auto rng = testutil::engine(2026);
  for (auto& m : bundles) {
    int checked = 0;
    while (checked < 20) {
      ProjPoint z = testutil::random_sphere_point(rng);
      if (m.lift.local_degree(z) > 1) continue;
      ++checked;
      double dev = std::abs(m.fekete.c_z_regular(z) - m.fekete.c_z_limit(z));
      worst = std::max(worst, dev);
      if (dev > 1e-6) ok = false;
    }
  }
  MapBundle sq("z^2");
  double c1 = sq.fekete.c_z_regular(ProjPoint::affine(1.0));
  double c2 = sq.fekete.c_z_regular(ProjPoint::affine(2.0));
  bool hands = std::abs(c1 - std::log(2.0)) <= 1e-9 && std::abs(c2) <= 1e-9 &&
               std::abs(sq.fekete.c_z_limit(ProjPoint::affine(1.0)) - std::log(2.0)) <= 1e-6 &&
               std::abs(sq.fekete.c_z_limit(ProjPoint::affine(2.0))) <= 1e-6;
  report(3, "c_z_regular = c_z_limit within 1e-6 at 20 random z per map, hand values", ok && hands,
         "max deviation " + fmt_g17(worst));
}

void criterion_4_riesz(std::vector<MapBundle>& bundles) {
  double worst = 0.0;
  auto rng = testutil::engine(2027);
  for (auto& m : bundles) {
    for (int i = 0; i < 100; ++i) {
      ProjPoint z = testutil::random_sphere_point(rng);
      ProjPoint a = testutil::random_sphere_point(rng);
      PullbackMeasure nu = pullback_levels(m.lift, a, 1)[0];
      std::vector<std::pair<ProjPoint, double>> atoms;
      for (const auto& w : nu.atoms) atoms.emplace_back(w.point, static_cast<double>(w.weight));
      double dev =
          std::abs(m.green.phi_f(m.lift.evaluate(z), a) - m.green.potential_of_atoms(atoms, z));
      worst = std::max(worst, dev);
    }
  }
  report(4, "Riesz identity, 100 random (z, a) per map, max deviation < 1e-7", worst < 1e-7,
         "max deviation " + fmt_g17(worst));
}

void criterion_5_sandwich(std::vector<MapBundle>& bundles) {
  bool ok = true;
  double min_low = std::numeric_limits<double>::infinity();
  double min_up = std::numeric_limits<double>::infinity();
  for (auto& m : bundles) {
    for (const auto& pt : kGridPoints) {
      auto levels = pullback_levels(m.lift, parse_point(pt), 5);
      for (int k = 1; k <= 5; ++k) {
        std::vector<PullbackMeasure> sub(levels.begin(), levels.begin() + k);
        EnergyReport rep = m.fekete.analyze(sub);
        if (rep.flags.cf_heuristic) ok = false;  // grid maps classify cleanly
        if (rep.flags.sandwich_warning) ok = false;
        min_low = std::min(min_low, rep.energy_direct - rep.lower_bound);
        min_up = std::min(min_up, rep.upper_bound - rep.energy_direct);
      }
    }
  }
  report(5, "sandwich lower <= energy <= upper on every unflagged grid run", ok,
         "min margins " + fmt_g17(min_low) + " / " + fmt_g17(min_up));
}

void criterion_6_mobius() {
  MapBundle m("z^2+i");
  ProjPoint a = ProjPoint::affine(2.0);
  std::vector<double> base;
  auto levels = pullback_levels(m.lift, a, 4);
  for (int k = 1; k <= 4; ++k) base.push_back(m.fekete.energy_direct(levels[k - 1]));

  double worst = 0.0;
  auto rng = testutil::engine(2028);
  for (int trial = 0; trial < 5; ++trial) {
    Mat2 h = testutil::random_unitary(rng);
    HomLift fh = m.lift.conjugate(h);
    GreenEvaluator gh(fh);
    FeketeAnalyzer fkh(gh);
    ProjPoint ah = mobius_apply(h.inverse(), a);
    auto hlevels = pullback_levels(fh, ah, 4);
    for (int k = 1; k <= 4; ++k)
      worst = std::max(worst, std::abs(fkh.energy_direct(hlevels[k - 1]) - base[k - 1]));
  }
  report(6, "energy invariance under 5 random unitary conjugations, k <= 4", worst < 1e-8,
         "max deviation " + fmt_g17(worst));
}

void criterion_7_probes(std::vector<MapBundle>& bundles) {
  EtaGrowthReport r0 = eta_growth_probe(parse_map("z^2"), ProjPoint::affine(0.0), 8);
  bool exc = r0.classification == "exceptional-candidate";
  std::int64_t dj = 1;
  for (auto eta : r0.eta_seq) {
    dj *= 2;
    exc = exc && eta == dj;
  }
  EtaGrowthReport r1 = eta_growth_probe(parse_map("z^2"), ProjPoint::affine(1.0), 8);
  bool ord = r1.classification == "ordinary" && r1.sup_eta == 1 && r1.bound == 4;

  // rate inequality on every grid run (rate_bundle throws on violation)
  bool rates_ok = true;
  try {
    for (auto& m : bundles)
      for (const auto& pt : kGridPoints) {
        std::vector<std::int64_t> eta, D;
        for (const auto& nu : pullback_levels(m.lift, parse_point(pt), 5)) {
          eta.push_back(nu.eta());
          D.push_back(nu.D());
          RateBundle r = FeketeAnalyzer::rate_bundle(m.lift.degree(), eta, D);
          if (std::max(r.r1, r.r2) > r.r3 * (1.0 + 1e-12)) rates_ok = false;
        }
      }
  } catch (const std::exception&) {
    rates_ok = false;
  }
  report(7, "eta probes (a = 0 exceptional with eta = 2^k, a = 1 ordinary) and rate inequality",
         exc && ord && rates_ok);
}

void criterion_8_equidistribution() {
  // (a) the minimal C making error <= C max{Lip, Dirichlet} sqrt(k d^-k)
  // hold across the sweep (the running maximum of the per-k inferred C) must
  // be finite and vary by < 2x over k = 4..8. Errors at the rounding floor
  // (odd test functions see exactly zero by the z -> -z symmetry of this
  // preimage tree) pin their inferred C to zero.
  MapBundle m("z^2+i");
  MuIntegrator mu(m.green);
  auto levels = pullback_levels(m.lift, ProjPoint::affine(2.0), 8);
  bool stable = true;
  std::string detail;
  for (const char* name : {"re", "im", "height"}) {
    TestFunction phi = builtin_test_function(name);
    double running = 0.0, first = -1.0;
    for (int k = 4; k <= 8; ++k) {
      double err = equidist_error(mu, levels[k - 1], phi);
      BoundReport rep = verify_bound(err, 0.0, k, 2, levels[k - 1].D(), phi, 1.0);
      if (!std::isfinite(rep.inferred_c)) stable = false;
      double c_eff = (err <= 1e-12) ? 0.0 : rep.inferred_c;
      running = std::max(running, c_eff);
      if (first < 0.0) first = running;
    }
    if (running > 0.0 && first > 0.0 && !(running / first < 2.0)) stable = false;
    if (running > 0.0 && first == 0.0) stable = false;  // late blowup from zero
    detail += std::string(name) + " C_sweep=" + fmt_g17(running) + " ";
  }

  // (b) explicit bound with C = 1 for the closed-form configuration
  MapBundle sq("z^2");
  MuIntegrator musq(sq.green);
  auto sq_levels = pullback_levels(sq.lift, ProjPoint::affine(1.0), 10);
  bool explicit_ok = true;
  for (const char* name : {"re", "im", "height"}) {
    TestFunction phi = builtin_test_function(name);
    for (int k = 2; k <= 10; ++k) {
      double err = equidist_error(musq, sq_levels[k - 1], phi);
      double energy = k * std::pow(2.0, -k) * std::log(2.0);
      BoundReport rep = verify_bound(err, energy, k, 2, sq_levels[k - 1].D(), phi, 1.0);
      if (rep.cauchy_margin < 0.0) explicit_ok = false;
    }
  }
  report(8, "equidistribution: inferred C varies < 2x (k = 4..8); explicit C = 1 bound for z^2",
         stable && explicit_ok, detail);
}

void criterion_9_green() {
  MapBundle sq("z^2");
  auto rng = testutil::engine(2029);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    ProjPoint p = testutil::random_sphere_point(rng);
    double a = p.is_infinity() ? 0.0 : std::abs(p.affine_value());
    double expect =
        p.is_infinity() ? 0.0 : std::log(std::max(a, 1.0)) - 0.5 * std::log1p(a * a);
    worst = std::max(worst, std::abs(sq.green.escape_rate(p) - expect));
  }
  double worst_fe = 0.0;
  for (int i = 0; i < 100; ++i) {
    ProjPoint p = testutil::random_sphere_point(rng);
    Cpx w0 = form_eval(sq.lift.P(), p), w1 = form_eval(sq.lift.Q(), p);
    double nrm = std::sqrt(std::norm(w0) + std::norm(w1));
    double lhs = sq.green.escape_rate(ProjPoint(w0 / nrm, w1 / nrm)) + std::log(nrm);
    worst_fe = std::max(worst_fe, std::abs(lhs - 2.0 * sq.green.escape_rate(p)));
  }
  report(9, "Green closed form within 1e-10 at 100 points; functional equation residual < 1e-10",
         worst <= 1e-10 && worst_fe < 1e-10,
         "closed form " + fmt_g17(worst) + ", functional " + fmt_g17(worst_fe));
}

void criterion_10_resultants() {
  bool exact = parse_map("z^2").resultant() == Cpx(1.0) &&
               parse_map("(z^2+1)/(2*z)").resultant() == Cpx(4.0);
  HomLift f = parse_map("z^2+i");
  double base = std::abs(f.resultant());
  double worst = 0.0;
  auto rng = testutil::engine(2030);
  for (int i = 0; i < 5; ++i) {
    Mat2 h = testutil::random_unitary(rng);
    worst = std::max(worst, std::abs(std::abs(f.conjugate(h).resultant()) - base) / base);
  }
  report(10, "Res(X^2,Y^2) = 1 and Res(X^2+Y^2,2XY) = 4 exact; |Res| conjugation-invariant",
         exact && worst <= 1e-9, "max relative drift " + fmt_g17(worst));
}

void criterion_11_nonarch() {
  bool gromov_ok = true;
  std::mt19937_64 rng(2031);
  for (unsigned long p : {2ul, 3ul, 5ul}) {
    for (int i = 0; i < 1000; ++i) {
      std::uniform_int_distribution<long> cn(-200, 200), cd(1, 60), rn(-8, 8), rd(1, 4);
      auto ball = [&] {
        mpq_class c(cn(rng), cd(rng));
        c.canonicalize();
        mpq_class rv(rn(rng), rd(rng));
        rv.canonicalize();
        return PadicBall::ball(p, c, rv);
      };
      auto [lhs, rhs] = gromov_check(ball(), ball());
      if (!(lhs == rhs)) gromov_ok = false;
    }
  }
  bool vf_ok = vf_padic({1, 0, 1}, {0, 2, 0}, 2) == LogValue{mpq_class(1), false};

  bool axioms_ok = true;
  for (int i = 0; i < 1000; ++i) {
    std::uniform_int_distribution<long> cn(-100, 100), cd(1, 30), rn(-6, 6), rd(1, 3);
    auto ball = [&] {
      mpq_class c(cn(rng), cd(rng));
      c.canonicalize();
      mpq_class rv(rn(rng), rd(rng));
      rv.canonicalize();
      return PadicBall::ball(5, c, rv);
    };
    PadicBall a = ball(), b = ball(), c = ball();
    if (!(hsia(a, c).coeff <= std::max(hsia(a, b).coeff, hsia(b, c).coeff))) axioms_ok = false;
    if (!(rho(a, b) == rho(b, a)) || !(rho(a, a) == LogValue{mpq_class(0), false}) ||
        rho(a, c).coeff > rho(a, b).coeff + rho(b, c).coeff || rho(a, b).coeff < 0)
      axioms_ok = false;
  }
  report(11, "Gromov identity exact on 1000 balls for p = 2,3,5; V_F exact; metric axioms exact",
         gromov_ok && vf_ok && axioms_ok);
}

int exit_code_of(const std::string& cmd) {
  int status = std::system((cmd + " > /dev/null 2>&1").c_str());
  if (status < 0) return -1;
  return WEXITSTATUS(status);
}

// Interface contracts of the CLI: exit codes and the energy CSV column.
void check_cli_interface(const std::string& cli) {
  if (cli.empty()) {
    report(0, "CLI interface (exit codes, energy CSV column)", false, "no CLI path given");
    return;
  }
  const std::string q = "\"" + cli + "\" ";
  bool codes = exit_code_of(q + "selftest") == 0 &&
               exit_code_of(q + "energy --map z+1 --point 1 --kmax 2") == 2 &&
               exit_code_of(q + "energy --map \"z^2\" --kmax 30") == 4 &&
               exit_code_of(q + "nonrespond") == 2 &&
               exit_code_of(q + "nonarch --lift '{\"P\":[1,0,1],\"Q\":[2,0,2]}' --prime 2") == 3;

  // energy CSV column equals k 2^-k log 2 for the roots-of-unity tree
  bool column = true;
  std::system((q + "energy --map \"z^2\" --point 1 --kmax 8 > /tmp/fkl_csv 2>/dev/null").c_str());
  std::ifstream in("/tmp/fkl_csv");
  std::string line;
  std::getline(in, line);  // version comment
  std::getline(in, line);  // header
  int rows = 0;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string field;
    std::getline(ls, field, ',');
    int k = std::stoi(field);
    std::getline(ls, field, ',');  // point
    std::getline(ls, field, ',');  // energy_direct
    double energy = std::stod(field);
    if (std::abs(energy - k * std::pow(2.0, -k) * std::log(2.0)) > 1e-9) column = false;
    ++rows;
  }
  column = column && rows == 8;
  report(0, "CLI interface (exit codes, energy CSV column)", codes && column);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void criterion_12_determinism(const std::string& cli) {
  if (cli.empty()) {
    report(12, "byte-identical outputs across runs and thread counts", false, "no CLI path given");
    return;
  }
  auto run = [&](const std::string& threads, const std::string& cmdline, const std::string& out) {
    std::string full = "FEKETELAB_THREADS=" + threads + " \"" + cli + "\" " + cmdline + " > " +
                       out + " 2>/dev/null";
    return std::system(full.c_str());
  };
  bool ok = true;
  ok &= run("1", "selftest", "/tmp/fkl_self_a") == 0;
  ok &= run("1", "selftest", "/tmp/fkl_self_b") == 0;
  ok &= run("8", "selftest", "/tmp/fkl_self_c") == 0;
  std::string sa = slurp("/tmp/fkl_self_a");
  ok = ok && !sa.empty() && sa == slurp("/tmp/fkl_self_b") && sa == slurp("/tmp/fkl_self_c");

  const std::string energy_cmd = "energy --map \"z^2+i\" --point 2 --kmax 5";
  ok &= run("1", energy_cmd, "/tmp/fkl_en_a") == 0;
  ok &= run("8", energy_cmd, "/tmp/fkl_en_b") == 0;
  ok &= run("1", energy_cmd, "/tmp/fkl_en_c") == 0;
  std::string ea = slurp("/tmp/fkl_en_a");
  ok = ok && !ea.empty() && ea == slurp("/tmp/fkl_en_b") && ea == slurp("/tmp/fkl_en_c");
  report(12, "byte-identical selftest and energy outputs with FEKETELAB_THREADS in {1, 8}", ok);
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli = argc > 1 ? argv[1] : "";

  std::vector<MapBundle> bundles;
  for (const auto& text : kGridMaps) bundles.emplace_back(text);

  criterion_1_closed_form_energy();
  criterion_2_route_equivalence(bundles);
  criterion_3_cz_identity(bundles);
  criterion_4_riesz(bundles);
  criterion_5_sandwich(bundles);
  criterion_6_mobius();
  criterion_7_probes(bundles);
  criterion_8_equidistribution();
  criterion_9_green();
  criterion_10_resultants();
  criterion_11_nonarch();
  criterion_12_determinism(cli);
  check_cli_interface(cli);

  if (g_failures) {
    std::cout << g_failures << " criteria FAILED" << std::endl;
    return 1;
  }
  std::cout << "all criteria passed" << std::endl;
  return 0;
}
