#include <doctest.h>

#include <cmath>

#include "feketelab/projpoint.hpp"
#include "testutil.hpp"

using namespace feketelab;

TEST_CASE("normalization and equality") {
  ProjPoint p(Cpx(3.0, 4.0), Cpx(1.0, -2.0));
  CHECK(std::abs(std::norm(p.z0()) + std::norm(p.z1()) - 1.0) <= 1e-14);

  // same point, different representatives
  CHECK(ProjPoint(Cpx(2.0), Cpx(1.0)).same_point_as(ProjPoint(Cpx(4.0), Cpx(2.0))));
  CHECK(ProjPoint(Cpx(0.0, 2.0), Cpx(1.0)).same_point_as(ProjPoint(Cpx(-2.0), Cpx(0.0, 1.0))));
  CHECK_FALSE(ProjPoint::affine(1.0).same_point_as(ProjPoint::affine(1.0 + 1e-6)));

  // huge affine values neither overflow nor lose the point
  ProjPoint big = ProjPoint::affine(Cpx(1e200));
  CHECK(std::isfinite(std::abs(big.z0())));
  CHECK(big.same_point_as(ProjPoint::infinity()));
  CHECK(ProjPoint::affine(Cpx(1e-200)).same_point_as(ProjPoint::affine(0.0)));
}

TEST_CASE("wedge values") {
  CHECK(std::abs(wedge(ProjPoint(1.0, 0.0), ProjPoint(0.0, 1.0)) - Cpx(1.0)) <= 1e-15);
  auto rng = testutil::engine(7);
  for (int i = 0; i < 20; ++i) {
    ProjPoint p = testutil::random_sphere_point(rng);
    CHECK(wedge(p, p) == Cpx(0.0));
    ProjPoint q = testutil::random_sphere_point(rng);
    CHECK(std::abs(wedge(p, q) + wedge(q, p)) <= 1e-15);  // antisymmetry
  }
  CHECK(std::abs(std::abs(wedge(ProjPoint(2.0, 1.0), ProjPoint(0.0, 1.0))) -
                 2.0 / std::sqrt(5.0)) <= 1e-14);
}

TEST_CASE("chordal values") {
  CHECK(std::abs(chordal(ProjPoint::affine(1.0), ProjPoint::affine(0.0)) - 1.0 / std::sqrt(2.0)) <=
        1e-14);
  CHECK(chordal(ProjPoint::affine(Cpx(0.3, -2.0)), ProjPoint::affine(Cpx(0.3, -2.0))) == 0.0);
  CHECK(std::abs(chordal(ProjPoint::affine(2.0), ProjPoint::infinity()) - 1.0 / std::sqrt(5.0)) <=
        1e-14);
}

TEST_CASE("chordal is a unitary-invariant metric") {
  auto rng = testutil::engine(11);
  for (int i = 0; i < 100; ++i) {
    ProjPoint p = testutil::random_sphere_point(rng);
    ProjPoint q = testutil::random_sphere_point(rng);
    ProjPoint r = testutil::random_sphere_point(rng);
    double pq = chordal(p, q);
    CHECK(pq == chordal(q, p));
    CHECK(pq >= 0.0);
    CHECK(pq <= 1.0);
    CHECK(pq <= chordal(p, r) + chordal(r, q) + 1e-12);

    Mat2 h = testutil::random_unitary(rng);
    CHECK(std::abs(chordal(mobius_apply(h, p), mobius_apply(h, q)) - pq) <= 1e-12);
  }
}

TEST_CASE("chordal matches the affine formula") {
  auto rng = testutil::engine(13);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 50; ++i) {
    Cpx z(u(rng), u(rng)), w(u(rng), u(rng));
    double expect =
        std::abs(z - w) / (std::sqrt(1.0 + std::norm(z)) * std::sqrt(1.0 + std::norm(w)));
    CHECK(std::abs(chordal(ProjPoint::affine(z), ProjPoint::affine(w)) - expect) <= 1e-13);
  }
}

TEST_CASE("mobius_apply") {
  ProjPoint one = ProjPoint::affine(1.0);
  CHECK(mobius_apply(Mat2::identity(), one).same_point_as(one));

  Mat2 inv{0.0, -1.0, 1.0, 0.0};  // z -> -1/z
  CHECK(mobius_apply(inv, one).same_point_as(ProjPoint::affine(-1.0)));
  CHECK(std::abs(chordal(ProjPoint::affine(1.0), ProjPoint::affine(2.0)) -
                 chordal(ProjPoint::affine(-1.0), ProjPoint::affine(-0.5))) <= 1e-14);

  Mat2 bad{2.0, 0.0, 0.0, 1.0};
  CHECK_THROWS_AS(mobius_apply(bad, one), std::invalid_argument);
}

TEST_CASE("point parsing") {
  CHECK(parse_point("inf").is_infinity());
  CHECK(parse_point("2").same_point_as(ProjPoint::affine(2.0)));
  CHECK(parse_point("-1.5").same_point_as(ProjPoint::affine(-1.5)));
  CHECK(parse_point("i").same_point_as(ProjPoint::affine(Cpx(0.0, 1.0))));
  CHECK(parse_point("0.3+0.4i").same_point_as(ProjPoint::affine(Cpx(0.3, 0.4))));
  CHECK(parse_point("1-2i").same_point_as(ProjPoint::affine(Cpx(1.0, -2.0))));
  CHECK(parse_point(" -i ").same_point_as(ProjPoint::affine(Cpx(0.0, -1.0))));
  CHECK(parse_point("2e-1+1e1i").same_point_as(ProjPoint::affine(Cpx(0.2, 10.0))));
  CHECK_THROWS_AS(parse_point("abc"), std::invalid_argument);
  CHECK_THROWS_AS(parse_point(""), std::invalid_argument);
}
