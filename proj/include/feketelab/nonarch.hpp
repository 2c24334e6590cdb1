#pragma once

#include <optional>
#include <string>
#include <vector>

#include "feketelab/common.hpp"
#include "feketelab/exactq.hpp"

namespace feketelab {

/// An exact multiple of log p. Everything in this module is computed in
/// rational arithmetic; floating point appears only at serialization.
struct LogValue {
  mpq_class coeff;       // value = coeff * log p
  bool neg_inf = false;  // log 0

  static LogValue minus_infinity() { return {mpq_class(0), true}; }
  bool operator==(const LogValue& o) const {
    if (neg_inf || o.neg_inf) return neg_inf == o.neg_inf;
    return coeff == o.coeff;
  }
  std::string to_string() const { return neg_inf ? "-inf" : mpq_to_string(coeff); }
  double to_double(unsigned long p) const;
};

/// Valuation exponent with +infinity (the valuation of 0, and the radius
/// grading of a classical point: radius = p^(-val), radius 0 <=> val = +inf).
struct ExtValuation {
  bool infinite = false;
  mpq_class value = 0;

  static ExtValuation inf() { return {true, 0}; }
  static ExtValuation of(mpq_class v) { return {false, std::move(v)}; }
  bool operator==(const ExtValuation& o) const {
    return infinite == o.infinite && (infinite || value == o.value);
  }
  bool operator<(const ExtValuation& o) const {
    if (infinite) return false;
    if (o.infinite) return true;
    return value < o.value;
  }
};

ExtValuation min3(const ExtValuation& a, const ExtValuation& b, const ExtValuation& c);

/// v_p on rationals; nullopt-free wrapper returning +inf at 0.
ExtValuation vp(const mpq_class& x, unsigned long p);
/// |x|_p as a LogValue of log|x|_p = -v_p(x) log p (neg_inf for x = 0).
LogValue log_absp(const mpq_class& x, unsigned long p);

/// A ball {z : |z - center|_p <= p^(-radius_val)} with rational center and
/// value-group-graded radius; radius_val = +inf encodes a classical point.
/// Any point of a ball can serve as its center, so equality is containment
/// of centers plus equal radii.
struct PadicBall {
  unsigned long prime = 2;
  mpq_class center = 0;
  ExtValuation radius_val;  // radius = p^(-radius_val)

  static PadicBall point(unsigned long p, mpq_class c) {
    return {p, std::move(c), ExtValuation::inf()};
  }
  static PadicBall ball(unsigned long p, mpq_class c, mpq_class rv) {
    return {p, std::move(c), ExtValuation::of(std::move(rv))};
  }
  static PadicBall gauss(unsigned long p) { return ball(p, 0, 0); }

  bool is_point() const { return radius_val.infinite; }
  bool same_ball_as(const PadicBall& o) const;
  /// |S| = sup_{z in S} |z|_p = max(|center|_p, diam), as a valuation exponent.
  ExtValuation sup_norm_val() const;
};

/// Smallest ball containing both: same center, radius
/// max(diam S, diam S', |c - c'|_p). Throws on prime mismatch.
PadicBall join(const PadicBall& s, const PadicBall& t);

/// log diam(S join S'); -inf exactly when S = S' is a classical point.
LogValue hsia(const PadicBall& s, const PadicBall& t);

/// Path distance on the tree of balls:
/// rho = 2 log diam(join) - log diam S - log diam S'. Both arguments must
/// have positive radius (points are at infinite distance); throws
/// std::domain_error otherwise.
LogValue rho(const PadicBall& s, const PadicBall& t);

/// log delta_can = log diam(join) - log max(1,|S|) - log max(1,|S'|).
LogValue log_delta_can(const PadicBall& s, const PadicBall& t);

/// The tree median of (S, S', Gauss): the smallest of the three pairwise
/// joins; it lies on all three connecting paths.
PadicBall tree_median_with_gauss(const PadicBall& s, const PadicBall& t);

/// Both sides of the Gromov-product identity
/// log delta_can(S,S') = -rho(median, Gauss); they agree exactly.
std::pair<LogValue, LogValue> gromov_check(const PadicBall& s, const PadicBall& t);

using RatForm = std::vector<mpq_class>;  // binary form over Q, descending X

/// V_F = v_p(Res F)/(d(d-1)) * log p, from the exact integer Sylvester
/// determinant. Throws NumericError when Res = 0.
LogValue vf_padic(const RatForm& P, const RatForm& Q, unsigned long p);

/// The exact sequence g_k = d^-k log||F^k||_Gauss for k = 1..k_max, where the
/// Gauss norm of a form is the maximum |coefficient|_p, plus the Cauchy
/// differences g_(k+1) - g_k and the self-kernel value
/// Phi_f(Gauss, Gauss) = -2 g_last - V_F (delta_can(Gauss, Gauss) = 1).
/// Only the certified bound |E_f(k,a)| <= Phi_f(a,a)/d^k at a = Gauss is
/// produced here; preimages of non-classical points are not computed.
struct GaussGreenReport {
  unsigned long prime = 2;
  int degree = 0;
  LogValue vf;
  std::vector<LogValue> green_seq;      // g_1..g_kmax
  std::vector<LogValue> cauchy_diffs;   // g_(k+1) - g_k
  LogValue phi_self;                    // -2 g_kmax - V_F
  std::string to_json() const;
};

GaussGreenReport gauss_green(const RatForm& P, const RatForm& Q, unsigned long p, int k_max);

}  // namespace feketelab
