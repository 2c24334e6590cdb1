#pragma once

#include <memory>
#include <vector>

#include "feketelab/common.hpp"
#include "feketelab/projpoint.hpp"
#include "feketelab/ratmap.hpp"

namespace feketelab {

/// Escape rate G^F, Green functions g_F and g_f, the weighted kernel
/// Phi_f(x,y) = log[x,y] - g_f(x) - g_f(y), the bifurcation potential B(f)
/// and the chordal derivative f^#.
///
/// All quantities are evaluated against the lift's normalized representative
/// (max coefficient magnitude 1), where V_F = -log|Res F| / (d(d-1)); g_f and
/// Phi_f are then independent of how the input lift was scaled.
///
/// G^F(p) is summed as sum_j d^-(j+1) log|F(q_j)| over the renormalized orbit
/// q_0 = p, q_(j+1) = F(q_j)/|F(q_j)|, truncated when the increment falls
/// below tol; the tail after n terms is bounded by tf_sup * d^-(n+1)/(1-1/d).
///
/// Immutable after construction; evaluation calls are pure.
class GreenEvaluator {
 public:
  explicit GreenEvaluator(HomLift lift, double tol = 1e-12, int max_iter = 60);

  const HomLift& lift() const { return lift_; }
  int degree() const { return lift_.degree(); }
  double tol() const { return tol_; }

  double vf() const { return vf_; }
  double tf_sup() const { return tf_sup_; }
  /// Truncation error bound for a full max_iter evaluation.
  double truncation_error_bound() const;

  double escape_rate(const ProjPoint& p) const;  // G^F at the unit representative
  double green_gF(const ProjPoint& p) const { return escape_rate(p); }
  double green_gf(const ProjPoint& p) const { return escape_rate(p) + 0.5 * vf_; }

  /// log[x,y] - g_f(x) - g_f(y); -infinity exactly on the diagonal.
  double phi_f(const ProjPoint& x, const ProjPoint& y) const;
  /// Same, with the two escape-rate values G^F(x), G^F(y) supplied by the
  /// caller (batch paths precompute them once per atom).
  double phi_f_cached(const ProjPoint& x, const ProjPoint& y, double gx, double gy) const;

  /// B(f) = sum over Jacobian factors of (G^F(C_j) + V_F), plus the log of
  /// the factorization constant; independent of the factorization chosen.
  double bifurcation_potential() const;

  /// f^#(z) = |det DF(p)| / (d |F(p)|^2) on unit p; 0 at critical points.
  double chordal_derivative(const ProjPoint& z) const;

  /// A_m(z) = lim [f(u),f(z)] / [u,z]^m for m = deg_z f: the mth chordal
  /// Taylor coefficient, from the polynomial expansion of F along a tangent
  /// line (no limits taken, so no cancellation near critical points).
  double chordal_taylor_coeff(const ProjPoint& z, int m) const;

  /// U of a weighted atom list: sum w_i Phi_f(z, x_i); -infinity if z is an
  /// atom.
  double potential_of_atoms(const std::vector<std::pair<ProjPoint, double>>& atoms,
                            const ProjPoint& z) const;

  /// Grid estimate of sup |g_f| (64x128 plus one refinement doubling).
  /// Not rigorous; stable() reports whether the doubling moved it.
  double gf_sup_estimate() const;
  bool gf_sup_stable() const;

 private:
  void compute_gf_sup() const;

  HomLift lift_;
  double tol_;
  int max_iter_;
  double vf_;
  double tf_sup_;
  mutable std::shared_ptr<const std::pair<double, bool>> gf_sup_;  // lazy
};

}  // namespace feketelab
