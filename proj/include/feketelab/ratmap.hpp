#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "feketelab/binaryform.hpp"
#include "feketelab/common.hpp"
#include "feketelab/exactq.hpp"
#include "feketelab/projpoint.hpp"
#include "feketelab/rootsolve.hpp"

namespace feketelab {

struct CriticalAtom {
  ProjPoint point;
  int multiplicity;  // deg_c f - 1
};

/// The critical divisor; total multiplicity is 2d-2 (Riemann-Hurwitz).
struct CriticalSet {
  std::vector<CriticalAtom> atoms;
  int total_multiplicity() const;
};

struct PeriodicPoint {
  ProjPoint point;
  int period;       // minimal period
  Cpx multiplier;   // (f^period)' in a chart moving the point to 0
  std::string cls;  // superattracting | attracting | indifferent | repelling
};

/// A homogeneous lift F = (P, Q) of a degree-d rational map.
///
/// The stored working coefficients are rescaled so max |coefficient| = 1;
/// all Green/energy quantities are computed against this fixed
/// representative, which makes them independent of the scaling of the input.
/// The coefficients as given are kept too (exactly, when the map came from
/// Gaussian-rational data) and back the resultant.
class HomLift {
 public:
  HomLift(Form P_raw, Form Q_raw);
  HomLift(ExactForm P_raw, ExactForm Q_raw);

  int degree() const { return d_; }
  const Form& P() const { return p_; }  // normalized
  const Form& Q() const { return q_; }
  const Form& P_raw() const { return p_raw_; }
  const Form& Q_raw() const { return q_raw_; }
  bool has_exact() const { return exact_.has_value(); }
  const ExactForm& P_exact() const { return exact_->first; }
  const ExactForm& Q_exact() const { return exact_->second; }

  /// pi(F(p)), applied to the normalized lift; output renormalized.
  ProjPoint evaluate(const ProjPoint& p) const;
  ProjPoint evaluate_iter(const ProjPoint& p, int k) const;

  /// det DF of the normalized lift, a form of degree 2d-2.
  Form jacobian_form() const;

  /// Roots of the Jacobian with multiplicities; cached after first use.
  const CriticalSet& critical_points() const;

  /// 1 + multiplicity of p in the critical divisor.
  int local_degree(const ProjPoint& p) const;

  /// Homogeneous resultant of the coefficients as given. Exact (fraction-free
  /// over Q(i)) when exact data is present, floating LU otherwise. Throws
  /// NumericError when |Res| sits at the degenerate threshold.
  Cpx resultant() const;

  /// log|Res| of raw and of normalized coefficients, overflow-safe.
  double log_abs_resultant_raw() const;
  double log_abs_resultant_normalized() const;

  /// Lift of f^k by repeated composition; degree d^k. Throws BudgetError when
  /// d^k exceeds max_degree.
  HomLift iterate(int k, int max_degree = 1 << 16) const;

  /// Lift of h^-1 o f o h for unitary h; preserves |Res|.
  HomLift conjugate(const Mat2& h) const;

  /// Periodic points of period <= p_max with multipliers and class labels.
  std::vector<PeriodicPoint> classify_periodic(int p_max) const;

 private:
  void init();
  double multiplier_chart_derivative(const ProjPoint& at, bool flip_in, bool flip_out) const;

  int d_;
  Form p_, q_;          // normalized, max |coeff| = 1
  Form p_raw_, q_raw_;
  std::optional<std::pair<ExactForm, ExactForm>> exact_;
  mutable std::shared_ptr<const CriticalSet> critical_;  // lazily filled, immutable
};

/// Complex multiplier of f at a point of an orbit, as the derivative of
/// chart_out o f o chart_in^-1; charts are z or 1/z chosen by magnitude, so
/// cycles through infinity stay regular.
Cpx orbit_multiplier(const HomLift& F, const std::vector<ProjPoint>& cycle);

/// Lift from explicit coefficient arrays:
/// {"d":2,"P":[[re,im],...],"Q":[[re,im],...]} with d+1 pairs per form,
/// ordered by descending X power. Bare numbers mean a real coefficient; an
/// all-integer lift keeps exact coefficients (and so an exact resultant).
HomLift lift_from_json(const std::string& text);

}  // namespace feketelab
