#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "feketelab/common.hpp"
#include "feketelab/potential.hpp"
#include "feketelab/pullback.hpp"

namespace feketelab {

/// Per-level critical proximity data: for each level j <= k and each distinct
/// critical atom c with f^j(c) != a, the term d^-j log(1/[f^j(c), a]).
struct ProximityData {
  /// terms[j-1][ci]: the per-atom term (multiplicity NOT included); NaN marks
  /// an excluded pair (f^j(c) = a within kPointTol).
  std::vector<std::vector<double>> terms;
  double max_term = 0.0;          // running max over included (j, c)
  double sum_plain = 0.0;         // sum_j sum_c mult_c * term
  double sum_eta_weighted = 0.0;  // sum_j eta_j * (sum_c mult_c * term)
  std::vector<std::pair<int, int>> excluded;  // (j, critical index)
};

/// The effective constant assembled from |B(f)|, the c-values of the critical
/// points, the preperiodic critical orbit sup, the critical separation, log d
/// and the sup|g_f| estimate. heuristic is set when a critical orbit could
/// not be classified preperiodic within the horizon or the sup|g_f| grid
/// estimate did not stabilize under refinement.
struct CfEstimate {
  double value = 0.0;
  bool heuristic = false;
  double b_abs = 0.0, max_cc = 0.0, preperiodic_sup = 0.0;
  double crit_sep_term = 0.0, gf_term = 0.0;
  std::vector<bool> critical_wandering;  // per critical atom (finite-horizon)
};

struct RateBundle {
  double r1 = 0.0;  // (1/d^k) sum_j eta_j
  double r2 = 0.0;  // k D_k / d^(2k)
  double r3 = 0.0;  // k eta_k / d^k ; max(r1, r2) <= r3 always
};

struct EnergyFlags {
  bool at_critical_value = false;
  bool cf_heuristic = false;
  bool sandwich_warning = false;  // bounds violated (loud, never silent)
};

struct EnergyReport {
  int k = 0;
  std::string point;
  double energy_direct = 0.0;
  double energy_cz = 0.0;
  std::vector<std::int64_t> eta_seq;
  std::vector<std::int64_t> D_seq;
  double proximity_max = 0.0;
  double proximity_sum = 0.0;
  double proximity_sum_weighted = 0.0;
  double lower_bound = 0.0;
  double upper_bound = 0.0;
  double cf_est = 0.0;
  double cfa = 0.0;
  int k_a = 0;  // horizon of wandering-critical hits (within requested k)
  RateBundle rates;
  EnergyFlags flags;

  std::string to_json() const;
  static std::string csv_header();
  std::string to_csv_row() const;
};

/// Fekete energies of iterated-preimage configurations, by two independent
/// routes, with sandwich bounds carrying effective constants.
class FeketeAnalyzer {
 public:
  explicit FeketeAnalyzer(GreenEvaluator green);

  const GreenEvaluator& green() const { return green_; }

  /// E(k, a) as the normalized off-diagonal double sum of Phi_f over atom
  /// pairs; the diagonal is excluded at the level of merged atoms. Pairs are
  /// block-summed in a fixed order, so the value is thread-count independent.
  double energy_direct(const PullbackMeasure& nu) const;

  /// c_z at non-critical z by the closed formula
  /// -log d + B(f) + sum_c Phi_f(z, c) (multiplicity-weighted).
  /// Throws std::domain_error when z is within kPointTol of a critical point.
  double c_z_regular(const ProjPoint& z) const;

  /// c_z as the renormalized limit along the graph, sampled at chordal radii
  /// 1e-2..1e-6 in 4 tangent directions and Richardson-extrapolated. Works at
  /// critical z. spread (if given) receives the extrapolation spread; above
  /// 1e-4 the value is low-confidence.
  double c_z_limit(const ProjPoint& z, double* spread = nullptr) const;

  /// c_z from the chordal Taylor coefficient:
  /// log A_m - 2 g_f(f(z)) + 2 m g_f(z), m = deg_z f. Valid at every z and
  /// free of extrapolation noise; the production path for critical points.
  double c_z_analytic(const ProjPoint& z) const;

  /// c_z(f^k) by the degree-weighted chain rule along the forward orbit,
  /// using c_z_regular off the critical set and c_z_analytic on it.
  double c_z_iterate(const ProjPoint& z, int k) const;

  /// E(k, a) = d^(-2k) sum over atoms of weight * c_z(f^k); the second route.
  double energy_cz(const PullbackMeasure& nu) const;

  ProximityData proximity_terms(const ProjPoint& a, int k,
                                const std::vector<std::int64_t>& eta_seq) const;

  const CfEstimate& cf_estimate() const;

  /// Wandering-critical contribution: sum over levels j <= k and wandering
  /// critical atoms c with f^j(c) = a of eta_j |c_c(f^j)|. Zero when no hit
  /// is detected within the horizon; k_a receives the last hit level.
  double cfa_constant(const ProjPoint& a, int k, const std::vector<std::int64_t>& eta_seq,
                      int* k_a) const;

  std::pair<double, double> sandwich_bounds(int k, const ProximityData& prox,
                                           const std::vector<std::int64_t>& eta_seq, double cf,
                                           double cfa) const;

  static RateBundle rate_bundle(int d, const std::vector<std::int64_t>& eta_seq,
                                const std::vector<std::int64_t>& D_seq);

  /// Full per-level report; levels must be the pullback tree of a up to k.
  EnergyReport analyze(const std::vector<PullbackMeasure>& levels) const;

 private:
  GreenEvaluator green_;  // owned; copies share the lazy caches
  mutable std::shared_ptr<const CfEstimate> cf_;  // lazy, immutable
  void compute_cf() const;
};

}  // namespace feketelab
