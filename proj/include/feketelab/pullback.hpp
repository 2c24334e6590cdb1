#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "feketelab/common.hpp"
#include "feketelab/projpoint.hpp"
#include "feketelab/ratmap.hpp"

namespace feketelab {

struct WeightedAtom {
  ProjPoint point;
  std::int64_t weight;  // deg_w(f^k), >= 1
};

/// The iterated-preimage measure at level k of a base point a: atoms are the
/// points of f^-k(a), weights their local degrees. Total mass is d^k exactly
/// (integer bookkeeping); atoms are pairwise distinct under kPointTol and
/// sorted lexicographically.
struct PullbackMeasure {
  int level = 0;
  ProjPoint base;
  std::vector<WeightedAtom> atoms;
  bool at_critical_value = false;  // some solve produced a multiple root

  std::int64_t total_mass() const;
  std::int64_t eta() const;  // max weight
  std::int64_t D() const;    // sum of squared weights, in [d^k, d^k * eta]

  static PullbackMeasure dirac(const ProjPoint& a);
  std::string to_csv() const;  // columns re,im,is_infinity,weight
};

/// One pullback step: solves the degree-d form b1 P - b0 Q for every atom
/// (b0,b1), multiplies weights by root multiplicities, merges atoms under
/// kPointTol and asserts the exact mass d^(k+1). Throws BudgetError when the
/// new level would exceed max_atoms.
PullbackMeasure pull_back_once(const HomLift& F, const PullbackMeasure& nu,
                               std::int64_t max_atoms = 1 << 16);

/// (eta, D) of a level, with the bracket d^k <= D <= d^k eta enforced.
std::pair<std::int64_t, std::int64_t> eta_and_D(const PullbackMeasure& nu);

/// Levels 1..k_max of the preimage tree of a.
std::vector<PullbackMeasure> pullback_levels(const HomLift& F, const ProjPoint& a, int k_max,
                                             std::int64_t max_atoms = 1 << 16);

/// Finite-horizon classification of the eta growth: these are diagnostics,
/// not proofs of membership in the exceptional/superattracting sets.
struct EtaGrowthReport {
  std::vector<std::int64_t> eta_seq;  // eta_(a,j), j = 1..k_max
  std::int64_t sup_eta = 1;
  std::int64_t bound = 0;  // d^(2d-2)
  // exceptional-candidate: eta_j = d^j for all j;
  // superattracting-candidate: eta exceeds d^(2d-2); ordinary otherwise.
  std::string classification;
};

EtaGrowthReport eta_growth_probe(const HomLift& F, const ProjPoint& a, int k_max,
                                 std::int64_t max_atoms = 1 << 16);

}  // namespace feketelab
