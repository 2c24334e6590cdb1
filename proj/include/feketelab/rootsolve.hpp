#pragma once

#include <vector>

#include "feketelab/binaryform.hpp"
#include "feketelab/common.hpp"
#include "feketelab/projpoint.hpp"

namespace feketelab {

struct RootAtom {
  ProjPoint point;
  int multiplicity;
};

struct RootList {
  std::vector<RootAtom> atoms;  // sorted (finite by re, im; infinity last)
  double residual_max = 0.0;    // max |form(atom)| / ||coeffs||_2, never hidden
  bool cluster_warning = false; // some cluster had gap ratio < 10
  int total_multiplicity() const;
};

/// All projective roots of a binary form, with multiplicities.
///
/// Leading coefficient vanishing of order m contributes infinity with
/// multiplicity m (trailing vanishing contributes 0 likewise); the affine
/// part is solved by Aberth-Ehrlich simultaneous iteration, falling back to
/// companion-matrix eigenvalues on stall. Roots closer than
/// kRootClusterRadius in the chordal metric are merged into one atom holding
/// the summed multiplicity; the merged center is the cluster centroid, which
/// cancels the leading splitting error of a numerical m-fold root. Throws
/// NumericError (carrying residual diagnostics) when neither solver meets the
/// backward-error target.
RootList roots_binary_form(const Form& coeffs);

}  // namespace feketelab
