#pragma once

#include <string>

#include "feketelab/common.hpp"

namespace feketelab {

/// A point of the complex projective line, stored as a homogeneous pair of
/// unit Euclidean norm. With unit representatives the chordal distance
/// [z,w] = |p^q| / (|p||q|) is just |p^q|, and points near infinity carry no
/// overflow risk. The phase is normalized (largest component real, >= 0) so
/// that equal points constructed along different routes compare and print
/// identically.
class ProjPoint {
 public:
  ProjPoint() : z0_(0.0), z1_(1.0) {}  // the origin
  ProjPoint(Cpx z0, Cpx z1);           // normalizes; throws if both ~0
  static ProjPoint affine(Cpx z);
  static ProjPoint infinity();

  Cpx z0() const { return z0_; }
  Cpx z1() const { return z1_; }

  bool is_infinity() const;
  /// Affine coordinate z0/z1; infinity maps to a huge value, use
  /// is_infinity() first when it matters.
  Cpx affine_value() const;

  bool same_point_as(const ProjPoint& q) const;  // chordal <= kPointTol

  std::string to_string() const;

 private:
  Cpx z0_, z1_;
};

/// p ^ q = z0*w1 - z1*w0 on the stored unit representatives. Antisymmetric.
Cpx wedge(const ProjPoint& p, const ProjPoint& q);

/// Normalized chordal distance in [0,1]; equals |wedge| on unit vectors.
double chordal(const ProjPoint& p, const ProjPoint& q);

/// 2x2 complex matrix acting on homogeneous coordinates.
struct Mat2 {
  Cpx a, b, c, d;  // [[a,b],[c,d]]

  Cpx det() const { return a * d - b * c; }
  Mat2 inverse() const;
  Mat2 mul(const Mat2& o) const;
  /// Deviation from unitarity: max |H*H - I| entry plus ||det|-1|.
  double unitary_defect() const;
  bool is_unitary(double tol = 1e-12) const { return unitary_defect() <= tol; }
  static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
};

/// Applies a linear fractional map to a point. Requires h unitary within
/// 1e-12 (chordal isometries only); throws std::invalid_argument otherwise.
ProjPoint mobius_apply(const Mat2& h, const ProjPoint& p);

/// Parses "a+bi" complex literals ("2", "-1.5", "i", "2-3i", "1e-3i", ...)
/// and "inf". Throws std::invalid_argument on malformed input.
ProjPoint parse_point(const std::string& text);
Cpx parse_complex(const std::string& text);

}  // namespace feketelab
