#pragma once

#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace feketelab {

using Cpx = std::complex<double>;

// Chordal tolerance under which two points of P^1 are treated as one.
// Every cluster/merge decision in the library references this constant.
inline constexpr double kPointTol = 1e-10;

// Merge radius for root clustering. Double precision splits a numerical
// m-fold root into a cluster of diameter ~eps^(1/m) (~1e-8 for m=2), so the
// merge radius must sit well above that scale and well below typical root
// separations. Post-merge atoms are always pairwise distinct under kPointTol.
inline constexpr double kRootClusterRadius = 2e-6;

// Numerical failure carrying diagnostic text (residuals, iterates).
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Work refused because it exceeds a size budget.
struct BudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Neumaier compensated summation; keeps long reductions at O(eps) error.
struct NeumaierSum {
  double sum = 0.0;
  double comp = 0.0;
  void add(double x) {
    double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }
  void add(const NeumaierSum& other) {
    add(other.sum);
    add(other.comp);
  }
  double value() const { return sum + comp; }
};

// Fixed 17-significant-digit formatting; all CSV/JSON number output goes
// through here so identical runs emit identical bytes.
inline std::string fmt_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline std::string fmt_cpx(const Cpx& z) {
  std::string s = fmt_g17(z.real());
  if (z.imag() >= 0 || std::isnan(z.imag()))
    s += "+" + fmt_g17(z.imag()) + "i";
  else
    s += fmt_g17(z.imag()) + "i";
  return s;
}

}  // namespace feketelab
