#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <vector>

#include "feketelab/common.hpp"

namespace feketelab {

/// Gaussian rational a + b*i with exact mpq components.
struct GaussQ {
  mpq_class re, im;

  GaussQ() : re(0), im(0) {}
  GaussQ(long r) : re(r), im(0) {}
  GaussQ(mpq_class r, mpq_class i = 0) : re(std::move(r)), im(std::move(i)) {}

  bool is_zero() const { return re == 0 && im == 0; }
  GaussQ operator+(const GaussQ& o) const { return {re + o.re, im + o.im}; }
  GaussQ operator-(const GaussQ& o) const { return {re - o.re, im - o.im}; }
  GaussQ operator-() const { return {-re, -im}; }
  GaussQ operator*(const GaussQ& o) const {
    return {re * o.re - im * o.im, re * o.im + im * o.re};
  }
  GaussQ operator/(const GaussQ& o) const {
    mpq_class n = o.re * o.re + o.im * o.im;
    return {(re * o.re + im * o.im) / n, (im * o.re - re * o.im) / n};
  }
  GaussQ& operator+=(const GaussQ& o) { re += o.re; im += o.im; return *this; }
  bool operator==(const GaussQ& o) const { return re == o.re && im == o.im; }
  Cpx to_complex() const { return Cpx(re.get_d(), im.get_d()); }
};

inline GaussQ operator*(const mpq_class& c, const GaussQ& g) {
  return {c * g.re, c * g.im};
}

using ExactForm = std::vector<GaussQ>;

/// Exact homogeneous resultant of two degree-d forms over Q(i), by the
/// 2d x 2d Sylvester determinant with fraction-free (Bareiss) elimination
/// over Gaussian integers after clearing denominators.
GaussQ resultant_exact(const ExactForm& P, const ExactForm& Q);

/// log|q| computed from the mantissa/exponent decomposition of numerator and
/// denominator; robust for huge values. q must be nonzero.
double log_abs_mpq(const mpq_class& q);

/// log|a+bi| = log sqrt(a^2+b^2), same robustness.
double log_abs_gaussq(const GaussQ& g);

/// p-adic valuation of a nonzero rational; nullopt encodes v(0) = +infinity.
std::optional<long> padic_valuation(const mpq_class& q, unsigned long p);

/// "n" or "n/d" (canonicalized); used by the nonarch JSON surface.
std::string mpq_to_string(const mpq_class& q);

}  // namespace feketelab
