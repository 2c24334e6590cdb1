#include "feketelab/projpoint.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace feketelab {

namespace {

// Scale to unit Euclidean norm, then rotate the phase so the component of
// larger magnitude is real and nonnegative (ties prefer z1, keeping affine
// representatives canonical).
void normalize(Cpx& z0, Cpx& z1) {
  double m0 = std::abs(z0), m1 = std::abs(z1);
  double big = std::max(m0, m1);
  if (!(big > 0.0) || !std::isfinite(big))
    throw std::invalid_argument("ProjPoint: coordinates must be finite and not both zero");
  z0 /= big;
  z1 /= big;
  double n = std::sqrt(std::norm(z0) + std::norm(z1));
  z0 /= n;
  z1 /= n;
  Cpx pivot = (std::abs(z1) >= std::abs(z0)) ? z1 : z0;
  Cpx phase = std::conj(pivot) / std::abs(pivot);
  z0 *= phase;
  z1 *= phase;
}

}  // namespace

ProjPoint::ProjPoint(Cpx z0, Cpx z1) : z0_(z0), z1_(z1) { normalize(z0_, z1_); }

ProjPoint ProjPoint::affine(Cpx z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return infinity();
  if (std::abs(z) <= 1.0) return ProjPoint(z, 1.0);
  return ProjPoint(1.0, 1.0 / z);
}

ProjPoint ProjPoint::infinity() {
  ProjPoint p;
  p.z0_ = 1.0;
  p.z1_ = 0.0;
  return p;
}

bool ProjPoint::is_infinity() const { return std::abs(z1_) <= 1e-14; }

Cpx ProjPoint::affine_value() const {
  if (is_infinity()) return Cpx(std::numeric_limits<double>::infinity(), 0.0);
  return z0_ / z1_;
}

bool ProjPoint::same_point_as(const ProjPoint& q) const {
  return chordal(*this, q) <= kPointTol;
}

std::string ProjPoint::to_string() const {
  if (is_infinity()) return "inf";
  return fmt_cpx(affine_value());
}

Cpx wedge(const ProjPoint& p, const ProjPoint& q) {
  return p.z0() * q.z1() - p.z1() * q.z0();
}

double chordal(const ProjPoint& p, const ProjPoint& q) {
  double v = std::abs(wedge(p, q));
  return v > 1.0 ? 1.0 : v;
}

Mat2 Mat2::inverse() const {
  Cpx dt = det();
  return {d / dt, -b / dt, -c / dt, a / dt};
}

Mat2 Mat2::mul(const Mat2& o) const {
  return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
}

double Mat2::unitary_defect() const {
  // rows of H* H
  Cpx g00 = std::conj(a) * a + std::conj(c) * c;
  Cpx g01 = std::conj(a) * b + std::conj(c) * d;
  Cpx g11 = std::conj(b) * b + std::conj(d) * d;
  double dev = std::max({std::abs(g00 - 1.0), std::abs(g11 - 1.0), std::abs(g01)});
  return dev + std::abs(std::abs(det()) - 1.0);
}

ProjPoint mobius_apply(const Mat2& h, const ProjPoint& p) {
  if (!h.is_unitary())
    throw std::invalid_argument("mobius_apply: matrix is not unitary within 1e-12");
  return ProjPoint(h.a * p.z0() + h.b * p.z1(), h.c * p.z0() + h.d * p.z1());
}

namespace {

// number := [0-9]+ ('.' [0-9]*)? ([eE] [+-]? [0-9]+)?
bool scan_number(const std::string& s, size_t& i, double& out) {
  size_t start = i;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
  if (i < s.size() && s[i] == '.') {
    ++i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
  }
  if (i == start) return false;
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    size_t j = i + 1;
    if (j < s.size() && (s[j] == '+' || s[j] == '-')) ++j;
    size_t dstart = j;
    while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
    if (j > dstart) i = j;
  }
  out = std::strtod(s.substr(start, i - start).c_str(), nullptr);
  return true;
}

}  // namespace

Cpx parse_complex(const std::string& text) {
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  if (s.empty()) throw std::invalid_argument("empty complex literal");

  double re = 0.0, im = 0.0;
  size_t i = 0;
  bool have_term = false;
  while (i < s.size()) {
    double sign = 1.0;
    while (i < s.size() && (s[i] == '+' || s[i] == '-')) {
      if (s[i] == '-') sign = -sign;
      ++i;
    }
    double mag;
    bool has_digits = scan_number(s, i, mag);
    if (i < s.size() && (s[i] == 'i' || s[i] == 'I')) {
      ++i;
      im += sign * (has_digits ? mag : 1.0);
    } else {
      if (!has_digits) throw std::invalid_argument("malformed complex literal: " + text);
      re += sign * mag;
    }
    have_term = true;
  }
  if (!have_term) throw std::invalid_argument("malformed complex literal: " + text);
  return Cpx(re, im);
}

ProjPoint parse_point(const std::string& text) {
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  if (s == "inf" || s == "Inf" || s == "INF") return ProjPoint::infinity();
  return ProjPoint::affine(parse_complex(s));
}

}  // namespace feketelab
