#pragma once

#include <cstddef>
#include <vector>

#include "feketelab/common.hpp"
#include "feketelab/projpoint.hpp"

namespace feketelab {

// A binary form of degree n is a vector of n+1 coefficients, index i holding
// the coefficient of X^(n-i) Y^i. The generic operations are templated so the
// exact-arithmetic code paths can reuse them.
using Form = std::vector<Cpx>;

template <class T>
int form_degree(const std::vector<T>& f) {
  return static_cast<int>(f.size()) - 1;
}

template <class T>
std::vector<T> form_mul(const std::vector<T>& a, const std::vector<T>& b) {
  std::vector<T> r(a.size() + b.size() - 1, T(0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

template <class T>
std::vector<T> form_add(std::vector<T> a, const std::vector<T>& b) {
  if (b.size() > a.size()) a.insert(a.begin(), b.size() - a.size(), T(0));
  std::size_t off = a.size() - b.size();
  for (std::size_t j = 0; j < b.size(); ++j) a[off + j] += b[j];
  return a;
}

template <class T>
std::vector<T> form_scale(std::vector<T> a, const T& c) {
  for (auto& x : a) x = x * c;
  return a;
}

// d/dX and d/dY of a degree-n form, as degree-(n-1) forms.
template <class T>
std::vector<T> form_dx(const std::vector<T>& f) {
  int n = form_degree(f);
  std::vector<T> r(n, T(0));
  for (int i = 0; i < n; ++i) r[i] = f[i] * T(n - i);
  return r;
}

template <class T>
std::vector<T> form_dy(const std::vector<T>& f) {
  int n = form_degree(f);
  std::vector<T> r(n, T(0));
  for (int i = 0; i < n; ++i) r[i] = f[i + 1] * T(i + 1);
  return r;
}

// f(G0, G1) for a pair of forms of equal degree; Horner over forms.
template <class T>
std::vector<T> form_compose(const std::vector<T>& f, const std::vector<T>& g0,
                            const std::vector<T>& g1) {
  int n = form_degree(f);
  std::vector<std::vector<T>> ypow(n + 1);
  ypow[0] = {T(1)};
  for (int i = 1; i <= n; ++i) ypow[i] = form_mul(ypow[i - 1], g1);
  std::vector<T> r = {f[0]};
  for (int i = 1; i <= n; ++i)
    r = form_add(form_mul(r, g0), form_scale(ypow[i], f[i]));
  return r;
}

/// Evaluates a complex form at a homogeneous pair. Factors out the larger
/// coordinate so the inner Horner runs on a ratio of modulus <= 1.
Cpx form_eval(const Form& f, Cpx x, Cpx y);
inline Cpx form_eval(const Form& f, const ProjPoint& p) {
  return form_eval(f, p.z0(), p.z1());
}

}  // namespace feketelab
