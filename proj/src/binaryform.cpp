#include "feketelab/binaryform.hpp"

#include <cmath>

namespace feketelab {

Cpx form_eval(const Form& f, Cpx x, Cpx y) {
  int n = form_degree(f);
  if (n < 0) return 0.0;
  if (std::abs(x) >= std::abs(y)) {
    // x^n * sum f[i] (y/x)^i
    Cpx t = y / x;
    Cpx acc = f[n];
    for (int i = n - 1; i >= 0; --i) acc = acc * t + f[i];
    Cpx xp = 1.0;
    for (int i = 0; i < n; ++i) xp *= x;
    return acc * xp;
  }
  Cpx t = x / y;
  Cpx acc = f[0];
  for (int i = 1; i <= n; ++i) acc = acc * t + f[i];
  Cpx yp = 1.0;
  for (int i = 0; i < n; ++i) yp *= y;
  return acc * yp;
}

}  // namespace feketelab
