#include "feketelab/rootsolve.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <sstream>

namespace feketelab {

namespace {

// Horner value and p'/p of an affine polynomial (descending powers), routed
// through the reversed polynomial when |z| > 1 to avoid overflow.
struct PolyEval {
  Cpx value;
  Cpx log_deriv;
};

PolyEval eval_with_logderiv(const std::vector<Cpx>& c, Cpx z) {
  int n = static_cast<int>(c.size()) - 1;
  if (std::abs(z) <= 1.0) {
    Cpx p = c[0], dp = 0.0;
    for (int i = 1; i <= n; ++i) {
      dp = dp * z + p;
      p = p * z + c[i];
    }
    return {p, dp / p};
  }
  Cpx u = 1.0 / z;
  Cpx q = c[n], dq = 0.0;
  for (int i = n - 1; i >= 0; --i) {
    dq = dq * u + q;
    q = q * u + c[i];
  }
  Cpx zp = 1.0;
  for (int i = 0; i < n; ++i) zp *= z;
  return {q * zp, static_cast<double>(n) * u - u * u * dq / q};
}

// |p(z)| / (sum |c_i| |z|^(n-i)), evaluated in the bounded chart.
double relative_residual(const std::vector<Cpx>& c, Cpx z) {
  const int n = static_cast<int>(c.size()) - 1;
  double az = std::abs(z);
  if (az <= 1.0) {
    Cpx p = c[0];
    for (int i = 1; i <= n; ++i) p = p * z + c[i];
    double s = 0.0, zp = 1.0;
    for (int i = n; i >= 0; --i) {
      s += std::abs(c[i]) * zp;
      zp *= az;
    }
    return std::abs(p) / s;
  }
  Cpx u = 1.0 / z;
  Cpx q = c[n];
  for (int i = n - 1; i >= 0; --i) q = q * u + c[i];
  double s = 0.0, up = 1.0;
  double au = std::abs(u);
  for (int i = 0; i <= n; ++i) {
    s += std::abs(c[i]) * up;
    up *= au;
  }
  return std::abs(q) / s;
}

std::vector<Cpx> derivative_coeffs(const std::vector<Cpx>& c) {
  int n = static_cast<int>(c.size()) - 1;
  std::vector<Cpx> d(n);
  for (int i = 0; i < n; ++i) d[i] = c[i] * static_cast<double>(n - i);
  return d;
}

std::vector<Cpx> aberth(const std::vector<Cpx>& c, int max_iter, bool* converged) {
  const int n = static_cast<int>(c.size()) - 1;
  std::vector<Cpx> z(n);
  double r0 = std::pow(std::abs(c[n] / c[0]), 1.0 / n);
  if (!std::isfinite(r0) || r0 < 1e-9) r0 = 0.5;
  if (r0 > 1e9) r0 = 2.0;
  for (int i = 0; i < n; ++i) {
    double ang = 2.0 * M_PI * (i + 0.25) / n + 0.43;
    z[i] = (r0 + 0.1) * Cpx(std::cos(ang), std::sin(ang));
  }

  *converged = false;
  for (int it = 0; it < max_iter; ++it) {
    double max_step = 0.0;
    for (int i = 0; i < n; ++i) {
      PolyEval pe = eval_with_logderiv(c, z[i]);
      if (pe.value == 0.0) continue;
      Cpx newton = 1.0 / pe.log_deriv;
      Cpx s = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        Cpx diff = z[i] - z[j];
        if (diff == 0.0) continue;  // collapsed pair: plain Newton keeps both moving
        s += 1.0 / diff;
      }
      Cpx denom = 1.0 - newton * s;
      Cpx w = (std::abs(denom) > 1e-300) ? newton / denom : newton;
      z[i] -= w;
      max_step = std::max(max_step, std::abs(w) / (1.0 + std::abs(z[i])));
    }
    if (max_step < 3e-15) {
      *converged = true;
      return z;
    }
  }
  // Multiple roots never meet the step tolerance (the rounded polynomial
  // splits them for good); rounding-level residuals certify the iterates.
  bool ok = true;
  for (int i = 0; i < n; ++i)
    if (relative_residual(c, z[i]) > 1e-10) ok = false;
  *converged = ok;
  return z;
}

std::vector<Cpx> companion_eigenvalues(const std::vector<Cpx>& c) {
  const int n = static_cast<int>(c.size()) - 1;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i) m(0, i) = -c[i + 1] / c[0];
  for (int i = 1; i < n; ++i) m(i, i - 1) = 1.0;
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m, false);
  std::vector<Cpx> z(n);
  for (int i = 0; i < n; ++i) z[i] = es.eigenvalues()(i);
  return z;
}

// Working atom during clustering. Only Aberth-produced roots take part in
// validated merging; deflated 0/infinity roots are exact already.
struct WorkAtom {
  ProjPoint point;
  int multiplicity;
  bool aberth;
};

ProjPoint weighted_center(const WorkAtom& a, const WorkAtom& b) {
  const ProjPoint& ref = a.point;
  Cpx inner = std::conj(b.point.z0()) * ref.z0() + std::conj(b.point.z1()) * ref.z1();
  Cpx phase = (std::abs(inner) > 0) ? inner / std::abs(inner) : Cpx(1.0);
  double wa = a.multiplicity, wb = b.multiplicity;
  return ProjPoint(wa * ref.z0() + wb * phase * b.point.z0(),
                   wa * ref.z1() + wb * phase * b.point.z1());
}

// Newton polish of an m-fold root candidate on p^(m-1) (a simple root there),
// carried out in the chart where the start value is bounded. Returns the
// polished projective point, or nullopt when the iteration misbehaves.
std::optional<ProjPoint> polish_m_fold(const std::vector<Cpx>& affine, const ProjPoint& start,
                                       int m) {
  const int n = static_cast<int>(affine.size()) - 1;
  if (m > n) return std::nullopt;
  bool flip = start.is_infinity() || std::abs(start.affine_value()) > 1.0;
  std::vector<Cpx> chart = affine;
  if (flip) chart.assign(affine.rbegin(), affine.rend());
  std::vector<Cpx> d = chart;
  for (int k = 0; k < m - 1; ++k) d = derivative_coeffs(d);
  if (d.size() < 2) return std::nullopt;

  Cpx t = start.is_infinity() ? Cpx(0.0)
                              : (flip ? 1.0 / start.affine_value() : start.affine_value());
  for (int it = 0; it < 60; ++it) {
    PolyEval pe = eval_with_logderiv(d, t);
    if (pe.value == 0.0) break;
    Cpx step = 1.0 / pe.log_deriv;
    if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) return std::nullopt;
    t -= step;
    if (std::abs(step) < 1e-15 * (1.0 + std::abs(t))) break;
  }
  if (!std::isfinite(t.real()) || !std::isfinite(t.imag())) return std::nullopt;
  return flip ? ProjPoint(Cpx(1.0), t) : ProjPoint(t, Cpx(1.0));
}

// Backward-error test for an m-fold root at z: every derivative of order
// below m must vanish to rounding there. A cluster of m genuinely distinct
// roots of spread delta leaves p^(m-2) at size ~delta^2, so merges happen
// only inside the intrinsic double-precision ambiguity scale.
bool validate_m_fold(const std::vector<Cpx>& affine, const ProjPoint& at, int m) {
  bool flip = at.is_infinity() || std::abs(at.affine_value()) > 1.0;
  std::vector<Cpx> chart = affine;
  if (flip) chart.assign(affine.rbegin(), affine.rend());
  Cpx t = at.is_infinity() ? Cpx(0.0) : (flip ? 1.0 / at.affine_value() : at.affine_value());
  std::vector<Cpx> d = chart;
  for (int j = 0; j <= m - 2; ++j) {
    if (relative_residual(d, t) > 1e-12) return false;
    d = derivative_coeffs(d);
    if (d.size() < 2 && j < m - 2) return false;
  }
  return true;
}

bool atom_less_points(const ProjPoint& a, const ProjPoint& b) {
  bool ia = a.is_infinity(), ib = b.is_infinity();
  if (ia != ib) return ib;
  if (ia) return false;
  Cpx za = a.affine_value(), zb = b.affine_value();
  if (za.real() != zb.real()) return za.real() < zb.real();
  return za.imag() < zb.imag();
}

bool atom_less(const RootAtom& a, const RootAtom& b) { return atom_less_points(a.point, b.point); }

}  // namespace

int RootList::total_multiplicity() const {
  int s = 0;
  for (const auto& a : atoms) s += a.multiplicity;
  return s;
}

RootList roots_binary_form(const Form& coeffs) {
  const int n = form_degree(coeffs);
  double cmax = 0.0;
  for (const auto& c : coeffs) cmax = std::max(cmax, std::abs(c));
  if (!(cmax > 0.0)) throw std::invalid_argument("roots_binary_form: zero form");

  // Coefficients at rounding scale are structural zeros; left in place they
  // would spawn spurious huge roots.
  const double zero_tol = 1e-12 * cmax;
  int lead = 0;
  while (lead <= n && std::abs(coeffs[lead]) <= zero_tol) ++lead;
  int trail = 0;
  while (trail <= n - lead && std::abs(coeffs[n - trail]) <= zero_tol) ++trail;

  std::vector<Cpx> affine(coeffs.begin() + lead, coeffs.end() - trail);
  const int m_affine = static_cast<int>(affine.size()) - 1;

  std::vector<WorkAtom> atoms;
  if (m_affine > 0) {
    bool ok = false;
    std::vector<Cpx> roots = aberth(affine, 200, &ok);
    if (!ok) {
      std::vector<Cpx> alt = companion_eigenvalues(affine);
      double worst_ab = 0.0, worst_cm = 0.0;
      for (int i = 0; i < m_affine; ++i) {
        worst_ab = std::max(worst_ab, relative_residual(affine, roots[i]));
        worst_cm = std::max(worst_cm, relative_residual(affine, alt[i]));
      }
      if (worst_cm < worst_ab) roots = alt;
      if (std::min(worst_ab, worst_cm) > 1e-7) {
        std::ostringstream msg;
        msg << "roots_binary_form: no convergence at degree " << m_affine
            << "; best relative residuals aberth=" << worst_ab << " companion=" << worst_cm;
        throw NumericError(msg.str());
      }
    }
    for (const Cpx& r : roots) atoms.push_back({ProjPoint::affine(r), 1, true});
  }
  for (int i = 0; i < trail; ++i) atoms.push_back({ProjPoint(0.0, 1.0), 1, false});
  for (int i = 0; i < lead; ++i) atoms.push_back({ProjPoint::infinity(), 1, false});

  std::sort(atoms.begin(), atoms.end(),
            [](const WorkAtom& a, const WorkAtom& b) { return atom_less_points(a.point, b.point); });

  // Stage 1: single-linkage merge at the base radius. Handles split double
  // roots and numerically coincident atoms; merged centers are polished below.
  bool merged_any = true;
  while (merged_any) {
    merged_any = false;
    for (std::size_t i = 0; i < atoms.size() && !merged_any; ++i)
      for (std::size_t j = i + 1; j < atoms.size() && !merged_any; ++j)
        if (chordal(atoms[i].point, atoms[j].point) <= kRootClusterRadius) {
          WorkAtom merged{weighted_center(atoms[i], atoms[j]),
                          atoms[i].multiplicity + atoms[j].multiplicity,
                          atoms[i].aberth && atoms[j].aberth};
          atoms[i] = merged;
          atoms.erase(atoms.begin() + j);
          merged_any = true;
        }
  }

  // Stage 2: validated merging. The rounded polynomial splits an exact
  // m-fold root by ~eps^(1/m), far beyond any fixed radius for m >= 3, so
  // candidate unions are accepted exactly when the polished center passes the
  // backward-error test above.
  if (m_affine > 0) {
    merged_any = true;
    while (merged_any) {
      merged_any = false;
      for (std::size_t i = 0; i < atoms.size() && !merged_any; ++i) {
        for (std::size_t j = i + 1; j < atoms.size() && !merged_any; ++j) {
          if (!atoms[i].aberth || !atoms[j].aberth) continue;
          if (chordal(atoms[i].point, atoms[j].point) > 1e-3) continue;
          int m = atoms[i].multiplicity + atoms[j].multiplicity;
          auto polished = polish_m_fold(affine, weighted_center(atoms[i], atoms[j]), m);
          if (!polished) continue;
          if (chordal(*polished, atoms[i].point) > 1e-3 ||
              chordal(*polished, atoms[j].point) > 1e-3)
            continue;
          if (!validate_m_fold(affine, *polished, m)) continue;
          atoms[i] = {*polished, m, true};
          atoms.erase(atoms.begin() + j);
          merged_any = true;
        }
      }
    }
    // Polish surviving multiple atoms that stage 1 built from centroids.
    for (auto& atom : atoms) {
      if (!atom.aberth || atom.multiplicity < 2) continue;
      auto polished = polish_m_fold(affine, atom.point, atom.multiplicity);
      if (polished && chordal(*polished, atom.point) <= 8.0 * kRootClusterRadius &&
          validate_m_fold(affine, *polished, atom.multiplicity))
        atom.point = *polished;
    }
  }

  RootList out;
  for (const auto& a : atoms) out.atoms.push_back({a.point, a.multiplicity});

  // Gap-ratio warning: multiplicity decisions close to the ambiguity scale.
  for (std::size_t i = 0; i < out.atoms.size(); ++i) {
    if (out.atoms[i].multiplicity < 2) continue;
    double amb = std::pow(1e-13, 1.0 / out.atoms[i].multiplicity);
    double gap = 2.0;
    for (std::size_t j = 0; j < out.atoms.size(); ++j)
      if (j != i) gap = std::min(gap, chordal(out.atoms[i].point, out.atoms[j].point));
    if (gap < 10.0 * amb) out.cluster_warning = true;
  }

  double norm2 = 0.0;
  for (const auto& c : coeffs) norm2 += std::norm(c);
  norm2 = std::sqrt(norm2);
  for (const auto& atom : out.atoms)
    out.residual_max = std::max(out.residual_max, std::abs(form_eval(coeffs, atom.point)) / norm2);

  std::sort(out.atoms.begin(), out.atoms.end(), atom_less);
  return out;
}

}  // namespace feketelab
