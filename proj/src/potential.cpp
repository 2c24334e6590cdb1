#include "feketelab/potential.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "feketelab/rootsolve.hpp"

namespace feketelab {

namespace {

std::mutex g_gf_sup_mutex;

ProjPoint sphere_grid_point(double t, double alpha) {
  double r0 = std::sqrt(0.5 * (1.0 + t));
  double r1 = std::sqrt(0.5 * (1.0 - t));
  return ProjPoint(r0 * Cpx(std::cos(alpha), std::sin(alpha)), r1);
}

}  // namespace

GreenEvaluator::GreenEvaluator(HomLift lift, double tol, int max_iter)
    : lift_(std::move(lift)), tol_(tol), max_iter_(max_iter) {
  const int d = lift_.degree();
  vf_ = -lift_.log_abs_resultant_normalized() / (d * (d - 1));

  // sup|T_F| = sup |log|F(p)|| / d over unit p: 64x128 grid max plus a fixed
  // 0.1 margin; used only for truncation-error reporting.
  double m = 0.0;
  for (int i = 0; i < 64; ++i) {
    double t = -1.0 + 2.0 * (i + 0.5) / 64.0;
    for (int j = 0; j < 128; ++j) {
      double alpha = 2.0 * M_PI * (j + 0.5) / 128.0;
      ProjPoint p = sphere_grid_point(t, alpha);
      Cpx w0 = form_eval(lift_.P(), p), w1 = form_eval(lift_.Q(), p);
      double lg = 0.5 * std::log(std::norm(w0) + std::norm(w1));
      m = std::max(m, std::abs(lg) / d);
    }
  }
  tf_sup_ = m + 0.1;
}

double GreenEvaluator::truncation_error_bound() const {
  const double d = lift_.degree();
  return tf_sup_ * std::pow(d, -(max_iter_ + 1)) / (1.0 - 1.0 / d);
}

double GreenEvaluator::escape_rate(const ProjPoint& p) const {
  const double d = lift_.degree();
  Cpx q0 = p.z0(), q1 = p.z1();
  NeumaierSum acc;
  double scale = 1.0 / d;   // = d^-(j+1)
  double tail = tf_sup_ / (1.0 - 1.0 / d);
  for (int j = 0; j < max_iter_; ++j) {
    Cpx w0 = form_eval(lift_.P(), q0, q1);
    Cpx w1 = form_eval(lift_.Q(), q0, q1);
    double nrm = std::sqrt(std::norm(w0) + std::norm(w1));
    acc.add(scale * std::log(nrm));
    // guaranteed tail after this term: sum_(i > j) tf_sup d^-(i+1)
    if (tail * scale < tol_) break;
    q0 = w0 / nrm;
    q1 = w1 / nrm;
    scale /= d;
  }
  return acc.value();
}

double GreenEvaluator::phi_f(const ProjPoint& x, const ProjPoint& y) const {
  double c = chordal(x, y);
  if (c == 0.0) return -std::numeric_limits<double>::infinity();
  // grouped so the value is exactly symmetric in (x, y)
  return std::log(c) - (green_gf(x) + green_gf(y));
}

double GreenEvaluator::phi_f_cached(const ProjPoint& x, const ProjPoint& y, double gx,
                                    double gy) const {
  double c = chordal(x, y);
  if (c == 0.0) return -std::numeric_limits<double>::infinity();
  return std::log(c) - (gx + gy) - vf_;
}

double GreenEvaluator::bifurcation_potential() const {
  // det DF = c * prod (b_j X - a_j Y)^(m_j) with unit-normalized (a_j, b_j);
  // the wedge is linear in its second slot, so the constant c is absorbed as
  // log|c|, and B = sum m_j (G^F(C_j) + V_F) + log|c|.
  Form jac = lift_.jacobian_form();
  RootList roots = roots_binary_form(jac);

  // Recover |c| at a sample point no closer than necessary to any root.
  const int probes = 8;
  double best_dist = -1.0;
  ProjPoint sample;
  for (int i = 0; i < probes; ++i) {
    double t = -0.9 + 1.8 * i / (probes - 1);
    ProjPoint cand = sphere_grid_point(t, 0.7 + 0.3 * i);
    double dist = 2.0;
    for (const auto& atom : roots.atoms) dist = std::min(dist, chordal(cand, atom.point));
    if (dist > best_dist) {
      best_dist = dist;
      sample = cand;
    }
  }
  double log_prod = 0.0;
  for (const auto& atom : roots.atoms) {
    // b X - a Y at the sample equals sample ^ (a, b)
    Cpx w = sample.z0() * atom.point.z1() - sample.z1() * atom.point.z0();
    log_prod += atom.multiplicity * std::log(std::abs(w));
  }
  double log_c = std::log(std::abs(form_eval(jac, sample))) - log_prod;

  double b = log_c;
  for (const auto& atom : roots.atoms)
    b += atom.multiplicity * (escape_rate(atom.point) + vf_);
  return b;
}

double GreenEvaluator::chordal_derivative(const ProjPoint& z) const {
  Cpx w0 = form_eval(lift_.P(), z), w1 = form_eval(lift_.Q(), z);
  double det = std::abs(form_eval(lift_.jacobian_form(), z));
  return det / (lift_.degree() * (std::norm(w0) + std::norm(w1)));
}

double GreenEvaluator::chordal_taylor_coeff(const ProjPoint& z, int m) const {
  // Expand W(t) = F(p + t u) ^ F(p) as a polynomial in t, where u is the
  // Hermitian-orthogonal unit tangent at p. W vanishes to order deg_z f at
  // t = 0 and A_m = |W_m| / |F(p)|^2.
  Cpx p0 = z.z0(), p1 = z.z1();
  Cpx u0 = -std::conj(p1), u1 = std::conj(p0);
  Form l0 = {u0, p0};  // coefficient of t, constant — as a form in (t, 1)
  Form l1 = {u1, p1};
  Form a = form_compose(lift_.P(), l0, l1);  // P(p + t u) as a poly in t (descending)
  Form b = form_compose(lift_.Q(), l0, l1);
  Cpx f0 = a.back(), f1 = b.back();  // F(p)
  int n = form_degree(a);
  // coefficient of t^m in a*f1 - b*f0 (descending storage: index n - m)
  Cpx wm = a[n - m] * f1 - b[n - m] * f0;
  return std::abs(wm) / (std::norm(f0) + std::norm(f1));
}

double GreenEvaluator::potential_of_atoms(
    const std::vector<std::pair<ProjPoint, double>>& atoms, const ProjPoint& z) const {
  double gz = green_gf(z);
  NeumaierSum acc;
  for (const auto& [pt, w] : atoms) {
    double c = chordal(z, pt);
    if (c == 0.0) return -std::numeric_limits<double>::infinity();
    acc.add(w * (std::log(c) - gz - green_gf(pt)));
  }
  return acc.value();
}

void GreenEvaluator::compute_gf_sup() const {
  auto grid_max = [&](int nt, int na) {
    double m = 0.0;
    for (int i = 0; i < nt; ++i) {
      double t = -1.0 + 2.0 * (i + 0.5) / nt;
      for (int j = 0; j < na; ++j) {
        double alpha = 2.0 * M_PI * (j + 0.5) / na;
        m = std::max(m, std::abs(green_gf(sphere_grid_point(t, alpha))));
      }
    }
    return m;
  };
  double m1 = grid_max(64, 128);
  double m2 = grid_max(128, 256);
  // The doubling drift feeds the safety bump; a drift beyond 2% relative
  // marks the estimate unstable (g_f is only Holder near the Julia set, so
  // some drift is expected and harmless for an upper-bound-quality constant).
  double est = std::max(m1, m2) + 2.0 * std::abs(m2 - m1);
  bool stable = std::abs(m2 - m1) <= 0.02 * (1.0 + std::abs(m2));
  auto val = std::make_shared<const std::pair<double, bool>>(est, stable);
  std::lock_guard<std::mutex> lk(g_gf_sup_mutex);
  if (!gf_sup_) gf_sup_ = val;
}

double GreenEvaluator::gf_sup_estimate() const {
  {
    std::lock_guard<std::mutex> lk(g_gf_sup_mutex);
    if (gf_sup_) return gf_sup_->first;
  }
  compute_gf_sup();
  return gf_sup_->first;
}

bool GreenEvaluator::gf_sup_stable() const {
  gf_sup_estimate();
  std::lock_guard<std::mutex> lk(g_gf_sup_mutex);
  return gf_sup_->second;
}

}  // namespace feketelab
