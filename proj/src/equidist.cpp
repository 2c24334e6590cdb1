#include "feketelab/equidist.hpp"

#include <algorithm>
#include <cmath>

#include "feketelab/parallel.hpp"

namespace feketelab {

namespace {

// Gauss-Legendre nodes/weights on [-1,1] by Newton on the Legendre
// recurrence; deterministic and accurate to rounding for n <= a few hundred.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 80; ++iter) {
      double p0 = 1.0, p1 = t;
      for (int j = 2; j <= n; ++j) {
        double p2 = ((2.0 * j - 1.0) * t * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (t * p1 - p0) / (t * t - 1.0);
      double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    double p0 = 1.0, p1 = t;
    for (int j = 2; j <= n; ++j) {
      double p2 = ((2.0 * j - 1.0) * t * p1 - (j - 1.0) * p0) / j;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (t * p1 - p0) / (t * t - 1.0);
    x[i] = t;
    w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
}

double sqr(double v) { return v * v; }

}  // namespace

double TestFunction::laplacian_sphere(const ProjPoint& p) const {
  if (p.is_infinity()) return laplacian_chart_inv(0.0);
  Cpx z = p.affine_value();
  if (std::abs(z) <= 1.0) return sqr(1.0 + std::norm(z)) * laplacian_chart(z);
  Cpx u = 1.0 / z;
  return sqr(1.0 + std::norm(u)) * laplacian_chart_inv(u);
}

TestFunction builtin_test_function(const std::string& name) {
  TestFunction f;
  f.name = name;
  if (name == "re" || name == "im" || name == "height") {
    // The three coordinate functions of the sphere embedding; eigenfunctions
    // of the sphere Laplacian with eigenvalue -8 (radius 1/2), Lip = 2,
    // <phi,phi> = 4/3.
    int axis = (name == "re") ? 0 : (name == "im" ? 1 : 2);
    auto coord = [axis](const ProjPoint& p) {
      Cpx cross = p.z0() * std::conj(p.z1());
      double v[3] = {2.0 * cross.real(), 2.0 * cross.imag(),
                     std::norm(p.z1()) - std::norm(p.z0())};
      return v[axis];
    };
    f.value = coord;
    f.grad_sphere_norm = [coord](const ProjPoint& p) {
      // |grad X_i| = 2 sqrt(1 - X_i^2) on the radius-1/2 sphere
      double v = coord(p);
      return 2.0 * std::sqrt(std::max(0.0, 1.0 - v * v));
    };
    auto chart = [axis](Cpx z, bool inverted) {
      double n = std::norm(z);
      double s = 1.0 + n;
      double v[3] = {2.0 * z.real() / s, 2.0 * z.imag() / s, (1.0 - n) / s};
      // under u = 1/z: re -> re, im -> -im, height -> -height
      double val = v[axis];
      if (inverted && axis > 0) val = -val;
      return -8.0 * val / (s * s);
    };
    f.laplacian_chart = [chart](Cpx z) { return chart(z, false); };
    f.laplacian_chart_inv = [chart](Cpx u) { return chart(u, true); };
    f.lip = 2.0;
    f.dirichlet_sq = 4.0 / 3.0;
    return f;
  }
  if (name == "bump") {
    // (1 - |z|^2/r^2)^4 on |z| < r = 1/2, else 0: C^3, supported off the unit
    // circle. <phi,phi> = 32 B(2,7) = 4/7 in closed form.
    const double r2 = 0.25;
    auto val_of_z = [r2](double n) {
      if (n >= r2) return 0.0;
      double t = 1.0 - n / r2;
      return t * t * t * t;
    };
    f.value = [val_of_z](const ProjPoint& p) {
      if (p.is_infinity()) return 0.0;
      return val_of_z(std::norm(p.affine_value()));
    };
    f.grad_sphere_norm = [r2](const ProjPoint& p) {
      if (p.is_infinity()) return 0.0;
      double n = std::norm(p.affine_value());
      if (n >= r2) return 0.0;
      double t = 1.0 - n / r2;
      double chart_grad = 8.0 * std::sqrt(n) / r2 * t * t * t;
      return (1.0 + n) * chart_grad;
    };
    f.laplacian_chart = [r2](Cpx z) {
      double n = std::norm(z);
      if (n >= r2) return 0.0;
      double s = n / r2, t = 1.0 - s;
      return 16.0 / r2 * t * t * (4.0 * s - 1.0);
    };
    f.laplacian_chart_inv = [r2](Cpx u) {
      double nu = std::norm(u);
      if (nu == 0.0) return 0.0;  // infinity is outside the support
      double n = 1.0 / nu;
      if (n >= r2) return 0.0;
      double s = n / r2, t = 1.0 - s;
      // flat Laplacian transforms with |dz/du|^2 = |z|^4
      return n * n * (16.0 / r2 * t * t * (4.0 * s - 1.0));
    };
    // sup |grad| on a fine radial grid, times pi/2 (arc vs chord) for a safe
    // chordal Lipschitz bound.
    double sup = 0.0;
    for (int i = 0; i <= 4096; ++i) {
      double rr = 0.5 * i / 4096.0;
      double n = rr * rr;
      if (n >= r2) break;
      double t = 1.0 - n / r2;
      sup = std::max(sup, (1.0 + n) * 8.0 * rr / r2 * t * t * t);
    }
    f.lip = 0.5 * M_PI * sup;
    f.dirichlet_sq = 4.0 / 7.0;
    return f;
  }
  throw std::invalid_argument("unknown test function: " + name +
                              " (built-ins: re, im, height, bump)");
}

std::vector<std::string> builtin_test_function_names() {
  return {"re", "im", "height", "bump"};
}

QuadratureRule QuadratureRule::make(int n_polar, int n_azimuth) {
  QuadratureRule r;
  r.n_polar = n_polar;
  r.n_azimuth = n_azimuth;
  gauss_legendre(n_polar, r.nodes_t, r.weights_t);
  return r;
}

ProjPoint QuadratureRule::node(int i, int j) const {
  double t = nodes_t[i];
  double alpha = 2.0 * M_PI * (j + 0.5) / n_azimuth;
  return ProjPoint(std::sqrt(0.5 * (1.0 + t)) * Cpx(std::cos(alpha), std::sin(alpha)),
                   std::sqrt(0.5 * (1.0 - t)));
}

double QuadratureRule::weight(int i) const { return weights_t[i] / (2.0 * n_azimuth); }

double QuadratureRule::integrate(const std::function<double(const ProjPoint&)>& fn) const {
  std::vector<double> rows(n_polar);
  run_blocks(n_polar, [&](std::size_t i) {
    NeumaierSum row;
    for (int j = 0; j < n_azimuth; ++j) row.add(fn(node(static_cast<int>(i), j)));
    rows[i] = row.value() * weight(static_cast<int>(i));
  });
  NeumaierSum total;
  for (double r : rows) total.add(r);
  return total.value();
}

MuIntegrator::MuIntegrator(const GreenEvaluator& green, QuadratureRule rule)
    : green_(green), rule_(std::move(rule)), rule2_(rule_.doubled()) {
  auto fill = [&](const QuadratureRule& r, std::vector<double>& out) {
    out.resize(static_cast<std::size_t>(r.n_polar) * r.n_azimuth);
    run_blocks(r.n_polar, [&](std::size_t i) {
      for (int j = 0; j < r.n_azimuth; ++j)
        out[i * r.n_azimuth + j] = green_.escape_rate(r.node(static_cast<int>(i), j));
    });
  };
  fill(rule_, gF_);
  fill(rule2_, gF2_);
}

double MuIntegrator::integrate(const TestFunction& phi, double* err_estimate) const {
  auto value_on = [&](const QuadratureRule& r, const std::vector<double>& gf) {
    std::vector<NeumaierSum> rows(r.n_polar);
    run_blocks(r.n_polar, [&](std::size_t i) {
      NeumaierSum row;
      for (int j = 0; j < r.n_azimuth; ++j) {
        ProjPoint p = r.node(static_cast<int>(i), j);
        row.add(phi.value(p) + 0.5 * gf[i * r.n_azimuth + j] * phi.laplacian_sphere(p));
      }
      rows[i].add(row.value() * r.weight(static_cast<int>(i)));
    });
    NeumaierSum total;
    for (const auto& row : rows) total.add(row);
    return total.value();
  };
  double v1 = value_on(rule_, gF_);
  double v2 = value_on(rule2_, gF2_);
  if (err_estimate) *err_estimate = std::abs(v2 - v1);
  return v2;
}

double equidist_error(const MuIntegrator& mu, const PullbackMeasure& nu, const TestFunction& phi,
                      double* err_estimate) {
  NeumaierSum atom_sum;
  for (const auto& a : nu.atoms)
    atom_sum.add(static_cast<double>(a.weight) * phi.value(a.point));
  double dk = static_cast<double>(nu.total_mass());  // d^k exactly
  return std::abs(atom_sum.value() / dk - mu.integrate(phi, err_estimate));
}

BoundReport verify_bound(double error, double energy_abs, int k, int d, std::int64_t D_k,
                         const TestFunction& phi, double C) {
  BoundReport r;
  r.error = error;
  r.phi_norm = std::max(phi.lip, std::sqrt(phi.dirichlet_sq));
  double dk = std::pow(static_cast<double>(d), k);
  r.cauchy_bound = C * r.phi_norm * std::sqrt(energy_abs + k * static_cast<double>(D_k) / (dk * dk));
  r.cauchy_margin = r.cauchy_bound - error;
  double rate = std::sqrt(k / dk);
  r.rate_bound = C * r.phi_norm * rate;
  r.rate_margin = r.rate_bound - error;
  r.inferred_c = error / (r.phi_norm * rate);
  return r;
}

}  // namespace feketelab
