#pragma once

#include <functional>
#include <string>
#include <vector>

#include "feketelab/common.hpp"
#include "feketelab/potential.hpp"
#include "feketelab/pullback.hpp"
#include "feketelab/projpoint.hpp"

namespace feketelab {

/// A closed-form scalar test function on the sphere with analytic gradient
/// and Laplacian evaluators.
///
/// Conventions: the sphere metric is the one under which the chordal distance
/// is the chord of a radius-1/2 round sphere; grad_sphere_norm is |grad| in
/// that metric, laplacian_chart the plain flat Laplacian in the given chart
/// (z, or u = 1/z for chart_inv). The distributional normalization
/// Delta = (1/2pi) * chart Laplacian fixes the Dirichlet form as
/// <phi,phi> = (1/2pi) integral |grad phi|^2 dA, which is chart-independent.
/// lip is a declared upper bound for the chordal Lipschitz constant.
struct TestFunction {
  std::string name;
  std::function<double(const ProjPoint&)> value;
  std::function<double(const ProjPoint&)> grad_sphere_norm;
  std::function<double(Cpx)> laplacian_chart;      // z-chart
  std::function<double(Cpx)> laplacian_chart_inv;  // u = 1/z chart
  double lip = 0.0;
  double dirichlet_sq = 0.0;  // <phi, phi>

  /// (1+|z|^2)^2 * chart Laplacian, evaluated in the better chart.
  double laplacian_sphere(const ProjPoint& p) const;
};

/// Built-ins: "re", "im", "height" (the three sphere coordinate functions,
/// Lip = 2, <phi,phi> = 4/3) and "bump" (a C^3 radial bump of radius 1/2
/// around 0, <phi,phi> = 4/7). Throws std::invalid_argument for other names.
TestFunction builtin_test_function(const std::string& name);
std::vector<std::string> builtin_test_function_names();

/// Tensor quadrature on the sphere: Gauss-Legendre in the polar coordinate
/// t = cos(theta) x uniform azimuth. Exact for constants; integrates against
/// the normalized area element omega.
struct QuadratureRule {
  int n_polar, n_azimuth;
  std::vector<double> nodes_t, weights_t;  // Gauss-Legendre on [-1, 1]

  static QuadratureRule standard() { return make(64, 128); }
  static QuadratureRule make(int n_polar, int n_azimuth);
  QuadratureRule doubled() const { return make(2 * n_polar, 2 * n_azimuth); }

  ProjPoint node(int i, int j) const;
  double weight(int i) const;  // full weight of node (i, j): weights_t[i]/(2 n_azimuth)

  /// integral of fn d(omega); fixed-order block reduction.
  double integrate(const std::function<double(const ProjPoint&)>& fn) const;
};

/// integral of phi d(mu_f), computed by parts as
/// integral phi d(omega) + (1/2) integral g_F * Delta_sphere(phi) d(omega),
/// with a doubling-based error estimate. Caches g_F on both grids.
class MuIntegrator {
 public:
  MuIntegrator(const GreenEvaluator& green, QuadratureRule rule = QuadratureRule::standard());
  double integrate(const TestFunction& phi, double* err_estimate = nullptr) const;

 private:
  const GreenEvaluator& green_;
  QuadratureRule rule_, rule2_;
  std::vector<double> gF_, gF2_;  // cached escape rates on the two grids
};

/// | d^-k sum w phi(atom) - integral phi d(mu_f) |.
double equidist_error(const MuIntegrator& mu, const PullbackMeasure& nu, const TestFunction& phi,
                      double* err_estimate = nullptr);

/// Margin report for the two displayed bound shapes.
struct BoundReport {
  double error = 0.0;
  double phi_norm = 0.0;       // max(Lip, sqrt(<phi,phi>))
  double cauchy_bound = 0.0;   // C * phi_norm * sqrt(|E| + k d^-2k D)
  double cauchy_margin = 0.0;  // bound - error
  double rate_bound = 0.0;     // C * phi_norm * sqrt(k d^-k)
  double rate_margin = 0.0;
  double inferred_c = 0.0;     // error / (phi_norm sqrt(k d^-k))
};

BoundReport verify_bound(double error, double energy_abs, int k, int d, std::int64_t D_k,
                         const TestFunction& phi, double C);

}  // namespace feketelab
