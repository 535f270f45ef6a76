#pragma once

// Normalized Einstein-Hilbert energy, the Rayleigh quotient whose infimum is
// the relative Yamabe constant, and the conformal scalar-curvature law.
// All integrals go through `integrate` so that the quotient of a constant
// trial function reproduces the energy bit for bit.

#include "relyamabe/su2_chart.hpp"

namespace relyamabe {

/// Exponents of conformal geometry in dimension n >= 3.
struct ConformalExponents {
  explicit constexpr ConformalExponents(int dimension) : n(dimension) {}

  int n;
  /// 4(n-1)/(n-2)
  constexpr double gradient_coefficient() const { return 4.0 * (n - 1) / (n - 2.0); }
  /// 2n/(n-2)
  constexpr double critical_exponent() const { return 2.0 * n / (n - 2.0); }
  /// (n-2)/n
  constexpr double volume_exponent() const { return (n - 2.0) / n; }
  /// 4/(n-2): metric u^{4/(n-2)} g
  constexpr double metric_exponent() const { return 4.0 / (n - 2.0); }
  /// (n+2)/(n-2)
  constexpr double scalar_exponent() const { return (n + 2.0) / (n - 2.0); }
};

inline constexpr ConformalExponents kChartExponents{3};

struct EnergyReport {
  double total_scalar_integral = 0.0;
  double volume = 0.0;
  double energy = 0.0;
};

/// E(g) = int R dv / Vol^{(n-2)/n}. Throws Domain on zero volume.
EnergyReport einstein_hilbert(const MetricField& metric, const ScalarField& scalar_curvature);

/// Dirichlet form int |df|^2 dv from two-point differences: each cell
/// averages |df|^2 over the eight one-sided gradients at its corners, which is
/// the central-difference term plus sum_a g^{aa} (h_a/2 d_aa f)^2. Positive
/// semidefinite with only constants in its kernel.
double dirichlet_integral(const ScalarField& f, const MetricField& metric);

/// Gradient of dirichlet_integral with respect to the cell values of f.
std::vector<double> dirichlet_gradient(const ScalarField& f, const MetricField& metric);

struct QuotientInput {
  const ScalarField& f;
  const MetricField& metric;
  const ScalarField& scalar_curvature;
};

struct QuotientParts {
  double gradient_integral = 0.0;   // dirichlet_integral(f)
  double potential_integral = 0.0;  // int R f^2 dv
  double critical_integral = 0.0;   // int |f|^{2n/(n-2)} dv
  double value = 0.0;
};

/// (a int |df|^2 + int R f^2) / (int |f|^{2n/(n-2)})^{(n-2)/n}, a = 4(n-1)/(n-2).
/// Throws DegenerateTrial when the L^{2n/(n-2)} norm is below 1e-30, and
/// Domain when f is identically zero.
QuotientParts rayleigh_parts(const QuotientInput& q);
double rayleigh_quotient(const QuotientInput& q);

/// Laplace-Beltrami (1/sqrt g) d_i (sqrt g g^{ij} d_j f) in flux form. Fluxes
/// through the chart axes vanish; fluxes through the xi1 faces use the
/// one-sided face stencils. -Delta is non-negative.
ScalarField laplace_beltrami(const ScalarField& f, const MetricField& metric);

/// Scalar curvature of u^{4/(n-2)} g:
/// u^{-(n+2)/(n-2)} (-(4(n-1)/(n-2)) Delta u + R u). Throws Domain unless u > 0.
ScalarField conformal_scalar(const ScalarField& u, const MetricField& metric,
                             const ScalarField& scalar_curvature);

/// E(u^{4/(n-2)} g) by direct quadrature of conformal_scalar against
/// dv_{u^{4/(n-2)} g} = u^{2n/(n-2)} dv_g.
double conformal_energy_direct(const ScalarField& u, const MetricField& metric,
                               const ScalarField& scalar_curvature);

/// max over boundary faces of |du(nu)| for the g-unit normal nu.
double neumann_residual(const ScalarField& u, const MetricField& metric);

/// |int (-Delta f) f dv - D(f)| / D(f) with D = dirichlet_integral
double green_identity_residual(const ScalarField& f, const MetricField& metric);

}  // namespace relyamabe
