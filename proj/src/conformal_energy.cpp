#include "relyamabe/conformal_energy.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "relyamabe/errors.hpp"

namespace relyamabe {

namespace {

constexpr double kDegenerateNorm = 1e-30;

void require_same_grid(const HopfGrid& a, const HopfGrid& b) {
  if (!(a == b)) throw Error(ErrorKind::ShapeMismatch, "fields live on different grids");
}

// One-sided differences of f at cell c along every axis. At the ends of a
// non-periodic axis the missing side copies the present one.
struct SidedDifferences {
  std::array<double, 3> minus;
  std::array<double, 3> plus;
  std::array<std::size_t, 3> below;
  std::array<std::size_t, 3> above;
};

SidedDifferences sided_differences(const ScalarField& f, int i, int j, int k) {
  const HopfGrid& grid = f.grid();
  const std::size_t c = grid.index(i, j, k);
  const std::array<int, 3> pos{i, j, k};
  SidedDifferences d;
  for (int axis = 0; axis < 3; ++axis) {
    const bool periodic = HopfGrid::periodic(axis);
    const bool has_below = periodic || pos[axis] > 0;
    const bool has_above = periodic || pos[axis] + 1 < grid.extent(axis);
    d.below[axis] = has_below ? grid.shifted(i, j, k, axis, -1) : c;
    d.above[axis] = has_above ? grid.shifted(i, j, k, axis, 1) : c;
    const double h = grid.spacing(axis);
    double minus = has_below ? (f[c] - f[d.below[axis]]) / h : 0.0;
    double plus = has_above ? (f[d.above[axis]] - f[c]) / h : 0.0;
    if (!has_below) minus = plus;
    if (!has_above) plus = minus;
    d.minus[axis] = minus;
    d.plus[axis] = plus;
  }
  return d;
}

}  // namespace

double dirichlet_integral(const ScalarField& f, const MetricField& metric) {
  require_same_grid(f.grid(), metric.grid());
  const HopfGrid& grid = f.grid();
  std::vector<double> terms(grid.size());
  for (int i = 0; i < grid.n_eta(); ++i)
    for (int j = 0; j < grid.n_xi1(); ++j)
      for (int k = 0; k < grid.n_xi2(); ++k) {
        const std::size_t c = grid.index(i, j, k);
        const SidedDifferences d = sided_differences(f, i, j, k);
        const Eigen::Matrix3d& a = metric.g_inv(c);
        Eigen::Vector3d mean;
        double jump = 0.0;
        for (int axis = 0; axis < 3; ++axis) {
          mean(axis) = 0.5 * (d.plus[axis] + d.minus[axis]);
          const double s = 0.5 * (d.plus[axis] - d.minus[axis]);
          jump += a(axis, axis) * s * s;
        }
        terms[c] = metric.weight(c) * (mean.dot(a * mean) + jump);
      }
  return std::max(0.0, pairwise_sum(terms));
}

std::vector<double> dirichlet_gradient(const ScalarField& f, const MetricField& metric) {
  require_same_grid(f.grid(), metric.grid());
  const HopfGrid& grid = f.grid();
  std::vector<double> out(grid.size(), 0.0);
  for (int i = 0; i < grid.n_eta(); ++i)
    for (int j = 0; j < grid.n_xi1(); ++j)
      for (int k = 0; k < grid.n_xi2(); ++k) {
        const std::size_t c = grid.index(i, j, k);
        const SidedDifferences d = sided_differences(f, i, j, k);
        const Eigen::Matrix3d& a = metric.g_inv(c);
        const double w = metric.weight(c);
        Eigen::Vector3d mean;
        for (int axis = 0; axis < 3; ++axis) mean(axis) = 0.5 * (d.plus[axis] + d.minus[axis]);
        const Eigen::Vector3d v = 2.0 * w * (a * mean);
        for (int axis = 0; axis < 3; ++axis) {
          const double u = 2.0 * w * a(axis, axis) * 0.5 * (d.plus[axis] - d.minus[axis]);
          const double h = grid.spacing(axis);
          // Coefficients of the plus and minus differences; at a closed end
          // both refer to the same pair of cells.
          const double gp = 0.5 * (v(axis) + u) / h;
          const double gm = 0.5 * (v(axis) - u) / h;
          if (d.above[axis] != c) {
            out[d.above[axis]] += gp;
            out[c] -= gp;
          } else {
            out[c] += gp;
            out[d.below[axis]] -= gp;
          }
          if (d.below[axis] != c) {
            out[c] += gm;
            out[d.below[axis]] -= gm;
          } else {
            out[d.above[axis]] += gm;
            out[c] -= gm;
          }
        }
      }
  return out;
}

EnergyReport einstein_hilbert(const MetricField& metric, const ScalarField& scalar_curvature) {
  require_same_grid(metric.grid(), scalar_curvature.grid());
  EnergyReport rep;
  rep.total_scalar_integral = integrate(scalar_curvature, metric);
  rep.volume = integrate(ScalarField::constant(metric.grid(), 1.0), metric);
  if (!(rep.volume > 0.0)) throw Error(ErrorKind::Domain, "zero volume");
  rep.energy = rep.total_scalar_integral / std::pow(rep.volume, kChartExponents.volume_exponent());
  return rep;
}

QuotientParts rayleigh_parts(const QuotientInput& q) {
  require_same_grid(q.f.grid(), q.metric.grid());
  require_same_grid(q.f.grid(), q.scalar_curvature.grid());
  if (!(q.f.max_abs() > 0.0)) throw Error(ErrorKind::Domain, "trial function is identically zero");

  const std::size_t size = q.f.size();
  std::vector<double> potential(size);
  std::vector<double> critical(size);
  const double p = kChartExponents.critical_exponent();
  for (std::size_t n = 0; n < size; ++n) {
    const double f = q.f[n];
    potential[n] = q.scalar_curvature[n] * f * f;
    critical[n] = std::pow(std::abs(f), p);
  }

  QuotientParts parts;
  parts.gradient_integral = dirichlet_integral(q.f, q.metric);
  parts.potential_integral = integrate(ScalarField(q.f.grid(), std::move(potential)), q.metric);
  parts.critical_integral = integrate(ScalarField(q.f.grid(), std::move(critical)), q.metric);
  const double denom = std::pow(parts.critical_integral, kChartExponents.volume_exponent());
  if (!(std::pow(parts.critical_integral, 1.0 / p) >= kDegenerateNorm))
    throw Error(ErrorKind::DegenerateTrial, "L^p norm of trial function underflows");
  parts.value =
      (kChartExponents.gradient_coefficient() * parts.gradient_integral + parts.potential_integral) /
      denom;
  return parts;
}

double rayleigh_quotient(const QuotientInput& q) { return rayleigh_parts(q).value; }

ScalarField laplace_beltrami(const ScalarField& f, const MetricField& metric) {
  require_same_grid(f.grid(), metric.grid());
  const HopfGrid& grid = f.grid();
  const int n0 = grid.n_eta();
  const int n1 = grid.n_xi1();
  const int n2 = grid.n_xi2();

  std::vector<Eigen::Matrix3d> coeff(grid.size());
  for (std::size_t n = 0; n < grid.size(); ++n) coeff[n] = metric.sqrt_det(n) * metric.g_inv(n);
  const auto grad = coordinate_gradient(f);

  // Flux across the interior face between cells lo and hi along `axis`.
  auto interior_flux = [&](std::size_t lo, std::size_t hi, int axis) {
    const Eigen::Matrix3d a = 0.5 * (coeff[lo] + coeff[hi]);
    Eigen::Vector3d d = 0.5 * (grad[lo] + grad[hi]);
    d(axis) = (f[hi] - f[lo]) / grid.spacing(axis);
    return a.row(axis).dot(d);
  };

  // Boundary fluxes through xi1 = 0 and xi1 = pi, indexed [i * n2 + k].
  std::array<std::vector<double>, 2> boundary_flux;
  for (int side = 0; side < 2; ++side) {
    const auto face_grad = face::gradient(f, side);
    const int j0 = face::layer_index(grid, side, 0);
    const int j1 = face::layer_index(grid, side, 1);
    const int j2 = face::layer_index(grid, side, 2);
    boundary_flux[side].resize(face_grad.size());
    for (int i = 0; i < n0; ++i)
      for (int k = 0; k < n2; ++k) {
        const Eigen::Matrix3d a = face::extrapolate(coeff[grid.index(i, j0, k)],
                                                    coeff[grid.index(i, j1, k)],
                                                    coeff[grid.index(i, j2, k)]);
        const std::size_t n = static_cast<std::size_t>(i) * n2 + k;
        boundary_flux[side][n] = a.row(1).dot(face_grad[n]);
      }
  }

  std::vector<double> out(grid.size());
  for (int i = 0; i < n0; ++i)
    for (int j = 0; j < n1; ++j)
      for (int k = 0; k < n2; ++k) {
        const std::size_t c = grid.index(i, j, k);
        double div = 0.0;

        // eta: no flux through the chart axes
        const double eta_plus = i + 1 < n0 ? interior_flux(c, grid.index(i + 1, j, k), 0) : 0.0;
        const double eta_minus = i > 0 ? interior_flux(grid.index(i - 1, j, k), c, 0) : 0.0;
        div += (eta_plus - eta_minus) / grid.spacing(0);

        const std::size_t b = static_cast<std::size_t>(i) * n2 + k;
        const double xi1_plus =
            j + 1 < n1 ? interior_flux(c, grid.index(i, j + 1, k), 1) : boundary_flux[1][b];
        const double xi1_minus =
            j > 0 ? interior_flux(grid.index(i, j - 1, k), c, 1) : boundary_flux[0][b];
        div += (xi1_plus - xi1_minus) / grid.spacing(1);

        const double xi2_plus = interior_flux(c, grid.shifted(i, j, k, 2, 1), 2);
        const double xi2_minus = interior_flux(grid.shifted(i, j, k, 2, -1), c, 2);
        div += (xi2_plus - xi2_minus) / grid.spacing(2);

        out[c] = div / metric.sqrt_det(c);
      }
  return ScalarField(grid, std::move(out));
}

ScalarField conformal_scalar(const ScalarField& u, const MetricField& metric,
                             const ScalarField& scalar_curvature) {
  require_same_grid(u.grid(), metric.grid());
  require_same_grid(u.grid(), scalar_curvature.grid());
  for (std::size_t n = 0; n < u.size(); ++n)
    if (!(u[n] > 0.0)) throw Error(ErrorKind::Domain, "conformal factor must be positive");

  const ScalarField lap = laplace_beltrami(u, metric);
  const double a = kChartExponents.gradient_coefficient();
  const double e = kChartExponents.scalar_exponent();
  std::vector<double> out(u.size());
  for (std::size_t n = 0; n < u.size(); ++n)
    out[n] = std::pow(u[n], -e) * (-a * lap[n] + scalar_curvature[n] * u[n]);
  return ScalarField(u.grid(), std::move(out));
}

double conformal_energy_direct(const ScalarField& u, const MetricField& metric,
                               const ScalarField& scalar_curvature) {
  const ScalarField r_bar = conformal_scalar(u, metric, scalar_curvature);
  const double p = kChartExponents.critical_exponent();
  std::vector<double> density(u.size());
  std::vector<double> volume(u.size());
  for (std::size_t n = 0; n < u.size(); ++n) {
    volume[n] = std::pow(u[n], p);
    density[n] = r_bar[n] * volume[n];
  }
  const double total = integrate(ScalarField(u.grid(), std::move(density)), metric);
  const double vol = integrate(ScalarField(u.grid(), std::move(volume)), metric);
  return total / std::pow(vol, kChartExponents.volume_exponent());
}

double neumann_residual(const ScalarField& u, const MetricField& metric) {
  require_same_grid(u.grid(), metric.grid());
  const HopfGrid& grid = u.grid();
  const int n2 = grid.n_xi2();
  double worst = 0.0;
  for (int side = 0; side < 2; ++side) {
    const auto du = face::gradient(u, side);
    const int j0 = face::layer_index(grid, side, 0);
    const int j1 = face::layer_index(grid, side, 1);
    const int j2 = face::layer_index(grid, side, 2);
    for (int i = 0; i < grid.n_eta(); ++i)
      for (int k = 0; k < n2; ++k) {
        const Eigen::Matrix3d ginv = face::extrapolate(metric.g_inv(grid.index(i, j0, k)),
                                                       metric.g_inv(grid.index(i, j1, k)),
                                                       metric.g_inv(grid.index(i, j2, k)));
        const double g11 = ginv(1, 1);
        if (!(g11 > 0.0)) continue;
        const double du_nu = ginv.row(1).dot(du[static_cast<std::size_t>(i) * n2 + k]) / std::sqrt(g11);
        worst = std::max(worst, std::abs(du_nu));
      }
  }
  return worst;
}

double green_identity_residual(const ScalarField& f, const MetricField& metric) {
  const ScalarField lap = laplace_beltrami(f, metric);
  std::vector<double> lhs(f.size());
  for (std::size_t n = 0; n < f.size(); ++n) lhs[n] = -lap[n] * f[n];
  const double left = integrate(ScalarField(f.grid(), std::move(lhs)), metric);
  const double right = dirichlet_integral(f, metric);
  if (!(right > 0.0)) return std::abs(left);
  return std::abs(left - right) / right;
}

}  // namespace relyamabe
