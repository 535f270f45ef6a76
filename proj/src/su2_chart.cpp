#include "relyamabe/su2_chart.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "relyamabe/errors.hpp"

namespace relyamabe {

namespace {

constexpr double kSphereTol = 1e-12;
constexpr double kChartTol = 1e-10;

using Complex = std::complex<double>;

// d/dx at sample n of a 1D row with spacing h. `at(m)` reads the row.
// Differences are formed first so constant rows give exactly zero.
template <typename Reader>
double derivative_1d(const Reader& at, int n, int size, double h, bool periodic) {
  if (periodic) {
    const int prev = (n - 1 + size) % size;
    const int next = (n + 1) % size;
    return (at(next) - at(prev)) / (2.0 * h);
  }
  if (n == 0) return (3.0 * (at(1) - at(0)) - (at(2) - at(1))) / (2.0 * h);
  if (n == size - 1) return (3.0 * (at(n) - at(n - 1)) - (at(n - 1) - at(n - 2))) / (2.0 * h);
  return (at(n + 1) - at(n - 1)) / (2.0 * h);
}

// Stencil of derivative_1d as (offset, weight) pairs; used for the adjoint.
struct Tap {
  int offset;
  double weight;
};

int stencil_1d(int n, int size, double h, bool periodic, std::array<Tap, 3>& taps) {
  const double c = 1.0 / (2.0 * h);
  if (periodic || (n > 0 && n < size - 1)) {
    taps[0] = {-1, -c};
    taps[1] = {+1, +c};
    return 2;
  }
  if (n == 0) {
    taps[0] = {0, -3.0 * c};
    taps[1] = {1, 4.0 * c};
    taps[2] = {2, -1.0 * c};
    return 3;
  }
  taps[0] = {0, 3.0 * c};
  taps[1] = {-1, -4.0 * c};
  taps[2] = {-2, 1.0 * c};
  return 3;
}

double pairwise_sum_impl(const double* v, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum_impl(v, half) + pairwise_sum_impl(v + half, n - half);
}

void require_same_grid(const HopfGrid& a, const HopfGrid& b) {
  if (!(a == b)) throw Error(ErrorKind::ShapeMismatch, "fields live on different grids");
}

}  // namespace

Eigen::Vector4d to_real4(Complex z, Complex w) {
  return {z.real(), z.imag(), w.real(), w.imag()};
}

S3Point embed(const HopfPoint& p) {
  return {std::cos(p.eta) * std::polar(1.0, p.xi1), std::sin(p.eta) * std::polar(1.0, p.xi2)};
}

std::array<Eigen::Vector4d, 3> coordinate_tangents(const HopfPoint& p) {
  const Complex i(0.0, 1.0);
  const Complex e1 = std::polar(1.0, p.xi1);
  const Complex e2 = std::polar(1.0, p.xi2);
  const double c = std::cos(p.eta);
  const double s = std::sin(p.eta);
  return {to_real4(-s * e1, c * e2), to_real4(i * c * e1, 0.0), to_real4(0.0, i * s * e2)};
}

std::array<Eigen::Vector4d, 3> frame_fields(const S3Point& p) {
  const double r2 = std::norm(p.z) + std::norm(p.w);
  if (!(std::abs(r2 - 1.0) <= kSphereTol))
    throw Error(ErrorKind::Domain, "point is not on the unit 3-sphere (|z|^2+|w|^2 = " +
                                       std::to_string(r2) + ")");
  const Complex i(0.0, 1.0);
  const Complex z = p.z;
  const Complex w = p.w;
  return {to_real4(i * z, i * w), to_real4(std::conj(w), -std::conj(z)),
          to_real4(-i * std::conj(w), i * std::conj(z))};
}

CoordinateMetricSample coordinate_metric(const HopfPoint& p, const FrameMetric& frame_metric) {
  const auto frame = frame_fields(embed(p));
  const auto tangents = coordinate_tangents(p);

  // The V_i are round-orthonormal, so components are plain dot products.
  Eigen::Matrix3d e;  // e(i, k): component of tangent i along V_k
  double residual = 0.0;
  for (int a = 0; a < 3; ++a) {
    Eigen::Vector4d rest = tangents[a];
    for (int k = 0; k < 3; ++k) {
      e(a, k) = tangents[a].dot(frame[k]);
      rest -= e(a, k) * frame[k];
    }
    residual = std::max(residual, rest.norm());
  }
  CoordinateMetricSample out;
  out.g = e * frame_metric.matrix() * e.transpose();
  out.g = (0.5 * (out.g + out.g.transpose())).eval();
  out.expansion_residual = residual;
  return out;
}

HopfGrid HopfGrid::make(int n_eta, int n_xi1, int n_xi2) {
  if (n_eta < 4 || n_xi1 < 4 || n_xi2 < 4)
    throw Error(ErrorKind::InvalidParams, "grid resolution components must be >= 4");
  HopfGrid g;
  g.n_ = {n_eta, n_xi1, n_xi2};
  g.h_ = {std::numbers::pi / (2.0 * n_eta), std::numbers::pi / n_xi1, 2.0 * std::numbers::pi / n_xi2};
  return g;
}

std::size_t HopfGrid::shifted(int i, int j, int k, int axis, int offset) const {
  std::array<int, 3> idx{i, j, k};
  idx[axis] += offset;
  if (periodic(axis)) idx[axis] = ((idx[axis] % n_[axis]) + n_[axis]) % n_[axis];
  return index(idx[0], idx[1], idx[2]);
}

ScalarField::ScalarField(const HopfGrid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw Error(ErrorKind::ShapeMismatch, "field size does not match grid");
  for (double v : values_)
    if (!std::isfinite(v)) throw Error(ErrorKind::Domain, "scalar field values must be finite");
}

ScalarField ScalarField::constant(const HopfGrid& grid, double value) {
  return ScalarField(grid, std::vector<double>(grid.size(), value));
}

ScalarField ScalarField::from_coordinates(const HopfGrid& grid,
                                          const std::function<double(const HopfPoint&)>& f) {
  std::vector<double> v(grid.size());
  for (int i = 0; i < grid.n_eta(); ++i)
    for (int j = 0; j < grid.n_xi1(); ++j)
      for (int k = 0; k < grid.n_xi2(); ++k) v[grid.index(i, j, k)] = f(grid.center(i, j, k));
  return ScalarField(grid, std::move(v));
}

ScalarField ScalarField::from_embedding(const HopfGrid& grid,
                                        const std::function<double(const Eigen::Vector4d&)>& f) {
  return from_coordinates(grid, [&](const HopfPoint& p) {
    const S3Point q = embed(p);
    return f(to_real4(q.z, q.w));
  });
}

double ScalarField::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

MetricField MetricField::from_cells(const HopfGrid& grid, std::vector<Eigen::Matrix3d> g) {
  if (g.size() != grid.size()) throw Error(ErrorKind::ShapeMismatch, "metric size does not match grid");
  MetricField m(grid);
  m.g_ = std::move(g);
  m.g_inv_.resize(grid.size());
  m.sqrt_det_.resize(grid.size());
  m.weight_.resize(grid.size());
  const double dv = grid.cell_volume();
  for (std::size_t n = 0; n < grid.size(); ++n) {
    Eigen::LLT<Eigen::Matrix3d> llt(m.g_[n]);
    const double det = m.g_[n].determinant();
    if (llt.info() != Eigen::Success || !(det > 0.0) || !m.g_[n].allFinite())
      throw Error(ErrorKind::InvalidMetric, "cell metric is not positive definite at cell " +
                                                std::to_string(n));
    Eigen::Matrix3d inv = llt.solve(Eigen::Matrix3d::Identity());
    m.g_inv_[n] = 0.5 * (inv + inv.transpose());
    m.sqrt_det_[n] = std::sqrt(det);
    m.weight_[n] = m.sqrt_det_[n] * dv;
  }
  return m;
}

MetricField MetricField::scaled(double lambda) const {
  if (!(lambda > 0.0)) throw Error(ErrorKind::Domain, "metric scale factor must be positive");
  std::vector<Eigen::Matrix3d> g(g_.size());
  for (std::size_t n = 0; n < g_.size(); ++n) g[n] = lambda * g_[n];
  return from_cells(grid_, std::move(g));
}

MetricField MetricField::conformal(const ScalarField& u) const {
  require_same_grid(grid_, u.grid());
  constexpr double dim = 3.0;
  const double exponent = 4.0 / (dim - 2.0);
  std::vector<Eigen::Matrix3d> g(g_.size());
  for (std::size_t n = 0; n < g_.size(); ++n) {
    if (!(u[n] > 0.0)) throw Error(ErrorKind::Domain, "conformal factor must be positive");
    g[n] = std::pow(u[n], exponent) * g_[n];
  }
  return from_cells(grid_, std::move(g));
}

MetricField chart_metric(const HopfGrid& grid, const FrameMetric& frame_metric) {
  std::vector<Eigen::Matrix3d> g(grid.size());
  for (int i = 0; i < grid.n_eta(); ++i)
    for (int j = 0; j < grid.n_xi1(); ++j)
      for (int k = 0; k < grid.n_xi2(); ++k) {
        const auto sample = coordinate_metric(grid.center(i, j, k), frame_metric);
        if (sample.expansion_residual > kChartTol)
          throw Error(ErrorKind::ChartConsistency,
                      "coordinate tangent leaves the frame span (residual " +
                          std::to_string(sample.expansion_residual) + ")");
        g[grid.index(i, j, k)] = sample.g;
      }
  return MetricField::from_cells(grid, std::move(g));
}

MetricField chart_metric(const HopfGrid& grid, const BergerParams& p) {
  return chart_metric(grid, p.metric());
}

double pairwise_sum(std::span<const double> values) {
  return pairwise_sum_impl(values.data(), values.size());
}

double integrate(const ScalarField& field, const MetricField& metric) {
  require_same_grid(field.grid(), metric.grid());
  std::vector<double> terms(field.size());
  for (std::size_t n = 0; n < terms.size(); ++n) terms[n] = field[n] * metric.weight(n);
  return pairwise_sum(terms);
}

std::vector<Eigen::Vector3d> coordinate_gradient(const ScalarField& f) {
  const HopfGrid& grid = f.grid();
  std::vector<Eigen::Vector3d> out(grid.size());
  for (int i = 0; i < grid.n_eta(); ++i)
    for (int j = 0; j < grid.n_xi1(); ++j)
      for (int k = 0; k < grid.n_xi2(); ++k) {
        Eigen::Vector3d d;
        const std::array<int, 3> pos{i, j, k};
        for (int axis = 0; axis < 3; ++axis) {
          auto at = [&](int m) {
            std::array<int, 3> q = pos;
            q[axis] = m;
            return f.at(q[0], q[1], q[2]);
          };
          d(axis) = derivative_1d(at, pos[axis], grid.extent(axis), grid.spacing(axis),
                                  HopfGrid::periodic(axis));
        }
        out[grid.index(i, j, k)] = d;
      }
  return out;
}

std::vector<double> coordinate_gradient_adjoint(const HopfGrid& grid,
                                                std::span<const Eigen::Vector3d> v) {
  if (v.size() != grid.size()) throw Error(ErrorKind::ShapeMismatch, "adjoint input size mismatch");
  std::vector<double> out(grid.size(), 0.0);
  std::array<Tap, 3> taps{};
  for (int i = 0; i < grid.n_eta(); ++i)
    for (int j = 0; j < grid.n_xi1(); ++j)
      for (int k = 0; k < grid.n_xi2(); ++k) {
        const std::size_t n = grid.index(i, j, k);
        const std::array<int, 3> pos{i, j, k};
        for (int axis = 0; axis < 3; ++axis) {
          const int count = stencil_1d(pos[axis], grid.extent(axis), grid.spacing(axis),
                                       HopfGrid::periodic(axis), taps);
          for (int t = 0; t < count; ++t)
            out[grid.shifted(i, j, k, axis, taps[t].offset)] += taps[t].weight * v[n](axis);
        }
      }
  return out;
}

ScalarField grad_sq(const ScalarField& f, const MetricField& metric) {
  require_same_grid(f.grid(), metric.grid());
  const auto d = coordinate_gradient(f);
  std::vector<double> out(f.size());
  for (std::size_t n = 0; n < out.size(); ++n) {
    // Clamp round-off below zero; g^{-1} is positive definite.
    out[n] = std::max(0.0, d[n].dot(metric.g_inv(n) * d[n]));
  }
  return ScalarField(f.grid(), std::move(out));
}

namespace face {

std::vector<double> values(const ScalarField& f, int side) {
  const HopfGrid& grid = f.grid();
  const int j0 = layer_index(grid, side, 0);
  const int j1 = layer_index(grid, side, 1);
  const int j2 = layer_index(grid, side, 2);
  std::vector<double> out(static_cast<std::size_t>(grid.n_eta()) * grid.n_xi2());
  for (int i = 0; i < grid.n_eta(); ++i)
    for (int k = 0; k < grid.n_xi2(); ++k)
      out[static_cast<std::size_t>(i) * grid.n_xi2() + k] =
          extrapolate(f.at(i, j0, k), f.at(i, j1, k), f.at(i, j2, k));
  return out;
}

std::vector<double> normal_derivatives(const ScalarField& f, int side) {
  const HopfGrid& grid = f.grid();
  const int j0 = layer_index(grid, side, 0);
  const int j1 = layer_index(grid, side, 1);
  const int j2 = layer_index(grid, side, 2);
  std::vector<double> out(static_cast<std::size_t>(grid.n_eta()) * grid.n_xi2());
  for (int i = 0; i < grid.n_eta(); ++i)
    for (int k = 0; k < grid.n_xi2(); ++k)
      out[static_cast<std::size_t>(i) * grid.n_xi2() + k] = normal_derivative(
          f.at(i, j0, k), f.at(i, j1, k), f.at(i, j2, k), grid.spacing(1), side);
  return out;
}

std::vector<Eigen::Vector3d> gradient(const ScalarField& f, int side) {
  const HopfGrid& grid = f.grid();
  const int n2 = grid.n_xi2();
  const auto vals = values(f, side);
  const auto normal = normal_derivatives(f, side);
  std::vector<Eigen::Vector3d> out(vals.size());
  for (int i = 0; i < grid.n_eta(); ++i)
    for (int k = 0; k < n2; ++k) {
      auto along_eta = [&](int m) { return vals[static_cast<std::size_t>(m) * n2 + k]; };
      auto along_xi2 = [&](int m) { return vals[static_cast<std::size_t>(i) * n2 + m]; };
      const std::size_t n = static_cast<std::size_t>(i) * n2 + k;
      out[n] = {derivative_1d(along_eta, i, grid.n_eta(), grid.spacing(0), false), normal[n],
                derivative_1d(along_xi2, k, n2, grid.spacing(2), true)};
    }
  return out;
}

}  // namespace face

bool near_chart_axis(const HopfGrid& grid, int i) {
  const double eta = grid.eta(i);
  const double band = 2.0 * grid.spacing(0);
  return eta < band || eta > std::numbers::pi / 2.0 - band;
}

namespace {

constexpr int kFaceTaps = 6;

struct FaceWeights {
  std::array<double, kFaceTaps> value{};
  std::array<double, kFaceTaps> derivative{};
};

// Lagrange weights at x = 0 for nodes x_l = l + 1/2.
constexpr FaceWeights face_weights() {
  FaceWeights w;
  for (int a = 0; a < kFaceTaps; ++a) {
    const double xa = a + 0.5;
    double denom = 1.0;
    for (int b = 0; b < kFaceTaps; ++b)
      if (b != a) denom *= xa - (b + 0.5);
    double value = 1.0;
    for (int b = 0; b < kFaceTaps; ++b)
      if (b != a) value *= -(b + 0.5);
    double deriv = 0.0;
    for (int c = 0; c < kFaceTaps; ++c) {
      if (c == a) continue;
      double term = 1.0;
      for (int b = 0; b < kFaceTaps; ++b)
        if (b != a && b != c) term *= -(b + 0.5);
      deriv += term;
    }
    w.value[a] = value / denom;
    w.derivative[a] = deriv / denom;
  }
  return w;
}

constexpr FaceWeights kFaceWeights = face_weights();

}  // namespace

BoundaryFormReport boundary_second_form(const MetricField& metric) {
  const HopfGrid& grid = metric.grid();
  const int n0 = grid.n_eta();
  const int n2 = grid.n_xi2();
  const double h0 = grid.spacing(0);
  const double h1 = grid.spacing(1);
  const double h2 = grid.spacing(2);

  if (grid.n_xi1() < kFaceTaps)
    throw Error(ErrorKind::InvalidParams,
                "boundary_second_form needs at least " + std::to_string(kFaceTaps) + " cells across xi1");

  BoundaryFormReport report;
  report.min_second_form_norm = std::numeric_limits<double>::infinity();

  for (int side = 0; side < 2; ++side) {
    const double eps = face::inward_sign(side);

    // The metric is smooth up to the face, so the geometry uses wide one-sided
    // stencils and fourth-order central differences along the face.
    std::vector<Eigen::Matrix3d> g_face(static_cast<std::size_t>(n0) * n2);
    std::vector<Eigen::Matrix3d> dg_normal(g_face.size());
    for (int i = 0; i < n0; ++i)
      for (int k = 0; k < n2; ++k) {
        const std::size_t n = static_cast<std::size_t>(i) * n2 + k;
        g_face[n].setZero();
        dg_normal[n].setZero();
        for (int l = 0; l < kFaceTaps; ++l) {
          const Eigen::Matrix3d& v = metric.g(grid.index(i, face::layer_index(grid, side, l), k));
          g_face[n] += kFaceWeights.value[l] * v;
          dg_normal[n] += (eps * kFaceWeights.derivative[l] / h1) * v;
        }
      }

    auto central4 = [](const Eigen::Matrix3d& m2, const Eigen::Matrix3d& m1, const Eigen::Matrix3d& p1,
                       const Eigen::Matrix3d& p2, double h) -> Eigen::Matrix3d {
      return (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h);
    };

    for (int i = 0; i < n0; ++i) {
      if (near_chart_axis(grid, i)) {
        report.excluded_faces += n2;
        continue;
      }
      for (int k = 0; k < n2; ++k) {
        const std::size_t n = static_cast<std::size_t>(i) * n2 + k;
        const Eigen::Matrix3d& g = g_face[n];
        const Eigen::Matrix3d ginv = g.inverse();
        auto at = [&](int ii, int kk) -> const Eigen::Matrix3d& {
          return g_face[static_cast<std::size_t>(ii) * n2 + ((kk % n2) + n2) % n2];
        };
        std::array<Eigen::Matrix3d, 3> dg;
        dg[0] = central4(at(i - 2, k), at(i - 1, k), at(i + 1, k), at(i + 2, k), h0);
        dg[1] = dg_normal[n];
        dg[2] = central4(at(i, k - 2), at(i, k - 1), at(i, k + 1), at(i, k + 2), h2);

        // Gamma^{xi1}_{ab} for boundary directions a, b in {eta, xi2}
        const std::array<int, 2> tan{0, 2};
        Eigen::Matrix2d second;
        const double norm_factor = std::sqrt(ginv(1, 1));
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b) {
            const int ia = tan[a];
            const int ib = tan[b];
            double gamma = 0.0;
            for (int m = 0; m < 3; ++m)
              gamma += 0.5 * ginv(1, m) * (dg[ia](m, ib) + dg[ib](m, ia) - dg[m](ia, ib));
            second(a, b) = -eps * gamma / norm_factor;
          }
        second = (0.5 * (second + second.transpose())).eval();
        Eigen::Matrix2d induced;
        induced << g(0, 0), g(0, 2), g(2, 0), g(2, 2);
        const Eigen::Matrix2d induced_inv = induced.inverse();
        const Eigen::Matrix2d shape = induced_inv * second;

        BoundaryFaceSample sample;
        sample.side = side;
        sample.i = i;
        sample.k = k;
        sample.eta = grid.eta(i);
        sample.xi2 = grid.xi2(k);
        sample.mean_curvature = shape.trace();
        sample.second_form_norm = std::sqrt(std::max(0.0, (shape * shape).trace()));

        const HopfPoint p{sample.eta, side == 0 ? 0.0 : std::numbers::pi, sample.xi2};
        const auto tangents = coordinate_tangents(p);
        const Eigen::Vector3d nu = eps * ginv.col(1) / norm_factor;
        sample.normal = nu(0) * tangents[0] + nu(1) * tangents[1] + nu(2) * tangents[2];
        const Eigen::Vector4d v1 = frame_fields(embed(p))[0];
        const double cosang =
            std::min(1.0, std::abs(sample.normal.dot(v1)) / (sample.normal.norm() * v1.norm()));
        sample.angle_to_v1 = std::acos(cosang);

        report.max_abs_mean_curvature =
            std::max(report.max_abs_mean_curvature, std::abs(sample.mean_curvature));
        report.max_second_form_norm = std::max(report.max_second_form_norm, sample.second_form_norm);
        report.min_second_form_norm = std::min(report.min_second_form_norm, sample.second_form_norm);
        report.faces.push_back(sample);
      }
    }
  }
  if (report.faces.empty()) report.min_second_form_norm = 0.0;
  return report;
}

}  // namespace relyamabe
