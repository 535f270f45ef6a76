#pragma once

// Discretization of the hemisphere SU(2)_+ = {Im z >= 0} in Hopf coordinates
//
//   z = cos(eta) e^{i xi1},  w = sin(eta) e^{i xi2},
//   eta in (0, pi/2), xi1 in [0, pi], xi2 in [0, 2 pi) periodic,
//
// on a cell-centered grid. The boundary {Im z = 0} is the pair of faces
// xi1 = 0 and xi1 = pi. The chart degenerates on the axes eta = 0 and
// eta = pi/2; no cell center lies there.

#include <array>
#include <complex>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "relyamabe/lie_curvature.hpp"

namespace relyamabe {

struct HopfPoint {
  double eta = 0.0;
  double xi1 = 0.0;
  double xi2 = 0.0;
};

struct S3Point {
  std::complex<double> z;
  std::complex<double> w;
};

/// Real 4-vector (Re z, Im z, Re w, Im w).
Eigen::Vector4d to_real4(std::complex<double> z, std::complex<double> w);

S3Point embed(const HopfPoint& p);

/// d/d eta, d/d xi1, d/d xi2 of the chart embedding, as vectors in R^4.
std::array<Eigen::Vector4d, 3> coordinate_tangents(const HopfPoint& p);

/// Left-invariant fields V_i(A) = A X_i at A = [[z, -conj w], [w, conj z]],
/// read off the first column: V1 = (iz, iw), V2 = (conj w, -conj z),
/// V3 = (-i conj w, i conj z). Throws Domain when |z|^2 + |w|^2 deviates from
/// 1 by more than 1e-12.
std::array<Eigen::Vector4d, 3> frame_fields(const S3Point& p);

struct CoordinateMetricSample {
  Eigen::Matrix3d g;
  /// max over coordinate tangents of |component outside span{V1, V2, V3}|
  double expansion_residual = 0.0;
};

/// Coordinate components of the left-invariant metric with frame Gram matrix
/// `frame_metric`, obtained by expanding the coordinate tangents in {V_i}.
CoordinateMetricSample coordinate_metric(const HopfPoint& p, const FrameMetric& frame_metric);

class HopfGrid {
 public:
  /// Every resolution component must be at least 4.
  static HopfGrid make(int n_eta, int n_xi1, int n_xi2);
  static HopfGrid cubic(int n) { return make(n, n, n); }

  int n_eta() const { return n_[0]; }
  int n_xi1() const { return n_[1]; }
  int n_xi2() const { return n_[2]; }
  int extent(int axis) const { return n_[axis]; }
  std::size_t size() const {
    return static_cast<std::size_t>(n_[0]) * static_cast<std::size_t>(n_[1]) * static_cast<std::size_t>(n_[2]);
  }

  double spacing(int axis) const { return h_[axis]; }
  double cell_volume() const { return h_[0] * h_[1] * h_[2]; }

  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * n_[1] + j) * n_[2] + k;
  }
  /// Neighbor along `axis` at signed offset; xi2 wraps, other axes must stay in range.
  std::size_t shifted(int i, int j, int k, int axis, int offset) const;

  double eta(int i) const { return (i + 0.5) * h_[0]; }
  double xi1(int j) const { return (j + 0.5) * h_[1]; }
  double xi2(int k) const { return (k + 0.5) * h_[2]; }
  HopfPoint center(int i, int j, int k) const { return {eta(i), xi1(j), xi2(k)}; }

  static constexpr bool periodic(int axis) { return axis == 2; }

  friend bool operator==(const HopfGrid& a, const HopfGrid& b) { return a.n_ == b.n_; }

 private:
  HopfGrid() = default;
  std::array<int, 3> n_{};
  std::array<double, 3> h_{};
};

class ScalarField {
 public:
  ScalarField(const HopfGrid& grid, std::vector<double> values);

  static ScalarField constant(const HopfGrid& grid, double value);
  static ScalarField from_coordinates(const HopfGrid& grid,
                                      const std::function<double(const HopfPoint&)>& f);
  /// f evaluated on the R^4 image of each cell center.
  static ScalarField from_embedding(const HopfGrid& grid,
                                    const std::function<double(const Eigen::Vector4d&)>& f);

  const HopfGrid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t n) const { return values_[n]; }
  double& operator[](std::size_t n) { return values_[n]; }
  double at(int i, int j, int k) const { return values_[grid_.index(i, j, k)]; }
  std::span<const double> values() const { return values_; }
  std::vector<double>& mutable_values() { return values_; }

  double max_abs() const;

 private:
  HopfGrid grid_;
  std::vector<double> values_;
};

/// Per-cell coordinate metric with the derived quantities the stencils need.
class MetricField {
 public:
  /// Throws InvalidMetric if any cell matrix is not positive definite.
  static MetricField from_cells(const HopfGrid& grid, std::vector<Eigen::Matrix3d> g);

  const HopfGrid& grid() const { return grid_; }
  const Eigen::Matrix3d& g(std::size_t n) const { return g_[n]; }
  const Eigen::Matrix3d& g_inv(std::size_t n) const { return g_inv_[n]; }
  double sqrt_det(std::size_t n) const { return sqrt_det_[n]; }
  /// sqrt(det g) * d_eta * d_xi1 * d_xi2
  double weight(std::size_t n) const { return weight_[n]; }
  std::span<const double> weights() const { return weight_; }

  /// lambda * g at every cell.
  MetricField scaled(double lambda) const;
  /// u^{4/(n-2)} g with n = 3.
  MetricField conformal(const ScalarField& u) const;

 private:
  MetricField(const HopfGrid& grid) : grid_(grid) {}
  HopfGrid grid_;
  std::vector<Eigen::Matrix3d> g_;
  std::vector<Eigen::Matrix3d> g_inv_;
  std::vector<double> sqrt_det_;
  std::vector<double> weight_;
};

/// Throws ChartConsistency when a coordinate tangent leaves span{V_i} by
/// more than 1e-10.
MetricField chart_metric(const HopfGrid& grid, const FrameMetric& frame_metric);
MetricField chart_metric(const HopfGrid& grid, const BergerParams& p);

/// Pairwise (cascade) summation in a fixed order.
double pairwise_sum(std::span<const double> values);

/// Midpoint rule: sum of field * weight, pairwise reduced.
double integrate(const ScalarField& field, const MetricField& metric);

/// Coordinate partials (d_eta f, d_xi1 f, d_xi2 f) at every cell. Central
/// differences in the interior, second-order one-sided at the eta and xi1
/// ends, periodic in xi2. Exactly zero for constant fields.
std::vector<Eigen::Vector3d> coordinate_gradient(const ScalarField& f);

/// Transpose of coordinate_gradient as a linear map R^N -> (R^3)^N.
std::vector<double> coordinate_gradient_adjoint(const HopfGrid& grid,
                                                std::span<const Eigen::Vector3d> v);

/// g^{ij} d_i f d_j f per cell.
ScalarField grad_sq(const ScalarField& f, const MetricField& metric);

/// Stencils that evaluate cell data on the boundary faces xi1 = 0 (side 0)
/// and xi1 = pi (side 1) from the three nearest cells.
namespace face {

/// Second-order extrapolation from cells at distances h/2, 3h/2, 5h/2.
template <typename T>
T extrapolate(const T& v0, const T& v1, const T& v2) {
  return (15.0 * v0 - 10.0 * v1 + 3.0 * v2) / 8.0;
}

/// d/d xi1 at the face, second order. v0 is the cell touching the face.
template <typename T>
T normal_derivative(const T& v0, const T& v1, const T& v2, double h, int side) {
  const T d = (2.0 * (v1 - v0) - (v2 - v1)) / h;
  return side == 0 ? d : T(-d);
}

/// xi1 index of the cell at distance (layer + 1/2) h from the face.
inline int layer_index(const HopfGrid& grid, int side, int layer) {
  return side == 0 ? layer : grid.n_xi1() - 1 - layer;
}

/// Inward orientation sign of d/d xi1 on the face.
inline double inward_sign(int side) { return side == 0 ? 1.0 : -1.0; }

/// Extrapolated face values of a scalar field, indexed [i * n_xi2 + k].
std::vector<double> values(const ScalarField& f, int side);

/// d_xi1 f on the face, indexed [i * n_xi2 + k].
std::vector<double> normal_derivatives(const ScalarField& f, int side);

/// (d_eta f, d_xi1 f, d_xi2 f) on the face, indexed [i * n_xi2 + k].
std::vector<Eigen::Vector3d> gradient(const ScalarField& f, int side);

}  // namespace face

/// True when a boundary row at eta index i is within 2 d_eta of a chart axis.
bool near_chart_axis(const HopfGrid& grid, int i);

struct BoundaryFaceSample {
  int side = 0;  // 0: xi1 = 0, 1: xi1 = pi
  int i = 0;
  int k = 0;
  double eta = 0.0;
  double xi2 = 0.0;
  double mean_curvature = 0.0;
  double second_form_norm = 0.0;
  /// Inward g-unit normal as a vector in R^4.
  Eigen::Vector4d normal = Eigen::Vector4d::Zero();
  /// Round-metric angle between the normal line and the V1 line, in [0, pi/2].
  double angle_to_v1 = 0.0;
};

struct BoundaryFormReport {
  std::vector<BoundaryFaceSample> faces;
  int excluded_faces = 0;
  double max_abs_mean_curvature = 0.0;
  double max_second_form_norm = 0.0;
  double min_second_form_norm = 0.0;
};

/// Mean curvature and second fundamental form of the boundary faces, from
/// six-point one-sided differences of the metric field (needs n_xi1 >= 6).
/// Faces within 2 d_eta of the chart axes are excluded and counted.
BoundaryFormReport boundary_second_form(const MetricField& metric);

}  // namespace relyamabe
