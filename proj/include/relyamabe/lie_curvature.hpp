#pragma once

// Curvature of left-invariant metrics on three-dimensional Lie groups,
// computed from structure constants with the Koszul formula.
//
// Conventions:
//   [X_i, X_j] = c^k_ij X_k                     (c(k, i, j))
//   nabla_{X_i} X_j = Gamma^k_ij X_k            (gamma(k, i, j))
//   R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z
//   R(X_i, X_j) X_k = R^l_kij X_l               (riemann(l, k, i, j))
//   Ric(Y, Z) = trace(X -> R(X,Y)Z)
// With these the round S^3 (su(2) with the bi-invariant metric) has scalar +6.

#include <array>
#include <string>

#include <Eigen/Dense>

namespace relyamabe {

inline constexpr int kFrameDim = 3;

/// Rank-3 array indexed (k, i, j).
class Tensor3 {
 public:
  double& operator()(int k, int i, int j) { return data_[index(k, i, j)]; }
  double operator()(int k, int i, int j) const { return data_[index(k, i, j)]; }

 private:
  static constexpr int index(int k, int i, int j) { return (k * 3 + i) * 3 + j; }
  std::array<double, 27> data_{};
};

/// Rank-4 array indexed (l, k, i, j).
class Tensor4 {
 public:
  double& operator()(int l, int k, int i, int j) { return data_[index(l, k, i, j)]; }
  double operator()(int l, int k, int i, int j) const { return data_[index(l, k, i, j)]; }

 private:
  static constexpr int index(int l, int k, int i, int j) { return ((l * 3 + k) * 3 + i) * 3 + j; }
  std::array<double, 81> data_{};
};

/// Basis of a 3-dimensional Lie algebra given by its structure constants.
class LieAlgebraFrame {
 public:
  /// Validates antisymmetry exactly and the Jacobi identity to `jacobi_tol`.
  static LieAlgebraFrame from_constants(const Tensor3& c,
                                        std::array<std::string, 3> labels = {"X1", "X2", "X3"},
                                        double jacobi_tol = 1e-12);

  /// c^k_ij
  double c(int k, int i, int j) const { return c_(k, i, j); }
  const Tensor3& constants() const { return c_; }
  const std::array<std::string, 3>& labels() const { return labels_; }

  /// Relabels the basis: new X_a is old X_{perm[a]}.
  LieAlgebraFrame permuted(const std::array<int, 3>& perm) const;

 private:
  LieAlgebraFrame(const Tensor3& c, std::array<std::string, 3> labels)
      : c_(c), labels_(std::move(labels)) {}

  Tensor3 c_;
  std::array<std::string, 3> labels_;
};

/// max |c^k_ij + c^k_ji|
double antisymmetry_residual(const Tensor3& c);
/// max over (i,j,k,l) of the cyclic Jacobi sum.
double jacobi_residual(const Tensor3& c);

/// Gram matrix g(X_i, X_j) of a left-invariant metric in a frame.
class FrameMetric {
 public:
  /// Throws InvalidMetric unless `g` is exactly symmetric and positive definite.
  static FrameMetric make(const Eigen::Matrix3d& g);
  static FrameMetric identity() { return make(Eigen::Matrix3d::Identity()); }

  const Eigen::Matrix3d& matrix() const { return g_; }
  const Eigen::Matrix3d& inverse() const { return g_inv_; }
  /// Lower-triangular L with L L^T = G; L^{-1} maps frame components to a
  /// G-orthonormal frame.
  const Eigen::Matrix3d& cholesky_factor() const { return chol_; }
  double determinant() const { return g_.determinant(); }

  FrameMetric scaled(double lambda) const { return make(lambda * g_); }

 private:
  FrameMetric() = default;
  Eigen::Matrix3d g_;
  Eigen::Matrix3d g_inv_;
  Eigen::Matrix3d chol_;
};

/// Berger parameters (s, t) with 1 <= s <= t.
class BergerParams {
 public:
  /// Throws InvalidParams when 1 <= s <= t fails or a value is not finite.
  static BergerParams make(double s, double t);

  double s() const { return s_; }
  double t() const { return t_; }
  /// G = diag(1, s, t)
  FrameMetric metric() const;

 private:
  BergerParams(double s, double t) : s_(s), t_(t) {}
  double s_;
  double t_;
};

struct CurvatureReport {
  Tensor3 gamma_coeffs;
  Tensor4 riemann;
  Eigen::Matrix3d ricci;
  /// L^{-1} Ric L^{-T}: Ricci in the G-orthonormal frame obtained from the
  /// Cholesky factor. For diagonal G its diagonal is Ric(X_i/|X_i|, X_i/|X_i|).
  Eigen::Matrix3d ricci_orthonormal;
  /// Ascending eigenvalues of ricci_orthonormal.
  Eigen::Vector3d ricci_eigenvalues;
  double scalar = 0.0;
  double einstein_deviation = 0.0;
};

struct RiemannSymmetryResiduals {
  double antisym_ij = 0.0;   // R(X,Y) = -R(Y,X)
  double antisym_kl = 0.0;   // <R(X,Y)Z,W> = -<R(X,Y)W,Z>
  double pair = 0.0;         // <R(X,Y)Z,W> = <R(Z,W)X,Y>
  double bianchi = 0.0;      // cyclic sum over (X,Y,Z)
  double max() const;
};

/// Builds the frame X1, X2, X3 of su(2) from its 2x2 complex matrices by
/// taking commutators and expanding them back in the basis.
LieAlgebraFrame su2_structure_constants();

/// The three 2x2 complex matrices spanning su(2) used for the Berger family.
std::array<Eigen::Matrix2cd, 3> su2_basis_matrices();

/// Levi-Civita connection of a left-invariant metric (Koszul formula).
Tensor3 levi_civita(const LieAlgebraFrame& frame, const FrameMetric& g);

/// max |Gamma^k_ij - Gamma^k_ji - c^k_ij|
double torsion_residual(const LieAlgebraFrame& frame, const Tensor3& gamma);
/// max |<nabla_i X_j, X_k> + <X_j, nabla_i X_k>|
double metric_compatibility_residual(const FrameMetric& g, const Tensor3& gamma);

CurvatureReport curvature_report(const LieAlgebraFrame& frame, const FrameMetric& g);

RiemannSymmetryResiduals riemann_symmetry_residuals(const CurvatureReport& report,
                                                    const FrameMetric& g);

/// Frobenius norm of the traceless part of the Ricci endomorphism,
/// measured in a G-orthonormal frame.
double einstein_deviation(const Eigen::Matrix3d& ricci, double scalar, const FrameMetric& g);

/// (2/(st)) {2(s + t + st) - (1 + s^2 + t^2)}
double berger_scalar_closed(const BergerParams& p);

/// Ricci eigenvalues of g_{s,t} in the frame {X1, X2/sqrt(s), X3/sqrt(t)}.
std::array<double, 3> berger_ricci_closed(const BergerParams& p);

/// Einstein deviation of g_{s,t} from the Koszul engine.
double einstein_locus_check(const BergerParams& p);

}  // namespace relyamabe
