#include "relyamabe/lie_curvature.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "relyamabe/errors.hpp"

namespace relyamabe {

namespace {

constexpr double kExpansionTol = 1e-12;

using Complex = std::complex<double>;

// Real coordinates of a 2x2 complex matrix, column-major (re, im) pairs.
Eigen::Matrix<double, 8, 1> realify(const Eigen::Matrix2cd& m) {
  Eigen::Matrix<double, 8, 1> v;
  for (int col = 0; col < 2; ++col) {
    for (int row = 0; row < 2; ++row) {
      const int base = 2 * (col * 2 + row);
      v(base) = m(row, col).real();
      v(base + 1) = m(row, col).imag();
    }
  }
  return v;
}

}  // namespace

double antisymmetry_residual(const Tensor3& c) {
  double r = 0.0;
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r = std::max(r, std::abs(c(k, i, j) + c(k, j, i)));
  return r;
}

double jacobi_residual(const Tensor3& c) {
  double r = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
          double sum = 0.0;
          for (int m = 0; m < 3; ++m) {
            sum += c(m, i, j) * c(l, m, k) + c(m, j, k) * c(l, m, i) + c(m, k, i) * c(l, m, j);
          }
          r = std::max(r, std::abs(sum));
        }
  return r;
}

LieAlgebraFrame LieAlgebraFrame::from_constants(const Tensor3& c, std::array<std::string, 3> labels,
                                                double jacobi_tol) {
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (!std::isfinite(c(k, i, j)))
          throw Error(ErrorKind::InvalidFrame, "structure constants must be finite");
  if (antisymmetry_residual(c) != 0.0)
    throw Error(ErrorKind::InvalidFrame, "structure constants violate antisymmetry c^k_ij = -c^k_ji");
  const double jac = jacobi_residual(c);
  if (!(jac <= jacobi_tol))
    throw Error(ErrorKind::InvalidFrame,
                "structure constants violate the Jacobi identity (residual " + std::to_string(jac) + ")");
  return LieAlgebraFrame(c, std::move(labels));
}

LieAlgebraFrame LieAlgebraFrame::permuted(const std::array<int, 3>& perm) const {
  Tensor3 c;
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) c(k, i, j) = c_(perm[k], perm[i], perm[j]);
  return LieAlgebraFrame(c, {labels_[perm[0]], labels_[perm[1]], labels_[perm[2]]});
}

FrameMetric FrameMetric::make(const Eigen::Matrix3d& g) {
  if (!g.allFinite()) throw Error(ErrorKind::InvalidMetric, "metric entries must be finite");
  if (g != g.transpose()) throw Error(ErrorKind::InvalidMetric, "metric matrix is not symmetric");
  Eigen::LLT<Eigen::Matrix3d> llt(g);
  const double min_eig = Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(g, Eigen::EigenvaluesOnly)
                             .eigenvalues()
                             .minCoeff();
  if (llt.info() != Eigen::Success || !(min_eig > 0.0))
    throw Error(ErrorKind::InvalidMetric, "metric matrix is not positive definite");
  FrameMetric m;
  m.g_ = g;
  m.chol_ = llt.matrixL();
  m.g_inv_ = llt.solve(Eigen::Matrix3d::Identity());
  m.g_inv_ = 0.5 * (m.g_inv_ + m.g_inv_.transpose()).eval();
  return m;
}

BergerParams BergerParams::make(double s, double t) {
  if (!std::isfinite(s) || !std::isfinite(t))
    throw Error(ErrorKind::InvalidParams, "Berger parameters must be finite");
  if (!(1.0 <= s && s <= t))
    throw Error(ErrorKind::InvalidParams, "Berger parameters require 1 <= s <= t (got s=" +
                                              std::to_string(s) + ", t=" + std::to_string(t) + ")");
  return BergerParams(s, t);
}

FrameMetric BergerParams::metric() const {
  return FrameMetric::make(Eigen::Vector3d(1.0, s_, t_).asDiagonal());
}

double RiemannSymmetryResiduals::max() const {
  return std::max({antisym_ij, antisym_kl, pair, bianchi});
}

std::array<Eigen::Matrix2cd, 3> su2_basis_matrices() {
  const Complex i(0.0, 1.0);
  Eigen::Matrix2cd x1, x2, x3;
  x1 << i, 0.0, 0.0, -i;
  x2 << 0.0, 1.0, -1.0, 0.0;
  x3 << 0.0, i, i, 0.0;
  return {x1, x2, x3};
}

LieAlgebraFrame su2_structure_constants() {
  const auto basis = su2_basis_matrices();
  Eigen::Matrix<double, 8, 3> b;
  for (int k = 0; k < 3; ++k) b.col(k) = realify(basis[k]);
  // Normal equations in the real Frobenius inner product. The basis is
  // orthogonal there, so the Gram solve only divides by exact integers.
  const Eigen::Matrix3d gram = b.transpose() * b;
  const auto ldlt = gram.ldlt();

  Tensor3 c;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const Eigen::Matrix2cd bracket = basis[i] * basis[j] - basis[j] * basis[i];
      const Eigen::Matrix<double, 8, 1> rhs = realify(bracket);
      const Eigen::Vector3d coeffs = ldlt.solve(b.transpose() * rhs);
      if ((b * coeffs - rhs).norm() > kExpansionTol)
        throw Error(ErrorKind::InternalConsistency, "su(2) bracket not in span of basis");
      for (int k = 0; k < 3; ++k) c(k, i, j) = coeffs(k);
    }
  }
  return LieAlgebraFrame::from_constants(c, {"X1", "X2", "X3"});
}

Tensor3 levi_civita(const LieAlgebraFrame& frame, const FrameMetric& g) {
  const Eigen::Matrix3d& G = g.matrix();
  const Eigen::Matrix3d& Ginv = g.inverse();

  // Koszul with constant inner products:
  // 2 <nabla_i X_j, X_l> = <[X_i,X_j],X_l> - <[X_j,X_l],X_i> + <[X_l,X_i],X_j>
  Tensor3 lowered;  // (l, i, j)
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int l = 0; l < 3; ++l) {
        double sum = 0.0;
        for (int m = 0; m < 3; ++m)
          sum += frame.c(m, i, j) * G(m, l) - frame.c(m, j, l) * G(m, i) + frame.c(m, l, i) * G(m, j);
        lowered(l, i, j) = 0.5 * sum;
      }

  Tensor3 gamma;
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double sum = 0.0;
        for (int l = 0; l < 3; ++l) sum += Ginv(k, l) * lowered(l, i, j);
        gamma(k, i, j) = sum;
      }
  return gamma;
}

double torsion_residual(const LieAlgebraFrame& frame, const Tensor3& gamma) {
  double r = 0.0;
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        r = std::max(r, std::abs(gamma(k, i, j) - gamma(k, j, i) - frame.c(k, i, j)));
  return r;
}

double metric_compatibility_residual(const FrameMetric& g, const Tensor3& gamma) {
  const Eigen::Matrix3d& G = g.matrix();
  double r = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        double sum = 0.0;
        for (int m = 0; m < 3; ++m) sum += gamma(m, i, j) * G(m, k) + gamma(m, i, k) * G(j, m);
        r = std::max(r, std::abs(sum));
      }
  return r;
}

double einstein_deviation(const Eigen::Matrix3d& ricci, double scalar, const FrameMetric& g) {
  const Eigen::Matrix3d& L = g.cholesky_factor();
  const Eigen::Matrix3d Linv = L.triangularView<Eigen::Lower>().solve(Eigen::Matrix3d::Identity());
  const Eigen::Matrix3d on = Linv * ricci * Linv.transpose();
  return (on - (scalar / 3.0) * Eigen::Matrix3d::Identity()).norm();
}

CurvatureReport curvature_report(const LieAlgebraFrame& frame, const FrameMetric& g) {
  CurvatureReport rep;
  rep.gamma_coeffs = levi_civita(frame, g);
  const Tensor3& gam = rep.gamma_coeffs;

  for (int l = 0; l < 3; ++l)
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          double sum = 0.0;
          for (int m = 0; m < 3; ++m) {
            sum += gam(m, j, k) * gam(l, i, m) - gam(m, i, k) * gam(l, j, m) -
                   frame.c(m, i, j) * gam(l, m, k);
          }
          rep.riemann(l, k, i, j) = sum;
        }

  // Ric_jk = sum_i R^i_{k i j}
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k) {
      double sum = 0.0;
      for (int i = 0; i < 3; ++i) sum += rep.riemann(i, k, i, j);
      rep.ricci(j, k) = sum;
    }
  rep.scalar = (g.inverse().cwiseProduct(rep.ricci)).sum();

  const Eigen::Matrix3d Linv =
      g.cholesky_factor().triangularView<Eigen::Lower>().solve(Eigen::Matrix3d::Identity());
  rep.ricci_orthonormal = Linv * rep.ricci * Linv.transpose();
  rep.ricci_orthonormal = (0.5 * (rep.ricci_orthonormal + rep.ricci_orthonormal.transpose())).eval();
  rep.ricci_eigenvalues =
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(rep.ricci_orthonormal, Eigen::EigenvaluesOnly)
          .eigenvalues();
  rep.einstein_deviation = einstein_deviation(rep.ricci, rep.scalar, g);
  return rep;
}

RiemannSymmetryResiduals riemann_symmetry_residuals(const CurvatureReport& report,
                                                    const FrameMetric& g) {
  const Eigen::Matrix3d& G = g.matrix();
  // Rm(i,j,k,l) = <R(X_i,X_j)X_k, X_l>
  Tensor4 rm;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
          double sum = 0.0;
          for (int m = 0; m < 3; ++m) sum += report.riemann(m, k, i, j) * G(m, l);
          rm(i, j, k, l) = sum;
        }

  RiemannSymmetryResiduals res;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
          res.antisym_ij = std::max(res.antisym_ij, std::abs(rm(i, j, k, l) + rm(j, i, k, l)));
          res.antisym_kl = std::max(res.antisym_kl, std::abs(rm(i, j, k, l) + rm(i, j, l, k)));
          res.pair = std::max(res.pair, std::abs(rm(i, j, k, l) - rm(k, l, i, j)));
          res.bianchi = std::max(
              res.bianchi, std::abs(rm(i, j, k, l) + rm(j, k, i, l) + rm(k, i, j, l)));
        }
  return res;
}

double berger_scalar_closed(const BergerParams& p) {
  const double s = p.s();
  const double t = p.t();
  return (2.0 / (s * t)) * (2.0 * (s + t + s * t) - (1.0 + s * s + t * t));
}

std::array<double, 3> berger_ricci_closed(const BergerParams& p) {
  const double s = p.s();
  const double t = p.t();
  const double k = -1.0 / (s * t);
  return {k * (-2.0 + 2.0 * t * t + 2.0 * s * s - 4.0 * s * t),
          k * (2.0 + 2.0 * t * t - 2.0 * s * s - 4.0 * t),
          k * (2.0 - 2.0 * t * t + 2.0 * s * s - 4.0 * s)};
}

double einstein_locus_check(const BergerParams& p) {
  return curvature_report(su2_structure_constants(), p.metric()).einstein_deviation;
}

}  // namespace relyamabe
