#pragma once

// Numerical minimization of the Yamabe quotient over grid functions.

#include <cstdint>
#include <random>
#include <vector>

#include "relyamabe/conformal_energy.hpp"
#include "relyamabe/errors.hpp"

namespace relyamabe {

struct EstimatorOptions {
  int max_iters = 300;
  /// Initial step in units of the preconditioned gradient.
  double step = 0.5;
  /// Relative quotient change below which an accepted step counts as stalled.
  double tol = 1e-10;
  /// Restart 0 starts from the constant; the rest from seeded smooth trials.
  int restarts = 3;
  std::uint64_t seed = 0;

  /// Throws InvalidParams when max_iters < 1, tol <= 0, step <= 0 or restarts < 1.
  void validate() const;
};

struct QuotientEstimate {
  double value = 0.0;
  ScalarField minimizer;
  int iterations_used = 0;
  bool converged = false;
  double neumann_residual_of_minimizer = 0.0;
  /// Quotient after every accepted step of the winning restart, starting
  /// with the initial value. Non-increasing.
  std::vector<double> trace;
  int best_restart = 0;
  /// Final quotient of every restart, in restart order.
  std::vector<double> restart_values;
};

/// Raised when the quotient becomes non-finite; carries the trace so far.
class EstimatorFailure : public Error {
 public:
  EstimatorFailure(const std::string& what, std::vector<double> trace)
      : Error(ErrorKind::NumericalFailure, what), trace_(std::move(trace)) {}
  const std::vector<double>& trace() const { return trace_; }

 private:
  std::vector<double> trace_;
};

/// Minimizes the quotient under the constraint int |f|^6 dv = 1: preconditioned
/// gradient steps, re-projection onto the constraint, backtracking so that no
/// accepted step increases the quotient. Returns the best restart (ties go to
/// the lower restart index).
QuotientEstimate estimate(const MetricField& metric, const ScalarField& scalar_curvature,
                          const EstimatorOptions& opts);

/// Families of smooth low-frequency trial functions on S^3 restricted to the
/// hemisphere. Each is built from polynomials of degree <= 2 in the ambient
/// coordinates x = (Re z, Im z, Re w, Im w) and a few Gaussian bumps.
enum class TrialFamily {
  /// b + psi(x); may change sign.
  Generic,
  /// exp(psi(x)) with psi even in Im z: the round-metric Neumann condition
  /// holds on {Im z = 0}.
  ReflectionEven,
  /// exp((Im z)^2 phi(x)): du vanishes on {Im z = 0}, so the Neumann
  /// condition holds for every metric.
  BoundaryFlat,
};

class SmoothTrial {
 public:
  static SmoothTrial random(TrialFamily family, std::mt19937_64& rng, double amplitude = 0.3);

  double operator()(const Eigen::Vector4d& x) const;
  ScalarField sample(const HopfGrid& grid) const;

 private:
  double psi(const Eigen::Vector4d& x) const;

  TrialFamily family_ = TrialFamily::Generic;
  double offset_ = 1.0;
  Eigen::Vector4d linear_ = Eigen::Vector4d::Zero();
  Eigen::Matrix4d quadratic_ = Eigen::Matrix4d::Zero();
  std::vector<Eigen::Vector4d> bump_centers_;
  std::vector<double> bump_amplitudes_;
  std::vector<double> bump_widths_;
};

struct ProbeReport {
  double min_over_trials = 0.0;
  double energy = 0.0;
  /// (min_over_trials - energy) / |energy|
  double gap_to_energy = 0.0;
  int argmin = 0;
  std::vector<double> values;
};

/// Evaluates the quotient on `n_trials` seeded Generic trial functions (plus
/// the constant when `include_constant`) and compares the minimum to E(g).
ProbeReport yamabe_property_probe(const MetricField& metric, const ScalarField& scalar_curvature,
                                  int n_trials, std::uint64_t seed, bool include_constant = false);

/// Weighted standard deviation divided by the weighted mean of |f|.
double normalized_std(const ScalarField& f, const MetricField& metric);

}  // namespace relyamabe
