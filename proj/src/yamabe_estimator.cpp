#include "relyamabe/yamabe_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <optional>

namespace relyamabe {

namespace {

constexpr int kStallSteps = 5;
constexpr int kMaxHalvings = 40;
constexpr double kMaxStep = 64.0;

struct Restart {
  std::vector<double> trace;
  std::optional<ScalarField> f;
  int iterations = 0;
  bool converged = false;
};

double critical_integral(const ScalarField& f, const MetricField& metric) {
  const double p = kChartExponents.critical_exponent();
  std::vector<double> v(f.size());
  for (std::size_t n = 0; n < f.size(); ++n) v[n] = std::pow(std::abs(f[n]), p);
  return integrate(ScalarField(f.grid(), std::move(v)), metric);
}

ScalarField normalized(const ScalarField& f, const MetricField& metric) {
  const double scale = std::pow(critical_integral(f, metric), -1.0 / kChartExponents.critical_exponent());
  std::vector<double> v(f.values().begin(), f.values().end());
  for (double& x : v) x *= scale;
  return ScalarField(f.grid(), std::move(v));
}

// Diagonal of the Hessian of the numerator, used as a Jacobi preconditioner.
// Cross terms g^{ab}, a != b, are dropped.
std::vector<double> jacobi_diagonal(const MetricField& metric, const ScalarField& scalar_curvature) {
  const HopfGrid& grid = metric.grid();
  const double a = kChartExponents.gradient_coefficient();
  std::vector<double> diag(grid.size(), 0.0);
  for (int i = 0; i < grid.n_eta(); ++i)
    for (int j = 0; j < grid.n_xi1(); ++j)
      for (int k = 0; k < grid.n_xi2(); ++k) {
        const std::size_t c = grid.index(i, j, k);
        for (int axis = 0; axis < 3; ++axis) {
          const double h = grid.spacing(axis);
          const double coef = 2.0 * a * metric.weight(c) * metric.g_inv(c)(axis, axis) / (h * h);
          diag[c] += coef;
          for (int dir : {-1, 1}) {
            const std::array<int, 3> pos{i, j, k};
            const int m = pos[axis] + dir;
            if (HopfGrid::periodic(axis) || (m >= 0 && m < grid.extent(axis)))
              diag[grid.shifted(i, j, k, axis, dir)] += 0.5 * coef;
          }
        }
      }
  for (std::size_t c = 0; c < diag.size(); ++c)
    diag[c] += 2.0 * metric.weight(c) * std::abs(scalar_curvature[c]);
  double floor = 0.0;
  for (double d : diag) floor = std::max(floor, d);
  floor *= 1e-12;
  for (double& d : diag) d = std::max(d, floor);
  return diag;
}

// Euclidean gradient of the quotient with respect to the cell values of f,
// exact for the discrete quadrature and stencils.
std::vector<double> quotient_gradient(const ScalarField& f, const MetricField& metric,
                                      const ScalarField& scalar_curvature, const QuotientParts& parts) {
  const HopfGrid& grid = f.grid();
  const double a = kChartExponents.gradient_coefficient();
  const double p = kChartExponents.critical_exponent();
  const double e = kChartExponents.volume_exponent();

  std::vector<double> grad = dirichlet_gradient(f, metric);

  const double numerator = a * parts.gradient_integral + parts.potential_integral;
  const double denom = std::pow(parts.critical_integral, e);
  const double dnum_scale = 1.0 / denom;
  // d/df of (int |f|^p)^e = e (int |f|^p)^{e-1} p |f|^{p-2} f w
  const double dden_scale = numerator * e * std::pow(parts.critical_integral, e - 1.0) / (denom * denom);
  for (std::size_t n = 0; n < grid.size(); ++n) {
    const double w = metric.weight(n);
    const double dnum = a * grad[n] + 2.0 * w * scalar_curvature[n] * f[n];
    const double dden = p * std::pow(std::abs(f[n]), p - 2.0) * f[n] * w;
    grad[n] = dnum * dnum_scale - dden_scale * dden;
  }
  return grad;
}

Restart descend(ScalarField f0, const MetricField& metric, const ScalarField& scalar_curvature,
                const std::vector<double>& precond, const EstimatorOptions& opts) {
  Restart r;
  ScalarField f = normalized(f0, metric);
  QuotientParts parts = rayleigh_parts({f, metric, scalar_curvature});
  r.trace.push_back(parts.value);
  if (!std::isfinite(parts.value)) throw EstimatorFailure("non-finite initial quotient", r.trace);

  double step = opts.step;
  int stalled = 0;
  for (int it = 0; it < opts.max_iters; ++it) {
    r.iterations = it + 1;
    const auto grad = quotient_gradient(f, metric, scalar_curvature, parts);
    std::vector<double> dir(grad.size());
    for (std::size_t n = 0; n < grad.size(); ++n) dir[n] = -grad[n] / precond[n];

    bool accepted = false;
    for (int halving = 0; halving < kMaxHalvings; ++halving) {
      std::vector<double> trial(f.values().begin(), f.values().end());
      for (std::size_t n = 0; n < trial.size(); ++n) trial[n] += step * dir[n];
      ScalarField candidate(f.grid(), std::move(trial));
      if (!(candidate.max_abs() > 0.0)) {
        step *= 0.5;
        continue;
      }
      candidate = normalized(candidate, metric);
      const QuotientParts cand_parts = rayleigh_parts({candidate, metric, scalar_curvature});
      if (!std::isfinite(cand_parts.value))
        throw EstimatorFailure("non-finite quotient during descent", r.trace);
      if (cand_parts.value <= parts.value) {
        const double change = (parts.value - cand_parts.value) / std::abs(parts.value);
        f = std::move(candidate);
        parts = cand_parts;
        r.trace.push_back(parts.value);
        stalled = change < opts.tol ? stalled + 1 : 0;
        step = std::min(step * 1.25, kMaxStep);
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    if (stalled >= kStallSteps) {
      r.converged = true;
      break;
    }
  }
  r.f = std::move(f);
  return r;
}

}  // namespace

void EstimatorOptions::validate() const {
  if (max_iters < 1) throw Error(ErrorKind::InvalidParams, "max_iters must be >= 1");
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidParams, "tol must be > 0");
  if (!(step > 0.0)) throw Error(ErrorKind::InvalidParams, "step must be > 0");
  if (restarts < 1) throw Error(ErrorKind::InvalidParams, "restarts must be >= 1");
}

SmoothTrial SmoothTrial::random(TrialFamily family, std::mt19937_64& rng, double amplitude) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  SmoothTrial t;
  t.family_ = family;
  t.offset_ = 1.0 + 0.5 * unit(rng);
  for (int a = 0; a < 4; ++a) t.linear_(a) = amplitude * unit(rng);
  for (int a = 0; a < 4; ++a)
    for (int b = a; b < 4; ++b) t.quadratic_(a, b) = t.quadratic_(b, a) = 0.5 * amplitude * unit(rng);

  const int bumps = 1 + static_cast<int>(rng() % 3);
  for (int m = 0; m < bumps; ++m) {
    Eigen::Vector4d c;
    for (int a = 0; a < 4; ++a) c(a) = normal(rng);
    c.normalize();
    t.bump_centers_.push_back(c);
    t.bump_amplitudes_.push_back(amplitude * unit(rng));
    t.bump_widths_.push_back(0.6 + 0.6 * (0.5 * (unit(rng) + 1.0)));
  }

  if (family == TrialFamily::ReflectionEven) {
    // Drop the odd-in-Im z monomials; mirror every bump across Im z = 0.
    t.linear_(1) = 0.0;
    for (int b = 0; b < 4; ++b)
      if (b != 1) t.quadratic_(1, b) = t.quadratic_(b, 1) = 0.0;
    const std::size_t original = t.bump_centers_.size();
    for (std::size_t m = 0; m < original; ++m) {
      Eigen::Vector4d mirrored = t.bump_centers_[m];
      mirrored(1) = -mirrored(1);
      t.bump_centers_.push_back(mirrored);
      t.bump_amplitudes_.push_back(t.bump_amplitudes_[m]);
      t.bump_widths_.push_back(t.bump_widths_[m]);
    }
  }
  return t;
}

double SmoothTrial::psi(const Eigen::Vector4d& x) const {
  double v = linear_.dot(x) + x.dot(quadratic_ * x);
  for (std::size_t m = 0; m < bump_centers_.size(); ++m) {
    const double r2 = (x - bump_centers_[m]).squaredNorm();
    v += bump_amplitudes_[m] * std::exp(-r2 / (bump_widths_[m] * bump_widths_[m]));
  }
  return v;
}

double SmoothTrial::operator()(const Eigen::Vector4d& x) const {
  switch (family_) {
    case TrialFamily::Generic:
      return offset_ + psi(x);
    case TrialFamily::ReflectionEven:
      return std::exp(psi(x));
    case TrialFamily::BoundaryFlat:
      return std::exp(4.0 * x(1) * x(1) * psi(x));
  }
  return 0.0;
}

ScalarField SmoothTrial::sample(const HopfGrid& grid) const {
  return ScalarField::from_embedding(grid, [this](const Eigen::Vector4d& x) { return (*this)(x); });
}

QuotientEstimate estimate(const MetricField& metric, const ScalarField& scalar_curvature,
                          const EstimatorOptions& opts) {
  opts.validate();
  if (!(metric.grid() == scalar_curvature.grid()))
    throw Error(ErrorKind::ShapeMismatch, "fields live on different grids");
  const HopfGrid& grid = metric.grid();
  const std::vector<double> precond = jacobi_diagonal(metric, scalar_curvature);

  std::vector<ScalarField> starts;
  starts.push_back(ScalarField::constant(grid, 1.0));
  for (int r = 1; r < opts.restarts; ++r) {
    std::mt19937_64 rng(opts.seed * 1000003ULL + static_cast<std::uint64_t>(r));
    starts.push_back(SmoothTrial::random(TrialFamily::Generic, rng).sample(grid));
  }

  std::vector<std::future<Restart>> jobs;
  for (auto& start : starts)
    jobs.push_back(std::async(std::launch::async, [&, s = start]() {
      return descend(s, metric, scalar_curvature, precond, opts);
    }));
  std::vector<Restart> results;
  for (auto& job : jobs) results.push_back(job.get());

  int best = 0;
  for (int r = 1; r < static_cast<int>(results.size()); ++r)
    if (results[r].trace.back() < results[best].trace.back()) best = r;

  Restart& win = results[best];
  ScalarField minimizer = std::move(*win.f);
  const double value = rayleigh_quotient({minimizer, metric, scalar_curvature});
  const double residual = neumann_residual(minimizer, metric);
  std::vector<double> finals;
  for (const Restart& r : results) finals.push_back(r.trace.back());
  return QuotientEstimate{value,    std::move(minimizer), win.iterations, win.converged,
                          residual, std::move(win.trace), best,           std::move(finals)};
}

ProbeReport yamabe_property_probe(const MetricField& metric, const ScalarField& scalar_curvature,
                                  int n_trials, std::uint64_t seed, bool include_constant) {
  if (n_trials < 0) throw Error(ErrorKind::InvalidParams, "n_trials must be >= 0");
  ProbeReport rep;
  rep.energy = einstein_hilbert(metric, scalar_curvature).energy;
  std::mt19937_64 rng(seed);
  const HopfGrid& grid = metric.grid();
  if (include_constant) {
    const ScalarField one = ScalarField::constant(grid, 1.0);
    rep.values.push_back(rayleigh_quotient({one, metric, scalar_curvature}));
  }
  for (int t = 0; t < n_trials; ++t) {
    const ScalarField f = SmoothTrial::random(TrialFamily::Generic, rng).sample(grid);
    rep.values.push_back(rayleigh_quotient({f, metric, scalar_curvature}));
  }
  if (rep.values.empty()) throw Error(ErrorKind::InvalidParams, "probe needs at least one trial");
  const auto it = std::min_element(rep.values.begin(), rep.values.end());
  rep.argmin = static_cast<int>(it - rep.values.begin());
  rep.min_over_trials = *it;
  rep.gap_to_energy = (rep.min_over_trials - rep.energy) / std::abs(rep.energy);
  return rep;
}

double normalized_std(const ScalarField& f, const MetricField& metric) {
  const double vol = integrate(ScalarField::constant(f.grid(), 1.0), metric);
  std::vector<double> absf(f.size());
  std::vector<double> sq(f.size());
  for (std::size_t n = 0; n < f.size(); ++n) {
    absf[n] = std::abs(f[n]);
    sq[n] = f[n] * f[n];
  }
  const double mean = integrate(ScalarField(f.grid(), std::move(absf)), metric) / vol;
  const double mean_sq = integrate(ScalarField(f.grid(), std::move(sq)), metric) / vol;
  return std::sqrt(std::max(0.0, mean_sq - mean * mean)) / mean;
}

}  // namespace relyamabe
