// One line per acceptance criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "relyamabe/conformal_energy.hpp"
#include "relyamabe/criterion.hpp"
#include "relyamabe/lie_curvature.hpp"
#include "relyamabe/su2_chart.hpp"
#include "relyamabe/yamabe_estimator.hpp"

using namespace relyamabe;
using std::numbers::pi;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [violated: " << what << "]";
    }
  }
};

using Check = std::function<void(Outcome&)>;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1.0); }

double scalar_oracle(double s, double t) { return (2.0 / (s * t)) * (2 * (s + t + s * t) - (1 + s * s + t * t)); }

std::array<double, 3> ricci_oracle(double s, double t) {
  const double k = -1.0 / (s * t);
  return {k * (-2 + 2 * t * t + 2 * s * s - 4 * s * t), k * (2 + 2 * t * t - 2 * s * s - 4 * t),
          k * (2 - 2 * t * t + 2 * s * s - 4 * s)};
}

struct Setup {
  HopfGrid grid;
  MetricField metric;
  ScalarField scalar;
};

Setup berger(int n, double s, double t) {
  const HopfGrid grid = HopfGrid::cubic(n);
  const BergerParams p = BergerParams::make(s, t);
  return {grid, chart_metric(grid, p), ScalarField::constant(grid, scalar_oracle(s, t))};
}

void ac1(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const LieAlgebraFrame frame = su2_structure_constants();
  double worst_r = 0.0, worst_ric = 0.0;
  for (int a = 0; a < 10; ++a)
    for (int b = 0; b < 10; ++b) {
      const double s = 1.0 + 3.0 * a / 9.0;
      const double t = 1.0 + 3.0 * b / 9.0;
      const CurvatureReport rep = curvature_report(frame, FrameMetric::make(Eigen::Vector3d(1, s, t).asDiagonal()));
      worst_r = std::max(worst_r, rel_err(rep.scalar, scalar_oracle(s, t)));
      const auto ric = ricci_oracle(s, t);
      for (int k = 0; k < 3; ++k) worst_ric = std::max(worst_ric, rel_err(rep.ricci_orthonormal(k, k), ric[k]));
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          if (i != j) worst_ric = std::max(worst_ric, std::abs(rep.ricci_orthonormal(i, j)));
    }
  const double elapsed = seconds_since(t0);
  o.detail << "scalar err " << worst_r << ", Ricci err " << worst_ric << ", " << elapsed << " s";
  o.require(worst_r <= 1e-10, "scalar within 1e-10");
  o.require(worst_ric <= 1e-10, "Ricci within 1e-10");
  o.require(elapsed < 1.0, "runtime < 1 s");
}

void ac2(Outcome& o) {
  const double round = einstein_locus_check(BergerParams::make(1, 1));
  double smallest = 1e300;
  for (auto [s, t] : {std::pair{1.0, 1.2}, std::pair{1.5, 1.5}, std::pair{1.0, 3.0}})
    smallest = std::min(smallest, einstein_locus_check(BergerParams::make(s, t)));
  o.detail << "dev(1,1) " << round << ", min off-locus dev " << smallest;
  o.require(round <= 1e-10, "dev(1,1) <= 1e-10");
  o.require(smallest >= 1e-2, "off-locus dev >= 1e-2");
}

void ac3(Outcome& o) {
  const auto x = su2_basis_matrices();
  const LieAlgebraFrame frame = su2_structure_constants();
  double worst = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const Eigen::Matrix2cd comm = x[i] * x[j] - x[j] * x[i];
      // Expand the commutator in the basis by least squares over the 8 real entries.
      Eigen::Matrix<double, 8, 3> a;
      Eigen::Matrix<double, 8, 1> rhs;
      for (int k = 0; k < 3; ++k)
        for (int e = 0; e < 4; ++e) {
          a(2 * e, k) = x[k](e / 2, e % 2).real();
          a(2 * e + 1, k) = x[k](e / 2, e % 2).imag();
        }
      for (int e = 0; e < 4; ++e) {
        rhs(2 * e) = comm(e / 2, e % 2).real();
        rhs(2 * e + 1) = comm(e / 2, e % 2).imag();
      }
      const Eigen::Vector3d coeff = a.colPivHouseholderQr().solve(rhs);
      for (int k = 0; k < 3; ++k) {
        worst = std::max(worst, std::abs(coeff(k) - frame.constants()(k, i, j)));
        const bool cyclic = (j == (i + 1) % 3) && (k == (i + 2) % 3);
        const bool anticyclic = (i == (j + 1) % 3) && (k == (j + 2) % 3);
        const double table = cyclic ? 2.0 : anticyclic ? -2.0 : 0.0;
        worst = std::max(worst, std::abs(coeff(k) - table));
      }
    }
  o.detail << "max deviation " << worst;
  o.require(worst <= 1e-12, "bracket table within 1e-12");
}

void ac4(Outcome& o) {
  double worst_star = 0.0, worst_zero = 0.0;
  for (double s : {1.0, 2.25, 4.0}) {
    worst_star = std::max(worst_star, std::abs(boundary_curve(s) - (s + std::sqrt(s) + 1)));
    worst_zero = std::max(worst_zero, std::abs(scalar_sign_boundary(s) - std::pow(1 + std::sqrt(s), 2)));
  }
  o.detail << "t* err " << worst_star << ", R=0 err " << worst_zero;
  o.require(worst_star <= 1e-6, "t* within 1e-6");
  o.require(worst_zero <= 1e-6, "R=0 curve within 1e-6");
}

void ac5(Outcome& o) {
  const FrameMetric round = FrameMetric::identity();
  auto h = [](double t) { return FrameMetric::make(Eigen::Vector3d(1, 1, t).asDiagonal()); };
  // 6I - 2 diag(1,1,3) = diag(4,4,0); 6I - diag(1,1,3.5) = diag(5,5,2.5); 6I - 4 diag(1,1,2) = diag(2,2,-2)
  const CriterionReport b13 = theorem1_check(round, 6.0, h(3.0), scalar_oracle(1, 3));
  const CriterionReport b135 = theorem1_check(round, 6.0, h(3.5), scalar_oracle(1, 3.5));
  const CriterionReport b12 = theorem1_check(round, 6.0, h(2.0), scalar_oracle(1, 2));
  o.detail << "(1,3) " << to_string(b13.verdict) << " " << b13.min_eig << "; (1,3.5) " << to_string(b135.verdict)
           << " " << b135.min_eig << " gamma " << b135.gamma << "; (1,2) " << to_string(b12.verdict) << " "
           << b12.min_eig;
  o.require(b13.verdict == Verdict::AppliesBoundary && std::abs(b13.min_eig) <= 1e-10, "(1,3) boundary");
  o.require(b135.verdict == Verdict::AppliesStrict && std::abs(b135.min_eig - 2.5) <= 1e-10 &&
                std::abs(b135.gamma - std::sqrt(3.5)) <= 1e-12,
            "(1,3.5) strict");
  o.require(b12.verdict == Verdict::Fails && std::abs(b12.min_eig + 2.0) <= 1e-10, "(1,2) fails");
}

void ac6(Outcome& o) {
  const PathReport rep = corollary_path_check(berger_path(1.0), 3.0, 4.0, 100);
  double worst = 1e300;
  bool holds = rep.samples.size() == 101;
  for (const PathSample& s : rep.samples) {
    worst = std::min(worst, s.min_eig);
    holds = holds && s.verdict != Verdict::Fails && s.verdict != Verdict::NotApplicable;
  }
  o.detail << rep.samples.size() << " samples, min eig " << worst << ", delta " << rep.delta << ", R(end) "
           << rep.endpoint_scalar;
  o.require(holds && worst >= -1e-10, "criterion holds at every sample");
  o.require(std::abs(rep.delta - 1.0) <= 1e-12, "delta = 1");
  o.require(std::abs(rep.endpoint_scalar) <= 1e-10, "R(4) = 0");
}

void ac7(Outcome& o) {
  const HopfGrid grid = HopfGrid::cubic(16);
  const MetricField round = chart_metric(grid, BergerParams::make(1, 1));
  double metric_err = 0.0, det_err = 0.0;
  for (int i = 0; i < grid.n_eta(); ++i) {
    const double eta = grid.eta(i);
    const Eigen::Matrix3d expected = Eigen::Vector3d(1, std::pow(std::cos(eta), 2), std::pow(std::sin(eta), 2)).asDiagonal();
    for (int j = 0; j < grid.n_xi1(); ++j)
      for (int k = 0; k < grid.n_xi2(); ++k)
        metric_err = std::max(metric_err, (round.g(grid.index(i, j, k)) - expected).cwiseAbs().maxCoeff());
  }
  const MetricField b = chart_metric(grid, BergerParams::make(2, 3.5));
  for (int i = 0; i < grid.n_eta(); ++i) {
    const double eta = grid.eta(i);
    const double expected = 2 * 3.5 * std::pow(std::cos(eta) * std::sin(eta), 2);
    for (int j = 0; j < grid.n_xi1(); ++j)
      for (int k = 0; k < grid.n_xi2(); ++k)
        det_err = std::max(det_err, std::abs(b.g(grid.index(i, j, k)).determinant() - expected) / expected);
  }
  auto volume = [](int n, double s, double t) {
    const HopfGrid g = HopfGrid::cubic(n);
    return integrate(ScalarField::constant(g, 1.0), chart_metric(g, BergerParams::make(s, t)));
  };
  double worst_vol = 0.0, worst_factor = 1e300;
  for (auto [s, t] : {std::pair{1.0, 1.0}, std::pair{1.0, 3.0}, std::pair{2.0, 4.0}}) {
    const double exact = pi * pi * std::sqrt(s * t);
    const double e16 = std::abs(volume(16, s, t) - exact) / exact;
    const double e32 = std::abs(volume(32, s, t) - exact) / exact;
    worst_vol = std::max(worst_vol, e32);
    worst_factor = std::min(worst_factor, e16 / e32);
  }
  o.detail << "metric err " << metric_err << ", det rel err " << det_err << ", vol rel err " << worst_vol
           << ", refinement factor " << worst_factor;
  o.require(metric_err <= 1e-10, "round metric diag(1, cos^2, sin^2)");
  o.require(det_err <= 1e-8, "det = st cos^2 sin^2");
  o.require(worst_vol <= 0.01, "volume within 1%");
  o.require(worst_factor >= 3.0, "error reduction >= 3");
}

void ac8(Outcome& o) {
  double worst_h = 0.0;
  bool decreasing = true;
  for (auto [s, t] : {std::pair{1.0, 1.0}, std::pair{1.0, 3.0}, std::pair{2.0, 4.0}}) {
    double previous = 1e300;
    for (int n : {16, 32, 64}) {
      const double h = boundary_second_form(chart_metric(HopfGrid::cubic(n), BergerParams::make(s, t))).max_abs_mean_curvature;
      if (n == 32) worst_h = std::max(worst_h, h);
      if (s != 1.0 || t != 1.0) decreasing = decreasing && h < previous;
      previous = h;
    }
  }
  const BoundaryFormReport b13 = boundary_second_form(chart_metric(HopfGrid::cubic(32), BergerParams::make(1, 3)));
  o.detail << "max |H| at N=32 " << worst_h << ", (1,3) |II| in [" << b13.min_second_form_norm << ", "
           << b13.max_second_form_norm << "]";
  o.require(worst_h <= 1e-2, "|H| <= 1e-2");
  o.require(decreasing, "|H| decreases under refinement");
  // N = 64 gives max |II| = 1.633
  o.require(b13.max_second_form_norm >= 1.5, "(1,3) not totally geodesic");
}

void ac9(Outcome& o) {
  const Setup b = berger(32, 1, 3);
  const double base = einstein_hilbert(b.metric, b.scalar).energy;
  double scale_err = 0.0;
  for (double lambda : {0.5, 2.0, 10.0})
    scale_err = std::max(scale_err, std::abs(einstein_hilbert(b.metric.scaled(lambda),
                                                              ScalarField::constant(b.grid, scalar_oracle(1, 3) / lambda))
                                                 .energy -
                                             base) /
                                        base);
  const Setup round = berger(32, 1, 1);
  const double energy = einstein_hilbert(round.metric, round.scalar).energy;
  const bool exact = rayleigh_quotient({ScalarField::constant(round.grid, 1.0), round.metric, round.scalar}) == energy;

  const ScalarField f = ScalarField::from_embedding(round.grid, [](const Eigen::Vector4d& x) { return 1.0 + 0.3 * x(0) + 0.2 * x(2) * x(3); });
  const double q = rayleigh_quotient({f, round.metric, round.scalar});
  double homog = 0.0;
  for (double c : {-1.0, 0.1, 5.0}) {
    std::vector<double> v(f.values().begin(), f.values().end());
    for (double& x : v) x *= c;
    homog = std::max(homog, std::abs(rayleigh_quotient({ScalarField(round.grid, v), round.metric, round.scalar}) - q) / q);
  }

  auto green = [](int n) {
    const Setup s = berger(n, 1, 1);
    return green_identity_residual(ScalarField::from_embedding(s.grid, [](const Eigen::Vector4d& x) { return x(0) * x(0) + x(1) * x(1) - x(2) * x(2) - x(3) * x(3); }), s.metric);
  };
  const double g16 = green(16), g32 = green(32);
  o.detail << "scaling err " << scale_err << ", Q(1)==E " << (exact ? "yes" : "no") << ", homogeneity err " << homog
           << ", Green residual " << g16 << " -> " << g32;
  o.require(scale_err <= 1e-10, "E(lambda g) = E(g)");
  o.require(exact, "Q(1) == E exactly");
  o.require(homog <= 1e-12, "homogeneity");
  o.require(g32 < 1e-2 && g16 / g32 >= 2.0, "Green residual < 1e-2, halving");
}

void ac10(Outcome& o) {
  const Setup round = berger(32, 1, 1);
  const ScalarField u = ScalarField::from_coordinates(round.grid, [](const HopfPoint& p) { return 1.0 + 0.1 * std::cos(p.eta); });
  const double direct = conformal_energy_direct(u, round.metric, round.scalar);
  const double q = rayleigh_quotient({u, round.metric, round.scalar});
  const double err = std::abs(direct - q) / q;
  o.detail << "E(u^4 g) " << direct << ", Q(u) " << q << ", rel err " << err;
  o.require(err <= 1e-2, "agreement within 1e-2");
}

bool monotone(const std::vector<double>& trace) {
  for (std::size_t n = 1; n < trace.size(); ++n)
    if (trace[n] > trace[n - 1]) return false;
  return true;
}

void ac11(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const Setup round = berger(32, 1, 1);
  EstimatorOptions opts;
  opts.seed = 7;
  const QuotientEstimate r = estimate(round.metric, round.scalar, opts);
  const double round_time = seconds_since(t0);
  const double round_target = 6.0 * std::pow(pi * pi, 2.0 / 3.0);
  const double spread = normalized_std(r.minimizer, round.metric);

  const auto t1 = std::chrono::steady_clock::now();
  const Setup b = berger(32, 1, 3.5);
  const QuotientEstimate e1 = estimate(b.metric, b.scalar, opts);
  const double berger_time = seconds_since(t1);
  const QuotientEstimate e2 = estimate(b.metric, b.scalar, opts);
  const double berger_target = std::pow(std::sqrt(3.5) * pi * pi, 2.0 / 3.0);
  const bool same = e1.value == e2.value && e1.trace == e2.trace && e1.restart_values == e2.restart_values &&
                    std::equal(e1.minimizer.values().begin(), e1.minimizer.values().end(), e2.minimizer.values().begin());

  o.detail << "round " << r.value << " (target " << round_target << ", std " << spread << ", " << round_time
           << " s); (1,3.5) " << e1.value << " (target " << berger_target << ", " << berger_time << " s)";
  o.require(std::abs(r.value - round_target) <= 0.05 * round_target, "round within 5%");
  o.require(spread < 0.05, "near-constant minimizer");
  o.require(std::abs(e1.value - berger_target) <= 0.05 * berger_target, "(1,3.5) within 5%");
  o.require(monotone(r.trace) && monotone(e1.trace), "monotone trace");
  o.require(same, "deterministic under a fixed seed");
  o.require(round_time <= 120.0 && berger_time <= 120.0, "runtime <= 2 min");
}

void ac12(Outcome& o) {
  const Setup g = berger(32, 1, 1);
  const Setup h = berger(32, 1, 3.5);
  const double gamma = volume_ratio(g.metric, h.metric);
  const double bound = std::pow(gamma, 2.0 / 3.0) * (scalar_oracle(1, 3.5) / 6.0) * einstein_hilbert(g.metric, g.scalar).energy;
  std::mt19937_64 rng(2024);
  double worst = 1e300;
  for (int n = 0; n < 100; ++n) {
    const ScalarField u = SmoothTrial::random(TrialFamily::BoundaryFlat, rng).sample(h.grid);
    worst = std::min(worst, (rayleigh_quotient({u, h.metric, h.scalar}) - bound) / bound);
  }
  o.detail << "gamma " << gamma << ", bound " << bound << ", min relative margin " << worst;
  o.require(worst >= -0.01, "Q_h(u) >= bound - 1%");
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, Check>> criteria{
      {"AC1 engine curvature vs closed forms", ac1},
      {"AC2 Einstein locus", ac2},
      {"AC3 su(2) bracket table", ac3},
      {"AC4 region boundary curves", ac4},
      {"AC5 criterion fixtures", ac5},
      {"AC6 deformation path", ac6},
      {"AC7 chart validation", ac7},
      {"AC8 minimal boundary", ac8},
      {"AC9 functional identities", ac9},
      {"AC10 conformal law", ac10},
      {"AC11 estimator", ac11},
      {"AC12 comparison chain probe", ac12},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      check(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " exception: " << e.what();
    }
    if (!o.pass) ++failed;
    std::printf("[%s] %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
