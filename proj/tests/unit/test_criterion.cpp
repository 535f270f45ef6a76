#include <doctest.h>

#include <cmath>
#include <random>

#include "relyamabe/criterion.hpp"
#include "relyamabe/errors.hpp"

using namespace relyamabe;

namespace {

FrameMetric diag(double a, double b, double c) { return FrameMetric::make(Eigen::Vector3d(a, b, c).asDiagonal()); }

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::InternalConsistency;
}

FrameMetric random_metric(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::Matrix3d a;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) a(i, j) = u(rng);
  Eigen::Matrix3d g = a * a.transpose() + 0.5 * Eigen::Matrix3d::Identity();
  g = (0.5 * (g + g.transpose())).eval();
  return FrameMetric::make(g);
}

}  // namespace

TEST_CASE("volume ratio") {
  CHECK(volume_ratio(FrameMetric::identity(), diag(1, 1, 3)) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));
  CHECK(volume_ratio(diag(1, 2, 3), diag(1, 2, 3)) == 1.0);
  CHECK(volume_ratio(FrameMetric::identity(), diag(1, 2.5, 4)) == doctest::Approx(std::sqrt(10.0)).epsilon(1e-15));

  const HopfGrid grid = HopfGrid::cubic(12);
  const MetricField round = chart_metric(grid, BergerParams::make(1, 1));
  const MetricField b13 = chart_metric(grid, BergerParams::make(1, 3));
  CHECK(volume_ratio(round, b13) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-8));

  const ScalarField u = ScalarField::from_coordinates(grid, [](const HopfPoint& p) { return 1.0 + 0.2 * std::cos(p.eta); });
  CHECK(kind_of([&] { volume_ratio(round, round.conformal(u)); }) == ErrorKind::HypothesisViolation);
  const MetricField other = chart_metric(HopfGrid::cubic(8), BergerParams::make(1, 1));
  CHECK(kind_of([&] { volume_ratio(round, other); }) == ErrorKind::ShapeMismatch);
}

TEST_CASE("comparison fixtures against the round metric") {
  const FrameMetric round = FrameMetric::identity();

  // 6I - 2 diag(1,1,3) = diag(4,4,0)
  const CriterionReport b13 = theorem1_check(round, 6.0, diag(1, 1, 3), 2.0);
  CHECK(std::abs(b13.min_eig) <= 1e-10);
  CHECK(b13.verdict == Verdict::AppliesBoundary);
  CHECK(!b13.uniqueness_flag);
  CHECK(b13.gamma == doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));

  // 6I - 1 diag(1,1,3.5) = diag(5,5,2.5)
  const CriterionReport b135 = theorem1_check(round, 6.0, diag(1, 1, 3.5), 1.0);
  CHECK(std::abs(b135.min_eig - 2.5) <= 1e-10);
  CHECK(std::abs(b135.gamma - std::sqrt(3.5)) <= 1e-12);
  CHECK(b135.verdict == Verdict::AppliesStrict);
  CHECK(b135.uniqueness_flag);
  CHECK(b135.strict_margin == doctest::Approx(2.5 / 6.0).epsilon(1e-12));

  // 6I - 4 diag(1,1,2) = diag(2,2,-2)
  const CriterionReport b12 = theorem1_check(round, 6.0, diag(1, 1, 2), 4.0);
  CHECK(b12.min_eig == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(b12.verdict == Verdict::Fails);

  CHECK(theorem1_check(round, 6.0, diag(1, 1, 4.5), berger_scalar_closed(BergerParams::make(1, 4.5))).verdict ==
        Verdict::AutoYamabeNonpositive);
  CHECK(theorem1_check(round, 0.0, diag(1, 1, 3), 2.0).verdict == Verdict::NotApplicable);
  CHECK(theorem1_check(round, -1.0, diag(1, 1, 3), -5.0).verdict == Verdict::NotApplicable);
  CHECK(b13.notes.size() == 3);
  CHECK(kind_of([&] { theorem1_check(round, std::nan(""), round, 1.0); }) == ErrorKind::Domain);
}

TEST_CASE("self-comparison and rescaling") {
  std::mt19937_64 rng(17);
  for (int n = 0; n < 50; ++n) {
    const FrameMetric g = random_metric(rng);
    const double r = 0.5 + static_cast<double>(n);
    const CriterionReport self = theorem1_check(g, r, g, r);
    CHECK(std::abs(self.min_eig) <= self.tol_strict);
    CHECK(self.verdict == Verdict::AppliesBoundary);

    const FrameMetric h = random_metric(rng);
    const double rh = 0.1 * r;
    const CriterionReport base = theorem1_check(g, r, h, rh);
    for (double lambda : {0.25, 3.0}) {
      const CriterionReport g_scaled = theorem1_check(g.scaled(lambda), r / lambda, h, rh);
      const CriterionReport h_scaled = theorem1_check(g, r, h.scaled(lambda), rh / lambda);
      CHECK(g_scaled.verdict == base.verdict);
      CHECK(h_scaled.verdict == base.verdict);
      CHECK(std::abs(g_scaled.strict_margin - base.strict_margin) <= 1e-12);
      CHECK(std::abs(h_scaled.strict_margin - base.strict_margin) <= 1e-12);
    }
  }
}

TEST_CASE("Berger line s = 1") {
  // Against the round metric: eigenvalues 6 - R and 6 - R t with R = 8 - 2t,
  // i.e. 2t - 2 and 2(t - 1)(t - 3).
  double previous = -1e300;
  for (int n = 0; n <= 100; ++n) {
    const double t = 2.0 + 2.0 * n / 100.0;
    const BergerParams p = BergerParams::make(1, t);
    const CriterionReport rep = theorem1_check(FrameMetric::identity(), 6.0, p.metric(), berger_scalar_closed(p));
    const double expected = std::min(2 * t - 2, 2 * (t - 1) * (t - 3));
    CHECK(rep.min_eig == doctest::Approx(expected).epsilon(1e-12).scale(1.0));
    CHECK(rep.min_eig >= previous);
    previous = rep.min_eig;
  }
  // Below t = 2 the second eigenvalue still falls: min at t = 2 with value -2.
  const BergerParams p15 = BergerParams::make(1, 1.5);
  CHECK(theorem1_check(FrameMetric::identity(), 6.0, p15.metric(), berger_scalar_closed(p15)).min_eig ==
        doctest::Approx(-1.5));
}

TEST_CASE("Berger classification") {
  CHECK(berger_classify(BergerParams::make(1, 1)).kind == BergerClass::Einstein);
  const BergerClassification strict = berger_classify(BergerParams::make(1, 3.5));
  CHECK(strict.kind == BergerClass::Theorem1Strict);
  CHECK(strict.scalar == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(strict.einstein_deviation >= 1e-2);
  CHECK(berger_classify(BergerParams::make(1, 3)).kind == BergerClass::Theorem1Boundary);
  const BergerClassification unresolved = berger_classify(BergerParams::make(1, 2));
  CHECK(unresolved.kind == BergerClass::PositiveScalarUnresolved);
  CHECK(unresolved.scalar == doctest::Approx(4.0).epsilon(1e-12));
  const BergerClassification nonpositive = berger_classify(BergerParams::make(1, 4.5));
  CHECK(nonpositive.kind == BergerClass::AutoYamabeNonpositive);
  CHECK(nonpositive.scalar == doctest::Approx((2.0 / 4.5) * (2 * 10 - 22.25)).epsilon(1e-12));
  CHECK(berger_classify(BergerParams::make(1, 4)).kind == BergerClass::AutoYamabeNonpositive);
  CHECK(std::string(to_string(BergerClass::Theorem1Strict)) == "Theorem1Strict");
  CHECK(std::string(to_string(Verdict::AppliesBoundary)) == "AppliesBoundary");

  // Scanning t at fixed s, classes change only across the two boundary curves.
  for (double s : {1.0, 2.25}) {
    const double t_star = s + std::sqrt(s) + 1;
    const double t_zero = (1 + std::sqrt(s)) * (1 + std::sqrt(s));
    BergerClass previous = berger_classify(BergerParams::make(s, s + 1e-3)).kind;
    for (int n = 1; n <= 400; ++n) {
      const double t = s + 1e-3 + (s + 4.0) * n / 400.0;
      const BergerClass now = berger_classify(BergerParams::make(s, t)).kind;
      if (now != previous) {
        const double step = (s + 4.0) / 400.0;
        const bool near_curve = std::abs(t - t_star) <= step || std::abs(t - t_zero) <= step;
        CHECK(near_curve);
      }
      previous = now;
    }
  }
}

TEST_CASE("boundary curves") {
  for (double s : {1.0, 2.25, 4.0}) {
    CHECK(std::abs(boundary_curve(s) - (s + std::sqrt(s) + 1)) <= 1e-6);
    CHECK(std::abs(scalar_sign_boundary(s) - (1 + std::sqrt(s)) * (1 + std::sqrt(s))) <= 1e-6);
  }
  CHECK(boundary_curve(1.0) == doctest::Approx(3.0).epsilon(1e-8));
  CHECK(boundary_curve(4.0) == doctest::Approx(7.0).epsilon(1e-8));
  CHECK(boundary_curve(2.25) == doctest::Approx(4.75).epsilon(1e-8));
  CHECK(kind_of([] { boundary_curve(0.5); }) == ErrorKind::InvalidParams);
}

TEST_CASE("deformation path") {
  const PathReport rep = corollary_path_check(berger_path(1.0), 3.0, 4.0, 100);
  REQUIRE(rep.samples.size() == 101);
  for (const PathSample& s : rep.samples) {
    CHECK(s.min_eig >= -1e-10);
    CHECK(s.verdict != Verdict::Fails);
  }
  for (std::size_t n = 1; n < rep.samples.size(); ++n) CHECK(rep.samples[n].parameter > rep.samples[n - 1].parameter);
  CHECK(rep.delta == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(rep.endpoint_scalar) <= 1e-10);
  CHECK(rep.samples.front().verdict == Verdict::AppliesBoundary);
  CHECK(rep.samples.back().verdict == Verdict::AutoYamabeNonpositive);
  CHECK(rep.samples[50].gamma == doctest::Approx(std::sqrt(3.5 / 3.0)).epsilon(1e-12));

  const PathReport degenerate = corollary_path_check(berger_path(1.0), 4.0, 4.0, 10);
  CHECK(degenerate.samples.size() == 1);
  CHECK(degenerate.delta == 0.0);

  // Against g_{1,2} (R = 4, G-orthonormal H = diag(1,1,t/2)): eigenvalues
  // 2t - 4 and (t - 2)^2, both >= 0, so the criterion holds along all of [2,4].
  const PathReport wide = corollary_path_check(berger_path(1.0), 2.0, 4.0, 100);
  for (const PathSample& s : wide.samples) {
    const double t = s.parameter;
    CHECK(s.min_eig == doctest::Approx(std::min(2 * t - 4, (t - 2) * (t - 2))).epsilon(1e-12).scale(1.0));
    CHECK(s.verdict != Verdict::Fails);
  }
  CHECK(wide.delta == doctest::Approx(2.0).epsilon(1e-12));

  // Conditions on the scalar curvature along the path.
  CHECK(kind_of([] { corollary_path_check(berger_path(1.0), 3.0, 3.8, 10); }) == ErrorKind::HypothesisViolation);
  CHECK(kind_of([] { corollary_path_check(berger_path(1.0), 3.0, 4.5, 10); }) == ErrorKind::HypothesisViolation);
  const MetricPath varying = [](double x) { return PathPoint{diag(1, 1, x), x < 1.5 ? 1.0 - x : 0.0}; };
  CHECK(kind_of([&] { corollary_path_check(varying, 1.0, 2.0, 4); }) == ErrorKind::HypothesisViolation);
}
