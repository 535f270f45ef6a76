#include "relyamabe/criterion.hpp"

#include <cmath>

#include "relyamabe/errors.hpp"

namespace relyamabe {

namespace {

constexpr double kStrictRel = 1e-10;
constexpr double kPsdRel = 1e-12;
constexpr double kVolumeRatioRel = 1e-8;
constexpr double kEinsteinTol = 1e-10;
constexpr double kEndpointScalarTol = 1e-10;
constexpr double kRoundScalar = 6.0;

double min_eig_against_round(double s, double t) {
  const BergerParams p = BergerParams::make(s, t);
  return theorem1_check(FrameMetric::identity(), kRoundScalar, p.metric(), berger_scalar_closed(p))
      .min_eig;
}

template <typename F>
double bisect(const F& f, double lo, double hi, double abs_tol) {
  double flo = f(lo);
  while (hi - lo > abs_tol) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = f(mid);
    if ((fmid < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

bool criterion_holds(Verdict v) {
  return v == Verdict::AppliesStrict || v == Verdict::AppliesBoundary ||
         v == Verdict::AutoYamabeNonpositive;
}

}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::AppliesStrict: return "AppliesStrict";
    case Verdict::AppliesBoundary: return "AppliesBoundary";
    case Verdict::Fails: return "Fails";
    case Verdict::AutoYamabeNonpositive: return "AutoYamabeNonpositive";
    case Verdict::NotApplicable: return "NotApplicable";
  }
  return "?";
}

const char* to_string(BergerClass c) {
  switch (c) {
    case BergerClass::Einstein: return "Einstein";
    case BergerClass::Theorem1Strict: return "Theorem1Strict";
    case BergerClass::Theorem1Boundary: return "Theorem1Boundary";
    case BergerClass::PositiveScalarUnresolved: return "PositiveScalarUnresolved";
    case BergerClass::AutoYamabeNonpositive: return "AutoYamabeNonpositive";
  }
  return "?";
}

double volume_ratio(const FrameMetric& g, const FrameMetric& h) {
  return std::sqrt(h.determinant() / g.determinant());
}

double volume_ratio(const MetricField& g, const MetricField& h) {
  if (!(g.grid() == h.grid())) throw Error(ErrorKind::ShapeMismatch, "fields live on different grids");
  const double ref = h.sqrt_det(0) / g.sqrt_det(0);
  for (std::size_t n = 1; n < g.grid().size(); ++n) {
    const double r = h.sqrt_det(n) / g.sqrt_det(n);
    if (std::abs(r - ref) > kVolumeRatioRel * std::abs(ref))
      throw Error(ErrorKind::HypothesisViolation,
                  "volume forms are not proportional with the identity map (ratio varies from " +
                      std::to_string(ref) + " to " + std::to_string(r) + ")");
  }
  return ref;
}

CriterionReport theorem1_check(const FrameMetric& g, double scalar_g, const FrameMetric& h,
                               double scalar_h) {
  if (!std::isfinite(scalar_g) || !std::isfinite(scalar_h))
    throw Error(ErrorKind::Domain, "scalar curvatures must be finite");

  CriterionReport rep;
  rep.gamma = volume_ratio(g, h);
  rep.notes.push_back("assumed: reference metric is a relative Yamabe metric");
  rep.notes.push_back("assumed: both metrics are relative (minimal boundary) with constant scalar curvature");
  rep.notes.push_back(std::string("sign(R_g) = ") + (scalar_g > 0 ? "+" : scalar_g < 0 ? "-" : "0") +
                      ", sign(R_h) = " + (scalar_h > 0 ? "+" : scalar_h < 0 ? "-" : "0"));

  // G-orthonormal frame: L L^T = G, so G becomes I and H becomes L^{-1} H L^{-T}.
  const Eigen::Matrix3d Linv =
      g.cholesky_factor().triangularView<Eigen::Lower>().solve(Eigen::Matrix3d::Identity());
  Eigen::Matrix3d h_on = Linv * h.matrix() * Linv.transpose();
  h_on = (0.5 * (h_on + h_on.transpose())).eval();
  const Eigen::Matrix3d pencil = scalar_g * Eigen::Matrix3d::Identity() - scalar_h * h_on;
  rep.min_eig = Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(pencil, Eigen::EigenvaluesOnly)
                    .eigenvalues()
                    .minCoeff();

  // |R_g G| measured in the G-orthonormal frame (spectral norm).
  const double scale = std::abs(scalar_g);
  rep.tol_strict = kStrictRel * scale;
  rep.tol_psd = kPsdRel * scale;
  rep.strict_margin = scale > 0.0 ? rep.min_eig / scale : 0.0;

  if (!(scalar_g > 0.0)) {
    rep.verdict = Verdict::NotApplicable;
    rep.notes.push_back("reference scalar curvature is not positive");
  } else if (scalar_h <= 0.0) {
    rep.verdict = Verdict::AutoYamabeNonpositive;
  } else if (rep.min_eig > rep.tol_strict) {
    rep.verdict = Verdict::AppliesStrict;
  } else if (rep.min_eig >= -rep.tol_psd) {
    rep.verdict = Verdict::AppliesBoundary;
  } else {
    rep.verdict = Verdict::Fails;
  }
  rep.uniqueness_flag = rep.verdict == Verdict::AppliesStrict;
  return rep;
}

BergerClassification berger_classify(const BergerParams& p) {
  BergerClassification out;
  out.scalar = berger_scalar_closed(p);
  out.einstein_deviation = einstein_locus_check(p);
  out.criterion = theorem1_check(FrameMetric::identity(), kRoundScalar, p.metric(), out.scalar);
  if (out.einstein_deviation <= kEinsteinTol) {
    out.kind = BergerClass::Einstein;
  } else if (out.scalar <= 0.0) {
    out.kind = BergerClass::AutoYamabeNonpositive;
  } else if (out.criterion.verdict == Verdict::AppliesStrict) {
    out.kind = BergerClass::Theorem1Strict;
  } else if (out.criterion.verdict == Verdict::AppliesBoundary) {
    out.kind = BergerClass::Theorem1Boundary;
  } else {
    out.kind = BergerClass::PositiveScalarUnresolved;
  }
  return out;
}

double boundary_curve(double s) {
  if (!(s >= 1.0)) throw Error(ErrorKind::InvalidParams, "boundary_curve requires s >= 1");
  const double lo_end = s;
  const double hi_end = s + 4.0;
  auto f = [s](double t) { return min_eig_against_round(s, t); };

  // Last sample where the criterion fails; the root lies just past it.
  constexpr int kScan = 400;
  int last_negative = -1;
  for (int m = 0; m <= kScan; ++m) {
    const double t = lo_end + (hi_end - lo_end) * m / kScan;
    if (f(t) < 0.0) last_negative = m;
  }
  if (last_negative < 0 || last_negative == kScan)
    throw Error(ErrorKind::BracketFailure, "no sign change of min_eig on [s, s+4]");
  const double lo = lo_end + (hi_end - lo_end) * last_negative / kScan;
  const double hi = lo_end + (hi_end - lo_end) * (last_negative + 1) / kScan;
  const double root = bisect(f, lo, hi, 1e-10);

  const double closed = s + std::sqrt(s) + 1.0;
  if (std::abs(root - closed) > 1e-6)
    throw Error(ErrorKind::InternalConsistency,
                "bisection root " + std::to_string(root) + " misses s+sqrt(s)+1 = " + std::to_string(closed));
  return root;
}

double scalar_sign_boundary(double s) {
  if (!(s >= 1.0)) throw Error(ErrorKind::InvalidParams, "scalar_sign_boundary requires s >= 1");
  auto r = [s](double t) { return berger_scalar_closed(BergerParams::make(s, t)); };
  const double lo = s;
  const double hi = 2.0 * (1.0 + s) + 1.0;
  if (!(r(lo) > 0.0 && r(hi) < 0.0))
    throw Error(ErrorKind::BracketFailure, "scalar curvature does not change sign on the bracket");
  const double root = bisect(r, lo, hi, 1e-10);
  const double closed = (1.0 + std::sqrt(s)) * (1.0 + std::sqrt(s));
  if (std::abs(root - closed) > 1e-6)
    throw Error(ErrorKind::InternalConsistency,
                "bisection root " + std::to_string(root) + " misses (1+sqrt(s))^2 = " + std::to_string(closed));
  return root;
}

MetricPath berger_path(double s) {
  return [s](double t) {
    const BergerParams p = BergerParams::make(s, t);
    return PathPoint{p.metric(), berger_scalar_closed(p)};
  };
}

PathReport corollary_path_check(const MetricPath& path, double start, double end, int steps) {
  if (!(start <= end)) throw Error(ErrorKind::InvalidParams, "path requires start <= end");
  if (steps < 1) throw Error(ErrorKind::InvalidParams, "path requires steps >= 1");

  const int count = start == end ? 1 : steps + 1;
  std::vector<double> params(count);
  std::vector<PathPoint> points;
  points.reserve(count);
  for (int m = 0; m < count; ++m) {
    params[m] = count == 1 ? start : start + (end - start) * m / steps;
    points.push_back(path(params[m]));
  }

  PathReport rep;
  rep.endpoint_scalar = points.back().scalar;
  for (int m = 0; m + 1 < count; ++m)
    if (!(points[m].scalar > 0.0))
      throw Error(ErrorKind::HypothesisViolation,
                  "condition (3) R > 0 before the endpoint fails at parameter " + std::to_string(params[m]));
  if (!(std::abs(rep.endpoint_scalar) <= kEndpointScalarTol))
    throw Error(ErrorKind::HypothesisViolation,
                "condition (4) R = 0 at the endpoint fails (R = " + std::to_string(rep.endpoint_scalar) + ")");

  const PathPoint& ref = points.front();
  for (int m = 0; m < count; ++m) {
    const CriterionReport c = theorem1_check(ref.metric, ref.scalar, points[m].metric, points[m].scalar);
    rep.samples.push_back({params[m], points[m].scalar, c.min_eig, c.gamma, c.verdict});
  }

  int first_holding = count;
  for (int m = count - 1; m >= 0 && criterion_holds(rep.samples[m].verdict); --m) first_holding = m;
  rep.delta = first_holding < count ? end - params[first_holding] : 0.0;
  return rep;
}

}  // namespace relyamabe
