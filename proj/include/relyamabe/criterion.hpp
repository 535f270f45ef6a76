#pragma once

// Decision procedures for the comparison criterion R_h h <= R_g g between two
// constant-scalar-curvature relative metrics, and for deformation paths that
// end at zero scalar curvature.

#include <functional>
#include <string>
#include <vector>

#include "relyamabe/lie_curvature.hpp"
#include "relyamabe/su2_chart.hpp"

namespace relyamabe {

enum class Verdict {
  AppliesStrict,          // R_h h < R_g g: h is the unique relative Yamabe metric in [h]_0
  AppliesBoundary,        // R_h h <= R_g g with equality in some direction
  Fails,                  // the quadratic form R_g g - R_h h is indefinite
  AutoYamabeNonpositive,  // R_h <= 0: relative Yamabe without comparison
  NotApplicable,          // R_g <= 0
};

const char* to_string(Verdict v);

struct CriterionReport {
  double gamma = 0.0;
  /// Smallest eigenvalue of R_g G - R_h H in a G-orthonormal frame.
  double min_eig = 0.0;
  /// min_eig / |R_g|: the spectrum of I - (R_h/R_g) L^{-1} H L^{-T}.
  double strict_margin = 0.0;
  double tol_strict = 0.0;
  double tol_psd = 0.0;
  Verdict verdict = Verdict::NotApplicable;
  /// Strict comparison also gives uniqueness up to scaling; reported, not verified.
  bool uniqueness_flag = false;
  std::vector<std::string> notes;
};

/// sqrt(det H / det G)
double volume_ratio(const FrameMetric& g, const FrameMetric& h);

/// Pointwise ratio of volume forms; throws HypothesisViolation unless it is
/// constant to relative 1e-8.
double volume_ratio(const MetricField& g, const MetricField& h);

/// Compares h against the reference g. The caller asserts that g is a relative
/// Yamabe metric and that both metrics are relative with constant scalar
/// curvature; these are recorded in `notes`.
CriterionReport theorem1_check(const FrameMetric& g, double scalar_g, const FrameMetric& h,
                               double scalar_h);

enum class BergerClass {
  Einstein,
  Theorem1Strict,
  Theorem1Boundary,
  PositiveScalarUnresolved,
  AutoYamabeNonpositive,
};

const char* to_string(BergerClass c);

struct BergerClassification {
  BergerClass kind = BergerClass::Einstein;
  double scalar = 0.0;
  double einstein_deviation = 0.0;
  CriterionReport criterion;
};

/// Classifies g_{s,t} against the round metric g_{1,1} (G = I, R = 6).
BergerClassification berger_classify(const BergerParams& p);

/// Smallest t in [s, s + 4] past which the criterion against the round metric
/// holds, by bisection to 1e-8 on min_eig. Throws BracketFailure when there is
/// no sign change, InternalConsistency when the root misses s + sqrt(s) + 1 by
/// more than 1e-6.
double boundary_curve(double s);

/// Zero of the Berger scalar curvature in t >= s, by bisection to 1e-10.
/// Cross-checked against (1 + sqrt(s))^2 to 1e-6.
double scalar_sign_boundary(double s);

struct PathPoint {
  FrameMetric metric;
  double scalar = 0.0;
};

struct PathSample {
  double parameter = 0.0;
  double scalar = 0.0;
  double min_eig = 0.0;
  double gamma = 0.0;
  Verdict verdict = Verdict::NotApplicable;
};

struct PathReport {
  std::vector<PathSample> samples;
  double delta = 0.0;
  double endpoint_scalar = 0.0;
};

using MetricPath = std::function<PathPoint(double)>;

/// Berger line t -> g_{s,t}.
MetricPath berger_path(double s);

/// Samples `steps` + 1 uniform points of [start, end], checks that R > 0
/// before the end and |R(end)| <= 1e-10 (HypothesisViolation otherwise), and
/// compares every sample against the path's own starting metric. `delta` is
/// the length of the terminal run of samples on which the criterion holds.
PathReport corollary_path_check(const MetricPath& path, double start, double end, int steps);

}  // namespace relyamabe
