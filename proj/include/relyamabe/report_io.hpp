#pragma once

// JSON/CSV serialization of reports and parsing of metric-spec files.

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "relyamabe/criterion.hpp"
#include "relyamabe/lie_curvature.hpp"
#include "relyamabe/su2_chart.hpp"
#include "relyamabe/yamabe_estimator.hpp"

namespace relyamabe {

using json = nlohmann::ordered_json;

/// A frame with a left-invariant metric on it. `berger` is set when the spec
/// used the Berger shorthand (the frame is then su(2)).
struct MetricSpec {
  LieAlgebraFrame frame;
  FrameMetric metric;
  std::optional<BergerParams> berger;
};

MetricSpec berger_spec(const BergerParams& p);

/// Accepts {"structure_constants": [[[..]]], "metric": [[..]]} with c[k][i][j]
/// = c^k_ij, or {"berger": {"s": .., "t": ..}}. Unknown keys and malformed
/// shapes throw InvalidParams; frame and metric invariants throw as in
/// LieAlgebraFrame::from_constants and FrameMetric::make.
MetricSpec parse_metric_spec(const json& doc);
MetricSpec read_metric_spec(const std::string& path);

json to_json(const Eigen::Matrix3d& m);
json to_json(const CurvatureReport& r);
json to_json(const RiemannSymmetryResiduals& r);
json to_json(const CriterionReport& r);
json to_json(const PathReport& r);
/// {"value", "converged", "iterations", "neumann_residual", "trace", "best_restart"}
json to_json(const QuotientEstimate& e);

struct SweepRow {
  double s = 0.0;
  double t = 0.0;
  /// Unset when s > t (outside the Berger parameter domain).
  std::optional<BergerClassification> result;
};

inline constexpr const char* kSweepHeader = "s,t,R,einstein_dev,min_eig,gamma,verdict";

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);
json sweep_to_json(const std::vector<SweepRow>& rows);

/// Cell centers and values: CSV columns eta,xi1,xi2,<names...>.
void write_grid_csv(std::ostream& os, const HopfGrid& grid, const std::vector<std::string>& names,
                    const std::vector<const ScalarField*>& fields);
json grid_to_json(const HopfGrid& grid, const std::vector<std::string>& names,
                  const std::vector<const ScalarField*>& fields);

/// Shortest round-trip decimal representation.
std::string format_double(double v);

}  // namespace relyamabe
