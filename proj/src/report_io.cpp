#include "relyamabe/report_io.hpp"

#include <charconv>
#include <fstream>

#include "relyamabe/errors.hpp"

namespace relyamabe {

namespace {

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                         const std::string& where) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* k : allowed) known = known || item.key() == k;
    if (!known) throw Error(ErrorKind::InvalidParams, "unknown key '" + item.key() + "' in " + where);
  }
}

double number_at(const json& v, const std::string& where) {
  if (!v.is_number()) throw Error(ErrorKind::InvalidParams, where + " must be a number");
  return v.get<double>();
}

void require_array(const json& v, std::size_t n, const std::string& where) {
  if (!v.is_array() || v.size() != n)
    throw Error(ErrorKind::InvalidParams, where + " must be an array of length " + std::to_string(n));
}

json vector_json(const Eigen::Vector3d& v) { return json::array({v(0), v(1), v(2)}); }

json tensor3_json(const Tensor3& t) {
  json out = json::array();
  for (int k = 0; k < 3; ++k) {
    json slab = json::array();
    for (int i = 0; i < 3; ++i) slab.push_back(json::array({t(k, i, 0), t(k, i, 1), t(k, i, 2)}));
    out.push_back(std::move(slab));
  }
  return out;
}

}  // namespace

MetricSpec berger_spec(const BergerParams& p) { return {su2_structure_constants(), p.metric(), p}; }

MetricSpec parse_metric_spec(const json& doc) {
  if (!doc.is_object()) throw Error(ErrorKind::InvalidParams, "metric spec must be a JSON object");

  if (doc.contains("berger")) {
    reject_unknown_keys(doc, {"berger"}, "metric spec");
    const json& b = doc.at("berger");
    if (!b.is_object()) throw Error(ErrorKind::InvalidParams, "berger must be an object {s, t}");
    reject_unknown_keys(b, {"s", "t"}, "berger");
    if (!b.contains("s") || !b.contains("t"))
      throw Error(ErrorKind::InvalidParams, "berger requires both s and t");
    return berger_spec(BergerParams::make(number_at(b.at("s"), "berger.s"), number_at(b.at("t"), "berger.t")));
  }

  reject_unknown_keys(doc, {"structure_constants", "metric"}, "metric spec");
  if (!doc.contains("structure_constants") || !doc.contains("metric"))
    throw Error(ErrorKind::InvalidParams, "metric spec requires structure_constants and metric (or berger)");

  const json& jc = doc.at("structure_constants");
  require_array(jc, 3, "structure_constants");
  Tensor3 c;
  for (int k = 0; k < 3; ++k) {
    require_array(jc[k], 3, "structure_constants[" + std::to_string(k) + "]");
    for (int i = 0; i < 3; ++i) {
      require_array(jc[k][i], 3, "structure_constants[k][i]");
      for (int j = 0; j < 3; ++j) c(k, i, j) = number_at(jc[k][i][j], "structure_constants entry");
    }
  }

  const json& jm = doc.at("metric");
  require_array(jm, 3, "metric");
  Eigen::Matrix3d g;
  for (int i = 0; i < 3; ++i) {
    require_array(jm[i], 3, "metric row");
    for (int j = 0; j < 3; ++j) g(i, j) = number_at(jm[i][j], "metric entry");
  }

  return {LieAlgebraFrame::from_constants(c), FrameMetric::make(g), std::nullopt};
}

MetricSpec read_metric_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidParams, "cannot open metric spec '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::InvalidParams, "metric spec '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_metric_spec(doc);
}

json to_json(const Eigen::Matrix3d& m) {
  json out = json::array();
  for (int i = 0; i < 3; ++i) out.push_back(json::array({m(i, 0), m(i, 1), m(i, 2)}));
  return out;
}

json to_json(const CurvatureReport& r) {
  json out;
  out["scalar"] = r.scalar;
  out["einstein_deviation"] = r.einstein_deviation;
  out["ricci_eigenvalues"] = vector_json(r.ricci_eigenvalues);
  out["ricci_orthonormal_diagonal"] = vector_json(r.ricci_orthonormal.diagonal());
  out["ricci"] = to_json(r.ricci);
  out["connection"] = tensor3_json(r.gamma_coeffs);
  return out;
}

json to_json(const RiemannSymmetryResiduals& r) {
  return {{"antisym_ij", r.antisym_ij},
          {"antisym_kl", r.antisym_kl},
          {"pair", r.pair},
          {"bianchi", r.bianchi}};
}

json to_json(const CriterionReport& r) {
  return {{"verdict", to_string(r.verdict)},
          {"gamma", r.gamma},
          {"min_eig", r.min_eig},
          {"strict_margin", r.strict_margin},
          {"tol_strict", r.tol_strict},
          {"tol_psd", r.tol_psd},
          {"uniqueness_flag", r.uniqueness_flag},
          {"notes", r.notes}};
}

json to_json(const PathReport& r) {
  json samples = json::array();
  for (const auto& s : r.samples)
    samples.push_back({{"parameter", s.parameter},
                       {"scalar", s.scalar},
                       {"min_eig", s.min_eig},
                       {"gamma", s.gamma},
                       {"verdict", to_string(s.verdict)}});
  return {{"delta", r.delta}, {"endpoint_scalar", r.endpoint_scalar}, {"samples", std::move(samples)}};
}

json to_json(const QuotientEstimate& e) {
  return {{"value", e.value},
          {"converged", e.converged},
          {"iterations", e.iterations_used},
          {"neumann_residual", e.neumann_residual_of_minimizer},
          {"best_restart", e.best_restart},
          {"restart_values", e.restart_values},
          {"trace", e.trace}};
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << kSweepHeader << '\n';
  for (const auto& row : rows) {
    os << format_double(row.s) << ',' << format_double(row.t) << ',';
    if (!row.result) {
      os << ",,,,OutOfDomain\n";
      continue;
    }
    const BergerClassification& c = *row.result;
    os << format_double(c.scalar) << ',' << format_double(c.einstein_deviation) << ','
       << format_double(c.criterion.min_eig) << ',' << format_double(c.criterion.gamma) << ','
       << to_string(c.kind) << '\n';
  }
}

json sweep_to_json(const std::vector<SweepRow>& rows) {
  json out = json::array();
  for (const auto& row : rows) {
    json r = {{"s", row.s}, {"t", row.t}};
    if (row.result) {
      r["R"] = row.result->scalar;
      r["einstein_dev"] = row.result->einstein_deviation;
      r["min_eig"] = row.result->criterion.min_eig;
      r["gamma"] = row.result->criterion.gamma;
      r["verdict"] = to_string(row.result->kind);
    } else {
      r["verdict"] = "OutOfDomain";
    }
    out.push_back(std::move(r));
  }
  return out;
}

void write_grid_csv(std::ostream& os, const HopfGrid& grid, const std::vector<std::string>& names,
                    const std::vector<const ScalarField*>& fields) {
  os << "eta,xi1,xi2";
  for (const auto& n : names) os << ',' << n;
  os << '\n';
  for (int i = 0; i < grid.n_eta(); ++i)
    for (int j = 0; j < grid.n_xi1(); ++j)
      for (int k = 0; k < grid.n_xi2(); ++k) {
        os << format_double(grid.eta(i)) << ',' << format_double(grid.xi1(j)) << ','
           << format_double(grid.xi2(k));
        for (const ScalarField* f : fields) os << ',' << format_double(f->at(i, j, k));
        os << '\n';
      }
}

json grid_to_json(const HopfGrid& grid, const std::vector<std::string>& names,
                  const std::vector<const ScalarField*>& fields) {
  json out;
  out["resolution"] = {grid.n_eta(), grid.n_xi1(), grid.n_xi2()};
  out["spacing"] = {grid.spacing(0), grid.spacing(1), grid.spacing(2)};
  out["layout"] = "row-major (eta, xi1, xi2), cell centers";
  std::vector<double> eta, xi1, xi2;
  for (int i = 0; i < grid.n_eta(); ++i)
    for (int j = 0; j < grid.n_xi1(); ++j)
      for (int k = 0; k < grid.n_xi2(); ++k) {
        eta.push_back(grid.eta(i));
        xi1.push_back(grid.xi1(j));
        xi2.push_back(grid.xi2(k));
      }
  out["eta"] = std::move(eta);
  out["xi1"] = std::move(xi1);
  out["xi2"] = std::move(xi2);
  json values;
  for (std::size_t n = 0; n < names.size(); ++n) {
    auto v = fields[n]->values();
    values[names[n]] = std::vector<double>(v.begin(), v.end());
  }
  out["fields"] = std::move(values);
  return out;
}

}  // namespace relyamabe
