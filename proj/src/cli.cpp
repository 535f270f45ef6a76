#include "relyamabe/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "relyamabe/conformal_energy.hpp"
#include "relyamabe/errors.hpp"

namespace relyamabe {

namespace {

constexpr double kIdentityTol = 1e-12;
constexpr double kClosedFormTol = 1e-10;

struct Globals {
  std::string out_path;
  std::string format = "json";
  std::uint64_t seed = 0;
  bool quiet = false;
};

struct Outcome {
  std::string body;
  std::string summary;
  bool invariants_ok = true;
};

double parse_number(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || !std::isfinite(v))
    throw Error(ErrorKind::InvalidParams, what + ": '" + text + "' is not a finite number");
  return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream is(text);
  while (std::getline(is, cur, sep)) parts.push_back(cur);
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

bool is_su2(const LieAlgebraFrame& frame) {
  const LieAlgebraFrame su2 = su2_structure_constants();
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (std::abs(frame.c(k, i, j) - su2.c(k, i, j)) > kIdentityTol) return false;
  return true;
}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

std::string key_value_csv(const std::vector<std::pair<std::string, std::string>>& rows) {
  std::string s = "key,value\n";
  for (const auto& [k, v] : rows) s += k + "," + v + "\n";
  return s;
}

MetricSpec geometry_from(const std::string& geometry, const std::string& spec_path, double s, double t,
                         bool have_s, bool have_t) {
  const int sources = (!geometry.empty()) + (!spec_path.empty()) + (have_s || have_t);
  if (sources != 1)
    throw Error(ErrorKind::InvalidParams, "give exactly one of --geometry, --spec, or --s/--t");
  if (!spec_path.empty()) return read_metric_spec(spec_path);
  if (!geometry.empty()) return parse_geometry(geometry);
  if (!(have_s && have_t)) throw Error(ErrorKind::InvalidParams, "--s and --t must be given together");
  return berger_spec(BergerParams::make(s, t));
}

MetricField hemisphere_metric(const MetricSpec& spec, int resolution) {
  if (!is_su2(spec.frame))
    throw Error(ErrorKind::InvalidParams, "the hemisphere chart requires the su(2) frame X1, X2, X3");
  return chart_metric(HopfGrid::cubic(resolution), spec.metric);
}

// ---- curvature ------------------------------------------------------------

Outcome cmd_curvature(const Globals& gl, const MetricSpec& spec) {
  const CurvatureReport rep = curvature_report(spec.frame, spec.metric);
  const Tensor3 gamma = levi_civita(spec.frame, spec.metric);
  const RiemannSymmetryResiduals sym = riemann_symmetry_residuals(rep, spec.metric);
  const double torsion = torsion_residual(spec.frame, gamma);
  const double compat = metric_compatibility_residual(spec.metric, gamma);

  double scale = 1.0;
  for (int l = 0; l < 3; ++l)
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) scale = std::max(scale, std::abs(rep.riemann(l, k, i, j)));
  Outcome o;
  o.invariants_ok = sym.max() <= kIdentityTol * scale && torsion <= kIdentityTol * scale &&
                    compat <= kIdentityTol * scale;

  json doc;
  doc["frame"] = spec.frame.labels();
  doc["metric"] = to_json(spec.metric.matrix());
  doc["report"] = to_json(rep);
  doc["identities"] = to_json(sym);
  doc["identities"]["torsion"] = torsion;
  doc["identities"]["metric_compatibility"] = compat;

  std::vector<std::pair<std::string, std::string>> kv{
      {"scalar", format_double(rep.scalar)},
      {"einstein_deviation", format_double(rep.einstein_deviation)},
      {"ricci_eigenvalue_1", format_double(rep.ricci_eigenvalues(0))},
      {"ricci_eigenvalue_2", format_double(rep.ricci_eigenvalues(1))},
      {"ricci_eigenvalue_3", format_double(rep.ricci_eigenvalues(2))},
      {"identity_residual", format_double(std::max({sym.max(), torsion, compat}))}};

  if (spec.berger) {
    const double closed = berger_scalar_closed(*spec.berger);
    auto ricci_closed = berger_ricci_closed(*spec.berger);
    std::sort(ricci_closed.begin(), ricci_closed.end());
    const double scalar_delta = std::abs(rep.scalar - closed);
    double ricci_delta = 0.0;
    for (int a = 0; a < 3; ++a)
      ricci_delta = std::max(ricci_delta, std::abs(rep.ricci_eigenvalues(a) - ricci_closed[a]));
    const double rel = std::max(1.0, std::abs(closed));
    o.invariants_ok = o.invariants_ok && scalar_delta <= kClosedFormTol * rel &&
                      ricci_delta <= kClosedFormTol * rel;
    doc["berger"] = {{"s", spec.berger->s()}, {"t", spec.berger->t()}};
    doc["closed_form"] = {{"scalar", closed},
                          {"ricci_eigenvalues", ricci_closed},
                          {"scalar_delta", scalar_delta},
                          {"ricci_delta", ricci_delta}};
    kv.push_back({"closed_form_scalar_delta", format_double(scalar_delta)});
    kv.push_back({"closed_form_ricci_delta", format_double(ricci_delta)});
  }
  doc["invariants_ok"] = o.invariants_ok;
  o.body = gl.format == "csv" ? key_value_csv(kv) : dump(doc);
  o.summary = "scalar = " + format_double(rep.scalar) +
              ", einstein_deviation = " + format_double(rep.einstein_deviation);
  return o;
}

// ---- sweep ----------------------------------------------------------------

Outcome cmd_sweep(const Globals& gl, const Range& s, const Range& t) {
  const std::vector<SweepRow> rows = run_sweep(s, t);
  Outcome o;
  if (gl.format == "csv") {
    std::ostringstream os;
    write_sweep_csv(os, rows);
    o.body = os.str();
  } else {
    o.body = dump(sweep_to_json(rows));
  }
  o.summary = std::to_string(rows.size()) + " rows";
  return o;
}

// ---- criterion ------------------------------------------------------------

Outcome cmd_criterion(const Globals& gl, const MetricSpec& g, const MetricSpec& h) {
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (g.frame.c(k, i, j) != h.frame.c(k, i, j))
          throw Error(ErrorKind::InvalidParams, "g and h must be given on the same frame");
  const double rg = curvature_report(g.frame, g.metric).scalar;
  const double rh = curvature_report(h.frame, h.metric).scalar;
  const CriterionReport rep = theorem1_check(g.metric, rg, h.metric, rh);

  Outcome o;
  json doc = to_json(rep);
  doc["scalar_g"] = rg;
  doc["scalar_h"] = rh;
  if (gl.format == "csv") {
    o.body = key_value_csv({{"verdict", to_string(rep.verdict)},
                            {"gamma", format_double(rep.gamma)},
                            {"min_eig", format_double(rep.min_eig)},
                            {"strict_margin", format_double(rep.strict_margin)},
                            {"scalar_g", format_double(rg)},
                            {"scalar_h", format_double(rh)}});
  } else {
    o.body = dump(doc);
  }
  o.summary = std::string(to_string(rep.verdict)) + ", min_eig = " + format_double(rep.min_eig) +
              ", gamma = " + format_double(rep.gamma);
  return o;
}

// ---- yamabe ---------------------------------------------------------------

struct YamabeArgs {
  int resolution = 32;
  EstimatorOptions opts;
  std::string dump_path;
};

Outcome cmd_yamabe(const Globals& gl, const MetricSpec& spec, YamabeArgs args) {
  args.opts.seed = gl.seed;
  const MetricField metric = hemisphere_metric(spec, args.resolution);
  const double scalar = curvature_report(spec.frame, spec.metric).scalar;
  const ScalarField r = ScalarField::constant(metric.grid(), scalar);
  const QuotientEstimate est = estimate(metric, r, args.opts);
  const EnergyReport energy = einstein_hilbert(metric, r);

  Outcome o;
  for (std::size_t n = 1; n < est.trace.size(); ++n)
    o.invariants_ok = o.invariants_ok && est.trace[n] <= est.trace[n - 1];
  o.invariants_ok = o.invariants_ok && est.value <= energy.energy + 1e-12 * std::abs(energy.energy);

  if (!args.dump_path.empty()) {
    std::ofstream f(args.dump_path);
    if (!f) throw Error(ErrorKind::InvalidParams, "cannot write '" + args.dump_path + "'");
    write_grid_csv(f, metric.grid(), {"minimizer"}, {&est.minimizer});
  }

  if (gl.format == "csv") {
    std::string s = "iteration,value\n";
    for (std::size_t n = 0; n < est.trace.size(); ++n)
      s += std::to_string(n) + "," + format_double(est.trace[n]) + "\n";
    o.body = s;
  } else {
    json doc = to_json(est);
    doc["energy"] = energy.energy;
    doc["volume"] = energy.volume;
    doc["scalar"] = scalar;
    doc["resolution"] = args.resolution;
    doc["minimizer_normalized_std"] = normalized_std(est.minimizer, metric);
    doc["invariants_ok"] = o.invariants_ok;
    o.body = dump(doc);
  }
  o.summary = "value = " + format_double(est.value) + ", energy = " + format_double(energy.energy) +
              (est.converged ? ", converged" : ", not converged");
  return o;
}

// ---- pathcheck ------------------------------------------------------------

Outcome cmd_pathcheck(const Globals& gl, double s, double t_start, double t_end, int steps) {
  const PathReport rep = corollary_path_check(berger_path(s), t_start, t_end, steps);
  Outcome o;
  o.invariants_ok = rep.delta >= 0.0;
  if (gl.format == "csv") {
    std::string body = "parameter,R,min_eig,gamma,verdict\n";
    for (const auto& p : rep.samples)
      body += format_double(p.parameter) + "," + format_double(p.scalar) + "," + format_double(p.min_eig) +
              "," + format_double(p.gamma) + "," + to_string(p.verdict) + "\n";
    o.body = body;
  } else {
    json doc = to_json(rep);
    doc["s"] = s;
    o.body = dump(doc);
  }
  o.summary = "delta = " + format_double(rep.delta) + ", endpoint R = " + format_double(rep.endpoint_scalar);
  return o;
}

// ---- dump-grid ------------------------------------------------------------

ScalarField named_field(const std::string& name, const MetricField& metric, double scalar) {
  const HopfGrid& grid = metric.grid();
  std::vector<double> v(grid.size());
  static const std::array<const char*, 3> axes{"eta", "xi1", "xi2"};
  for (int a = 0; a < 3; ++a)
    for (int b = a; b < 3; ++b)
      if (name == std::string("g_") + axes[a] + "_" + axes[b]) {
        for (std::size_t n = 0; n < v.size(); ++n) v[n] = metric.g(n)(a, b);
        return ScalarField(grid, std::move(v));
      }
  if (name == "sqrt_det") {
    for (std::size_t n = 0; n < v.size(); ++n) v[n] = metric.sqrt_det(n);
  } else if (name == "weight") {
    for (std::size_t n = 0; n < v.size(); ++n) v[n] = metric.weight(n);
  } else if (name == "scalar") {
    std::fill(v.begin(), v.end(), scalar);
  } else {
    throw Error(ErrorKind::InvalidParams,
                "unknown field '" + name + "' (expected sqrt_det, weight, scalar or g_<a>_<b>)");
  }
  return ScalarField(grid, std::move(v));
}

Outcome cmd_dump_grid(const Globals& gl, const MetricSpec& spec, int resolution,
                      const std::vector<std::string>& names, bool boundary) {
  const MetricField metric = hemisphere_metric(spec, resolution);
  Outcome o;
  if (boundary) {
    const BoundaryFormReport rep = boundary_second_form(metric);
    if (gl.format == "csv") {
      std::string body = "side,eta,xi2,mean_curvature,second_form_norm,angle_to_v1\n";
      for (const auto& f : rep.faces)
        body += std::to_string(f.side) + "," + format_double(f.eta) + "," + format_double(f.xi2) + "," +
                format_double(f.mean_curvature) + "," + format_double(f.second_form_norm) + "," +
                format_double(f.angle_to_v1) + "\n";
      o.body = body;
    } else {
      json faces = json::array();
      for (const auto& f : rep.faces)
        faces.push_back({{"side", f.side},
                         {"eta", f.eta},
                         {"xi2", f.xi2},
                         {"mean_curvature", f.mean_curvature},
                         {"second_form_norm", f.second_form_norm},
                         {"angle_to_v1", f.angle_to_v1}});
      o.body = dump({{"excluded_faces", rep.excluded_faces},
                     {"max_abs_mean_curvature", rep.max_abs_mean_curvature},
                     {"max_second_form_norm", rep.max_second_form_norm},
                     {"min_second_form_norm", rep.min_second_form_norm},
                     {"faces", std::move(faces)}});
    }
    o.summary = "max |H| = " + format_double(rep.max_abs_mean_curvature) +
                ", max |II| = " + format_double(rep.max_second_form_norm);
    return o;
  }

  const double scalar = curvature_report(spec.frame, spec.metric).scalar;
  std::vector<ScalarField> fields;
  for (const auto& n : names) fields.push_back(named_field(n, metric, scalar));
  std::vector<const ScalarField*> ptrs;
  for (const auto& f : fields) ptrs.push_back(&f);
  if (gl.format == "csv") {
    std::ostringstream os;
    write_grid_csv(os, metric.grid(), names, ptrs);
    o.body = os.str();
  } else {
    o.body = dump(grid_to_json(metric.grid(), names, ptrs));
  }
  o.summary = std::to_string(metric.grid().size()) + " cells";
  return o;
}

}  // namespace

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NumericalFailure:
    case ErrorKind::InternalConsistency:
      return kExitNumerical;
    default:
      return kExitInvalidInput;
  }
}

MetricSpec parse_geometry(const std::string& text) {
  if (text == "round" || text == "round-hemisphere") return berger_spec(BergerParams::make(1.0, 1.0));
  const std::string berger = "berger:";
  if (text.rfind(berger, 0) == 0) {
    const auto parts = split(text.substr(berger.size()), ',');
    if (parts.size() != 2) throw Error(ErrorKind::InvalidParams, "expected berger:S,T, got '" + text + "'");
    return berger_spec(BergerParams::make(parse_number(parts[0], "berger s"), parse_number(parts[1], "berger t")));
  }
  const std::string spec = "spec:";
  if (text.rfind(spec, 0) == 0) return read_metric_spec(text.substr(spec.size()));
  if (text.size() > 5 && text.substr(text.size() - 5) == ".json") return read_metric_spec(text);
  throw Error(ErrorKind::InvalidParams,
              "unknown geometry '" + text + "' (expected round, berger:S,T, spec:PATH or a .json path)");
}

std::vector<double> Range::values() const {
  std::vector<double> v(count);
  for (int m = 0; m < count; ++m)
    v[m] = count == 1 ? first : (m + 1 == count ? last : first + (last - first) * m / (count - 1));
  return v;
}

Range parse_range(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) throw Error(ErrorKind::InvalidParams, "range '" + text + "' is not of the form a:b:n");
  Range r;
  r.first = parse_number(parts[0], "range start");
  r.last = parse_number(parts[1], "range end");
  const double n = parse_number(parts[2], "range count");
  if (n != std::floor(n) || n < 1 || n > 1e7)
    throw Error(ErrorKind::InvalidParams, "range count in '" + text + "' must be a positive integer");
  r.count = static_cast<int>(n);
  if (r.count == 1 ? r.first != r.last : !(r.first < r.last))
    throw Error(ErrorKind::InvalidParams,
                "range '" + text + "' needs a < b with n >= 2, or a = b with n = 1");
  return r;
}

std::vector<SweepRow> run_sweep(const Range& s, const Range& t) {
  const std::vector<double> sv = s.values();
  const std::vector<double> tv = t.values();
  std::vector<SweepRow> rows(sv.size() * tv.size());
  for (std::size_t a = 0; a < sv.size(); ++a)
    for (std::size_t b = 0; b < tv.size(); ++b) {
      rows[a * tv.size() + b].s = sv[a];
      rows[a * tv.size() + b].t = tv[b];
    }

  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(), rows.size()));
  const std::size_t chunk = (rows.size() + workers - 1) / workers;
  std::vector<std::future<void>> jobs;
  for (std::size_t w = 0; w < workers; ++w)
    jobs.push_back(std::async(std::launch::async, [&rows, w, chunk] {
      const std::size_t end = std::min(rows.size(), (w + 1) * chunk);
      for (std::size_t n = w * chunk; n < end; ++n)
        if (rows[n].s >= 1.0 && rows[n].s <= rows[n].t)
          rows[n].result = berger_classify(BergerParams::make(rows[n].s, rows[n].t));
    }));
  for (auto& j : jobs) j.get();
  return rows;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Relative Yamabe metrics on the Berger hemisphere"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals gl;
  app.add_option("--out", gl.out_path, "Write the report to PATH instead of stdout");
  app.add_option("--format", gl.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--seed", gl.seed, "Seed for randomized trial functions");
  app.add_flag("--quiet", gl.quiet, "Suppress the summary line on stderr");

  double s = 1.0, t = 1.0;
  std::string geometry, spec_path;

  auto* curvature = app.add_subcommand("curvature", "Curvature of a left-invariant metric");
  curvature->add_option("--s", s, "Berger parameter s");
  curvature->add_option("--t", t, "Berger parameter t");
  curvature->add_option("--spec", spec_path, "Metric-spec JSON file");
  curvature->add_option("--geometry", geometry, "round | berger:S,T | spec:PATH");

  std::string s_range, t_range;
  auto* sweep = app.add_subcommand("sweep", "Classify a grid of Berger metrics");
  sweep->add_option("--s", s_range, "Range a:b:n")->required();
  sweep->add_option("--t", t_range, "Range a:b:n")->required();

  std::string g_text, h_text;
  auto* criterion = app.add_subcommand("criterion", "Compare two metrics on one frame");
  criterion->set_help_flag("--help", "Print this help message and exit");
  criterion->add_option("--g", g_text, "Reference metric (round | berger:S,T | spec:PATH)")->required();
  criterion->add_option("--h", h_text, "Compared metric (round | berger:S,T | spec:PATH)")->required();

  YamabeArgs yargs;
  auto* yamabe = app.add_subcommand("yamabe", "Estimate the relative Yamabe constant on the hemisphere");
  yamabe->add_option("--geometry", geometry, "round-hemisphere | berger:S,T | spec:PATH");
  yamabe->add_option("--s", s, "Berger parameter s");
  yamabe->add_option("--t", t, "Berger parameter t");
  yamabe->add_option("--spec", spec_path, "Metric-spec JSON file");
  yamabe->add_option("--resolution", yargs.resolution, "Cells per axis")->check(CLI::Range(4, 1024));
  yamabe->add_option("--max-iters", yargs.opts.max_iters, "Iterations per restart");
  yamabe->add_option("--restarts", yargs.opts.restarts, "Number of restarts");
  yamabe->add_option("--tol", yargs.opts.tol, "Relative stall tolerance");
  yamabe->add_option("--step", yargs.opts.step, "Initial step");
  yamabe->add_option("--dump", yargs.dump_path, "Write the minimizer as grid CSV");

  double t_start = 0.0, t_end = 0.0;
  int steps = 100;
  auto* pathcheck = app.add_subcommand("pathcheck", "Check a Berger deformation path ending at R = 0");
  pathcheck->add_option("--s", s, "Berger parameter s")->required();
  pathcheck->add_option("--t-start", t_start, "Path start")->required();
  pathcheck->add_option("--t-end", t_end, "Path end (R = 0)")->required();
  pathcheck->add_option("--steps", steps, "Number of intervals")->check(CLI::PositiveNumber);

  int resolution = 16;
  std::vector<std::string> fields{"sqrt_det", "weight"};
  bool boundary = false;
  auto* dump_grid = app.add_subcommand("dump-grid", "Dump chart fields at cell centers");
  dump_grid->add_option("--geometry", geometry, "round | berger:S,T | spec:PATH");
  dump_grid->add_option("--s", s, "Berger parameter s");
  dump_grid->add_option("--t", t, "Berger parameter t");
  dump_grid->add_option("--spec", spec_path, "Metric-spec JSON file");
  dump_grid->add_option("--resolution", resolution, "Cells per axis")->check(CLI::Range(4, 512));
  dump_grid->add_option("--fields", fields, "sqrt_det, weight, scalar, g_<a>_<b>")->delimiter(',');
  dump_grid->add_flag("--boundary", boundary, "Dump boundary mean curvature and |II| instead");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitInvalidInput;
  }

  auto given = [](CLI::App* sub, const char* name) { return sub->count(name) > 0; };

  try {
    Outcome o;
    if (*curvature) {
      o = cmd_curvature(gl, geometry_from(geometry, spec_path, s, t, given(curvature, "--s"),
                                          given(curvature, "--t")));
    } else if (*sweep) {
      o = cmd_sweep(gl, parse_range(s_range), parse_range(t_range));
    } else if (*criterion) {
      o = cmd_criterion(gl, parse_geometry(g_text), parse_geometry(h_text));
    } else if (*yamabe) {
      o = cmd_yamabe(gl, geometry_from(geometry, spec_path, s, t, given(yamabe, "--s"), given(yamabe, "--t")),
                     yargs);
    } else if (*pathcheck) {
      o = cmd_pathcheck(gl, s, t_start, t_end, steps);
    } else if (*dump_grid) {
      o = cmd_dump_grid(gl, geometry_from(geometry, spec_path, s, t, given(dump_grid, "--s"),
                                          given(dump_grid, "--t")),
                        resolution, fields, boundary);
    }

    if (gl.out_path.empty()) {
      out << o.body;
    } else {
      std::ofstream f(gl.out_path, std::ios::binary);
      if (!f) throw Error(ErrorKind::InvalidParams, "cannot write '" + gl.out_path + "'");
      f << o.body;
    }
    if (!gl.quiet) err << o.summary << '\n';
    if (!o.invariants_ok) {
      err << "error: internal invariant check failed\n";
      return kExitNumerical;
    }
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"relyamabe"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace relyamabe
