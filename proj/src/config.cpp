#include "sgdlab/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sgdlab/errors.hpp"

namespace sgdlab {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& pointer, const std::string& message) {
  throw ConfigError(pointer, "config error at " + pointer + ": " + message);
}

void require_object(const json& j, const std::string& ptr) {
  if (!j.is_object()) fail(ptr, "expected an object");
}

void reject_unknown_keys(const json& j, const std::string& ptr,
                         std::initializer_list<const char*> allowed) {
  const std::set<std::string> allow(allowed.begin(), allowed.end());
  for (const auto& item : j.items()) {
    if (allow.find(item.key()) == allow.end())
      fail(ptr + "/" + item.key(), "unknown key");
  }
}

double get_double(const json& j, const std::string& ptr) {
  if (!j.is_number()) fail(ptr, "expected a number");
  return j.get<double>();
}

std::int64_t get_int(const json& j, const std::string& ptr) {
  if (!j.is_number_integer()) fail(ptr, "expected an integer");
  return j.get<std::int64_t>();
}

std::string get_string(const json& j, const std::string& ptr) {
  if (!j.is_string()) fail(ptr, "expected a string");
  return j.get<std::string>();
}

Vector get_vector(const json& j, const std::string& ptr) {
  if (!j.is_array() || j.empty()) fail(ptr, "expected a nonempty array of numbers");
  Vector v(static_cast<int>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) fail(ptr + "/" + std::to_string(i), "expected a number");
    v[static_cast<int>(i)] = j[i].get<double>();
  }
  return v;
}

std::vector<double> get_grid(const json& j, const std::string& ptr, bool decreasing) {
  if (!j.is_array() || j.empty()) fail(ptr, "expected a nonempty array of numbers");
  std::vector<double> grid;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) fail(ptr + "/" + std::to_string(i), "expected a number");
    const double v = j[i].get<double>();
    if (!(v > 0.0)) fail(ptr + "/" + std::to_string(i), "must be > 0");
    if (decreasing && !grid.empty() && !(v < grid.back()))
      fail(ptr + "/" + std::to_string(i), "grid must be strictly decreasing");
    grid.push_back(v);
  }
  return grid;
}

Matrix get_matrix(const json& j, const std::string& ptr) {
  if (!j.is_array() || j.empty()) fail(ptr, "expected a nonempty array of rows");
  const std::size_t rows = j.size();
  std::size_t cols = 0;
  Matrix m;
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].empty())
      fail(ptr + "/" + std::to_string(r), "expected a nonempty row of numbers");
    if (r == 0) {
      cols = j[r].size();
      m.resize(static_cast<int>(rows), static_cast<int>(cols));
    } else if (j[r].size() != cols) {
      fail(ptr + "/" + std::to_string(r), "rows must have equal length");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number())
        fail(ptr + "/" + std::to_string(r) + "/" + std::to_string(c), "expected a number");
      m(static_cast<int>(r), static_cast<int>(c)) = j[r][c].get<double>();
    }
  }
  return m;
}

ProblemConfig parse_problem(const json& j) {
  const std::string ptr = "/problem";
  require_object(j, ptr);
  reject_unknown_keys(j, ptr, {"family", "quadratic", "logistic"});
  if (!j.contains("family")) fail(ptr + "/family", "missing required field");
  const std::string family = get_string(j["family"], ptr + "/family");

  ProblemConfig cfg;
  if (family == "quadratic") {
    cfg.family = ProblemFamily::quadratic;
    if (!j.contains("quadratic")) fail(ptr + "/quadratic", "missing required field");
    const json& q = j["quadratic"];
    require_object(q, ptr + "/quadratic");
    reject_unknown_keys(q, ptr + "/quadratic", {"centers", "curvatures"});
    if (!q.contains("centers")) fail(ptr + "/quadratic/centers", "missing required field");
    const json& centers = q["centers"];
    if (!centers.is_array() || centers.empty())
      fail(ptr + "/quadratic/centers", "expected a nonempty array of points");
    for (std::size_t i = 0; i < centers.size(); ++i)
      cfg.centers.push_back(
          get_vector(centers[i], ptr + "/quadratic/centers/" + std::to_string(i)));
    if (q.contains("curvatures")) {
      const json& curv = q["curvatures"];
      if (!curv.is_array() || curv.size() != centers.size())
        fail(ptr + "/quadratic/curvatures", "need one matrix per center");
      for (std::size_t i = 0; i < curv.size(); ++i)
        cfg.curvatures.push_back(
            get_matrix(curv[i], ptr + "/quadratic/curvatures/" + std::to_string(i)));
    }
  } else if (family == "logistic") {
    cfg.family = ProblemFamily::logistic;
    if (!j.contains("logistic")) fail(ptr + "/logistic", "missing required field");
    const json& l = j["logistic"];
    require_object(l, ptr + "/logistic");
    reject_unknown_keys(l, ptr + "/logistic", {"dataset", "features", "labels", "ridge"});
    if (l.contains("ridge")) {
      cfg.ridge = get_double(l["ridge"], ptr + "/logistic/ridge");
      if (!(cfg.ridge >= 0.0)) fail(ptr + "/logistic/ridge", "must be >= 0");
    }
    if (l.contains("dataset")) {
      if (l.contains("features") || l.contains("labels"))
        fail(ptr + "/logistic", "give either dataset or inline features/labels, not both");
      cfg.dataset_path = get_string(l["dataset"], ptr + "/logistic/dataset");
    } else {
      if (!l.contains("features")) fail(ptr + "/logistic/features", "missing required field");
      if (!l.contains("labels")) fail(ptr + "/logistic/labels", "missing required field");
      const json& feats = l["features"];
      if (!feats.is_array() || feats.empty())
        fail(ptr + "/logistic/features", "expected a nonempty array of rows");
      for (std::size_t i = 0; i < feats.size(); ++i)
        cfg.features.push_back(
            get_vector(feats[i], ptr + "/logistic/features/" + std::to_string(i)));
      const json& labels = l["labels"];
      if (!labels.is_array() || labels.size() != feats.size())
        fail(ptr + "/logistic/labels", "need one label per feature row");
      for (std::size_t i = 0; i < labels.size(); ++i) {
        const double y = get_double(labels[i], ptr + "/logistic/labels/" + std::to_string(i));
        if (y != -1.0 && y != 1.0)
          fail(ptr + "/logistic/labels/" + std::to_string(i), "labels must be -1 or +1");
        cfg.labels.push_back(y);
      }
    }
  } else {
    fail(ptr + "/family", "must be 'quadratic' or 'logistic'");
  }
  return cfg;
}

ProcessConfig parse_process(const json& j) {
  const std::string ptr = "/process";
  ProcessConfig cfg;
  require_object(j, ptr);
  reject_unknown_keys(j, ptr, {"stepper", "eta", "eta_bar", "x0", "horizon_steps", "stride"});
  if (j.contains("stepper")) {
    const std::string s = get_string(j["stepper"], ptr + "/stepper");
    if (s == "plain_sgd") cfg.stepper = ProcessKind::plain_sgd;
    else if (s == "frozen_noise_sgd") cfg.stepper = ProcessKind::frozen_noise_sgd;
    else if (s == "gaussian_sgd") cfg.stepper = ProcessKind::gaussian_sgd;
    else fail(ptr + "/stepper", "must be plain_sgd, frozen_noise_sgd or gaussian_sgd");
  }
  if (j.contains("eta")) {
    cfg.eta = get_double(j["eta"], ptr + "/eta");
    if (!(cfg.eta > 0.0) || cfg.eta > 1.0) fail(ptr + "/eta", "must be in (0, 1]");
  }
  if (j.contains("eta_bar")) {
    cfg.eta_bar = get_double(j["eta_bar"], ptr + "/eta_bar");
    if (!(cfg.eta_bar > 0.0) || cfg.eta_bar > 1.0) fail(ptr + "/eta_bar", "must be in (0, 1]");
  }
  if (j.contains("x0")) cfg.x0 = get_vector(j["x0"], ptr + "/x0");
  if (j.contains("horizon_steps")) {
    cfg.horizon_steps = get_int(j["horizon_steps"], ptr + "/horizon_steps");
    if (cfg.horizon_steps < 0) fail(ptr + "/horizon_steps", "must be >= 0");
  }
  if (j.contains("stride")) {
    cfg.stride = get_int(j["stride"], ptr + "/stride");
    if (cfg.stride < 1) fail(ptr + "/stride", "must be >= 1");
  }
  return cfg;
}

SdeConfig parse_sde(const json& j) {
  const std::string ptr = "/sde";
  SdeConfig cfg;
  require_object(j, ptr);
  reject_unknown_keys(j, ptr, {"dt", "horizon_time", "ensemble_replicates"});
  if (j.contains("dt")) {
    cfg.dt = get_double(j["dt"], ptr + "/dt");
    if (!(cfg.dt > 0.0) || cfg.dt > 0.1) fail(ptr + "/dt", "must be in (0, 0.1]");
  }
  if (j.contains("horizon_time")) {
    cfg.horizon_time = get_double(j["horizon_time"], ptr + "/horizon_time");
    if (!(cfg.horizon_time >= 0.0)) fail(ptr + "/horizon_time", "must be >= 0");
  }
  if (j.contains("ensemble_replicates")) {
    cfg.ensemble_replicates = get_int(j["ensemble_replicates"], ptr + "/ensemble_replicates");
    if (cfg.ensemble_replicates < 0) fail(ptr + "/ensemble_replicates", "must be >= 0");
  }
  return cfg;
}

DiagnosticsConfig parse_diagnostics(const json& j) {
  const std::string ptr = "/diagnostics";
  DiagnosticsConfig cfg;
  require_object(j, ptr);
  reject_unknown_keys(j, ptr,
                      {"point", "delta", "replicates", "eta_grid", "eta_bar_grid",
                       "moment_eta_grid", "test_function", "time", "grid_radius",
                       "grid_points_per_axis", "fd_step", "weak_error_method", "tolerances"});
  if (j.contains("point")) cfg.point = get_vector(j["point"], ptr + "/point");
  if (j.contains("delta")) {
    cfg.delta = get_double(j["delta"], ptr + "/delta");
    if (!(cfg.delta > 0.0)) fail(ptr + "/delta", "must be > 0");
  }
  if (j.contains("replicates")) {
    cfg.replicates = get_int(j["replicates"], ptr + "/replicates");
    if (cfg.replicates < 1) fail(ptr + "/replicates", "must be >= 1");
  }
  if (j.contains("eta_grid")) cfg.eta_grid = get_grid(j["eta_grid"], ptr + "/eta_grid", true);
  if (j.contains("eta_bar_grid"))
    cfg.eta_bar_grid = get_grid(j["eta_bar_grid"], ptr + "/eta_bar_grid", true);
  if (j.contains("moment_eta_grid"))
    cfg.moment_eta_grid = get_grid(j["moment_eta_grid"], ptr + "/moment_eta_grid", true);
  if (j.contains("test_function")) {
    cfg.test_function = get_string(j["test_function"], ptr + "/test_function");
    if (cfg.test_function != "identity" && cfg.test_function != "square" &&
        cfg.test_function != "constant")
      fail(ptr + "/test_function", "must be identity, square or constant");
  }
  if (j.contains("time")) {
    cfg.time = get_double(j["time"], ptr + "/time");
    if (!(cfg.time > 0.0)) fail(ptr + "/time", "must be > 0");
  }
  if (j.contains("grid_radius")) {
    cfg.grid_radius = get_double(j["grid_radius"], ptr + "/grid_radius");
    if (!(cfg.grid_radius > 0.0)) fail(ptr + "/grid_radius", "must be > 0");
  }
  if (j.contains("grid_points_per_axis")) {
    cfg.grid_points_per_axis =
        static_cast<int>(get_int(j["grid_points_per_axis"], ptr + "/grid_points_per_axis"));
    if (cfg.grid_points_per_axis < 2) fail(ptr + "/grid_points_per_axis", "must be >= 2");
  }
  if (j.contains("fd_step")) {
    cfg.fd_step = get_double(j["fd_step"], ptr + "/fd_step");
    if (!(cfg.fd_step >= 0.0)) fail(ptr + "/fd_step", "must be >= 0 (0 = auto)");
  }
  if (j.contains("weak_error_method")) {
    cfg.weak_error_method = get_string(j["weak_error_method"], ptr + "/weak_error_method");
    if (cfg.weak_error_method != "closed_form" && cfg.weak_error_method != "hybrid" &&
        cfg.weak_error_method != "monte_carlo")
      fail(ptr + "/weak_error_method", "must be closed_form, hybrid or monte_carlo");
  }
  if (j.contains("tolerances")) {
    const json& t = j["tolerances"];
    const std::string tptr = ptr + "/tolerances";
    require_object(t, tptr);
    reject_unknown_keys(t, tptr,
                        {"weak_slope_min", "weak_slope_max", "moment_slope_margin",
                         "drift_ci_multiple", "diffusion_se_multiple",
                         "distribution_floor_multiple", "curvature_richardson_rel"});
    const auto positive = [&](const char* key, double& target) {
      if (t.contains(key)) {
        target = get_double(t[key], tptr + "/" + key);
        if (!(target >= 0.0)) fail(tptr + "/" + key, "must be >= 0");
      }
    };
    positive("weak_slope_min", cfg.weak_slope_min);
    positive("weak_slope_max", cfg.weak_slope_max);
    positive("moment_slope_margin", cfg.moment_slope_margin);
    positive("drift_ci_multiple", cfg.drift_ci_multiple);
    positive("diffusion_se_multiple", cfg.diffusion_se_multiple);
    positive("distribution_floor_multiple", cfg.distribution_floor_multiple);
    positive("curvature_richardson_rel", cfg.curvature_richardson_rel);
  }
  return cfg;
}

// slope window defaults depend on whether Monte Carlo noise is involved
void resolve_slope_window(DiagnosticsConfig& cfg) {
  if (std::isnan(cfg.weak_slope_min))
    cfg.weak_slope_min = cfg.weak_error_method == "closed_form" ? 0.9 : 0.7;
  if (std::isnan(cfg.weak_slope_max))
    cfg.weak_slope_max = cfg.weak_error_method == "closed_form" ? 1.1 : 1.3;
  if (!(cfg.weak_slope_min <= cfg.weak_slope_max))
    fail("/diagnostics/tolerances/weak_slope_min", "slope window is empty");
}

}  // namespace

FiniteSumProblem ExperimentConfig::build_problem() const {
  if (problem.family == ProblemFamily::quadratic) {
    return FiniteSumProblem::quadratic({problem.centers, problem.curvatures});
  }
  if (!problem.dataset_path.empty()) {
    LogisticFamilySpec spec = load_logistic_dataset(problem.dataset_path);
    spec.ridge = problem.ridge;
    return FiniteSumProblem::logistic(std::move(spec));
  }
  return FiniteSumProblem::logistic({problem.features, problem.labels, problem.ridge});
}

ExperimentConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& ex) {
    throw ConfigError("", std::string("config is not valid JSON: ") + ex.what());
  }
  require_object(j, "");
  reject_unknown_keys(j, "", {"problem", "process", "sde", "diagnostics", "seed", "output_dir"});
  if (!j.contains("problem")) fail("/problem", "missing required field");

  ExperimentConfig cfg;
  cfg.problem = parse_problem(j["problem"]);
  if (j.contains("process")) cfg.process = parse_process(j["process"]);
  if (j.contains("sde")) cfg.sde = parse_sde(j["sde"]);
  if (j.contains("diagnostics")) cfg.diagnostics = parse_diagnostics(j["diagnostics"]);
  resolve_slope_window(cfg.diagnostics);
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer())
      fail("/seed", "expected an unsigned integer");
    if (j["seed"].is_number_integer() && j["seed"].get<std::int64_t>() < 0)
      fail("/seed", "must be >= 0");
    cfg.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("output_dir")) cfg.output_dir = get_string(j["output_dir"], "/output_dir");

  // dimension-dependent defaults and cross-field checks
  const FiniteSumProblem built = cfg.build_problem();
  const int d = built.dimension();
  if (cfg.process.x0.size() == 0) cfg.process.x0 = Vector::Zero(d);
  if (static_cast<int>(cfg.process.x0.size()) != d)
    fail("/process/x0", "dimension must match the problem (" + std::to_string(d) + ")");
  if (cfg.diagnostics.point.size() == 0) cfg.diagnostics.point = Vector::Zero(d);
  if (static_cast<int>(cfg.diagnostics.point.size()) != d)
    fail("/diagnostics/point", "dimension must match the problem (" + std::to_string(d) + ")");
  return cfg;
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) throw ConfigError("", "cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

namespace {

json vector_to_json(const Vector& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json matrix_to_json(const Matrix& m) {
  json out = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(row);
  }
  return out;
}

}  // namespace

nlohmann::json ExperimentConfig::to_json() const {
  json j;
  json p;
  if (problem.family == ProblemFamily::quadratic) {
    p["family"] = "quadratic";
    json q;
    q["centers"] = json::array();
    for (const Vector& c : problem.centers) q["centers"].push_back(vector_to_json(c));
    if (!problem.curvatures.empty()) {
      q["curvatures"] = json::array();
      for (const Matrix& a : problem.curvatures) q["curvatures"].push_back(matrix_to_json(a));
    }
    p["quadratic"] = q;
  } else {
    p["family"] = "logistic";
    json l;
    if (!problem.dataset_path.empty()) {
      l["dataset"] = problem.dataset_path;
    } else {
      l["features"] = json::array();
      for (const Vector& a : problem.features) l["features"].push_back(vector_to_json(a));
      l["labels"] = problem.labels;
    }
    l["ridge"] = problem.ridge;
    p["logistic"] = l;
  }
  j["problem"] = p;

  j["process"] = {{"stepper", process_kind_name(process.stepper)},
                  {"eta", process.eta},
                  {"eta_bar", process.eta_bar},
                  {"x0", vector_to_json(process.x0)},
                  {"horizon_steps", process.horizon_steps},
                  {"stride", process.stride}};
  j["sde"] = {{"dt", sde.dt},
              {"horizon_time", sde.horizon_time},
              {"ensemble_replicates", sde.ensemble_replicates}};
  j["diagnostics"] = {{"point", vector_to_json(diagnostics.point)},
                      {"delta", diagnostics.delta},
                      {"replicates", diagnostics.replicates},
                      {"eta_grid", diagnostics.eta_grid},
                      {"eta_bar_grid", diagnostics.eta_bar_grid},
                      {"moment_eta_grid", diagnostics.moment_eta_grid},
                      {"test_function", diagnostics.test_function},
                      {"time", diagnostics.time},
                      {"grid_radius", diagnostics.grid_radius},
                      {"grid_points_per_axis", diagnostics.grid_points_per_axis},
                      {"fd_step", diagnostics.fd_step},
                      {"weak_error_method", diagnostics.weak_error_method},
                      {"tolerances",
                       {{"weak_slope_min", diagnostics.weak_slope_min},
                        {"weak_slope_max", diagnostics.weak_slope_max},
                        {"moment_slope_margin", diagnostics.moment_slope_margin},
                        {"drift_ci_multiple", diagnostics.drift_ci_multiple},
                        {"diffusion_se_multiple", diagnostics.diffusion_se_multiple},
                        {"distribution_floor_multiple", diagnostics.distribution_floor_multiple},
                        {"curvature_richardson_rel", diagnostics.curvature_richardson_rel}}}};
  j["seed"] = seed;
  j["output_dir"] = output_dir;
  return j;
}

std::string config_hash_hex(const std::string& subcommand, const ExperimentConfig& config) {
  const std::string bytes = subcommand + "\n" + config.to_json().dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace sgdlab
