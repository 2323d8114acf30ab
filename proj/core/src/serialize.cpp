#include "lmipole/serialize.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "lmipole/embedded_assets.hpp"
#include "lmipole/errors.hpp"
#include "lmipole/random.hpp"

namespace lmipole::io {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw SchemaError(path + ": " + what);
}

const Json& require(const Json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) fail(path + "." + key, "missing required field");
  return *it;
}

double number(const Json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "must be finite");
  return v;
}

bool boolean(const Json& j, const std::string& path) {
  if (!j.is_boolean()) fail(path, "expected true or false");
  return j.get<bool>();
}

std::string text(const Json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

Matrix optional_matrix(const Json& j, const std::string& key, const std::string& path) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return Matrix(0, 0);
  return matrix_from_json(*it, path + "." + key);
}

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json complex_to_json(Complex z) { return Json{{"re", z.real()}, {"im", z.imag()}}; }

}  // namespace

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected a nested row array");
  if (j.empty()) return Matrix(0, 0);
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (!j.front().is_array()) fail(path + "[0]", "expected a row array");
  const auto cols = static_cast<Eigen::Index>(j.front().size());
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const std::string row_path = path + "[" + std::to_string(r) + "]";
    const Json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array()) fail(row_path, "expected a row array");
    if (static_cast<Eigen::Index>(row.size()) != cols) {
      fail(row_path, "expected " + std::to_string(cols) + " entries, got " + std::to_string(row.size()));
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = number(row[static_cast<std::size_t>(c)], row_path + "[" + std::to_string(c) + "]");
    }
  }
  return m;
}

Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Vector vector_from_json(const Json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = number(j[i], path + "[" + std::to_string(i) + "]");
  return v;
}

Json to_json(const SystemModel& sys) {
  return Json{{"A", matrix_to_json(sys.A)},     {"B1", matrix_to_json(sys.B1)},
              {"B2", matrix_to_json(sys.B2)},   {"C1", matrix_to_json(sys.C1)},
              {"D11", matrix_to_json(sys.D11)}, {"D12", matrix_to_json(sys.D12)},
              {"Qx", matrix_to_json(sys.Qx)},   {"R", matrix_to_json(sys.R)}};
}

SystemModel system_from_json(const Json& j, const std::string& path) {
  SystemModel sys;
  sys.A = matrix_from_json(require(j, "A", path), path + ".A");
  sys.B2 = matrix_from_json(require(j, "B2", path), path + ".B2");
  const auto n = sys.A.rows();
  const auto m = sys.B2.cols();
  sys.B1 = j.contains("B1") ? matrix_from_json(j["B1"], path + ".B1") : Matrix::Identity(n, n);
  sys.C1 = j.contains("C1") ? matrix_from_json(j["C1"], path + ".C1") : Matrix::Identity(n, n);
  const auto p1 = sys.C1.rows();
  const auto d = sys.B1.cols();
  sys.D11 = j.contains("D11") ? matrix_from_json(j["D11"], path + ".D11") : Matrix::Zero(p1, d);
  sys.D12 = j.contains("D12") ? matrix_from_json(j["D12"], path + ".D12") : Matrix::Zero(p1, m);
  sys.Qx = j.contains("Qx") ? matrix_from_json(j["Qx"], path + ".Qx") : Matrix::Identity(n, n);
  sys.R = j.contains("R") ? matrix_from_json(j["R"], path + ".R") : Matrix::Identity(m, m);
  try {
    sys.validate();
  } catch (const Error& e) {
    fail(path, e.what());
  }
  return sys;
}

Json to_json(const ExcitationConfig& cfg) {
  Json j{{"T", cfg.T},
         {"delta", cfg.delta},
         {"u_bound", cfg.u_bound},
         {"w_ball_radius", cfg.w_ball_radius},
         {"seed", cfg.seed},
         {"x0", cfg.x0 ? vector_to_json(*cfg.x0) : Json(nullptr)},
         {"derivatives", cfg.derivatives == DerivativeMode::kExact ? "exact" : "central_difference"}};
  return j;
}

ExcitationConfig excitation_from_json(const Json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  ExcitationConfig cfg;
  if (j.contains("T")) {
    const Json& t = j["T"];
    if (!t.is_number_integer()) fail(path + ".T", "expected an integer");
    cfg.T = t.get<int>();
  }
  if (j.contains("delta")) cfg.delta = number(j["delta"], path + ".delta");
  if (j.contains("u_bound")) cfg.u_bound = number(j["u_bound"], path + ".u_bound");
  if (j.contains("w_ball_radius")) cfg.w_ball_radius = number(j["w_ball_radius"], path + ".w_ball_radius");
  if (j.contains("seed")) {
    const Json& s = j["seed"];
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0)) {
      fail(path + ".seed", "expected a non-negative integer");
    }
    cfg.seed = s.get<std::uint64_t>();
  }
  if (j.contains("x0") && !j["x0"].is_null()) cfg.x0 = vector_from_json(j["x0"], path + ".x0");
  if (j.contains("derivatives")) {
    const std::string mode = text(j["derivatives"], path + ".derivatives");
    if (mode == "exact") {
      cfg.derivatives = DerivativeMode::kExact;
    } else if (mode == "central_difference") {
      cfg.derivatives = DerivativeMode::kCentralDifference;
    } else {
      fail(path + ".derivatives", "expected \"exact\" or \"central_difference\"");
    }
  }
  if (cfg.T < 1) fail(path + ".T", "must be at least 1");
  if (!(cfg.delta > 0.0)) fail(path + ".delta", "must be positive");
  if (!(cfg.u_bound > 0.0)) fail(path + ".u_bound", "must be positive");
  if (cfg.w_ball_radius < 0.0) fail(path + ".w_ball_radius", "must be non-negative");
  return cfg;
}

Json to_json(const LmiRegion& region) {
  switch (region.kind()) {
    case LmiRegion::Kind::kConicAlpha: return Json{{"type", "conic_alpha"}, {"alpha", region.alpha()}};
    case LmiRegion::Kind::kConicTheta: return Json{{"type", "conic_theta"}, {"theta", region.theta()}};
    case LmiRegion::Kind::kGeneral: break;
  }
  return Json{{"type", "general"},
              {"alpha_mat", matrix_to_json(region.alpha_mat())},
              {"beta_mat", matrix_to_json(region.beta_mat())}};
}

LmiRegion region_from_json(const Json& j, const std::string& path) {
  const std::string type = text(require(j, "type", path), path + ".type");
  try {
    if (type == "conic_alpha") {
      return LmiRegion::conic_alpha(number(require(j, "alpha", path), path + ".alpha"));
    }
    if (type == "conic_theta") {
      return LmiRegion::conic_theta(number(require(j, "theta", path), path + ".theta"));
    }
    if (type == "general") {
      LmiRegion r = LmiRegion::general(matrix_from_json(require(j, "alpha_mat", path), path + ".alpha_mat"),
                                       matrix_from_json(require(j, "beta_mat", path), path + ".beta_mat"));
      if (!r.is_nonempty()) fail(path, "region is empty");
      return r;
    }
  } catch (const SchemaError&) {
    throw;
  } catch (const Error& e) {
    const std::string what = e.what();
    if (what.rfind("region.", 0) == 0) {
      const auto colon = what.find(':');
      fail(path + what.substr(6, colon - 6), what.substr(colon + 2));
    }
    fail(path, what);
  }
  fail(path + ".type", "expected conic_alpha, conic_theta or general, got '" + type + "'");
}

Json to_json(const SynthesisSpec& spec) {
  Json j{{"region", to_json(spec.region)}, {"mode", to_string(spec.mode)}};
  if (spec.mode == DesignMode::kMixedFixedGamma) j["gamma_bar"] = spec.gamma_bar;
  j["epsilon"] = spec.epsilon;
  j["literal_paper_lmis"] = spec.literal_paper_lmis;
  j["pole_constraint"] = spec.pole_constraint;
  const std::pair<const char*, const Matrix*> mats[] = {{"B1", &spec.B1},   {"C1", &spec.C1},
                                                        {"D11", &spec.D11}, {"D12", &spec.D12},
                                                        {"Qx", &spec.Qx},   {"R", &spec.R}};
  for (const auto& [key, m] : mats) {
    if (m->size() != 0) j[key] = matrix_to_json(*m);
  }
  return j;
}

SynthesisSpec spec_from_json(const Json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  SynthesisSpec spec;
  if (j.contains("region")) spec.region = region_from_json(j["region"], path + ".region");
  if (j.contains("mode")) {
    const std::string mode = text(j["mode"], path + ".mode");
    try {
      spec.mode = parse_design_mode(mode);
    } catch (const Error&) {
      fail(path + ".mode", "expected dstab_only, mixed_opt_gamma or mixed_fixed_gamma, got '" + mode + "'");
    }
  }
  if (j.contains("gamma_bar") && !j["gamma_bar"].is_null()) {
    spec.gamma_bar = number(j["gamma_bar"], path + ".gamma_bar");
  }
  if (j.contains("epsilon")) spec.epsilon = number(j["epsilon"], path + ".epsilon");
  if (j.contains("literal_paper_lmis")) {
    spec.literal_paper_lmis = boolean(j["literal_paper_lmis"], path + ".literal_paper_lmis");
  }
  if (j.contains("pole_constraint")) {
    spec.pole_constraint = boolean(j["pole_constraint"], path + ".pole_constraint");
  }
  spec.B1 = optional_matrix(j, "B1", path);
  spec.C1 = optional_matrix(j, "C1", path);
  spec.D11 = optional_matrix(j, "D11", path);
  spec.D12 = optional_matrix(j, "D12", path);
  spec.Qx = optional_matrix(j, "Qx", path);
  spec.R = optional_matrix(j, "R", path);
  if (!(spec.epsilon > 0.0)) fail(path + ".epsilon", "must be positive");
  if (spec.mode == DesignMode::kMixedFixedGamma && !(spec.gamma_bar > 0.0)) {
    fail(path + ".gamma_bar", "must be positive in mixed_fixed_gamma mode");
  }
  return spec;
}

void fill_from_model(SynthesisSpec& spec, const SystemModel& sys) {
  if (spec.B1.size() == 0) spec.B1 = sys.B1;
  if (spec.C1.size() == 0) spec.C1 = sys.C1;
  if (spec.D11.size() == 0) spec.D11 = sys.D11;
  if (spec.D12.size() == 0) spec.D12 = sys.D12;
  if (spec.Qx.size() == 0) spec.Qx = sys.Qx;
  if (spec.R.size() == 0) spec.R = sys.R;
}

Json to_json(const PersistencyReport& rep) {
  return Json{{"pass", rep.pass},
              {"rank", rep.rank},
              {"required_rank", rep.required_rank},
              {"actual_T", rep.actual_T},
              {"required_T", rep.required_T},
              {"input_hankel_rank", rep.input_hankel_rank},
              {"input_hankel_required", rep.input_hankel_required}};
}

Json to_json(const analysis::VerificationReport& rep) {
  Json poles = Json::array();
  for (const auto& p : rep.poles) {
    Json entry = complex_to_json(p.pole);
    entry["member"] = p.membership.member && !p.membership.boundary;
    entry["boundary"] = p.membership.boundary;
    entry["margin"] = p.membership.margin;
    poles.push_back(std::move(entry));
  }
  Json j{{"pass", rep.pass()},
         {"stable", rep.stable},
         {"all_members", rep.all_members},
         {"hinf_within_gamma", rep.hinf_within_gamma},
         {"h2_norm", optional_number(rep.h2_norm)},
         {"hinf_norm", optional_number(rep.hinf_norm)},
         {"gamma_claimed", optional_number(rep.gamma_claimed)},
         {"hinf_allowance", rep.hinf_allowance},
         {"hinf_tol", rep.hinf_tol},
         {"boundary_band", rep.boundary_band},
         {"region", rep.region},
         {"closed_loop_source", rep.closed_loop_source},
         {"poles", std::move(poles)},
         {"notes", rep.notes}};
  return j;
}

Json to_json(const SolverDiagnostics& diag) {
  Json blocks = Json::array();
  for (std::size_t i = 0; i < diag.block_min_eig.size(); ++i) {
    blocks.push_back(Json{{"name", i < diag.block_names.size() ? diag.block_names[i] : ""},
                          {"min_eig", diag.block_min_eig[i]}});
  }
  return Json{{"status", diag.status},
              {"message", diag.message},
              {"iterations", diag.iterations},
              {"phase1_iterations", diag.phase1_iterations},
              {"duality_measure", diag.duality_measure},
              {"epsilon", diag.epsilon},
              {"max_equality_residual", diag.max_equality_residual},
              {"blocks", std::move(blocks)}};
}

Json to_json(const Provenance& prov) {
  return Json{{"route", prov.route},
              {"mode", to_string(prov.mode)},
              {"seed", prov.seed ? Json(*prov.seed) : Json(nullptr)},
              {"rng", std::string(Rng::kGeneratorName)},
              {"data_digest", prov.data_digest}};
}

Json result_to_json(const ControllerResult& result, const SynthesisSpec& spec) {
  Json j{{"status", result.diagnostics.status},
         {"K", matrix_to_json(result.K)},
         {"X", matrix_to_json(result.X)}};
  if (spec.mode != DesignMode::kDstabOnly) j["S"] = matrix_to_json(result.S);
  if (result.gamma) j["gamma"] = *result.gamma;
  j["objective"] = result.objective;
  if (result.Q) j["Q"] = matrix_to_json(*result.Q);
  j["diagnostics"] = to_json(result.diagnostics);
  j["provenance"] = to_json(result.provenance);
  j["spec"] = to_json(spec);
  j["report"] = to_json(result.report);
  return j;
}

Json failed_result_to_json(const SynthesisSpec& spec, const std::string& route,
                           const std::string& status, const std::string& message) {
  return Json{{"status", status},
              {"K", nullptr},
              {"message", message},
              {"provenance", Json{{"route", route}, {"mode", to_string(spec.mode)}}},
              {"spec", to_json(spec)}};
}

StoredResult result_from_json(const Json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  StoredResult out;
  out.status = j.contains("status") ? text(j["status"], path + ".status") : "optimal";
  if (j.contains("K") && !j["K"].is_null()) out.K = matrix_from_json(j["K"], path + ".K");
  out.X = optional_matrix(j, "X", path);
  out.S = optional_matrix(j, "S", path);
  if (j.contains("Q") && !j["Q"].is_null()) out.Q = matrix_from_json(j["Q"], path + ".Q");
  if (j.contains("gamma") && !j["gamma"].is_null()) out.gamma = number(j["gamma"], path + ".gamma");
  out.spec = spec_from_json(require(j, "spec", path), path + ".spec");
  if (j.contains("provenance") && j["provenance"].contains("route")) {
    out.route = text(j["provenance"]["route"], path + ".provenance.route");
  }
  return out;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Json read_json_file(const std::filesystem::path& path) {
  const std::string content = read_text_file(path);
  try {
    return Json::parse(content);
  } catch (const Json::parse_error& e) {
    throw SchemaError(path.string() + ": invalid JSON (" + e.what() + ")");
  }
}

void write_text_atomic(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw Error("write failed for '" + tmp.string() + "'");
    }
  }
  std::filesystem::rename(tmp, path);
}

namespace {

void append_number(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

}  // namespace

std::string trajectory_to_csv(const Trajectory& traj) {
  const auto n = traj.n(), m = traj.m(), d = traj.d();
  std::string out = "t";
  for (Eigen::Index i = 1; i <= n; ++i) out += ",x" + std::to_string(i);
  for (Eigen::Index i = 1; i <= n; ++i) out += ",dx" + std::to_string(i);
  for (Eigen::Index i = 1; i <= m; ++i) out += ",u" + std::to_string(i);
  for (Eigen::Index i = 1; i <= d; ++i) out += ",w" + std::to_string(i);
  out += "\n";
  for (Eigen::Index k = 0; k < traj.samples(); ++k) {
    append_number(out, traj.times(k));
    auto column = [&](const Matrix& mat) {
      for (Eigen::Index i = 0; i < mat.rows(); ++i) {
        out += ",";
        append_number(out, mat(i, k));
      }
    };
    column(traj.states);
    column(traj.derivatives);
    column(traj.inputs);
    column(traj.disturbances);
    out += "\n";
  }
  return out;
}

Trajectory trajectory_from_csv(std::string_view content, const std::string& source) {
  std::vector<std::string> lines;
  {
    std::string line;
    std::istringstream in{std::string(content)};
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) lines.push_back(line);
    }
  }
  if (lines.empty()) throw SchemaError(source + ": empty file");
  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
  };
  const auto header = split(lines.front());
  if (header.empty() || header.front() != "t") throw SchemaError(source + ": header must start with 't'");
  Eigen::Index counts[4] = {0, 0, 0, 0};
  const char* prefixes[4] = {"x", "dx", "u", "w"};
  int group = 0;
  for (std::size_t c = 1; c < header.size(); ++c) {
    const std::string& name = header[c];
    bool matched = false;
    for (int g = group; g < 4 && !matched; ++g) {
      const std::string expect = prefixes[g] + std::to_string(counts[g] + 1);
      if (name == expect) {
        group = g;
        ++counts[g];
        matched = true;
      }
    }
    if (!matched) throw SchemaError(source + ": header column " + std::to_string(c + 1) + " '" + name + "' is out of order");
  }
  const auto n = counts[0], m = counts[2], d = counts[3];
  if (counts[1] != n) throw SchemaError(source + ": expected as many dx columns as x columns");
  if (n == 0) throw SchemaError(source + ": no state columns");
  const auto samples = static_cast<Eigen::Index>(lines.size() - 1);
  Trajectory traj;
  traj.times.resize(samples);
  traj.states.resize(n, samples);
  traj.derivatives.resize(n, samples);
  traj.inputs.resize(m, samples);
  traj.disturbances.resize(d, samples);
  for (Eigen::Index k = 0; k < samples; ++k) {
    const auto cells = split(lines[static_cast<std::size_t>(k + 1)]);
    const std::string where = source + ": row " + std::to_string(k + 2);
    if (cells.size() != header.size()) throw SchemaError(where + ": expected " + std::to_string(header.size()) + " cells");
    std::vector<double> values(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const std::string& s = cells[c];
      const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), values[c]);
      if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(values[c])) {
        throw SchemaError(where + ", column '" + header[c] + "': not a finite number");
      }
    }
    traj.times(k) = values[0];
    Eigen::Index col = 1;
    for (Eigen::Index i = 0; i < n; ++i) traj.states(i, k) = values[static_cast<std::size_t>(col++)];
    for (Eigen::Index i = 0; i < n; ++i) traj.derivatives(i, k) = values[static_cast<std::size_t>(col++)];
    for (Eigen::Index i = 0; i < m; ++i) traj.inputs(i, k) = values[static_cast<std::size_t>(col++)];
    for (Eigen::Index i = 0; i < d; ++i) traj.disturbances(i, k) = values[static_cast<std::size_t>(col++)];
  }
  return traj;
}

Trajectory read_trajectory_csv(const std::filesystem::path& path) {
  return trajectory_from_csv(read_text_file(path), path.string());
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char b : bytes) {
    hash ^= b;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

std::string_view reference_plant_json() { return assets::kThirdOrderPlant; }

SystemModel reference_plant() {
  return system_from_json(Json::parse(assets::kThirdOrderPlant), "reference_plant");
}

}  // namespace lmipole::io
