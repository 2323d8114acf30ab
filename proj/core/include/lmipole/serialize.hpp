#pragma once

// JSON and CSV documents exchanged by the command-line tools. Matrices are
// nested row arrays; parse errors raise SchemaError naming the field path.

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "lmipole/analysis.hpp"
#include "lmipole/data.hpp"
#include "lmipole/region.hpp"
#include "lmipole/synthesis.hpp"

namespace lmipole::io {

using Json = nlohmann::ordered_json;

Json matrix_to_json(const Matrix& m);
/// Accepts a nested row array; an empty array gives a 0 x 0 matrix.
Matrix matrix_from_json(const Json& j, const std::string& path);
Json vector_to_json(const Vector& v);
Vector vector_from_json(const Json& j, const std::string& path);

Json to_json(const SystemModel& sys);
SystemModel system_from_json(const Json& j, const std::string& path = "system");

Json to_json(const ExcitationConfig& cfg);
ExcitationConfig excitation_from_json(const Json& j, const std::string& path = "excitation");

Json to_json(const LmiRegion& region);
LmiRegion region_from_json(const Json& j, const std::string& path = "spec.region");

/// Missing matrices stay empty; see fill_from_model.
Json to_json(const SynthesisSpec& spec);
SynthesisSpec spec_from_json(const Json& j, const std::string& path = "spec");
/// Copies every design matrix the spec leaves empty from the plant.
void fill_from_model(SynthesisSpec& spec, const SystemModel& sys);

Json to_json(const PersistencyReport& rep);
Json to_json(const analysis::VerificationReport& rep);
Json to_json(const SolverDiagnostics& diag);
Json to_json(const Provenance& prov);

/// Full result document with the spec embedded under "spec".
Json result_to_json(const ControllerResult& result, const SynthesisSpec& spec);
/// Result document for a design the solver could not certify: K is null.
Json failed_result_to_json(const SynthesisSpec& spec, const std::string& route,
                           const std::string& status, const std::string& message);

struct StoredResult {
  std::string status;
  std::optional<Matrix> K;
  Matrix X, S;
  std::optional<Matrix> Q;
  std::optional<double> gamma;
  SynthesisSpec spec;
  std::string route;
};

StoredResult result_from_json(const Json& j, const std::string& path = "result");

/// Compact, stable text form (two-space indent, trailing newline).
std::string dump(const Json& j);

std::string read_text_file(const std::filesystem::path& path);
Json read_json_file(const std::filesystem::path& path);
/// Writes to a sibling temporary file and renames it over the target.
void write_text_atomic(const std::filesystem::path& path, std::string_view content);

std::string trajectory_to_csv(const Trajectory& traj);
Trajectory trajectory_from_csv(std::string_view text, const std::string& source = "trajectory");
Trajectory read_trajectory_csv(const std::filesystem::path& path);

/// 64-bit FNV-1a over raw bytes, as 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);

/// The bundled third-order reference plant.
SystemModel reference_plant();
std::string_view reference_plant_json();

}  // namespace lmipole::io
