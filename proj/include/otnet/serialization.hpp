#pragma once

#include "otnet/rate_harness.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace otnet {

using json = nlohmann::json;

/// Malformed configuration: bad syntax, unknown keys, wrong value types.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File could not be read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rounds to 12 significant digits; all metric records go through this so
/// reruns are byte-identical.
double round12(double x);
std::string format12(double x);

/// Rejects keys outside `allowed`.
void require_keys(const json& obj, const std::vector<std::string>& allowed, const std::string& where);

SourceSpec source_from_json(const json& j);
json to_json(const SourceSpec& spec);
TargetSpec target_from_json(const json& j);
json to_json(const TargetSpec& spec);
TargetFamily target_family_from_json(const json& j);
json to_json(const TargetFamily& family);
Kernel kernel_from_json(const json& j);
json to_json(const Kernel& kernel);
SolverConfig solver_from_json(const json& j, SolverConfig base = {});
json to_json(const SolverConfig& config);

/// {psi, dual_value, grad_norm, iterations, converged, atoms, weights}.
/// psi and atoms keep full precision so the solve can be reloaded exactly.
json to_json(const SolveReport& report, const DiscreteMeasure& nu);
struct LoadedSolve {
  SolveReport report;
  DiscreteMeasure nu;
};
LoadedSolve solve_report_from_json(const json& j);

/// {d, n, depth, widths, layers: [{W, b}], coeffs: [{y, m}]}, full precision.
json to_json(const BrenierNetwork& net);
BrenierNetwork network_from_json(const json& j);

/// CSV with header x0,...,x{d-1}; `precise` writes round-trip digits.
void write_points_csv(const std::filesystem::path& path, const PointSet& points, bool precise = true);
PointSet read_points_csv(const std::filesystem::path& path);

json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// FNV-1a of the compact dump, as 16 hex digits.
std::string config_hash(const json& resolved);

}  // namespace otnet
