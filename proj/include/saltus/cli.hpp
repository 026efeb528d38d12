#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "saltus/catalog.hpp"
#include "saltus/maps.hpp"

namespace saltus::cli {

struct FunctionSpec {
  std::string name;
  std::vector<double> params;
};

// kind: "additive" (X), "conjugation" (g, r) or "tangent_pair" (g; the
// additive partner uses the companion direction of g).
struct FamilySpec {
  std::string kind = "additive";
  FunctionSpec base{"tent", {}};
  FunctionSpec X{"zero", {}};
  FunctionSpec g{"zero", {}};
  FunctionSpec r{"zero", {}};
  double t_max = 0.05;
};

struct ExperimentConfig {
  std::string command;
  FamilySpec family;
  FunctionSpec observable{"monomial", {1.0}};
  std::optional<FunctionSpec> ground_truth_g;
  std::size_t grid_size = 1024;
  double tol = 1e-12;
  std::vector<double> deltas{0.02, 0.01, 0.005};
  std::vector<double> t_values{0.0};
  std::vector<double> s_deltas{1e-3};
  std::vector<double> p_values{1.0, 1.5, 2.0};
  std::vector<double> betas{0.5, 0.9};
  std::string samples;
  std::uint64_t seed = 1;
  std::size_t n_orbits = 0;
  std::size_t orbit_len = 100000;
  std::size_t burn_in = 1000;
  int n_iter = 60;
};

enum class Format { Csv, Json };

std::vector<std::string> builtin_names();
nlohmann::ordered_json builtin_config(std::string_view name);

// "builtin:NAME", a builtin NAME, or a path to a JSON file.
nlohmann::ordered_json read_config_source(std::string_view source);
ExperimentConfig parse_config(const nlohmann::ordered_json& j);
// Everything that can be checked without computing; throws ValidationError.
void validate(const ExperimentConfig& config);

// "name p1 p2 ..." or {"name": ..., "params": [...]}.
FunctionSpec parse_function(const nlohmann::ordered_json& j);
Smooth make_function(const FunctionSpec& spec);
PiecewiseExpandingMap make_map(const FunctionSpec& spec);
MapFamily make_family(const FamilySpec& spec);
// For tangent_pair: the conjugation partner of make_family.
MapFamily make_partner(const FamilySpec& spec);

struct Artifact {
  std::string filename;
  std::string content;  // bytes, written verbatim
};

struct RunOptions {
  Format format = Format::Csv;
  bool dump_matrix = false;
};

// Computes every artifact of the command in memory.
std::vector<Artifact> execute(const ExperimentConfig& config, const RunOptions& options);
std::vector<std::string> commands();

// Full command line; returns the process exit code (0, 2 or 3).
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

std::string csv_number(double v);

}  // namespace saltus::cli
