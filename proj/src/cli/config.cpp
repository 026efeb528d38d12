#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "saltus/cli.hpp"
#include "saltus/errors.hpp"
#include "saltus/response.hpp"

namespace saltus::cli {

using nlohmann::ordered_json;

namespace {

// Builtin fixtures; the subcommand supplies the command.
const ordered_json& builtins() {
  static const ordered_json table = {
      {"tent",
       {{"family", {{"kind", "additive"}, {"base", "tent"}, {"X", "zero"}}},
        {"observable", "monomial 2"},
        {"grid_size", 4096}}},
      {"tent-bump",
       {{"family", {{"kind", "additive"}, {"base", "tent"}, {"X", "bump 0.25"}}},
        {"observable", "monomial 1"},
        {"ground_truth_g", "bump 0.25"},
        {"deltas", {0.02, 0.01, 0.005}},
        {"grid_size", 4096}}},
      {"skew-1.9",
       {{"family", {{"kind", "additive"}, {"base", "skew_tent 1.9"}, {"X", "zero"}}},
        {"observable", "monomial 2"},
        {"grid_size", 4096},
        {"n_orbits", 200},
        {"orbit_len", 100000},
        {"burn_in", 1000}}},
      {"tangent-pair",
       {{"family", {{"kind", "tangent_pair"}, {"base", "skew_tent 1.9"}, {"g", "odd_cubic 0.25"}}},
        {"observable", "monomial 1"},
        {"grid_size", 4096},
        {"t_values", {0.04, 0.02, 0.01, 0.005}}}},
  };
  return table;
}

void check_keys(const ordered_json& j, const std::set<std::string>& allowed, const char* where) {
  if (!j.is_object()) throw ValidationError(std::string(where) + " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.contains(key)) {
      throw ValidationError(std::string("unknown key '") + key + "' in " + where);
    }
  }
}

template <class T>
T get_as(const ordered_json& j, const char* key) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ValidationError(std::string("config key '") + key + "' has the wrong type");
  }
}

std::size_t get_count(const ordered_json& j, const char* key) {
  if (!j.is_number_integer() || j.get<std::int64_t>() < 0) {
    throw ValidationError(std::string("config key '") + key + "' must be a non-negative integer");
  }
  return j.get<std::size_t>();
}

std::vector<double> get_list(const ordered_json& j, const char* key) {
  if (!j.is_array()) throw ValidationError(std::string("config key '") + key + "' must be a list");
  std::vector<double> out;
  for (const auto& e : j) {
    if (!e.is_number()) throw ValidationError(std::string("config key '") + key + "' must hold numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

bool piecewise_linear_base(const FunctionSpec& base) {
  return base.name == "tent" || base.name == "skew_tent";
}

double base_slope(const FunctionSpec& base) {
  return base.name == "tent" ? 2.0 : base.params.at(0);
}

}  // namespace

std::vector<std::string> builtin_names() {
  std::vector<std::string> names;
  for (const auto& [key, value] : builtins().items()) names.push_back(key);
  return names;
}

ordered_json builtin_config(std::string_view name) {
  const auto it = builtins().find(std::string(name));
  if (it == builtins().end()) throw ValidationError("unknown builtin config '" + std::string(name) + "'");
  return *it;
}

ordered_json read_config_source(std::string_view source) {
  std::string s(source);
  if (s.starts_with("builtin:")) return builtin_config(s.substr(8));
  if (builtins().contains(s)) return builtin_config(s);
  std::ifstream in(s);
  if (!in) throw ValidationError("cannot open config '" + s + "'");
  try {
    return ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("config '" + s + "' is not valid JSON: " + e.what());
  }
}

FunctionSpec parse_function(const ordered_json& j) {
  FunctionSpec spec;
  if (j.is_string()) {
    std::istringstream in(j.get<std::string>());
    in >> spec.name;
    std::string tok;
    while (in >> tok) {
      try {
        std::size_t used = 0;
        spec.params.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw ValidationError("bad parameter '" + tok + "' in '" + j.get<std::string>() + "'");
      }
    }
  } else if (j.is_object()) {
    check_keys(j, {"name", "params"}, "function spec");
    if (!j.contains("name")) throw ValidationError("function spec needs a name");
    spec.name = get_as<std::string>(j.at("name"), "name");
    if (j.contains("params")) spec.params = get_list(j.at("params"), "params");
  } else {
    throw ValidationError("function spec must be a string or an object");
  }
  if (spec.name.empty()) throw ValidationError("empty function name");
  return spec;
}

ExperimentConfig parse_config(const ordered_json& j) {
  check_keys(j,
             {"command", "family", "observable", "ground_truth_g", "grid_size", "tol", "deltas",
              "t_values", "s_deltas", "p_values", "betas", "samples", "seed", "n_orbits",
              "orbit_len", "burn_in", "n_iter"},
             "config");
  ExperimentConfig c;
  if (j.contains("command")) c.command = get_as<std::string>(j.at("command"), "command");
  if (j.contains("family")) {
    const auto& f = j.at("family");
    check_keys(f, {"kind", "base", "X", "g", "r", "t_max"}, "family");
    if (f.contains("kind")) c.family.kind = get_as<std::string>(f.at("kind"), "kind");
    if (f.contains("base")) c.family.base = parse_function(f.at("base"));
    if (f.contains("X")) c.family.X = parse_function(f.at("X"));
    if (f.contains("g")) c.family.g = parse_function(f.at("g"));
    if (f.contains("r")) c.family.r = parse_function(f.at("r"));
    if (f.contains("t_max")) c.family.t_max = get_as<double>(f.at("t_max"), "t_max");
  }
  if (j.contains("observable")) c.observable = parse_function(j.at("observable"));
  if (j.contains("ground_truth_g")) c.ground_truth_g = parse_function(j.at("ground_truth_g"));
  if (j.contains("grid_size")) c.grid_size = get_count(j.at("grid_size"), "grid_size");
  if (j.contains("tol")) c.tol = get_as<double>(j.at("tol"), "tol");
  if (j.contains("deltas")) c.deltas = get_list(j.at("deltas"), "deltas");
  if (j.contains("t_values")) c.t_values = get_list(j.at("t_values"), "t_values");
  if (j.contains("s_deltas")) c.s_deltas = get_list(j.at("s_deltas"), "s_deltas");
  if (j.contains("p_values")) c.p_values = get_list(j.at("p_values"), "p_values");
  if (j.contains("betas")) c.betas = get_list(j.at("betas"), "betas");
  if (j.contains("samples")) c.samples = get_as<std::string>(j.at("samples"), "samples");
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) throw ValidationError("seed must be an unsigned integer");
    c.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("n_orbits")) c.n_orbits = get_count(j.at("n_orbits"), "n_orbits");
  if (j.contains("orbit_len")) c.orbit_len = get_count(j.at("orbit_len"), "orbit_len");
  if (j.contains("burn_in")) c.burn_in = get_count(j.at("burn_in"), "burn_in");
  if (j.contains("n_iter")) c.n_iter = static_cast<int>(get_count(j.at("n_iter"), "n_iter"));
  return c;
}

Smooth make_function(const FunctionSpec& spec) { return catalog_function(spec.name, spec.params); }

PiecewiseExpandingMap make_map(const FunctionSpec& spec) { return named_map(spec.name, spec.params); }

MapFamily make_family(const FamilySpec& spec) {
  if (spec.kind == "additive") {
    return MapFamily::additive(make_map(spec.base), make_function(spec.X), spec.t_max);
  }
  if (spec.kind == "conjugation") {
    return MapFamily::conjugation(make_map(spec.base), make_function(spec.g),
                                  make_function(spec.r), spec.t_max);
  }
  if (spec.kind == "tangent_pair") {
    if (!piecewise_linear_base(spec.base)) {
      throw ValidationError("tangent_pair needs a tent or skew_tent base");
    }
    return MapFamily::additive(make_map(spec.base),
                               companion_direction(base_slope(spec.base), make_function(spec.g)),
                               spec.t_max);
  }
  throw ValidationError("unknown family kind '" + spec.kind + "'");
}

MapFamily make_partner(const FamilySpec& spec) {
  if (spec.kind != "tangent_pair") throw ValidationError("only tangent_pair families have a partner");
  return MapFamily::conjugation(make_map(spec.base), make_function(spec.g), make_function(spec.r),
                                spec.t_max);
}

void validate(const ExperimentConfig& c) {
  const auto cmds = commands();
  if (std::find(cmds.begin(), cmds.end(), c.command) == cmds.end()) {
    throw ValidationError("unknown command '" + c.command + "'");
  }
  if (c.grid_size < 64 || c.grid_size % 2 != 0) {
    throw ValidationError("grid_size must be even and at least 64");
  }
  if (!(c.tol > 0.0 && c.tol < 1.0)) throw ValidationError("tol must lie in (0, 1)");
  if (!(c.family.t_max > 0.0)) throw ValidationError("t_max must be positive");
  for (std::size_t i = 0; i < c.deltas.size(); ++i) {
    if (!(c.deltas[i] > 0.0) || (i > 0 && !(c.deltas[i] < c.deltas[i - 1]))) {
      throw ValidationError("deltas must be positive and strictly descending");
    }
    if (c.deltas[i] > c.family.t_max) throw ValidationError("deltas exceed t_max");
  }
  for (double t : c.t_values) {
    if (!std::isfinite(t) || std::fabs(t) > c.family.t_max) {
      throw ValidationError("t_values must lie in [-t_max, t_max]");
    }
  }
  for (double s : c.s_deltas) {
    if (!(s > 0.0)) throw ValidationError("s_deltas must be positive");
  }
  for (double p : c.p_values) {
    if (!(p >= 1.0)) throw ValidationError("p_values must be >= 1");
  }
  for (double b : c.betas) {
    if (!(b > 0.0 && b < 1.0)) throw ValidationError("betas must lie in (0, 1)");
  }
  if (c.n_orbits > 0 && c.orbit_len <= c.burn_in) {
    throw ValidationError("orbit_len must exceed burn_in");
  }
  // Constructing the objects checks every catalog name and parameter list.
  make_function(c.observable);
  if (c.ground_truth_g) make_function(*c.ground_truth_g);
  for (const auto* f : {&c.family.X, &c.family.g, &c.family.r}) make_function(*f);
  make_family(c.family);
  if (c.family.kind == "tangent_pair") make_partner(c.family);

  if (c.command == "response") {
    if (c.family.kind == "conjugation") throw ValidationError("response needs an additive family");
    if (c.grid_size % 4 != 0) throw ValidationError("response needs grid_size divisible by 4");
  }
  if (c.command == "pressure" && c.family.kind != "conjugation") {
    throw ValidationError("pressure needs a conjugation family");
  }
  if (c.command == "pressure" && c.s_deltas.empty()) throw ValidationError("s_deltas is empty");
  if (c.command == "norms" && c.samples.empty()) throw ValidationError("norms needs a samples file");
  if (c.command == "sweep" && c.t_values.empty()) throw ValidationError("t_values is empty");
  if (c.command == "sweep" && c.family.kind == "tangent_pair") {
    if (c.t_values.size() < 2) throw ValidationError("tangent_pair sweep needs two t values");
    for (double t : c.t_values) {
      if (!(t > 0.0)) throw ValidationError("tangent_pair sweep needs positive t values");
    }
  }
}

}  // namespace saltus::cli
