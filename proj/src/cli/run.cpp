#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <variant>

#include <CLI11.hpp>

#include "saltus/bvspaces.hpp"
#include "saltus/cli.hpp"
#include "saltus/conjugacy.hpp"
#include "saltus/density.hpp"
#include "saltus/errors.hpp"
#include "saltus/response.hpp"
#include "saltus/transfer.hpp"

namespace saltus::cli {

using nlohmann::ordered_json;

std::string csv_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

using Cell = std::variant<double, std::int64_t, std::string>;

struct Table {
  std::string name;  // file suffix; empty for the main table
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row) { rows.push_back(std::move(row)); }
};

struct Result {
  ordered_json summary = ordered_json::object();
  std::vector<Table> tables;
};

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

std::string csv_cell(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return csv_number(*d);
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  return csv_field(std::get<std::string>(c));
}

ordered_json json_cell(const Cell& c) {
  return std::visit([](const auto& v) { return ordered_json(v); }, c);
}

std::string csv_scalar(const ordered_json& v) {
  if (v.is_null()) return "";
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  if (v.is_number()) return csv_number(v.get<double>());
  if (v.is_string()) return csv_field(v.get<std::string>());
  return csv_field(v.dump());
}

std::string encode_csv(const Table& t) {
  std::string out;
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    out += (i ? "," : "") + csv_field(t.columns[i]);
  }
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + csv_cell(row[i]);
    out += '\n';
  }
  return out;
}

std::string encode_summary_csv(const ordered_json& summary) {
  std::string out = "key,value\n";
  for (const auto& [key, value] : summary.items()) out += csv_field(key) + "," + csv_scalar(value) + "\n";
  return out;
}

// Columnar tables under their names next to the summary keys.
std::string encode_json(const Result& r) {
  ordered_json j = r.summary;
  for (const auto& t : r.tables) {
    ordered_json cols = ordered_json::object();
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
      ordered_json col = ordered_json::array();
      for (const auto& row : t.rows) col.push_back(json_cell(row[c]));
      cols[t.columns[c]] = std::move(col);
    }
    j[t.name.empty() ? "table" : t.name] = std::move(cols);
  }
  return j.dump(2) + "\n";
}

ordered_json optional_json(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

RealFn as_fn(const Smooth& s) {
  return [s](double x) { return s(x); };
}

// ---- commands --------------------------------------------------------------

Result run_srb(const ExperimentConfig& c) {
  const MapFamily family = make_family(c.family);
  const auto& map = family.base();
  const Smooth psi = make_function(c.observable);
  const DensityDecomposition rho = srb_density(map, c.grid_size, c.tol);
  const GridFunction recon = rho.reconstruction();
  const SaltusDerivativeReport ds = saltus_derivative(map, rho);

  Result r;
  auto& s = r.summary;
  s["grid_size"] = c.grid_size;
  s["leading_eigenvalue"] = rho.raw.leading_eigenvalue;
  s["gap_estimate"] = rho.raw.gap_estimate;
  s["power_iterations"] = rho.raw.iterations;
  s["s1"] = rho.s1();
  s["s1_fit"] = rho.s1_fit;
  s["fit_error"] = rho.fit_error;
  s["refinement_iterations"] = rho.refinement_iterations;
  s["truncation_K"] = rho.truncation_K;
  s["tail_bound"] = rho.tail_bound;
  s["period"] = rho.orbit.period ? ordered_json(*rho.orbit.period) : ordered_json(nullptr);
  s["good"] = good_condition(map, rho.orbit);
  s["integral"] = rho.integral();
  s["observable_integral"] = rho.integrate(as_fn(psi));
  s["orbit_visits_both_sides"] = ds.orbit_visits_both_sides;
  if (c.n_orbits > 0) {
    const BirkhoffEstimate b =
        birkhoff_average(map, as_fn(psi), c.n_orbits, c.orbit_len, c.burn_in, c.seed);
    s["birkhoff_mean"] = b.mean;
    s["birkhoff_standard_error"] = b.standard_error;
    s["birkhoff_z"] = b.standard_error > 0.0
                          ? (b.mean - s["observable_integral"].get<double>()) / b.standard_error
                          : 0.0;
  }

  Table t{"", {"kind", "index", "x", "value"}, {}};
  for (std::size_t i = 0; i < recon.size(); ++i) {
    t.add({"node", std::int64_t(i), recon.node(i), recon[i]});
  }
  for (std::size_t i = 0; i < rho.regular.size(); ++i) {
    t.add({"regular", std::int64_t(i), rho.regular.node(i), rho.regular[i]});
  }
  for (const auto& j : rho.jumps) t.add({"jump", std::int64_t(j.index), j.location, j.amplitude});
  for (const auto& j : rho.merged_jumps) t.add({"merged", std::int64_t(0), j.location, j.amplitude});
  for (std::size_t k = 0; k < ds.terms.size(); ++k) {
    t.add({"derivative_jump", std::int64_t(k + 1), ds.terms[k].location, ds.terms[k].value});
  }
  r.tables.push_back(std::move(t));
  return r;
}

Result run_tce(const ExperimentConfig& c) {
  const MapFamily family = make_family(c.family);
  const auto& map = family.base();
  const RealFn v = [&family](double x) { return family.direction(x); };

  const DefectReport printed = horizontality_defect(map, v, DefectConvention::Printed);
  const DefectReport consistency = horizontality_defect(map, v, DefectConvention::TceConsistency);
  if (std::fabs(consistency.value) > 1e-8) {
    throw HorizontalityError("tce: direction is not horizontal, defect " +
                             csv_number(consistency.value));
  }
  const TCESolution series = solve_tce_series(map, v, c.grid_size, c.tol);
  const TCESolution pull =
      solve_tce_pullback(map, v, pullback_initial_guess(map, v, c.grid_size), c.n_iter);

  double diff = 0.0;
  for (std::size_t i = 0; i < series.alpha.size(); ++i) {
    diff = std::max(diff, std::fabs(series.alpha[i] - pull.alpha[i]));
  }

  Result r;
  auto& s = r.summary;
  s["grid_size"] = c.grid_size;
  s["defect_printed"] = printed.value;
  s["defect_tce_consistency"] = consistency.value;
  s["defect_error_bar"] = consistency.error_bar;
  s["series_terms"] = series.iterations_or_terms;
  s["series_error_bound"] = series.truncation_error_bound;
  s["series_residual"] = series.residual;
  s["pullback_iterations"] = pull.iterations_or_terms;
  s["pullback_error_bound"] = pull.truncation_error_bound;
  s["pullback_residual"] = pull.residual;
  s["sup_difference"] = diff;
  s["error_bound_sum"] = series.truncation_error_bound + pull.truncation_error_bound;

  Table t{"", {"x", "alpha_series", "alpha_pullback"}, {}};
  for (std::size_t i = 0; i < series.alpha.size(); ++i) {
    t.add({series.alpha.node(i), series.alpha[i], pull.alpha[i]});
  }
  Table h{"holder", {"beta", "series", "pullback"}, {}};
  for (double beta : c.betas) {
    h.add({beta, holder_norm(series.alpha, beta).constant, holder_norm(pull.alpha, beta).constant});
  }
  r.tables.push_back(std::move(t));
  r.tables.push_back(std::move(h));
  return r;
}

Result run_response(const ExperimentConfig& c) {
  const MapFamily family = make_family(c.family);
  const Smooth psi = make_function(c.observable);
  std::optional<Smooth> gt;
  if (c.ground_truth_g) gt = make_function(*c.ground_truth_g);
  ResponseReport rep = response_formula(family, psi, c.grid_size, c.tol, gt);

  Result r;
  std::optional<FiniteDifferenceReport> fd;
  if (!c.deltas.empty()) {
    fd = response_finite_difference(family, psi, c.grid_size, c.deltas);
    rep.fd_value = fd->value;
    rep.fd_error = fd->error_bar;
  }
  auto& s = r.summary;
  s["formula_value"] = rep.formula_value;
  s["singular_term"] = rep.singular_term;
  s["resolvent_term"] = rep.resolvent_term;
  s["formula_error"] = rep.formula_error;
  s["fd_value"] = optional_json(rep.fd_value);
  s["fd_error"] = optional_json(rep.fd_error);
  s["pressure_value"] = optional_json(rep.pressure_value);
  s["ground_truth"] = optional_json(rep.ground_truth);
  s["grid_size"] = rep.grid_size;
  s["defect"] = rep.defect;
  s["mean_check"] = rep.mean_check;
  s["gap_estimate"] = rep.gap_estimate;
  s["good"] = rep.good;
  s["mixing"] = rep.mixing;
  if (fd) {
    s["fd_convergence_ratio"] = optional_json(fd->convergence_ratio);
    s["fd_non_differentiable"] = fd->non_differentiable;
    Table t{"fd", {"delta", "plus", "minus", "central"}, {}};
    for (std::size_t i = 0; i < fd->deltas.size(); ++i) {
      t.add({fd->deltas[i], fd->plus[i], fd->minus[i], fd->central[i]});
    }
    r.tables.push_back(std::move(t));
  }
  return r;
}

Result run_pressure(const ExperimentConfig& c) {
  const MapFamily family = make_family(c.family);
  const Smooth psi = make_function(c.observable);
  Result r;
  Table p{"", {"t", "derivative", "error_bar", "integral_weighted", "integral_conjugation",
               "difference"}, {}};
  Table l{"lambda", {"t", "s", "lambda"}, {}};
  double worst = 0.0;
  for (double t : c.t_values) {
    const PressureReport rep = pressure_derivative(family, psi, t, c.s_deltas, c.grid_size);
    const double d = rep.derivative - rep.integral_conjugation;
    worst = std::max(worst, std::fabs(d));
    p.add({t, rep.derivative, rep.error_bar, rep.integral_weighted, rep.integral_conjugation, d});
    for (std::size_t i = 0; i < rep.s_values.size(); ++i) l.add({t, rep.s_values[i], rep.lambdas[i]});
  }
  r.summary["grid_size"] = c.grid_size;
  r.summary["max_difference"] = worst;
  r.tables.push_back(std::move(p));
  r.tables.push_back(std::move(l));
  return r;
}

Result run_sweep(const ExperimentConfig& c) {
  Result r;
  r.summary["grid_size"] = c.grid_size;
  if (c.family.kind == "tangent_pair") {
    const TangentPairReport rep = tangent_pair_distance(make_family(c.family), make_partner(c.family),
                                                        c.t_values, c.grid_size);
    r.summary["exponent"] = rep.exponent;
    Table t{"", {"t", "l1_distance"}, {}};
    for (std::size_t i = 0; i < rep.t_values.size(); ++i) t.add({rep.t_values[i], rep.distances[i]});
    r.tables.push_back(std::move(t));
    return r;
  }
  const MapFamily family = make_family(c.family);
  const RealFn psi = as_fn(make_function(c.observable));
  // Conjugation families: mu_t is the push-forward of mu_0 by h_t.
  std::optional<DensityDecomposition> base;
  if (family.kind() == FamilyKind::Conjugation) base = srb_density(family.base(), c.grid_size, c.tol);
  auto R = [&](double t) {
    if (base) return base->integrate([&](double x) { return psi(family.h(t, x)); });
    return srb_density(family_map(family, t), c.grid_size, c.tol).integrate(psi);
  };
  std::vector<std::future<double>> jobs;
  for (double t : c.t_values) jobs.push_back(std::async(std::launch::async, R, t));
  const double r0 = R(0.0);
  std::vector<double> values, ts, dev;
  for (auto& j : jobs) values.push_back(j.get());
  Table t{"", {"t", "R", "deviation"}, {}};
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double d = std::fabs(values[i] - r0);
    t.add({c.t_values[i], values[i], d});
    if (c.t_values[i] != 0.0 && std::fabs(c.t_values[i]) < 1.0) {
      ts.push_back(std::fabs(c.t_values[i]));
      dev.push_back(d);
    }
  }
  const ModulusFit fit = modulus_fit(ts, dev);
  r.summary["base_value"] = r0;
  r.summary["modulus_log_coefficient"] = fit.log_coefficient;
  r.summary["modulus_linear_coefficient"] = fit.linear_coefficient;
  r.tables.push_back(std::move(t));
  return r;
}

std::vector<double> read_samples(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open samples file '" + path + "'");
  std::vector<double> out;
  std::string tok;
  while (in >> tok) {
    for (char& ch : tok) {
      if (ch == ',' || ch == ';') ch = ' ';
    }
    std::istringstream parts(tok);
    std::string part;
    while (parts >> part) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(part, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != part.size() || !std::isfinite(v)) {
        throw ValidationError("samples file: bad value '" + part + "'");
      }
      out.push_back(v);
    }
  }
  if (out.size() < 2) throw ValidationError("samples file needs at least two values");
  return out;
}

Result run_norms(const ExperimentConfig& c) {
  const std::vector<double> samples = read_samples(c.samples);
  const GridFunction u(samples);
  Result r;
  r.summary["n_samples"] = samples.size();
  Table t{"", {"p", "var_p", "bvp_norm"}, {}};
  for (double p : c.p_values) t.add({p, var_p(samples, p), bvp_norm(u, p)});
  r.tables.push_back(std::move(t));
  return r;
}

Result dispatch(const ExperimentConfig& c) {
  if (c.command == "srb") return run_srb(c);
  if (c.command == "tce") return run_tce(c);
  if (c.command == "response") return run_response(c);
  if (c.command == "pressure") return run_pressure(c);
  if (c.command == "sweep") return run_sweep(c);
  if (c.command == "norms") return run_norms(c);
  throw ValidationError("unknown command '" + c.command + "'");
}

void report_error(std::ostream& err, const char* kind, const std::string& message) {
  err << ordered_json{{"error", kind}, {"message", message}}.dump() << "\n";
}

}  // namespace

std::vector<std::string> commands() { return {"srb", "tce", "response", "pressure", "sweep", "norms"}; }

std::vector<Artifact> execute(const ExperimentConfig& config, const RunOptions& options) {
  validate(config);
  const Result r = dispatch(config);
  std::vector<Artifact> out;
  if (options.format == Format::Json) {
    out.push_back({config.command + ".json", encode_json(r)});
  } else {
    for (const auto& t : r.tables) {
      const std::string stem = t.name.empty() ? config.command : config.command + "_" + t.name;
      out.push_back({stem + ".csv", encode_csv(t)});
    }
    out.push_back({config.command + "_summary.csv", encode_summary_csv(r.summary)});
  }
  if (options.dump_matrix) {
    std::ostringstream bytes(std::ios::binary);
    write_matrix_dump(build_operator(make_map(config.family.base), config.grid_size), bytes);
    out.push_back({"transfer.xfer", bytes.str()});
  }
  return out;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"SRB densities and linear response of piecewise expanding unimodal maps", "saltus"};
  app.require_subcommand(1);

  std::string config_source = "builtin:tent";
  std::optional<std::size_t> grid;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  std::optional<std::string> format;
  bool dump_matrix = false;

  for (const auto& name : commands()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_source, "JSON file, builtin NAME or builtin:NAME");
    sub->add_option("--grid", grid, "grid size M (even)");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "random seed");
    sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_flag("--dump-matrix", dump_matrix, "also write the transfer matrix (XFER)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    report_error(err, "usage", e.what());
    return 2;
  }

  RunOptions options;
  std::vector<Artifact> artifacts;
  try {
    ExperimentConfig config = parse_config(read_config_source(config_source));
    config.command = app.get_subcommands().front()->get_name();
    if (grid) config.grid_size = *grid;
    if (seed) config.seed = *seed;
    const std::string fmt = format.value_or(config.command == "response" ? "json" : "csv");
    options.format = fmt == "json" ? Format::Json : Format::Csv;
    options.dump_matrix = dump_matrix;
    artifacts = execute(config, options);
  } catch (const ValidationError& e) {
    report_error(err, "validation", e.what());
    return 2;
  } catch (const NumericalError& e) {
    report_error(err, "numerical", e.what());
    return 3;
  } catch (const std::exception& e) {
    report_error(err, "internal", e.what());
    return 3;
  }

  try {
    const std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    for (const auto& a : artifacts) {
      const auto path = dir / a.filename;
      std::ofstream f(path, std::ios::binary);
      f.write(a.content.data(), static_cast<std::streamsize>(a.content.size()));
      if (!f) throw std::runtime_error("cannot write " + path.string());
      out << path.string() << "\n";
    }
  } catch (const std::exception& e) {
    report_error(err, "io", e.what());
    return 3;
  }
  return 0;
}

}  // namespace saltus::cli
