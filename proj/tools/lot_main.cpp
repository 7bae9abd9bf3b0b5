// lot: command-line front end for the Lorentz-Orlicz transport library.
//
// Subcommands: transport, duality, geodesic, geodesic-map, entropy, selftest.
// Artifacts are deterministic: floats print with 17 significant digits, JSON
// keys keep insertion order, and clouds come from recorded Halton offsets, so
// repeat runs are byte-identical.
//
// Exit codes: 0 success, 1 config error, 2 solver failure, 3 precondition
// violation on otherwise valid input.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "acceptance/acceptance.hpp"
#include "lot/admissible.hpp"
#include "lot/duality.hpp"
#include "lot/entropy.hpp"
#include "lot/errors.hpp"
#include "lot/experiments.hpp"
#include "lot/geodesic.hpp"
#include "lot/measure.hpp"
#include "lot/spacetime.hpp"
#include "lot/support.hpp"
#include "lot/transport.hpp"

namespace {

using lot::ConfigError;
using lot::Coupling;
using lot::DiscreteMeasure;
using lot::Event;
using lot::ExtendedReal;
using lot::UPtr;
using lot::Vec;
using lot::WeightedMinkowski;
using ordered_json = nlohmann::ordered_json;

// ------------------------------------------------------------ number printing

// 17 significant digits survive a double round trip; non-finite values have
// no JSON literal, so they print as the strings "-inf" / "inf" / "nan".
std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string pretty_extended(const ExtendedReal& v) {
  if (v.is_neg_inf()) return "-inf";
  if (v.is_pos_inf()) return "inf";
  return format_double(v.raw());
}

// --------------------------------------------------------------- JSON writing
//
// nlohmann's serializer uses shortest-round-trip floats and has no non-finite
// representation, so artifacts go through this small writer instead: floats
// via format_double (quoted when non-finite), scalar-only arrays on one line,
// everything else indented two spaces.

bool array_is_flat(const ordered_json& j) {
  for (const auto& e : j)
    if (e.is_structured()) return false;
  return true;
}

void dump_value(std::ostream& os, const ordered_json& j, int depth) {
  const std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(depth + 1) * 2, ' ');
  if (j.is_object()) {
    if (j.empty()) {
      os << "{}";
      return;
    }
    os << "{\n";
    std::size_t i = 0;
    for (auto it = j.begin(); it != j.end(); ++it, ++i) {
      os << inner << ordered_json(it.key()).dump() << ": ";
      dump_value(os, it.value(), depth + 1);
      os << (i + 1 < j.size() ? ",\n" : "\n");
    }
    os << pad << "}";
  } else if (j.is_array()) {
    if (j.empty()) {
      os << "[]";
      return;
    }
    if (array_is_flat(j)) {
      os << "[";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) os << ", ";
        dump_value(os, j[i], depth);
      }
      os << "]";
    } else {
      os << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        os << inner;
        dump_value(os, j[i], depth + 1);
        os << (i + 1 < j.size() ? ",\n" : "\n");
      }
      os << pad << "]";
    }
  } else if (j.is_number_float()) {
    const double v = j.get<double>();
    if (std::isfinite(v))
      os << format_double(v);
    else
      os << '"' << format_double(v) << '"';
  } else {
    os << j.dump();
  }
}

std::string dump_artifact(const ordered_json& j) {
  std::ostringstream os;
  dump_value(os, j, 0);
  os << "\n";
  return os.str();
}

ordered_json json_extended(const ExtendedReal& v) {
  if (v.is_neg_inf()) return "-inf";
  if (v.is_pos_inf()) return "inf";
  return v.raw();
}

ordered_json json_pairs(
    const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  ordered_json out = ordered_json::array();
  for (const auto& [i, j] : pairs)
    out.push_back(ordered_json::array({i, j}));
  return out;
}

ordered_json measure_json(const DiscreteMeasure& m) {
  ordered_json pts = ordered_json::array();
  for (std::size_t k = 0; k < m.size(); ++k) pts.push_back(m.point(k));
  return ordered_json{{"points", pts}, {"weights", m.weights()}};
}

ordered_json coupling_json(const Coupling& pi) {
  ordered_json rows = ordered_json::array();
  for (std::size_t i = 0; i < pi.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (std::size_t j = 0; j < pi.cols(); ++j) row.push_back(pi(i, j));
    rows.push_back(std::move(row));
  }
  return ordered_json{
      {"rows", pi.rows()}, {"cols", pi.cols()}, {"matrix", std::move(rows)}};
}

ordered_json spacetime_json(const WeightedMinkowski& st) {
  return ordered_json{
      {"kind", "minkowski:" + std::to_string(st.dim())},
      {"weight", st.V().describe()},
      {"N", st.N_is_infinite() ? ordered_json("inf") : ordered_json(st.N())}};
}

// ------------------------------------------------------------ artifact output

void write_text(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw ConfigError("cannot open \"" + out_path + "\" for writing");
  f << text;
  f.close();
  if (!f) throw ConfigError("short write to \"" + out_path + "\"");
  std::cerr << "wrote " << out_path << "\n";
}

std::string curve_csv(const lot::EntropyCurve& curve,
                      const lot::ConvexityReport& report) {
  std::ostringstream os;
  os << "s,e,e1_analytic,e2_analytic,e1_fd,e2_fd,margin_lambda2,margin_l2pi\n";
  for (std::size_t i = 0; i < curve.s_grid.size(); ++i) {
    os << format_double(curve.s_grid[i]) << ',' << format_double(curve.e[i])
       << ',' << format_double(curve.e1_analytic[i]) << ','
       << format_double(curve.e2_analytic[i]) << ','
       << format_double(curve.e1_fd[i]) << ',' << format_double(curve.e2_fd[i])
       << ',' << format_double(report.margin_lambda2[i]) << ','
       << format_double(report.margin_l2pi[i]) << '\n';
  }
  return os.str();
}

// --------------------------------------------------------------- config files

ordered_json load_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open \"" + path + "\"");
  try {
    return ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("malformed JSON in \"" + path + "\": " + e.what());
  }
}

const ordered_json* maybe_field(const ordered_json& j, const char* key) {
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

std::string string_field(const ordered_json& j, const char* key,
                         const std::string& fallback,
                         const std::string& where) {
  const ordered_json* v = maybe_field(j, key);
  if (!v) return fallback;
  if (!v->is_string())
    throw ConfigError(where + ": field \"" + key + "\" must be a string");
  return v->get<std::string>();
}

double number_field(const ordered_json& j, const char* key, double fallback,
                    const std::string& where) {
  const ordered_json* v = maybe_field(j, key);
  if (!v) return fallback;
  if (!v->is_number())
    throw ConfigError(where + ": field \"" + key + "\" must be a number");
  return v->get<double>();
}

std::vector<double> vector_field(const ordered_json& j, const char* key,
                                 const std::string& where) {
  const ordered_json* v = maybe_field(j, key);
  if (!v || !v->is_array() || v->empty())
    throw ConfigError(where + ": field \"" + key +
                      "\" must be a non-empty array of numbers");
  std::vector<double> out;
  for (const auto& e : *v) {
    if (!e.is_number())
      throw ConfigError(where + ": field \"" + key +
                        "\" must contain only numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

WeightedMinkowski spacetime_from_config(const ordered_json* node,
                                        const std::string& where) {
  std::string kind = "minkowski:2";
  std::string weight = "none";
  std::string N = "inf";
  if (node) {
    if (!node->is_object())
      throw ConfigError(where + ": \"spacetime\" must be an object");
    kind = string_field(*node, "kind", kind, where);
    weight = string_field(*node, "weight", weight, where);
    if (const ordered_json* n = maybe_field(*node, "N")) {
      if (n->is_string())
        N = n->get<std::string>();
      else if (n->is_number())
        N = format_double(n->get<double>());
      else
        throw ConfigError(where + ": field \"N\" must be a number or \"inf\"");
    }
  }
  return lot::parse_spacetime_spec(kind, weight, N);
}

std::string resolve_relative(const std::string& path,
                             const std::filesystem::path& base_dir) {
  std::filesystem::path p(path);
  if (p.is_absolute() || base_dir.empty()) return path;
  return (base_dir / p).string();
}

DiscreteMeasure measure_from_config(const std::string& flag_path,
                                    const ordered_json* cfg,
                                    const std::filesystem::path& cfg_dir,
                                    const char* key) {
  if (!flag_path.empty()) return lot::load_measure(flag_path);
  if (cfg) {
    if (const ordered_json* v = maybe_field(*cfg, key)) {
      if (v->is_string())
        return lot::load_measure(
            resolve_relative(v->get<std::string>(), cfg_dir));
      if (v->is_object()) return lot::parse_measure_json(v->dump());
      throw ConfigError(std::string("config field \"") + key +
                        "\" must be a path or an inline measure object");
    }
  }
  throw ConfigError(std::string("no ") + key + " measure: pass --" + key +
                    " <file> or a \"" + key + "\" config field");
}

// ------------------------------------------------------------ CLI option sets

struct SubOpts {
  CLI::App* cmd = nullptr;
  std::string mu, nu, u, experiment, config, out;
  double tol = 1e-8;
  int grid = 5;
  std::uint64_t seed = 0;
  CLI::Option* u_opt = nullptr;
  CLI::Option* tol_opt = nullptr;
  CLI::Option* grid_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
};

void add_measure_flags(SubOpts& o) {
  o.cmd->add_option("--mu", o.mu, "Source measure JSON file");
  o.cmd->add_option("--nu", o.nu, "Target measure JSON file");
}

void add_u_flag(SubOpts& o) {
  o.u_opt = o.cmd->add_option(
      "--u", o.u,
      "Orlicz gauge: u_p:<p> | u_0 | shifted_u_p:<p> | shifted_u_0 | "
      "conjugate(<spec>) | rescale(<spec>,<f>)");
}

void add_tol_flag(SubOpts& o) {
  o.tol_opt =
      o.cmd->add_option("--tol", o.tol, "Solver tolerance (default 1e-8)");
}

void add_grid_flag(SubOpts& o, const char* what) {
  o.grid_opt = o.cmd->add_option("--grid", o.grid, what);
}

void add_seed_flag(SubOpts& o) {
  o.seed_opt = o.cmd->add_option(
      "--seed", o.seed, "Quasi-random offset for cloud sampling (default 0)");
}

void add_experiment_flag(SubOpts& o, const std::string& names) {
  o.cmd->add_option("--experiment", o.experiment,
                    "Built-in instance: " + names);
}

void add_config_flag(SubOpts& o) {
  o.cmd->add_option("--config", o.config, "Instance description JSON file");
}

void add_out_flag(SubOpts& o, const char* what) {
  o.cmd->add_option("--out", o.out, what);
}

std::string joined(const std::vector<std::string>& names) {
  std::string out;
  for (const auto& n : names) {
    if (!out.empty()) out += " | ";
    out += n;
  }
  return out;
}

// ------------------------------------------------- problem input resolution

struct ProblemInputs {
  WeightedMinkowski st;
  UPtr u;
  DiscreteMeasure mu;
  DiscreteMeasure nu;
  double tol = 1e-8;
};

ProblemInputs resolve_problem(const SubOpts& o) {
  if (!o.experiment.empty()) {
    if (!o.mu.empty() || !o.nu.empty() || !o.config.empty())
      throw ConfigError("--experiment excludes --mu/--nu/--config");
    lot::TransportInstance inst = lot::make_transport_instance(o.experiment);
    UPtr u = o.u_opt->count() ? lot::parse_u_spec(o.u) : inst.u;
    return ProblemInputs{inst.st, std::move(u), std::move(inst.mu),
                         std::move(inst.nu), o.tol};
  }
  ordered_json cfg;
  const ordered_json* cfg_ptr = nullptr;
  std::filesystem::path cfg_dir;
  if (!o.config.empty()) {
    cfg = load_json_file(o.config);
    if (!cfg.is_object())
      throw ConfigError("config \"" + o.config + "\" must be a JSON object");
    cfg_ptr = &cfg;
    cfg_dir = std::filesystem::path(o.config).parent_path();
  }
  const std::string where = o.config.empty() ? "config" : o.config;
  WeightedMinkowski st = spacetime_from_config(
      cfg_ptr ? maybe_field(*cfg_ptr, "spacetime") : nullptr, where);
  std::string u_spec = "u_p:0.5";
  if (cfg_ptr) u_spec = string_field(*cfg_ptr, "u", u_spec, where);
  if (o.u_opt->count()) u_spec = o.u;
  double tol = 1e-8;
  if (cfg_ptr) tol = number_field(*cfg_ptr, "tol", tol, where);
  if (o.tol_opt->count()) tol = o.tol;
  DiscreteMeasure mu = measure_from_config(o.mu, cfg_ptr, cfg_dir, "mu");
  DiscreteMeasure nu = measure_from_config(o.nu, cfg_ptr, cfg_dir, "nu");
  return ProblemInputs{std::move(st), lot::parse_u_spec(u_spec),
                       std::move(mu), std::move(nu), tol};
}

int config_grid(const SubOpts& o, int fallback) {
  int grid = fallback;
  if (!o.config.empty()) {
    ordered_json cfg = load_json_file(o.config);
    if (cfg.is_object())
      grid = static_cast<int>(
          number_field(cfg, "grid", static_cast<double>(grid), o.config));
  }
  if (o.grid_opt && o.grid_opt->count()) grid = o.grid;
  return grid;
}

// --------------------------------------------------------------- subcommands

int run_transport(const SubOpts& o) {
  ProblemInputs in = resolve_problem(o);
  lot::TransportSolution sol = lot::ell_u(in.mu, in.nu, in.st, *in.u, in.tol);

  ordered_json bracket = ordered_json::array();
  for (const auto& [lam, pred] : sol.bracket_history)
    bracket.push_back(ordered_json{{"lambda", lam}, {"predicate", pred}});

  ordered_json out{
      {"command", "transport"},
      {"spacetime", spacetime_json(in.st)},
      {"u", in.u->label()},
      {"tol", in.tol},
      {"mu", measure_json(in.mu)},
      {"nu", measure_json(in.nu)},
      {"lambda", json_extended(sol.lambda)},
      {"saturated", sol.saturated},
      {"inner_value", sol.inner_value},
      {"lp_solves", sol.iterations},
      {"bracket_history", std::move(bracket)},
      {"coupling",
       sol.coupling ? coupling_json(*sol.coupling) : ordered_json(nullptr)},
  };
  write_text(dump_artifact(out), o.out);
  std::fprintf(stderr, "ell_u = %s  (%s, %d inner LP solves)\n",
               pretty_extended(sol.lambda).c_str(),
               sol.saturated ? "saturated" : "not saturated", sol.iterations);
  return 0;
}

int run_duality(const SubOpts& o) {
  ProblemInputs in = resolve_problem(o);
  lot::DualCertificate cert =
      lot::find_u_separation(in.mu, in.nu, in.st, *in.u, in.tol);
  ExtendedReal dual = lot::dual_value(in.mu, in.nu, in.st, *in.u, in.tol);
  const double gap =
      dual.is_finite() ? std::abs(dual.raw() - cert.lambda)
                       : std::numeric_limits<double>::infinity();

  lot::CostMatrix cost = lot::cost_between(in.mu.points(), in.nu.points(),
                                           in.st, *in.u, cert.lambda);
  lot::CycleVerdict cycles =
      lot::check_cyclical_monotonicity(cert.pi, cost, 4);

  ordered_json out{
      {"command", "duality"},
      {"spacetime", spacetime_json(in.st)},
      {"u", in.u->label()},
      {"tol", in.tol},
      {"mu", measure_json(in.mu)},
      {"nu", measure_json(in.nu)},
      {"lambda", cert.lambda},
      {"phi", cert.phi},
      {"psi", cert.psi},
      {"contact_set", json_pairs(cert.contact_set)},
      {"coupling", coupling_json(cert.pi)},
      {"domination_ok", cert.domination_ok},
      {"contact_ok", cert.contact_ok},
      {"mass_ok", cert.mass_ok},
      {"valid", cert.valid()},
      {"dual_value", json_extended(dual)},
      {"duality_gap", gap},
      {"cycle_check",
       ordered_json{{"max_cycle", 4},
                    {"worst_margin", cycles.worst_margin},
                    {"witness", json_pairs(cycles.witness)}}},
  };
  write_text(dump_artifact(out), o.out);
  std::fprintf(stderr, "lambda = %s  certificate %s  duality gap = %s\n",
               format_double(cert.lambda).c_str(),
               cert.valid() ? "valid" : "INVALID", format_double(gap).c_str());
  std::fprintf(stderr, "cyclical monotonicity (cycles <= 4): worst margin = %s\n",
               format_double(cycles.worst_margin).c_str());
  return 0;
}

int run_geodesic(const SubOpts& o) {
  ProblemInputs in = resolve_problem(o);
  const int grid = config_grid(o, 5);
  lot::GeodesicPath path =
      lot::build_geodesic(in.mu, in.nu, in.st, *in.u, grid, in.tol);
  const double defect = lot::geodesy_defect(path, in.st, *in.u, in.tol);

  ordered_json measures = ordered_json::array();
  for (std::size_t i = 0; i < path.measures.size(); ++i) {
    ordered_json m = measure_json(path.measures[i]);
    ordered_json entry{{"s", path.s_grid[i]}};
    entry.update(m);
    measures.push_back(std::move(entry));
  }

  ordered_json out{
      {"command", "geodesic"},
      {"spacetime", spacetime_json(in.st)},
      {"u", in.u->label()},
      {"tol", in.tol},
      {"grid", grid},
      {"lambda", path.lambda},
      {"s_grid", path.s_grid},
      {"measures", std::move(measures)},
      {"coupling", coupling_json(path.coupling)},
      {"geodesy_defect", defect},
  };
  write_text(dump_artifact(out), o.out);
  std::fprintf(stderr, "lambda = %s  geodesy defect = %s over %d grid points\n",
               format_double(path.lambda).c_str(),
               format_double(defect).c_str(), grid);
  return 0;
}

// -------------------------------------------------------------- geodesic-map

lot::PotentialField potential_from_config(const ordered_json& node,
                                          const std::string& where) {
  if (!node.is_object())
    throw ConfigError(where + ": \"phi\" must be an object");
  const std::string kind = string_field(node, "kind", "affine", where);
  Vec a = vector_field(node, "a", where);
  const double b = number_field(node, "b", 0.0, where);
  if (kind == "affine") return lot::PotentialField::affine(std::move(a), b);
  if (kind == "quadratic") {
    const ordered_json* q = maybe_field(node, "Q");
    if (!q || !q->is_array())
      throw ConfigError(where + ": quadratic phi needs a square matrix \"Q\"");
    const auto n = q->size();
    lot::Matrix Q(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      if (!(*q)[i].is_array() || (*q)[i].size() != n)
        throw ConfigError(where + ": \"Q\" must be a square matrix");
      for (std::size_t j = 0; j < n; ++j)
        Q(static_cast<int>(i), static_cast<int>(j)) =
            (*q)[i][j].get<double>();
    }
    return lot::PotentialField::quadratic(std::move(Q), std::move(a), b);
  }
  throw ConfigError(where + ": phi kind must be \"affine\" or \"quadratic\"");
}

lot::MapInstance resolve_map_instance(const SubOpts& o) {
  if (!o.experiment.empty()) {
    if (!o.config.empty())
      throw ConfigError("--experiment excludes --config");
    lot::MapInstance inst = lot::make_map_instance(o.experiment);
    if (o.u_opt->count()) inst.u = lot::parse_u_spec(o.u);
    if (o.grid_opt->count()) inst.points_per_axis = o.grid;
    return inst;
  }
  if (o.config.empty())
    throw ConfigError("geodesic-map needs --experiment or --config");
  ordered_json cfg = load_json_file(o.config);
  if (!cfg.is_object())
    throw ConfigError("config \"" + o.config + "\" must be a JSON object");
  const std::string where = o.config;
  WeightedMinkowski st =
      spacetime_from_config(maybe_field(cfg, "spacetime"), where);
  std::string u_spec = string_field(cfg, "u", "u_p:0.5", where);
  if (o.u_opt->count()) u_spec = o.u;
  const ordered_json* phi_node = maybe_field(cfg, "phi");
  if (!phi_node) throw ConfigError(where + ": missing field \"phi\"");
  const ordered_json* rho_node = maybe_field(cfg, "rho0");
  if (!rho_node || !rho_node->is_object())
    throw ConfigError(where + ": missing density box \"rho0\" {lo, hi}");
  lot::BoxDensity rho0{vector_field(*rho_node, "lo", where),
                       vector_field(*rho_node, "hi", where)};
  int ppa = static_cast<int>(number_field(cfg, "points_per_axis", 32, where));
  if (o.grid_opt->count()) ppa = o.grid;
  lot::MapInstance inst{
      std::filesystem::path(o.config).stem().string(),
      std::move(st),
      lot::parse_u_spec(u_spec),
      number_field(cfg, "lambda", 1.0, where),
      number_field(cfg, "s", 0.5, where),
      potential_from_config(*phi_node, where),
      std::move(rho0),
      ppa,
      static_cast<int>(number_field(cfg, "cloud", 128, where))};
  return inst;
}

int run_geodesic_map(const SubOpts& o) {
  lot::MapInstance inst = resolve_map_instance(o);
  const int dim = inst.st.dim();
  if (static_cast<int>(inst.rho0.lo.size()) != dim ||
      static_cast<int>(inst.rho0.hi.size()) != dim)
    throw ConfigError("density box dimension must match the spacetime");

  // Halton cloud over the density box; the seed shifts the sequence.
  std::vector<Event> cloud;
  cloud.reserve(static_cast<std::size_t>(inst.cloud));
  for (int k = 0; k < inst.cloud; ++k) {
    Vec h = lot::support::halton_point(o.seed + static_cast<std::uint64_t>(k),
                                       dim);
    Event x(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      x[ui] = inst.rho0.lo[ui] + h[ui] * (inst.rho0.hi[ui] - inst.rho0.lo[ui]);
    }
    cloud.push_back(std::move(x));
  }
  const std::vector<double> mass(cloud.size(), 1.0 / cloud.size());

  lot::TransportMapSample at_s = lot::transport_map(
      inst.phi, *inst.u, inst.lambda, inst.s, cloud, mass, inst.st);
  lot::TransportMapSample at_one = lot::transport_map(
      inst.phi, *inst.u, inst.lambda, 1.0, cloud, mass, inst.st);

  std::vector<std::pair<Event, Event>> pairs;
  pairs.reserve(cloud.size());
  for (std::size_t k = 0; k < cloud.size(); ++k)
    pairs.emplace_back(cloud[k], at_one.mapped[k]);
  lot::NonCrossingVerdict crossing =
      lot::non_crossing_check(pairs, inst.s, *inst.u, inst.lambda, inst.st);

  const double residual =
      lot::monge_ampere_residual(inst.phi, inst.rho0, *inst.u, inst.lambda,
                                 inst.s, inst.st, inst.points_per_axis);

  ordered_json sample = ordered_json::array();
  for (std::size_t k = 0; k < cloud.size(); ++k) {
    sample.push_back(ordered_json{{"base", at_s.base[k]},
                                  {"velocity", at_s.velocity[k]},
                                  {"mapped", at_s.mapped[k]},
                                  {"det_jacobian", at_s.det_jacobian[k]}});
  }

  ordered_json out{
      {"command", "geodesic-map"},
      {"instance", inst.name},
      {"spacetime", spacetime_json(inst.st)},
      {"u", inst.u->label()},
      {"phi", inst.phi.describe()},
      {"lambda", inst.lambda},
      {"s", inst.s},
      {"rho0", ordered_json{{"lo", inst.rho0.lo}, {"hi", inst.rho0.hi}}},
      {"points_per_axis", inst.points_per_axis},
      {"seed", o.seed},
      {"monge_ampere_residual", residual},
      {"non_crossing",
       ordered_json{{"ok", crossing.ok},
                    {"collisions", crossing.collisions.size()}}},
      {"cloud", std::move(sample)},
  };
  write_text(dump_artifact(out), o.out);
  std::fprintf(stderr,
               "monge-ampere residual = %s at s = %s (%d quadrature "
               "points/axis)\n",
               format_double(residual).c_str(),
               format_double(inst.s).c_str(), inst.points_per_axis);
  std::fprintf(stderr,
               "non-crossing over %zu cloud pairs: %s (%zu collisions)\n",
               cloud.size(), crossing.ok ? "ok" : "VIOLATED",
               crossing.collisions.size());
  return 0;
}

// ------------------------------------------------------------------- entropy

lot::EntropyInstance resolve_entropy_instance(const SubOpts& o) {
  lot::EntropyInstance inst = [&] {
    if (!o.experiment.empty()) {
      if (!o.config.empty())
        throw ConfigError("--experiment excludes --config");
      return lot::make_entropy_instance(o.experiment);
    }
    if (o.config.empty())
      throw ConfigError("entropy needs --experiment or --config");
    ordered_json cfg = load_json_file(o.config);
    if (!cfg.is_object())
      throw ConfigError("config \"" + o.config + "\" must be a JSON object");
    const std::string where = o.config;
    WeightedMinkowski st =
        spacetime_from_config(maybe_field(cfg, "spacetime"), where);
    const ordered_json* conv = maybe_field(cfg, "converse");
    if (conv && !conv->is_boolean())
      throw ConfigError(where + ": field \"converse\" must be a boolean");
    return lot::EntropyInstance{
        std::filesystem::path(o.config).stem().string(),
        std::move(st),
        lot::parse_u_spec(string_field(cfg, "u", "u_p:0.5", where)),
        number_field(cfg, "K", 0.0, where),
        vector_field(cfg, "v_hat", where),
        vector_field(cfg, "radii", where),
        static_cast<int>(number_field(cfg, "particles", 4096, where)),
        static_cast<int>(number_field(cfg, "grid_points", 9, where)),
        conv ? conv->get<bool>() : false,
        static_cast<std::uint64_t>(number_field(cfg, "seed", 0, where))};
  }();
  if (o.u_opt->count()) inst.u = lot::parse_u_spec(o.u);
  if (o.grid_opt->count()) inst.grid_points = o.grid;
  if (o.seed_opt->count()) inst.seed = o.seed;
  return inst;
}

int run_entropy(const SubOpts& o) {
  lot::EntropyInstance inst = resolve_entropy_instance(o);
  lot::EntropyRun run = lot::run_entropy_instance(inst);

  std::printf("experiment: %s\n", run.name.c_str());
  std::printf("mode: %s\n", run.converse ? "converse" : "forward");
  std::printf("spacetime: minkowski:%d  weight=%s  N=%s\n", inst.st.dim(),
              inst.st.V().describe().c_str(),
              inst.st.N_is_infinite() ? "inf"
                                      : format_double(inst.st.N()).c_str());
  std::printf("u: %s\n", inst.u->label().c_str());
  std::printf("K: %s\n", format_double(run.K).c_str());
  std::printf("lambda: %s\n", format_double(run.lambda).c_str());
  if (run.converse) {
    const lot::RicciFailureReport& fr = run.failure;
    std::printf("ricci_at_base: %s\n",
                format_double(fr.ricci_at_base).c_str());
    std::printf("predicted_limit: %s\n",
                format_double(fr.predicted_limit).c_str());
    std::printf("%-12s %-22s %-22s %-22s\n", "radius", "lambda",
                "min_margin", "margin_at_s0");
    for (std::size_t i = 0; i < fr.radii.size(); ++i)
      std::printf("%-12.6g %-22.12g %-22.12g %-22.12g\n", fr.radii[i],
                  fr.lambda[i], fr.min_margin[i], fr.margin_at_zero[i]);
    std::printf("violation_observed: %s\n",
                fr.violation_observed ? "yes" : "no");
  } else {
    std::printf("certified_K: %s\n", format_double(run.certified_K).c_str());
    std::printf("min_margin_lambda2: %s\n",
                format_double(run.report.min_margin_lambda2).c_str());
    std::printf("min_margin_l2pi: %s\n",
                format_double(run.report.min_margin_l2pi).c_str());
    std::printf("convex: %s\n", run.report.convex ? "yes" : "no");
  }
  std::printf("margins_ok: %s\n", run.margins_ok ? "yes" : "no");

  if (!o.out.empty()) write_text(curve_csv(run.curve, run.report), o.out);
  return 0;
}

// ------------------------------------------------------------------ selftest

int run_selftest() {
  std::printf("release criteria (threads: %d)\n", lot::support::thread_count());
  const auto results = lot::acceptance::run_all();
  int passed = 0;
  double total = 0.0;
  for (const auto& r : results) {
    std::printf("[%s] %2d  %-38s %7.2fs  %s\n", r.pass ? "PASS" : "FAIL",
                r.id, r.name.c_str(), r.seconds, r.detail.c_str());
    if (r.pass) ++passed;
    total += r.seconds;
  }
  std::printf("%d/%zu criteria passed in %.2fs\n", passed, results.size(),
              total);
  return passed == static_cast<int>(results.size()) ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "lot: Orlicz time separation between measures on weighted Minkowski "
      "spacetimes.\nEnvironment: LOT_THREADS caps worker threads."};
  app.require_subcommand(1);

  SubOpts transport;
  transport.cmd = app.add_subcommand(
      "transport", "Solve ell_u(mu, nu) and emit the optimal coupling");
  add_measure_flags(transport);
  add_u_flag(transport);
  add_tol_flag(transport);
  add_experiment_flag(transport, joined(lot::transport_catalogue()));
  add_config_flag(transport);
  add_out_flag(transport, "Write the solution artifact JSON here");

  SubOpts duality;
  duality.cmd = app.add_subcommand(
      "duality", "Dual certificate, duality gap, cyclical monotonicity");
  add_measure_flags(duality);
  add_u_flag(duality);
  add_tol_flag(duality);
  add_experiment_flag(duality, joined(lot::transport_catalogue()));
  add_config_flag(duality);
  add_out_flag(duality, "Write the certificate artifact JSON here");

  SubOpts geodesic;
  geodesic.cmd = app.add_subcommand(
      "geodesic", "Interpolate the optimal coupling on a uniform grid");
  add_measure_flags(geodesic);
  add_u_flag(geodesic);
  add_tol_flag(geodesic);
  add_grid_flag(geodesic, "Interpolation grid points (default 5)");
  add_experiment_flag(geodesic, joined(lot::transport_catalogue()));
  add_config_flag(geodesic);
  add_out_flag(geodesic, "Write the path artifact JSON here");

  SubOpts map;
  map.cmd = app.add_subcommand(
      "geodesic-map", "Transport map, Jacobians, mass-conservation residual");
  add_u_flag(map);
  add_grid_flag(map, "Quadrature points per axis (default 32)");
  add_seed_flag(map);
  add_experiment_flag(map, joined(lot::map_catalogue()));
  add_config_flag(map);
  add_out_flag(map, "Write the map artifact JSON here");

  SubOpts entropy;
  entropy.cmd = app.add_subcommand(
      "entropy", "Entropy convexity along a displacement geodesic");
  add_u_flag(entropy);
  add_grid_flag(entropy, "Curve grid points (default: instance value)");
  add_seed_flag(entropy);
  add_experiment_flag(entropy, joined(lot::entropy_catalogue()));
  add_config_flag(entropy);
  add_out_flag(entropy, "Write the curve CSV here");

  CLI::App* selftest =
      app.add_subcommand("selftest", "Run the twelve release criteria");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;  // malformed invocation is a config error
  }

  try {
    if (transport.cmd->parsed()) return run_transport(transport);
    if (duality.cmd->parsed()) return run_duality(duality);
    if (geodesic.cmd->parsed()) return run_geodesic(geodesic);
    if (map.cmd->parsed()) return run_geodesic_map(map);
    if (entropy.cmd->parsed()) return run_entropy(entropy);
    if (selftest->parsed()) return run_selftest();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const lot::SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 2;
  } catch (const lot::PreconditionError& e) {
    std::cerr << "precondition violated: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
