#include "afw3d/cli.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "afw3d/assembly.hpp"
#include "afw3d/config.hpp"
#include "afw3d/errors.hpp"
#include "afw3d/stability.hpp"
#include "afw3d/verify.hpp"

namespace afw3d {

namespace {

const std::vector<std::string> kKeys = {"mesh",      "n",       "r",    "orders", "lambda",    "mu",   "levels",
                                        "seed",      "out",     "tol-scale", "samples", "case", "order-cap"};

const std::map<std::string, std::string> kHelp = {
    {"mesh", "mesh file (afw3d-mesh v1); default is the unit cube"},
    {"n", "unit cube subdivisions per axis"},
    {"r", "uniform polynomial order"},
    {"orders", "per-tet orders: comma list or random:LO-HI"},
    {"lambda", "first Lame parameter"},
    {"mu", "shear modulus"},
    {"levels", "number of refinement levels"},
    {"seed", "random seed"},
    {"out", "output directory"},
    {"tol-scale", "multiplier on all check thresholds"},
    {"samples", "random fields per diagram check"},
    {"case", "manufactured case: sine or patch"},
    {"order-cap", "largest accepted order"},
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

template <class T>
bool parse_number(const std::string& text, T& value) {
  const std::string s = trim(text);
  if (s.empty()) return false;
  const char* first = s.data();
  if constexpr (std::is_unsigned_v<T>) {
    if (*first == '-') return false;
  }
  if (*first == '+') ++first;
  const auto res = std::from_chars(first, s.data() + s.size(), value);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

template <class T>
T number_setting(const std::string& key, const std::string& value) {
  T v{};
  if (!parse_number(value, v)) throw ConfigError("--" + key + ": cannot parse '" + value + "'");
  return v;
}

std::string join(const std::vector<std::string>& words, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) out += (i ? sep : "") + words[i];
  return out;
}

struct Setup {
  SimplicialMesh mesh;
  OrderPolicy policy;
  std::string policy_text;
  int min_order = 0;
};

Setup make_setup(const RunConfig& c, int default_n, const std::string& default_orders) {
  Setup s;
  std::optional<std::vector<int>> file_orders;
  if (!c.mesh_path.empty()) {
    MeshFile mf = read_mesh_file(c.mesh_path);
    s.mesh = std::move(mf.mesh);
    file_orders = std::move(mf.orders);
  } else {
    const int n = c.n.value_or(default_n);
    if (n < 1) throw ConfigError("--n must be at least 1");
    s.mesh = unit_cube_mesh(n);
  }

  std::string orders = c.orders;
  if (orders.empty() && !c.r && !file_orders) orders = default_orders;
  if (!orders.empty()) {
    if (c.r) throw ConfigError("--r and --orders are mutually exclusive");
    if (orders.rfind("random:", 0) == 0) {
      const std::string range = orders.substr(7);
      const auto dash = range.find('-');
      int lo = 0, hi = 0;
      if (dash == std::string::npos || !parse_number(range.substr(0, dash), lo) || !parse_number(range.substr(dash + 1), hi) ||
          lo < 0 || lo > hi || hi > c.order_cap)
        throw ConfigError("--orders: expected random:LO-HI with 0 <= LO <= HI <= " + std::to_string(c.order_cap) + ", got '" +
                          orders + "'");
      s.policy = random_policy(lo, hi, c.seed);
      s.min_order = lo;
    } else {
      const std::vector<int> list = parse_order_list(orders, c.order_cap);
      if (static_cast<int>(list.size()) != s.mesh.num_tets())
        throw ConfigError("--orders: list has " + std::to_string(list.size()) + " entries but the mesh has " +
                          std::to_string(s.mesh.num_tets()) + " tets");
      s.policy = list_policy(list);
      s.min_order = *std::min_element(list.begin(), list.end());
    }
    s.policy_text = orders;
  } else if (c.r) {
    if (*c.r < 0 || *c.r > c.order_cap)
      throw ConfigError("--r: order " + std::to_string(*c.r) + " outside [0, " + std::to_string(c.order_cap) + "]");
    s.policy = uniform_policy(*c.r);
    s.min_order = *c.r;
    s.policy_text = "uniform:" + std::to_string(*c.r);
  } else {
    const std::vector<int>& list = *file_orders;
    if (static_cast<int>(list.size()) != s.mesh.num_tets()) throw ConfigError("mesh file order count does not match its tets");
    for (std::size_t t = 0; t < list.size(); ++t)
      if (list[t] < 0 || list[t] > c.order_cap)
        throw ConfigError("mesh file: tet " + std::to_string(t) + ": order " + std::to_string(list[t]) + " outside [0, " +
                          std::to_string(c.order_cap) + "]");
    s.policy = list_policy(list);
    s.min_order = list.empty() ? 0 : *std::min_element(list.begin(), list.end());
    s.policy_text = "mesh-file";
  }
  return s;
}

int levels_or(const RunConfig& c, int def) {
  const int l = c.levels.value_or(def);
  if (l < 1) throw ConfigError("--levels must be at least 1");
  return l;
}

Material material_of(const RunConfig& c) {
  try {
    return Material(c.lambda, c.mu);
  } catch (const InvalidMaterial& e) {
    throw ConfigError(e.what());
  }
}

void record_config(Report& rep, const RunConfig& c, const Setup* s) {
  rep.config["mesh"] = c.mesh_path.empty() ? "cube" : c.mesh_path;
  if (c.n) rep.config["n"] = std::to_string(*c.n);
  if (s) {
    rep.config["orders"] = s->policy_text;
    rep.config["tets"] = std::to_string(s->mesh.num_tets());
  }
  rep.config["lambda"] = format_number(c.lambda);
  rep.config["mu"] = format_number(c.mu);
  if (c.levels) rep.config["levels"] = std::to_string(*c.levels);
  rep.config["seed"] = std::to_string(c.seed);
  rep.config["tol-scale"] = format_number(c.tol_scale);
  rep.config["samples"] = std::to_string(c.samples);
}

// Extra output files by name, written next to the report.
using ExtraFiles = std::map<std::string, std::string>;

Report mesh_gen(const RunConfig& c, ExtraFiles* files) {
  Report rep;
  const Setup s = make_setup(c, 1, "");
  record_config(rep, c, &s);
  const OrderMap r = s.policy(s.mesh);
  const OrderReport valid = validate_order_map(s.mesh, r);
  double min_vol = 1e300;
  rep.table.columns = {"tet", "v0", "v1", "v2", "v3", "order", "volume"};
  for (int t = 0; t < s.mesh.num_tets(); ++t) {
    const auto& v = s.mesh.tet(t);
    min_vol = std::min(min_vol, s.mesh.volume(t));
    rep.table.add_row({std::int64_t{t}, std::int64_t{v[0]}, std::int64_t{v[1]}, std::int64_t{v[2]}, std::int64_t{v[3]},
                       std::int64_t{r.tet[static_cast<std::size_t>(t)]}, s.mesh.volume(t)});
  }
  rep.checks.push_back(make_check("order_violations", static_cast<double>(valid.violations.size()), "<=", 0.0,
                                  "face and edge orders bounded by their neighbours"));
  rep.checks.push_back(make_check("min_volume", min_vol, ">=", 0.0, "positive tet volumes"));
  rep.summary["vertices"] = s.mesh.num_vertices();
  rep.summary["edges"] = s.mesh.num_edges();
  rep.summary["faces"] = s.mesh.num_faces();
  rep.summary["tets"] = s.mesh.num_tets();
  rep.summary["h"] = mesh_size(s.mesh);
  rep.summary["shape_ratio"] = shape_ratio(s.mesh);

  if (files) {
    std::ostringstream os;
    write_mesh(os, s.mesh, &r.tet);
    (*files)["mesh.afw3d"] = os.str();
  }
  return rep;
}

Report verify(const RunConfig& c, const std::string& what) {
  Report rep;
  if (what == "tensor") {
    record_config(rep, c, nullptr);
    rep.checks = tensor_suite(c.seed, c.tol_scale, &rep.table);
  } else if (what == "spaces") {
    record_config(rep, c, nullptr);
    rep.checks = spaces_suite(c.seed, c.tol_scale, &rep.table);
  } else if (what == "commute") {
    const Setup s = make_setup(c, 2, "random:0-2");
    record_config(rep, c, &s);
    const OrderMap r = s.policy(s.mesh);
    rep.checks = commute_suite(s.mesh, r, c.samples, c.seed, c.tol_scale, &rep.table);
    for (int q = 0; q <= 3; ++q) rep.summary["t_order_" + std::to_string(q)] = select_t(q);
  } else {
    throw ConfigError("unknown verify suite '" + what + "'");
  }
  return rep;
}

Report infsup(const RunConfig& c) {
  Report rep;
  const Setup s = make_setup(c, 1, "");
  record_config(rep, c, &s);
  const Material m = material_of(c);
  const auto rows = stability_sweep(refinement_sequence(s.mesh, levels_or(c, 2)), s.policy, m, 0, c.seed);
  rep.table.columns = {"level", "tets", "h", "stress_dofs", "multiplier_dofs", "beta", "coercivity", "bound"};
  std::vector<double> betas;
  for (const auto& row : rows) {
    rep.table.add_row({std::int64_t{row.level}, std::int64_t{row.tets}, row.h, std::int64_t{row.stress_dofs},
                       std::int64_t{row.multiplier_dofs}, row.beta, row.coercivity, row.bound});
    const std::string l = std::to_string(row.level);
    rep.checks.push_back(make_check("beta_level" + l, row.beta, ">=", 1e-6, "discrete inf-sup constant"));
    rep.checks.push_back(make_check("coercivity_level" + l, row.coercivity / row.bound, ">=", 1.0 - 1e-8 * c.tol_scale,
                                    "kernel coercivity over compliance bound"));
    betas.push_back(row.beta);
  }
  const double drift = relative_drift(betas);
  if (rows.size() > 1) rep.checks.push_back(make_check("beta_drift", drift, "<=", 0.2, "(max - min) / max over levels"));
  rep.summary["beta_min"] = *std::min_element(betas.begin(), betas.end());
  rep.summary["beta_drift"] = drift;
  return rep;
}

ManufacturedCase case_of(const RunConfig& c) {
  const Material m = material_of(c);
  if (c.case_name == "sine") return sine_bubble(m);
  if (c.case_name == "patch") {
    Mat3 s;
    s << 1.0, 0.2, 0.3, 0.2, 2.0, 0.4, 0.3, 0.4, 3.0;
    return constant_stress(m, s);
  }
  throw ConfigError("--case: expected sine or patch, got '" + c.case_name + "'");
}

Report solve(const RunConfig& c, ExtraFiles* files) {
  Report rep;
  const Setup s = make_setup(c, 1, "");
  record_config(rep, c, &s);
  rep.config["case"] = c.case_name;
  const ManufacturedCase mc = case_of(c);
  const OrderMap r = s.policy(s.mesh);
  const BlockSaddleSystem sys = assemble(s.mesh, r, mc);
  const SaddleSolution sol = solve_saddle(s.mesh, sys);
  const ErrorNorms e = error_norms(s.mesh, sys, sol.stress, sol.displacement, sol.rotation, mc);
  rep.table.columns = {"tets", "dofs", "stress_l2", "stress_div", "displacement_l2", "rotation_l2", "total", "residual"};
  rep.table.add_row({std::int64_t{s.mesh.num_tets()}, std::int64_t{sys.dofs.total()}, e.stress_l2, e.stress_div,
                     e.displacement_l2, e.rotation_l2, e.total(), sol.residual});
  rep.checks.push_back(make_check("solve_residual", sol.residual, "<=", 1e-9 * c.tol_scale, "relative algebraic residual"));
  if (c.case_name == "patch") {
    rep.checks.push_back(make_check("patch_stress", e.stress_l2, "<=", 1e-10 * c.tol_scale, "L2 stress error"));
    rep.checks.push_back(make_check("patch_rotation", e.rotation_l2, "<=", 1e-10 * c.tol_scale, "L2 rotation error"));
  }
  rep.summary["total_error"] = e.total();

  if (files) {
    std::ostringstream coef, samples;
    write_solution(coef, samples, s.mesh, sol);
    (*files)["solve_coefficients.txt"] = coef.str();
    (*files)["solve_samples.csv"] = samples.str();
  }
  return rep;
}

Report converge(const RunConfig& c) {
  Report rep;
  const Setup s = make_setup(c, 1, "");
  record_config(rep, c, &s);
  rep.config["case"] = c.case_name;
  const ManufacturedCase mc = case_of(c);
  const ConvergenceReport cr = convergence_study(mc, s.policy, refinement_sequence(s.mesh, levels_or(c, 3)));
  rep.table.columns = {"level",       "tets",        "h",          "dofs",   "stress_l2",       "stress_div",
                       "displacement_l2", "rotation_l2", "total", "best_total", "rate_total", "rate_u", "quasi_optimality"};
  for (const auto& row : cr.rows)
    rep.table.add_row({std::int64_t{row.level}, std::int64_t{row.tets}, row.h, std::int64_t{row.dofs}, row.error.stress_l2,
                       row.error.stress_div, row.error.displacement_l2, row.error.rotation_l2, row.error.total(),
                       row.best.total(), row.rate_total, row.rate_u, row.quasi_optimality});
  if (cr.rows.size() > 1 && c.case_name == "sine") {
    const auto& last = cr.rows.back();
    rep.checks.push_back(make_check("rate_total", last.rate_total, ">=", 0.9, "last two levels"));
    if (s.min_order >= 1) rep.checks.push_back(make_check("rate_u", last.rate_u, ">=", 1.9, "last two levels"));
    rep.checks.push_back(make_check("quasi_optimality_drift", cr.ratio_drift(), "<=", 0.3, "(max - min) / max over levels"));
  }
  rep.summary["quasi_optimality_max"] = 0.0;
  for (const auto& row : cr.rows) rep.summary["quasi_optimality_max"] = std::max(rep.summary["quasi_optimality_max"], row.quasi_optimality);
  rep.summary["quasi_optimality_drift"] = cr.ratio_drift();
  return rep;
}

}  // namespace

void apply_setting(RunConfig& config, const std::string& key, const std::string& value) {
  if (key == "mesh") config.mesh_path = trim(value);
  else if (key == "n") config.n = number_setting<int>(key, value);
  else if (key == "r") config.r = number_setting<int>(key, value);
  else if (key == "orders") config.orders = trim(value);
  else if (key == "lambda") config.lambda = number_setting<double>(key, value);
  else if (key == "mu") config.mu = number_setting<double>(key, value);
  else if (key == "levels") config.levels = number_setting<int>(key, value);
  else if (key == "seed") config.seed = number_setting<std::uint64_t>(key, value);
  else if (key == "out") config.out = trim(value);
  else if (key == "tol-scale") config.tol_scale = number_setting<double>(key, value);
  else if (key == "samples") config.samples = number_setting<int>(key, value);
  else if (key == "case") config.case_name = trim(value);
  else if (key == "order-cap") config.order_cap = number_setting<int>(key, value);
  else throw ConfigError("unknown setting '" + key + "'");
  if (config.tol_scale <= 0.0) throw ConfigError("--tol-scale must be positive");
  if (config.samples < 0) throw ConfigError("--samples must be non-negative");
  if (config.order_cap < 0 || config.order_cap > kMaxOrder)
    throw ConfigError("--order-cap must lie in [0, " + std::to_string(kMaxOrder) + "]");
}

void apply_config_file(RunConfig& config, const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
    apply_setting(config, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
}

std::vector<int> parse_order_list(const std::string& text, int cap) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::string tet = "tet " + std::to_string(out.size());
    int v = 0;
    if (!parse_number(item, v)) throw ConfigError("--orders: " + tet + ": '" + trim(item) + "' is not an integer");
    if (v < 0 || v > cap)
      throw ConfigError("--orders: " + tet + ": order " + std::to_string(v) + " outside [0, " + std::to_string(cap) + "]");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("--orders: empty list");
  if (!text.empty() && text.back() == ',') throw ConfigError("--orders: tet " + std::to_string(out.size()) + ": missing value");
  return out;
}

namespace {

Report build(const RunConfig& config, ExtraFiles* files) {
  const auto& cmd = config.command;
  Report rep;
  if (cmd == std::vector<std::string>{"mesh", "gen"}) rep = mesh_gen(config, files);
  else if (cmd.size() == 2 && cmd[0] == "verify") rep = verify(config, cmd[1]);
  else if (cmd == std::vector<std::string>{"infsup"}) rep = infsup(config);
  else if (cmd == std::vector<std::string>{"solve"}) rep = solve(config, files);
  else if (cmd == std::vector<std::string>{"converge"}) rep = converge(config);
  else throw ConfigError("unknown command '" + join(cmd, " ") + "'");
  rep.command = join(cmd, " ");
  return rep;
}

}  // namespace

Report build_report(const RunConfig& config) { return build(config, nullptr); }

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    ExtraFiles files;
    const Report rep = build(config, &files);
    write_report(rep, config.out, join(config.command, "_"));
    for (const auto& [name, text] : files) {
      std::ofstream os(std::filesystem::path(config.out) / name, std::ios::binary);
      if (!os || !(os << text)) throw ConfigError("cannot write " + name + " under " + config.out);
    }
    print_report(out, rep);
    if (!rep.passed()) {
      for (const auto& c : rep.checks)
        if (!c.passed)
          err << "check failed: " << c.name << " = " << format_number(c.value) << ", required " << c.relation << ' '
              << format_number(c.threshold) << '\n';
      return kExitCheckFailure;
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    err << e.what() << '\n';
    return kExitConfigError;
  } catch (const MeshFormatError& e) {
    err << e.what() << '\n';
    return kExitConfigError;
  } catch (const NonMonotoneOrder& e) {
    err << e.what() << '\n';
    return kExitConfigError;
  } catch (const DegenerateTet& e) {
    err << e.what() << '\n';
    return kExitConfigError;
  } catch (const NonManifoldFace& e) {
    err << e.what() << '\n';
    return kExitConfigError;
  } catch (const Error& e) {
    err << e.what() << '\n';
    return kExitCheckFailure;
  }
}

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mixed finite elements for elasticity with weakly imposed symmetry"};
  app.require_subcommand(1);
  std::map<std::string, std::string> flags;
  std::string config_path;
  app.add_option("--config", config_path, "key=value settings file; flags take precedence");
  for (const auto& k : kKeys) app.add_option("--" + k, flags[k], kHelp.at(k));

  std::vector<std::string> command;
  auto* mesh = app.add_subcommand("mesh", "mesh utilities");
  mesh->require_subcommand(1);
  mesh->fallthrough();
  mesh->add_subcommand("gen", "generate or read a mesh and write it with its orders")->fallthrough();
  auto* ver = app.add_subcommand("verify", "verification suites");
  ver->require_subcommand(1);
  ver->fallthrough();
  for (const char* s : {"tensor", "spaces", "commute"}) ver->add_subcommand(s)->fallthrough();
  app.add_subcommand("infsup", "inf-sup and kernel coercivity over refinement levels")->fallthrough();
  app.add_subcommand("solve", "solve a manufactured case")->fallthrough();
  app.add_subcommand("converge", "convergence study over refinement levels")->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kExitConfigError;
  }
  for (const CLI::App* sub = &app; !sub->get_subcommands().empty();) {
    sub = sub->get_subcommands().front();
    command.push_back(sub->get_name());
  }

  RunConfig config;
  config.command = command;
  try {
    if (!config_path.empty()) apply_config_file(config, config_path);
    for (const auto& k : kKeys)
      if (app.count("--" + k) > 0) apply_setting(config, k, flags[k]);
  } catch (const ConfigError& e) {
    err << e.what() << '\n';
    return kExitConfigError;
  }
  return run(config, out, err);
}

}  // namespace afw3d
