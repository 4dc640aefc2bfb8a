#include "kdsqnm/cli.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>

#include <CLI11.hpp>

namespace kdsqnm {

namespace {

// ---------------------------------------------------------------------------
// Value codecs shared by flags and the config file

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const std::string& what) {
  throw Error(ErrorCode::InvalidArgument, "--" + key + ": cannot parse '" + value + "' as " + what);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string s = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) bad_value(key, text, "a number");
  return v;
}

template <class Int>
Int parse_integer(const std::string& key, const std::string& text) {
  const std::string s = trim(text);
  Int v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) bad_value(key, text, "an integer");
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string s = trim(text);
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  bad_value(key, text, "true or false");
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) items.push_back(trim(item));
  return items;
}

template <class T, class F>
std::vector<T> parse_list(const std::string& key, const std::string& text, F&& parse_one) {
  std::vector<T> out;
  for (const auto& item : split_list(text)) out.push_back(parse_one(key, item));
  if (out.empty()) bad_value(key, text, "a comma-separated list");
  return out;
}

template <class T, class F>
std::string join(const std::vector<T>& xs, F&& fmt) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ',';
    s += fmt(xs[i]);
  }
  return s;
}

std::string format_optional(const std::optional<double>& x) { return x ? format_double(*x) : ""; }

std::optional<double> parse_optional(const std::string& key, const std::string& text) {
  if (trim(text).empty()) return std::nullopt;
  return parse_double(key, text);
}

std::string jacobian_name(JacobianMethod m) {
  return m == JacobianMethod::analytic_chain ? "analytic" : "fd";
}

JacobianMethod parse_jacobian(const std::string& key, const std::string& text) {
  const std::string s = trim(text);
  if (s == "fd") return JacobianMethod::finite_difference;
  if (s == "analytic") return JacobianMethod::analytic_chain;
  bad_value(key, text, "fd or analytic");
}

const std::vector<std::string>& limit_quantities() {
  static const std::vector<std::string> q{"det_limit", "wminusu_limit"};
  return q;
}

bool is_limit_quantity(const std::string& q) {
  return q == limit_quantities()[0] || q == limit_quantities()[1];
}

// ---------------------------------------------------------------------------
// Config schema: one entry per key, in file order

struct Field {
  std::string key;
  std::string help;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

#define KDS_DOUBLE(name, member, text)                                                       \
  Field {                                                                                    \
    name, text, [](const RunConfig& c) { return format_double(c.member); },                  \
        [](RunConfig& c, const std::string& v) { c.member = parse_double(name, v); }         \
  }
#define KDS_INT(name, member, text)                                                          \
  Field {                                                                                    \
    name, text, [](const RunConfig& c) { return std::to_string(c.member); },                 \
        [](RunConfig& c, const std::string& v) { c.member = parse_integer<int>(name, v); }   \
  }
#define KDS_OPTIONAL(name, member, text)                                                     \
  Field {                                                                                    \
    name, text, [](const RunConfig& c) { return format_optional(c.member); },                \
        [](RunConfig& c, const std::string& v) { c.member = parse_optional(name, v); }       \
  }
#define KDS_BOOL(name, member, text)                                                         \
  Field {                                                                                    \
    name, text, [](const RunConfig& c) { return std::string(c.member ? "true" : "false"); }, \
        [](RunConfig& c, const std::string& v) { c.member = parse_bool(name, v); }           \
  }

const std::vector<Field>& schema() {
  static const std::vector<Field> fields = {
      {"command", "subcommand name",
       [](const RunConfig& c) { return c.command; },
       [](RunConfig& c, const std::string& v) {
         const std::string s = trim(v);
         const auto& subs = subcommands();
         if (!s.empty() && std::find(subs.begin(), subs.end(), s) == subs.end()) {
           bad_value("command", v, "a subcommand");
         }
         c.command = s;
       }},
      KDS_DOUBLE("M", M, "mass M > 0"),
      KDS_DOUBLE("a", a, "rotation parameter a"),
      KDS_DOUBLE("Lambda", Lambda, "cosmological constant Lambda >= 0"),
      KDS_INT("n", n, "overtone index n >= 0"),
      KDS_INT("ell", ell, "angular index ell >= 1"),
      {"branch", "orbit branch: co or counter",
       [](const RunConfig& c) { return std::string(to_string(c.branch)); },
       [](RunConfig& c, const std::string& v) {
         const std::string s = trim(v);
         if (s != "co" && s != "counter") bad_value("branch", v, "co or counter");
         c.branch = parse_branch(s);
       }},
      KDS_OPTIONAL("U", U, "observable U"),
      KDS_OPTIONAL("V", V, "observable V"),
      KDS_OPTIONAL("W", W, "observable W (normalised damping)"),
      KDS_BOOL("unlabeled", unlabeled, "invert from (U, |V|) without branch labels"),
      KDS_DOUBLE("tolerance", tolerance, "Newton residual tolerance (orbit and 2D inversion)"),
      KDS_DOUBLE("tolerance3", tolerance3, "Newton residual tolerance (3D inversion)"),
      KDS_DOUBLE("collision_tolerance", collision_tolerance, "pairwise (U, V) collision threshold"),
      {"jacobian", "Jacobian method: fd or analytic",
       [](const RunConfig& c) { return jacobian_name(c.jacobian); },
       [](RunConfig& c, const std::string& v) { c.jacobian = parse_jacobian("jacobian", v); }},
      KDS_DOUBLE("M_min", rect.M_min, "rectangle lower M"),
      KDS_DOUBLE("M_max", rect.M_max, "rectangle upper M"),
      KDS_DOUBLE("a_min", rect.a_min, "rectangle lower a"),
      KDS_DOUBLE("a_max", rect.a_max, "rectangle upper a"),
      KDS_INT("nM", rect.nM, "rectangle nodes along M"),
      KDS_INT("na", rect.na, "rectangle nodes along a"),
      KDS_BOOL("nodes", nodes, "emit one row per node instead of the summary"),
      {"quantity", "Omega_plus, lambda_plus, r_plus, U_geo, V_geo, det_limit or wminusu_limit",
       [](const RunConfig& c) { return c.quantity; },
       [](RunConfig& c, const std::string& v) {
         const std::string s = trim(v);
         if (!is_limit_quantity(s)) {
           try {
             parse_series_quantity(s);
           } catch (const Error&) {
             bad_value("quantity", v, "a verify quantity");
           }
         }
         c.quantity = s;
       }},
      {"parity", "fit parity: auto, none, even or odd",
       [](const RunConfig& c) { return c.parity ? std::string(to_string(*c.parity)) : std::string("auto"); },
       [](RunConfig& c, const std::string& v) {
         const std::string s = trim(v);
         if (s == "auto") {
           c.parity.reset();
           return;
         }
         try {
           c.parity = parse_parity(s);
         } catch (const Error&) {
           bad_value("parity", v, "auto, none, even or odd");
         }
       }},
      KDS_INT("degree", degree, "fit polynomial degree (3 to 5)"),
      KDS_DOUBLE("fit_a_max", fit.a_max, "fit grid half-width"),
      KDS_INT("fit_points", fit.points, "fit grid points (even)"),
      {"limit_a", "a values for det_limit / wminusu_limit, decreasing",
       [](const RunConfig& c) { return join(c.limit_a, format_double); },
       [](RunConfig& c, const std::string& v) { c.limit_a = parse_list<double>("limit_a", v, parse_double); }},
      {"ells", "ell values for the noise study",
       [](const RunConfig& c) { return join(c.ells, [](int x) { return std::to_string(x); }); },
       [](RunConfig& c, const std::string& v) { c.ells = parse_list<int>("ells", v, parse_integer<int>); }},
      {"eps", "noise amplitudes for the noise study",
       [](const RunConfig& c) { return join(c.eps, format_double); },
       [](RunConfig& c, const std::string& v) { c.eps = parse_list<double>("eps", v, parse_double); }},
      KDS_INT("trials", trials, "noise trials per (ell, eps)"),
      {"seed", "noise generator seed",
       [](const RunConfig& c) { return std::to_string(c.seed); },
       [](RunConfig& c, const std::string& v) { c.seed = parse_integer<std::uint64_t>("seed", v); }},
      {"format", "output format: csv or json",
       [](const RunConfig& c) { return to_string(c.format); },
       [](RunConfig& c, const std::string& v) {
         const std::string s = trim(v);
         if (s != "csv" && s != "json") bad_value("format", v, "csv or json");
         c.format = parse_output_format(s);
       }},
      {"out", "output path (default stdout)",
       [](const RunConfig& c) { return c.out; },
       [](RunConfig& c, const std::string& v) { c.out = trim(v); }},
  };
  return fields;
}

#undef KDS_DOUBLE
#undef KDS_INT
#undef KDS_OPTIONAL
#undef KDS_BOOL

const Field& field(const std::string& key) {
  for (const auto& f : schema()) {
    if (f.key == key) return f;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown config key '" + key + "'");
}

// ---------------------------------------------------------------------------
// Commands

struct Command {
  std::string name;
  std::string description;
  std::vector<std::string> keys;  ///< flags accepted besides format/out/config
  std::string columns;            ///< documented in --help
  std::function<Table(const RunConfig&)> run;
};

Table horizons_table(const RunConfig& c) {
  const HorizonData h = horizon_roots(SpacetimeParams(c.M, c.a, c.Lambda));
  std::string notes;
  for (std::size_t i = 0; i < h.notes.size(); ++i) notes += (i ? "; " : "") + h.notes[i];
  Table t{{"M", "a", "Lambda", "r0", "r_minus", "r_e", "r_c", "kappa_e", "kappa_c", "L_sep", "residual",
           "cosmological_horizon", "notes"},
          {}};
  t.add_row({c.M, c.a, c.Lambda, h.r0, h.r_minus, h.r_e, h.r_c, h.kappa_e, h.kappa_c, h.L_sep, h.residual,
             h.cosmological_horizon, notes});
  return t;
}

Table orbit_table(const RunConfig& c) {
  const SpacetimeParams p(c.M, c.a, c.Lambda);
  OrbitSolverOptions opts;
  opts.tolerance = c.tolerance;
  const CircularOrbit o = solve_circular_orbit(p, c.branch, opts);
  Table t{{"M", "a", "Lambda", "branch", "r_orbit", "Omega", "b", "lyapunov", "omega_sharp", "residual",
           "jacobian_det", "iterations", "continued"},
          {}};
  t.add_row({c.M, c.a, c.Lambda, std::string(to_string(c.branch)), o.r_orbit, o.Omega, o.b, o.lyapunov,
             branch_sign(c.branch) * o.Omega, o.residual, o.jacobian_det, std::int64_t{o.iterations},
             o.continued});
  return t;
}

Table coeffs_table(const RunConfig& c) {
  const SeriesCoefficients s = closed_form_coefficients(c.M, c.Lambda);
  Table t{{"M", "Lambda", "Omega_ph", "Omega_ph_prime", "c_Z", "c_Omega2", "c_lambda2", "r1", "r2", "b0", "b1",
           "b2", "beta2"},
          {}};
  t.add_row({c.M, c.Lambda, s.Omega_ph, s.Omega_ph_prime, s.c_Z, s.c_Omega2, s.c_lambda2, s.r1, s.r2, s.b0,
             s.b1, s.b2, s.beta2});
  return t;
}

Table forward_table(const RunConfig& c) {
  const SpacetimeParams p(c.M, c.a, c.Lambda);
  const PseudopolePair pair = synthesize_pair(p, c.n, c.ell);
  const ThreeObservables h = three_observables(pair);
  const SingleModeObservables s = single_mode_observables(pair);
  Table t{{"M", "a", "Lambda", "n", "ell", "omega_plus_re", "omega_plus_im", "omega_minus_re", "omega_minus_im",
           "U", "V", "W_tilde", "U_plus"},
          {}};
  t.add_row({c.M, c.a, c.Lambda, std::int64_t{c.n}, std::int64_t{c.ell}, pair.plus.omega.real(),
             pair.plus.omega.imag(), pair.minus.omega.real(), pair.minus.omega.imag(), h.U, h.V, h.W_tilde,
             s.U_plus});
  return t;
}

InversionOptions inversion_options(const RunConfig& c, bool three) {
  InversionOptions o = three ? InversionOptions::three_parameter() : InversionOptions{};
  o.tolerance = three ? c.tolerance3 : c.tolerance;
  o.jacobian = c.jacobian;
  return o;
}

std::vector<Cell> recon_cells(const ReconResult& r) {
  return {r.params.M(), r.params.a(), r.params.Lambda(), std::int64_t{r.iterations}, r.final_residual,
          r.jacobian_det, r.stability_constant, r.seed_M, r.seed_a};
}

Table invert_table(const RunConfig& c) {
  if (!c.U || !c.V) throw Error(ErrorCode::InvalidArgument, "invert requires --U and --V");
  Table t{{"M", "a", "Lambda", "iterations", "final_residual", "jacobian_det", "stability_constant", "seed_M",
           "seed_a", "sign_ambiguous"},
          {}};
  const InversionOptions opts = inversion_options(c, false);
  std::vector<Cell> row;
  if (c.unlabeled) {
    const UnlabeledResult u = unlabeled_invert(*c.U, *c.V, c.Lambda, c.ell, c.n, opts);
    row = recon_cells(u.recon);
    row.emplace_back(u.sign_ambiguous);
  } else {
    row = recon_cells(newton_invert_two({*c.U, *c.V}, c.Lambda, c.ell, c.n, opts));
    row.emplace_back(false);
  }
  t.add_row(std::move(row));
  return t;
}

Table invert3_table(const RunConfig& c) {
  if (!c.U || !c.V || !c.W) throw Error(ErrorCode::InvalidArgument, "invert3 requires --U, --V and --W");
  const ReconResult r = newton_invert_three({*c.U, *c.V, *c.W}, c.ell, c.n, inversion_options(c, true));
  Table t{{"M", "a", "Lambda", "iterations", "final_residual", "jacobian_det", "stability_constant", "seed_M",
           "seed_a", "seed_Lambda"},
          {}};
  std::vector<Cell> row = recon_cells(r);
  row.emplace_back(r.seed_Lambda);
  t.add_row(std::move(row));
  return t;
}

Table pmatrix_table(const RunConfig& c) {
  const PMatrixReport r =
      p_matrix_rectangle_scan(c.rect, c.Lambda, c.ell, c.n, Execution::parallel, c.collision_tolerance);
  if (c.nodes) {
    Table t{{"M", "a", "U", "V", "minus_dU_dM", "dV_da", "minus_det", "ok"}, {}};
    for (const auto& nd : r.nodes) {
      t.add_row({nd.M, nd.a, nd.U, nd.V, nd.minus_dU_dM, nd.dV_da, nd.minus_det, nd.ok});
    }
    return t;
  }
  Table t{{"Lambda", "ell", "n", "nM", "na", "nodes_used", "nodes_filtered", "truncated", "min_minus_dU_dM",
           "min_dV_da", "min_minus_det", "signs_pass", "min_separation", "collision_found", "pass"},
          {}};
  t.add_row({c.Lambda, std::int64_t{c.ell}, std::int64_t{c.n}, std::int64_t{c.rect.nM}, std::int64_t{c.rect.na},
             static_cast<std::int64_t>(r.nodes.size()), std::int64_t{r.nodes_filtered}, r.truncated,
             r.min_minus_dU_dM, r.min_dV_da, r.min_minus_det, r.signs_pass, r.min_separation, r.collision_found,
             r.pass});
  return t;
}

Table verify_table(const RunConfig& c) {
  if (is_limit_quantity(c.quantity)) {
    const LimitCheckReport r = c.quantity == "det_limit"
                                   ? jacobian_det_limit_check(c.M, c.Lambda, c.limit_a, c.jacobian)
                                   : wminusu_limit_check(c.M, c.Lambda, c.limit_a);
    Table t{{"target", "a", "ratio", "extrapolated", "estimate", "reference", "rel_error", "refinement_improves"},
            {}};
    for (std::size_t i = 0; i < r.a_values.size(); ++i) {
      const double ex = i < r.extrapolated.size() ? r.extrapolated[i] : std::numeric_limits<double>::quiet_NaN();
      t.add_row({r.target, r.a_values[i], r.ratios[i], ex, r.estimate, r.reference, r.rel_error,
                 r.refinement_improves});
    }
    return t;
  }
  const SeriesFitReport r =
      fit_series_coefficients(parse_series_quantity(c.quantity), c.M, c.Lambda, c.fit, c.degree, c.parity);
  Table t{{"target", "M", "Lambda", "parity", "grid", "c1", "c1_err", "c1_ref", "c1_abs_disc", "c1_rel_disc", "c2",
           "c2_err", "c2_ref", "c2_abs_disc", "c2_rel_disc", "fit_residual", "condition_number"},
          {}};
  t.add_row({r.target, c.M, c.Lambda, std::string(to_string(r.parity)), r.grid_description, r.c1, r.c1_err,
             r.c1_ref, r.c1_abs_disc, r.c1_rel_disc, r.c2, r.c2_err, r.c2_ref, r.c2_abs_disc, r.c2_rel_disc,
             r.fit_residual, r.condition_number});
  return t;
}

Table noise_table(const RunConfig& c) {
  const NoiseStudyResult r =
      noise_propagation_study(SpacetimeParams(c.M, c.a, c.Lambda), c.n, c.ells, c.eps, c.trials, c.seed);
  Table t{{"seed", "M", "a", "Lambda", "n", "ell", "eps", "trials", "max_error", "scaled_error",
           "stability_constant"},
          {}};
  for (const auto& row : r.rows) {
    t.add_row({std::to_string(r.seed), c.M, c.a, c.Lambda, std::int64_t{c.n}, std::int64_t{row.ell}, row.eps,
               std::int64_t{row.trials}, row.max_error, row.scaled_error, row.stability_constant});
  }
  return t;
}

const std::vector<Command>& commands() {
  static const std::vector<Command> cmds = {
      {"horizons", "Horizon radii and surface gravities", {"M", "a", "Lambda"},
       "M,a,Lambda,r0,r_minus,r_e,r_c,kappa_e,kappa_c,L_sep,residual,cosmological_horizon,notes",
       horizons_table},
      {"orbit", "Equatorial circular photon orbit", {"M", "a", "Lambda", "branch", "tolerance"},
       "M,a,Lambda,branch,r_orbit,Omega,b,lyapunov,omega_sharp,residual,jacobian_det,iterations,continued",
       orbit_table},
      {"coeffs", "Closed-form small-a coefficients", {"M", "Lambda"},
       "M,Lambda,Omega_ph,Omega_ph_prime,c_Z,c_Omega2,c_lambda2,r1,r2,b0,b1,b2,beta2", coeffs_table},
      {"forward", "Pseudopole pair and observables", {"M", "a", "Lambda", "n", "ell"},
       "M,a,Lambda,n,ell,omega_plus_re,omega_plus_im,omega_minus_re,omega_minus_im,U,V,W_tilde,U_plus",
       forward_table},
      {"invert", "Recover (M, a) from (U, V) at known Lambda",
       {"U", "V", "Lambda", "ell", "n", "tolerance", "jacobian", "unlabeled"},
       "M,a,Lambda,iterations,final_residual,jacobian_det,stability_constant,seed_M,seed_a,sign_ambiguous",
       invert_table},
      {"invert3", "Recover (M, a, Lambda) from (U, V, W)", {"U", "V", "W", "ell", "n", "tolerance3", "jacobian"},
       "M,a,Lambda,iterations,final_residual,jacobian_det,stability_constant,seed_M,seed_a,seed_Lambda",
       invert3_table},
      {"scan-pmatrix", "P-matrix sign and collision scan on a rectangle",
       {"Lambda", "ell", "n", "M_min", "M_max", "a_min", "a_max", "nM", "na", "collision_tolerance", "nodes"},
       "summary: Lambda,ell,n,nM,na,nodes_used,nodes_filtered,truncated,min_minus_dU_dM,min_dV_da,"
       "min_minus_det,signs_pass,min_separation,collision_found,pass; with --nodes: "
       "M,a,U,V,minus_dU_dM,dV_da,minus_det,ok",
       pmatrix_table},
      {"verify-series", "Fit small-a coefficients or check a -> 0 limits",
       {"quantity", "M", "Lambda", "parity", "degree", "fit_a_max", "fit_points", "limit_a", "jacobian"},
       "series: target,M,Lambda,parity,grid,c1,c1_err,c1_ref,c1_abs_disc,c1_rel_disc,c2,c2_err,c2_ref,"
       "c2_abs_disc,c2_rel_disc,fit_residual,condition_number; limits: "
       "target,a,ratio,extrapolated,estimate,reference,rel_error,refinement_improves",
       verify_table},
      {"noise-study", "Parameter error under complex frequency noise",
       {"M", "a", "Lambda", "n", "ells", "eps", "trials", "seed"},
       "seed,M,a,Lambda,n,ell,eps,trials,max_error,scaled_error,stability_constant", noise_table},
  };
  return cmds;
}

const Command& command(const std::string& name) {
  for (const auto& c : commands()) {
    if (c.name == name) return c;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown command '" + name + "'");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidArgument, "--config: cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::optional<std::string> config_path(const std::vector<std::string>& args) {
  std::optional<std::string> path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    }
  }
  return path;
}

bool is_usage_error(const Error& e) { return e.code() == ErrorCode::InvalidArgument; }

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& c : commands()) v.push_back(c.name);
    return v;
  }();
  return names;
}

std::string to_config_text(const RunConfig& cfg) {
  std::string text;
  for (const auto& f : schema()) text += f.key + " = " + f.get(cfg) + "\n";
  return text;
}

RunConfig parse_config_text(const std::string& text, RunConfig base) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::InvalidArgument, "config line " + std::to_string(lineno) + ": expected key = value");
    }
    field(trim(line.substr(0, eq))).set(base, line.substr(eq + 1));
  }
  return base;
}

Table execute(const RunConfig& cfg) { return command(cfg.command).run(cfg); }

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Kerr-de Sitter photon-orbit spectra: forward model, inversion and verification", "kdsqnm"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  try {
    if (const auto path = config_path(args)) cfg = parse_config_text(read_file(*path), cfg);

    for (const auto& cmd : commands()) {
      CLI::App* sub = app.add_subcommand(cmd.name, cmd.description);
      sub->footer("CSV/JSON columns: " + cmd.columns);
      sub->add_option("--config", "flat key = value file; flags override it");
      std::vector<std::string> keys = cmd.keys;
      keys.insert(keys.end(), {"format", "out"});
      for (const auto& key : keys) {
        const Field& f = field(key);
        if (key == "unlabeled" || key == "nodes") {
          sub->add_flag_callback("--" + key, [&cfg, &f] { f.set(cfg, "true"); }, f.help);
        } else {
          sub->add_option_function<std::string>(
              "--" + key, [&cfg, &f](const std::string& v) { f.set(cfg, v); }, f.help);
        }
      }
      sub->callback([&cfg, name = cmd.name] { cfg.command = name; });
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  } catch (const Error& e) {
    err << "kdsqnm: " << e.what() << '\n';
    return 1;
  }

  try {
    const Table table = execute(cfg);
    std::ostringstream text;
    write_table(table, cfg.format, text);
    if (cfg.out.empty()) {
      out << text.str();
    } else {
      std::ofstream file(cfg.out, std::ios::binary);
      if (!file || !(file << text.str())) {
        err << "kdsqnm: --out: cannot write '" << cfg.out << "'\n";
        return 1;
      }
    }
  } catch (const Error& e) {
    err << "kdsqnm: " << e.what() << '\n';
    return is_usage_error(e) ? 1 : 2;
  }
  return 0;
}

}  // namespace kdsqnm
