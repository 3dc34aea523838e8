#include "catqed/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "catqed/analysis.hpp"
#include "catqed/analytic.hpp"
#include "catqed/version.hpp"

namespace catqed {
namespace {

using nlohmann::ordered_json;

constexpr double kTwoPi = 6.283185307179586476925286766559;

// ---------------------------------------------------------------------------
// Small string/number helpers
// ---------------------------------------------------------------------------

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// '#' starts a comment at the beginning of a line or after whitespace, so
// values such as directory names may still contain '#'.
std::string strip_comment(const std::string& line) {
  for (size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '#' &&
        (i == 0 || std::isspace(static_cast<unsigned char>(line[i - 1])))) {
      return line.substr(0, i);
    }
  }
  return line;
}

[[noreturn]] void parse_fail(int line_no, const std::string& message) {
  throw std::invalid_argument("config line " + std::to_string(line_no) + ": " +
                              message);
}

double parse_double(const std::string& value, int line_no,
                    const std::string& key) {
  const std::string v = trim(value);
  if (!v.empty()) {
    char* end = nullptr;
    double x = std::strtod(v.c_str(), &end);
    if (end == v.c_str() + v.size() && std::isfinite(x)) return x;
  }
  parse_fail(line_no, "invalid number '" + value + "' for key '" + key + "'");
}

int parse_int(const std::string& value, int line_no, const std::string& key) {
  double x = parse_double(value, line_no, key);
  if (x != std::floor(x) || std::abs(x) > 1e9) {
    parse_fail(line_no, "expected an integer for key '" + key + "'");
  }
  return static_cast<int>(x);
}

std::vector<double> parse_double_list(const std::string& value, int line_no,
                                      const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    out.push_back(parse_double(item, line_no, key));
  }
  if (out.empty()) parse_fail(line_no, "empty value list for key '" + key + "'");
  return out;
}

std::string format_number(double v, int precision) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, v);
  return buf;
}

std::string format_value_tag(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

// ---------------------------------------------------------------------------
// Model field access by dotted path (used by config keys and sweeps)
// ---------------------------------------------------------------------------

bool set_model_field(ModelParams& m, const std::string& leaf, double value) {
  if (leaf == "omega_c") m.omega_c = value;
  else if (leaf == "omega_v") m.omega_v = value;
  else if (leaf == "omega_e") m.omega_e = value;
  else if (leaf == "g") m.g = value;
  else if (leaf == "lambda") m.lambda = value;
  else if (leaf == "xi") m.xi = value;
  else if (leaf == "n_a") m.n_a = static_cast<int>(value);
  else if (leaf == "n_b") m.n_b = static_cast<int>(value);
  else if (leaf == "delta_a_spec") m.delta_a_spec = value;
  else if (leaf == "kappa") m.kappa = value;
  else if (leaf == "gamma_v") m.gamma_v = value;
  else if (leaf == "gamma_e") m.gamma_e = value;
  else return false;
  return true;
}

bool is_integer_model_field(const std::string& leaf) {
  return leaf == "n_a" || leaf == "n_b";
}

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

ModelParams narrow_band_model() {  // fig2..fig8 working point
  ModelParams m;
  m.omega_c = 50.0;
  m.omega_v = 50.5;
  m.omega_e = 250.0;
  m.g = 2.5;
  m.lambda = 1.0;
  m.xi = 1.841;
  m.n_a = 1;
  m.n_b = 1;
  m.delta_a_spec = -0.5;
  return m;
}

ModelParams dissipative_model() {  // fig9..fig11 working point
  ModelParams m = narrow_band_model();
  m.omega_c = 100.0;
  m.omega_v = 101.0;
  m.delta_a_spec = -1.0;
  return m;
}

struct ScenarioInfo {
  const char* name;
  const char* description;
};

constexpr ScenarioInfo kScenarios[] = {
    {"fig2", "sideband weight |J_{-1}(xi)| versus modulation amplitude"},
    {"fig3", "logarithmic negativity of the analytic cats over one period"},
    {"fig4", "joint Wigner cuts of the analytic cats at the detection time"},
    {"fig5", "mean cavity/vibration excitations, exact versus analytic"},
    {"fig6", "electronic detection probabilities, exact versus analytic"},
    {"fig7", "fidelity to the analytic state for omega_c in {30, 50, 100}"},
    {"fig8", "detection-time fidelity versus omega_c"},
    {"fig9", "detection probabilities under dissipation (three rate families)"},
    {"fig10", "fidelities under dissipation (three rate families)"},
    {"fig11", "logarithmic negativities under dissipation (three families)"},
    {"custom", "user-defined run or sweep (closed or open, model fully explicit)"},
};

// The dissipation figures share one grid: each family holds the other two
// rates at the 0.001 baseline and steps its own rate through three values.
struct RateFamily {
  const char* leaf;
  double values[3];
};
constexpr RateFamily kRateFamilies[] = {
    {"kappa", {0.01, 0.05, 0.1}},
    {"gamma_v", {0.01, 0.05, 0.1}},
    {"gamma_e", {0.01, 0.1, 0.5}},
};
constexpr double kRateBaseline = 0.001;

bool is_dissipation_scenario(const std::string& s) {
  return s == "fig9" || s == "fig10" || s == "fig11";
}

// ---------------------------------------------------------------------------
// Manifest helpers
// ---------------------------------------------------------------------------

ordered_json model_json(const ModelParams& m) {
  return ordered_json{{"omega_c", m.omega_c},
                      {"omega_v", m.omega_v},
                      {"omega_e", m.omega_e},
                      {"g", m.g},
                      {"lambda", m.lambda},
                      {"xi", m.xi},
                      {"n_a", m.n_a},
                      {"n_b", m.n_b},
                      {"delta_a_spec", m.delta_a_spec},
                      {"kappa", m.kappa},
                      {"gamma_v", m.gamma_v},
                      {"gamma_e", m.gamma_e}};
}

ordered_json effective_json(const EffectiveParams& e) {
  ordered_json j{{"theta_mix", e.theta_mix},
                 {"omega_plus", e.omega_plus},
                 {"omega_minus", e.omega_minus},
                 {"omega_0", e.omega_0},
                 {"g_a", e.g_a},
                 {"g_b", e.g_b},
                 {"delta_a", e.delta_a},
                 {"delta_b", e.delta_b}};
  if (e.delta_a != 0.0) j["t_s"] = detection_time(e);
  return j;
}

ordered_json integrator_json(const IntegratorConfig& ic, double resolved_step) {
  return ordered_json{
      {"method", ic.method == Method::rk4 ? "rk4" : "rk45"},
      {"frame", ic.frame == Frame::lab ? "lab" : "rotating"},
      {"step", resolved_step},
      {"rel_tol", ic.rel_tol},
      {"abs_tol", ic.abs_tol},
      {"samples_per_period", ic.samples_per_period},
      {"periods", ic.periods}};
}

ordered_json manifest_base(const ScenarioConfig& cfg, const ModelParams& m,
                           const EffectiveParams& eff,
                           const std::string& table,
                           const std::vector<std::string>& columns) {
  ordered_json j;
  j["generator"] = std::string("catsim ") + kVersion;
  j["scenario"] = cfg.scenario;
  j["table"] = table;
  j["columns"] = columns;
  j["model"] = model_json(m);
  j["cutoffs"] = ordered_json{{"n_a_max", cfg.cutoffs.n_a_max},
                              {"n_b_max", cfg.cutoffs.n_b_max}};
  j["effective"] = effective_json(eff);
  return j;
}

ordered_json monitor_json(const Trajectory& traj) {
  double max_drift = 0.0, max_a = 0.0, max_b = 0.0;
  for (const auto& s : traj.monitors) {
    max_drift = std::max(max_drift, s.drift);
    max_a = std::max(max_a, s.top_a_pop);
    max_b = std::max(max_b, s.top_b_pop);
  }
  return ordered_json{{"any_breach", traj.any_breach},
                      {"max_drift", max_drift},
                      {"max_top_a_pop", max_a},
                      {"max_top_b_pop", max_b},
                      {"steps", traj.stats.steps},
                      {"rejected_steps", traj.stats.rejected}};
}

// ---------------------------------------------------------------------------
// Shared run machinery
// ---------------------------------------------------------------------------

// Sample times t_k = k T / N for k in [k0, k1]; the slow period T = 2pi/|da|.
std::vector<double> period_samples(double period, int per_period, int k0,
                                   int k1) {
  std::vector<double> t;
  t.reserve(k1 - k0 + 1);
  for (int k = k0; k <= k1; ++k) t.push_back(period * k / per_period);
  return t;
}

// Detection probabilities p_+- = ||(psi_e +- psi_g)/sqrt(2)||^2 without the
// collapse step (well defined even when a branch is empty).
std::pair<double, double> detection_probs(const VectorXcd& psi, int de) {
  const double pp = 0.5 * (psi.tail(de) + psi.head(de)).squaredNorm();
  const double pm = 0.5 * (psi.tail(de) - psi.head(de)).squaredNorm();
  return {pp, pm};
}

std::pair<double, double> detection_probs(const MatrixXcd& rho, int de) {
  const double half_sum = 0.5 * (rho.topLeftCorner(de, de).trace().real() +
                                 rho.bottomRightCorner(de, de).trace().real());
  const double cross = rho.block(de, 0, de, de).trace().real();
  return {half_sum + cross, half_sum - cross};
}

// Branch-resolved fidelity F_+- between the projected state and the analytic
// cat; NaN when the branch probability vanishes (projection undefined, only
// possible at isolated times).
constexpr double kBranchFloor = 1e-10;

double branch_fidelity(const VectorXcd& psi, const CompositeSpace& space,
                       Sign sign, const AnalyticState& st) {
  const int de = space.two_mode_dim();
  const double s = sign == Sign::plus ? 1.0 : -1.0;
  VectorXcd branch =
      ((psi.tail(de) + s * psi.head(de)) / std::sqrt(2.0)).eval();
  const double p = branch.squaredNorm();
  if (p < kBranchFloor) return std::nan("");
  branch /= std::sqrt(p);
  return fidelity_pure(branch,
                       cat_state(st, sign, space.da(), space.db()));
}

double branch_fidelity(const MatrixXcd& rho, const CompositeSpace& space,
                       Sign sign, const AnalyticState& st) {
  ProjectionResult proj = project_electronic(rho, space, sign);
  if (proj.probability < kBranchFloor) return std::nan("");
  return fidelity_mixed(cat_state(st, sign, space.da(), space.db()),
                        proj.collapsed_mat);
}

double branch_negativity(const MatrixXcd& rho, const CompositeSpace& space,
                         Sign sign) {
  ProjectionResult proj = project_electronic(rho, space, sign);
  if (proj.probability < kBranchFloor) return std::nan("");
  return log_negativity(proj.collapsed_mat, space.da(), space.db());
}

VectorXcd plus_vacuum_state(const CompositeSpace& space) {
  VectorXcd psi = VectorXcd::Zero(space.dim());
  const double w = 1.0 / std::sqrt(2.0);
  psi(space.index(Level::g, 0, 0)) = w;
  psi(space.index(Level::e, 0, 0)) = w;
  return psi;
}

MatrixXcd plus_vacuum_density(const CompositeSpace& space) {
  const VectorXcd psi = plus_vacuum_state(space);
  return psi * psi.adjoint();
}

IntegratorOptions make_options(const ScenarioConfig& cfg, double period,
                               std::vector<double> sample_times) {
  IntegratorOptions opts;
  opts.method = cfg.integrator.method;
  opts.frame = cfg.integrator.frame;
  opts.step = cfg.integrator.step;
  opts.rel_tol = cfg.integrator.rel_tol;
  opts.abs_tol = cfg.integrator.abs_tol;
  opts.sample_times = std::move(sample_times);
  opts.store_states = false;
  opts.period_hint = period;
  return opts;
}

// Which per-sample quantities a closed run should tabulate.
struct ClosedColumns {
  bool excitations = false;
  bool probabilities = false;
  bool analytic_probabilities = false;
  bool fidelity = false;
  bool branch_fidelities = false;
};

OutputTable closed_run_table(const ScenarioConfig& cfg, const ModelParams& m,
                             const std::string& name, const ClosedColumns& cc,
                             int k0, ordered_json extra_notes) {
  const EffectiveParams eff = derive_effective(m).eff;
  const CompositeSpace space(cfg.cutoffs);
  const double period = kTwoPi / std::abs(eff.delta_a);
  const int per_period = cfg.integrator.samples_per_period;
  const int k1 =
      static_cast<int>(std::lround(cfg.integrator.periods * per_period));

  OutputTable table;
  table.name = name;
  table.columns.push_back("t[1/lambda]");
  if (cc.excitations) {
    table.columns.insert(table.columns.end(),
                         {"n_a_exact[1]", "n_b_exact[1]", "n_a_analytic[1]",
                          "n_b_analytic[1]"});
  }
  if (cc.analytic_probabilities) {
    table.columns.insert(table.columns.end(),
                         {"p_plus_analytic[1]", "p_minus_analytic[1]"});
  }
  if (cc.probabilities) {
    table.columns.insert(table.columns.end(),
                         {"p_plus_exact[1]", "p_minus_exact[1]"});
  }
  if (cc.fidelity) table.columns.push_back("f[1]");
  if (cc.branch_fidelities) {
    table.columns.insert(table.columns.end(), {"f_plus[1]", "f_minus[1]"});
  }

  IntegratorOptions opts =
      make_options(cfg, period, period_samples(period, per_period, k0, k1));
  opts.vec_observer = [&](double t, const VectorXcd& psi) {
    const AnalyticState st = analytic_state(eff, m.omega_e, m.xi, t);
    std::vector<double> row{t};
    if (cc.excitations) {
      const auto exact = mean_excitations(psi, space);
      const auto ana = mean_excitations_analytic(st);
      row.insert(row.end(), {exact.first, exact.second, ana.first, ana.second});
    }
    if (cc.analytic_probabilities) {
      row.insert(row.end(), {st.p_plus, st.p_minus});
    }
    if (cc.probabilities) {
      const auto p = detection_probs(psi, space.two_mode_dim());
      row.insert(row.end(), {p.first, p.second});
    }
    if (cc.fidelity) {
      row.push_back(fidelity_pure(psi, full_state_analytic(st, space)));
    }
    if (cc.branch_fidelities) {
      row.push_back(branch_fidelity(psi, space, Sign::plus, st));
      row.push_back(branch_fidelity(psi, space, Sign::minus, st));
    }
    table.rows.push_back(std::move(row));
  };

  const Trajectory traj =
      evolve_schrodinger(m, eff, plus_vacuum_state(space), space, opts);

  ordered_json manifest = manifest_base(cfg, m, eff, name, table.columns);
  manifest["integrator"] = integrator_json(
      cfg.integrator,
      cfg.integrator.step > 0.0
          ? cfg.integrator.step
          : default_step(m, eff, space, cfg.integrator.frame, true));
  manifest["initial_state"] = "(|e> + |g>)/sqrt(2) (x) |0,0>";
  manifest["monitor"] = monitor_json(traj);
  if (!extra_notes.is_null()) manifest["notes"] = std::move(extra_notes);
  table.manifest = manifest.dump(2);
  table.monitor_breach = traj.any_breach;
  return table;
}

// Columns tabulated along an open-system (Lindblad) run.
struct OpenColumns {
  bool probabilities = false;
  bool fidelities = false;
  bool negativities = false;
};

OutputTable open_run_table(const ScenarioConfig& cfg, const ModelParams& m,
                           const std::string& name, const OpenColumns& oc,
                           int k0, ordered_json extra_notes) {
  const EffectiveParams eff = derive_effective(m).eff;
  const CompositeSpace space(cfg.cutoffs);
  const double period = kTwoPi / std::abs(eff.delta_a);
  const int per_period = cfg.integrator.samples_per_period;
  const int k1 =
      static_cast<int>(std::lround(cfg.integrator.periods * per_period));

  OutputTable table;
  table.name = name;
  table.columns.push_back("t[1/lambda]");
  if (oc.probabilities) {
    table.columns.insert(table.columns.end(), {"p_plus[1]", "p_minus[1]"});
  }
  if (oc.fidelities) {
    table.columns.insert(table.columns.end(),
                         {"f[1]", "f_plus[1]", "f_minus[1]"});
  }
  if (oc.negativities) {
    table.columns.insert(table.columns.end(),
                         {"logneg_plus[1]", "logneg_minus[1]"});
  }

  IntegratorOptions opts =
      make_options(cfg, period, period_samples(period, per_period, k0, k1));
  opts.mat_observer = [&](double t, const MatrixXcd& rho) {
    std::vector<double> row{t};
    if (oc.probabilities) {
      const auto p = detection_probs(rho, space.two_mode_dim());
      row.insert(row.end(), {p.first, p.second});
    }
    if (oc.fidelities || oc.negativities) {
      const AnalyticState st = analytic_state(eff, m.omega_e, m.xi, t);
      if (oc.fidelities) {
        row.push_back(fidelity_mixed(full_state_analytic(st, space), rho));
        row.push_back(branch_fidelity(rho, space, Sign::plus, st));
        row.push_back(branch_fidelity(rho, space, Sign::minus, st));
      }
      if (oc.negativities) {
        row.push_back(branch_negativity(rho, space, Sign::plus));
        row.push_back(branch_negativity(rho, space, Sign::minus));
      }
    }
    table.rows.push_back(std::move(row));
  };

  const Trajectory traj =
      evolve_lindblad(m, eff, plus_vacuum_density(space), space, opts);

  ordered_json manifest = manifest_base(cfg, m, eff, name, table.columns);
  manifest["integrator"] = integrator_json(
      cfg.integrator,
      cfg.integrator.step > 0.0
          ? cfg.integrator.step
          : default_step(m, eff, space, cfg.integrator.frame, false));
  manifest["initial_state"] = "|+><+| (x) |0,0><0,0|";
  manifest["monitor"] = monitor_json(traj);
  if (!extra_notes.is_null()) manifest["notes"] = std::move(extra_notes);
  table.manifest = manifest.dump(2);
  table.monitor_breach = traj.any_breach;
  return table;
}

// Runs fn(0..n-1) on up to `threads` workers; results must be written to
// index-addressed slots so the output order is thread-count independent.
template <typename Fn>
void parallel_for(int n, int threads, const Fn& fn) {
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

// ---------------------------------------------------------------------------
// Scenario runners
// ---------------------------------------------------------------------------

std::vector<OutputTable> run_fig2(const ScenarioConfig& cfg) {
  OutputTable table;
  table.name = "fig2";
  table.columns = {"xi[1]", "abs_j_minus_1[1]"};
  double best_xi = 0.0, best = -1.0;
  for (int i = 1; i <= 3000; ++i) {
    const double xi = 1e-3 * i;
    const double v = std::abs(bessel_j(-1, xi));
    if (v > best) {
      best = v;
      best_xi = xi;
    }
    table.rows.push_back({xi, v});
  }
  const EffectiveParams eff = derive_effective(cfg.model).eff;
  ordered_json manifest =
      manifest_base(cfg, cfg.model, eff, table.name, table.columns);
  manifest["argmax_xi"] = best_xi;
  manifest["max_abs_j_minus_1"] = best;
  manifest["notes"] = ordered_json::array(
      {"grid xi = 0.001..3.000, step 0.001; the modulation amplitude that "
       "maximises the n = -1 sideband weight"});
  table.manifest = manifest.dump(2);
  return {table};
}

std::vector<OutputTable> run_fig3(const ScenarioConfig& cfg) {
  const ModelParams& m = cfg.model;
  const EffectiveParams eff = derive_effective(m).eff;
  const int da = cfg.cutoffs.n_a_max + 1;
  const int db = cfg.cutoffs.n_b_max + 1;
  const double period = kTwoPi / std::abs(eff.delta_a);
  const int n = cfg.integrator.samples_per_period;

  OutputTable table;
  table.name = "fig3";
  table.columns = {"t[1/lambda]", "logneg_plus[1]", "logneg_minus[1]"};
  for (int k = 1; k <= n; ++k) {
    const double t = period * k / n;
    const AnalyticState st = analytic_state(eff, m.omega_e, m.xi, t);
    table.rows.push_back(
        {t, log_negativity_pure(cat_state(st, Sign::plus, da, db), da, db),
         log_negativity_pure(cat_state(st, Sign::minus, da, db), da, db)});
  }
  ordered_json manifest = manifest_base(cfg, m, eff, table.name, table.columns);
  manifest["notes"] = ordered_json::array(
      {"analytic cat states; t = 0 is skipped because the minus cat is "
       "degenerate there (vanishing branch norm)"});
  table.manifest = manifest.dump(2);
  return {table};
}

std::vector<OutputTable> run_fig4(const ScenarioConfig& cfg) {
  const ModelParams& m = cfg.model;
  const EffectiveParams eff = derive_effective(m).eff;
  const int da = cfg.cutoffs.n_a_max + 1;
  const int db = cfg.cutoffs.n_b_max + 1;
  const double ts = detection_time(eff);

  // Gauge alignment: a local phase rotation on each mode maps the cat
  // amplitudes alpha, beta to |alpha|, |beta| without changing negativity,
  // parity or detection statistics; the Wigner function is rotated rigidly.
  // Tabulating in the aligned gauge puts the coherent balls on the real axes.
  AnalyticState st = analytic_state(eff, m.omega_e, m.xi, ts);
  const double gauge_a = std::arg(st.alpha);
  const double gauge_b = std::arg(st.beta);
  st.alpha = std::abs(st.alpha);
  st.beta = std::abs(st.beta);

  const VectorXcd cat_plus = cat_state(st, Sign::plus, da, db);
  const VectorXcd cat_minus = cat_state(st, Sign::minus, da, db);

  const int plane_n = 81;
  const double lim = 4.0;
  std::vector<double> axis(plane_n);
  for (int i = 0; i < plane_n; ++i)
    axis[i] = -lim + 2.0 * lim * i / (plane_n - 1);

  const int line_n = 321;
  std::vector<double> line(line_n);
  for (int i = 0; i < line_n; ++i)
    line[i] = -lim + 2.0 * lim * i / (line_n - 1);

  auto base_manifest = [&](const std::string& name,
                           const std::vector<std::string>& cols,
                           const char* note) {
    ordered_json j = manifest_base(cfg, m, eff, name, cols);
    j["t_s"] = ts;
    j["alpha_abs"] = std::abs(st.alpha);
    j["beta_abs"] = std::abs(st.beta);
    j["gauge_phase_a"] = gauge_a;
    j["gauge_phase_b"] = gauge_b;
    j["notes"] = ordered_json::array(
        {"amplitudes gauge-aligned to the positive real axis by local phase "
         "rotations exp(-i arg(alpha) a^H a), exp(-i arg(beta) b^H b)",
         note});
    return j;
  };

  std::vector<OutputTable> tables;

  // Plane cuts: both arguments real (Re-Re) or both imaginary (Im-Im).
  for (int imaginary = 0; imaginary < 2; ++imaginary) {
    WignerGrid grid;
    grid.zeta.reserve(plane_n);
    grid.chi.reserve(plane_n);
    for (double v : axis) {
      grid.zeta.push_back(imaginary ? cplx(0.0, v) : cplx(v, 0.0));
      grid.chi.push_back(imaginary ? cplx(0.0, v) : cplx(v, 0.0));
    }
    const WignerGrid wp = joint_wigner(cat_plus, da, db, grid);
    const WignerGrid wm = joint_wigner(cat_minus, da, db, grid);

    OutputTable table;
    table.name = imaginary ? "fig4_wigner_imim" : "fig4_wigner_rere";
    const char* part = imaginary ? "im" : "re";
    table.columns = {std::string(part) + "_zeta[1]",
                     std::string(part) + "_chi[1]", "w_plus[1]", "w_minus[1]"};
    for (int i = 0; i < plane_n; ++i) {
      for (int j = 0; j < plane_n; ++j) {
        table.rows.push_back(
            {axis[i], axis[j], wp.values(i, j), wm.values(i, j)});
      }
    }
    table.manifest =
        base_manifest(table.name, table.columns,
                      imaginary ? "plane cut with Re(zeta) = Re(chi) = 0"
                                : "plane cut with Im(zeta) = Im(chi) = 0")
            .dump(2);
    tables.push_back(std::move(table));
  }

  // Diagonal line cuts through the interference fringes.
  for (int imaginary = 0; imaginary < 2; ++imaginary) {
    std::vector<cplx> zeta(line_n), chi(line_n);
    for (int i = 0; i < line_n; ++i) {
      const cplx point =
          imaginary ? cplx(1.0, line[i]) : cplx(line[i], 0.0);
      zeta[i] = point;
      chi[i] = point;
    }
    const VectorXd wp = joint_wigner_points(cat_plus, da, db, zeta, chi);
    const VectorXd wm = joint_wigner_points(cat_minus, da, db, zeta, chi);

    OutputTable table;
    table.name = imaginary ? "fig4_wigner_diag_im" : "fig4_wigner_diag_re";
    table.columns = {"s[1]", "w_plus[1]", "w_minus[1]"};
    for (int i = 0; i < line_n; ++i)
      table.rows.push_back({line[i], wp(i), wm(i)});
    table.manifest =
        base_manifest(
            table.name, table.columns,
            imaginary
                ? "line cut zeta = chi = 1 + i s (fringe cut at Re = 1)"
                : "line cut zeta = chi = s (through both coherent balls)")
            .dump(2);
    tables.push_back(std::move(table));
  }

  return tables;
}

std::vector<OutputTable> run_fig5(const ScenarioConfig& cfg) {
  ClosedColumns cc;
  cc.excitations = true;
  return {closed_run_table(cfg, cfg.model, "fig5", cc, 0, nullptr)};
}

std::vector<OutputTable> run_fig6(const ScenarioConfig& cfg) {
  ClosedColumns cc;
  cc.analytic_probabilities = true;
  cc.probabilities = true;
  return {closed_run_table(cfg, cfg.model, "fig6", cc, 0, nullptr)};
}

std::vector<OutputTable> run_fig7(const ScenarioConfig& cfg, int threads) {
  const double omega_cs[] = {30.0, 50.0, 100.0};
  std::vector<OutputTable> tables(3);
  parallel_for(3, threads, [&](int i) {
    ModelParams m = cfg.model;
    m.omega_c = omega_cs[i];
    m.omega_v = 1.01 * m.omega_c;
    ClosedColumns cc;
    cc.fidelity = true;
    cc.branch_fidelities = true;
    tables[i] = closed_run_table(
        cfg, m, "fig7_omega_c_" + format_value_tag(m.omega_c), cc, 1,
        ordered_json::array(
            {"omega_v = 1.01 omega_c; omega_e and g kept at the base working "
             "point",
             "t = 0 skipped: the minus branch vanishes there"}));
  });
  return tables;
}

std::vector<OutputTable> run_fig8(const ScenarioConfig& cfg, int threads) {
  const std::vector<double> grid = {10.0, 15.0, 20.0, 25.0,  30.0,
                                    40.0, 50.0, 60.0, 80.0, 100.0};
  const int n = static_cast<int>(grid.size());
  const double half_window = 0.13;  // spans several fast fidelity fringes
  const int window_points = 260;    // even, so t_s itself is a sample

  struct Row {
    double f_ts = 0.0, f_min = 0.0, f_max = 0.0;
    double max_drift = 0.0;
    bool breach = false;
    std::vector<std::string> warnings;
  };
  std::vector<Row> rows(n);

  parallel_for(n, threads, [&](int i) {
    ModelParams m = cfg.model;
    m.omega_c = grid[i];
    m.omega_v = 1.01 * m.omega_c;
    const EffectiveDerivation der = derive_effective(m);
    const EffectiveParams& eff = der.eff;
    const CompositeSpace space(cfg.cutoffs);
    const double ts = detection_time(eff);
    std::vector<double> samples(window_points + 1);
    for (int k = 0; k <= window_points; ++k) {
      samples[k] = ts - half_window + 2.0 * half_window * k / window_points;
    }

    Row row;
    row.warnings = der.warnings;
    row.f_min = 2.0;
    row.f_max = -1.0;
    IntegratorOptions opts =
        make_options(cfg, kTwoPi / std::abs(eff.delta_a), samples);
    opts.vec_observer = [&](double t, const VectorXcd& psi) {
      const double f = fidelity_pure(
          psi,
          full_state_analytic(analytic_state(eff, m.omega_e, m.xi, t), space));
      row.f_min = std::min(row.f_min, f);
      row.f_max = std::max(row.f_max, f);
      if (std::abs(t - ts) < 1e-9) row.f_ts = f;
    };
    const Trajectory traj =
        evolve_schrodinger(m, eff, plus_vacuum_state(space), space, opts);
    row.breach = traj.any_breach;
    for (const MonitorSample& s : traj.monitors) {
      row.max_drift = std::max(row.max_drift, s.drift);
    }
    rows[i] = std::move(row);
  });

  OutputTable table;
  table.name = "fig8";
  table.columns = {"omega_c[lambda]", "f_ts[1]", "f_window_min[1]",
                   "f_window_max[1]"};
  ordered_json grid_warnings = ordered_json::object();
  ordered_json grid_monitor = ordered_json::object();
  bool any_breach = false;
  for (int i = 0; i < n; ++i) {
    table.rows.push_back(
        {grid[i], rows[i].f_ts, rows[i].f_min, rows[i].f_max});
    if (!rows[i].warnings.empty()) {
      grid_warnings[format_value_tag(grid[i])] = rows[i].warnings;
    }
    grid_monitor[format_value_tag(grid[i])] = {
        {"any_breach", rows[i].breach}, {"max_drift", rows[i].max_drift}};
    any_breach = any_breach || rows[i].breach;
  }
  const EffectiveParams eff = derive_effective(cfg.model).eff;
  ordered_json manifest =
      manifest_base(cfg, cfg.model, eff, table.name, table.columns);
  manifest["integrator"] =
      integrator_json(cfg.integrator, cfg.integrator.step);
  manifest["window_half_width"] = half_window;
  manifest["notes"] = ordered_json::array(
      {"per grid point: omega_v = 1.01 omega_c, omega_e and g from the base "
       "working point",
       "f_ts samples F exactly at t_s; the window min/max bracket the fast "
       "fringe envelope over t_s +- 0.13",
       "integrator step 0 means each grid point resolves its own default "
       "step from its fast frequency"});
  manifest["grid_monitor"] = grid_monitor;
  if (!grid_warnings.empty()) manifest["grid_warnings"] = grid_warnings;
  table.manifest = manifest.dump(2);
  table.monitor_breach = any_breach;
  return {table};
}

std::vector<OutputTable> run_dissipation_grid(const ScenarioConfig& cfg,
                                              int threads) {
  struct Entry {
    std::string leaf;
    double value;
  };
  std::vector<Entry> entries;
  for (const auto& family : kRateFamilies) {
    for (double v : family.values) entries.push_back({family.leaf, v});
  }
  const int n = static_cast<int>(entries.size());
  std::vector<OutputTable> tables(n);

  OpenColumns oc;
  int k0 = 0;
  if (cfg.scenario == "fig9") {
    oc.probabilities = true;
  } else if (cfg.scenario == "fig10") {
    oc.fidelities = true;
    k0 = 1;
  } else {
    oc.negativities = true;
    k0 = 1;
  }

  parallel_for(n, threads, [&](int i) {
    ModelParams m = cfg.model;
    m.kappa = kRateBaseline;
    m.gamma_v = kRateBaseline;
    m.gamma_e = kRateBaseline;
    set_model_field(m, entries[i].leaf, entries[i].value);
    const std::string name = cfg.scenario + "_" + entries[i].leaf + "_" +
                             format_value_tag(entries[i].value);
    tables[i] = open_run_table(
        cfg, m, name, oc, k0,
        ordered_json::array(
            {"rate family: " + entries[i].leaf + " stepped, other rates at " +
             format_value_tag(kRateBaseline)}));
  });
  return tables;
}

std::vector<OutputTable> run_custom(const ScenarioConfig& cfg, int threads) {
  // Cartesian product over sweep axes (empty product = single run).
  std::vector<int> radix;
  int total = 1;
  for (const auto& sweep : cfg.sweeps) {
    radix.push_back(static_cast<int>(sweep.values.size()));
    total *= radix.back();
  }
  std::vector<OutputTable> tables(total);

  parallel_for(total, threads, [&](int flat) {
    ModelParams m = cfg.model;
    std::string name = "custom";
    int rest = flat;
    for (size_t axis = 0; axis < cfg.sweeps.size(); ++axis) {
      const int idx = rest % radix[axis];
      rest /= radix[axis];
      const auto& sweep = cfg.sweeps[axis];
      const std::string leaf = sweep.path.substr(std::string("model.").size());
      set_model_field(m, leaf, sweep.values[idx]);
      name += "_" + leaf + "_" + format_value_tag(sweep.values[idx]);
    }
    const bool open = m.kappa > 0.0 || m.gamma_v > 0.0 || m.gamma_e > 0.0;
    if (open) {
      OpenColumns oc;
      oc.probabilities = true;
      oc.fidelities = true;
      tables[flat] = open_run_table(cfg, m, name, oc, 1, nullptr);
    } else {
      ClosedColumns cc;
      cc.excitations = true;
      cc.probabilities = true;
      cc.fidelity = true;
      cc.branch_fidelities = true;
      tables[flat] = closed_run_table(cfg, m, name, cc, 1, nullptr);
    }
  });
  return tables;
}

// ---------------------------------------------------------------------------
// Validation helpers
// ---------------------------------------------------------------------------

void add_error(ValidationReport& r, const std::string& field,
               const std::string& message) {
  r.issues.push_back({true, field, message});
}

void add_warning(ValidationReport& r, const std::string& field,
                 const std::string& message) {
  r.issues.push_back({false, field, message});
}

// Poisson tail above n_max for a coherent state of the given amplitude;
// coherent_state already computes it as the truncation deficit.
double coherent_tail(double amplitude, int n_max) {
  return coherent_state(amplitude, n_max + 1).truncation_deficit;
}

const std::vector<std::string> kRequiredCustomKeys = {
    "model.omega_c", "model.omega_v",      "model.omega_e", "model.g",
    "model.xi",      "model.delta_a_spec", "model.kappa",   "model.gamma_v",
    "model.gamma_e", "cutoffs.n_a_max",    "cutoffs.n_b_max"};

}  // namespace

// ---------------------------------------------------------------------------
// Public API
// ---------------------------------------------------------------------------

bool ValidationReport::ok() const { return error_count() == 0; }

int ValidationReport::error_count() const {
  int n = 0;
  for (const auto& issue : issues) n += issue.is_error ? 1 : 0;
  return n;
}

int ValidationReport::warning_count() const {
  return static_cast<int>(issues.size()) - error_count();
}

std::string ValidationReport::to_string() const {
  std::string out;
  for (const auto& issue : issues) {
    out += issue.is_error ? "error" : "warning";
    out += " [" + issue.field + "]: " + issue.message + "\n";
  }
  return out;
}

std::vector<std::string> list_scenarios() {
  std::vector<std::string> names;
  for (const auto& info : kScenarios) names.push_back(info.name);
  return names;
}

std::string scenario_description(const std::string& name) {
  for (const auto& info : kScenarios) {
    if (name == info.name) return info.description;
  }
  throw std::invalid_argument("unknown scenario '" + name + "'");
}

ScenarioConfig preset(const std::string& name) {
  bool known = false;
  for (const auto& info : kScenarios) known = known || name == info.name;
  if (!known) throw std::invalid_argument("unknown scenario '" + name + "'");

  ScenarioConfig cfg;
  cfg.scenario = name;
  if (is_dissipation_scenario(name)) {
    cfg.model = dissipative_model();
    // 14/14 keeps the closed-envelope Poisson tails (|alpha| peaks near 1.54)
    // an order of magnitude below the truncation monitors.
    cfg.cutoffs = {14, 14};
  } else {
    cfg.model = narrow_band_model();
    cfg.cutoffs = {26, 26};
  }
  return cfg;
}

ScenarioConfig parse_config(const std::string& text) {
  std::vector<std::string> lines;
  {
    std::string line;
    std::stringstream ss(text);
    while (std::getline(ss, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      lines.push_back(line);
    }
  }

  // First pass: the scenario key selects the preset everything else modifies.
  std::string scenario;
  for (size_t i = 0; i < lines.size(); ++i) {
    const std::string stripped = trim(strip_comment(lines[i]));
    if (stripped.empty()) continue;
    const size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      parse_fail(static_cast<int>(i + 1), "expected 'key = value'");
    }
    if (trim(stripped.substr(0, eq)) == "scenario") {
      scenario = trim(stripped.substr(eq + 1));
    }
  }
  if (scenario.empty()) {
    throw std::invalid_argument("config: missing required key 'scenario'");
  }
  ScenarioConfig cfg = preset(scenario);  // throws for unknown names

  // Second pass: apply overrides.
  for (size_t i = 0; i < lines.size(); ++i) {
    const int line_no = static_cast<int>(i + 1);
    const std::string stripped = trim(strip_comment(lines[i]));
    if (stripped.empty()) continue;
    const size_t eq = stripped.find('=');
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) parse_fail(line_no, "empty key");
    if (value.empty()) parse_fail(line_no, "empty value for key '" + key + "'");

    if (key == "scenario") continue;

    if (key.rfind("model.", 0) == 0) {
      const std::string leaf = key.substr(6);
      const double v = is_integer_model_field(leaf)
                           ? parse_int(value, line_no, key)
                           : parse_double(value, line_no, key);
      if (!set_model_field(cfg.model, leaf, v)) {
        parse_fail(line_no, "unknown key '" + key + "'");
      }
      cfg.explicit_keys.push_back(key);
    } else if (key == "cutoffs.n_a_max") {
      cfg.cutoffs.n_a_max = parse_int(value, line_no, key);
      cfg.explicit_keys.push_back(key);
    } else if (key == "cutoffs.n_b_max") {
      cfg.cutoffs.n_b_max = parse_int(value, line_no, key);
      cfg.explicit_keys.push_back(key);
    } else if (key == "integrator.method") {
      if (value == "rk4") cfg.integrator.method = Method::rk4;
      else if (value == "rk45") cfg.integrator.method = Method::rk45;
      else parse_fail(line_no, "integrator.method must be rk4 or rk45");
    } else if (key == "integrator.frame") {
      if (value == "lab") cfg.integrator.frame = Frame::lab;
      else if (value == "rotating") cfg.integrator.frame = Frame::rotating;
      else parse_fail(line_no, "integrator.frame must be lab or rotating");
    } else if (key == "integrator.step") {
      cfg.integrator.step = parse_double(value, line_no, key);
    } else if (key == "integrator.rel_tol") {
      cfg.integrator.rel_tol = parse_double(value, line_no, key);
    } else if (key == "integrator.abs_tol") {
      cfg.integrator.abs_tol = parse_double(value, line_no, key);
    } else if (key == "integrator.samples_per_period") {
      cfg.integrator.samples_per_period = parse_int(value, line_no, key);
    } else if (key == "integrator.periods") {
      cfg.integrator.periods = parse_double(value, line_no, key);
    } else if (key == "output.directory") {
      cfg.output.directory = value;
    } else if (key == "output.format") {
      cfg.output.format = value;
    } else if (key == "output.precision") {
      cfg.output.precision = parse_int(value, line_no, key);
    } else if (key.rfind("sweep.", 0) == 0) {
      SweepSpec sweep;
      sweep.path = key.substr(6);
      sweep.values = parse_double_list(value, line_no, key);
      cfg.sweeps.push_back(std::move(sweep));
    } else {
      parse_fail(line_no, "unknown key '" + key + "'");
    }
  }
  return cfg;
}

ScenarioConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

ValidationReport validate_config(const ScenarioConfig& cfg) {
  ValidationReport report;

  bool known = false;
  for (const auto& info : kScenarios) known = known || cfg.scenario == info.name;
  if (!known) {
    add_error(report, "scenario", "unknown scenario '" + cfg.scenario + "'");
    return report;
  }

  try {
    cfg.cutoffs.validate();
  } catch (const std::exception& e) {
    add_error(report, "cutoffs", e.what());
  }
  bool model_ok = true;
  try {
    cfg.model.validate();
  } catch (const std::exception& e) {
    model_ok = false;
    add_error(report, "model", e.what());
  }

  // Integrator and output plausibility.
  const auto& ic = cfg.integrator;
  if (ic.step < 0.0) add_error(report, "integrator.step", "must be >= 0");
  if (ic.rel_tol <= 0.0) add_error(report, "integrator.rel_tol", "must be > 0");
  if (ic.abs_tol <= 0.0) add_error(report, "integrator.abs_tol", "must be > 0");
  if (ic.samples_per_period < 1) {
    add_error(report, "integrator.samples_per_period", "must be >= 1");
  }
  if (!(ic.periods > 0.0)) {
    add_error(report, "integrator.periods", "must be > 0");
  }
  if (cfg.output.format != "csv" && cfg.output.format != "json") {
    add_error(report, "output.format", "must be 'csv' or 'json'");
  }
  if (cfg.output.precision < 3 || cfg.output.precision > 17) {
    add_error(report, "output.precision", "must lie in [3, 17]");
  }

  // Sweeps: only the custom scenario is free-form; the presets fix their own
  // parameter grids.
  if (!cfg.sweeps.empty() && cfg.scenario != "custom") {
    add_error(report, "sweep",
              "sweeps are only supported for scenario 'custom'; '" +
                  cfg.scenario + "' defines its own grid");
  }
  for (const auto& sweep : cfg.sweeps) {
    if (sweep.path.rfind("model.", 0) != 0) {
      add_error(report, "sweep." + sweep.path,
                "only model.* parameters can be swept");
      continue;
    }
    const std::string leaf = sweep.path.substr(6);
    ModelParams probe = cfg.model;
    if (!set_model_field(probe, leaf, 1.0)) {
      add_error(report, "sweep." + sweep.path,
                "unknown model parameter '" + leaf + "'");
      continue;
    }
    int count = 0;
    for (const auto& other : cfg.sweeps) count += other.path == sweep.path;
    if (count > 1) {
      add_error(report, "sweep." + sweep.path, "duplicate sweep axis");
      continue;
    }
    if (model_ok) {
      for (double v : sweep.values) {
        ModelParams candidate = cfg.model;
        set_model_field(candidate, leaf, v);
        try {
          candidate.validate();
        } catch (const std::exception& e) {
          add_error(report, "sweep." + sweep.path,
                    "value " + format_value_tag(v) + ": " + e.what());
        }
      }
    }
  }

  // Custom runs must spell out the whole model: silent inheritance of the
  // preset working point would be too easy to misread as physics.
  if (cfg.scenario == "custom") {
    std::string missing;
    for (const auto& key : kRequiredCustomKeys) {
      if (std::find(cfg.explicit_keys.begin(), cfg.explicit_keys.end(), key) ==
          cfg.explicit_keys.end()) {
        missing += missing.empty() ? key : ", " + key;
      }
    }
    if (!missing.empty()) {
      add_error(report, "custom",
                "custom scenarios must set every model field and both "
                "cutoffs explicitly; missing: " +
                    missing);
    }
  }

  if (!model_ok || report.error_count() > 0) return report;

  // Physics-level checks need the derived parameters.
  EffectiveParams eff;
  try {
    const EffectiveDerivation der = derive_effective(cfg.model);
    eff = der.eff;
    for (const auto& w : der.warnings) add_warning(report, "model", w);
  } catch (const std::exception& e) {
    add_error(report, "model", e.what());
    return report;
  }
  if (eff.delta_a == 0.0 || eff.delta_b == 0.0) {
    add_error(report, "model",
              "effective detunings must be nonzero (delta_a_spec = 0 or an "
              "exactly resonant sideband leaves the closed forms undefined)");
    return report;
  }

  // Fixed steps must satisfy the resolution rule enforced by the integrator.
  if (ic.step > 0.0) {
    const CompositeSpace space(cfg.cutoffs);
    const double limit = max_step(cfg.model, eff, space, ic.frame);
    if (ic.step > limit * (1.0 + 1e-12)) {
      add_error(report, "integrator.step",
                "step " + format_value_tag(ic.step) +
                    " exceeds the resolution limit 2*pi/(40*omega_fastest) = " +
                    format_value_tag(limit) + " for the " +
                    (ic.frame == Frame::lab ? "lab" : "rotating") + " frame");
    }
  }

  // Truncation adequacy: scan the analytic amplitudes over the run horizon
  // and compare the coherent Poisson tails against the cutoffs.
  double max_a = 0.0, max_b = 0.0;
  const double horizon = ic.periods * kTwoPi / std::abs(eff.delta_a);
  for (int k = 1; k <= 512; ++k) {
    const AnalyticState st =
        analytic_state(eff, cfg.model.omega_e, cfg.model.xi, horizon * k / 512);
    max_a = std::max(max_a, std::abs(st.alpha));
    max_b = std::max(max_b, std::abs(st.beta));
  }
  const double tail_a = coherent_tail(max_a, cfg.cutoffs.n_a_max);
  const double tail_b = coherent_tail(max_b, cfg.cutoffs.n_b_max);
  constexpr double kTailTol = 1e-6;
  if (tail_a > kTailTol) {
    add_warning(report, "cutoffs.n_a_max",
                "cavity amplitude reaches |alpha| = " + format_value_tag(max_a) +
                    "; Poisson weight " + format_value_tag(tail_a) +
                    " lies above the cutoff (raise n_a_max)");
  }
  if (tail_b > kTailTol) {
    add_warning(report, "cutoffs.n_b_max",
                "vibration amplitude reaches |beta| = " +
                    format_value_tag(max_b) + "; Poisson weight " +
                    format_value_tag(tail_b) +
                    " lies above the cutoff (raise n_b_max)");
  }

  return report;
}

std::vector<OutputTable> run_scenario(const ScenarioConfig& cfg, int threads) {
  const ValidationReport report = validate_config(cfg);
  if (!report.ok()) {
    throw std::invalid_argument("invalid config:\n" + report.to_string());
  }
  threads = std::max(1, threads);

  if (cfg.scenario == "fig2") return run_fig2(cfg);
  if (cfg.scenario == "fig3") return run_fig3(cfg);
  if (cfg.scenario == "fig4") return run_fig4(cfg);
  if (cfg.scenario == "fig5") return run_fig5(cfg);
  if (cfg.scenario == "fig6") return run_fig6(cfg);
  if (cfg.scenario == "fig7") return run_fig7(cfg, threads);
  if (cfg.scenario == "fig8") return run_fig8(cfg, threads);
  if (is_dissipation_scenario(cfg.scenario))
    return run_dissipation_grid(cfg, threads);
  return run_custom(cfg, threads);
}

std::string table_to_csv(const OutputTable& table, int precision) {
  std::string out;
  for (size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out += ',';
    out += csv_field(table.columns[c]);
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += format_number(row[c], precision);
    }
    out += '\n';
  }
  return out;
}

std::vector<std::string> write_tables(const std::vector<OutputTable>& tables,
                                      const OutputOptions& options) {
  namespace fs = std::filesystem;
  fs::create_directories(options.directory);
  std::vector<std::string> written;

  for (const auto& table : tables) {
    if (options.format == "json") {
      ordered_json doc;
      doc["name"] = table.name;
      doc["columns"] = table.columns;
      doc["manifest"] = ordered_json::parse(table.manifest);
      auto& rows = doc["rows"] = ordered_json::array();
      for (const auto& row : table.rows) {
        ordered_json r = ordered_json::array();
        for (double v : row) {
          if (std::isnan(v)) r.push_back(nullptr);
          else r.push_back(v);
        }
        rows.push_back(std::move(r));
      }
      const fs::path path = fs::path(options.directory) / (table.name + ".json");
      std::ofstream out(path, std::ios::binary);
      if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
      out << doc.dump(2) << '\n';
      written.push_back(path.string());
    } else {
      const fs::path csv_path =
          fs::path(options.directory) / (table.name + ".csv");
      std::ofstream out(csv_path, std::ios::binary);
      if (!out) {
        throw std::runtime_error("cannot write '" + csv_path.string() + "'");
      }
      out << table_to_csv(table, options.precision);
      written.push_back(csv_path.string());

      const fs::path man_path =
          fs::path(options.directory) / (table.name + ".manifest.json");
      std::ofstream man(man_path, std::ios::binary);
      if (!man) {
        throw std::runtime_error("cannot write '" + man_path.string() + "'");
      }
      man << table.manifest << '\n';
      written.push_back(man_path.string());
    }
  }
  return written;
}

}  // namespace catqed
