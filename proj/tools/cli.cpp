#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include <openssl/evp.h>

#include "entforge/validation.hpp"

namespace entforge::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

double to_double(const std::string& s, std::string_view what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty() || !std::isfinite(v)) {
    throw std::invalid_argument("invalid number for " + std::string(what) + ": '" + s + "'");
  }
  return v;
}

long long to_integer(const std::string& s, std::string_view what) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) {
    throw std::invalid_argument("invalid integer for " + std::string(what) + ": '" + s + "'");
  }
  return v;
}

std::uint64_t to_seed(const std::string& s, std::string_view what) {
  std::size_t used = 0;
  std::uint64_t v = 0;
  try {
    if (!s.empty() && s[0] != '-') v = std::stoull(s, &used, 0);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) {
    throw std::invalid_argument("invalid seed from " + std::string(what) + ": '" + s + "'");
  }
  return v;
}

bool to_bool(const std::string& s, std::string_view what) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw std::invalid_argument("invalid boolean for " + std::string(what) + ": '" + s + "'");
}

std::string join(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

std::string short_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

// --- output helpers ----------------------------------------------------------

class CsvFile {
 public:
  CsvFile(const fs::path& path, const std::vector<std::string>& header) : out_(path), path_(path) {
    if (!out_) throw std::runtime_error("cannot open " + path.string());
    row(header);
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
  }

  const fs::path& path() const { return path_; }

 private:
  std::ofstream out_;
  fs::path path_;
};

std::string num(double x) { return format_number(x); }
std::string num(std::size_t x) { return std::to_string(x); }
std::string num(int x) { return std::to_string(x); }

ordered_json fit_json(const FitResult& f) {
  return {{"exponent_or_rate", f.exponent_or_rate},
          {"prefactor", f.prefactor},
          {"r_squared", f.r_squared},
          {"point_count", f.point_count}};
}

struct Outputs {
  fs::path dir;
  std::vector<fs::path> files;
  ordered_json summary = ordered_json::object();
  ordered_json fits = ordered_json::array();
  std::vector<std::pair<std::string, FitResult>> fit_rows;

  fs::path add(const std::string& name) {
    files.push_back(dir / name);
    return files.back();
  }
  void fit(const std::string& dataset, const FitResult& f) {
    fit_rows.emplace_back(dataset, f);
    ordered_json j = fit_json(f);
    j["dataset"] = dataset;
    fits.push_back(std::move(j));
  }
};

void write_fits(Outputs& out) {
  if (out.fit_rows.empty()) return;
  CsvFile csv(out.add("fits.csv"), {"dataset", "exponent_or_rate", "prefactor", "r_squared"});
  for (const auto& [name, f] : out.fit_rows) {
    csv.row({name, num(f.exponent_or_rate), num(f.prefactor), num(f.r_squared)});
  }
}

// Predictions of the perturbative analysis on the run's grid under a given
// (gamma, gate-count) convention.
ordered_json predictions(const ExperimentConfig& config, double gamma, bool reference_count,
                         const std::string& label) {
  ordered_json j;
  j["convention"] = label;
  j["gamma"] = gamma;
  ordered_json rows = ordered_json::array();
  ordered_json thresholds = ordered_json::array();
  for (const int n : config.qubit_range) {
    const double n_g = reference_count
                           ? static_cast<double>(reference_gate_count(n))
                           : static_cast<double>(build_step_circuit(MapParams::make(n, config.chaos)).gate_count());
    for (const int t : config.resolved_steps()) {
      if (t < 1) continue;
      thresholds.push_back({{"nq", n},
                            {"t", t},
                            {"analytic_threshold", analytic_threshold(n, t, gamma)},
                            {"predicted_half_crossing", predicted_half_crossing(n, t, gamma)}});
      for (const double eps : config.epsilon_grid) {
        const Prediction s = predicted_entropy(eps, n, t, gamma, n_g);
        const double lb = predicted_lower_bound(eps, n, t, gamma);
        rows.push_back({{"nq", n},
                        {"t", t},
                        {"eps", eps},
                        {"n_g", n_g},
                        {"predicted_entropy", s.value},
                        {"in_regime", s.in_regime},
                        {"predicted_lower_bound", lb},
                        {"predicted_lower_bound_clamped", std::max(lb, 0.0)}});
      }
    }
  }
  j["grid"] = std::move(rows);
  j["thresholds"] = std::move(thresholds);
  return j;
}

// --- subcommands -------------------------------------------------------------

int run_generate(const Invocation& inv, Outputs& out, std::ostream& log) {
  ExperimentConfig config = inv.config;
  const auto steps = config.resolved_steps();
  config.steps = *std::max_element(steps.begin(), steps.end());
  const GenerationResult r = run_generation(config);
  CsvFile csv(out.add("generation.csv"), {"nq", "t", "mean_entropy", "page_value", "gap"});
  ordered_json series = ordered_json::array();
  for (const auto& s : r.series) {
    for (std::size_t t = 0; t < s.mean_entropy.size(); ++t) {
      csv.row({num(s.n_qubits), num(t), num(s.mean_entropy[t]), num(s.page), num(s.page - s.mean_entropy[t])});
    }
    if (s.convergence.window > 0) {
      out.fit("convergence_nq" + std::to_string(s.n_qubits), s.convergence.fit);
    }
    series.push_back({{"nq", s.n_qubits},
                      {"page_value", s.page},
                      {"final_mean_entropy", s.mean_entropy.back()},
                      {"tau", s.convergence.tau},
                      {"fluctuation_floor", s.convergence.floor},
                      {"fit_window", s.convergence.window}});
    log << "nq=" << s.n_qubits << " <E>(t=" << config.steps << ")=" << s.mean_entropy.back()
        << " page=" << s.page << " tau=" << s.convergence.tau << '\n';
  }
  if (r.tau_linear_fit) out.fit("tau_vs_nq", *r.tau_linear_fit);
  out.summary["series"] = std::move(series);
  return kExitOk;
}

int run_spectrum_cmd(const Invocation& inv, Outputs& out, std::ostream& log) {
  const SpectrumResult r = run_spectrum(inv.config);
  {
    CsvFile csv(out.add("spectrum_samples.csv"), {"nq", "bipartition_mask", "entropy"});
    for (const auto& e : r.sawtooth) {
      for (const auto& s : e.samples) csv.row({num(e.n_qubits), std::to_string(s.bipartition.a_mask()), num(s.value)});
    }
  }
  CsvFile stats_csv(out.add("spectrum_stats.csv"), {"nq", "mean", "std", "rel_std", "family"});
  CsvFile hist_csv(out.add("spectrum_histograms.csv"),
                   {"nq", "family", "bin_low", "bin_width", "count", "density"});
  for (const auto* family : {&r.sawtooth, &r.haar}) {
    for (const auto& e : *family) {
      stats_csv.row({num(e.n_qubits), num(e.stats.mean), num(e.stats.std_dev), num(e.stats.relative_std), e.family});
      for (std::size_t i = 0; i < e.histogram.counts.size(); ++i) {
        hist_csv.row({num(e.n_qubits), e.family, num(e.histogram.bin_low(i)), num(e.histogram.bin_width),
                      num(e.histogram.counts[i]), num(e.histogram.density[i])});
      }
      log << e.family << " nq=" << e.n_qubits << " mean=" << e.stats.mean << " rel_std=" << e.stats.relative_std
          << '\n';
    }
  }
  out.fit("rel_std_sawtooth", r.sawtooth_fit);
  out.fit("rel_std_haar", r.haar_fit);
  out.summary["page_values"] = ordered_json::array();
  for (const int n : inv.config.qubit_range) out.summary["page_values"].push_back({{"nq", n}, {"value", page_value(n)}});
  out.summary["haar_samples"] = inv.config.haar_samples;
  return kExitOk;
}

void write_sweep(const NoiseSweepResult& sweep, Outputs& out, std::ostream& log) {
  const std::string suffix = "_t" + std::to_string(sweep.steps) + ".csv";
  CsvFile csv(out.add("noise_sweep" + suffix),
              {"nq", "eps", "bound_kind", "mean", "std", "stderr", "n_realizations"});
  CsvFile diag(out.add("noise_diagnostics" + suffix),
               {"nq", "eps", "fidelity", "total_entropy", "fano_bound", "lower_rel_std", "upper_rel_std",
                "lower_drift", "upper_drift", "converged", "invariants_ok"});
  for (const auto& p : sweep.points) {
    for (const BoundKind kind : {BoundKind::Lower, BoundKind::Upper}) {
      const EntanglementStats& s = kind == BoundKind::Lower ? p.lower : p.upper;
      csv.row({num(p.n_qubits), num(p.epsilon), std::string(to_string(kind)), num(s.mean), num(s.std_dev),
               num(p.stderr_of(kind)), num(p.realizations)});
    }
    diag.row({num(p.n_qubits), num(p.epsilon), num(p.fidelity), num(p.total_entropy), num(p.fano_bound),
              num(p.lower.relative_std), num(p.upper.relative_std), num(p.lower_drift), num(p.upper_drift),
              p.converged ? "true" : "false", p.invariants_ok ? "true" : "false"});
    log << "t=" << sweep.steps << " nq=" << p.n_qubits << " eps=" << p.epsilon << " E_m=" << p.lower.mean
        << " E_M=" << p.upper.mean << " F=" << p.fidelity << (p.converged ? "" : " [unconverged]") << '\n';
  }
  // Relative-std decay across sizes at each eps.
  std::vector<int> sizes;
  for (const auto& p : sweep.points) {
    if (std::find(sizes.begin(), sizes.end(), p.n_qubits) == sizes.end()) sizes.push_back(p.n_qubits);
  }
  if (sizes.size() < 3) return;
  std::vector<double> grid;
  for (const auto* p : sweep.series(sizes.front())) grid.push_back(p->epsilon);
  for (const double eps : grid) {
    for (const BoundKind kind : {BoundKind::Lower, BoundKind::Upper}) {
      std::vector<Point> pts;
      for (const auto& p : sweep.points) {
        const double rel = kind == BoundKind::Lower ? p.lower.relative_std : p.upper.relative_std;
        if (p.epsilon == eps && rel > 0.0) pts.emplace_back(p.n_qubits, rel);
      }
      if (pts.size() >= 3) {
        out.fit("rel_std_" + std::string(to_string(kind)) + "_t" + std::to_string(sweep.steps) + "_eps" +
                    short_number(eps),
                fit_exponential(pts));
      }
    }
  }
}

int sweep_status(const NoiseSweepResult& sweep, bool strict, std::ostream& log) {
  bool bad_invariants = false, unconverged = false;
  for (const auto& p : sweep.points) {
    bad_invariants = bad_invariants || !p.invariants_ok;
    unconverged = unconverged || !p.converged;
  }
  if (bad_invariants) log << "warning: density-matrix invariant violated in t=" << sweep.steps << " sweep\n";
  if (unconverged) {
    log << "warning: realization count insufficient (half/full drift above "
        << kDriftTolerance * 100 << "%) in t=" << sweep.steps << " sweep\n";
  }
  return strict && (bad_invariants || unconverged) ? kExitInvariant : kExitOk;
}

int run_noise_sweep_cmd(const Invocation& inv, Outputs& out, std::ostream& log) {
  if (inv.config.epsilon_grid.empty()) throw std::invalid_argument("noise-sweep needs a non-empty eps grid");
  int status = kExitOk;
  for (const int t : inv.config.resolved_steps()) {
    const NoiseSweepResult sweep = run_noise_sweep(inv.config, t);
    write_sweep(sweep, out, log);
    status = std::max(status, sweep_status(sweep, inv.strict, log));
  }
  out.summary["predictions"] = predictions(inv.config, kReferenceGamma, true, "reference");
  return status;
}

std::vector<BoundKind> requested_kinds(const Invocation& inv) {
  const std::string k = inv.resolved.at("bound_kind");
  if (k == "lower") return {BoundKind::Lower};
  if (k == "upper") return {BoundKind::Upper};
  return {BoundKind::Lower, BoundKind::Upper};
}

int run_threshold_cmd(const Invocation& inv, Outputs& out, std::ostream& log) {
  if (inv.config.epsilon_grid.empty()) throw std::invalid_argument("threshold needs a non-empty eps grid");
  int status = kExitOk;
  bool missing = false;
  std::vector<ThresholdEntry> entries;
  for (const int t : inv.config.resolved_steps()) {
    const NoiseSweepResult sweep = run_noise_sweep(inv.config, t);
    write_sweep(sweep, out, log);
    status = std::max(status, sweep_status(sweep, inv.strict, log));
    for (const BoundKind kind : requested_kinds(inv)) {
      const ThresholdResult r = find_threshold(inv.config, sweep, kind);
      for (const auto& e : r.entries) {
        entries.push_back(e);
        if (!e.epsilon) {
          missing = true;
          log << "no bracket: nq=" << e.n_qubits << " t=" << t << " " << to_string(kind) << " never crosses "
              << e.target << " on the eps grid\n";
        }
      }
      if (r.fit) {
        out.fit("threshold_" + std::string(to_string(kind)) + "_t" + std::to_string(t), *r.fit);
        log << "threshold " << to_string(kind) << " t=" << t << " exponent=" << r.fit->exponent_or_rate << '\n';
      }
    }
  }
  CsvFile csv(out.add("thresholds.csv"), {"nq", "t", "bound_kind", "eps_threshold", "method"});
  for (const auto& e : entries) {
    csv.row({num(e.n_qubits), num(e.steps), std::string(to_string(e.kind)), e.epsilon ? num(*e.epsilon) : "nan",
             e.method});
  }
  out.summary["predictions"] = predictions(inv.config, kReferenceGamma, true, "reference");
  if (missing) return kExitNoBracket;
  return status;
}

int run_calibrate_cmd(const Invocation& inv, Outputs& out, std::ostream& log) {
  const GammaCalibration g = calibrate_gamma(inv.config);
  CsvFile csv(out.add("gamma.csv"),
              {"nq", "t", "eps", "fidelity", "neg_log_fidelity", "x_reference", "x_actual"});
  for (const auto& p : g.points) {
    csv.row({num(p.n_qubits), num(p.steps), num(p.epsilon), num(p.fidelity), num(p.neg_log_fidelity),
             num(p.x_reference), num(p.x_actual)});
  }
  out.fit("gamma_reference", g.reference_fit);
  out.fit("gamma_actual", g.actual_fit);
  log << "gamma (3 n_q^2 + n_q convention) = " << g.gamma_reference() << ", R^2 = " << g.reference_fit.r_squared
      << '\n';
  log << "gamma (actual gate count) = " << g.gamma_actual() << ", R^2 = " << g.actual_fit.r_squared << '\n';
  out.summary["gamma_reference"] = g.gamma_reference();
  out.summary["gamma_actual"] = g.gamma_actual();
  out.summary["predictions"] = ordered_json::array(
      {predictions(inv.config, kReferenceGamma, true, "reference"),
       predictions(inv.config, g.gamma_reference(), true, "calibrated, reference gate count"),
       predictions(inv.config, g.gamma_actual(), false, "calibrated, actual gate count")});
  return kExitOk;
}

int run_validate_cmd(const Invocation& inv, Outputs& out, std::ostream& log) {
  const auto results = run_property_suite(inv.config.master_seed, inv.config.workers);
  CsvFile csv(out.add("validation.csv"), {"check", "passed", "detail"});
  ordered_json checks = ordered_json::array();
  for (const auto& r : results) {
    log << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
    std::string detail = r.detail;
    std::replace(detail.begin(), detail.end(), ',', ';');
    csv.row({r.name, r.passed ? "true" : "false", detail});
    checks.push_back({{"check", r.name}, {"passed", r.passed}, {"detail", r.detail}});
  }
  out.summary["checks"] = std::move(checks);
  return all_passed(results) ? kExitOk : kExitInvariant;
}

}  // namespace

// --- settings ------------------------------------------------------------------

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "nq",          "k_param",       "steps",   "eps_grid",         "realizations",
      "seed",        "workers",       "out",     "strict",           "haar_samples",
      "fraction",    "refine",        "bound_kind", "allow_large_mixed", "initial_momentum",
      "realization_multiplier"};
  return keys;
}

Settings parse_config_text(std::string_view text) {
  Settings out;
  std::size_t line_no = 0;
  for (const auto& raw : split(text, '\n')) {
    ++line_no;
    std::string line = raw;
    if (const auto hash = line.find('#'); hash != std::string::npos) line = trim(line.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    std::replace(key.begin(), key.end(), '-', '_');
    const auto& keys = known_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    if (out.contains(key)) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

Settings read_config_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

Settings merge_settings(const Settings& file, const Settings& flags, std::vector<std::string>& warnings) {
  Settings out = file;
  for (const auto& [key, value] : flags) {
    const auto it = file.find(key);
    if (it != file.end() && it->second != value) {
      std::string flag = key;
      std::replace(flag.begin(), flag.end(), '_', '-');
      warnings.push_back("--" + flag + "=" + value + " overrides config value '" + it->second + "'");
    }
    out[key] = value;
  }
  return out;
}

std::vector<double> parse_epsilon_grid(std::string_view text) {
  const std::string s = trim(text);
  if (s.empty()) return {};
  if (s.find(':') != std::string::npos) {
    const auto parts = split(s, ':');
    if (parts.size() != 4 || (parts[2] != "log" && parts[2] != "lin")) {
      throw std::invalid_argument("eps grid must look like 'lo:hi:log:n' or 'lo:hi:lin:n'");
    }
    const double lo = to_double(parts[0], "eps grid"), hi = to_double(parts[1], "eps grid");
    const long long n = to_integer(parts[3], "eps grid");
    if (n < 2) throw std::invalid_argument("eps grid needs at least 2 points");
    if (!(hi > lo) || lo < 0.0) throw std::invalid_argument("eps grid needs 0 <= lo < hi");
    const bool log_spaced = parts[2] == "log";
    if (log_spaced && !(lo > 0.0)) throw std::invalid_argument("log eps grid needs lo > 0");
    std::vector<double> out;
    for (long long i = 0; i < n; ++i) {
      const double f = static_cast<double>(i) / static_cast<double>(n - 1);
      out.push_back(i == n - 1 ? hi
                    : log_spaced ? lo * std::pow(hi / lo, f)
                                 : lo + (hi - lo) * f);
    }
    out.front() = lo;
    return out;
  }
  std::vector<double> out;
  for (const auto& p : split(s, ',')) out.push_back(to_double(p, "eps grid"));
  return out;
}

std::vector<int> parse_int_list(std::string_view text) {
  std::vector<int> out;
  for (const auto& p : split(text, ',')) {
    const long long v = to_integer(p, "integer list");
    if (v < INT32_MIN || v > INT32_MAX) throw std::invalid_argument("integer out of range: " + p);
    out.push_back(static_cast<int>(v));
  }
  return out;
}

bool is_subcommand(std::string_view name) {
  return name == "generate" || name == "spectrum" || name == "noise-sweep" || name == "threshold" ||
         name == "calibrate-gamma" || name == "validate";
}

Invocation resolve(std::string_view subcommand, const Settings& merged, std::optional<std::string> env_seed) {
  if (!is_subcommand(subcommand)) throw std::invalid_argument("unknown subcommand '" + std::string(subcommand) + "'");
  Invocation inv;
  inv.subcommand = subcommand;

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  Settings s = {{"k_param", "1.5"},
                {"steps", "30"},
                {"eps_grid", ""},
                {"realizations", "auto"},
                {"seed", "0"},
                {"workers", std::to_string(hw)},
                {"out", "entforge-out"},
                {"strict", "false"},
                {"haar_samples", std::to_string(kDefaultHaarSamples)},
                {"fraction", "0.5"},
                {"refine", "false"},
                {"bound_kind", "both"},
                {"allow_large_mixed", "false"},
                {"initial_momentum", "0"},
                {"realization_multiplier", "4"}};
  if (subcommand == "generate" || subcommand == "spectrum") {
    s["nq"] = "4,6,8,10";
  } else if (subcommand == "noise-sweep") {
    s["nq"] = "4,6,8";
    s["eps_grid"] = "1e-4:1e-1:log:13";
  } else if (subcommand == "threshold") {
    s["nq"] = "4,6,8";
    s["steps"] = "15,30";
    s["eps_grid"] = "1e-4:1e-1:log:13";
  } else if (subcommand == "calibrate-gamma") {
    s["nq"] = "4,6";
    s["steps"] = "15,30";
    s["eps_grid"] = "1e-4:1e-2:log:9";
  } else {
    s["nq"] = "4";
  }
  if (env_seed && !merged.contains("seed")) s["seed"] = *env_seed;
  for (const auto& [key, value] : merged) {
    const auto& keys = known_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw std::invalid_argument("unknown setting '" + key + "'");
    }
    s[key] = value;
  }

  ExperimentConfig& c = inv.config;
  c.qubit_range = parse_int_list(s["nq"]);
  c.chaos = to_double(s["k_param"], "k-param");
  const auto steps = parse_int_list(s["steps"]);
  c.steps = steps.front();
  if (steps.size() > 1) c.step_list = steps;
  c.epsilon_grid = parse_epsilon_grid(s["eps_grid"]);
  if (s["realizations"] != "auto") {
    const long long r = to_integer(s["realizations"], "realizations");
    if (r < 1) throw std::invalid_argument("realizations must be positive or 'auto'");
    c.realizations = static_cast<std::size_t>(r);
  }
  c.master_seed = to_seed(s["seed"], merged.contains("seed") || !env_seed ? "--seed" : kSeedEnvVar);
  c.workers = static_cast<int>(to_integer(s["workers"], "workers"));
  c.output_path = s["out"];
  c.haar_samples = static_cast<int>(to_integer(s["haar_samples"], "haar-samples"));
  c.threshold_fraction = to_double(s["fraction"], "fraction");
  c.refine = to_bool(s["refine"], "refine");
  c.allow_large_mixed = to_bool(s["allow_large_mixed"], "allow-large-mixed");
  c.initial_momentum = to_integer(s["initial_momentum"], "initial-momentum");
  c.realization_multiplier = to_double(s["realization_multiplier"], "realization-multiplier");
  inv.strict = to_bool(s["strict"], "strict");
  if (s["bound_kind"] != "lower" && s["bound_kind"] != "upper" && s["bound_kind"] != "both") {
    throw std::invalid_argument("bound-kind must be lower, upper or both");
  }
  c.validate();
  if (subcommand != "validate" && subcommand != "calibrate-gamma") {
    for (const int n : c.qubit_range) {
      if (n % 2 != 0) throw std::invalid_argument("balanced bipartitions require even n_q");
    }
  }
  if (subcommand == "spectrum") {
    for (const int n : c.qubit_range) {
      if (n < 4) throw std::invalid_argument("spectrum needs n_q >= 4");
    }
  }
  // Canonical forms so the manifest reproduces the run exactly.
  s["nq"] = join(c.qubit_range);
  s["steps"] = join(steps);
  s["seed"] = std::to_string(c.master_seed);
  inv.resolved = std::move(s);
  return inv;
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string sha256_hex(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + file.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

int dispatch(const Invocation& inv, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  Outputs out;
  out.dir = inv.config.output_path;
  fs::create_directories(out.dir);
  for (const auto& w : inv.warnings) log << "warning: " << w << '\n';

  int code = kExitOk;
  if (inv.subcommand == "generate") {
    code = run_generate(inv, out, log);
  } else if (inv.subcommand == "spectrum") {
    code = run_spectrum_cmd(inv, out, log);
  } else if (inv.subcommand == "noise-sweep") {
    code = run_noise_sweep_cmd(inv, out, log);
  } else if (inv.subcommand == "threshold") {
    code = run_threshold_cmd(inv, out, log);
  } else if (inv.subcommand == "calibrate-gamma") {
    code = run_calibrate_cmd(inv, out, log);
  } else {
    code = run_validate_cmd(inv, out, log);
  }
  write_fits(out);

  ordered_json summary;
  summary["subcommand"] = inv.subcommand;
  summary["fits"] = out.fits;
  for (auto& [k, v] : out.summary.items()) summary[k] = v;
  {
    std::ofstream js(out.add("summary.json"));
    js << summary.dump(2) << '\n';
  }

  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  ordered_json manifest;
  manifest["version"] = std::string(kVersion);
  manifest["subcommand"] = inv.subcommand;
  manifest["config"] = inv.resolved;
  manifest["master_seed"] = inv.config.master_seed;
  ordered_json counts = ordered_json::array();
  for (const int n : inv.config.qubit_range) {
    counts.push_back({{"nq", n},
                      {"actual", build_step_circuit(MapParams::make(n, inv.config.chaos)).gate_count()},
                      {"reference", reference_gate_count(n)}});
  }
  manifest["gate_count"] = std::move(counts);
  manifest["gamma_convention"] = {{"gamma", kReferenceGamma},
                                  {"n_g", "3 n_q^2 + n_q"},
                                  {"note", "predictions use the reference count; actual counts listed above"}};
  manifest["duration_seconds"] = seconds;
  manifest["exit_code"] = code;
  manifest["warnings"] = inv.warnings;
  ordered_json files = ordered_json::array();
  for (const auto& f : out.files) files.push_back({{"file", f.filename().string()}, {"sha256", sha256_hex(f)}});
  manifest["outputs"] = std::move(files);
  std::ofstream(out.dir / "manifest.json") << manifest.dump(2) << '\n';
  log << "wrote " << out.files.size() + 1 << " files to " << out.dir.string() << " in " << seconds << " s\n";
  return code;
}

}  // namespace entforge::cli
