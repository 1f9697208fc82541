// Copyright 2026 The qdent Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Run-spec and literature-file schemas plus the computations behind each CLI
// subcommand. Kept in the library so the commands can be tested without
// spawning processes.

#include <cstdio>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "qdent/cascade.hpp"
#include "qdent/errors.hpp"
#include "qdent/metrics.hpp"
#include "qdent/tomography.hpp"

namespace qdent::harness {

using json = nlohmann::json;

enum class OutputKind { metrics, density_matrix, eq7, both };

struct RunSpec {
  PhysicalParams params;
  SimConfig config;
  std::vector<OutputKind> outputs{OutputKind::metrics};
};

enum class ReportedMetric { fidelity, concurrence };

struct LiteratureEntry {
  std::string label;
  double t1_ps = 0.0;
  double fss_ueV = 0.0;
  std::optional<double> window_ps;
  std::optional<double> reported_value;  // absent: prediction only
  ReportedMetric reported_metric = ReportedMetric::fidelity;
  double t2_star_min_ns = 0.0;
  double t2_star_max_ns = 0.0;
};

// Overhauser amplitudes spanned by the reported electron T2* values of
// In(Ga)As dots (3.2 ns, 1.7 ns, 1.0 ns).
inline double sigma_low() { return sigma_from_t2star(3.2); }
inline double sigma_ref() { return sigma_from_t2star(1.7); }
inline double sigma_high() { return sigma_from_t2star(1.0); }

// ---------------------------------------------------------------- formatting

/// Shortest-round-trip-ish fixed formatting, independent of locale.
inline std::string fmt_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// ---------------------------------------------------------------- JSON schema

namespace detail {

inline void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError("'" + path + "' must be an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) throw ConfigError("unknown key '" + (path.empty() ? "" : path + ".") + it.key() + "'");
  }
}

inline std::string key_path(const std::string& path, const char* key) {
  return path.empty() ? std::string(key) : path + "." + key;
}

inline std::optional<double> opt_number(const json& obj, const std::string& path, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) throw ConfigError("'" + key_path(path, key) + "' must be a number");
  return it->get<double>();
}

inline double req_number(const json& obj, const std::string& path, const char* key) {
  auto v = opt_number(obj, path, key);
  if (!v) throw ConfigError("missing required key '" + key_path(path, key) + "'");
  return *v;
}

inline void check(bool ok, const std::string& key, const char* what) {
  if (!ok) throw ConfigError("'" + key + "' " + what);
}

}  // namespace detail

inline PhysicalParams params_from_json(const json& j) {
  using namespace detail;
  reject_unknown(j, "params",
                 {"fss_ueV", "sigma_ueV", "t2_star_ns", "t1_ps", "k", "g2_xx", "g2_x", "eta_p", "t1_xx_ps", "tau_s_us"});
  PhysicalParams p;
  p.fss_ueV = req_number(j, "params", "fss_ueV");
  p.t1_ps = req_number(j, "params", "t1_ps");
  p.sigma_ueV = opt_number(j, "params", "sigma_ueV");
  p.t2_star_ns = opt_number(j, "params", "t2_star_ns");
  p.k = opt_number(j, "params", "k");
  p.g2_xx = opt_number(j, "params", "g2_xx");
  p.g2_x = opt_number(j, "params", "g2_x");
  p.eta_p = opt_number(j, "params", "eta_p");
  p.t1_xx_ps = opt_number(j, "params", "t1_xx_ps");
  p.tau_s_us = opt_number(j, "params", "tau_s_us");

  check(p.fss_ueV >= 0.0, "params.fss_ueV", "must be >= 0");
  check(p.t1_ps > 0.0, "params.t1_ps", "must be > 0");
  if (p.sigma_ueV) check(*p.sigma_ueV >= 0.0, "params.sigma_ueV", "must be >= 0");
  if (p.t2_star_ns) check(*p.t2_star_ns > 0.0, "params.t2_star_ns", "must be > 0");
  if (p.sigma_ueV && p.t2_star_ns) {
    check(std::abs(*p.sigma_ueV - sigma_from_t2star(*p.t2_star_ns)) <= 1e-6, "params.sigma_ueV",
          "disagrees with params.t2_star_ns (sigma = hbar / T2*)");
  }
  if (p.k) check(*p.k > 0.0 && *p.k <= 1.0, "params.k", "must lie in (0, 1]");
  const int n_g2 = int(p.g2_xx.has_value()) + int(p.g2_x.has_value()) + int(p.eta_p.has_value());
  check(n_g2 == 0 || n_g2 == 3, "params.g2_xx", "g2_xx, g2_x and eta_p must be given together");
  if (p.g2_xx) check(*p.g2_xx >= 0.0 && *p.g2_xx < 1.0, "params.g2_xx", "must lie in [0, 1)");
  if (p.g2_x) check(*p.g2_x >= 0.0 && *p.g2_x < 1.0, "params.g2_x", "must lie in [0, 1)");
  if (p.eta_p) check(*p.eta_p > 0.0 && *p.eta_p <= 1.0, "params.eta_p", "must lie in (0, 1]");
  if (p.t1_xx_ps) check(*p.t1_xx_ps > 0.0, "params.t1_xx_ps", "must be > 0");
  if (p.tau_s_us) check(*p.tau_s_us > 0.0, "params.tau_s_us", "must be > 0");
  if (p.k && n_g2 == 3) {
    check(std::abs(*p.k - k_from_g2(*p.g2_xx, *p.g2_x, *p.eta_p)) <= 1e-9, "params.k",
          "disagrees with the value derived from g2_xx, g2_x and eta_p");
  }
  check(p.k.has_value() || n_g2 == 3, "params.k", "is required unless g2_xx, g2_x and eta_p are given");
  return p;
}

inline json params_to_json(const PhysicalParams& p) {
  json j;
  j["fss_ueV"] = p.fss_ueV;
  j["t1_ps"] = p.t1_ps;
  auto put = [&](const char* key, const std::optional<double>& v) {
    if (v) j[key] = *v;
  };
  put("sigma_ueV", p.sigma_ueV);
  put("t2_star_ns", p.t2_star_ns);
  put("k", p.k);
  put("g2_xx", p.g2_xx);
  put("g2_x", p.g2_x);
  put("eta_p", p.eta_p);
  put("t1_xx_ps", p.t1_xx_ps);
  put("tau_s_us", p.tau_s_us);
  return j;
}

inline std::string quadrature_name(QuadratureKind q) {
  return q == QuadratureKind::monte_carlo ? "monte_carlo" : "gauss_hermite";
}

inline SimConfig config_from_json(const json& j) {
  using namespace detail;
  reject_unknown(j, "config", {"n_samples", "seed", "window_ps", "quadrature", "gh_order"});
  SimConfig c;
  if (auto it = j.find("n_samples"); it != j.end()) {
    check(it->is_number_integer() && it->get<long long>() >= 1, "config.n_samples", "must be an integer >= 1");
    c.n_samples = it->get<std::size_t>();
  }
  if (auto it = j.find("seed"); it != j.end()) {
    check(it->is_number_unsigned() || (it->is_number_integer() && it->get<long long>() >= 0), "config.seed",
          "must be a non-negative integer");
    c.seed = it->get<std::uint64_t>();
  }
  c.window_ps = opt_number(j, "config", "window_ps");
  if (c.window_ps) check(*c.window_ps > 0.0, "config.window_ps", "must be > 0");
  if (auto it = j.find("quadrature"); it != j.end()) {
    check(it->is_string(), "config.quadrature", "must be \"monte_carlo\" or \"gauss_hermite\"");
    const auto q = it->get<std::string>();
    if (q == "monte_carlo") {
      c.quadrature = QuadratureKind::monte_carlo;
    } else if (q == "gauss_hermite") {
      c.quadrature = QuadratureKind::gauss_hermite;
    } else {
      throw ConfigError("'config.quadrature' must be \"monte_carlo\" or \"gauss_hermite\"");
    }
  }
  if (auto it = j.find("gh_order"); it != j.end()) {
    check(it->is_number_integer(), "config.gh_order", "must be an integer");
    c.gh_order = it->get<int>();
  }
  check(c.gh_order >= 3 && c.gh_order <= 64, "config.gh_order", "must lie in [3, 64]");
  return c;
}

inline json config_to_json(const SimConfig& c) {
  json j;
  j["n_samples"] = c.n_samples;
  j["seed"] = c.seed;
  j["window_ps"] = c.window_ps ? json(*c.window_ps) : json(nullptr);
  j["quadrature"] = quadrature_name(c.quadrature);
  j["gh_order"] = c.gh_order;
  return j;
}

inline RunSpec run_spec_from_json(const json& j) {
  detail::reject_unknown(j, "", {"params", "config", "outputs"});
  RunSpec spec;
  const auto p = j.find("params");
  if (p == j.end()) throw ConfigError("missing required key 'params'");
  spec.params = params_from_json(*p);
  if (auto c = j.find("config"); c != j.end()) spec.config = config_from_json(*c);
  if (auto o = j.find("outputs"); o != j.end()) {
    if (!o->is_array()) throw ConfigError("'outputs' must be an array");
    spec.outputs.clear();
    for (const auto& v : *o) {
      const std::string s = v.is_string() ? v.get<std::string>() : "";
      if (s == "metrics") {
        spec.outputs.push_back(OutputKind::metrics);
      } else if (s == "density_matrix") {
        spec.outputs.push_back(OutputKind::density_matrix);
      } else if (s == "eq7") {
        spec.outputs.push_back(OutputKind::eq7);
      } else if (s == "both") {
        spec.outputs.push_back(OutputKind::both);
      } else {
        throw ConfigError("'outputs' entries must be one of metrics, density_matrix, eq7, both");
      }
    }
  }
  return spec;
}

inline json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(source + ": invalid JSON (" + e.what() + ")");
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline RunSpec load_run_spec(const std::string& path) { return run_spec_from_json(parse_json_text(read_file(path), path)); }

// ---------------------------------------------------------------- density matrix JSON

inline json density_matrix_to_json(const Mat4& rho) {
  json rows = json::array();
  for (std::size_t i = 0; i < 4; ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < 4; ++j) row.push_back({rho(i, j).real(), rho(i, j).imag()});
    rows.push_back(row);
  }
  return {{"basis_order", "HHHVVHVV"}, {"data", rows}};
}

inline Mat4 density_matrix_from_json(const json& j) {
  detail::reject_unknown(j, "density_matrix", {"basis_order", "data"});
  if (!j.contains("basis_order") || j["basis_order"] != "HHHVVHVV") {
    throw ConfigError("'density_matrix.basis_order' must be \"HHHVVHVV\"");
  }
  const auto& d = j.contains("data") ? j["data"] : json();
  Mat4 rho;
  if (!d.is_array() || d.size() != 4) throw ConfigError("'density_matrix.data' must be a 4x4 array of [re, im]");
  for (std::size_t i = 0; i < 4; ++i) {
    if (!d[i].is_array() || d[i].size() != 4) throw ConfigError("'density_matrix.data' must be a 4x4 array of [re, im]");
    for (std::size_t k = 0; k < 4; ++k) {
      const auto& e = d[i][k];
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
        throw ConfigError("'density_matrix.data' must be a 4x4 array of [re, im]");
      }
      rho(i, k) = Complex{e[0].get<double>(), e[1].get<double>()};
    }
  }
  try {
    require_density_matrix(rho, "density_matrix");
  } catch (const InvalidDensityMatrix& e) {
    throw ConfigError(e.what());
  }
  return rho;
}

inline json metrics_to_json(const EntanglementMetrics& m) {
  return {{"fidelity", m.fidelity}, {"purity", m.purity}, {"concurrence", m.concurrence}};
}

// ---------------------------------------------------------------- simulate

inline json simulate_report(const RunSpec& spec) {
  const auto est = monte_carlo_estimate(spec.params, spec.config);
  const double k = resolved_k(spec.params);
  const double sigma = resolved_sigma(spec.params);
  const Mat4 rho = apply_multipair_mixing(est.rho, k);
  const auto m = entanglement_metrics(rho);
  const double closed_form = analytic_fidelity(spec.params.fss_ueV, sigma, spec.params.t1_ps, k);

  json out;
  out["params"] = params_to_json(spec.params);
  out["resolved"] = {{"sigma_ueV", sigma}, {"k", k}};
  out["seed"] = spec.config.seed;
  out["n_samples"] = spec.config.n_samples;
  out["quadrature"] = quadrature_name(spec.config.quadrature);
  if (spec.config.quadrature == QuadratureKind::gauss_hermite) out["gh_order"] = spec.config.gh_order;
  out["window_ps"] = spec.config.window_ps ? json(*spec.config.window_ps) : json(nullptr);
  out["fidelity"] = m.fidelity;
  out["fidelity_stderr"] = k * est.fidelity_stderr;
  out["purity"] = m.purity;
  out["concurrence"] = m.concurrence;
  out["eq7_fidelity"] = closed_form;
  // The closed form is an approximation; the gap to the averaged model is
  // reported rather than hidden.
  out["eq7_minus_model"] = closed_form - m.fidelity;
  out["warnings"] = model_warnings(spec.params);

  bool want_rho = false;
  for (auto o : spec.outputs) want_rho = want_rho || o == OutputKind::density_matrix || o == OutputKind::both;
  if (want_rho) out["density_matrix"] = density_matrix_to_json(rho);
  return out;
}

// ---------------------------------------------------------------- S sweep

struct SweepRow {
  double fss_ueV = 0.0;
  double f_sigma0 = 0.0;
  double f_sigma_low = 0.0;
  double f_sigma_ref = 0.0;
  double f_sigma_high = 0.0;
  double f_closed_form_ref = 0.0;
};

/// Model fidelity versus fine-structure splitting for σ = 0 and the three
/// reference Overhauser amplitudes. All σ columns share the seed, so each
/// Monte Carlo draw is the same standard normal rescaled.
inline std::vector<SweepRow> fss_sweep(const PhysicalParams& base, const SimConfig& config, double s_min,
                                       double s_max, int n_points) {
  if (!(s_min >= 0.0) || !(s_max >= s_min)) throw ConfigError("sweep: require 0 <= s_min <= s_max");
  if (n_points < 2) throw ConfigError("sweep: n_points must be >= 2");
  const double k = resolved_k(base);
  std::vector<SweepRow> rows;
  rows.reserve(n_points);
  for (int i = 0; i < n_points; ++i) {
    const double s = (i == n_points - 1) ? s_max : s_min + (s_max - s_min) * i / (n_points - 1);
    auto fid = [&](double sigma) {
      PhysicalParams p = base;
      p.fss_ueV = s;
      p.sigma_ueV = sigma;
      p.t2_star_ns.reset();
      const Mat4 rho = apply_multipair_mixing(monte_carlo_rho(p, config), k);
      return fidelity_phi_plus(rho);
    };
    rows.push_back({s, fid(0.0), fid(sigma_low()), fid(sigma_ref()), fid(sigma_high()),
                    analytic_fidelity(s, sigma_ref(), base.t1_ps, k)});
  }
  return rows;
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "S_ueV,f_sigma0,f_sigma_low,f_sigma_ref,f_sigma_high,f_eq7_ref\n";
  for (const auto& r : rows) {
    out += fmt_num(r.fss_ueV) + ',' + fmt_num(r.f_sigma0) + ',' + fmt_num(r.f_sigma_low) + ',' +
           fmt_num(r.f_sigma_ref) + ',' + fmt_num(r.f_sigma_high) + ',' + fmt_num(r.f_closed_form_ref) + '\n';
  }
  return out;
}

// ---------------------------------------------------------------- window sweep

struct WindowRow {
  double window_ps = 0.0;
  EntanglementMetrics metrics;
};

/// Metrics of the state propagated over delays [0, τ_w]. By default no
/// multi-pair mixing is applied (pure phase evolution); `with_mixing` adds the
/// k channel of the parameters.
inline std::vector<WindowRow> window_sweep(const PhysicalParams& params, const SimConfig& config,
                                           const std::vector<double>& windows, bool with_mixing = false) {
  for (std::size_t i = 0; i < windows.size(); ++i) {
    if (!(windows[i] > 0.0)) throw ConfigError("window-sweep: windows must be > 0");
    if (i > 0 && !(windows[i] > windows[i - 1])) throw ConfigError("window-sweep: windows must be ascending");
  }
  std::vector<WindowRow> rows;
  for (double w : windows) {
    SimConfig c = config;
    c.window_ps = w;
    Mat4 rho = monte_carlo_rho(params, c);
    if (with_mixing) rho = apply_multipair_mixing(rho, resolved_k(params));
    rows.push_back({w, entanglement_metrics(rho)});
  }
  return rows;
}

inline std::string window_csv(const std::vector<WindowRow>& rows) {
  std::string out = "window_ps,concurrence,fidelity,purity\n";
  for (const auto& r : rows) {
    out += fmt_num(r.window_ps) + ',' + fmt_num(r.metrics.concurrence) + ',' + fmt_num(r.metrics.fidelity) + ',' +
           fmt_num(r.metrics.purity) + '\n';
  }
  return out;
}

// ---------------------------------------------------------------- literature comparison

inline LiteratureEntry literature_entry_from_json(const json& j, std::size_t index) {
  using namespace detail;
  const std::string path = "entries[" + std::to_string(index) + "]";
  reject_unknown(j, path,
                 {"label", "t1_ps", "fss_ueV", "window_ps", "reported_value", "reported_metric", "t2_star_range_ns"});
  LiteratureEntry e;
  if (!j.contains("label") || !j["label"].is_string()) throw ConfigError("'" + path + ".label' must be a string");
  e.label = j["label"].get<std::string>();
  e.t1_ps = req_number(j, path, "t1_ps");
  e.fss_ueV = req_number(j, path, "fss_ueV");
  e.window_ps = opt_number(j, path, "window_ps");
  e.reported_value = opt_number(j, path, "reported_value");
  check(e.t1_ps > 0.0, path + ".t1_ps", "must be > 0");
  check(e.fss_ueV >= 0.0, path + ".fss_ueV", "must be >= 0");
  if (e.window_ps) check(*e.window_ps > 0.0, path + ".window_ps", "must be > 0");
  const auto m = j.find("reported_metric");
  if (m == j.end() || !m->is_string()) throw ConfigError("'" + path + ".reported_metric' must be a string");
  if (*m == "fidelity") {
    e.reported_metric = ReportedMetric::fidelity;
  } else if (*m == "concurrence") {
    e.reported_metric = ReportedMetric::concurrence;
  } else {
    throw ConfigError("'" + path + ".reported_metric' must be \"fidelity\" or \"concurrence\"");
  }
  const auto r = j.find("t2_star_range_ns");
  if (r == j.end() || !r->is_array() || r->size() != 2 || !(*r)[0].is_number() || !(*r)[1].is_number()) {
    throw ConfigError("'" + path + ".t2_star_range_ns' must be [low, high] in ns");
  }
  e.t2_star_min_ns = (*r)[0].get<double>();
  e.t2_star_max_ns = (*r)[1].get<double>();
  check(e.t2_star_min_ns > 0.0 && e.t2_star_min_ns <= e.t2_star_max_ns, path + ".t2_star_range_ns",
        "must satisfy 0 < low <= high");
  return e;
}

/// Accepts an empty document, a bare array of entries, or {"entries": [...]}.
inline std::vector<LiteratureEntry> literature_from_text(const std::string& text, const std::string& source) {
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) return {};
  const json doc = parse_json_text(text, source);
  const json* arr = &doc;
  if (doc.is_object()) {
    detail::reject_unknown(doc, "", {"entries"});
    if (!doc.contains("entries")) throw ConfigError("missing required key 'entries'");
    arr = &doc["entries"];
  }
  if (!arr->is_array()) throw ConfigError("'entries' must be an array");
  std::vector<LiteratureEntry> out;
  for (std::size_t i = 0; i < arr->size(); ++i) out.push_back(literature_entry_from_json((*arr)[i], i));
  return out;
}

struct ComparisonRow {
  LiteratureEntry entry;
  double predicted_min = 0.0;
  double predicted_max = 0.0;
  std::optional<bool> within_range;
};

/// Model prediction (k = 1, no multi-pair mixing) of the reported metric at
/// both ends of the entry's T2* range, windowed when the entry has a window.
inline std::vector<ComparisonRow> compare_literature(const std::vector<LiteratureEntry>& entries,
                                                     const SimConfig& config) {
  std::vector<ComparisonRow> rows;
  for (const auto& e : entries) {
    auto predict = [&](double t2_ns) {
      PhysicalParams p;
      p.fss_ueV = e.fss_ueV;
      p.t1_ps = e.t1_ps;
      p.t2_star_ns = t2_ns;
      p.k = 1.0;
      SimConfig c = config;
      c.window_ps = e.window_ps;
      const auto m = entanglement_metrics(monte_carlo_rho(p, c));
      return e.reported_metric == ReportedMetric::fidelity ? m.fidelity : m.concurrence;
    };
    const double a = predict(e.t2_star_min_ns);
    const double b = predict(e.t2_star_max_ns);
    ComparisonRow row{e, std::min(a, b), std::max(a, b), std::nullopt};
    if (e.reported_value) row.within_range = *e.reported_value >= row.predicted_min && *e.reported_value <= row.predicted_max;
    rows.push_back(row);
  }
  return rows;
}

inline std::string comparison_csv(const std::vector<ComparisonRow>& rows) {
  std::string out =
      "label,metric,t1_ps,fss_ueV,window_ps,t2_star_min_ns,t2_star_max_ns,predicted_min,predicted_max,"
      "reported_value,within_range\n";
  for (const auto& r : rows) {
    const auto& e = r.entry;
    out += csv_field(e.label) + ',' + (e.reported_metric == ReportedMetric::fidelity ? "fidelity" : "concurrence") +
           ',' + fmt_num(e.t1_ps) + ',' + fmt_num(e.fss_ueV) + ',' + (e.window_ps ? fmt_num(*e.window_ps) : "") + ',' +
           fmt_num(e.t2_star_min_ns) + ',' + fmt_num(e.t2_star_max_ns) + ',' + fmt_num(r.predicted_min) + ',' +
           fmt_num(r.predicted_max) + ',' + (e.reported_value ? fmt_num(*e.reported_value) : "") + ',' +
           (r.within_range ? (*r.within_range ? "true" : "false") : "") + '\n';
  }
  return out;
}

inline std::string comparison_table(const std::vector<ComparisonRow>& rows) {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-28s %-11s %8s %7s %8s %17s %9s %s\n", "label", "metric", "T1[ps]", "S[ueV]",
                "win[ps]", "predicted", "reported", "in range");
  out += buf;
  for (const auto& r : rows) {
    const auto& e = r.entry;
    const std::string win = e.window_ps ? fmt_num(*e.window_ps) : "-";
    const std::string rep = e.reported_value ? fmt_num(*e.reported_value) : "-";
    const std::string in = r.within_range ? (*r.within_range ? "yes" : "no") : "-";
    std::snprintf(buf, sizeof buf, "%-28s %-11s %8.1f %7.3f %8s   %.4f - %.4f %9s %s\n", e.label.c_str(),
                  e.reported_metric == ReportedMetric::fidelity ? "fidelity" : "concurrence", e.t1_ps, e.fss_ueV,
                  win.c_str(), r.predicted_min, r.predicted_max, rep.c_str(), in.c_str());
    out += buf;
  }
  return out;
}

// ---------------------------------------------------------------- tomography

struct TomographyRun {
  json report;
  bool converged = true;
};

inline json counts_to_json(const std::vector<CountRecord>& records) {
  json arr = json::array();
  for (const auto& r : records) {
    arr.push_back({{"label", r.setting.label}, {"counts", r.counts}, {"weight", r.acquisition_weight}});
  }
  return arr;
}

/// Simulated (or imported) coincidences from `truth` and the corresponding
/// estimate: MLE density matrix for sixteen_basis, visibilities and the
/// fidelity estimate for six_basis.
inline TomographyRun tomography_report(const Mat4& truth, TomographyMode mode, std::uint64_t n_per_setting,
                                       std::uint64_t seed, bool poisson,
                                       const std::optional<std::vector<CountRecord>>& imported = std::nullopt) {
  const auto records =
      imported ? *imported : simulate_counts(truth, standard_settings(mode), n_per_setting, seed, poisson);
  TomographyRun run;
  json& out = run.report;
  out["mode"] = mode == TomographyMode::six_basis ? "six_basis" : "sixteen_basis";
  out["seed"] = seed;
  out["n_per_setting"] = n_per_setting;
  out["poisson"] = poisson;
  out["counts_source"] = imported ? "imported" : "simulated";
  out["true_metrics"] = metrics_to_json(entanglement_metrics(truth));
  out["counts"] = counts_to_json(records);
  if (mode == TomographyMode::six_basis) {
    const auto est = six_basis_estimate(records);
    out["visibilities"] = {{"c_hv", est.c_hv}, {"c_da", est.c_da}, {"c_rl", est.c_rl}};
    out["fidelity_estimate"] = est.fidelity;
    return run;
  }
  const auto rec = mle_reconstruct(records);
  out["reconstruction"] = {{"metrics", metrics_to_json(entanglement_metrics(rec.rho))},
                           {"log_likelihood", rec.log_likelihood},
                           {"iterations", rec.iterations},
                           {"converged", rec.converged},
                           {"density_matrix", density_matrix_to_json(rec.rho)}};
  out["trace_distance"] = trace_distance(truth, rec.rho);
  run.converged = rec.converged;
  return run;
}

/// The state a tomography run is built on: either a run spec (the modelled
/// state with mixing) or a serialised density matrix.
inline Mat4 load_tomography_source(const std::string& path, const std::function<void(SimConfig&)>& adjust = {}) {
  const json doc = parse_json_text(read_file(path), path);
  if (doc.is_object() && doc.contains("basis_order")) return density_matrix_from_json(doc);
  RunSpec spec = run_spec_from_json(doc);
  if (adjust) adjust(spec.config);
  return model_state(spec.params, spec.config);
}

}  // namespace qdent::harness
