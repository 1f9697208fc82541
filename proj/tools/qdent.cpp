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

// Command-line front end: simulate, sweep, window-sweep, compare, tomography.
//
// Exit codes: 0 success, 2 configuration / input error, 3 numerical failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qdent/harness.hpp"

namespace {

using qdent::harness::json;

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct GlobalOptions {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples;
  std::optional<std::string> quadrature;
  std::string out;
};

void apply_overrides(const GlobalOptions& g, qdent::SimConfig& c) {
  if (g.seed) c.seed = *g.seed;
  if (g.samples) {
    if (*g.samples < 1) throw qdent::ConfigError("--samples must be >= 1");
    c.n_samples = *g.samples;
  }
  if (g.quadrature) {
    const std::string& q = *g.quadrature;
    if (q == "monte_carlo") {
      c.quadrature = qdent::QuadratureKind::monte_carlo;
    } else if (q.rfind("gauss_hermite", 0) == 0) {
      c.quadrature = qdent::QuadratureKind::gauss_hermite;
      if (q.size() > 13) {
        if (q[13] != ':') throw qdent::ConfigError("--quadrature: expected gauss_hermite[:ORDER]");
        try {
          std::size_t pos = 0;
          c.gh_order = std::stoi(q.substr(14), &pos);
          if (pos != q.size() - 14) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
          throw qdent::ConfigError("--quadrature: malformed gauss_hermite order");
        }
      }
      if (c.gh_order < 3 || c.gh_order > 64) throw qdent::ConfigError("--quadrature: order must lie in [3, 64]");
    } else {
      throw qdent::ConfigError("--quadrature must be monte_carlo or gauss_hermite[:ORDER]");
    }
  }
}

json run_metadata(const std::string& command, const qdent::SimConfig& c) {
  return {{"command", command}, {"config", qdent::harness::config_to_json(c)}};
}

// Writes `text` to --out (or stdout). CSV outputs get their run metadata in a
// sidecar "<out>.meta.json", or on stderr when printing to stdout.
void emit(const GlobalOptions& g, const std::string& text, const std::optional<json>& meta = std::nullopt) {
  if (g.out.empty()) {
    std::cout << text;
    std::cout.flush();
    if (meta) std::cerr << "# " << meta->dump() << "\n";
    return;
  }
  std::ofstream f(g.out, std::ios::binary);
  if (!f) throw qdent::ConfigError("cannot write '" + g.out + "'");
  f << text;
  if (meta) {
    std::ofstream m(g.out + ".meta.json", std::ios::binary);
    m << meta->dump(2) << "\n";
  }
}

std::vector<double> parse_window_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::istringstream is(item);
    is.imbue(std::locale::classic());
    double v = 0.0;
    is >> v;
    if (!is || !(is >> std::ws).eof()) throw qdent::ConfigError("--windows: malformed value '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw qdent::ConfigError("--windows: at least one window required");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entangled photon pairs from quantum-dot cascades: hyperfine-noise model and analysis tools"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  std::uint64_t seed_v = 0;
  std::size_t samples_v = 0;
  std::string quad_v;
  auto* seed_opt = app.add_option("--seed", seed_v, "Random seed (overrides the input file)");
  auto* samples_opt = app.add_option("--samples", samples_v, "Monte Carlo sample count");
  auto* quad_opt = app.add_option("--quadrature", quad_v, "monte_carlo | gauss_hermite[:ORDER]");
  app.add_option("--out", g.out, "Output file (default: stdout)");

  std::string spec_path;

  auto* simulate = app.add_subcommand("simulate", "Model state metrics for one run spec");
  simulate->add_option("spec", spec_path, "Run spec (JSON)")->required();

  double s_min = 0.0, s_max = 2.5;
  int n_points = 26;
  auto* sweep = app.add_subcommand("sweep", "Fidelity versus fine-structure splitting (CSV)");
  sweep->add_option("spec", spec_path, "Run spec (JSON)")->required();
  sweep->add_option("--s-min", s_min, "Smallest S, ueV")->capture_default_str();
  sweep->add_option("--s-max", s_max, "Largest S, ueV")->capture_default_str();
  sweep->add_option("--n-points", n_points, "Grid points")->capture_default_str();

  std::string windows_str = "50,100,200,350,500,1000,2000,3000";
  bool with_mixing = false;
  auto* wsweep = app.add_subcommand("window-sweep", "Metrics versus coincidence window (CSV)");
  wsweep->add_option("spec", spec_path, "Run spec (JSON)")->required();
  wsweep->add_option("--windows", windows_str, "Comma-separated ascending windows, ps")->capture_default_str();
  wsweep->add_flag("--with-mixing", with_mixing, "Apply the multi-pair mixing channel of the params");

  std::string lit_path;
  auto* compare = app.add_subcommand("compare", "Compare literature values with the model range");
  compare->add_option("literature", lit_path, "Literature file (JSON)")->required();

  std::uint64_t n_per_setting = 1000000;
  std::string mode_str = "sixteen_basis";
  bool poisson = false;
  std::string export_counts, import_counts;
  auto* tomo = app.add_subcommand("tomography", "Simulated coincidence counts and state reconstruction");
  tomo->add_option("source", spec_path, "Run spec or density matrix (JSON)")->required();
  tomo->add_option("--n-per-setting", n_per_setting, "Expected coincidences per unit-probability setting")
      ->capture_default_str();
  tomo->add_option("--mode", mode_str, "sixteen_basis | six_basis")->capture_default_str();
  tomo->add_flag("--poisson", poisson, "Draw Poisson-distributed counts");
  tomo->add_option("--export-counts", export_counts, "Write the counts as CSV");
  tomo->add_option("--import-counts", import_counts, "Reconstruct from a counts CSV instead of simulating");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }
  if (seed_opt->count()) g.seed = seed_v;
  if (samples_opt->count()) g.samples = samples_v;
  if (quad_opt->count()) g.quadrature = quad_v;

  namespace h = qdent::harness;
  try {
    if (simulate->parsed()) {
      auto spec = h::load_run_spec(spec_path);
      apply_overrides(g, spec.config);
      const json report = h::simulate_report(spec);
      for (const auto& w : report["warnings"]) std::cerr << "warning: " << w.get<std::string>() << "\n";
      emit(g, report.dump(2) + "\n");
    } else if (sweep->parsed()) {
      auto spec = h::load_run_spec(spec_path);
      apply_overrides(g, spec.config);
      const auto rows = h::fss_sweep(spec.params, spec.config, s_min, s_max, n_points);
      emit(g, h::sweep_csv(rows), run_metadata("sweep", spec.config));
    } else if (wsweep->parsed()) {
      auto spec = h::load_run_spec(spec_path);
      apply_overrides(g, spec.config);
      const auto rows = h::window_sweep(spec.params, spec.config, parse_window_list(windows_str), with_mixing);
      json meta = run_metadata("window-sweep", spec.config);
      meta["with_mixing"] = with_mixing;
      emit(g, h::window_csv(rows), meta);
    } else if (compare->parsed()) {
      const auto entries = h::literature_from_text(h::read_file(lit_path), lit_path);
      qdent::SimConfig config;
      apply_overrides(g, config);
      const auto rows = h::compare_literature(entries, config);
      std::cerr << h::comparison_table(rows);
      emit(g, h::comparison_csv(rows), run_metadata("compare", config));
    } else if (tomo->parsed()) {
      qdent::TomographyMode mode;
      if (mode_str == "sixteen_basis") {
        mode = qdent::TomographyMode::sixteen_basis;
      } else if (mode_str == "six_basis") {
        mode = qdent::TomographyMode::six_basis;
      } else {
        throw qdent::ConfigError("--mode must be sixteen_basis or six_basis");
      }
      if (n_per_setting == 0) throw qdent::ConfigError("--n-per-setting must be > 0");
      std::uint64_t seed = 0;
      const qdent::Mat4 truth = h::load_tomography_source(spec_path, [&](qdent::SimConfig& c) {
        apply_overrides(g, c);
        seed = c.seed;
      });
      if (g.seed) seed = *g.seed;
      std::optional<std::vector<qdent::CountRecord>> imported;
      if (!import_counts.empty()) {
        std::ifstream in(import_counts);
        if (!in) throw qdent::ConfigError("cannot read '" + import_counts + "'");
        imported = qdent::read_counts_csv(in);
      }
      const auto run = h::tomography_report(truth, mode, n_per_setting, seed, poisson, imported);
      if (!export_counts.empty()) {
        std::vector<qdent::CountRecord> records;
        for (const auto& c : run.report["counts"]) {
          auto r = qdent::CountRecord{qdent::setting_from_label(c["label"].get<std::string>()),
                                      c["counts"].get<std::uint64_t>(), c["weight"].get<double>()};
          records.push_back(r);
        }
        std::ofstream f(export_counts, std::ios::binary);
        if (!f) throw qdent::ConfigError("cannot write '" + export_counts + "'");
        qdent::write_counts_csv(f, records);
      }
      emit(g, run.report.dump(2) + "\n");
      if (!run.converged) {
        std::cerr << "error: maximum-likelihood reconstruction did not converge\n";
        return kExitNumerical;
      }
    }
  } catch (const qdent::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const qdent::InvalidArgument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const qdent::ZeroCounts& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const qdent::InsufficientSettings& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const qdent::Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
  return 0;
}
