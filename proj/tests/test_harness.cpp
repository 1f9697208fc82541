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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "qdent/harness.hpp"

namespace qdent {
namespace {

using harness::json;

json qd1p_json() {
  return json::parse(R"({"params": {"fss_ueV": 0.4, "sigma_ueV": 0.41, "t1_ps": 430, "k": 0.99},
                         "config": {"seed": 1, "n_samples": 20000}})");
}

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

TEST(RunSpec, ParsesDefaults) {
  const auto spec = harness::run_spec_from_json(json::parse(R"({"params": {"fss_ueV": 0, "t2_star_ns": 2.6,
                                                                           "t1_ps": 230, "k": 1}})"));
  EXPECT_EQ(spec.config.n_samples, 200000u);
  EXPECT_EQ(spec.config.seed, 0u);
  EXPECT_FALSE(spec.config.window_ps);
  EXPECT_NEAR(resolved_sigma(spec.params), 0.2531584, 1e-6);
  ASSERT_EQ(spec.outputs.size(), 1u);
}

TEST(RunSpec, UnknownKeysAreNamed) {
  auto j = qd1p_json();
  j["params"]["fss"] = 1.0;
  EXPECT_NE(message_of([&] { harness::run_spec_from_json(j); }).find("params.fss"), std::string::npos);
  j = qd1p_json();
  j["config"]["samples"] = 10;
  EXPECT_NE(message_of([&] { harness::run_spec_from_json(j); }).find("config.samples"), std::string::npos);
  j = qd1p_json();
  j["extra"] = true;
  EXPECT_NE(message_of([&] { harness::run_spec_from_json(j); }).find("extra"), std::string::npos);
}

TEST(RunSpec, RejectsBadValues) {
  const char* cases[] = {
      R"({})",
      R"({"params": {"sigma_ueV": 0.4, "t1_ps": 430, "k": 1}})",
      R"({"params": {"fss_ueV": -1, "sigma_ueV": 0.4, "t1_ps": 430, "k": 1}})",
      R"({"params": {"fss_ueV": 0.4, "sigma_ueV": 0.4, "t1_ps": 0, "k": 1}})",
      R"({"params": {"fss_ueV": 0.4, "sigma_ueV": 0.4, "t1_ps": 430, "k": 0}})",
      R"({"params": {"fss_ueV": 0.4, "sigma_ueV": 0.4, "t1_ps": 430}})",
      R"({"params": {"fss_ueV": 0.4, "sigma_ueV": 0.4, "t1_ps": 430, "g2_xx": 0.01}})",
      R"({"params": {"fss_ueV": 0.4, "sigma_ueV": 0.4, "t2_star_ns": 1.0, "t1_ps": 430, "k": 1}})",
      R"({"params": {"fss_ueV": "0.4", "sigma_ueV": 0.4, "t1_ps": 430, "k": 1}})",
      R"({"params": {"fss_ueV": 0.4, "sigma_ueV": 0.4, "t1_ps": 430, "k": 1}, "config": {"n_samples": 0}})",
      R"({"params": {"fss_ueV": 0.4, "sigma_ueV": 0.4, "t1_ps": 430, "k": 1}, "config": {"seed": -1}})",
      R"({"params": {"fss_ueV": 0.4, "sigma_ueV": 0.4, "t1_ps": 430, "k": 1}, "config": {"window_ps": 0}})",
      R"({"params": {"fss_ueV": 0.4, "sigma_ueV": 0.4, "t1_ps": 430, "k": 1}, "config": {"quadrature": "simpson"}})",
      R"({"params": {"fss_ueV": 0.4, "sigma_ueV": 0.4, "t1_ps": 430, "k": 1}, "outputs": ["plots"]})",
      R"([1, 2])",
  };
  for (const char* c : cases) EXPECT_THROW(harness::run_spec_from_json(json::parse(c)), ConfigError) << c;
  EXPECT_THROW(harness::parse_json_text("{\"params\": ", "x.json"), ConfigError);
  EXPECT_THROW(harness::read_file("/nonexistent/spec.json"), ConfigError);
}

TEST(RunSpec, ParamsRoundTrip) {
  const auto p = harness::params_from_json(qd1p_json()["params"]);
  const auto back = harness::params_from_json(harness::params_to_json(p));
  EXPECT_EQ(back.fss_ueV, p.fss_ueV);
  EXPECT_EQ(back.sigma_ueV, p.sigma_ueV);
  EXPECT_EQ(back.k, p.k);
  EXPECT_FALSE(back.t2_star_ns);
}

TEST(SimulateReport, FieldsAndPerfectSource) {
  auto j = json::parse(R"({"params": {"fss_ueV": 0, "sigma_ueV": 0, "t1_ps": 430, "k": 1},
                           "outputs": ["metrics", "density_matrix"]})");
  const auto r = harness::simulate_report(harness::run_spec_from_json(j));
  EXPECT_DOUBLE_EQ(r["fidelity"].get<double>(), 1.0);
  EXPECT_NEAR(r["concurrence"].get<double>(), 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(r["eq7_fidelity"].get<double>(), 1.0);
  for (const char* key : {"params", "resolved", "seed", "n_samples", "quadrature", "window_ps", "fidelity_stderr",
                          "purity", "eq7_minus_model", "warnings", "density_matrix"}) {
    EXPECT_TRUE(r.contains(key)) << key;
  }
  const Mat4 rho = harness::density_matrix_from_json(r["density_matrix"]);
  EXPECT_LT(max_abs_diff(rho, phi_plus_density()), 1e-15);
}

TEST(SimulateReport, ReportsClosedFormGap) {
  const auto r = harness::simulate_report(harness::run_spec_from_json(qd1p_json()));
  EXPECT_NEAR(r["eq7_fidelity"].get<double>(), 0.8147858, 1e-6);
  EXPECT_NEAR(r["eq7_minus_model"].get<double>(), r["eq7_fidelity"].get<double>() - r["fidelity"].get<double>(),
              1e-15);
  EXPECT_LT(r["eq7_minus_model"].get<double>(), -0.05);
  EXPECT_FALSE(r.contains("density_matrix"));
}

TEST(SimulateReport, DeterministicAndWarns) {
  auto j = qd1p_json();
  j["params"]["tau_s_us"] = 1e-5;
  const auto spec = harness::run_spec_from_json(j);
  const auto a = harness::simulate_report(spec), b = harness::simulate_report(spec);
  EXPECT_EQ(a.dump(), b.dump());
  EXPECT_EQ(a["warnings"].size(), 1u);
}

TEST(FssSweep, ColumnsOrderedAndClosedFormMatches) {
  const auto spec = harness::run_spec_from_json(qd1p_json());
  SimConfig c = spec.config;
  c.n_samples = 2000;
  const auto rows = harness::fss_sweep(spec.params, c, 0.0, 2.5, 6);
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_DOUBLE_EQ(rows.back().fss_ueV, 2.5);
  double prev = 2.0;
  for (const auto& r : rows) {
    // larger Overhauser amplitude never helps
    EXPECT_GE(r.f_sigma0, r.f_sigma_low);
    EXPECT_GE(r.f_sigma_low, r.f_sigma_ref);
    EXPECT_GE(r.f_sigma_ref, r.f_sigma_high);
    EXPECT_LE(r.f_sigma0, prev);
    prev = r.f_sigma0;
    EXPECT_DOUBLE_EQ(r.f_closed_form_ref, analytic_fidelity(r.fss_ueV, harness::sigma_ref(), 430.0, 0.99));
  }
  const auto csv = harness::sweep_csv(rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "S_ueV,f_sigma0,f_sigma_low,f_sigma_ref,f_sigma_high,f_eq7_ref");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 7);
  EXPECT_THROW(harness::fss_sweep(spec.params, c, 1.0, 0.5, 5), ConfigError);
  EXPECT_THROW(harness::fss_sweep(spec.params, c, 0.0, 1.0, 1), ConfigError);
}

TEST(WindowSweep, ApproachesFullAverage) {
  const auto spec = harness::run_spec_from_json(qd1p_json());
  SimConfig c = spec.config;
  c.n_samples = 5000;
  const auto rows = harness::window_sweep(spec.params, c, {10.0, 100.0, 350.0, 1000.0, 1e5});
  ASSERT_EQ(rows.size(), 5u);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_LT(rows[i].metrics.concurrence, rows[i - 1].metrics.concurrence);
  }
  const auto full = entanglement_metrics(monte_carlo_rho(spec.params, c));
  EXPECT_NEAR(rows.back().metrics.concurrence, full.concurrence, 1e-9);
  const auto mixed = harness::window_sweep(spec.params, c, {350.0}, true);
  EXPECT_LT(mixed[0].metrics.fidelity, rows[2].metrics.fidelity);
  EXPECT_EQ(harness::window_csv(rows).substr(0, 32), "window_ps,concurrence,fidelity,p");
  EXPECT_THROW(harness::window_sweep(spec.params, c, {100.0, 50.0}), ConfigError);
  EXPECT_THROW(harness::window_sweep(spec.params, c, {-1.0}), ConfigError);
}

TEST(Literature, EmptyAndShapes) {
  EXPECT_TRUE(harness::literature_from_text("", "x").empty());
  EXPECT_TRUE(harness::literature_from_text("  \n", "x").empty());
  EXPECT_TRUE(harness::literature_from_text("[]", "x").empty());
  EXPECT_TRUE(harness::literature_from_text(R"({"entries": []})", "x").empty());
  EXPECT_TRUE(harness::compare_literature({}, SimConfig{}).empty());
  EXPECT_THROW(harness::literature_from_text(R"({"rows": []})", "x"), ConfigError);
  EXPECT_THROW(harness::literature_from_text(R"([{"label": "a"}])", "x"), ConfigError);
}

TEST(Literature, WindowedEntriesUseConcurrence) {
  const auto entries = harness::literature_from_text(R"([
    {"label": "full", "t1_ps": 430, "fss_ueV": 0.4, "reported_metric": "fidelity",
     "reported_value": 0.89, "t2_star_range_ns": [1.0, 3.2]},
    {"label": "gated, \"short\"", "t1_ps": 430, "fss_ueV": 0.4, "window_ps": 256, "reported_metric": "concurrence",
     "reported_value": null, "t2_star_range_ns": [1.7, 1.7]}])",
                                                     "lit");
  ASSERT_EQ(entries.size(), 2u);
  SimConfig c;
  c.n_samples = 5000;
  const auto rows = harness::compare_literature(entries, c);
  EXPECT_LT(rows[0].predicted_min, rows[0].predicted_max);
  ASSERT_TRUE(rows[0].within_range.has_value());
  EXPECT_FALSE(rows[1].within_range.has_value());
  EXPECT_DOUBLE_EQ(rows[1].predicted_min, rows[1].predicted_max);
  PhysicalParams p;
  p.fss_ueV = 0.4;
  p.t1_ps = 430;
  p.t2_star_ns = 1.7;
  p.k = 1.0;
  c.window_ps = 256.0;
  EXPECT_DOUBLE_EQ(rows[1].predicted_min, concurrence(monte_carlo_rho(p, c)));
  const auto csv = harness::comparison_csv(rows);
  EXPECT_NE(csv.find("\"gated, \"\"short\"\"\""), std::string::npos);
  EXPECT_NE(harness::comparison_table(rows).find("full"), std::string::npos);
}

TEST(Tomography, SixteenBasisNoiselessReport) {
  const auto spec = harness::run_spec_from_json(qd1p_json());
  const Mat4 truth = model_state(spec.params, spec.config);
  const auto run = harness::tomography_report(truth, TomographyMode::sixteen_basis, 1000000, 0, false);
  EXPECT_TRUE(run.converged);
  EXPECT_LT(run.report["trace_distance"].get<double>(), 1e-4);
  EXPECT_EQ(run.report["counts"].size(), 16u);
  EXPECT_EQ(run.report["counts_source"], "simulated");
}

TEST(Tomography, SixBasisReportHasNoMatrix) {
  const auto run = harness::tomography_report(phi_plus_density(), TomographyMode::six_basis, 1000, 0, true);
  EXPECT_FALSE(run.report.contains("reconstruction"));
  EXPECT_GT(run.report["fidelity_estimate"].get<double>(), 0.95);
}

TEST(DensityMatrixJson, RejectsBadInput) {
  auto j = harness::density_matrix_to_json(phi_plus_density());
  j["basis_order"] = "HVHV";
  EXPECT_THROW(harness::density_matrix_from_json(j), ConfigError);
  j = harness::density_matrix_to_json(phi_plus_density());
  j["data"][0][0] = json::array({2.0, 0.0});
  EXPECT_THROW(harness::density_matrix_from_json(j), ConfigError);
  j = harness::density_matrix_to_json(phi_plus_density());
  j["data"].erase(3);
  EXPECT_THROW(harness::density_matrix_from_json(j), ConfigError);
}

}  // namespace
}  // namespace qdent
