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

// Concurrence recovered by shortening the coincidence window.

#include <cstdio>

#include "qdent/cascade.hpp"
#include "qdent/metrics.hpp"

int main() {
  qdent::PhysicalParams p;
  p.fss_ueV = 0.4;
  p.t2_star_ns = 1.7;
  p.t1_ps = 430.0;
  p.k = 1.0;

  qdent::SimConfig config;
  config.n_samples = 50000;
  config.seed = 3;

  std::printf("%10s %12s %10s %8s\n", "window_ps", "concurrence", "fidelity", "purity");
  for (double w : {25.0, 50.0, 100.0, 200.0, 350.0, 700.0, 1500.0, 3000.0}) {
    config.window_ps = w;
    const auto m = qdent::entanglement_metrics(qdent::monte_carlo_rho(p, config));
    std::printf("%10.0f %12.4f %10.4f %8.4f\n", w, m.concurrence, m.fidelity, m.purity);
  }
  config.window_ps.reset();
  const auto m = qdent::entanglement_metrics(qdent::monte_carlo_rho(p, config));
  std::printf("%10s %12.4f %10.4f %8.4f\n", "all", m.concurrence, m.fidelity, m.purity);
  return 0;
}
