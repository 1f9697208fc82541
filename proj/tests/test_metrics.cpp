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
#include <numbers>
#include <random>

#include "qdent/metrics.hpp"
#include "qdent/state.hpp"
#include "test_support.hpp"

namespace qdent {
namespace {

// Concurrence from the roots of the characteristic polynomial of ρρ̃.
double concurrence_oracle(const Mat4& rho) {
  const auto ev = testing::eigenvalues_by_polynomial(rho * spin_flip(rho));
  std::array<double, 4> lam{};
  for (std::size_t i = 0; i < 4; ++i) lam[i] = std::sqrt(std::max(ev[i].real(), 0.0));
  std::sort(lam.begin(), lam.end(), std::greater<>());
  return std::max(0.0, lam[0] - lam[1] - lam[2] - lam[3]);
}

Mat4 werner(double k);

Mat4 werner(double k) { return phi_plus_density() * Complex{k} + maximally_mixed() * Complex{1.0 - k}; }

TEST(Metrics, PhiPlus) {
  const auto m = entanglement_metrics(phi_plus_density());
  EXPECT_NEAR(m.fidelity, 1.0, 1e-15);
  EXPECT_NEAR(m.purity, 1.0, 1e-15);
  EXPECT_NEAR(m.concurrence, 1.0, 1e-14);
}

TEST(Metrics, MaximallyMixed) {
  const auto m = entanglement_metrics(maximally_mixed());
  EXPECT_NEAR(m.fidelity, 0.25, 1e-15);
  EXPECT_NEAR(m.purity, 0.25, 1e-15);
  EXPECT_NEAR(m.concurrence, 0.0, 1e-15);
}

TEST(Metrics, ProductStateHasNoConcurrence) {
  const Mat4 rho = projector(tensor(pol::H(), pol::D()));
  EXPECT_NEAR(concurrence(rho), 0.0, 1e-14);
  EXPECT_NEAR(fidelity_phi_plus(rho), 0.25, 1e-15);
}

TEST(Metrics, OtherBellStatesAreOrthogonalButMaximallyEntangled) {
  const double h = std::numbers::sqrt2 / 2;
  for (const Ket4& psi : {Ket4{{h, 0.0, 0.0, -h}}, Ket4{{0.0, h, h, 0.0}}, Ket4{{0.0, h, -h, 0.0}}}) {
    const Mat4 rho = projector(psi);
    EXPECT_NEAR(fidelity_phi_plus(rho), 0.0, 1e-15);
    EXPECT_NEAR(concurrence(rho), 1.0, 1e-14);
    EXPECT_NEAR(concurrence_pure(psi), 1.0, 1e-15);
  }
}

TEST(Metrics, WernerClosedForms) {
  for (double k = 0.0; k <= 1.0; k += 0.05) {
    const auto m = entanglement_metrics(werner(k));
    EXPECT_NEAR(m.fidelity, (1.0 + 3.0 * k) / 4.0, 1e-14);
    EXPECT_NEAR(m.purity, (1.0 + 3.0 * k * k) / 4.0, 1e-14);
    EXPECT_NEAR(m.concurrence, std::max(0.0, (3.0 * k - 1.0) / 2.0), 1e-13);
  }
}

TEST(Metrics, WernerSlopes) {
  // near k = 1, concurrence and purity both drop twice as fast as fidelity
  const double dk = 1e-3;
  const auto a = entanglement_metrics(werner(1.0)), b = entanglement_metrics(werner(1.0 - dk));
  const double df = a.fidelity - b.fidelity;
  EXPECT_NEAR((a.concurrence - b.concurrence) / df, 2.0, 1e-6);
  EXPECT_NEAR((a.purity - b.purity) / df, 2.0 * (2.0 - dk) / 2.0, 1e-2);
}

TEST(Concurrence, PureStatesMatchAmplitudeFormula) {
  std::mt19937_64 rng(31);
  for (int n = 0; n < 1000; ++n) {
    const Ket4 psi = testing::random_pure<4>(rng);
    EXPECT_NEAR(concurrence(projector(psi)), concurrence_pure(psi), 1e-10);
  }
}

TEST(Concurrence, MixedStatesMatchPolynomialOracle) {
  // Ginibre states: well-separated spectrum of ρρ̃, where root finding on the
  // characteristic polynomial is reliable
  std::mt19937_64 rng(32);
  for (int n = 0; n < 300; ++n) {
    const Mat4 rho = testing::random_density(rng);
    EXPECT_NEAR(concurrence(rho), concurrence_oracle(rho), 1e-8);
  }
}

TEST(Concurrence, RotatedXStatesMatchClosedForm) {
  // X-states: C = 2 max(0, |ρ₀₃| − √(ρ₁₁ρ₂₂), |ρ₁₂| − √(ρ₀₀ρ₃₃)); local
  // unitaries then scramble them into dense matrices with the same C
  std::mt19937_64 rng(35);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int n = 0; n < 500; ++n) {
    std::array<double, 4> p{};
    double tot = 0.0;
    for (auto& v : p) tot += (v = std::pow(u(rng), n % 3 ? 1.0 : 6.0));
    for (auto& v : p) v /= tot;
    const Complex c03 = std::polar(u(rng) * std::sqrt(p[0] * p[3]), 6.3 * u(rng));
    const Complex c12 = std::polar(u(rng) * std::sqrt(p[1] * p[2]), 6.3 * u(rng));
    Mat4 x = Mat4::diagonal({p[0], p[1], p[2], p[3]});
    x(0, 3) = c03;
    x(3, 0) = std::conj(c03);
    x(1, 2) = c12;
    x(2, 1) = std::conj(c12);
    const double expect = 2.0 * std::max({0.0, std::abs(c03) - std::sqrt(p[1] * p[2]),
                                          std::abs(c12) - std::sqrt(p[0] * p[3])});
    const Mat4 l = tensor(testing::random_unitary2(rng), testing::random_unitary2(rng));
    // near-singular ρ: rounding in the rotated input alone moves C by ~1e-10
    EXPECT_NEAR(concurrence(l * x * adjoint(l)), expect, 1e-9);
  }
}

TEST(Concurrence, NearlyPureWernerStates) {
  for (double eps : {1e-3, 1e-6, 1e-9, 1e-12}) {
    EXPECT_NEAR(concurrence(werner(1.0 - eps)), 1.0 - 1.5 * eps, 1e-12) << eps;
  }
}

TEST(Concurrence, InvariantUnderLocalUnitaries) {
  std::mt19937_64 rng(33);
  for (int n = 0; n < 100; ++n) {
    const Mat4 rho = werner(0.8) * Complex{0.5} + testing::random_density(rng) * Complex{0.5};
    const Mat4 u = tensor(testing::random_unitary2(rng), testing::random_unitary2(rng));
    const Mat4 r2 = u * rho * adjoint(u);
    EXPECT_NEAR(concurrence(rho), concurrence(r2), 1e-12);
    EXPECT_NEAR(purity(rho), purity(r2), 1e-13);
  }
}

TEST(Concurrence, BoundedAndBelowFidelityBound) {
  // C >= 2f − 1 for any two-qubit state
  std::mt19937_64 rng(34);
  for (int n = 0; n < 300; ++n) {
    const Mat4 rho = testing::random_density(rng);
    const auto m = entanglement_metrics(rho);
    EXPECT_GE(m.concurrence, 0.0);
    EXPECT_LE(m.concurrence, 1.0);
    EXPECT_GE(m.concurrence + 1e-12, 2.0 * m.fidelity - 1.0);
    EXPECT_GE(m.purity, 0.25);
  }
}

TEST(ConcurrencePure, RejectsUnnormalized) {
  EXPECT_THROW(concurrence_pure(Ket4{{1.0, 0.0, 0.0, 1.0}}), NotNormalized);
}

TEST(Metrics, RejectInvalidInput) {
  EXPECT_THROW(fidelity_phi_plus(Mat4::identity()), InvalidDensityMatrix);
  EXPECT_THROW(purity(Mat4::diagonal({1.2, -0.2, 0.0, 0.0})), InvalidDensityMatrix);
  Mat4 nh = maximally_mixed();
  nh(0, 1) = 0.1;
  EXPECT_THROW(concurrence(nh), InvalidDensityMatrix);
  Mat4 nan = maximally_mixed();
  nan(2, 2) = std::nan("");
  EXPECT_THROW(entanglement_metrics(nan), InvalidDensityMatrix);
}

TEST(State, TraceDistance) {
  EXPECT_NEAR(trace_distance(phi_plus_density(), phi_plus_density()), 0.0, 1e-15);
  EXPECT_NEAR(trace_distance(phi_plus_density(), maximally_mixed()), 0.75, 1e-14);
  EXPECT_NEAR(trace_distance(projector(tensor(pol::H(), pol::H())), projector(tensor(pol::V(), pol::V()))), 1.0,
              1e-15);
}

TEST(State, PolarizationKetsOrthonormal) {
  EXPECT_NEAR(std::abs(inner(pol::H(), pol::V())), 0.0, 1e-16);
  EXPECT_NEAR(std::abs(inner(pol::D(), pol::A())), 0.0, 1e-16);
  EXPECT_NEAR(std::abs(inner(pol::R(), pol::L())), 0.0, 1e-16);
  EXPECT_NEAR(std::norm(inner(pol::H(), pol::R())), 0.5, 1e-15);
}

}  // namespace
}  // namespace qdent
