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

#include <algorithm>
#include <cmath>

#include "qdent/errors.hpp"
#include "qdent/linalg.hpp"
#include "qdent/state.hpp"

namespace qdent {

struct EntanglementMetrics {
  double fidelity = 0.0;     // ⟨φ+|ρ|φ+⟩
  double purity = 0.0;       // Tr ρ²
  double concurrence = 0.0;  // Wootters
};

inline double fidelity_phi_plus(const Mat4& rho) {
  require_density_matrix(rho, "fidelity_phi_plus");
  // ⟨φ+|ρ|φ+⟩ = (ρ₀₀ + ρ₀₃ + ρ₃₀ + ρ₃₃)/2
  const double f = 0.5 * (rho(0, 0) + rho(0, 3) + rho(3, 0) + rho(3, 3)).real();
  return std::clamp(f, 0.0, 1.0);
}

inline double purity(const Mat4& rho) {
  require_density_matrix(rho, "purity");
  double p = 0.0;
  for (const auto& x : rho.data) p += std::norm(x);
  return std::clamp(p, 0.25, 1.0);
}

/// σy⊗σy ρ* σy⊗σy
inline Mat4 spin_flip(const Mat4& rho) {
  const Mat4 yy = tensor(pauli_y(), pauli_y());
  return yy * conj(rho) * yy;
}

/// Wootters concurrence. With ρ = XX†, the square roots λᵢ of the spectrum of
/// ρρ̃ are the singular values of M = Xᵀ(σy⊗σy)X. They are read off as the
/// positive eigenvalues of the Hermitian dilation [[0, M], [M†, 0]], which
/// avoids square-rooting rounding noise in near-zero eigenvalues of ρρ̃.
inline double concurrence(const Mat4& rho) {
  require_density_matrix(rho, "concurrence");
  const auto es = eig_hermitian(rho);
  Mat4 x;
  for (std::size_t c = 0; c < 4; ++c) {
    const double w = std::sqrt(std::max(es.values[c], 0.0));
    for (std::size_t r = 0; r < 4; ++r) x(r, c) = es.vectors(r, c) * w;
  }
  Mat4 xt;
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 4; ++c) xt(r, c) = x(c, r);
  const Mat4 m = xt * tensor(pauli_y(), pauli_y()) * x;
  Matrix<8> dilation;
  for (std::size_t r = 0; r < 4; ++r) {
    for (std::size_t c = 0; c < 4; ++c) {
      dilation(r, 4 + c) = m(r, c);
      dilation(4 + c, r) = std::conj(m(r, c));
    }
  }
  const auto sv = eig_hermitian(dilation);
  return std::clamp(sv.values[0] - sv.values[1] - sv.values[2] - sv.values[3], 0.0, 1.0);
}

/// 2|ad − bc| for amplitudes ordered HH, HV, VH, VV.
inline double concurrence_pure(const Ket4& psi) {
  const double n2 = std::real(inner(psi, psi));
  if (std::abs(n2 - 1.0) > 1e-10) throw NotNormalized("concurrence_pure: state norm² = " + std::to_string(n2));
  return std::min(1.0, 2.0 * std::abs(psi[0] * psi[3] - psi[1] * psi[2]));
}

inline EntanglementMetrics entanglement_metrics(const Mat4& rho) {
  return {fidelity_phi_plus(rho), purity(rho), concurrence(rho)};
}

}  // namespace qdent
