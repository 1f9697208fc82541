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

// Polarization states, the |φ+⟩ Bell state and density-matrix checks.
// Two-photon basis order is HH, HV, VH, VV with the XX photon on the left.

#include <cmath>
#include <numbers>
#include <string>

#include "qdent/errors.hpp"
#include "qdent/linalg.hpp"

namespace qdent {

namespace pol {
inline Ket2 H() { return Ket2{{1.0, 0.0}}; }
inline Ket2 V() { return Ket2{{0.0, 1.0}}; }
inline Ket2 D() { return Ket2{{std::numbers::sqrt2 / 2, std::numbers::sqrt2 / 2}}; }
inline Ket2 A() { return Ket2{{std::numbers::sqrt2 / 2, -std::numbers::sqrt2 / 2}}; }
inline Ket2 R() { return Ket2{{std::numbers::sqrt2 / 2, Complex{0.0, std::numbers::sqrt2 / 2}}}; }
inline Ket2 L() { return Ket2{{std::numbers::sqrt2 / 2, Complex{0.0, -std::numbers::sqrt2 / 2}}}; }
}  // namespace pol

inline Ket4 phi_plus() {
  const double r = std::numbers::sqrt2 / 2;
  return Ket4{{r, 0.0, 0.0, r}};
}

inline Mat4 phi_plus_density() { return projector(phi_plus()); }

inline Mat4 maximally_mixed() { return Mat4::identity() * Complex{0.25}; }

/// Throws InvalidDensityMatrix unless `rho` is Hermitian, unit-trace and
/// positive semidefinite, each within 1e−10.
inline void require_density_matrix(const Mat4& rho, const char* where) {
  constexpr double tol = 1e-10;
  for (const auto& x : rho.data) {
    if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) {
      throw InvalidDensityMatrix(std::string(where) + ": non-finite entry");
    }
  }
  if (hermiticity_error(rho) > tol) throw InvalidDensityMatrix(std::string(where) + ": not Hermitian");
  const Complex tr = trace(rho);
  if (std::abs(tr - 1.0) > tol) {
    throw InvalidDensityMatrix(std::string(where) + ": trace " + std::to_string(tr.real()) + " != 1");
  }
  const auto es = eig_hermitian(rho);
  if (es.values[3] < -tol) {
    throw InvalidDensityMatrix(std::string(where) + ": negative eigenvalue " + std::to_string(es.values[3]));
  }
}

inline bool is_density_matrix(const Mat4& rho) {
  try {
    require_density_matrix(rho, "is_density_matrix");
    return true;
  } catch (const InvalidDensityMatrix&) {
    return false;
  }
}

/// ½‖a − b‖₁
inline double trace_distance(const Mat4& a, const Mat4& b) {
  const auto es = eig_hermitian(a - b);
  double s = 0.0;
  for (double l : es.values) s += std::abs(l);
  return 0.5 * s;
}

}  // namespace qdent
