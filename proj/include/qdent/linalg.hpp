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

// Fixed-size complex linear algebra for qubit (2) and two-qubit (4) Hilbert
// spaces. Everything here is a value type; no heap allocation.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <string>

#include "qdent/errors.hpp"

namespace qdent {

using Complex = std::complex<double>;

/// Reduced Planck constant in µeV·ps. All energies are µeV, all times ps.
inline constexpr double kHbar = 658.2119569;

inline constexpr Complex kI{0.0, 1.0};

template <std::size_t N>
struct Ket {
  std::array<Complex, N> v{};

  Complex& operator[](std::size_t i) { return v[i]; }
  const Complex& operator[](std::size_t i) const { return v[i]; }
  static constexpr std::size_t size() { return N; }

  static Ket basis(std::size_t i) {
    Ket k;
    k.v[i] = 1.0;
    return k;
  }
};

/// Row-major N×N complex matrix.
template <std::size_t N>
struct Matrix {
  std::array<Complex, N * N> data{};

  Complex& operator()(std::size_t r, std::size_t c) { return data[r * N + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const { return data[r * N + c]; }
  static constexpr std::size_t dim() { return N; }

  static Matrix zero() { return Matrix{}; }
  static Matrix identity() {
    Matrix m;
    for (std::size_t i = 0; i < N; ++i) m(i, i) = 1.0;
    return m;
  }
  static Matrix diagonal(const std::array<double, N>& d) {
    Matrix m;
    for (std::size_t i = 0; i < N; ++i) m(i, i) = d[i];
    return m;
  }

  Matrix& operator+=(const Matrix& o) {
    for (std::size_t i = 0; i < N * N; ++i) data[i] += o.data[i];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    for (std::size_t i = 0; i < N * N; ++i) data[i] -= o.data[i];
    return *this;
  }
  Matrix& operator*=(Complex s) {
    for (auto& x : data) x *= s;
    return *this;
  }

  Ket<N> column(std::size_t c) const {
    Ket<N> k;
    for (std::size_t r = 0; r < N; ++r) k[r] = (*this)(r, c);
    return k;
  }
  void set_column(std::size_t c, const Ket<N>& k) {
    for (std::size_t r = 0; r < N; ++r) (*this)(r, c) = k[r];
  }
};

using Mat2 = Matrix<2>;
using Mat4 = Matrix<4>;
using Ket2 = Ket<2>;
using Ket4 = Ket<4>;

template <std::size_t N>
Matrix<N> operator+(Matrix<N> a, const Matrix<N>& b) {
  return a += b;
}
template <std::size_t N>
Matrix<N> operator-(Matrix<N> a, const Matrix<N>& b) {
  return a -= b;
}
template <std::size_t N>
Matrix<N> operator*(Matrix<N> a, Complex s) {
  return a *= s;
}
template <std::size_t N>
Matrix<N> operator*(Complex s, Matrix<N> a) {
  return a *= s;
}

template <std::size_t N>
Matrix<N> operator*(const Matrix<N>& a, const Matrix<N>& b) {
  Matrix<N> out;
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t k = 0; k < N; ++k) {
      const Complex aik = a(i, k);
      if (aik == Complex{}) continue;
      for (std::size_t j = 0; j < N; ++j) out(i, j) += aik * b(k, j);
    }
  }
  return out;
}

template <std::size_t N>
Ket<N> operator*(const Matrix<N>& a, const Ket<N>& x) {
  Ket<N> out;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) out[i] += a(i, j) * x[j];
  return out;
}

template <std::size_t N>
Ket<N> operator+(Ket<N> a, const Ket<N>& b) {
  for (std::size_t i = 0; i < N; ++i) a[i] += b[i];
  return a;
}
template <std::size_t N>
Ket<N> operator-(Ket<N> a, const Ket<N>& b) {
  for (std::size_t i = 0; i < N; ++i) a[i] -= b[i];
  return a;
}
template <std::size_t N>
Ket<N> operator*(Complex s, Ket<N> a) {
  for (auto& x : a.v) x *= s;
  return a;
}

template <std::size_t N>
Matrix<N> adjoint(const Matrix<N>& m) {
  Matrix<N> out;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) out(i, j) = std::conj(m(j, i));
  return out;
}

template <std::size_t N>
Matrix<N> conj(const Matrix<N>& m) {
  Matrix<N> out;
  for (std::size_t i = 0; i < N * N; ++i) out.data[i] = std::conj(m.data[i]);
  return out;
}

template <std::size_t N>
Ket<N> conj(const Ket<N>& k) {
  Ket<N> out;
  for (std::size_t i = 0; i < N; ++i) out[i] = std::conj(k[i]);
  return out;
}

template <std::size_t N>
Complex trace(const Matrix<N>& m) {
  Complex t;
  for (std::size_t i = 0; i < N; ++i) t += m(i, i);
  return t;
}

template <std::size_t N>
double max_abs(const Matrix<N>& m) {
  double r = 0.0;
  for (const auto& x : m.data) r = std::max(r, std::abs(x));
  return r;
}

template <std::size_t N>
double max_abs_diff(const Matrix<N>& a, const Matrix<N>& b) {
  return max_abs(a - b);
}

/// ⟨a|b⟩, antilinear in the first argument.
template <std::size_t N>
Complex inner(const Ket<N>& a, const Ket<N>& b) {
  Complex s;
  for (std::size_t i = 0; i < N; ++i) s += std::conj(a[i]) * b[i];
  return s;
}

template <std::size_t N>
double norm(const Ket<N>& a) {
  return std::sqrt(std::real(inner(a, a)));
}

template <std::size_t N>
Ket<N> normalized(const Ket<N>& a) {
  const double n = norm(a);
  if (!(n > 0.0)) throw NotNormalized("cannot normalize a zero vector");
  return Complex{1.0 / n} * a;
}

/// |a⟩⟨b|
template <std::size_t N>
Matrix<N> outer(const Ket<N>& a, const Ket<N>& b) {
  Matrix<N> out;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) out(i, j) = a[i] * std::conj(b[j]);
  return out;
}

template <std::size_t N>
Matrix<N> projector(const Ket<N>& a) {
  return outer(a, a);
}

/// ⟨a|M|a⟩
template <std::size_t N>
Complex expectation(const Ket<N>& a, const Matrix<N>& m) {
  return inner(a, m * a);
}

/// Kronecker product, left factor is the slow index.
template <std::size_t A, std::size_t B>
Matrix<A * B> tensor(const Matrix<A>& a, const Matrix<B>& b) {
  Matrix<A * B> out;
  for (std::size_t i = 0; i < A; ++i)
    for (std::size_t j = 0; j < A; ++j)
      for (std::size_t k = 0; k < B; ++k)
        for (std::size_t l = 0; l < B; ++l) out(i * B + k, j * B + l) = a(i, j) * b(k, l);
  return out;
}

template <std::size_t A, std::size_t B>
Ket<A * B> tensor(const Ket<A>& a, const Ket<B>& b) {
  Ket<A * B> out;
  for (std::size_t i = 0; i < A; ++i)
    for (std::size_t k = 0; k < B; ++k) out[i * B + k] = a[i] * b[k];
  return out;
}

inline Mat2 pauli_x() {
  Mat2 m;
  m(0, 1) = 1.0;
  m(1, 0) = 1.0;
  return m;
}
inline Mat2 pauli_y() {
  Mat2 m;
  m(0, 1) = -kI;
  m(1, 0) = kI;
  return m;
}
inline Mat2 pauli_z() { return Mat2::diagonal({1.0, -1.0}); }

template <std::size_t N>
double hermiticity_error(const Matrix<N>& m) {
  double e = 0.0;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = i; j < N; ++j) e = std::max(e, std::abs(m(i, j) - std::conj(m(j, i))));
  return e;
}

template <std::size_t N>
bool is_hermitian(const Matrix<N>& m, double tol) {
  return hermiticity_error(m) <= tol * std::max(1.0, max_abs(m));
}

template <std::size_t N>
double unitarity_error(const Matrix<N>& u) {
  return max_abs(adjoint(u) * u - Matrix<N>::identity());
}

template <std::size_t N>
struct EigenSystem {
  std::array<double, N> values{};  // descending
  Matrix<N> vectors;               // orthonormal columns, vectors.column(i) ↔ values[i]
};

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations. Eigenvalues are returned in descending order; each eigenvector
/// has its first component of modulus > 1e-12 made real and positive.
template <std::size_t N>
EigenSystem<N> eig_hermitian(const Matrix<N>& m, double herm_tol = 1e-10) {
  if (!is_hermitian(m, herm_tol)) {
    throw NotHermitian("eig_hermitian: input deviates from its adjoint by " +
                       std::to_string(hermiticity_error(m)));
  }
  Matrix<N> a = (m + adjoint(m)) * Complex{0.5};
  Matrix<N> v = Matrix<N>::identity();

  double frob = 0.0;
  for (const auto& x : a.data) frob += std::norm(x);
  frob = std::sqrt(frob);

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < N; ++p)
      for (std::size_t q = p + 1; q < N; ++q) off += std::norm(a(p, q));
    if (std::sqrt(off) <= 1e-17 * frob || off == 0.0) break;

    for (std::size_t p = 0; p < N; ++p) {
      for (std::size_t q = p + 1; q < N; ++q) {
        const Complex apq = a(p, q);
        const double mag = std::abs(apq);
        if (mag == 0.0) continue;
        const Complex phase_c = std::conj(apq / mag);
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double zeta = (aqq - app) / (2.0 * mag);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::hypot(1.0, zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // Rotation restricted to the (p, q) plane.
        const Complex upp = c, upq = s, uqp = -s * phase_c, uqq = c * phase_c;

        for (std::size_t k = 0; k < N; ++k) {
          const Complex akp = a(k, p), akq = a(k, q);
          a(k, p) = akp * upp + akq * uqp;
          a(k, q) = akp * upq + akq * uqq;
        }
        for (std::size_t k = 0; k < N; ++k) {
          const Complex apk = a(p, k), aqk = a(q, k);
          a(p, k) = std::conj(upp) * apk + std::conj(uqp) * aqk;
          a(q, k) = std::conj(upq) * apk + std::conj(uqq) * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        for (std::size_t k = 0; k < N; ++k) {
          const Complex vkp = v(k, p), vkq = v(k, q);
          v(k, p) = vkp * upp + vkq * uqp;
          v(k, q) = vkp * upq + vkq * uqq;
        }
      }
    }
  }

  std::array<std::size_t, N> order;
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a(x, x).real() > a(y, y).real(); });

  EigenSystem<N> out;
  for (std::size_t i = 0; i < N; ++i) {
    out.values[i] = a(order[i], order[i]).real();
    Ket<N> col = v.column(order[i]);
    for (std::size_t r = 0; r < N; ++r) {
      const double mod = std::abs(col[r]);
      if (mod > 1e-12) {
        col = (std::conj(col[r]) / mod) * col;
        col[r] = mod;
        break;
      }
    }
    out.vectors.set_column(i, col);
  }
  return out;
}

/// exp(−i h t / ħ) for a Hermitian 2×2 generator, via h = a₀·I + a⃗·σ⃗.
inline Mat2 unitary_exp(const Mat2& h, double t, double hbar = kHbar) {
  if (!is_hermitian(h, 1e-10)) throw NotHermitian("unitary_exp: generator is not Hermitian");
  const double a0 = 0.5 * (h(0, 0).real() + h(1, 1).real());
  const double az = 0.5 * (h(0, 0).real() - h(1, 1).real());
  const Complex h01 = 0.5 * (h(0, 1) + std::conj(h(1, 0)));
  const double ax = h01.real();
  const double ay = -h01.imag();
  const double a = std::sqrt(ax * ax + ay * ay + az * az);
  const double theta = t / hbar;
  const double phi = a * theta;
  // sin(aθ)/a, finite as a → 0
  const double sinc = (a == 0.0) ? theta : std::sin(phi) / a;
  const double cs = std::cos(phi);
  const Complex global = std::exp(Complex{0.0, -a0 * theta});

  Mat2 u;
  u(0, 0) = global * Complex{cs, -sinc * az};
  u(1, 1) = global * Complex{cs, sinc * az};
  // −i·sinc·(ax σx + ay σy), off-diagonals
  u(0, 1) = global * (-kI * sinc * Complex{ax, -ay});
  u(1, 0) = global * (-kI * sinc * Complex{ax, ay});
  return u;
}

/// Principal square root of a positive semidefinite Hermitian matrix.
/// Eigenvalues in [−1e−10, 0) are treated as rounding noise and clamped.
template <std::size_t N>
Matrix<N> sqrt_psd(const Matrix<N>& m) {
  const auto es = eig_hermitian(m);
  Matrix<N> out;
  for (std::size_t i = 0; i < N; ++i) {
    const double lam = es.values[i];
    if (lam < -1e-10) throw NotPSD("sqrt_psd: eigenvalue " + std::to_string(lam) + " < 0");
    const double r = std::sqrt(std::max(lam, 0.0));
    if (r == 0.0) continue;
    const Ket<N> col = es.vectors.column(i);
    out += outer(col, col) * Complex{r};
  }
  return out;
}

}  // namespace qdent
