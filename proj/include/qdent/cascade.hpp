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

// Biexciton–exciton cascade model: bright-exciton Hamiltonian with
// fine-structure splitting S and a frozen Overhauser shift h_z, two-photon
// state evolution, emission-time averaging, Monte Carlo / Gauss–Hermite
// averaging over the Overhauser distribution, multi-pair mixing and the
// closed-form estimates.
//
// Units: energies µeV, times ps (T2* and derived quantities take ns, τ_S µs).

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "qdent/errors.hpp"
#include "qdent/linalg.hpp"
#include "qdent/quadrature.hpp"
#include "qdent/rng.hpp"
#include "qdent/state.hpp"

namespace qdent {

/// Model inputs for one quantum dot. Exactly one of `sigma_ueV` /
/// `t2_star_ns` is normally given, and either `k` or the g²/η_P triple.
struct PhysicalParams {
  double fss_ueV = 0.0;
  std::optional<double> sigma_ueV;
  std::optional<double> t2_star_ns;
  double t1_ps = 0.0;
  std::optional<double> k;
  std::optional<double> g2_xx;
  std::optional<double> g2_x;
  std::optional<double> eta_p;
  std::optional<double> t1_xx_ps;  // metadata only
  std::optional<double> tau_s_us;  // nuclear correlation time, metadata only
};

enum class QuadratureKind { monte_carlo, gauss_hermite };

struct SimConfig {
  std::size_t n_samples = 200000;
  std::uint64_t seed = 0;
  std::optional<double> window_ps;  // empty: average over all emission delays
  QuadratureKind quadrature = QuadratureKind::monte_carlo;
  int gh_order = 32;
};

struct NuclearSpecies {
  double fraction = 0.0;
  double hyperfine_ueV = 0.0;
  double spin = 0.0;
};

struct SpeciesParams {
  std::vector<NuclearSpecies> species;
  double n_nuclei = 0.0;
};

enum class CompositionVariant { as_printed, quadratic };

struct ExcitonEigensystem {
  Ket2 upper;
  Ket2 lower;
  double splitting = 0;  // Δ_E = λ₊ − λ₋, µeV
};

// ---------------------------------------------------------------- closed forms

inline double sigma_from_t2star(double t2_star_ns) {
  if (!(t2_star_ns > 0.0)) throw InvalidArgument("sigma_from_t2star: T2* must be > 0");
  return kHbar / (t2_star_ns * 1000.0);
}

inline double sigma_from_composition(const SpeciesParams& sp,
                                     CompositionVariant variant = CompositionVariant::quadratic) {
  if (sp.species.empty()) throw InvalidArgument("sigma_from_composition: no species");
  if (!(sp.n_nuclei > 0.0)) throw InvalidArgument("sigma_from_composition: N must be > 0");
  double total = 0.0, acc = 0.0;
  for (const auto& s : sp.species) {
    if (s.fraction < 0.0 || s.fraction > 1.0) throw InvalidArgument("sigma_from_composition: fraction outside [0,1]");
    if (!(s.hyperfine_ueV > 0.0)) throw InvalidArgument("sigma_from_composition: hyperfine constant must be > 0");
    const double twice = 2.0 * s.spin;
    if (!(s.spin > 0.0) || std::abs(twice - std::round(twice)) > 1e-12) {
      throw InvalidArgument("sigma_from_composition: nuclear spin must be a positive multiple of 1/2");
    }
    total += s.fraction;
    const double a = variant == CompositionVariant::quadratic ? s.hyperfine_ueV * s.hyperfine_ueV : s.hyperfine_ueV;
    acc += s.fraction * a * s.spin * (s.spin + 1.0);
  }
  if (std::abs(total - 1.0) > 1e-9) throw InvalidArgument("sigma_from_composition: fractions do not sum to 1");
  return std::sqrt(acc / sp.n_nuclei);
}

/// Single-pair fraction from the XX and X autocorrelations and the
/// excitation inversion efficiency.
inline double k_from_g2(double g2_xx, double g2_x, double eta_p) {
  if (g2_xx < 0.0 || g2_xx > 1.0 || g2_x < 0.0 || g2_x > 1.0) {
    throw InvalidArgument("k_from_g2: g2 values must lie in [0, 1]");
  }
  if (!(eta_p > 0.0) || eta_p > 1.0) throw InvalidArgument("k_from_g2: eta_p must lie in (0, 1]");
  return 1.0 - 0.5 * (g2_xx + g2_x) * eta_p;
}

/// ¼(1 + k + 2k / (1 + 4T₁²(S² + σ²)/ħ²)), evaluated as written.
inline double analytic_fidelity(double fss_ueV, double sigma_ueV, double t1_ps, double k) {
  if (fss_ueV < 0.0 || sigma_ueV < 0.0 || t1_ps < 0.0) throw InvalidArgument("analytic_fidelity: negative input");
  if (!(k > 0.0) || k > 1.0) throw InvalidArgument("analytic_fidelity: k must lie in (0, 1]");
  const double x = 4.0 * t1_ps * t1_ps * (fss_ueV * fss_ueV + sigma_ueV * sigma_ueV) / (kHbar * kHbar);
  return 0.25 * (1.0 + k + 2.0 * k / (1.0 + x));
}

/// 1 − exp(−(T₁/T₂*)²)
inline double coherence_loss(double t1_ps, double t2_star_ns) {
  if (t1_ps < 0.0 || !(t2_star_ns > 0.0)) throw InvalidArgument("coherence_loss: times must be positive");
  const double r = t1_ps / (t2_star_ns * 1000.0);
  return -std::expm1(-r * r);
}

// ---------------------------------------------------------------- parameters

inline double resolved_sigma(const PhysicalParams& p) {
  if (p.sigma_ueV) return *p.sigma_ueV;
  if (p.t2_star_ns) return sigma_from_t2star(*p.t2_star_ns);
  throw InvalidArgument("params: one of sigma or t2_star is required");
}

inline double resolved_k(const PhysicalParams& p) {
  if (p.k) return *p.k;
  if (p.g2_xx && p.g2_x && p.eta_p) return k_from_g2(*p.g2_xx, *p.g2_x, *p.eta_p);
  throw InvalidArgument("params: k or all of g2_xx, g2_x, eta_p are required");
}

inline void validate(const PhysicalParams& p) {
  if (!std::isfinite(p.fss_ueV) || p.fss_ueV < 0.0) throw InvalidArgument("params: fss must be >= 0");
  if (!std::isfinite(p.t1_ps) || !(p.t1_ps > 0.0)) throw InvalidArgument("params: t1 must be > 0");
  if (p.sigma_ueV && (!std::isfinite(*p.sigma_ueV) || *p.sigma_ueV < 0.0)) {
    throw InvalidArgument("params: sigma must be >= 0");
  }
  if (p.t2_star_ns && !(*p.t2_star_ns > 0.0)) throw InvalidArgument("params: t2_star must be > 0");
  if (p.sigma_ueV && p.t2_star_ns && std::abs(*p.sigma_ueV - sigma_from_t2star(*p.t2_star_ns)) > 1e-6) {
    throw InvalidArgument("params: sigma and t2_star disagree (sigma = hbar / T2*)");
  }
  if (p.k && (!(*p.k > 0.0) || *p.k > 1.0)) throw InvalidArgument("params: k must lie in (0, 1]");
  const int n_g2 = int(p.g2_xx.has_value()) + int(p.g2_x.has_value()) + int(p.eta_p.has_value());
  if (n_g2 != 0 && n_g2 != 3) throw InvalidArgument("params: g2_xx, g2_x and eta_p must be given together");
  if (p.g2_xx && (*p.g2_xx < 0.0 || *p.g2_xx >= 1.0)) throw InvalidArgument("params: g2_xx must lie in [0, 1)");
  if (p.g2_x && (*p.g2_x < 0.0 || *p.g2_x >= 1.0)) throw InvalidArgument("params: g2_x must lie in [0, 1)");
  if (p.eta_p && (!(*p.eta_p > 0.0) || *p.eta_p > 1.0)) throw InvalidArgument("params: eta_p must lie in (0, 1]");
  if (p.t1_xx_ps && !(*p.t1_xx_ps > 0.0)) throw InvalidArgument("params: t1_xx must be > 0");
  if (p.tau_s_us && !(*p.tau_s_us > 0.0)) throw InvalidArgument("params: tau_s must be > 0");
  resolved_sigma(p);
  const double k = resolved_k(p);
  if (!(k > 0.0) || k > 1.0) throw InvalidArgument("params: derived k outside (0, 1]");
}

inline void validate(const SimConfig& c) {
  if (c.n_samples < 1) throw InvalidArgument("config: n_samples must be >= 1");
  if (c.window_ps && !(*c.window_ps > 0.0)) throw InvalidArgument("config: window must be > 0");
  if (c.quadrature == QuadratureKind::gauss_hermite && (c.gh_order < 3 || c.gh_order > 64)) {
    throw InvalidArgument("config: gauss_hermite order must lie in [3, 64]");
  }
}

/// Non-fatal remarks about the model's validity for these parameters.
inline std::vector<std::string> model_warnings(const PhysicalParams& p) {
  std::vector<std::string> out;
  if (p.tau_s_us && *p.tau_s_us * 1e6 < 100.0 * p.t1_ps) {
    out.push_back("tau_s is less than 100 T1; the frozen Overhauser field approximation may not hold");
  }
  return out;
}

// ---------------------------------------------------------------- dynamics

/// Bright-exciton Hamiltonian in the X_H / X_V basis, µeV.
inline Mat2 build_hamiltonian(double fss_ueV, double hz_ueV) {
  if (fss_ueV < 0.0) throw InvalidArgument("build_hamiltonian: fss must be >= 0");
  Mat2 h;
  h(0, 0) = 0.5 * fss_ueV;
  h(1, 1) = -0.5 * fss_ueV;
  h(0, 1) = Complex{0.0, hz_ueV};
  h(1, 0) = Complex{0.0, -hz_ueV};
  return h;
}

inline ExcitonEigensystem exciton_eigensystem(const Mat2& h) {
  const auto es = eig_hermitian(h);
  return {es.vectors.column(0), es.vectors.column(1), es.values[0] - es.values[1]};
}

/// (|r*⟩⊗|r⟩ + e^{−iΔt/ħ}|p*⟩⊗|p⟩)/√2; XX photon is the left factor.
/// `reference` and `precessing` are the two exciton eigenstates. The phase
/// accrues on the higher-energy one, so pass (lower, upper) to reproduce the
/// unitary evolution of the exciton.
inline Ket4 two_photon_state(const Ket2& reference, const Ket2& precessing, double delta_e_ueV, double t_ps) {
  const Complex phase = std::exp(Complex{0.0, -delta_e_ueV * t_ps / kHbar});
  const Ket4 a = tensor(conj(reference), reference);
  const Ket4 b = tensor(conj(precessing), precessing);
  return Complex{std::numbers::sqrt2 / 2} * (a + phase * b);
}

/// Two-photon state at X emission delay t for a frozen h_z.
inline Ket4 cascade_state(double fss_ueV, double hz_ueV, double t_ps) {
  const auto ex = exciton_eigensystem(build_hamiltonian(fss_ueV, hz_ueV));
  return two_photon_state(ex.lower, ex.upper, ex.splitting, t_ps);
}

/// ρ(t) = (I⊗U) ρ₀ (I⊗U)†, U = exp(−iHt/ħ).
inline Mat4 propagate_rho(const Mat4& rho0, const Mat2& h, double t_ps) {
  require_density_matrix(rho0, "propagate_rho");
  const Mat4 u = tensor(Mat2::identity(), unitary_exp(h, t_ps));
  return u * rho0 * adjoint(u);
}

namespace detail {
// (1 − e^{−z})/z, analytic at 0
inline Complex phi1(Complex z) {
  if (std::abs(z) < 1e-3) return 1.0 - z / 2.0 + z * z / 6.0 - z * z * z / 24.0 + z * z * z * z / 120.0;
  return (1.0 - std::exp(-z)) / z;
}
}  // namespace detail

/// ⟨e^{−iΔt/ħ}⟩ for t distributed as e^{−t/T₁}, optionally truncated to
/// [0, window] and renormalised.
inline Complex mean_phase_factor(double delta_e_ueV, double t1_ps, std::optional<double> window_ps) {
  if (!(t1_ps > 0.0)) throw InvalidArgument("mean_phase_factor: t1 must be > 0");
  const double omega = delta_e_ueV / kHbar;
  if (!window_ps) return 1.0 / Complex{1.0, omega * t1_ps};
  const double tau = *window_ps;
  if (!(tau > 0.0)) throw InvalidArgument("mean_phase_factor: window must be > 0");
  const Complex z = Complex{1.0 / t1_ps, omega} * tau;
  return detail::phi1(z) / detail::phi1(Complex{tau / t1_ps, 0.0});
}

/// Two-photon density matrix for one frozen h_z, averaged over the X
/// emission delay. The average is done in the exciton eigenbasis where only
/// the coherence between the two |e*⟩⊗|e⟩ components carries a phase.
inline Mat4 time_averaged_rho(double fss_ueV, double hz_ueV, double t1_ps, std::optional<double> window_ps) {
  const auto ex = exciton_eigensystem(build_hamiltonian(fss_ueV, hz_ueV));
  const Complex c = mean_phase_factor(ex.splitting, t1_ps, window_ps);
  const Ket4 a = tensor(conj(ex.lower), ex.lower);
  const Ket4 b = tensor(conj(ex.upper), ex.upper);
  Mat4 rho;
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      const Complex aa = a[i] * std::conj(a[j]);
      const Complex bb = b[i] * std::conj(b[j]);
      const Complex ba = b[i] * std::conj(a[j]);
      const Complex ab = a[i] * std::conj(b[j]);
      rho(i, j) = 0.5 * (aa + bb + c * ba + std::conj(c) * ab);
    }
  }
  return rho;
}

/// k·ρ + (1 − k)·I/4
inline Mat4 apply_multipair_mixing(const Mat4& rho, double k) {
  if (!(k > 0.0) || k > 1.0) throw InvalidArgument("apply_multipair_mixing: k must lie in (0, 1]");
  require_density_matrix(rho, "apply_multipair_mixing");
  Mat4 out = rho * Complex{k};
  for (std::size_t i = 0; i < 4; ++i) out(i, i) += 0.25 * (1.0 - k);
  return out;
}

// ---------------------------------------------------------------- averaging

struct MonteCarloEstimate {
  Mat4 rho;                    // averaged, before multi-pair mixing
  double fidelity = 0.0;       // ⟨φ+|ρ|φ+⟩ of `rho`
  double fidelity_stderr = 0;  // standard error of `fidelity`; 0 for quadrature
  std::size_t n_evaluations = 0;
};

namespace detail {

inline double phi_plus_overlap(const Mat4& rho) {
  return 0.5 * (rho(0, 0) + rho(0, 3) + rho(3, 0) + rho(3, 3)).real();
}

struct PartialSum {
  Mat4 rho;
  double f_sum = 0.0;
  double f_sq_sum = 0.0;
};

inline PartialSum accumulate_samples(double fss, double sigma, double t1, std::optional<double> window,
                                     std::uint64_t seed, std::size_t begin, std::size_t end) {
  PartialSum acc;
  for (std::size_t i = begin; i < end; ++i) {
    const double hz = sigma * rng::standard_normal(seed, i);
    const Mat4 r = time_averaged_rho(fss, hz, t1, window);
    acc.rho += r;
    const double f = phi_plus_overlap(r);
    acc.f_sum += f;
    acc.f_sq_sum += f * f;
  }
  return acc;
}

inline MonteCarloEstimate finish(const PartialSum& acc, std::size_t n) {
  MonteCarloEstimate est;
  est.n_evaluations = n;
  const double inv = 1.0 / static_cast<double>(n);
  est.rho = acc.rho * Complex{inv};
  est.fidelity = acc.f_sum * inv;
  if (n > 1) {
    const double var = std::max(0.0, (acc.f_sq_sum - acc.f_sum * acc.f_sum * inv) / static_cast<double>(n - 1));
    est.fidelity_stderr = std::sqrt(var * inv);
  }
  return est;
}

}  // namespace detail

/// Frozen-spin average of the emission-time averaged state over
/// h_z ~ N(0, σ²). Monte Carlo draws are derived per sample index from the
/// seed; Gauss–Hermite mode evaluates the same Gaussian expectation with a
/// fixed-order rule instead.
inline MonteCarloEstimate monte_carlo_estimate(const PhysicalParams& params, const SimConfig& config) {
  validate(params);
  validate(config);
  const double sigma = resolved_sigma(params);
  const double fss = params.fss_ueV;
  const double t1 = params.t1_ps;

  if (sigma == 0.0) {
    MonteCarloEstimate est;
    est.rho = time_averaged_rho(fss, 0.0, t1, config.window_ps);
    est.fidelity = detail::phi_plus_overlap(est.rho);
    est.n_evaluations = 1;
    return est;
  }

  if (config.quadrature == QuadratureKind::gauss_hermite) {
    const auto rule = gauss_hermite_rule(config.gh_order);
    MonteCarloEstimate est;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      est.rho += time_averaged_rho(fss, sigma * rule.nodes[i], t1, config.window_ps) * Complex{rule.weights[i]};
    }
    est.fidelity = detail::phi_plus_overlap(est.rho);
    est.n_evaluations = rule.nodes.size();
    return est;
  }

  const auto acc = detail::accumulate_samples(fss, sigma, t1, config.window_ps, config.seed, 0, config.n_samples);
  return detail::finish(acc, config.n_samples);
}

inline Mat4 monte_carlo_rho(const PhysicalParams& params, const SimConfig& config) {
  return monte_carlo_estimate(params, config).rho;
}

/// Same estimate as monte_carlo_estimate, with the sample range split into
/// contiguous chunks evaluated on `n_threads` workers. Partial sums are
/// combined in chunk order, so the result depends on `n_threads` only at
/// rounding level.
inline MonteCarloEstimate monte_carlo_estimate_parallel(const PhysicalParams& params, const SimConfig& config,
                                                        unsigned n_threads) {
  if (n_threads <= 1 || config.quadrature != QuadratureKind::monte_carlo) {
    return monte_carlo_estimate(params, config);
  }
  validate(params);
  validate(config);
  const double sigma = resolved_sigma(params);
  if (sigma == 0.0) return monte_carlo_estimate(params, config);

  const std::size_t n = config.n_samples;
  const std::size_t chunks = std::min<std::size_t>(n_threads, n);
  std::vector<detail::PartialSum> partial(chunks);
  std::vector<std::thread> workers;
  workers.reserve(chunks);
  for (std::size_t c = 0; c < chunks; ++c) {
    const std::size_t begin = n * c / chunks;
    const std::size_t end = n * (c + 1) / chunks;
    workers.emplace_back([&, c, begin, end] {
      partial[c] = detail::accumulate_samples(params.fss_ueV, sigma, params.t1_ps, config.window_ps, config.seed,
                                              begin, end);
    });
  }
  for (auto& w : workers) w.join();

  detail::PartialSum total;
  for (const auto& p : partial) {
    total.rho += p.rho;
    total.f_sum += p.f_sum;
    total.f_sq_sum += p.f_sq_sum;
  }
  return detail::finish(total, n);
}

/// Averaged state with the multi-pair mixing channel applied.
inline Mat4 model_state(const PhysicalParams& params, const SimConfig& config) {
  return apply_multipair_mixing(monte_carlo_rho(params, config), resolved_k(params));
}

}  // namespace qdent
