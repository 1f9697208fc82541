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

// Polarization-resolved coincidence measurements on the XX–X photon pair:
// forward simulation of counts, co/cross visibilities with the six-basis
// fidelity estimate, and maximum-likelihood reconstruction of the full
// two-photon density matrix from sixteen (or more) projective settings.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <deque>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qdent/errors.hpp"
#include "qdent/linalg.hpp"
#include "qdent/rng.hpp"
#include "qdent/state.hpp"

namespace qdent {

/// Analyzer states for the XX and X photons. With `both_ports` the setting
/// also registers the coincidences between the two orthogonal analyzer
/// outputs, i.e. the measurement operator is |ab⟩⟨ab| + |a⊥b⊥⟩⟨a⊥b⊥|.
struct BasisSetting {
  Ket2 projector_xx;
  Ket2 projector_x;
  std::string label;
  bool both_ports = false;
};

struct CountRecord {
  BasisSetting setting;
  std::uint64_t counts = 0;
  double acquisition_weight = 1.0;
};

struct ReconstructionResult {
  Mat4 rho;
  // Poisson log-likelihood relative to the saturated model (μᵢ = nᵢ), so 0
  // for a perfect fit. Intensity is profiled out.
  double log_likelihood = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> likelihood_trace;  // one entry per accepted iterate, starting at the initial point
};

enum class TomographyMode { six_basis, sixteen_basis };

struct MleOptions {
  int max_iterations = 100000;
  double tolerance = 1e-10;
};

/// Orthogonal complement of a qubit state, up to phase.
inline Ket2 orthogonal(const Ket2& k) { return Ket2{{-std::conj(k[1]), std::conj(k[0])}}; }

inline Mat4 measurement_operator(const BasisSetting& s) {
  Mat4 m = projector(tensor(s.projector_xx, s.projector_x));
  if (s.both_ports) m += projector(tensor(orthogonal(s.projector_xx), orthogonal(s.projector_x)));
  return m;
}

inline double setting_probability(const Mat4& rho, const BasisSetting& s) {
  double p = 0.0;
  const Ket4 a = tensor(s.projector_xx, s.projector_x);
  p += expectation(a, rho).real();
  if (s.both_ports) p += expectation(tensor(orthogonal(s.projector_xx), orthogonal(s.projector_x)), rho).real();
  return std::max(p, 0.0);
}

namespace detail {

inline std::optional<Ket2> polarization_from_char(char c) {
  switch (c) {
    case 'H': return pol::H();
    case 'V': return pol::V();
    case 'D': return pol::D();
    case 'A': return pol::A();
    case 'R': return pol::R();
    case 'L': return pol::L();
    default: return std::nullopt;
  }
}

inline char orthogonal_char(char c) {
  switch (c) {
    case 'H': return 'V';
    case 'V': return 'H';
    case 'D': return 'A';
    case 'A': return 'D';
    case 'R': return 'L';
    case 'L': return 'R';
    default: return '?';
  }
}

}  // namespace detail

/// Parses "XY" (single analyzer port per arm) or "XY+X'Y'" (both ports, where
/// X', Y' are the orthogonal partners), X, Y ∈ {H, V, D, A, R, L}.
inline BasisSetting setting_from_label(const std::string& label) {
  auto bad = [&] { return ConfigError("unrecognised basis label '" + label + "'"); };
  if (label.size() != 2 && label.size() != 5) throw bad();
  const auto xx = detail::polarization_from_char(label[0]);
  const auto x = detail::polarization_from_char(label[1]);
  if (!xx || !x) throw bad();
  BasisSetting s{*xx, *x, label, false};
  if (label.size() == 5) {
    if (label[2] != '+' || label[3] != detail::orthogonal_char(label[0]) ||
        label[4] != detail::orthogonal_char(label[1])) {
      throw bad();
    }
    s.both_ports = true;
  }
  return s;
}

inline std::vector<BasisSetting> standard_settings(TomographyMode mode) {
  std::vector<BasisSetting> out;
  if (mode == TomographyMode::six_basis) {
    for (const char* l : {"HH+VV", "HV+VH", "DD+AA", "DA+AD", "RR+LL", "RL+LR"}) out.push_back(setting_from_label(l));
  } else {
    const std::string arms = "HVDR";
    for (char a : arms)
      for (char b : arms) out.push_back(setting_from_label(std::string{a, b}));
  }
  return out;
}

/// Expected coincidences n·p per setting; Poisson-distributed when `poisson`
/// is set, otherwise the rounded expectation. Variates for setting i depend
/// only on (seed, i).
inline std::vector<CountRecord> simulate_counts(const Mat4& rho, const std::vector<BasisSetting>& settings,
                                                std::uint64_t n_per_setting, std::uint64_t seed, bool poisson) {
  require_density_matrix(rho, "simulate_counts");
  if (n_per_setting == 0) throw InvalidArgument("simulate_counts: n_per_setting must be > 0");
  std::vector<CountRecord> out;
  out.reserve(settings.size());
  for (std::size_t i = 0; i < settings.size(); ++i) {
    const double mean = static_cast<double>(n_per_setting) * setting_probability(rho, settings[i]);
    std::uint64_t c = 0;
    if (poisson) {
      if (mean > 0.0) {
        std::mt19937_64 eng(rng::counter_bits(seed, i, 7));
        std::poisson_distribution<std::int64_t> dist(mean);
        c = static_cast<std::uint64_t>(dist(eng));
      }
    } else {
      c = static_cast<std::uint64_t>(std::llround(mean));
    }
    out.push_back({settings[i], c, 1.0});
  }
  return out;
}

// ---------------------------------------------------------------- visibilities

/// (co − cross)/(co + cross) with counts normalised by acquisition weight.
inline double visibility(const CountRecord& co, const CountRecord& cross) {
  if (co.counts + cross.counts == 0) throw ZeroCounts("visibility: no counts in either record");
  if (!(co.acquisition_weight > 0.0) || !(cross.acquisition_weight > 0.0)) {
    throw InvalidArgument("visibility: acquisition weights must be > 0");
  }
  const double a = static_cast<double>(co.counts) / co.acquisition_weight;
  const double b = static_cast<double>(cross.counts) / cross.acquisition_weight;
  return (a - b) / (a + b);
}

/// f = (1 + C_HV + C_DA − C_RL)/4
inline double fidelity_from_visibilities(double c_hv, double c_da, double c_rl) {
  for (double c : {c_hv, c_da, c_rl}) {
    if (!(c >= -1.0 && c <= 1.0)) throw InvalidArgument("fidelity_from_visibilities: visibility outside [-1, 1]");
  }
  return std::clamp(0.25 * (1.0 + c_hv + c_da - c_rl), 0.0, 1.0);
}

struct SixBasisEstimate {
  double c_hv = 0.0;
  double c_da = 0.0;
  double c_rl = 0.0;
  double fidelity = 0.0;
};

/// Pairs co/cross records by label within each of the HV, DA and RL bases.
/// Accepts both-port labels ("HH+VV") and single-port labels ("HH").
inline SixBasisEstimate six_basis_estimate(const std::vector<CountRecord>& records) {
  auto find = [&](const char* both, const char* single) -> const CountRecord& {
    for (const auto& r : records)
      if (r.setting.label == both) return r;
    for (const auto& r : records)
      if (r.setting.label == single) return r;
    throw InsufficientSettings(std::string("six-basis estimate: missing setting ") + both);
  };
  SixBasisEstimate e;
  e.c_hv = visibility(find("HH+VV", "HH"), find("HV+VH", "HV"));
  e.c_da = visibility(find("DD+AA", "DD"), find("DA+AD", "DA"));
  e.c_rl = visibility(find("RR+LL", "RR"), find("RL+LR", "RL"));
  e.fidelity = fidelity_from_visibilities(e.c_hv, e.c_da, e.c_rl);
  return e;
}

// ---------------------------------------------------------------- MLE

namespace detail {

// Real Pauli-basis coordinates of a Hermitian 4×4 operator.
inline std::array<double, 16> pauli_coordinates(const Mat4& m) {
  const std::array<Mat2, 4> p{Mat2::identity(), pauli_x(), pauli_y(), pauli_z()};
  std::array<double, 16> out{};
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = 0; b < 4; ++b) out[a * 4 + b] = trace(m * tensor(p[a], p[b])).real();
  return out;
}

inline std::size_t operator_rank(const std::vector<Mat4>& ops) {
  Matrix<16> gram;
  for (const auto& op : ops) {
    const auto r = pauli_coordinates(op);
    for (std::size_t i = 0; i < 16; ++i)
      for (std::size_t j = 0; j < 16; ++j) gram(i, j) += r[i] * r[j];
  }
  const auto es = eig_hermitian(gram);
  if (es.values[0] <= 0.0) return 0;
  std::size_t rank = 0;
  for (double l : es.values)
    if (l > 1e-9 * es.values[0]) ++rank;
  return rank;
}

// Lower-triangular T ↔ 16 reals: 4 diagonal entries, then (re, im) of the
// strictly lower entries in row-major order.
inline constexpr std::array<std::pair<std::size_t, std::size_t>, 6> kLower{
    {{1, 0}, {2, 0}, {2, 1}, {3, 0}, {3, 1}, {3, 2}}};

inline Mat4 triangular_from_params(const std::array<double, 16>& x) {
  Mat4 t;
  for (std::size_t i = 0; i < 4; ++i) t(i, i) = x[i];
  for (std::size_t m = 0; m < kLower.size(); ++m) {
    t(kLower[m].first, kLower[m].second) = Complex{x[4 + 2 * m], x[5 + 2 * m]};
  }
  return t;
}

inline Mat4 rho_from_triangular(const Mat4& t) {
  Mat4 m = adjoint(t) * t;
  const double tr = trace(m).real();
  return m * Complex{1.0 / tr};
}

class LikelihoodModel {
 public:
  explicit LikelihoodModel(const std::vector<CountRecord>& records) {
    for (const auto& r : records) {
      if (!(r.acquisition_weight > 0.0)) throw InvalidArgument("mle_reconstruct: acquisition weights must be > 0");
      ops_.push_back(measurement_operator(r.setting));
      counts_.push_back(static_cast<double>(r.counts));
      weights_.push_back(r.acquisition_weight);
      total_ += static_cast<double>(r.counts);
    }
  }

  const std::vector<Mat4>& operators() const { return ops_; }

  /// Profiled log-likelihood ratio at the parameters `x`; fills `grad` with
  /// ∂L/∂x when non-null. Returns −∞ outside the support.
  double evaluate(const std::array<double, 16>& x, std::array<double, 16>* grad) const {
    const Mat4 t = triangular_from_params(x);
    Mat4 m = adjoint(t) * t;
    const double tr = trace(m).real();
    if (!(tr > 0.0)) return -std::numeric_limits<double>::infinity();
    const Mat4 rho = m * Complex{1.0 / tr};

    std::vector<double> p(ops_.size());
    double s = 0.0;
    for (std::size_t i = 0; i < ops_.size(); ++i) {
      p[i] = trace(ops_[i] * rho).real();
      s += weights_[i] * p[i];
    }
    if (grad) grad->fill(0.0);
    if (total_ == 0.0) return 0.0;
    if (!(s > 0.0)) return -std::numeric_limits<double>::infinity();

    double ll = 0.0;
    Mat4 g;
    for (std::size_t i = 0; i < ops_.size(); ++i) {
      if (counts_[i] == 0.0) continue;
      if (!(p[i] > 0.0)) return -std::numeric_limits<double>::infinity();
      ll += counts_[i] * std::log(weights_[i] * p[i] * total_ / (s * counts_[i]));
      g += ops_[i] * Complex{counts_[i] / p[i]};
    }
    if (!grad) return ll;

    for (std::size_t i = 0; i < ops_.size(); ++i) g -= ops_[i] * Complex{total_ * weights_[i] / s};
    // dL = tr(G dρ), ρ = M / tr M, M = T†T  →  dL = 2 Re tr(G_M T† dT)
    const double g_rho = trace(g * rho).real();
    Mat4 gm = g;
    for (std::size_t i = 0; i < 4; ++i) gm(i, i) -= g_rho;
    gm *= Complex{1.0 / tr};
    const Mat4 kmat = gm * adjoint(t);
    for (std::size_t a = 0; a < 4; ++a) (*grad)[a] = 2.0 * kmat(a, a).real();
    for (std::size_t j = 0; j < kLower.size(); ++j) {
      const auto [a, b] = kLower[j];
      (*grad)[4 + 2 * j] = 2.0 * kmat(b, a).real();
      (*grad)[5 + 2 * j] = -2.0 * kmat(b, a).imag();
    }
    return ll;
  }

 private:
  std::vector<Mat4> ops_;
  std::vector<double> counts_;
  std::vector<double> weights_;
  double total_ = 0.0;
};

inline double dot(const std::array<double, 16>& a, const std::array<double, 16>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < 16; ++i) s += a[i] * b[i];
  return s;
}

}  // namespace detail

/// Maximum-likelihood density matrix from coincidence counts. The state is
/// parametrised as ρ = T†T / Tr(T†T) with T lower triangular, which keeps
/// every iterate physical. Ascent is limited-memory BFGS with a backtracking
/// Armijo line search started from the maximally mixed state; only steps that
/// increase the likelihood are accepted.
inline ReconstructionResult mle_reconstruct(const std::vector<CountRecord>& records, const MleOptions& opts = {}) {
  const detail::LikelihoodModel model(records);
  if (records.size() < 16 || detail::operator_rank(model.operators()) < 16) {
    throw InsufficientSettings("mle_reconstruct: settings do not span the two-qubit operator space");
  }

  std::array<double, 16> x{};
  for (std::size_t i = 0; i < 4; ++i) x[i] = 0.5;
  std::array<double, 16> g{};
  double ll = model.evaluate(x, &g);

  ReconstructionResult res;
  res.likelihood_trace.push_back(ll);

  struct Pair {
    std::array<double, 16> s, y;
    double rho;
  };
  std::deque<Pair> memory;
  constexpr std::size_t kMemory = 10;

  bool converged = false;
  int iter = 0;
  while (iter < opts.max_iterations) {
    // Two-loop recursion on the ascent problem (curvature pairs use −∇L).
    std::array<double, 16> q;
    for (std::size_t i = 0; i < 16; ++i) q[i] = g[i];
    std::vector<double> alpha(memory.size());
    for (std::size_t m = memory.size(); m-- > 0;) {
      alpha[m] = memory[m].rho * detail::dot(memory[m].s, q);
      for (std::size_t i = 0; i < 16; ++i) q[i] -= alpha[m] * memory[m].y[i];
    }
    double gamma;
    if (!memory.empty()) {
      const auto& last = memory.back();
      gamma = detail::dot(last.s, last.y) / detail::dot(last.y, last.y);
    } else {
      const double gn = std::sqrt(detail::dot(g, g));
      const double xn = std::sqrt(detail::dot(x, x));
      gamma = gn > 0.0 ? 0.1 * xn / gn : 0.0;
    }
    for (auto& v : q) v *= gamma;
    for (std::size_t m = 0; m < memory.size(); ++m) {
      const double beta = memory[m].rho * detail::dot(memory[m].y, q);
      for (std::size_t i = 0; i < 16; ++i) q[i] += memory[m].s[i] * (alpha[m] - beta);
    }
    std::array<double, 16> dir = q;
    double slope = detail::dot(g, dir);
    if (!(slope > 0.0) && !memory.empty()) {
      memory.clear();
      continue;
    }
    if (!(slope > 0.0)) {
      converged = true;
      break;
    }

    double step = 1.0;
    bool accepted = false;
    std::array<double, 16> x_new{}, g_new{};
    double ll_new = ll;
    for (int k = 0; k < 60; ++k) {
      for (std::size_t i = 0; i < 16; ++i) x_new[i] = x[i] + step * dir[i];
      ll_new = model.evaluate(x_new, &g_new);
      if (std::isfinite(ll_new) && ll_new > ll && ll_new >= ll + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (!memory.empty()) {
        memory.clear();
        continue;
      }
      converged = true;
      break;
    }

    ++iter;
    const double improvement = ll_new - ll;
    Pair pr;
    for (std::size_t i = 0; i < 16; ++i) {
      pr.s[i] = x_new[i] - x[i];
      pr.y[i] = g[i] - g_new[i];  // gradient of −L
    }
    const double sy = detail::dot(pr.s, pr.y);
    if (sy > 1e-300) {
      pr.rho = 1.0 / sy;
      memory.push_back(pr);
      if (memory.size() > kMemory) memory.pop_front();
    }
    x = x_new;
    g = g_new;
    ll = ll_new;
    res.likelihood_trace.push_back(ll);
    if (improvement < opts.tolerance) {
      converged = true;
      break;
    }
  }

  res.rho = detail::rho_from_triangular(detail::triangular_from_params(x));
  res.rho = (res.rho + adjoint(res.rho)) * Complex{0.5};
  res.log_likelihood = ll;
  res.iterations = iter;
  res.converged = converged;
  return res;
}

// ---------------------------------------------------------------- CSV

/// label,counts,weight with a header row.
inline void write_counts_csv(std::ostream& os, const std::vector<CountRecord>& records) {
  os << "label,counts,weight\n";
  for (const auto& r : records) {
    std::ostringstream w;
    w.imbue(std::locale::classic());
    w.precision(17);
    w << r.acquisition_weight;
    os << r.setting.label << ',' << r.counts << ',' << w.str() << '\n';
  }
}

inline std::vector<CountRecord> read_counts_csv(std::istream& is) {
  auto trim = [](std::string s) {
    const auto ws = [](unsigned char c) { return std::isspace(c) != 0; };
    while (!s.empty() && ws(s.back())) s.pop_back();
    std::size_t b = 0;
    while (b < s.size() && ws(s[b])) ++b;
    return s.substr(b);
  };
  auto split = [&](const std::string& line) {
    std::vector<std::string> f;
    std::string cur;
    std::istringstream ss(line);
    while (std::getline(ss, cur, ',')) f.push_back(trim(cur));
    if (!line.empty() && line.back() == ',') f.emplace_back();
    return f;
  };

  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  std::vector<CountRecord> out;
  while (std::getline(is, line)) {
    ++lineno;
    if (lineno == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    line = trim(line);
    if (line.empty()) continue;
    const auto f = split(line);
    if (!header) {
      if (f != std::vector<std::string>{"label", "counts", "weight"}) {
        throw ConfigError("counts CSV: expected header 'label,counts,weight'");
      }
      header = true;
      continue;
    }
    const std::string where = "counts CSV line " + std::to_string(lineno);
    if (f.size() != 3) throw ConfigError(where + ": expected 3 columns");
    CountRecord r;
    r.setting = setting_from_label(f[0]);
    std::size_t pos = 0;
    try {
      if (f[1].empty() || f[1][0] == '-') throw std::invalid_argument("negative");
      r.counts = std::stoull(f[1], &pos);
      if (pos != f[1].size()) throw std::invalid_argument("trailing");
      std::istringstream ws(f[2]);
      ws.imbue(std::locale::classic());
      ws >> r.acquisition_weight;
      if (!ws || !ws.eof()) throw std::invalid_argument("weight");
    } catch (const std::exception&) {
      throw ConfigError(where + ": malformed counts or weight");
    }
    if (!(r.acquisition_weight > 0.0)) throw ConfigError(where + ": weight must be > 0");
    out.push_back(r);
  }
  if (!header) throw ConfigError("counts CSV: missing header row");
  return out;
}

}  // namespace qdent
