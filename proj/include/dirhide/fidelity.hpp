#pragma once

#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "dirhide/angmom.hpp"
#include "dirhide/errors.hpp"
#include "dirhide/states.hpp"

namespace dirhide::fidelity {

using angmom::HalfInt;
using states::DiagonalBlockState;

inline constexpr double kCompletenessTolerance = 1e-9;

/// Diagonal of the guess-averaged POVM seed, one block per total spin j,
/// entries ordered m = -j..j. Completeness requires sum_m Omega_mm = 2j+1.
class OmegaDiagonal {
 public:
  using Blocks = std::map<HalfInt, std::vector<double>>;

  OmegaDiagonal(int n_spins, Blocks blocks) : n_spins_(n_spins), blocks_(std::move(blocks)) {
    for (const auto& [j, values] : blocks_) {
      angmom::check_spin_label(n_spins_, j);
      if (static_cast<int>(values.size()) != angmom::block_size(j)) {
        throw DomainError("Omega block j=" + j.str() + " must hold 2j+1 entries");
      }
      for (double v : values) {
        if (!(v >= 0.0)) throw DomainError("Omega entries must be non-negative");
      }
    }
  }

  /// Random guessing: Omega_mm = 1 everywhere.
  static OmegaDiagonal uniform(int n_spins) {
    Blocks b;
    for (HalfInt j : angmom::spin_labels(n_spins)) b.emplace(j, std::vector<double>(j.twice() + 1, 1.0));
    return OmegaDiagonal(n_spins, std::move(b));
  }

  /// All weight 2j+1 on one extremal projection per block: m = +j where
  /// orientation[j] >= 0, m = -j otherwise. Blocks absent from the map use +j.
  static OmegaDiagonal extremal(int n_spins, const std::map<HalfInt, int>& orientation = {}) {
    Blocks b;
    for (HalfInt j : angmom::spin_labels(n_spins)) {
      std::vector<double> v(j.twice() + 1, 0.0);
      const auto it = orientation.find(j);
      const bool down = it != orientation.end() && it->second < 0;
      v[down ? 0 : j.twice()] = j.twice() + 1.0;
      b.emplace(j, std::move(v));
    }
    return OmegaDiagonal(n_spins, std::move(b));
  }

  int spins() const { return n_spins_; }
  const Blocks& blocks() const { return blocks_; }

  bool complete(double tol = kCompletenessTolerance) const {
    for (const auto& [j, values] : blocks_) {
      double s = 0.0;
      for (double v : values) s += v;
      if (std::abs(s - (j.twice() + 1.0)) > tol) return false;
    }
    return true;
  }

 private:
  int n_spins_;
  Blocks blocks_;
};

namespace detail {

/// sum_m m * values[m] for a block stored m = -j..j.
inline double first_moment(HalfInt j, const std::vector<double>& values) {
  double s = 0.0;
  for (int k = 0; k < static_cast<int>(values.size()); ++k) {
    s += angmom::projection_at(j, k).value() * values[k];
  }
  return s;
}

}  // namespace detail

/// Expected mean alignment Delta of a covariant strategy with seed Omega:
/// sum_j n_j (sum_m m lambda_mm / (j+1)) (sum_m m Omega_mm / (j (2j+1))).
/// The j = 0 block contributes nothing (its only projection is m = 0).
inline double expected_delta(const DiagonalBlockState& state, const OmegaDiagonal& omega) {
  if (state.spins() != omega.spins()) {
    throw ContractError("state and Omega describe different numbers of spins");
  }
  for (const auto& [j, values] : omega.blocks()) {
    double s = 0.0;
    for (double v : values) s += v;
    if (std::abs(s - (j.twice() + 1.0)) > kCompletenessTolerance) {
      throw ContractError("Omega block j=" + j.str() + " violates POVM completeness");
    }
  }
  double delta = 0.0;
  for (const auto& [j, lambda] : state.blocks()) {
    if (j.twice() == 0) continue;
    const double lam = detail::first_moment(j, lambda);
    if (lam == 0.0) continue;
    const auto it = omega.blocks().find(j);
    if (it == omega.blocks().end()) {
      throw ContractError("Omega has no block for j=" + j.str() + " present in the state");
    }
    const double om = detail::first_moment(j, it->second);
    delta += state.multiplicity(j) * (lam / (j.value() + 1.0)) *
             (om / (j.value() * (j.twice() + 1.0)));
  }
  return delta;
}

/// Best Delta over all measurements: sum_j n_j |sum_m m lambda_mm| / (j+1).
inline double optimal_joint_delta(const DiagonalBlockState& state) {
  double delta = 0.0;
  for (const auto& [j, lambda] : state.blocks()) {
    delta += state.multiplicity(j) * std::abs(detail::first_moment(j, lambda)) / (j.value() + 1.0);
  }
  return delta;
}

/// Closed form of optimal_joint_delta(hiding_state(N, p)).
inline double joint_delta_closed(int n_spins, double p) {
  states::HidingSpec{n_spins, p}.validate();
  const double n = n_spins;
  return p * n / (n + 2.0) + (1.0 - p) * (n - 2.0) / n;
}

inline double fidelity_from_delta(double delta) {
  if (!(delta >= -1.0 && delta <= 1.0)) throw DomainError("Delta must lie in [-1, 1]");
  return 0.5 * (1.0 + delta);
}

}  // namespace dirhide::fidelity
