#pragma once

// Permutation-invariant N-spin states that are diagonal in the coupled basis
// |j, m, alpha> quantized along the encoded direction. One coefficient is
// stored per (j, m); every multiplicity copy alpha carries that same value.

#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "dirhide/angmom.hpp"
#include "dirhide/errors.hpp"

namespace dirhide::states {

using angmom::HalfInt;

inline constexpr double kNormTolerance = 1e-10;

class DiagonalBlockState {
 public:
  /// blocks[j][k] is lambda^{(j)}_{m,m} for m = -j + k.
  using Blocks = std::map<HalfInt, std::vector<double>>;

  DiagonalBlockState(int n_spins, Blocks blocks) : n_spins_(n_spins), blocks_(std::move(blocks)) {
    if (n_spins_ < 1) throw DomainError("state needs at least one spin");
    double total = 0.0;
    for (const auto& [j, values] : blocks_) {
      angmom::check_spin_label(n_spins_, j);
      if (static_cast<int>(values.size()) != angmom::block_size(j)) {
        throw DomainError("block j=" + j.str() + " must hold 2j+1 coefficients");
      }
      const double nj = angmom::multiplicity_real(n_spins_, j);
      multiplicities_.emplace(j, nj);
      for (double v : values) {
        if (!(v >= 0.0)) throw DomainError("negative or NaN block coefficient");
        total += nj * v;
      }
    }
    if (std::abs(total - 1.0) > kNormTolerance) {
      throw DomainError("state is not normalized: weight " + std::to_string(total));
    }
  }

  int spins() const { return n_spins_; }
  const Blocks& blocks() const { return blocks_; }

  double coefficient(HalfInt j, HalfInt m) const {
    const auto it = blocks_.find(j);
    if (it == blocks_.end() || !angmom::valid_projection(j, m)) return 0.0;
    return it->second[angmom::projection_index(j, m)];
  }

  /// n_j for a block present in the state.
  double multiplicity(HalfInt j) const {
    const auto it = multiplicities_.find(j);
    return it == multiplicities_.end() ? angmom::multiplicity_real(n_spins_, j) : it->second;
  }

  /// Sum over blocks of n_j * sum_m lambda; equals one for a valid state.
  double total_weight() const {
    double total = 0.0;
    for (const auto& [j, values] : blocks_) {
      for (double v : values) total += multiplicities_.at(j) * v;
    }
    return total;
  }

 private:
  int n_spins_;
  Blocks blocks_;
  std::map<HalfInt, double> multiplicities_;
};

struct HidingSpec {
  int n_spins = 2;
  double p = 0.0;

  void validate() const {
    if (n_spins < 2 || n_spins % 2 != 0) {
      throw DomainError("hiding state needs an even number of spins >= 2");
    }
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("purity parameter p must lie in [0,1]");
  }
};

inline DiagonalBlockState::Blocks empty_blocks(std::initializer_list<HalfInt> labels) {
  DiagonalBlockState::Blocks b;
  for (HalfInt j : labels) b.emplace(j, std::vector<double>(angmom::block_size(j), 0.0));
  return b;
}

/// p |n><n|^{⊗N} mixed with (1-p) times N-2 spins along -n plus a singlet
/// at a uniformly random pair of positions.
inline DiagonalBlockState hiding_state(const HidingSpec& spec) {
  spec.validate();
  const int n = spec.n_spins;
  const HalfInt top = HalfInt::from_twice(n);
  const HalfInt next = HalfInt::from_twice(n - 2);
  auto blocks = empty_blocks({top, next});
  blocks[top][angmom::projection_index(top, top)] = spec.p;
  blocks[next][angmom::projection_index(next, -next)] = (1.0 - spec.p) / (n - 1);
  return DiagonalBlockState(n, std::move(blocks));
}

/// Purity that leaves every single spin maximally mixed.
inline double balanced_p(int n_spins) {
  if (n_spins < 2 || n_spins % 2 != 0) throw DomainError("balanced_p needs even N >= 2");
  return static_cast<double>(n_spins - 2) / (2.0 * n_spins - 2.0);
}

/// Signed single-spin polarization r along the encoded axis: since the state
/// is permutation invariant, r = 2 <S_z> / N.
inline double single_particle_bloch(const DiagonalBlockState& state) {
  double moment = 0.0;
  for (const auto& [j, values] : state.blocks()) {
    const double nj = state.multiplicity(j);
    for (int k = 0; k < static_cast<int>(values.size()); ++k) {
      moment += nj * angmom::projection_at(j, k).value() * values[k];
    }
  }
  return 2.0 * moment / state.spins();
}

inline double single_particle_bloch(const HidingSpec& spec) {
  spec.validate();
  const double n = spec.n_spins;
  return spec.p - (1.0 - spec.p) * (n - 2.0) / n;
}

/// q [J,J] + (1-q) [J-1,J-1] with both components pointing along +n.
inline DiagonalBlockState tagged_mixture(int n_spins, double q) {
  if (n_spins < 2 || n_spins % 2 != 0) throw DomainError("tagged_mixture needs even N >= 2");
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("mixing weight q must lie in [0,1]");
  const HalfInt top = HalfInt::from_twice(n_spins);
  const HalfInt next = HalfInt::from_twice(n_spins - 2);
  auto blocks = empty_blocks({top, next});
  blocks[top][angmom::projection_index(top, top)] = q;
  blocks[next][angmom::projection_index(next, next)] = (1.0 - q) / (n_spins - 1);
  return DiagonalBlockState(n_spins, std::move(blocks));
}

/// Reduced hiding state after discarding M of the N spins.
///
/// The parallel branch stays parallel. For the singlet branch the discarded
/// positions are uniformly random relative to the singlet, so with
/// hypergeometric weights either both singlet spins survive (the reduced
/// state is again an (N-M)-spin singlet branch), exactly one survives
/// (N-M-1 spins along -n and one maximally mixed spin), or none does
/// (N-M spins along -n).
inline DiagonalBlockState trace_out(const HidingSpec& spec, int discarded) {
  spec.validate();
  const int n = spec.n_spins;
  if (discarded < 0 || discarded > n - 2) {
    throw DomainError("trace_out: M must satisfy 0 <= M <= N-2");
  }
  if (discarded == 0) return hiding_state(spec);

  const int kept = n - discarded;
  const double pairs = 0.5 * n * (n - 1.0);
  const double w_both = 0.5 * kept * (kept - 1.0) / pairs;
  const double w_one = static_cast<double>(kept) * discarded / pairs;
  const double w_none = 0.5 * discarded * (discarded - 1.0) / pairs;
  const double q = 1.0 - spec.p;

  const HalfInt top = HalfInt::from_twice(kept);
  const HalfInt next = HalfInt::from_twice(kept - 2);
  const double n_next = angmom::multiplicity_real(kept, next);
  auto blocks = empty_blocks({top, next});
  auto& tb = blocks[top];
  auto& nb = blocks[next];

  tb[angmom::projection_index(top, top)] += spec.p;
  tb[angmom::projection_index(top, -top)] += q * w_none;
  nb[angmom::projection_index(next, -next)] += q * w_both / n_next;

  // One surviving singlet spin: half the time it points along -n, otherwise
  // it is flipped against N-M-1 spins along -n. Couple the flipped spin to
  // the stretched spin-(J'-1/2) state and spread the J'-1 part evenly over
  // its multiplicity copies (symmetrization over the survivor's position).
  tb[angmom::projection_index(top, -top)] += 0.5 * q * w_one;
  const HalfInt rest = HalfInt::from_twice(kept - 1);
  const HalfInt m_flipped = -rest + angmom::kHalf;
  const double to_top = angmom::spin_half_coupling_squared(rest, -rest, angmom::kHalf, top);
  const double to_next = angmom::spin_half_coupling_squared(rest, -rest, angmom::kHalf, next);
  tb[angmom::projection_index(top, m_flipped)] += 0.5 * q * w_one * to_top;
  nb[angmom::projection_index(next, m_flipped)] += 0.5 * q * w_one * to_next / n_next;

  return DiagonalBlockState(kept, std::move(blocks));
}

/// Partial trace over M spins of an arbitrary diagonal block state, one spin
/// at a time: lambda'^{(j')}_{m'} = sum_{j = j' ± 1/2} sum_{ms}
/// lambda^{(j)}_{m'+ms} <j' m'; 1/2 ms | j m'+ms>^2.
inline DiagonalBlockState trace_out_spins(const DiagonalBlockState& state, int discarded) {
  if (discarded < 0 || discarded >= state.spins()) {
    throw DomainError("trace_out_spins: must keep at least one spin");
  }
  DiagonalBlockState::Blocks current = state.blocks();
  int n = state.spins();
  for (int step = 0; step < discarded; ++step) {
    DiagonalBlockState::Blocks reduced;
    for (const auto& [j, values] : current) {
      for (int k = 0; k < static_cast<int>(values.size()); ++k) {
        if (values[k] == 0.0) continue;
        const HalfInt m = angmom::projection_at(j, k);
        for (int dj : {-1, 1}) {
          const HalfInt jp = HalfInt::from_twice(j.twice() + dj);
          if (jp.twice() < 0 || jp.twice() > n - 1) continue;
          for (HalfInt ms : {angmom::kHalf, -angmom::kHalf}) {
            const HalfInt mp_ = m - ms;
            if (!angmom::valid_projection(jp, mp_)) continue;
            const double w = angmom::spin_half_coupling_squared(jp, mp_, ms, j);
            if (w == 0.0) continue;
            auto [it, _] = reduced.try_emplace(jp, std::vector<double>(angmom::block_size(jp), 0.0));
            it->second[angmom::projection_index(jp, mp_)] += values[k] * w;
          }
        }
      }
    }
    current = std::move(reduced);
    --n;
  }
  return DiagonalBlockState(n, std::move(current));
}

}  // namespace dirhide::states
