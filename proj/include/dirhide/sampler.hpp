#pragma once

// Exact sampler for the two-stage covariant protocol at p = 1/2.
//
// With the encoded direction fixed to z (the protocol is covariant), each
// shot draws a branch, the first-stage axis m from the exact outcome density
// of the covariant estimation POVM on the first N0 spins, and the number x
// of second-stage spins found anti-aligned with m. Writing c = cos^2(theta/2)
// for the angle between m and z, the densities on c in [0,1] are
//
//   parallel branch          (N0+1) c^N0                 x ~ Bin(N1, 1-c)
//   singlet in stage one     (N0-1) (1-c)^(N0-2)         x ~ Bin(N1, c)
//   singlet split            mixture, see below          x ~ s + Bin(N1-1, c)
//   singlet in stage two     (N0+1) (1-c)^N0             x ~ 1 + Bin(N1-2, c)
//
// For the split placement the stage-one partner is left opposite to the
// stage-two outcome s of its singlet mate. Its first-stage weights are
// (N0-1)^2/N0 (1-c)^(N0-1) when the mate is aligned with m (s = 0), and
// (N0+1)(1-c)^(N0-1) + (N0-1)^2/N0 c (1-c)^(N0-2) when it is anti-aligned
// (s = 1), each carrying probability 1/2 for the mate's outcome.

#include <cmath>
#include <cstdint>
#include <numbers>

#include <Eigen/Core>

#include "dirhide/errors.hpp"
#include "dirhide/parallel.hpp"
#include "dirhide/protocol.hpp"
#include "dirhide/rng.hpp"

namespace dirhide::montecarlo {

/// Stream domains keep the random sequences of different estimators disjoint.
enum class StreamDomain : std::uint32_t {
  semilocal = 1,
  tomography_training = 2,
  tomography = 3,
  adaptive = 4,
};

enum class Branch { parallel, singlet };
enum class SingletPlacement { none, first_stage, split, second_stage };

struct TwoStageShot {
  Branch branch = Branch::parallel;
  SingletPlacement placement = SingletPlacement::none;
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();
  int anti_aligned = 0;  // x
  double alignment = 0.0;  // n . guess
  bool tag_correct = false;
};

/// Hypergeometric placement of the singlet pair relative to the split.
inline SingletPlacement draw_placement(int first_stage, int second_stage, rng::Stream& s) {
  const double both_first = 0.5 * first_stage * (first_stage - 1.0);
  const double split = static_cast<double>(first_stage) * second_stage;
  const double both_second = 0.5 * second_stage * (second_stage - 1.0);
  const double r = s.uniform() * (both_first + split + both_second);
  if (r < both_first) return SingletPlacement::first_stage;
  if (r < both_first + split) return SingletPlacement::split;
  return SingletPlacement::second_stage;
}

inline TwoStageShot sample_two_stage_shot(const SplitSpec& split, const GuessFunction& guess,
                                          rng::Stream& s) {
  const int n0 = split.first_stage;
  const int n1 = split.second_stage();
  TwoStageShot shot;
  double c = 1.0;
  if (s.uniform() < 0.5) {
    shot.branch = Branch::parallel;
    c = rng::beta_a_one(s.uniform(), n0 + 1.0);
    shot.anti_aligned = s.binomial(n1, 1.0 - c);
  } else {
    shot.branch = Branch::singlet;
    shot.placement = draw_placement(n0, n1, s);
    switch (shot.placement) {
      case SingletPlacement::first_stage:
        c = rng::beta_one_b(s.uniform(), n0 - 1.0);
        shot.anti_aligned = s.binomial(n1, c);
        break;
      case SingletPlacement::split: {
        const double nn = n0;
        const double w_aligned = (nn - 1.0) * (nn - 1.0) / (2.0 * nn * nn);
        const double w_flipped_top = (nn + 1.0) / (2.0 * nn);
        const double r = s.uniform();
        const double u = s.uniform();
        int mate = 1;
        if (r < w_aligned) {
          c = rng::beta_one_b(u, nn);
          mate = 0;
        } else if (r < w_aligned + w_flipped_top) {
          c = rng::beta_one_b(u, nn);
        } else {
          c = rng::beta_two_b(u, nn - 1.0);
        }
        shot.anti_aligned = mate + s.binomial(n1 - 1, c);
        break;
      }
      case SingletPlacement::second_stage:
        c = rng::beta_one_b(s.uniform(), n0 + 1.0);
        shot.anti_aligned = 1 + s.binomial(n1 - 2, c);
        break;
      case SingletPlacement::none:
        throw ContractError("singlet branch without placement");
    }
  }
  const double cos_t = 2.0 * c - 1.0;
  const double sin_t = std::sqrt(std::max(0.0, 1.0 - cos_t * cos_t));
  const double phi = 2.0 * std::numbers::pi * s.uniform();
  shot.axis = {sin_t * std::cos(phi), sin_t * std::sin(phi), cos_t};
  const bool reverse = guess(shot.anti_aligned) != 0;
  const Eigen::Vector3d g = reverse ? Eigen::Vector3d(-shot.axis) : shot.axis;
  shot.alignment = g.z();
  shot.tag_correct = (shot.branch == Branch::parallel) != reverse;
  return shot;
}

struct TwoStageTally {
  parallel::Moments fidelity;  // per-shot (1 + n.guess)/2
  parallel::Moments success;   // per-shot tag indicator
};

inline constexpr std::uint64_t kShotChunk = 4096;

inline TwoStageTally run_two_stage(const SplitSpec& split, const GuessFunction& guess,
                                   std::uint64_t shots, std::uint64_t seed, int threads = 1) {
  split.validate();
  guess.check_matches(split);
  if (shots == 0) throw DomainError("shot count must be positive");
  auto chunks = parallel::map_chunks(shots, kShotChunk, threads, [&](std::uint64_t b, std::uint64_t e) {
    TwoStageTally t;
    for (std::uint64_t i = b; i < e; ++i) {
      rng::Stream s(seed, static_cast<std::uint32_t>(StreamDomain::semilocal), i);
      const TwoStageShot shot = sample_two_stage_shot(split, guess, s);
      t.fidelity.add(0.5 * (1.0 + shot.alignment));
      t.success.add(shot.tag_correct ? 1.0 : 0.0);
    }
    return t;
  });
  TwoStageTally total;
  for (const auto& t : chunks) {
    total.fidelity.merge(t.fidelity);
    total.success.merge(t.success);
  }
  return total;
}

}  // namespace dirhide::montecarlo
