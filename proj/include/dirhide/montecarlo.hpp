#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dirhide/errors.hpp"
#include "dirhide/parallel.hpp"
#include "dirhide/protocol.hpp"
#include "dirhide/quadrature.hpp"
#include "dirhide/rng.hpp"
#include "dirhide/sampler.hpp"
#include "dirhide/semilocal.hpp"
#include "dirhide/states.hpp"

namespace dirhide::montecarlo {

enum class Protocol { semilocal, tomography, adaptive };

inline const char* protocol_name(Protocol p) {
  switch (p) {
    case Protocol::semilocal: return "semilocal";
    case Protocol::tomography: return "tomography";
    case Protocol::adaptive: return "adaptive";
  }
  return "?";
}

struct RunConfig {
  int n_spins = 4;
  int first_stage = 2;
  std::uint64_t shots = 1;
  std::uint64_t seed = 0;
  Protocol protocol = Protocol::semilocal;
  int threads = 1;  // speed only

  SplitSpec split() const { return SplitSpec{n_spins, first_stage}; }

  void validate() const {
    if (shots < 1) throw DomainError("shots must be at least 1");
    if (n_spins % 2 != 0) throw DomainError("N must be even");
  }
};

struct Estimate {
  double fidelity = 0.0;
  double std_error = 0.0;
  std::uint64_t shots = 0;
  double p_success = 0.0;
  double p_std_error = 0.0;
};

inline Estimate make_estimate(const parallel::Moments& fid, const parallel::Moments& tag) {
  return {fid.mean, fid.std_error(), fid.count, tag.mean, tag.std_error()};
}

/// Two-stage covariant protocol with the per-x optimal guess for the split.
inline Estimate simulate_semilocal(const RunConfig& config) {
  config.validate();
  if (config.protocol != Protocol::semilocal) throw ContractError("config is not a semilocal run");
  const SplitSpec split = config.split();
  const auto guess = semilocal::optimize_guess(split).guess;
  const auto t = run_two_stage(split, guess, config.shots, config.seed, config.threads);
  return make_estimate(t.fidelity, t.success);
}

// ---------------------------------------------------------------------------
// Tomography: the first N0 spins are measured along x, y or z (split evenly,
// random slot assignment), the axis is the normalized Bloch estimate, and the
// second stage counts spins anti-aligned with it.

inline constexpr int kTomographyRedraws = 64;

struct TomographyShot {
  Branch branch = Branch::parallel;
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();
  std::vector<double> x_distribution;  // exact P(x | branch, stage-one record)
  int anti_aligned = 0;
};

namespace detail {

/// Distribution of (number of successes among `count` Bernoulli(q)) + an
/// extra Bernoulli(extra) + `shift`, on 0..size-1.
inline std::vector<double> shifted_binomial(int size, int count, double q, double extra, int shift) {
  std::vector<double> d(size, 0.0);
  std::vector<double> b(count + 1, 0.0);
  if (q <= 0.0) {
    b[0] = 1.0;
  } else if (q >= 1.0) {
    b[count] = 1.0;
  } else {
    const double lq = std::log(q), lr = std::log1p(-q);
    for (int k = 0; k <= count; ++k) {
      b[k] = std::exp(std::lgamma(count + 1.0) - std::lgamma(k + 1.0) - std::lgamma(count - k + 1.0) +
                      k * lq + (count - k) * lr);
    }
  }
  for (int k = 0; k <= count; ++k) {
    if (k + shift < size) d[k + shift] += b[k] * (1.0 - extra);
    if (k + shift + 1 < size) d[k + shift + 1] += b[k] * extra;
  }
  return d;
}

inline int draw_from(const std::vector<double>& dist, rng::Stream& s) {
  const double total = std::accumulate(dist.begin(), dist.end(), 0.0);
  double r = s.uniform() * total;
  for (int k = 0; k < static_cast<int>(dist.size()); ++k) {
    r -= dist[k];
    if (r < 0.0) return k;
  }
  return static_cast<int>(dist.size()) - 1;
}

}  // namespace detail

inline TomographyShot sample_tomography_shot(const SplitSpec& split, rng::Stream& s) {
  const int n0 = split.first_stage, n1 = split.second_stage();
  TomographyShot shot;
  SingletPlacement placement = SingletPlacement::none;
  if (s.uniform() < 0.5) {
    shot.branch = Branch::parallel;
  } else {
    shot.branch = Branch::singlet;
    placement = draw_placement(n0, n1, s);
  }
  const double spin_z = shot.branch == Branch::parallel ? 1.0 : -1.0;
  const Eigen::Matrix3d axes = Eigen::Matrix3d::Identity();

  // The singlet sits on slots 0 and 1 (or slot 0 when split); the axis
  // permutation makes the slot labels irrelevant.
  std::vector<int> slot_axis(n0);
  Eigen::Vector3d mate_bloch = Eigen::Vector3d::Zero();
  for (int attempt = 0; attempt < kTomographyRedraws; ++attempt) {
    for (int i = 0; i < n0; ++i) slot_axis[i] = i % 3;
    for (int i = n0 - 1; i > 0; --i) std::swap(slot_axis[i], slot_axis[s.below(static_cast<std::uint32_t>(i + 1))]);

    Eigen::Vector3d sum = Eigen::Vector3d::Zero();
    Eigen::Vector3d count = Eigen::Vector3d::Zero();
    int first_free = 0;
    if (placement == SingletPlacement::first_stage) {
      const Eigen::Vector3d e1 = axes.col(slot_axis[0]), e2 = axes.col(slot_axis[1]);
      const double s1 = s.bernoulli(0.5) ? 1.0 : -1.0;
      const double s2 = s.bernoulli(0.5 * (1.0 - e1.dot(e2))) ? s1 : -s1;
      sum(slot_axis[0]) += s1;
      sum(slot_axis[1]) += s2;
      count(slot_axis[0]) += 1;
      count(slot_axis[1]) += 1;
      first_free = 2;
    } else if (placement == SingletPlacement::split) {
      const Eigen::Vector3d e1 = axes.col(slot_axis[0]);
      const double s1 = s.bernoulli(0.5) ? 1.0 : -1.0;
      mate_bloch = -s1 * e1;
      sum(slot_axis[0]) += s1;
      count(slot_axis[0]) += 1;
      first_free = 1;
    }
    for (int i = first_free; i < n0; ++i) {
      const int a = slot_axis[i];
      const double up = 0.5 * (1.0 + spin_z * axes(2, a));
      sum(a) += s.bernoulli(up) ? 1.0 : -1.0;
      count(a) += 1;
    }
    Eigen::Vector3d r = Eigen::Vector3d::Zero();
    for (int a = 0; a < 3; ++a) {
      if (count(a) > 0) r(a) = sum(a) / count(a);
    }
    if (r.norm() > 0.0) {
      shot.axis = r.normalized();
      break;
    }
    if (attempt + 1 == kTomographyRedraws) {
      throw ContractError("tomography estimate stayed degenerate after repeated redraws");
    }
  }

  const double mz = shot.axis.z();
  const double q = 0.5 * (1.0 - spin_z * mz);  // P(anti-aligned) for a background spin
  switch (placement) {
    case SingletPlacement::none:
    case SingletPlacement::first_stage:
      shot.x_distribution = detail::shifted_binomial(n1 + 1, n1, q, 0.0, 0);
      break;
    case SingletPlacement::split:
      shot.x_distribution =
          detail::shifted_binomial(n1 + 1, n1 - 1, q, 0.5 * (1.0 - mate_bloch.dot(shot.axis)), 0);
      break;
    case SingletPlacement::second_stage:
      shot.x_distribution = detail::shifted_binomial(n1 + 1, n1 - 2, q, 0.0, 1);
      break;
  }
  shot.anti_aligned = detail::draw_from(shot.x_distribution, s);
  return shot;
}

/// Per-x guess bits: f(x) = 0 iff the expected alignment of the kept axis,
/// accumulated over a training pass, is non-negative.
inline GuessFunction train_tomography_guess(const SplitSpec& split, std::uint64_t shots, std::uint64_t seed,
                                            int threads) {
  const int n1 = split.second_stage();
  auto chunks = parallel::map_chunks(shots, kShotChunk, threads, [&](std::uint64_t b, std::uint64_t e) {
    std::vector<double> acc(n1 + 1, 0.0);
    for (std::uint64_t i = b; i < e; ++i) {
      rng::Stream s(seed, static_cast<std::uint32_t>(StreamDomain::tomography_training), i);
      const auto shot = sample_tomography_shot(split, s);
      for (int x = 0; x <= n1; ++x) acc[x] += shot.x_distribution[x] * shot.axis.z();
    }
    return acc;
  });
  std::vector<double> total(n1 + 1, 0.0);
  for (const auto& c : chunks) {
    for (int x = 0; x <= n1; ++x) total[x] += c[x];
  }
  std::vector<std::uint8_t> bits(n1 + 1);
  for (int x = 0; x <= n1; ++x) bits[x] = total[x] >= 0.0 ? 0 : 1;
  return GuessFunction(std::move(bits));
}

inline Estimate simulate_tomography(const RunConfig& config) {
  config.validate();
  if (config.protocol != Protocol::tomography) throw ContractError("config is not a tomography run");
  const SplitSpec split = config.split();
  split.validate();
  if (split.first_stage < 3) throw DomainError("tomography needs N0 >= 3");
  const auto guess = train_tomography_guess(split, config.shots, config.seed, config.threads);
  struct Tally {
    parallel::Moments fid, tag;
  };
  auto chunks = parallel::map_chunks(config.shots, kShotChunk, config.threads, [&](std::uint64_t b, std::uint64_t e) {
    Tally t;
    for (std::uint64_t i = b; i < e; ++i) {
      rng::Stream s(config.seed, static_cast<std::uint32_t>(StreamDomain::tomography), i);
      const auto shot = sample_tomography_shot(split, s);
      const bool reverse = guess(shot.anti_aligned) != 0;
      t.fid.add(0.5 * (1.0 + (reverse ? -1.0 : 1.0) * shot.axis.z()));
      t.tag.add(((shot.branch == Branch::parallel) != reverse) ? 1.0 : 0.0);
    }
    return t;
  });
  Tally total;
  for (const auto& c : chunks) {
    total.fid.merge(c.fid);
    total.tag.merge(c.tag);
  }
  return make_estimate(total.fid, total.tag);
}

// ---------------------------------------------------------------------------
// Adaptive local projective measurements. Spins are measured one after the
// other; the direction for spin k depends on the outcomes of spins 0..k-1
// (a binary decision tree with heap-indexed nodes). Fidelity is evaluated
// exactly: path probabilities are polynomials of degree <= N in the encoded
// direction, integrated with a product rule that is exact at that degree.

inline constexpr int kAdaptiveMaxSpins = 5;
inline constexpr double kAdaptiveMinStep = 1e-4;
inline constexpr int kAdaptiveSweeps = 8;  // per step size

struct AdaptiveStrategy {
  int n_spins = 0;
  double p = 0.0;
  std::vector<Eigen::Vector3d> nodes;  // heap order, root = 0
  std::vector<Eigen::Vector3d> guesses;  // one per outcome path
  double fidelity = 0.5;

  std::string description() const {
    std::ostringstream os;
    os.precision(6);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      os << (i ? ";" : "") << "node" << i << "=(" << nodes[i].x() << "," << nodes[i].y() << ","
         << nodes[i].z() << ")";
    }
    return os.str();
  }
};

namespace detail {

struct PathValue {
  double probability = 0.0;  // averaged over the encoded direction
  Eigen::Vector3d moment = Eigen::Vector3d::Zero();  // average of n P(path|n)
};

/// Probability of an outcome path given the encoded direction n.
inline double path_probability(const std::vector<Eigen::Vector3d>& dirs, const std::vector<int>& outcome,
                               const Eigen::Vector3d& n, double p) {
  const int len = static_cast<int>(dirs.size());
  double aligned = 1.0;
  for (int k = 0; k < len; ++k) aligned *= 0.5 * (1.0 + outcome[k] * dirs[k].dot(n));
  if (p >= 1.0) return aligned;
  double singlet = 0.0;
  for (int i = 0; i < len; ++i) {
    for (int j = i + 1; j < len; ++j) {
      double t = 0.25 * (1.0 - outcome[i] * outcome[j] * dirs[i].dot(dirs[j]));
      for (int k = 0; k < len; ++k) {
        if (k != i && k != j) t *= 0.5 * (1.0 - outcome[k] * dirs[k].dot(n));
      }
      singlet += t;
    }
  }
  return p * aligned + (1.0 - p) * singlet / (0.5 * len * (len - 1));
}

inline std::vector<PathValue> evaluate_paths(int n_spins, double p, const std::vector<Eigen::Vector3d>& nodes,
                                             const quadrature::SphereQuadrature& quad) {
  const int paths = 1 << n_spins;
  std::vector<PathValue> out(paths);
  std::vector<Eigen::Vector3d> dirs(n_spins);
  std::vector<int> outcome(n_spins);
  for (int path = 0; path < paths; ++path) {
    int node = 0;
    for (int k = 0; k < n_spins; ++k) {
      const int bit = (path >> (n_spins - 1 - k)) & 1;
      dirs[k] = nodes[node];
      outcome[k] = bit ? -1 : 1;
      node = 2 * node + 1 + bit;
    }
    for (const auto& q : quad.nodes()) {
      const double pr = path_probability(dirs, outcome, q.direction, p);
      out[path].probability += q.weight * pr;
      out[path].moment += q.weight * pr * q.direction;
    }
  }
  return out;
}

inline double tree_fidelity(const std::vector<PathValue>& paths) {
  double s = 0.0;
  for (const auto& v : paths) s += v.moment.norm();
  return 0.5 + 0.5 * s;
}

inline Eigen::Vector3d from_angles(double theta, double phi) {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

}  // namespace detail

/// Exact fidelity of a decision tree with optimal leaf guesses V/|V|.
inline double adaptive_fidelity(int n_spins, double p, const std::vector<Eigen::Vector3d>& nodes) {
  if (static_cast<int>(nodes.size()) != (1 << n_spins) - 1) throw DomainError("tree needs 2^N - 1 nodes");
  const quadrature::SphereQuadrature quad(n_spins + 2);
  return detail::tree_fidelity(detail::evaluate_paths(n_spins, p, nodes, quad));
}

/// Best-effort coordinate ascent over node directions with `restarts`
/// random starts; the k-th start depends only on (seed, k), so more restarts
/// never lower the result.
inline AdaptiveStrategy optimize_adaptive(int n_spins, int restarts, std::uint64_t seed, double p) {
  if (n_spins < 2 || n_spins > kAdaptiveMaxSpins || n_spins % 2 != 0) {
    throw DomainError("adaptive optimizer supports even N <= " + std::to_string(kAdaptiveMaxSpins));
  }
  if (restarts < 1) throw DomainError("restarts must be at least 1");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("p must lie in [0, 1]");
  const int n_nodes = (1 << n_spins) - 1;
  const quadrature::SphereQuadrature quad(n_spins + 2);

  AdaptiveStrategy best;
  best.n_spins = n_spins;
  best.p = p;
  best.fidelity = -1.0;
  for (int r = 0; r < restarts; ++r) {
    rng::Stream s(seed, static_cast<std::uint32_t>(StreamDomain::adaptive), static_cast<std::uint64_t>(r));
    std::vector<double> theta(n_nodes), phi(n_nodes);
    for (int i = 0; i < n_nodes; ++i) {
      const Eigen::Vector3d v = s.unit_vector();
      theta[i] = std::acos(std::clamp(v.z(), -1.0, 1.0));
      phi[i] = std::atan2(v.y(), v.x());
    }
    const auto nodes_of = [&] {
      std::vector<Eigen::Vector3d> nodes(n_nodes);
      for (int i = 0; i < n_nodes; ++i) nodes[i] = detail::from_angles(theta[i], phi[i]);
      return nodes;
    };
    double f = detail::tree_fidelity(detail::evaluate_paths(n_spins, p, nodes_of(), quad));
    for (double h = 0.5; h >= kAdaptiveMinStep; h *= 0.5) {
      bool improved = true;
      for (int sweep = 0; improved && sweep < kAdaptiveSweeps; ++sweep) {
        improved = false;
        for (int i = 0; i < n_nodes; ++i) {
          for (double* angle : {&theta[i], &phi[i]}) {
            for (double step : {h, -h}) {
              *angle += step;
              const double g = detail::tree_fidelity(detail::evaluate_paths(n_spins, p, nodes_of(), quad));
              if (g > f + 1e-12) {
                f = g;
                improved = true;
              } else {
                *angle -= step;
              }
            }
          }
        }
      }
    }
    if (f > best.fidelity) {
      best.nodes = nodes_of();
      best.fidelity = f;
    }
  }
  const auto paths = detail::evaluate_paths(n_spins, p, best.nodes, quad);
  best.guesses.clear();
  for (const auto& v : paths) {
    best.guesses.push_back(v.moment.norm() > 0.0 ? Eigen::Vector3d(v.moment.normalized()) : Eigen::Vector3d::UnitZ());
  }
  best.fidelity = detail::tree_fidelity(paths);
  return best;
}

inline AdaptiveStrategy optimize_adaptive(int n_spins, int restarts, std::uint64_t seed) {
  return optimize_adaptive(n_spins, restarts, seed, n_spins >= 2 ? states::balanced_p(n_spins) : 0.0);
}

/// Total probability over all outcome paths (equals 1 for any tree).
inline double adaptive_total_probability(int n_spins, double p, const std::vector<Eigen::Vector3d>& nodes) {
  const quadrature::SphereQuadrature quad(n_spins + 2);
  double s = 0.0;
  for (const auto& v : detail::evaluate_paths(n_spins, p, nodes, quad)) s += v.probability;
  return s;
}

inline Estimate simulate(const RunConfig& config) {
  switch (config.protocol) {
    case Protocol::semilocal: return simulate_semilocal(config);
    case Protocol::tomography: return simulate_tomography(config);
    case Protocol::adaptive: throw DomainError("adaptive runs go through optimize_adaptive");
  }
  throw ContractError("unknown protocol");
}

}  // namespace dirhide::montecarlo
