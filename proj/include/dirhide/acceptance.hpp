#pragma once

// The acceptance suite: one check per criterion, each returning a verdict
// and a one-line detail. Shared by the test binary and `dirhide selftest`.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "dirhide/commands.hpp"
#include "dirhide/fidelity.hpp"
#include "dirhide/montecarlo.hpp"
#include "dirhide/oracle.hpp"
#include "dirhide/pptbound.hpp"
#include "dirhide/quadrature.hpp"
#include "dirhide/rng.hpp"
#include "dirhide/semilocal.hpp"
#include "dirhide/states.hpp"

namespace dirhide::acceptance {

using angmom::HalfInt;

struct Options {
  int threads = 1;
  std::uint64_t seed = 20061;
};

struct Result {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

namespace detail {

inline std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

inline Result timed(int id, std::string name, const std::function<bool(std::string&)>& body) {
  Result r;
  r.id = id;
  r.name = std::move(name);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    r.passed = body(r.detail);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace detail

using detail::fmt;

// 1 ---------------------------------------------------------------------------
inline Result joint_fidelity(const Options&) {
  return detail::timed(1, "joint fidelity closed form", [](std::string& d) {
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    int cases = 0;
    for (int n = 2; n <= 2000; n += 2) {
      for (double p : {states::balanced_p(n), 0.5, 1.0}) {
        const double a = fidelity::joint_delta_closed(n, p);
        const double b = fidelity::optimal_joint_delta(states::hiding_state({n, p}));
        worst = std::max(worst, std::abs(a - b));
        ++cases;
      }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    d = "max |closed - optimal| = " + fmt("%.2e", worst) + " over " + std::to_string(cases) +
        " cases in " + fmt("%.2f", secs) + " s";
    return worst <= 1e-12 && secs < 5.0;
  });
}

// 2 ---------------------------------------------------------------------------
inline Result single_copy(const Options&) {
  return detail::timed(2, "single-copy and two-spin references", [](std::string& d) {
    const states::DiagonalBlockState one(1, {{angmom::kHalf, {0.0, 1.0}}});
    const double f1 = fidelity::fidelity_from_delta(fidelity::optimal_joint_delta(one));
    const HalfInt j1 = HalfInt::integer(1), j0 = HalfInt::integer(0);
    const states::DiagonalBlockState two(2, {{j1, {0.0, 0.0, 1.0}}, {j0, {0.0}}});
    const double f2 = fidelity::fidelity_from_delta(fidelity::optimal_joint_delta(two));
    // brute force over Omega^{(1)} on a 0.01 grid
    double best = -1.0;
    const int steps = 300;
    for (int a = 0; a <= steps; ++a) {
      for (int b = 0; a + b <= steps; ++b) {
        const double om_m = 0.01 * a, om_0 = 0.01 * b, om_p = 3.0 - om_m - om_0;
        const fidelity::OmegaDiagonal omega(2, {{j1, {om_m, om_0, std::max(0.0, om_p)}}, {j0, {1.0}}});
        best = std::max(best, fidelity::expected_delta(two, omega));
      }
    }
    const double fb = fidelity::fidelity_from_delta(best);
    d = "F1 = " + fmt("%.17g", f1) + ", F2 = " + fmt("%.17g", f2) + ", brute-force F2 = " + fmt("%.12g", fb);
    return std::abs(f1 - 2.0 / 3.0) <= 2 * std::numeric_limits<double>::epsilon() &&
           std::abs(f2 - 0.75) <= 1e-15 && std::abs(fb - 0.75) <= 1e-6;
  });
}

// 3 ---------------------------------------------------------------------------
namespace detail {

struct Entry {
  HalfInt j;
  int index;
  double m;
};

inline std::vector<Entry> entries(int n) {
  std::vector<Entry> out;
  for (HalfInt j : angmom::spin_labels(n)) {
    for (int k = 0; k < angmom::block_size(j); ++k) out.push_back({j, k, angmom::projection_at(j, k).value()});
  }
  return out;
}

/// Builds a state from total weights w (n_j * lambda) per entry.
inline states::DiagonalBlockState from_weights(int n, const std::vector<Entry>& e, const std::vector<double>& w) {
  double total = 0.0;
  for (double v : w) total += v;
  states::DiagonalBlockState::Blocks blocks;
  for (HalfInt j : angmom::spin_labels(n)) blocks.emplace(j, std::vector<double>(angmom::block_size(j), 0.0));
  for (std::size_t i = 0; i < e.size(); ++i) {
    blocks[e[i].j][e[i].index] += w[i] / total / angmom::multiplicity_real(n, e[i].j);
  }
  return states::DiagonalBlockState(n, std::move(blocks));
}

/// Rescales one side so that sum m w = 0; false when impossible.
inline bool balance(const std::vector<Entry>& e, std::vector<double>& w) {
  double up = 0.0, down = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (e[i].m > 0) up += e[i].m * w[i];
    if (e[i].m < 0) down -= e[i].m * w[i];
  }
  if (up == 0.0 && down == 0.0) return true;
  if (up == 0.0 || down == 0.0) return false;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (up > down && e[i].m > 0) w[i] *= down / up;
    if (down > up && e[i].m < 0) w[i] *= up / down;
  }
  return true;
}

}  // namespace detail

inline Result hiding_optimality(const Options& o) {
  return detail::timed(3, "hiding-state optimality at r = 0", [&o](std::string& d) {
    const auto t0 = std::chrono::steady_clock::now();
    constexpr int kConfigs = 100000;
    bool ok = true;
    std::string parts;
    for (int n : {4, 6}) {
      const auto e = detail::entries(n);
      const double target = fidelity::joint_delta_closed(n, states::balanced_p(n));
      double best = -1.0, worst_r = 0.0;
      int count = 0;
      const auto consider = [&](std::vector<double> w) {
        if (!detail::balance(e, w)) return;
        const auto s = detail::from_weights(n, e, w);
        worst_r = std::max(worst_r, std::abs(states::single_particle_bloch(s)));
        best = std::max(best, fidelity::optimal_joint_delta(s));
        ++count;
      };
      // grid: convex combinations of pairwise vertices (one positive and one
      // negative projection, or a single m = 0 entry)
      std::vector<std::vector<double>> vertices;
      for (std::size_t a = 0; a < e.size(); ++a) {
        if (e[a].m == 0.0) {
          std::vector<double> w(e.size(), 0.0);
          w[a] = 1.0;
          vertices.push_back(w);
        }
        for (std::size_t b = 0; b < e.size(); ++b) {
          if (e[a].m > 0 && e[b].m < 0) {
            std::vector<double> w(e.size(), 0.0);
            w[a] = -e[b].m;
            w[b] = e[a].m;
            vertices.push_back(w);
          }
        }
      }
      for (std::size_t a = 0; a < vertices.size() && count < kConfigs / 2; ++a) {
        for (std::size_t b = a; b < vertices.size() && count < kConfigs / 2; ++b) {
          for (int s = 0; s <= 10; ++s) {
            std::vector<double> w(e.size());
            for (std::size_t i = 0; i < e.size(); ++i) w[i] = (10 - s) * vertices[a][i] + s * vertices[b][i];
            consider(std::move(w));
          }
        }
      }
      // random: sparse and dense supports
      rng::Stream s(o.seed, 99, static_cast<std::uint64_t>(n));
      while (count < kConfigs) {
        std::vector<double> w(e.size(), 0.0);
        const int support = 1 + static_cast<int>(s.below(static_cast<std::uint32_t>(e.size())));
        for (int k = 0; k < support; ++k) w[s.below(static_cast<std::uint32_t>(e.size()))] += -std::log(s.uniform_pos());
        consider(std::move(w));
      }
      ok = ok && best <= target + 1e-9 && worst_r <= 1e-12;
      parts += "N=" + std::to_string(n) + ": best " + fmt("%.12f", best) + " vs hiding " + fmt("%.12f", target) +
               " (" + std::to_string(count) + " configs); ";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    d = parts + fmt("%.1f", secs) + " s";
    return ok && secs < 120.0;
  });
}

// 4 ---------------------------------------------------------------------------
inline Result semilocal_vs_oracle(const Options&) {
  return detail::timed(4, "semilocal closed form vs dense oracle", [](std::string& d) {
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    const std::vector<std::pair<int, int>> splits{{4, 2}, {6, 2}, {6, 4}, {8, 4}};
    for (auto [n, n0] : splits) {
      const SplitSpec split{n, n0};
      const quadrature::SphereQuadrature quad(2 * n + 4);
      const auto best = semilocal::optimize_guess(split);
      for (const auto& g : {best.guess, GuessFunction::constant(split.second_stage(), 0)}) {
        const double closed = semilocal::semilocal_delta(split, g);
        const double dense = oracle::dense_semilocal_delta(split, g, quad);
        worst = std::max(worst, std::abs(closed - dense));
      }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    d = "max |closed - dense| = " + fmt("%.2e", worst) + " (degree 2N+4), " + fmt("%.1f", secs) + " s";
    return worst <= 1e-6 && secs < 180.0;
  });
}

// 5 ---------------------------------------------------------------------------
inline Result asymptote(const Options&) {
  return detail::timed(5, "semilocal asymptote 1/4 + 1/(2N)", [](std::string& d) {
    double c = 0.0;
    double d400 = 0.0;
    for (int n : {50, 100, 200, 400}) {
      const auto r = semilocal::optimize_split(n);
      c = std::max(c, static_cast<double>(n) * n * std::abs(r.delta - semilocal::asymptotic_delta(n)));
      if (n == 400) d400 = r.delta;
    }
    d = "C = max N^2 |Delta_max - 1/4 - 1/(2N)| = " + fmt("%.4f", c) + ", Delta_max(400) = " + fmt("%.6f", d400);
    return std::isfinite(c) && c <= 10.0 && d400 >= 0.245 && d400 <= 0.255;
  });
}

// 6 ---------------------------------------------------------------------------
inline Result discrimination(const Options& o) {
  return detail::timed(6, "tag discrimination probability", [&o](std::string& d) {
    const SplitSpec big{400, 200};
    const auto e = semilocal::discrimination_success(big, semilocal::optimize_guess(big).guess, 100000, o.seed, o.threads);
    const SplitSpec small{4, 2};
    const auto g = semilocal::optimize_guess(small).guess;
    const auto s = semilocal::discrimination_success(small, g, 100000, o.seed, o.threads);
    const double exact = oracle::dense_exact_ps(small, g, quadrature::SphereQuadrature(12));
    const double z = std::abs(s.p_success - exact) / s.std_error;
    d = "p_S(400) = " + fmt("%.5f", e.p_success) + " +- " + fmt("%.5f", e.std_error) + "; N=4 MC " +
        fmt("%.5f", s.p_success) + " vs dense " + fmt("%.5f", exact) + " (" + fmt("%.2f", z) + " sigma)";
    return std::abs(e.p_success - 0.625) < 0.02 && z <= 3.0;
  });
}

// 7 ---------------------------------------------------------------------------
inline Result ppt_bound(const Options& o) {
  return detail::timed(7, "PPT bound on p_S", [&o](std::string& d) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<int> js{2, 4, 8, 16, 32, 64};
    const auto rows = commands::ppt_rows(js, 1e-10, o.threads);
    bool ok = true;
    double best = 0.0;
    std::string curve;
    for (const auto& r : rows) {
      const auto geo = pptbound::embedded_pair_projectors(r.big_j);
      ok = ok && r.status == "ok" && pptbound::ppt_feasible(geo, r.params, 1e-11) && r.p_success <= 0.881967;
      best = std::max(best, r.p_success);
      curve += std::to_string(r.big_j) + ":" + fmt("%.6f", r.p_success) + " ";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    d = "p_S*(J) " + curve + "max " + fmt("%.6f", best) + (best < 0.87 ? " BELOW 0.87" : "") + ", " +
        fmt("%.1f", secs) + " s";
    return ok && best >= 0.87 && secs < 300.0;
  });
}

// 8 ---------------------------------------------------------------------------
inline Result robustness(const Options&) {
  return detail::timed(8, "robustness under particle loss", [](std::string& d) {
    double worst_dense = 0.0;
    const double p8 = states::balanced_p(8);
    const auto rho = oracle::dense_hiding_state(8, p8, Eigen::Vector3d::UnitZ());
    for (int m : {1, 2, 4}) {
      std::vector<int> keep;
      for (int k = 0; k < 8 - m; ++k) keep.push_back(k);
      const double dense = oracle::dense_optimal_joint_delta(oracle::dense_partial_trace(rho, keep));
      const double comb = fidelity::optimal_joint_delta(states::trace_out({8, p8}, m));
      worst_dense = std::max(worst_dense, std::abs(dense - comb));
    }
    bool ok = worst_dense <= 1e-10;
    std::string parts;
    for (int n : {200, 400}) {
      for (double xi : {0.1, 0.5}) {
        const int m = static_cast<int>(std::lround(xi * n));
        const auto rows = commands::robustness_rows(n, {m}, commands::PMode::parse("balanced"));
        ok = ok && std::abs(rows[0].residual) <= 5.0 / n;
        parts += "N=" + std::to_string(n) + ",xi=" + fmt("%.1f", xi) + ": " + fmt("%+.2e", rows[0].residual) + " ";
      }
    }
    d = "N=8 dense max diff " + fmt("%.2e", worst_dense) + "; residuals " + parts;
    return ok;
  });
}

// 9 ---------------------------------------------------------------------------
inline Result figure1_ordering(const Options& o) {
  return detail::timed(9, "figure 1 ordering", [&o](std::string& d) {
    const auto t0 = std::chrono::steady_clock::now();
    commands::Figure1Options fo;
    fo.n_max = 24;
    fo.shots = 100000;
    fo.seed = o.seed;
    fo.threads = o.threads;
    const auto table = commands::curve_table(commands::figure1_rows(fo));
    const auto parsed = report::parse_csv(table.str());
    std::map<int, std::map<std::string, commands::CurveRow>> by_n;
    for (std::size_t i = 1; i < parsed.size(); ++i) {
      const auto& r = parsed[i];
      by_n[static_cast<int>(report::parse_number(r[1]))][r[0]] =
          commands::CurveRow{r[0], 0, r[2], report::parse_number(r[3]), report::parse_number(r[4]), 0, 0};
    }
    int violations = 0;
    for (const auto& [n, curves] : by_n) {
      const double joint = curves.at("joint").fidelity;
      for (const auto& [name, row] : curves) {
        if (name == "joint" || name == "single_copy") continue;
        if (!(joint > row.fidelity)) ++violations;
      }
      if (n >= 12) {
        const auto& semi = curves.at("semilocal");
        const auto& tomo = curves.at("tomography");
        if (!(semi.fidelity + 3 * semi.std_error < 2.0 / 3.0)) ++violations;
        if (!(tomo.fidelity + 3 * tomo.std_error < 2.0 / 3.0)) ++violations;
        if (tomo.fidelity - 3 * tomo.std_error > semi.fidelity + 3 * semi.std_error) ++violations;
      }
    }
    const bool ok = violations == 0;
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const auto& at24 = by_n.at(24);
    d = std::to_string(parsed.size() - 1) + " rows, " + std::to_string(violations) + " violations; N=24: joint " +
        fmt("%.4f", at24.at("joint").fidelity) + ", semilocal " + fmt("%.4f", at24.at("semilocal").fidelity) +
        ", tomography " + fmt("%.4f", at24.at("tomography").fidelity) + "; " + fmt("%.1f", secs) + " s";
    return ok && secs < 600.0;
  });
}

// 10 --------------------------------------------------------------------------
/// Text output of every randomized or parallel command under a thread count.
inline std::string determinism_fingerprint(int threads, std::uint64_t seed) {
  std::string out;
  commands::Figure1Options fo;
  fo.n_max = 8;
  fo.shots = 20000;
  fo.seed = seed;
  fo.threads = threads;
  fo.adaptive_restarts = 2;
  out += commands::curve_table(commands::figure1_rows(fo)).str();
  out += commands::curve_table(commands::montecarlo_rows(montecarlo::Protocol::semilocal, 4, 12, 20000, seed, threads)).str();
  out += commands::curve_table(commands::montecarlo_rows(montecarlo::Protocol::tomography, 6, 12, 20000, seed, threads)).str();
  out += commands::ppt_table(commands::ppt_rows({2, 4, 8}, 1e-10, threads)).str();
  out += commands::curve_table(commands::joint_rows(2, 40, commands::PMode::parse("balanced"))).str();
  out += commands::robustness_table(commands::robustness_rows(40, {0, 4, 20}, commands::PMode::parse("half"))).str();
  const auto e = semilocal::discrimination_success({40, 20}, semilocal::optimize_guess({40, 20}).guess, 30000, seed, threads);
  out += report::format_number(e.p_success) + "," + report::format_number(e.std_error) + "\n";
  return out;
}

inline Result determinism(const Options& o) {
  return detail::timed(10, "determinism across thread counts", [&o](std::string& d) {
    const std::string base = determinism_fingerprint(1, o.seed);
    bool ok = true;
    for (int t : {4, 16}) ok = ok && determinism_fingerprint(t, o.seed) == base;
    ok = ok && determinism_fingerprint(1, o.seed) == base;
    d = std::to_string(base.size()) + " bytes compared under 1, 4 and 16 threads";
    return ok;
  });
}

inline std::vector<std::function<Result(const Options&)>> all_checks() {
  return {joint_fidelity, single_copy,  hiding_optimality, semilocal_vs_oracle, asymptote,
          discrimination, ppt_bound,    robustness,        figure1_ordering,    determinism};
}

inline std::string format_line(const Result& r) {
  return std::string(r.passed ? "[PASS] " : "[FAIL] ") + std::to_string(r.id) + " " + r.name + ": " + r.detail +
         " (" + fmt("%.2f", r.seconds) + " s)";
}

/// Runs every check, printing one line each; returns true when all pass.
inline bool run_all(const Options& o, std::ostream& os) {
  bool ok = true;
  for (const auto& check : all_checks()) {
    const Result r = check(o);
    os << format_line(r) << std::endl;
    ok = ok && r.passed;
  }
  return ok;
}

}  // namespace dirhide::acceptance
