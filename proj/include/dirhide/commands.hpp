#pragma once

// Command implementations shared by the CLI and the acceptance suite. Every
// command returns its table; writing files is left to the caller.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dirhide/errors.hpp"
#include "dirhide/fidelity.hpp"
#include "dirhide/montecarlo.hpp"
#include "dirhide/parallel.hpp"
#include "dirhide/pptbound.hpp"
#include "dirhide/report.hpp"
#include "dirhide/semilocal.hpp"
#include "dirhide/states.hpp"
#include "dirhide/version.hpp"

namespace dirhide::commands {

using report::format_number;

/// Bad command-line input (exit code 1).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Purity rule: balanced (N-2)/(2N-2), half (1/2), or fixed:<value>.
class PMode {
 public:
  static PMode parse(const std::string& s) {
    if (s == "balanced") return PMode(Kind::balanced, 0.0);
    if (s == "half") return PMode(Kind::half, 0.5);
    if (s.rfind("fixed:", 0) == 0) {
      double v = 0.0;
      try {
        v = report::parse_number(s.substr(6));
      } catch (const DomainError&) {
        throw UsageError("bad p-mode value: " + s);
      }
      if (!(v >= 0.0 && v <= 1.0)) throw UsageError("fixed p must lie in [0, 1]");
      return PMode(Kind::fixed, v);
    }
    throw UsageError("p-mode must be balanced, half or fixed:<value>");
  }

  double at(int n_spins) const {
    switch (kind_) {
      case Kind::balanced: return states::balanced_p(n_spins);
      case Kind::half: return 0.5;
      case Kind::fixed: return value_;
    }
    return value_;
  }

  std::string str() const {
    switch (kind_) {
      case Kind::balanced: return "balanced";
      case Kind::half: return "half";
      case Kind::fixed: return "fixed:" + format_number(value_);
    }
    return "";
  }

 private:
  enum class Kind { balanced, half, fixed };
  PMode(Kind k, double v) : kind_(k), value_(v) {}
  Kind kind_;
  double value_;
};

struct CurveRow {
  std::string protocol;
  int n_spins = 0;
  std::string parameter;
  double fidelity = 0.0;
  double std_error = 0.0;
  std::uint64_t shots = 0;
  std::uint64_t seed = 0;
};

inline report::CsvTable curve_table(const std::vector<CurveRow>& rows) {
  report::CsvTable t({"protocol", "N", "parameter", "fidelity", "stderr", "shots", "seed"});
  for (const auto& r : rows) {
    t.add_row({r.protocol, format_number(r.n_spins), r.parameter, format_number(r.fidelity),
               format_number(r.std_error), format_number(r.shots), format_number(r.seed)});
  }
  return t;
}

inline std::vector<CurveRow> curve_rows(const report::CsvTable& t) {
  std::vector<CurveRow> out;
  for (const auto& r : t.rows()) {
    out.push_back({r[0], static_cast<int>(report::parse_number(r[1])), r[2], report::parse_number(r[3]),
                   report::parse_number(r[4]), static_cast<std::uint64_t>(report::parse_number(r[5])),
                   static_cast<std::uint64_t>(report::parse_number(r[6]))});
  }
  return out;
}

inline void check_even_range(int n_min, int n_max, int lowest) {
  if (n_min < lowest || n_max < n_min || n_min % 2 != 0 || n_max % 2 != 0) {
    throw UsageError("need even N range with " + std::to_string(lowest) + " <= n-min <= n-max");
  }
}

// ---------------------------------------------------------------------------

inline std::vector<CurveRow> joint_rows(int n_min, int n_max, const PMode& mode) {
  check_even_range(n_min, n_max, 2);
  std::vector<CurveRow> rows;
  for (int n = n_min; n <= n_max; n += 2) {
    const double p = mode.at(n);
    rows.push_back({"joint", n, "p=" + format_number(p),
                    fidelity::fidelity_from_delta(fidelity::joint_delta_closed(n, p)), 0.0, 0, 0});
  }
  return rows;
}

struct Figure1Options {
  int n_max = 24;
  std::uint64_t shots = 100000;
  std::uint64_t seed = 1;
  int threads = 1;
  int adaptive_restarts = 8;
  int adaptive_max = 4;
};

inline constexpr double kSingleCopyFidelity = 2.0 / 3.0;

/// Curves (a) joint, (b) adaptive, (c) semilocal, (d) tomography, plus the
/// single-copy reference, all at p = 1/2.
inline std::vector<CurveRow> figure1_rows(const Figure1Options& o) {
  if (o.n_max < 4 || o.n_max % 2 != 0) throw UsageError("figure1 needs an even n-max >= 4");
  if (o.shots < 1) throw UsageError("shots must be at least 1");
  const std::string half = "p=0.5";
  std::vector<CurveRow> rows;
  for (int n = 4; n <= o.n_max; n += 2) {
    rows.push_back({"joint", n, half, fidelity::fidelity_from_delta(fidelity::joint_delta_closed(n, 0.5)), 0.0, 0, 0});
    if (n <= o.adaptive_max) {
      const auto a = montecarlo::optimize_adaptive(n, o.adaptive_restarts, o.seed, 0.5);
      rows.push_back({"adaptive", n, "restarts=" + std::to_string(o.adaptive_restarts) + "," + half, a.fidelity,
                      0.0, 0, o.seed});
    }
    const auto s = semilocal::optimize_split(n);
    rows.push_back({"semilocal", n, "N0=" + std::to_string(s.first_stage) + ",f=" + s.guess.str() + "," + half,
                    fidelity::fidelity_from_delta(s.delta), 0.0, 0, 0});
    if (n / 2 >= 3) {
      montecarlo::RunConfig c{n, n / 2, o.shots, o.seed, montecarlo::Protocol::tomography, o.threads};
      const auto e = montecarlo::simulate_tomography(c);
      rows.push_back({"tomography", n, "N0=" + std::to_string(n / 2) + "," + half, e.fidelity, e.std_error,
                      o.shots, o.seed});
    }
    rows.push_back({"single_copy", n, "N=1", kSingleCopyFidelity, 0.0, 0, 0});
  }
  return rows;
}

/// Monte Carlo rows for one protocol over an N range.
inline std::vector<CurveRow> montecarlo_rows(montecarlo::Protocol protocol, int n_min, int n_max,
                                             std::uint64_t shots, std::uint64_t seed, int threads) {
  check_even_range(n_min, n_max, protocol == montecarlo::Protocol::tomography ? 6 : 4);
  if (shots < 1) throw UsageError("shots must be at least 1");
  std::vector<CurveRow> rows;
  for (int n = n_min; n <= n_max; n += 2) {
    montecarlo::RunConfig c{n, n / 2, shots, seed, protocol, threads};
    const auto e = montecarlo::simulate(c);
    rows.push_back({montecarlo::protocol_name(protocol), n,
                    "N0=" + std::to_string(n / 2) + ",p_s=" + format_number(e.p_success), e.fidelity,
                    e.std_error, shots, seed});
  }
  return rows;
}

// ---------------------------------------------------------------------------

struct RobustnessRow {
  int n_spins = 0;
  int discarded = 0;
  double xi = 0.0;
  double p = 0.0;
  double fidelity_exact = 0.0;
  double fidelity_formula = 0.0;
  double residual = 0.0;
};

/// 1 - xi/2 - (1 - xi)/(N - M).
inline double robustness_formula(int n_spins, int discarded) {
  const double xi = static_cast<double>(discarded) / n_spins;
  return 1.0 - xi / 2.0 - (1.0 - xi) / (n_spins - discarded);
}

inline std::vector<RobustnessRow> robustness_rows(int n_spins, const std::vector<int>& discards, const PMode& mode) {
  if (n_spins < 2 || n_spins % 2 != 0) throw UsageError("robustness needs an even N >= 2");
  std::vector<RobustnessRow> rows;
  for (int m : discards) {
    if (m < 0 || m > n_spins - 2) throw UsageError("M must satisfy 0 <= M <= N-2");
    const double p = mode.at(n_spins);
    const auto reduced = states::trace_out(states::HidingSpec{n_spins, p}, m);
    const double exact = fidelity::fidelity_from_delta(fidelity::optimal_joint_delta(reduced));
    const double formula = robustness_formula(n_spins, m);
    rows.push_back({n_spins, m, static_cast<double>(m) / n_spins, p, exact, formula, exact - formula});
  }
  return rows;
}

inline report::CsvTable robustness_table(const std::vector<RobustnessRow>& rows) {
  report::CsvTable t({"N", "M", "xi", "p", "fidelity_exact", "fidelity_formula", "residual"});
  for (const auto& r : rows) {
    t.add_row({format_number(r.n_spins), format_number(r.discarded), format_number(r.xi), format_number(r.p),
               format_number(r.fidelity_exact), format_number(r.fidelity_formula), format_number(r.residual)});
  }
  return t;
}

// ---------------------------------------------------------------------------

struct PptRow {
  int big_j = 0;
  pptbound::PairParams params;
  double p_success = 0.0;
  double bound_gap = 0.0;
  std::string status = "ok";
};

inline std::vector<PptRow> ppt_rows(const std::vector<int>& j_list, double tol, int threads) {
  for (int j : j_list) {
    if (j < 2 || j % 2 != 0) throw UsageError("J values must be even and >= 2");
  }
  if (!(tol > 0.0)) throw UsageError("tol must be positive");
  auto chunks = parallel::map_chunks(j_list.size(), 1, threads, [&](std::uint64_t b, std::uint64_t) {
    PptRow row;
    row.big_j = j_list[b];
    try {
      const auto r = pptbound::maximize_ps(row.big_j, tol);
      row.params = r.params;
      row.p_success = r.p_success;
    } catch (const pptbound::SolverError& e) {
      row.params = e.best_feasible();
      row.p_success = pptbound::success_probability(row.params);
      row.status = std::string("solver_error: ") + e.what();
    }
    row.bound_gap = pptbound::kAsymptoticBound - row.p_success;
    return row;
  });
  return chunks;
}

inline report::CsvTable ppt_table(const std::vector<PptRow>& rows) {
  report::CsvTable t({"J", "a", "b", "c", "p_s", "bound_gap", "status"});
  for (const auto& r : rows) {
    t.add_row({format_number(r.big_j), format_number(r.params.a), format_number(r.params.b),
               format_number(r.params.c), format_number(r.p_success), format_number(r.bound_gap), r.status});
  }
  return t;
}

// ---------------------------------------------------------------------------

/// Block map keyed by "2j", arrays ordered m = -j..j.
inline nlohmann::ordered_json state_json(const states::DiagonalBlockState& s) {
  nlohmann::ordered_json blocks = nlohmann::ordered_json::object();
  for (auto it = s.blocks().rbegin(); it != s.blocks().rend(); ++it) {
    blocks[std::to_string(it->first.twice())] = it->second;
  }
  nlohmann::ordered_json out;
  out["N"] = s.spins();
  out["blocks"] = blocks;
  return out;
}

inline nlohmann::ordered_json sidecar(const std::string& command, const nlohmann::ordered_json& config) {
  nlohmann::ordered_json out;
  out["command"] = command;
  out["version"] = kVersion;
  out["config"] = config;
  return out;
}

/// gnuplot script plotting a curve CSV written next to it.
inline std::string gnuplot_script(const std::string& csv_name) {
  std::string s;
  s += "# gnuplot script for " + csv_name + "\n";
  s += "set datafile separator ','\n";
  s += "set key bottom right\n";
  s += "set xlabel 'N'\n";
  s += "set ylabel 'F'\n";
  s += "set yrange [0.5:1]\n";
  s += "file = '" + csv_name + "'\n";
  s += "sel(name) = sprintf(\"< awk -F, '$1==\\\"%s\\\"' %s\", name, file)\n";
  s += "plot sel('joint') using 2:4 with lines lw 2 title '(a) joint', \\\n";
  s += "     sel('adaptive') using 2:4 with points pt 9 ps 1.5 title '(b) adaptive', \\\n";
  s += "     sel('semilocal') using 2:4 with lines dt 2 title '(c) semilocal', \\\n";
  s += "     sel('tomography') using 2:4:5 with yerrorlines dt 3 title '(d) tomography', \\\n";
  s += "     sel('single_copy') using 2:4 with lines lc rgb 'gray' title 'single copy'\n";
  return s;
}

}  // namespace dirhide::commands
