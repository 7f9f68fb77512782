// dirhide: command-line front end.
//
// Exit codes: 0 success, 1 usage error, 2 computation contract violation,
// 3 acceptance failure (selftest).

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dirhide/acceptance.hpp"
#include "dirhide/commands.hpp"
#include "dirhide/errors.hpp"
#include "dirhide/pptbound.hpp"
#include "dirhide/version.hpp"

namespace {

namespace fs = std::filesystem;
using namespace dirhide;
using json = nlohmann::ordered_json;

constexpr int kExitUsage = 1;
constexpr int kExitContract = 2;
constexpr int kExitAcceptance = 3;

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ResourceError("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw ResourceError("write failed for " + path.string());
}

/// Writes the table to `out` (or stdout) plus the JSON sidecar next to it.
void emit(const std::string& out, const std::string& text, const std::string& command, const json& config,
          const std::string& plot = {}) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  const fs::path path(out);
  write_file(path, text);
  fs::path side = path;
  side.replace_extension(".json");
  write_file(side, commands::sidecar(command, config).dump(2) + "\n");
  if (!plot.empty()) {
    fs::path gp = path;
    gp.replace_extension(".gp");
    write_file(gp, plot);
  }
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::string item;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == ',') {
      if (item.empty()) throw commands::UsageError("empty entry in list '" + s + "'");
      std::size_t used = 0;
      int v = 0;
      try {
        v = std::stoi(item, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != item.size()) throw commands::UsageError("not an integer: " + item);
      out.push_back(v);
      item.clear();
    } else {
      item += s[i];
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Direction-hiding state laboratory: fidelities, bounds and Monte Carlo curves"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  int n_min = 2, n_max = 40, threads = 1, n_spins = 200, discard = 0, restarts = 8;
  std::uint64_t shots = 100000, seed = 1;
  std::string p_mode = "balanced", out, m_list = "0,20,100", j_list = "2,4,8,16,32,64", protocol = "semilocal";
  double tol = 1e-10;

  const auto add_out = [&](CLI::App* c) {
    c->add_option("--out", out, "Output path (default: stdout); a .json sidecar is written next to it");
  };
  const auto add_threads = [&](CLI::App* c) {
    c->add_option("--threads", threads, "Worker threads (speed only, never changes results)")
        ->capture_default_str()
        ->check(CLI::Range(1, 1024));
  };

  auto* joint = app.add_subcommand("joint", "Optimal joint-measurement fidelity per N");
  joint->add_option("--n-min", n_min, "Smallest even N")->capture_default_str();
  joint->add_option("--n-max", n_max, "Largest even N")->capture_default_str();
  joint->add_option("--p-mode", p_mode, "balanced | half | fixed:<p>")->capture_default_str();
  add_out(joint);

  auto* fig = app.add_subcommand("figure1", "All fidelity curves at p = 1/2 (joint, adaptive, semilocal, tomography)");
  fig->add_option("--n-max", n_max, "Largest even N (>= 4)")->capture_default_str();
  fig->add_option("--shots", shots, "Monte Carlo shots per point")->capture_default_str();
  fig->add_option("--seed", seed, "Random seed")->capture_default_str();
  fig->add_option("--restarts", restarts, "Adaptive optimizer restarts")->capture_default_str();
  add_threads(fig);
  add_out(fig);

  auto* sim = app.add_subcommand("simulate", "Monte Carlo fidelity of one local protocol with N0 = N/2");
  sim->add_option("--protocol", protocol, "semilocal | tomography")->capture_default_str();
  sim->add_option("--n-min", n_min, "Smallest even N")->capture_default_str();
  sim->add_option("--n-max", n_max, "Largest even N")->capture_default_str();
  sim->add_option("--shots", shots, "Shots per point")->capture_default_str();
  sim->add_option("--seed", seed, "Random seed")->capture_default_str();
  add_threads(sim);
  add_out(sim);

  auto* rob = app.add_subcommand("robustness", "Exact fidelity after losing M spins vs the loss formula");
  rob->add_option("--n", n_spins, "Even number of spins")->capture_default_str();
  rob->add_option("--m", m_list, "Comma-separated numbers of discarded spins")->capture_default_str();
  rob->add_option("--p-mode", p_mode, "balanced | half | fixed:<p>")->capture_default_str();
  add_out(rob);

  auto* ppt = app.add_subcommand("ppt-bound", "Separability bound on the J / J-1 discrimination probability");
  ppt->add_option("--j", j_list, "Comma-separated even J values")->capture_default_str();
  ppt->add_option("--tol", tol, "Feasibility tolerance on partial-transpose eigenvalues")->capture_default_str();
  add_threads(ppt);
  add_out(ppt);

  auto* st = app.add_subcommand("state", "Block coefficients of the hiding state (JSON, keyed by 2j)");
  st->add_option("--n", n_spins, "Even number of spins")->capture_default_str();
  st->add_option("--p-mode", p_mode, "balanced | half | fixed:<p>")->capture_default_str();
  st->add_option("--discard", discard, "Spins traced out")->capture_default_str();
  add_out(st);

  auto* self = app.add_subcommand("selftest", "Run the acceptance suite");
  std::uint64_t selftest_seed = acceptance::Options{}.seed;
  self->add_option("--seed", selftest_seed, "Random seed")->capture_default_str();
  add_threads(self);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*joint) {
      const auto mode = commands::PMode::parse(p_mode);
      const auto table = commands::curve_table(commands::joint_rows(n_min, n_max, mode));
      emit(out, table.str(), "joint", json{{"n_min", n_min}, {"n_max", n_max}, {"p_mode", mode.str()}});
    } else if (*fig) {
      commands::Figure1Options o;
      o.n_max = n_max;
      o.shots = shots;
      o.seed = seed;
      o.threads = threads;
      o.adaptive_restarts = restarts;
      if (restarts < 1) throw commands::UsageError("restarts must be at least 1");
      const auto table = commands::curve_table(commands::figure1_rows(o));
      const std::string name = out.empty() ? std::string() : fs::path(out).filename().string();
      emit(out, table.str(), "figure1",
           json{{"n_max", n_max}, {"shots", shots}, {"seed", seed}, {"restarts", restarts}, {"p", 0.5}},
           commands::gnuplot_script(name));
    } else if (*sim) {
      montecarlo::Protocol p;
      if (protocol == "semilocal") p = montecarlo::Protocol::semilocal;
      else if (protocol == "tomography") p = montecarlo::Protocol::tomography;
      else throw commands::UsageError("protocol must be semilocal or tomography");
      const auto table = commands::curve_table(commands::montecarlo_rows(p, n_min, n_max, shots, seed, threads));
      emit(out, table.str(), "simulate",
           json{{"protocol", protocol}, {"n_min", n_min}, {"n_max", n_max}, {"shots", shots}, {"seed", seed}});
    } else if (*rob) {
      const auto mode = commands::PMode::parse(p_mode);
      const auto ms = parse_int_list(m_list);
      const auto table = commands::robustness_table(commands::robustness_rows(n_spins, ms, mode));
      emit(out, table.str(), "robustness", json{{"n", n_spins}, {"m", ms}, {"p_mode", mode.str()}});
    } else if (*ppt) {
      const auto js = parse_int_list(j_list);
      const auto rows = commands::ppt_rows(js, tol, threads);
      emit(out, commands::ppt_table(rows).str(), "ppt-bound", json{{"j", js}, {"tol", tol}});
      for (const auto& r : rows) {
        if (r.status != "ok") return kExitContract;
      }
    } else if (*st) {
      const auto mode = commands::PMode::parse(p_mode);
      if (n_spins < 2 || n_spins % 2 != 0) throw commands::UsageError("--n must be even and >= 2");
      if (discard < 0 || discard > n_spins - 2) throw commands::UsageError("--discard must lie in [0, N-2]");
      const states::HidingSpec spec{n_spins, mode.at(n_spins)};
      auto doc = commands::state_json(states::trace_out(spec, discard));
      doc["p"] = spec.p;
      doc["discarded"] = discard;
      emit(out, doc.dump(2) + "\n", "state", json{{"n", n_spins}, {"p_mode", mode.str()}, {"discard", discard}});
    } else if (*self) {
      acceptance::Options o;
      o.threads = threads;
      o.seed = selftest_seed;
      return acceptance::run_all(o, std::cout) ? 0 : kExitAcceptance;
    }
  } catch (const commands::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitContract;
  }
  return 0;
}
