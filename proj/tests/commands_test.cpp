#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "dirhide/commands.hpp"

namespace {

namespace cmd = dirhide::commands;
namespace fs = std::filesystem;
using dirhide::report::parse_csv;
using dirhide::report::parse_number;

struct RunResult {
  int code = -1;
  std::string out;
};

RunResult run_cli(const std::string& args) {
  const std::string command = std::string(DIRHIDE_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(command.c_str(), "r");
  RunResult r;
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "dirhide_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

TEST(Csv, RoundTrip) {
  dirhide::report::CsvTable t({"a", "b"});
  t.add_row({"1", "x,\"y\""});
  t.add_row({dirhide::report::format_number(0.1), "plain"});
  const auto rows = parse_csv(t.str());
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[1][1], "x,\"y\"");
  EXPECT_EQ(parse_number(rows[2][0]), 0.1);
  EXPECT_THROW(t.add_row({"1"}), dirhide::ContractError);
  EXPECT_THROW(parse_number("1.5x"), dirhide::DomainError);
}

TEST(PMode, Parsing) {
  EXPECT_NEAR(cmd::PMode::parse("balanced").at(4), 1.0 / 3.0, 1e-15);
  EXPECT_EQ(cmd::PMode::parse("half").at(10), 0.5);
  EXPECT_EQ(cmd::PMode::parse("fixed:0.25").at(10), 0.25);
  EXPECT_THROW(cmd::PMode::parse("fixed:2"), cmd::UsageError);
  EXPECT_THROW(cmd::PMode::parse("other"), cmd::UsageError);
}

TEST(JointRows, FourSpins) {
  const auto rows = cmd::joint_rows(4, 4, cmd::PMode::parse("balanced"));
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_NEAR(rows[0].fidelity, 7.0 / 9.0, 1e-15);
}

TEST(Robustness, FormulaAndResidual) {
  EXPECT_NEAR(cmd::robustness_formula(200, 20), 1.0 - 0.05 - 0.9 / 180.0, 1e-15);
  const auto rows = cmd::robustness_rows(200, {0, 20, 100}, cmd::PMode::parse("balanced"));
  for (const auto& r : rows) EXPECT_LE(std::abs(r.fidelity_exact - r.fidelity_formula), 5.0 / 200.0);
}

TEST(Cli, JointCsv) {
  const auto r = run_cli("joint --n-min 4 --n-max 6");
  ASSERT_EQ(r.code, 0);
  const auto rows = parse_csv(r.out);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0][0], "protocol");
  EXPECT_NEAR(parse_number(rows[1][3]), 7.0 / 9.0, 1e-15);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run_cli("joint --n-min 3").code, 1);
  EXPECT_EQ(run_cli("nonsense").code, 1);
  EXPECT_EQ(run_cli("state --n 5").code, 1);
  EXPECT_EQ(run_cli("ppt-bound --j 3").code, 1);
  EXPECT_EQ(run_cli("simulate --protocol magic").code, 1);
  EXPECT_EQ(run_cli("--version").code, 0);
}

TEST(Cli, SidecarAndRerun) {
  const auto out = scratch("sim.csv");
  const std::string args = "simulate --n-min 4 --n-max 8 --shots 5000 --seed 3 --out " + out.string();
  ASSERT_EQ(run_cli(args).code, 0);
  const std::string first = slurp(out);
  const auto side = nlohmann::json::parse(slurp(fs::path(out).replace_extension(".json")));
  EXPECT_EQ(side["command"], "simulate");
  EXPECT_EQ(side["config"]["seed"], 3);
  ASSERT_EQ(run_cli(args + " --threads 4").code, 0);
  EXPECT_EQ(slurp(out), first);
}

TEST(Cli, StateJson) {
  const auto r = run_cli("state --n 4 --p-mode balanced");
  ASSERT_EQ(r.code, 0);
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_NEAR(doc["blocks"]["4"][4].get<double>(), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(doc["blocks"]["2"][0].get<double>(), 2.0 / 9.0, 1e-15);
}

TEST(Cli, PptBoundSingleJ) {
  const auto r = run_cli("ppt-bound --j 2");
  ASSERT_EQ(r.code, 0);
  const auto rows = parse_csv(r.out);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_NEAR(parse_number(rows[1][4]), 0.867544467, 1e-6);
  EXPECT_EQ(rows[1].back(), "ok");
}

}  // namespace
