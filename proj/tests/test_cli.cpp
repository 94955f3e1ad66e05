#include "support.hpp"

#include "cli.hpp"
#include "fixtures.hpp"

#include "ahmc/check.hpp"
#include "ahmc/mdp_io.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace ahmc;
using namespace ahmc::test;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = runCli(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path scratchDir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("ahmc-cli-" + std::to_string(getpid())) / name;
  std::filesystem::create_directories(dir);
  return dir;
}

std::string writeText(const std::filesystem::path& path, const std::string& text) {
  std::ofstream(path) << text;
  return path.string();
}

std::set<std::string> atoms(const Node& node) {
  std::set<std::string> out;
  if (node.kind == NodeKind::Atom) out.insert(node.ap);
  for (const auto& child : node.children) out.merge(atoms(*child));
  return out;
}

}  // namespace

TEST(Fixtures, ClosedFormCounts) {
  const auto ce01 = buildCE(0, 1);
  EXPECT_EQ(ce01.mdp.numStates(), 7u);
  EXPECT_EQ(ce01.mdp.numTransitions(), 9u);
  const auto ce02 = buildCE(0, 2);
  EXPECT_EQ(ce02.mdp.numStates(), 9u);
  EXPECT_EQ(ce02.mdp.numTransitions(), 12u);
  // Each extra loop iteration of the larger secret adds two states and three transitions.
  const auto ce03 = buildCE(0, 3);
  EXPECT_EQ(ce03.mdp.numStates(), 11u);
  EXPECT_EQ(ce03.mdp.numTransitions(), 15u);
}

TEST(Fixtures, ReconstructedModelsAreCloseToReference) {
  const auto tl = buildTL(1);
  EXPECT_EQ(tl.mdp.numStates(), tl.targetStates);
  EXPECT_LE(tl.mdp.numTransitions(), tl.targetTransitions);
  const auto acdb = buildACDB();
  EXPECT_GE(acdb.mdp.numStates(), acdb.targetStates);
  EXPECT_LE(acdb.mdp.numStates(), 2 * acdb.targetStates);
}

TEST(Fixtures, AreValidAndDeterministic) {
  for (const auto& fixture : {buildCE(0, 1), buildCE(1, 3), buildTL(1), buildTL(2), buildACDB()}) {
    EXPECT_TRUE(validateMdp(fixture.mdp).empty()) << fixture.name;
    const HyperFormula f = parseFormula(fixture.formula);
    EXPECT_TRUE(isExistentialFragment(f)) << fixture.name;
    EXPECT_EQ(f.states.size(), 2u);
    for (const auto& ap : atoms(*f.body)) EXPECT_TRUE(fixture.mdp.aps().count(ap)) << fixture.name << " " << ap;
  }
  EXPECT_EQ(writeMdp(buildACDB().mdp), writeMdp(buildACDB().mdp));
  EXPECT_EQ(writeMdp(buildTL(2).mdp), writeMdp(buildTL(2).mdp));
}

TEST(Fixtures, WrittenFilesRoundTrip) {
  const auto dir = scratchDir("fixture");
  const auto fixture = buildCE(0, 2);
  writeFixture(fixture, dir);
  const Mdp back = loadMdp(dir / "model.mdp");
  EXPECT_EQ(writeMdp(back), writeMdp(fixture.mdp));
  std::ifstream in(dir / "formula.txt");
  std::stringstream text;
  text << in.rdbuf();
  EXPECT_TRUE(structurallyEqual(parseFormula(text.str()), parseFormula(fixture.formula)));
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(cli({}).code, 3);
  EXPECT_EQ(cli({"frobnicate"}).code, 3);
  EXPECT_EQ(cli({"check", "--formula", "x"}).code, 3);
  EXPECT_EQ(cli({"check", "--model", "/nonexistent.mdp", "--formula", "x"}).code, 3);
  EXPECT_EQ(cli({"--help"}).code, 0);
}

TEST(Cli, ValidateReportsBrokenModels) {
  const auto dir = scratchDir("validate");
  const auto good = writeText(dir / "good.mdp", writeMdp(exampleMdp()));
  EXPECT_EQ(cli({"validate", "--model", good}).code, 0);
  const auto bad = writeText(dir / "bad.mdp",
                             "mdp\nstate s0\nstate s1\naction s0 go : s1 1/2\naction s1 go : s1 1\n");
  const CliRun r = cli({"validate", "--model", bad});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.out.find("s0"), std::string::npos) << r.out;
}

TEST(Cli, OracleRoute) {
  const auto dir = scratchDir("oracle");
  const auto model = writeText(dir / "example.mdp", writeMdp(exampleMdp()));
  const std::string one = "exists sched x . exists state s(x) . exists stutter t(s) . ";
  CliRun r = cli({"check", "--model", model, "--formula", one + "P(F goal(t)) = 1 & !goal(t)", "--oracle", "--policy",
               "deterministic", "--memory", "2"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("result: holds"), std::string::npos) << r.out;
  // Grid search cannot refute an existential claim.
  r = cli({"check", "--model", model, "--formula", one + "P(F goal(t)) = 2", "--oracle", "--policy", "grid"});
  EXPECT_EQ(r.code, 2) << r.out;
  EXPECT_EQ(cli({"check", "--model", model, "--formula", one + "a(t)", "--oracle", "--smt"}).code, 3);
}

TEST(Cli, SmtRouteAgreesWithOracleOnSingleActionModel) {
  AHMC_REQUIRE_SOLVER();
  const auto dir = scratchDir("smt");
  Mdp mdp;
  mdp.declareAp("a");
  const auto u = mdp.addState("u", {"a"});
  const auto v = mdp.addState("v");
  const auto go = mdp.addAction("go");
  mdp.addChoice(u, go, {{u, Rational(1, 2)}, {v, Rational(1, 2)}});
  mdp.addChoice(v, go, {{v, Rational(1)}});
  const auto model = writeText(dir / "toy.mdp", writeMdp(mdp));
  const std::string prefix = "exists sched x . exists state s(x) . exists stutter t(s) . ";
  for (const std::string body : {"P(X a(t)) = 1/2", "P(X a(t)) = 1/3", "P(G a(t)) = 0 & a(t)"}) {
    const std::string formula = writeText(dir / "f.txt", prefix + body);
    const CliRun oracle = cli({"check", "--model", model, "--formula", formula, "--oracle", "--memory", "2"});
    const CliRun smt = cli({"check", "--model", model, "--formula", formula, "--memory", "2", "--solver", testSolver(),
                         "--stats", "--witness", "--dump-smt", (dir / "dump.smt2").string()});
    EXPECT_EQ(oracle.code, smt.code) << body << "\n" << oracle.out << smt.out << smt.err;
    EXPECT_NE(smt.out.find("variables="), std::string::npos);
    EXPECT_TRUE(std::filesystem::exists(dir / "dump.smt2"));
  }
}

TEST(Cli, FixtureCommand) {
  const auto dir = scratchDir("fixture-cmd");
  CliRun r = cli({"fixture", "CE", "0", "1", "--out", dir.string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(std::filesystem::exists(dir / "model.mdp"));
  EXPECT_EQ(cli({"validate", "--model", (dir / "model.mdp").string()}).code, 0);
  EXPECT_EQ(cli({"fixture", "CE", "--out", dir.string()}).code, 3);
  EXPECT_EQ(cli({"fixture", "XYZ", "--out", dir.string()}).code, 3);
}
