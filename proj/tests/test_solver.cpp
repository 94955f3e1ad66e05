#include "support.hpp"

#include "ahmc/check.hpp"
#include "ahmc/encoder.hpp"
#include "ahmc/oracle.hpp"
#include "ahmc/solver.hpp"

#include <gtest/gtest.h>

#include <chrono>
#include <filesystem>
#include <fstream>

#include <signal.h>
#include <sys/stat.h>

using namespace ahmc;
using namespace ahmc::test;

namespace {

const std::string kOne = "exists sched x . exists state s(x) . exists stutter t(s) . ";

ConstraintSystem exampleSystem() { return encode(exampleMdp(), parseFormula(kOne + "a(t)"), 2); }

// A model reply in the two value-list shape the solver script asks for.
std::string reply(const ConstraintSystem& sys, const std::map<std::string, std::string>& exact,
                  const std::map<std::string, std::string>& decimal = {}) {
  auto list = [&](const std::map<std::string, std::string>& override) {
    std::string out = "(";
    for (const auto& v : sys.sigmaVars) {
      auto it = override.find(v.name);
      out += "(" + v.name + " " + (it != override.end() ? it->second : (v.action == 0 ? "1.0" : "0.0")) + ")\n";
    }
    for (const auto& v : sys.tauVars) {
      auto it = override.find(v.name);
      out += "(" + v.name + " " + (it != override.end() ? it->second : "0.0") + ")\n";
    }
    return out + ")\n";
  };
  return "sat\n" + list(exact) + list(decimal.empty() ? exact : decimal);
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("ahmc-test-" + std::to_string(getpid()));
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::filesystem::path writeScript(const std::string& name, const std::string& body) {
  const auto path = scratch(name);
  std::ofstream(path) << "#!/bin/sh\n" << body;
  chmod(path.c_str(), 0755);
  return path;
}

bool running(long pid) {
  std::ifstream stat("/proc/" + std::to_string(pid) + "/stat");
  if (!stat) return false;
  std::string line;
  std::getline(stat, line);
  const auto close = line.rfind(')');
  return close != std::string::npos && close + 2 < line.size() && line[close + 2] != 'Z';
}

}  // namespace

TEST(ParseOutput, ExactFractions) {
  const ConstraintSystem sys = exampleSystem();
  const auto r = parseSolverOutput(
      sys, {}, reply(sys, {{"sigma_A0_a0", "(/ 1.0 3.0)"}, {"sigma_A0_a1", "(/ 2.0 3.0)"}, {"tau_1_s0_a1", "1.0"}}));
  ASSERT_EQ(r.verdict, Verdict::Sat);
  ASSERT_TRUE(r.witness.has_value());
  EXPECT_FALSE(r.witness->approximate);
  const MemorylessScheduler sched = r.witness->scheduler();
  EXPECT_EQ(sched.probability({0, 1}, 0), Rational(1, 3));
  EXPECT_EQ(sched.probability({0, 1}, 1), Rational(2, 3));
  const auto stutter = r.witness->stutterers(1);
  EXPECT_EQ(stutter[0].duration(0, 1), 1u);
  EXPECT_EQ(stutter[0].duration(0, 0), 0u);
}

TEST(ParseOutput, NegativeAndIntegerForms) {
  const ConstraintSystem sys = exampleSystem();
  const auto r = parseSolverOutput(
      sys, {}, reply(sys, {{"sigma_A0_a0", "(- 1.0 (/ 1.0 4.0))"}, {"sigma_A0_a1", "(/ 1 4)"}}));
  ASSERT_EQ(r.verdict, Verdict::Sat);
  EXPECT_EQ(r.witness->scheduler().probability({0, 1}, 0), Rational(3, 4));
}

TEST(ParseOutput, AlgebraicValuesFallBackToDecimals) {
  const ConstraintSystem sys = exampleSystem();
  const std::string root = "(root-obj (+ (^ x 2) (- 2)) 1)";
  const auto r = parseSolverOutput(sys, {},
                                   reply(sys, {{"sigma_A0_a0", root}, {"sigma_A0_a1", "(- 1.0 " + root + ")"}},
                                         {{"sigma_A0_a0", "0.7071067811865475244008443621048490392848?"},
                                          {"sigma_A0_a1", "0.2928932188134524755991556378951509607152?"}}));
  ASSERT_TRUE(r.witness.has_value());
  EXPECT_TRUE(r.witness->approximate);
  const Rational p = r.witness->scheduler().probability({0, 1}, 0);
  EXPECT_NEAR(p.get_d(), 0.70710678118654752, 1e-15);
  EXPECT_EQ(p + r.witness->scheduler().probability({0, 1}, 1), 1);
}

TEST(ParseOutput, VerdictsWithoutModel) {
  const ConstraintSystem sys = exampleSystem();
  EXPECT_EQ(parseSolverOutput(sys, {}, "unsat\n(error \"model is not available\")\n").verdict, Verdict::Unsat);
  EXPECT_EQ(parseSolverOutput(sys, {}, "unknown\n").verdict, Verdict::Unknown);
  EXPECT_FALSE(parseSolverOutput(sys, {}, "unsat\n").witness.has_value());
}

TEST(ParseOutput, RejectsBrokenReplies) {
  const ConstraintSystem sys = exampleSystem();
  EXPECT_THROW(parseSolverOutput(sys, {}, ""), SolverError);
  EXPECT_THROW(parseSolverOutput(sys, {}, "(error \"line 3: unknown constant\")\n"), SolverError);
  EXPECT_THROW(parseSolverOutput(sys, {}, "maybe\n"), SolverError);
  EXPECT_THROW(parseSolverOutput(sys, {}, "sat\n"), SolverError);
  EXPECT_THROW(parseSolverOutput(sys, {}, "sat\n((sigma_A0_a0 1.0)\n"), SolverError);
  // Durations must be integral and below the memory bound.
  EXPECT_THROW(parseSolverOutput(sys, {}, reply(sys, {{"tau_1_s0_a0", "2.0"}})), SolverError);
  EXPECT_THROW(parseSolverOutput(sys, {}, reply(sys, {{"tau_1_s0_a0", "(/ 1.0 2.0)"}})), SolverError);
  // Distributions must sum to one.
  EXPECT_THROW(parseSolverOutput(sys, {}, reply(sys, {{"sigma_A0_a1", "1.0"}})), SolverError);
}

TEST(ValidateWitness, ToleranceIsOneNanoth) {
  Witness w;
  w.memory = 2;
  w.schedulerProbs[{{0, 1}, 0}] = Rational(1, 2);
  w.schedulerProbs[{{0, 1}, 1}] = Rational(1, 2) + Rational(1, 2000000000);
  EXPECT_TRUE(validateWitness(w).empty());
  w.schedulerProbs[{{0, 1}, 1}] = Rational(1, 2) + Rational(1, 100000000);
  EXPECT_EQ(validateWitness(w).size(), 1u);
  w.schedulerProbs[{{0, 1}, 1}] = Rational(1, 2);
  w.stutterDurations[{1, 0, 0}] = 2;
  EXPECT_EQ(validateWitness(w).size(), 1u);
}

TEST(ReportVerdict, ExistentialAndDualized) {
  const HyperFormula f = parseFormula(kOne + "a(t)");
  SolverResult sat;
  sat.verdict = Verdict::Sat;
  sat.witness = Witness{};
  SolverResult unsat;
  unsat.verdict = Verdict::Unsat;
  SolverResult timeout;
  timeout.verdict = Verdict::Timeout;

  EXPECT_EQ(reportVerdict(f, sat, false).outcome, Outcome::Holds);
  EXPECT_FALSE(reportVerdict(f, sat, false).counterexample);
  EXPECT_EQ(reportVerdict(f, unsat, false).outcome, Outcome::Fails);
  EXPECT_EQ(reportVerdict(f, sat, true).outcome, Outcome::Fails);
  EXPECT_TRUE(reportVerdict(f, sat, true).counterexample);
  EXPECT_TRUE(reportVerdict(f, sat, true).witness.has_value());
  EXPECT_EQ(reportVerdict(f, unsat, true).outcome, Outcome::Holds);
  EXPECT_EQ(reportVerdict(f, timeout, false).outcome, Outcome::Unknown);
  EXPECT_EQ(exitCode(Outcome::Holds), 0);
  EXPECT_EQ(exitCode(Outcome::Fails), 1);
  EXPECT_EQ(exitCode(Outcome::Unknown), 2);
}

TEST(Dualization, OnlyPurePrefixes) {
  EXPECT_FALSE(needsDualization(parseFormula(kOne + "a(t)")));
  EXPECT_TRUE(needsDualization(parseFormula("forall sched x . exists state s(x) . forall stutter t(s) . a(t)")));
  EXPECT_THROW(needsDualization(parseFormula("forall sched x . exists state s(x) . exists stutter t(s) . a(t)")),
               UnsupportedFragment);
}

TEST(RunSolver, MissingExecutableIsAnError) {
  SolverConfig config;
  config.command = "/nonexistent/ahmc-no-such-solver";
  EXPECT_THROW(runSolver(exampleSystem(), config), SolverError);
}

TEST(RunSolver, FakeSolverReplyIsParsed) {
  const ConstraintSystem sys = exampleSystem();
  const auto canned = scratch("canned.txt");
  std::ofstream(canned) << reply(sys, {});
  SolverConfig config;
  config.command = writeScript("canned.sh", "cat " + canned.string() + "\n").string();
  const SolverResult r = runSolver(sys, config);
  EXPECT_EQ(r.verdict, Verdict::Sat);
  ASSERT_TRUE(r.witness.has_value());
  EXPECT_EQ(r.witness->scheduler().probability({0, 1}, 0), 1);
}

TEST(RunSolver, TimeoutKillsTheWholeProcessGroup) {
  const auto pids = scratch("pids.txt");
  std::filesystem::remove(pids);
  SolverConfig config;
  config.command = writeScript("slow.sh", "sleep 30 &\necho $! >> " + pids.string() + "\nsleep 30\n").string();
  config.timeoutSeconds = 0.05;
  const ConstraintSystem sys = exampleSystem();
  const auto started = std::chrono::steady_clock::now();
  for (int i = 0; i < 100; ++i) EXPECT_EQ(runSolver(sys, config).verdict, Verdict::Timeout);
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count(), 60.0);

  std::ifstream in(pids);
  std::size_t seen = 0;
  for (long pid; in >> pid; ++seen) EXPECT_FALSE(running(pid)) << "orphaned child " << pid;
  EXPECT_GT(seen, 0u);
}

TEST(RunSolver, Z3DecidesTrivialSystems) {
  AHMC_REQUIRE_SOLVER();
  SolverConfig config;
  config.command = testSolver();
  ConstraintSystem sys = exampleSystem();
  EXPECT_EQ(runSolver(sys, config).verdict, Verdict::Sat);
  sys.assertTerm("false");
  EXPECT_EQ(runSolver(sys, config).verdict, Verdict::Unsat);
  const ScriptRun parsed = runSolverScript(exampleSystem().toSmtLib(false), config);
  EXPECT_EQ(parsed.output.find("(error"), std::string::npos) << parsed.output;
}

TEST(Check, ExampleEndToEnd) {
  AHMC_REQUIRE_SOLVER();
  CheckOptions options;
  options.memory = 2;
  options.solver.command = testSolver();
  options.solver.timeoutSeconds = 120;
  const Mdp mdp = exampleMdp();
  // Some scheduler reaches goal from s0 with probability exactly 1/2.
  const auto holds = checkFormula(mdp, parseFormula(kOne + "!goal(t) & P(F goal(t)) = 1/2"), options);
  EXPECT_EQ(holds.outcome.outcome, Outcome::Holds);
  ASSERT_TRUE(holds.outcome.witness.has_value());
  EXPECT_TRUE(evalStatePrefix(mdp, parseFormula(kOne + "!goal(t) & P(F goal(t)) = 1/2"),
                              holds.outcome.witness->scheduler(), holds.outcome.witness->stutterers(1), {Rational(1, 1000000000)}));
  const auto fails = checkFormula(mdp, parseFormula(kOne + "a(t) & P(X goal(t)) > 0"), options);
  EXPECT_EQ(fails.outcome.outcome, Outcome::Fails);
  // Universal prefix: every scheduler keeps s2 away from goal.
  const auto universal = checkFormula(
      mdp, parseFormula("forall sched x . forall state s(x) . forall stutter t(s) . goal(t) | P(F goal(t)) < 1 | !a(t)"),
      options);
  EXPECT_TRUE(universal.outcome.dualized);
  EXPECT_EQ(universal.outcome.outcome, Outcome::Holds);
}
