#include "cli.hpp"

#include "fixtures.hpp"

#include "ahmc/check.hpp"
#include "ahmc/mdp_io.hpp"
#include "ahmc/oracle.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iomanip>
#include <ostream>

namespace ahmc {

namespace {

constexpr int kUsageError = 3;

struct CheckArgs {
  std::string model;
  std::string formula;
  std::size_t memory = 1;
  bool oracle = false;
  bool smt = false;
  std::string solver;
  double timeout = 0;
  std::string dumpSmt;
  bool noOpt = false;
  bool stats = false;
  bool witness = false;
  std::string policy;
  std::string gridStep = "1/4";
};

struct FixtureArgs {
  std::string name;
  std::vector<std::size_t> params;
  std::string out;
  bool onlyFirst = false;
};

std::string formulaText(const std::string& arg) {
  std::error_code ec;
  if (std::filesystem::is_regular_file(arg, ec)) return readTextFile(arg);
  return arg;
}

void printWitness(std::ostream& out, const Mdp& mdp, const Witness& w, bool counterexample) {
  out << (counterexample ? "counterexample" : "witness") << (w.approximate ? " (approximate)" : "") << ":\n";
  std::map<ActionSet, std::vector<std::pair<ActionIndex, Rational>>> dists;
  for (const auto& [key, p] : w.schedulerProbs) dists[key.first].push_back({key.second, p});
  for (const auto& [set, dist] : dists) {
    out << "  scheduler {";
    for (std::size_t i = 0; i < set.size(); ++i) out << (i ? ", " : "") << mdp.actionId(set[i]);
    out << "}:";
    for (const auto& [a, p] : dist) out << ' ' << mdp.actionId(a) << '=' << toString(p);
    out << '\n';
  }
  for (const auto& [key, d] : w.stutterDurations) {
    const auto& [i, s, a] = key;
    if (d != 0) out << "  stutter t" << i << ' ' << mdp.stateId(s) << ' ' << mdp.actionId(a) << " = " << d << '\n';
  }
}

int runCheck(const CheckArgs& args, std::ostream& out) {
  const Mdp mdp = loadMdp(args.model);
  const HyperFormula formula = parseFormula(formulaText(args.formula));
  if (args.memory == 0) throw CLI::ValidationError("--memory", "must be at least 1");

  if (args.oracle) {
    EnumerationOptions options;
    bool singleAction = true;
    for (StateIndex s = 0; s < mdp.numStates(); ++s) singleAction = singleAction && mdp.enabledActions(s).size() == 1;
    if (args.policy.empty()) {
      options.policy = singleAction ? SchedulerPolicy::SingleAction : SchedulerPolicy::Deterministic;
    } else if (args.policy == "single") {
      options.policy = SchedulerPolicy::SingleAction;
    } else if (args.policy == "deterministic") {
      options.policy = SchedulerPolicy::Deterministic;
    } else if (args.policy == "grid") {
      options.policy = SchedulerPolicy::Grid;
      options.gridStep = parseRational(args.gridStep);
    } else {
      throw CLI::ValidationError("--policy", "expected single, deterministic or grid");
    }
    const EnumerationResult r = checkByEnumeration(mdp, formula, args.memory, options);
    const Outcome outcome = !r.conclusive ? Outcome::Unknown : r.value ? Outcome::Holds : Outcome::Fails;
    out << "result: " << toString(outcome) << " (oracle, " << (r.value ? "true" : "false")
        << (r.conclusive ? "" : ", inconclusive") << ")\n";
    if (args.stats) {
      out << "states=" << mdp.numStates() << '\n'
          << "transitions=" << mdp.numTransitions() << '\n'
          << "memory=" << args.memory << '\n'
          << "experiments=" << formula.stutters.size() << '\n'
          << "evaluations=" << r.evaluations << '\n';
    }
    return exitCode(outcome);
  }

  CheckOptions options;
  options.memory = args.memory;
  options.encode.relevantOpt = !args.noOpt;
  options.solver.command = args.solver;
  options.solver.timeoutSeconds = args.timeout;
  if (!args.dumpSmt.empty()) options.dumpSmt = args.dumpSmt;
  const CheckReport report = checkFormula(mdp, formula, options);
  const CheckOutcome& o = report.outcome;

  out << "result: " << toString(o.outcome) << " (" << toString(o.verdict) << (o.dualized ? ", dualized" : "")
      << ")\n";
  if (args.witness && o.witness) printWitness(out, mdp, *o.witness, o.counterexample);
  if (args.stats) {
    std::size_t holds = 0;
    for (const auto& [id, count] : report.metrics.holdsPerSubformula) holds += count;
    auto kind = [&](VarKind k) {
      auto it = report.metrics.perKind.find(k);
      return it == report.metrics.perKind.end() ? std::size_t{0} : it->second;
    };
    out << std::fixed << std::setprecision(3)
        << "states=" << mdp.numStates() << '\n'
        << "transitions=" << mdp.numTransitions() << '\n'
        << "memory=" << args.memory << '\n'
        << "experiments=" << formula.stutters.size() << '\n'
        << "variables=" << report.metrics.variables << '\n'
        << "assertions=" << report.metrics.assertions << '\n'
        << "subformulas=" << report.metrics.subformulas << '\n'
        << "holds_variables=" << holds << '\n'
        << "prob_variables=" << kind(VarKind::Prob) << '\n'
        << "encode_seconds=" << report.encodeSeconds << '\n'
        << "solve_seconds=" << report.solveSeconds << '\n'
        << "verdict=" << toString(o.verdict) << '\n';
  }
  return exitCode(o.outcome);
}

int runFixture(const FixtureArgs& args, std::ostream& out, std::ostream& err) {
  CaseStudyFixture fixture;
  if (args.name == "CE") {
    if (args.params.size() != 2) throw CLI::ValidationError("CE", "expects two secrets, e.g. `fixture CE 0 1`");
    fixture = buildCE(args.params[0], args.params[1]);
  } else if (args.name == "TL") {
    if (args.params.size() > 1) throw CLI::ValidationError("TL", "expects at most one key length");
    fixture = buildTL(args.params.empty() ? 1 : args.params[0], args.onlyFirst);
  } else if (args.name == "ACDB") {
    if (!args.params.empty()) throw CLI::ValidationError("ACDB", "takes no parameters");
    fixture = buildACDB();
  } else {
    throw CLI::ValidationError("fixture", "unknown fixture '" + args.name + "' (expected CE, TL or ACDB)");
  }
  writeFixture(fixture, args.out);
  out << "wrote " << (std::filesystem::path(args.out) / "model.mdp").string() << " and "
      << (std::filesystem::path(args.out) / "formula.txt").string() << '\n';
  out << "states=" << fixture.mdp.numStates() << " transitions=" << fixture.mdp.numTransitions() << '\n';
  if (fixture.targetStates != 0 &&
      (fixture.mdp.numStates() != fixture.targetStates || fixture.mdp.numTransitions() != fixture.targetTransitions))
    err << "warning: " << fixture.name << " has " << fixture.mdp.numStates() << " states / "
        << fixture.mdp.numTransitions() << " transitions; the reference model has " << fixture.targetStates
        << " / " << fixture.targetTransitions << '\n';
  return 0;
}

int runValidate(const std::string& path, std::ostream& out) {
  const Mdp mdp = loadMdp(path, false);
  const auto violations = validateMdp(mdp);
  for (const auto& v : violations) out << describe(v) << '\n';
  if (violations.empty()) {
    out << "ok: " << mdp.numStates() << " states, " << mdp.numTransitions() << " transitions\n";
    return 0;
  }
  return 1;
}

}  // namespace

int runCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Model checker for asynchronous probabilistic hyperproperties on MDPs", "ahmc"};
  app.require_subcommand(1);

  CheckArgs check;
  auto* checkCmd = app.add_subcommand("check", "Check a formula on a model");
  checkCmd->add_option("--model", check.model, "Model file")->required();
  checkCmd->add_option("--formula", check.formula, "Formula file or formula text")->required();
  checkCmd->add_option("--memory", check.memory, "Memory bound m of the stutter-schedulers")->default_val(1);
  auto* oracleFlag = checkCmd->add_flag("--oracle", check.oracle, "Decide by explicit enumeration");
  auto* smtFlag = checkCmd->add_flag("--smt", check.smt, "Decide with the SMT encoding (default)");
  oracleFlag->excludes(smtFlag);
  checkCmd->add_option("--solver", check.solver, "Solver command (default: $AHMC_SOLVER or z3)");
  checkCmd->add_option("--timeout", check.timeout, "Solver timeout in seconds (0: none)");
  checkCmd->add_option("--dump-smt", check.dumpSmt, "Write the SMT-LIB system to this file");
  checkCmd->add_flag("--no-opt", check.noOpt, "Index every subformula by all experiments");
  checkCmd->add_flag("--stats", check.stats, "Print key=value statistics");
  checkCmd->add_flag("--witness", check.witness, "Print the scheduler and stutter durations found");
  checkCmd->add_option("--policy", check.policy, "Oracle scheduler domain: single, deterministic or grid");
  checkCmd->add_option("--grid-step", check.gridStep, "Oracle grid step 1/N")->default_val("1/4");

  FixtureArgs fixture;
  auto* fixtureCmd = app.add_subcommand("fixture", "Write a case-study model and formula");
  fixtureCmd->add_option("name", fixture.name, "CE, TL or ACDB")->required();
  fixtureCmd->add_option("params", fixture.params, "CE: h1 h2; TL: k");
  fixtureCmd->add_option("--out", fixture.out, "Output directory")->required();
  fixtureCmd->add_flag("--only-first", fixture.onlyFirst, "TL: keep only the j=0 conjunct");

  std::string validateModel;
  auto* validateCmd = app.add_subcommand("validate", "Check a model for well-formedness");
  validateCmd->add_option("--model", validateModel, "Model file")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }

  try {
    if (*checkCmd) return runCheck(check, out);
    if (*fixtureCmd) return runFixture(fixture, out, err);
    if (*validateCmd) return runValidate(validateModel, out);
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const WellFormednessError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const UnsupportedFragment& e) {
    err << "error: unsupported formula: " << e.what() << '\n';
    return kUsageError;
  } catch (const ModelError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const EnumerationLimit& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const SolverError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }
  return kUsageError;
}

}  // namespace ahmc
