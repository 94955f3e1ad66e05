#include "ahmc/check.hpp"

#include <chrono>
#include <fstream>

namespace ahmc {

bool needsDualization(const HyperFormula& formula) {
  if (isExistentialFragment(formula)) return false;
  if (isUniversalFragment(formula)) return true;
  throw UnsupportedFragment(
      "scheduler and stutter quantifiers must be all existential or all universal; "
      "alternation between them is not supported");
}

CheckReport checkFormula(const Mdp& mdp, const HyperFormula& formula, const CheckOptions& options) {
  const bool dualized = needsDualization(formula);
  const HyperFormula target = dualized ? negatePrefix(formula) : formula;

  const auto started = std::chrono::steady_clock::now();
  const ConstraintSystem system = encode(mdp, target, options.memory, options.encode);
  CheckReport report;
  report.metrics = system.metrics;
  report.encodeSeconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  if (options.dumpSmt) {
    std::ofstream out(*options.dumpSmt);
    out << system.toSmtLib();
    if (!out) throw std::runtime_error("cannot write " + options.dumpSmt->string());
  }

  const SolverResult result = runSolver(system, options.solver);
  report.solverStats = result.stats;
  report.solveSeconds = result.stats.wallSeconds;
  report.outcome = reportVerdict(formula, result, dualized);
  return report;
}

}  // namespace ahmc
