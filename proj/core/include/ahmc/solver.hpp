#pragma once

#include "ahmc/encoder.hpp"
#include "ahmc/formula.hpp"
#include "ahmc/mdp.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace ahmc {

enum class Verdict { Sat, Unsat, Unknown, Timeout };

std::string toString(Verdict verdict);

class SolverError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Scheduler and stutter durations read back from a model.
struct Witness {
  std::map<std::pair<ActionSet, ActionIndex>, Rational> schedulerProbs;
  /// (experiment (1-based), state, action) -> duration
  std::map<std::tuple<std::size_t, StateIndex, ActionIndex>, std::size_t> stutterDurations;
  std::size_t memory = 1;
  /// Some scheduler value was algebraic and replaced by a decimal
  /// approximation (then renormalised per action set).
  bool approximate = false;

  MemorylessScheduler scheduler() const;
  std::vector<CountingStutterScheduler> stutterers(std::size_t experiments) const;
};

struct SolverConfig {
  /// Executable plus arguments, split on whitespace. Empty means
  /// $AHMC_SOLVER, else `z3`.
  std::string command;
  /// Seconds; 0 disables the limit.
  double timeoutSeconds = 0;
  /// Extra variables whose values are returned in SolverResult::values.
  std::vector<std::string> queries;
};

std::string defaultSolverCommand();

struct SolverStats {
  double wallSeconds = 0;
  std::size_t variables = 0;
  std::size_t assertions = 0;
};

struct SolverResult {
  Verdict verdict = Verdict::Unknown;
  std::optional<Witness> witness;  // only for Sat
  std::map<std::string, Rational> values;  // SolverConfig::queries, only for Sat
  SolverStats stats;
  std::string output;  // raw solver output
};

/// Script sent to the solver: the system, (check-sat), and get-value
/// queries for every sigma and tau variable plus `queries`.
std::string solverScript(const ConstraintSystem& system, const std::vector<std::string>& queries);

/// Parses a solver reply to solverScript. Exposed for testing.
SolverResult parseSolverOutput(const ConstraintSystem& system, const std::vector<std::string>& queries,
                               const std::string& output);

/// Runs the solver on a temporary file. A timeout kills the solver's whole
/// process group and yields Verdict::Timeout. Throws SolverError when the
/// solver cannot be started or its output is malformed.
SolverResult runSolver(const ConstraintSystem& system, const SolverConfig& config = {});

struct ScriptRun {
  std::string output;
  bool timedOut = false;
  double wallSeconds = 0;
};

/// Runs the solver on an arbitrary script, e.g. a system without
/// (check-sat) to check that it parses.
ScriptRun runSolverScript(const std::string& script, const SolverConfig& config = {});

/// Problems with a decoded witness (sum of each distribution within 1e-9 of
/// one, durations below the memory bound). Empty when valid.
std::vector<std::string> validateWitness(const Witness& witness);

enum class Outcome { Holds, Fails, Unknown };

std::string toString(Outcome outcome);

struct CheckOutcome {
  Outcome outcome = Outcome::Unknown;
  Verdict verdict = Verdict::Unknown;
  bool dualized = false;
  /// For a satisfied existential prefix the witness; for a dualized
  /// universal prefix a counterexample.
  std::optional<Witness> witness;
  bool counterexample = false;
};

CheckOutcome reportVerdict(const HyperFormula& formula, const SolverResult& result, bool dualized);

/// 0 holds, 1 fails, 2 unknown or timeout.
int exitCode(Outcome outcome);

}  // namespace ahmc
