#pragma once

#include "ahmc/dtmc.hpp"
#include "ahmc/formula.hpp"
#include "ahmc/mdp.hpp"

#include <optional>
#include <stdexcept>
#include <vector>

namespace ahmc {

using StateSet = std::vector<bool>;

/// One-step mass from `from` into `phi`.
Rational nextProbability(const Dtmc& chain, StateIndex from, const StateSet& phi);

/// Exact Pr(phi1 U phi2) for every state: states in phi2 get 1, states that
/// cannot reach phi2 through phi1 get 0, the rest solve a linear system.
std::vector<Rational> untilProbabilities(const Dtmc& chain, const StateSet& phi1, const StateSet& phi2);

Rational untilProbability(const Dtmc& chain, StateIndex from, const StateSet& phi1, const StateSet& phi2);

/// A concrete choice for every quantifier: the scheduler, one MDP state per
/// state quantifier and one stutter-scheduler per stutter quantifier.
struct Instantiation {
  MemorylessScheduler scheduler;
  std::vector<StateIndex> startStates;
  std::vector<CountingStutterScheduler> stutterers;
};

struct EvalOptions {
  /// When set, probability expressions closer than this compare as equal.
  std::optional<Rational> tolerance;
};

/// Truth of an atom-indexed body (see indexAtoms) at the composed start
/// state ((s_{k_1},0), ..., (s_{k_n},0)). Sugar is evaluated directly, so
/// desugaring is optional.
bool evalBody(const Mdp& mdp, const Instantiation& inst, const ExperimentMap& map, const Node& body,
              const EvalOptions& options = {});

/// Convenience overload that indexes the formula's body first.
bool evalBody(const Mdp& mdp, const Instantiation& inst, const HyperFormula& formula,
              const EvalOptions& options = {});

/// Evaluates the state quantifiers of `formula` over all of S for a fixed
/// scheduler and fixed stutter-schedulers. This is what a solver witness
/// has to satisfy, since stutter durations are not chosen per state.
bool evalStatePrefix(const Mdp& mdp, const HyperFormula& formula, const MemorylessScheduler& scheduler,
                     const std::vector<CountingStutterScheduler>& stutterers, const EvalOptions& options = {});

enum class SchedulerPolicy {
  SingleAction,   // every state enables exactly one action; exact
  Deterministic,  // point distributions per action set
  Grid,           // distributions on a rational grid
};

class EnumerationLimit : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct EnumerationOptions {
  SchedulerPolicy policy = SchedulerPolicy::SingleAction;
  Rational gridStep{1, 4};
  /// Refuse when (|S|·m)^n exceeds this.
  std::size_t stateSpaceCap = 100000;
  /// Refuse when the number of leaf evaluations could exceed this.
  std::size_t evaluationCap = 5000000;
  EvalOptions eval;
};

struct EnumerationResult {
  bool value = false;
  /// False when the scheduler domain was a strict subset and the verdict
  /// could only be established by a witness that was not found.
  bool conclusive = true;
  std::size_t evaluations = 0;
  /// For an existential scheduler quantifier: a scheduler that made the
  /// formula true.
  std::optional<MemorylessScheduler> witness;
};

/// Brute-force evaluation of the whole quantifier prefix. Stutter
/// quantifiers range over all m-bounded counting stutter-schedulers
/// (durations only matter on states reachable from the experiment's start).
EnumerationResult checkByEnumeration(const Mdp& mdp, const HyperFormula& formula, std::size_t memory,
                                     const EnumerationOptions& options = {});

/// Schedulers of the given policy, in a fixed order.
std::vector<MemorylessScheduler> enumerateSchedulers(const Mdp& mdp, SchedulerPolicy policy,
                                                     const Rational& gridStep = Rational(1, 4));

}  // namespace ahmc
