#pragma once

#include "ahmc/mdp.hpp"

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace ahmc {

/// Explicit DTMC with sparse rows. States are dense indices; `names` is for
/// diagnostics only.
struct Dtmc {
  std::vector<std::string> names;
  std::set<std::string> aps;
  std::vector<std::set<std::string>> labels;
  std::vector<std::vector<Edge>> rows;

  std::size_t size() const { return names.size(); }
  StateIndex addState(std::string name, std::set<std::string> stateLabels);
  /// Adds mass to (from, to), merging with an existing entry.
  void addTransition(StateIndex from, StateIndex to, const Rational& probability);
  Rational probability(StateIndex from, StateIndex to) const;
  Rational rowSum(StateIndex s) const;
  std::size_t numTransitions() const;
};

/// A state (s, j) of an induced DTMC: MDP state plus stutter counter.
struct ModeState {
  StateIndex state;
  std::size_t mode;
  auto operator<=>(const ModeState&) const = default;
};

/// One pair per experiment.
using ComposedState = std::vector<ModeState>;

struct InducedDtmc {
  Dtmc chain;
  std::size_t memory = 1;
  std::vector<ModeState> modes;        // modes[i] is the (s, j) of chain state i
  std::map<ModeState, StateIndex> index;

  StateIndex at(StateIndex s, std::size_t j) const;
};

struct InduceOptions {
  /// Keep only states reachable from some (s, 0).
  bool pruneUnreachable = false;
};

/// DTMC induced by a memoryless scheduler and a counting stutter-scheduler.
/// From (s, j), action a is drawn from the scheduler; it stutters to
/// (s, j+1) when j < j(s, a) and proceeds to (s', 0) otherwise.
InducedDtmc induceDtmc(const Mdp& mdp, const MemorylessScheduler& scheduler,
                       const CountingStutterScheduler& stutter, const InduceOptions& options = {});

/// Product DTMC; `components[i]` lists the component state of every factor.
struct ProductDtmc {
  Dtmc chain;
  std::vector<std::vector<StateIndex>> components;
  std::map<std::vector<StateIndex>, StateIndex> index;
};

/// Full cartesian product in row-major order; propositions are indexed
/// per factor as `a_1`, `a_2`, ...
ProductDtmc compose(std::span<const Dtmc> factors);

/// Product restricted to the states reachable from `start`.
ProductDtmc composeReachable(std::span<const Dtmc> factors, const std::vector<StateIndex>& start);

/// `a_i`: proposition `a` observed in experiment i (1-based).
std::string indexedAp(const std::string& ap, std::size_t experiment);

/// Successors of (s, j) under `action` for some counting stutter-scheduler
/// with memory m: the stutter successor (s, j+1) if j < m-1, plus every
/// (s', 0) with positive probability.
std::vector<ModeState> succPlus(const Mdp& mdp, StateIndex s, std::size_t j, ActionIndex action,
                                std::size_t memory);

}  // namespace ahmc
