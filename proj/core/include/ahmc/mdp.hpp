#pragma once

#include "ahmc/rational.hpp"

#include <cstddef>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace ahmc {

using StateIndex = std::size_t;
using ActionIndex = std::size_t;

/// Sorted list of action indices; the key under which a memoryless,
/// action-set-uniform scheduler stores its distribution.
using ActionSet = std::vector<ActionIndex>;

class ModelError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct Edge {
  StateIndex target;
  Rational probability;
};

/// Finite MDP with string-named states, actions and atomic propositions.
/// Ids keep their declaration order; every lookup by name is O(1).
class Mdp {
public:
  StateIndex addState(const std::string& id, const std::vector<std::string>& labels = {});
  ActionIndex addAction(const std::string& id);
  void declareAp(const std::string& ap);

  /// Declares (state, action) as a choice with the given distribution.
  /// Duplicate declarations of the same (state, action) throw ModelError.
  void addChoice(StateIndex state, ActionIndex action, std::vector<Edge> distribution);

  std::size_t numStates() const { return stateIds_.size(); }
  std::size_t numActions() const { return actionIds_.size(); }
  std::size_t numTransitions() const;

  const std::string& stateId(StateIndex s) const { return stateIds_.at(s); }
  const std::string& actionId(ActionIndex a) const { return actionIds_.at(a); }
  StateIndex stateIndex(const std::string& id) const;
  ActionIndex actionIndex(const std::string& id) const;
  bool hasState(const std::string& id) const { return stateLookup_.count(id) != 0; }
  bool hasAction(const std::string& id) const { return actionLookup_.count(id) != 0; }

  const std::set<std::string>& aps() const { return aps_; }
  const std::set<std::string>& labels(StateIndex s) const { return labels_.at(s); }
  bool hasLabel(StateIndex s, const std::string& ap) const { return labels_.at(s).count(ap) != 0; }

  /// All declared choices of a state in declaration order, including
  /// malformed ones (rows not summing to one); see validateMdp.
  const std::map<ActionIndex, std::vector<Edge>>& choices(StateIndex s) const { return choices_.at(s); }

  /// P(s, a, s'); zero when undeclared.
  Rational probability(StateIndex s, ActionIndex a, StateIndex target) const;
  Rational rowSum(StateIndex s, ActionIndex a) const;

  /// Actions whose outgoing distribution sums to exactly one, by index order.
  ActionSet enabledActions(StateIndex s) const;

  /// Distinct enabled-action sets in order of first occurrence over states.
  std::vector<ActionSet> occurringActionSets() const;

private:
  std::vector<std::string> stateIds_;
  std::unordered_map<std::string, StateIndex> stateLookup_;
  std::vector<std::string> actionIds_;
  std::unordered_map<std::string, ActionIndex> actionLookup_;
  std::set<std::string> aps_;
  std::vector<std::set<std::string>> labels_;
  std::vector<std::map<ActionIndex, std::vector<Edge>>> choices_;
};

struct Violation {
  enum class Kind { NoEnabledAction, NotStochastic, UndeclaredAp, BadProbability, UnknownState };
  Kind kind;
  std::string state;
  std::string action;
  std::string message;
};

/// Empty iff every MDP invariant holds.
std::vector<Violation> validateMdp(const Mdp& mdp);

std::string describe(const Violation& violation);

/// Memoryless scheduler whose decisions depend only on the enabled-action set.
class MemorylessScheduler {
public:
  void set(const ActionSet& actions, std::map<ActionIndex, Rational> distribution);
  bool covers(const ActionSet& actions) const { return dist_.count(actions) != 0; }
  const std::map<ActionIndex, Rational>& distribution(const ActionSet& actions) const;
  Rational probability(const ActionSet& actions, ActionIndex action) const;
  const std::map<ActionSet, std::map<ActionIndex, Rational>>& entries() const { return dist_; }

  /// The unique scheduler of an MDP whose states each enable one action.
  static MemorylessScheduler trivial(const Mdp& mdp);
  /// Uniform distribution over every occurring action set.
  static MemorylessScheduler uniform(const Mdp& mdp);

private:
  std::map<ActionSet, std::map<ActionIndex, Rational>> dist_;
};

/// m-bounded counting stutter-scheduler: stutters j(s, a) < m times in s
/// before executing a. Unset durations are zero.
class CountingStutterScheduler {
public:
  explicit CountingStutterScheduler(std::size_t memory = 1);

  std::size_t memory() const { return memory_; }
  void set(StateIndex s, ActionIndex a, std::size_t duration);
  std::size_t duration(StateIndex s, ActionIndex a) const;
  const std::map<std::pair<StateIndex, ActionIndex>, std::size_t>& durations() const { return durations_; }

private:
  std::size_t memory_;
  std::map<std::pair<StateIndex, ActionIndex>, std::size_t> durations_;
};

}  // namespace ahmc
