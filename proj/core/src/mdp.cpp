#include "ahmc/mdp.hpp"

#include <algorithm>

namespace ahmc {

StateIndex Mdp::addState(const std::string& id, const std::vector<std::string>& labels) {
  if (stateLookup_.count(id)) throw ModelError("duplicate state '" + id + "'");
  const StateIndex index = stateIds_.size();
  stateIds_.push_back(id);
  stateLookup_.emplace(id, index);
  labels_.emplace_back(labels.begin(), labels.end());
  for (const auto& ap : labels) aps_.insert(ap);
  choices_.emplace_back();
  return index;
}

ActionIndex Mdp::addAction(const std::string& id) {
  if (auto it = actionLookup_.find(id); it != actionLookup_.end()) return it->second;
  const ActionIndex index = actionIds_.size();
  actionIds_.push_back(id);
  actionLookup_.emplace(id, index);
  return index;
}

void Mdp::declareAp(const std::string& ap) { aps_.insert(ap); }

void Mdp::addChoice(StateIndex state, ActionIndex action, std::vector<Edge> distribution) {
  if (state >= numStates()) throw ModelError("state index out of range");
  if (action >= numActions()) throw ModelError("action index out of range");
  auto& row = choices_[state];
  if (row.count(action))
    throw ModelError("duplicate action '" + actionIds_[action] + "' in state '" + stateIds_[state] + "'");
  for (auto& e : distribution) e.probability.canonicalize();
  // Merge repeated successors.
  std::vector<Edge> merged;
  for (auto& edge : distribution) {
    if (edge.target >= numStates()) throw ModelError("successor index out of range");
    auto it = std::find_if(merged.begin(), merged.end(), [&](const Edge& e) { return e.target == edge.target; });
    if (it == merged.end())
      merged.push_back(std::move(edge));
    else
      it->probability += edge.probability;
  }
  row.emplace(action, std::move(merged));
}

std::size_t Mdp::numTransitions() const {
  std::size_t count = 0;
  for (const auto& row : choices_)
    for (const auto& [action, edges] : row)
      for (const auto& edge : edges)
        if (edge.probability > 0) ++count;
  return count;
}

StateIndex Mdp::stateIndex(const std::string& id) const {
  auto it = stateLookup_.find(id);
  if (it == stateLookup_.end()) throw ModelError("unknown state '" + id + "'");
  return it->second;
}

ActionIndex Mdp::actionIndex(const std::string& id) const {
  auto it = actionLookup_.find(id);
  if (it == actionLookup_.end()) throw ModelError("unknown action '" + id + "'");
  return it->second;
}

Rational Mdp::probability(StateIndex s, ActionIndex a, StateIndex target) const {
  const auto& row = choices_.at(s);
  auto it = row.find(a);
  if (it == row.end()) return 0;
  for (const auto& edge : it->second)
    if (edge.target == target) return edge.probability;
  return 0;
}

Rational Mdp::rowSum(StateIndex s, ActionIndex a) const {
  const auto& row = choices_.at(s);
  auto it = row.find(a);
  Rational sum = 0;
  if (it != row.end())
    for (const auto& edge : it->second) sum += edge.probability;
  return sum;
}

ActionSet Mdp::enabledActions(StateIndex s) const {
  if (s >= numStates()) throw ModelError("unknown state index " + std::to_string(s));
  ActionSet enabled;
  for (const auto& [action, edges] : choices_[s])
    if (rowSum(s, action) == 1) enabled.push_back(action);
  return enabled;
}

std::vector<ActionSet> Mdp::occurringActionSets() const {
  std::vector<ActionSet> sets;
  for (StateIndex s = 0; s < numStates(); ++s) {
    ActionSet enabled = enabledActions(s);
    if (enabled.empty()) continue;
    if (std::find(sets.begin(), sets.end(), enabled) == sets.end()) sets.push_back(std::move(enabled));
  }
  return sets;
}

std::vector<Violation> validateMdp(const Mdp& mdp) {
  std::vector<Violation> violations;
  for (StateIndex s = 0; s < mdp.numStates(); ++s) {
    const std::string& state = mdp.stateId(s);
    for (const auto& ap : mdp.labels(s))
      if (!mdp.aps().count(ap))
        violations.push_back({Violation::Kind::UndeclaredAp, state, "", "label '" + ap + "' is not a declared proposition"});

    bool anyEnabled = false;
    for (const auto& [action, edges] : mdp.choices(s)) {
      bool inRange = true;
      for (const auto& edge : edges)
        if (edge.probability < 0 || edge.probability > 1) inRange = false;
      if (!inRange) {
        violations.push_back({Violation::Kind::BadProbability, state, mdp.actionId(action),
                              "probability outside [0,1]"});
        continue;
      }
      const Rational sum = mdp.rowSum(s, action);
      if (sum == 1) {
        anyEnabled = true;
      } else if (sum != 0) {
        violations.push_back({Violation::Kind::NotStochastic, state, mdp.actionId(action),
                              "outgoing probabilities sum to " + toString(sum) + ", expected 1"});
      }
    }
    if (!anyEnabled)
      violations.push_back({Violation::Kind::NoEnabledAction, state, "", "state has no enabled action"});
  }
  return violations;
}

std::string describe(const Violation& violation) {
  std::string where = "state '" + violation.state + "'";
  if (!violation.action.empty()) where += ", action '" + violation.action + "'";
  return where + ": " + violation.message;
}

void MemorylessScheduler::set(const ActionSet& actions, std::map<ActionIndex, Rational> distribution) {
  if (actions.empty()) throw ModelError("scheduler key must be a non-empty action set");
  Rational sum = 0;
  for (auto& [action, p] : distribution) {
    p.canonicalize();
    if (p < 0 || p > 1) throw ModelError("scheduler probability outside [0,1]");
    if (p > 0 && !std::binary_search(actions.begin(), actions.end(), action))
      throw ModelError("scheduler assigns probability to an action outside its action set");
    sum += p;
  }
  if (sum != 1) throw ModelError("scheduler distribution sums to " + toString(sum) + ", expected 1");
  dist_[actions] = std::move(distribution);
}

const std::map<ActionIndex, Rational>& MemorylessScheduler::distribution(const ActionSet& actions) const {
  auto it = dist_.find(actions);
  if (it == dist_.end()) throw ModelError("scheduler does not cover an enabled action set");
  return it->second;
}

Rational MemorylessScheduler::probability(const ActionSet& actions, ActionIndex action) const {
  const auto& dist = distribution(actions);
  auto it = dist.find(action);
  return it == dist.end() ? Rational(0) : it->second;
}

MemorylessScheduler MemorylessScheduler::trivial(const Mdp& mdp) {
  MemorylessScheduler scheduler;
  for (const auto& set : mdp.occurringActionSets()) {
    if (set.size() != 1) throw ModelError("model has a state with more than one enabled action");
    scheduler.set(set, {{set.front(), Rational(1)}});
  }
  return scheduler;
}

MemorylessScheduler MemorylessScheduler::uniform(const Mdp& mdp) {
  MemorylessScheduler scheduler;
  for (const auto& set : mdp.occurringActionSets()) {
    std::map<ActionIndex, Rational> dist;
    for (ActionIndex a : set) dist[a] = Rational(1, set.size());
    scheduler.set(set, std::move(dist));
  }
  return scheduler;
}

CountingStutterScheduler::CountingStutterScheduler(std::size_t memory) : memory_(memory) {
  if (memory == 0) throw ModelError("stutter-scheduler memory bound must be positive");
}

void CountingStutterScheduler::set(StateIndex s, ActionIndex a, std::size_t duration) {
  if (duration >= memory_)
    throw ModelError("stutter duration " + std::to_string(duration) + " out of range [0," +
                     std::to_string(memory_) + ")");
  durations_[{s, a}] = duration;
}

std::size_t CountingStutterScheduler::duration(StateIndex s, ActionIndex a) const {
  auto it = durations_.find({s, a});
  return it == durations_.end() ? 0 : it->second;
}

}  // namespace ahmc
