#include "ahmc/dtmc.hpp"

#include <algorithm>
#include <deque>

namespace ahmc {

StateIndex Dtmc::addState(std::string name, std::set<std::string> stateLabels) {
  names.push_back(std::move(name));
  for (const auto& ap : stateLabels) aps.insert(ap);
  labels.push_back(std::move(stateLabels));
  rows.emplace_back();
  return names.size() - 1;
}

void Dtmc::addTransition(StateIndex from, StateIndex to, const Rational& probability) {
  if (probability == 0) return;
  auto& row = rows.at(from);
  auto it = std::find_if(row.begin(), row.end(), [&](const Edge& e) { return e.target == to; });
  if (it == row.end())
    row.push_back({to, probability});
  else
    it->probability += probability;
}

Rational Dtmc::probability(StateIndex from, StateIndex to) const {
  for (const auto& edge : rows.at(from))
    if (edge.target == to) return edge.probability;
  return 0;
}

Rational Dtmc::rowSum(StateIndex s) const {
  Rational sum = 0;
  for (const auto& edge : rows.at(s)) sum += edge.probability;
  return sum;
}

std::size_t Dtmc::numTransitions() const {
  std::size_t count = 0;
  for (const auto& row : rows) count += row.size();
  return count;
}

StateIndex InducedDtmc::at(StateIndex s, std::size_t j) const {
  auto it = index.find({s, j});
  if (it == index.end()) throw ModelError("induced state not present");
  return it->second;
}

namespace {

std::string modeName(const Mdp& mdp, ModeState ms) {
  return "(" + mdp.stateId(ms.state) + "," + std::to_string(ms.mode) + ")";
}

}  // namespace

InducedDtmc induceDtmc(const Mdp& mdp, const MemorylessScheduler& scheduler,
                       const CountingStutterScheduler& stutter, const InduceOptions& options) {
  const std::size_t m = stutter.memory();

  // Row of (s, j) as a list of (successor, probability).
  auto successors = [&](ModeState from) {
    std::vector<std::pair<ModeState, Rational>> out;
    const ActionSet enabled = mdp.enabledActions(from.state);
    if (!scheduler.covers(enabled))
      throw ModelError("scheduler has no distribution for the action set of state '" +
                       mdp.stateId(from.state) + "'");
    for (ActionIndex a : enabled) {
      const Rational choice = scheduler.probability(enabled, a);
      if (choice == 0) continue;
      if (from.mode < stutter.duration(from.state, a)) {
        out.push_back({{from.state, from.mode + 1}, choice});
      } else {
        for (const auto& edge : mdp.choices(from.state).at(a))
          if (edge.probability > 0) out.push_back({{edge.target, 0}, choice * edge.probability});
      }
    }
    return out;
  };

  InducedDtmc result;
  result.memory = m;
  result.chain.aps = mdp.aps();

  auto add = [&](ModeState ms) {
    StateIndex idx = result.chain.addState(modeName(mdp, ms), mdp.labels(ms.state));
    result.modes.push_back(ms);
    result.index.emplace(ms, idx);
    return idx;
  };

  if (!options.pruneUnreachable) {
    for (StateIndex s = 0; s < mdp.numStates(); ++s)
      for (std::size_t j = 0; j < m; ++j) add({s, j});
    for (StateIndex i = 0; i < result.modes.size(); ++i)
      for (const auto& [to, p] : successors(result.modes[i])) result.chain.addTransition(i, result.index.at(to), p);
    return result;
  }

  std::deque<StateIndex> frontier;
  for (StateIndex s = 0; s < mdp.numStates(); ++s) frontier.push_back(add({s, 0}));
  while (!frontier.empty()) {
    const StateIndex i = frontier.front();
    frontier.pop_front();
    for (const auto& [to, p] : successors(result.modes[i])) {
      auto it = result.index.find(to);
      StateIndex target;
      if (it == result.index.end()) {
        target = add(to);
        frontier.push_back(target);
      } else {
        target = it->second;
      }
      result.chain.addTransition(i, target, p);
    }
  }
  return result;
}

std::string indexedAp(const std::string& ap, std::size_t experiment) {
  return ap + "_" + std::to_string(experiment);
}

namespace {

std::set<std::string> productLabels(std::span<const Dtmc> factors, const std::vector<StateIndex>& tuple) {
  std::set<std::string> labels;
  for (std::size_t i = 0; i < factors.size(); ++i)
    for (const auto& ap : factors[i].labels.at(tuple[i])) labels.insert(indexedAp(ap, i + 1));
  return labels;
}

std::string productName(std::span<const Dtmc> factors, const std::vector<StateIndex>& tuple) {
  std::string name = "(";
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (i) name += ",";
    name += factors[i].names.at(tuple[i]);
  }
  return name + ")";
}

void initProduct(ProductDtmc& product, std::span<const Dtmc> factors) {
  if (factors.empty()) throw ModelError("composition of an empty list of DTMCs");
  for (std::size_t i = 0; i < factors.size(); ++i)
    for (const auto& ap : factors[i].aps) product.chain.aps.insert(indexedAp(ap, i + 1));
}

StateIndex addProductState(ProductDtmc& product, std::span<const Dtmc> factors, std::vector<StateIndex> tuple) {
  StateIndex idx = product.chain.addState(productName(factors, tuple), productLabels(factors, tuple));
  product.index.emplace(tuple, idx);
  product.components.push_back(std::move(tuple));
  return idx;
}

// Calls visit(successorTuple, probability) for every positive product edge.
template <typename Visit>
void forEachProductSuccessor(std::span<const Dtmc> factors, const std::vector<StateIndex>& tuple, Visit&& visit) {
  std::vector<StateIndex> next(factors.size());
  auto recurse = [&](auto&& self, std::size_t i, const Rational& mass) -> void {
    if (i == factors.size()) {
      visit(next, mass);
      return;
    }
    for (const auto& edge : factors[i].rows.at(tuple[i])) {
      next[i] = edge.target;
      self(self, i + 1, mass * edge.probability);
    }
  };
  recurse(recurse, 0, Rational(1));
}

}  // namespace

ProductDtmc compose(std::span<const Dtmc> factors) {
  ProductDtmc product;
  initProduct(product, factors);
  std::vector<StateIndex> tuple(factors.size(), 0);
  for (const auto& f : factors)
    if (f.size() == 0) return product;
  // Odometer over the cartesian product, last factor fastest.
  auto advance = [&] {
    for (std::size_t i = factors.size(); i-- > 0;) {
      if (++tuple[i] < factors[i].size()) return true;
      tuple[i] = 0;
    }
    return false;
  };
  do {
    addProductState(product, factors, tuple);
  } while (advance());
  for (StateIndex s = 0; s < product.components.size(); ++s)
    forEachProductSuccessor(factors, product.components[s], [&](const std::vector<StateIndex>& next, const Rational& p) {
      product.chain.addTransition(s, product.index.at(next), p);
    });
  return product;
}

ProductDtmc composeReachable(std::span<const Dtmc> factors, const std::vector<StateIndex>& start) {
  ProductDtmc product;
  initProduct(product, factors);
  if (start.size() != factors.size()) throw ModelError("start tuple length differs from number of factors");
  std::deque<StateIndex> frontier{addProductState(product, factors, start)};
  while (!frontier.empty()) {
    const StateIndex s = frontier.front();
    frontier.pop_front();
    const std::vector<StateIndex> tuple = product.components[s];
    forEachProductSuccessor(factors, tuple, [&](const std::vector<StateIndex>& next, const Rational& p) {
      auto it = product.index.find(next);
      StateIndex target;
      if (it == product.index.end()) {
        target = addProductState(product, factors, next);
        frontier.push_back(target);
      } else {
        target = it->second;
      }
      product.chain.addTransition(s, target, p);
    });
  }
  return product;
}

std::vector<ModeState> succPlus(const Mdp& mdp, StateIndex s, std::size_t j, ActionIndex action, std::size_t memory) {
  if (memory == 0 || j >= memory) throw ModelError("stutter counter out of range");
  std::vector<ModeState> out;
  if (j + 1 < memory) out.push_back({s, j + 1});
  const auto& row = mdp.choices(s);
  auto it = row.find(action);
  if (it == row.end()) throw ModelError("action not enabled in state '" + mdp.stateId(s) + "'");
  for (const auto& edge : it->second)
    if (edge.probability > 0) out.push_back({edge.target, 0});
  return out;
}

}  // namespace ahmc
