#include "ahmc/oracle.hpp"

#include "ahmc/linear_solve.hpp"

#include <deque>
#include <limits>
#include <map>
#include <unordered_map>

namespace ahmc {

Rational nextProbability(const Dtmc& chain, StateIndex from, const StateSet& phi) {
  Rational mass = 0;
  for (const auto& edge : chain.rows.at(from))
    if (phi.at(edge.target)) mass += edge.probability;
  return mass;
}

std::vector<Rational> untilProbabilities(const Dtmc& chain, const StateSet& phi1, const StateSet& phi2) {
  const std::size_t n = chain.size();
  if (phi1.size() != n || phi2.size() != n) throw std::invalid_argument("state set size does not match chain");

  std::vector<std::vector<StateIndex>> predecessors(n);
  for (StateIndex s = 0; s < n; ++s)
    for (const auto& edge : chain.rows[s])
      if (edge.probability > 0) predecessors[edge.target].push_back(s);

  // Backward search from phi2 through phi1 states; everything else is 0.
  std::vector<bool> reaches(phi2);
  std::deque<StateIndex> frontier;
  for (StateIndex s = 0; s < n; ++s)
    if (phi2[s]) frontier.push_back(s);
  while (!frontier.empty()) {
    const StateIndex t = frontier.front();
    frontier.pop_front();
    for (StateIndex s : predecessors[t])
      if (!reaches[s] && phi1[s]) {
        reaches[s] = true;
        frontier.push_back(s);
      }
  }

  std::vector<Rational> result(n, Rational(0));
  std::vector<std::size_t> unknown(n, std::numeric_limits<std::size_t>::max());
  std::vector<StateIndex> maybe;
  for (StateIndex s = 0; s < n; ++s) {
    if (phi2[s]) {
      result[s] = 1;
    } else if (reaches[s]) {
      unknown[s] = maybe.size();
      maybe.push_back(s);
    }
  }
  if (maybe.empty()) return result;

  // x_s - sum_{t maybe} P(s,t) x_t = sum_{t in phi2} P(s,t)
  const std::size_t k = maybe.size();
  std::vector<std::vector<Rational>> a(k, std::vector<Rational>(k, Rational(0)));
  std::vector<Rational> b(k, Rational(0));
  for (std::size_t r = 0; r < k; ++r) {
    a[r][r] = 1;
    for (const auto& edge : chain.rows[maybe[r]]) {
      if (phi2[edge.target])
        b[r] += edge.probability;
      else if (unknown[edge.target] != std::numeric_limits<std::size_t>::max())
        a[r][unknown[edge.target]] -= edge.probability;
    }
  }
  const std::vector<Rational> x = solveLinearSystem(a, b);
  for (std::size_t r = 0; r < k; ++r) result[maybe[r]] = x[r];
  return result;
}

Rational untilProbability(const Dtmc& chain, StateIndex from, const StateSet& phi1, const StateSet& phi2) {
  if (phi2.at(from)) return 1;
  if (!phi1.at(from)) return 0;
  return untilProbabilities(chain, phi1, phi2).at(from);
}

namespace {

// Bottom-up evaluation of an indexed body over every state of one chain.
class Evaluator {
public:
  Evaluator(const Dtmc& chain, const EvalOptions& options) : chain_(chain), options_(options) {}

  const StateSet& truth(const Node& node) {
    if (auto it = truth_.find(&node); it != truth_.end()) return it->second;
    const std::size_t n = chain_.size();
    StateSet out(n, false);
    switch (node.kind) {
      case NodeKind::True:
        out.assign(n, true);
        break;
      case NodeKind::False:
        break;
      case NodeKind::Atom: {
        if (node.experiment == 0) throw std::invalid_argument("atom '" + node.ap + "' has no experiment index");
        const std::string ap = indexedAp(node.ap, node.experiment);
        for (StateIndex s = 0; s < n; ++s) out[s] = chain_.labels[s].count(ap) != 0;
        break;
      }
      case NodeKind::Not: {
        const StateSet& c = truth(*node.children[0]);
        for (StateIndex s = 0; s < n; ++s) out[s] = !c[s];
        break;
      }
      case NodeKind::And:
      case NodeKind::Or:
      case NodeKind::Implies: {
        const StateSet& l = truth(*node.children[0]);
        const StateSet& r = truth(*node.children[1]);
        for (StateIndex s = 0; s < n; ++s)
          out[s] = node.kind == NodeKind::And ? (l[s] && r[s]) : node.kind == NodeKind::Or ? (l[s] || r[s]) : (!l[s] || r[s]);
        break;
      }
      case NodeKind::Compare: {
        const auto& l = value(*node.children[0]);
        const auto& r = value(*node.children[1]);
        for (StateIndex s = 0; s < n; ++s) out[s] = compare(node.op, l[s], r[s]);
        break;
      }
      default:
        throw std::invalid_argument("probability expression used as a state formula");
    }
    return truth_.emplace(&node, std::move(out)).first->second;
  }

  const std::vector<Rational>& value(const Node& node) {
    if (auto it = value_.find(&node); it != value_.end()) return it->second;
    const std::size_t n = chain_.size();
    std::vector<Rational> out(n, Rational(0));
    const StateSet all(n, true);
    switch (node.kind) {
      case NodeKind::Const:
        out.assign(n, node.value);
        break;
      case NodeKind::Add:
      case NodeKind::Sub:
      case NodeKind::Mul: {
        const auto& l = value(*node.children[0]);
        const auto& r = value(*node.children[1]);
        for (StateIndex s = 0; s < n; ++s)
          out[s] = node.kind == NodeKind::Add   ? Rational(l[s] + r[s])
                   : node.kind == NodeKind::Sub ? Rational(l[s] - r[s])
                                                : Rational(l[s] * r[s]);
        break;
      }
      case NodeKind::ProbNext: {
        const StateSet& phi = truth(*node.children[0]);
        for (StateIndex s = 0; s < n; ++s) out[s] = nextProbability(chain_, s, phi);
        break;
      }
      case NodeKind::ProbUntil:
        out = untilProbabilities(chain_, truth(*node.children[0]), truth(*node.children[1]));
        break;
      case NodeKind::ProbFinally:
        out = untilProbabilities(chain_, all, truth(*node.children[0]));
        break;
      case NodeKind::ProbGlobally: {
        StateSet notPhi = truth(*node.children[0]);
        notPhi.flip();
        out = untilProbabilities(chain_, all, notPhi);
        for (auto& x : out) x = 1 - x;
        break;
      }
      default:
        throw std::invalid_argument("state formula used as a probability expression");
    }
    return value_.emplace(&node, std::move(out)).first->second;
  }

private:
  bool compare(CompareOp op, const Rational& l, const Rational& r) const {
    int c = cmp(l, r);
    if (options_.tolerance && abs(l - r) <= *options_.tolerance) c = 0;
    switch (op) {
      case CompareOp::Less: return c < 0;
      case CompareOp::LessEq: return c <= 0;
      case CompareOp::Equal: return c == 0;
      case CompareOp::NotEqual: return c != 0;
      case CompareOp::GreaterEq: return c >= 0;
      case CompareOp::Greater: return c > 0;
    }
    return false;
  }

  const Dtmc& chain_;
  const EvalOptions& options_;
  std::unordered_map<const Node*, StateSet> truth_;
  std::unordered_map<const Node*, std::vector<Rational>> value_;
};

// Evaluates the body at the product of the given induced chains, each
// started in (start[i], 0).
bool evalAt(const std::vector<const InducedDtmc*>& induced, const std::vector<StateIndex>& start, const Node& body,
            const EvalOptions& options) {
  std::vector<Dtmc> factors;
  std::vector<StateIndex> tuple;
  factors.reserve(induced.size());
  for (std::size_t i = 0; i < induced.size(); ++i) {
    factors.push_back(induced[i]->chain);
    tuple.push_back(induced[i]->at(start[i], 0));
  }
  const ProductDtmc product = composeReachable(factors, tuple);
  Evaluator evaluator(product.chain, options);
  return evaluator.truth(body).at(product.index.at(tuple));
}

std::vector<StateIndex> experimentStarts(const ExperimentMap& map, const std::vector<StateIndex>& startStates) {
  std::vector<StateIndex> starts;
  for (std::size_t i = 0; i < map.n; ++i) starts.push_back(startStates.at(map.k[i] - 1));
  return starts;
}

std::size_t saturatingMul(std::size_t a, std::size_t b) {
  if (a != 0 && b > std::numeric_limits<std::size_t>::max() / a) return std::numeric_limits<std::size_t>::max();
  return a * b;
}

std::size_t saturatingPow(std::size_t base, std::size_t exp) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < exp; ++i) r = saturatingMul(r, base);
  return r;
}

std::vector<StateIndex> reachableStates(const Mdp& mdp, StateIndex from) {
  std::vector<bool> seen(mdp.numStates(), false);
  std::vector<StateIndex> order{from};
  seen[from] = true;
  for (std::size_t i = 0; i < order.size(); ++i)
    for (ActionIndex a : mdp.enabledActions(order[i]))
      for (const auto& edge : mdp.choices(order[i]).at(a))
        if (edge.probability > 0 && !seen[edge.target]) {
          seen[edge.target] = true;
          order.push_back(edge.target);
        }
  return order;
}

std::vector<std::pair<StateIndex, ActionIndex>> stutterSlots(const Mdp& mdp, StateIndex from) {
  std::vector<std::pair<StateIndex, ActionIndex>> slots;
  for (StateIndex s : reachableStates(mdp, from))
    for (ActionIndex a : mdp.enabledActions(s)) slots.push_back({s, a});
  return slots;
}

// Quantifier recursion shared by checkByEnumeration and evalStatePrefix.
class PrefixWalker {
public:
  PrefixWalker(const Mdp& mdp, const HyperFormula& formula, std::size_t memory, const EvalOptions& options)
      : mdp_(mdp), formula_(formula), map_(experimentMap(formula)), body_(indexAtoms(formula)), memory_(memory),
        options_(options) {}

  const ExperimentMap& map() const { return map_; }

  bool withFixedStutterers(const MemorylessScheduler& scheduler, const std::vector<CountingStutterScheduler>& fixed) {
    resetScheduler(scheduler);
    fixed_ = &fixed;
    std::vector<StateIndex> starts;
    return states(0, starts);
  }

  bool withAllStutterers(const MemorylessScheduler& scheduler) {
    resetScheduler(scheduler);
    fixed_ = nullptr;
    std::vector<StateIndex> starts;
    return states(0, starts);
  }

  std::size_t evaluations() const { return evaluations_; }

private:
  void resetScheduler(const MemorylessScheduler& scheduler) {
    scheduler_ = &scheduler;
    induced_.clear();
    fixedInduced_.clear();
  }

  bool states(std::size_t q, std::vector<StateIndex>& chosen) {
    if (q == map_.l) {
      const std::vector<StateIndex> starts = experimentStarts(map_, chosen);
      std::vector<const InducedDtmc*> picked(map_.n);
      return stutters(0, starts, picked);
    }
    const bool exists = formula_.states[q].quantifier == Quantifier::Exists;
    for (StateIndex s = 0; s < mdp_.numStates(); ++s) {
      chosen.push_back(s);
      const bool v = states(q + 1, chosen);
      chosen.pop_back();
      if (v == exists) return v;
    }
    return !exists;
  }

  bool stutters(std::size_t i, const std::vector<StateIndex>& starts, std::vector<const InducedDtmc*>& picked) {
    if (i == map_.n) {
      ++evaluations_;
      return evalAt(picked, starts, *body_, options_);
    }
    if (fixed_) {
      picked[i] = &fixedInduced(i);
      return stutters(i + 1, starts, picked);
    }
    const bool exists = formula_.stutters[i].quantifier == Quantifier::Exists;
    const auto& choices = candidates(starts[i]);
    for (const auto& chain : choices) {
      picked[i] = &chain;
      const bool v = stutters(i + 1, starts, picked);
      if (v == exists) return v;
    }
    return !exists;
  }

  const InducedDtmc& fixedInduced(std::size_t i) {
    auto it = fixedInduced_.find(i);
    if (it == fixedInduced_.end()) it = fixedInduced_.emplace(i, induceDtmc(mdp_, *scheduler_, fixed_->at(i))).first;
    return it->second;
  }

  // Induced chains for every stutter-scheduler that differs on the states
  // reachable from `start`.
  const std::vector<InducedDtmc>& candidates(StateIndex start) {
    auto it = induced_.find(start);
    if (it != induced_.end()) return it->second;
    const auto slots = stutterSlots(mdp_, start);
    std::vector<InducedDtmc> chains;
    std::vector<std::size_t> digits(slots.size(), 0);
    while (true) {
      CountingStutterScheduler tau(memory_);
      for (std::size_t d = 0; d < slots.size(); ++d) tau.set(slots[d].first, slots[d].second, digits[d]);
      chains.push_back(induceDtmc(mdp_, *scheduler_, tau));
      std::size_t d = 0;
      while (d < digits.size() && ++digits[d] == memory_) digits[d++] = 0;
      if (d == digits.size()) break;
    }
    return induced_.emplace(start, std::move(chains)).first->second;
  }

  const Mdp& mdp_;
  const HyperFormula& formula_;
  ExperimentMap map_;
  NodePtr body_;
  std::size_t memory_;
  const EvalOptions& options_;
  const MemorylessScheduler* scheduler_ = nullptr;
  const std::vector<CountingStutterScheduler>* fixed_ = nullptr;
  std::map<StateIndex, std::vector<InducedDtmc>> induced_;
  std::map<std::size_t, InducedDtmc> fixedInduced_;
  std::size_t evaluations_ = 0;
};

// All ways to write `total` as an ordered sum of `parts` non-negative integers.
void compositions(std::size_t total, std::size_t parts, std::vector<std::size_t>& current,
                  std::vector<std::vector<std::size_t>>& out) {
  if (parts == 1) {
    current.push_back(total);
    out.push_back(current);
    current.pop_back();
    return;
  }
  for (std::size_t x = 0; x <= total; ++x) {
    current.push_back(x);
    compositions(total - x, parts - 1, current, out);
    current.pop_back();
  }
}

}  // namespace

bool evalBody(const Mdp& mdp, const Instantiation& inst, const ExperimentMap& map, const Node& body,
              const EvalOptions& options) {
  if (inst.startStates.size() != map.l) throw std::invalid_argument("instantiation has the wrong number of states");
  if (inst.stutterers.size() != map.n)
    throw std::invalid_argument("instantiation has the wrong number of stutter-schedulers");
  std::vector<InducedDtmc> induced;
  std::vector<const InducedDtmc*> pointers;
  for (const auto& tau : inst.stutterers) induced.push_back(induceDtmc(mdp, inst.scheduler, tau));
  for (const auto& chain : induced) pointers.push_back(&chain);
  return evalAt(pointers, experimentStarts(map, inst.startStates), body, options);
}

bool evalBody(const Mdp& mdp, const Instantiation& inst, const HyperFormula& formula, const EvalOptions& options) {
  const NodePtr body = indexAtoms(formula);
  return evalBody(mdp, inst, experimentMap(formula), *body, options);
}

bool evalStatePrefix(const Mdp& mdp, const HyperFormula& formula, const MemorylessScheduler& scheduler,
                     const std::vector<CountingStutterScheduler>& stutterers, const EvalOptions& options) {
  if (stutterers.size() != formula.stutters.size())
    throw std::invalid_argument("expected one stutter-scheduler per stutter quantifier");
  const std::size_t memory = stutterers.empty() ? 1 : stutterers.front().memory();
  PrefixWalker walker(mdp, formula, memory, options);
  return walker.withFixedStutterers(scheduler, stutterers);
}

std::vector<MemorylessScheduler> enumerateSchedulers(const Mdp& mdp, SchedulerPolicy policy, const Rational& gridStep) {
  const std::vector<ActionSet> sets = mdp.occurringActionSets();
  if (policy == SchedulerPolicy::SingleAction) {
    for (const auto& set : sets)
      if (set.size() != 1) throw std::invalid_argument("SINGLE_ACTION policy needs exactly one enabled action per state");
    return {MemorylessScheduler::trivial(mdp)};
  }

  // Candidate distributions per action set.
  std::vector<std::vector<std::map<ActionIndex, Rational>>> options(sets.size());
  for (std::size_t k = 0; k < sets.size(); ++k) {
    const ActionSet& set = sets[k];
    if (policy == SchedulerPolicy::Deterministic) {
      for (ActionIndex a : set) options[k].push_back({{a, Rational(1)}});
      continue;
    }
    if (gridStep <= 0 || gridStep > 1 || gridStep.get_num() != 1)
      throw std::invalid_argument("grid step must be 1/N for a positive integer N");
    const std::size_t steps = gridStep.get_den().get_ui();
    std::vector<std::vector<std::size_t>> parts;
    std::vector<std::size_t> current;
    compositions(steps, set.size(), current, parts);
    for (const auto& part : parts) {
      std::map<ActionIndex, Rational> dist;
      for (std::size_t x = 0; x < set.size(); ++x)
        if (part[x] > 0) dist[set[x]] = Rational(part[x]) * gridStep;
      options[k].push_back(std::move(dist));
    }
  }

  std::vector<MemorylessScheduler> out;
  std::vector<std::size_t> digits(sets.size(), 0);
  while (true) {
    MemorylessScheduler sched;
    for (std::size_t k = 0; k < sets.size(); ++k) sched.set(sets[k], options[k][digits[k]]);
    out.push_back(std::move(sched));
    std::size_t k = 0;
    while (k < digits.size() && ++digits[k] == options[k].size()) digits[k++] = 0;
    if (k == digits.size()) break;
  }
  return out;
}

EnumerationResult checkByEnumeration(const Mdp& mdp, const HyperFormula& formula, std::size_t memory,
                                     const EnumerationOptions& options) {
  if (memory == 0) throw std::invalid_argument("memory bound must be positive");
  const ExperimentMap map = experimentMap(formula);
  const std::size_t stateSpace = saturatingPow(saturatingMul(mdp.numStates(), memory), map.n);
  if (stateSpace > options.stateSpaceCap)
    throw EnumerationLimit("composed state space (|S|*m)^n = " +
                           (stateSpace == std::numeric_limits<std::size_t>::max() ? std::string("overflow")
                                                                                    : std::to_string(stateSpace)) +
                           " exceeds the cap of " + std::to_string(options.stateSpaceCap));

  const std::vector<MemorylessScheduler> schedulers = enumerateSchedulers(mdp, options.policy, options.gridStep);

  std::size_t maxStutterers = 1;
  for (StateIndex s = 0; s < mdp.numStates(); ++s)
    maxStutterers = std::max(maxStutterers, saturatingPow(memory, stutterSlots(mdp, s).size()));
  std::size_t bound = saturatingMul(schedulers.size(), saturatingPow(mdp.numStates(), map.l));
  bound = saturatingMul(bound, saturatingPow(maxStutterers, map.n));
  if (bound > options.evaluationCap)
    throw EnumerationLimit("enumeration could need more than " + std::to_string(options.evaluationCap) +
                           " evaluations");

  PrefixWalker walker(mdp, formula, memory, options.eval);
  const bool exists = formula.scheduler.quantifier == Quantifier::Exists;
  EnumerationResult result;
  result.value = !exists;
  for (const auto& sched : schedulers) {
    const bool v = walker.withAllStutterers(sched);
    if (v == exists) {
      result.value = v;
      if (exists) result.witness = sched;
      break;
    }
  }
  result.evaluations = walker.evaluations();
  // A strict subset of schedulers can only establish the verdict that a
  // single scheduler witnesses.
  if (options.policy != SchedulerPolicy::SingleAction) result.conclusive = result.value == exists;
  return result;
}

}  // namespace ahmc
