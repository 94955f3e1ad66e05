#include "ahmc/encoder.hpp"

#include <algorithm>
#include <chrono>
#include <set>
#include <sstream>

namespace ahmc {

std::string toString(VarKind kind) {
  switch (kind) {
    case VarKind::Sigma: return "sigma";
    case VarKind::Tau: return "tau";
    case VarKind::Go: return "go";
    case VarKind::Tr: return "tr";
    case VarKind::Holds: return "holds";
    case VarKind::HoldsInt: return "holdsInt";
    case VarKind::Prob: return "prob";
    case VarKind::D: return "d";
  }
  return "?";
}

const std::string& ConstraintSystem::declare(std::string name, VarKind kind, VarSort sort) {
  if (!lookup_.emplace(name, variables.size()).second)
    throw std::logic_error("variable '" + name + "' declared twice");
  variables.push_back({std::move(name), kind, sort});
  ++metrics.perKind[kind];
  return variables.back().name;
}

void ConstraintSystem::assertTerm(std::string term) { assertions.push_back(std::move(term)); }

std::size_t ConstraintSystem::actionSetIndex(const ActionSet& set) const {
  auto it = std::find(actionSets.begin(), actionSets.end(), set);
  if (it == actionSets.end()) throw std::out_of_range("action set not encoded");
  return static_cast<std::size_t>(it - actionSets.begin());
}

void ConstraintSystem::refreshMetrics() {
  metrics.variables = variables.size();
  metrics.assertions = assertions.size();
  metrics.subformulas = subformulas.size();
}

std::string ConstraintSystem::toSmtLib(bool checkSat) const {
  std::ostringstream out;
  for (const auto& line : header) out << "; " << line << '\n';
  out << "(set-logic QF_NRA)\n";
  for (const auto& v : variables)
    out << "(declare-fun " << v.name << " () " << (v.sort == VarSort::Bool ? "Bool" : "Real") << ")\n";
  for (const auto& a : assertions) out << "(assert " << a << ")\n";
  if (checkSat) out << "(check-sat)\n";
  return out.str();
}

std::size_t SubformulaTable::idOf(const Node& node) const {
  if (auto it = byNode.find(&node); it != byNode.end()) return it->second;
  return byText.at(toString(node));
}

std::string sigmaName(std::size_t actionSet, ActionIndex action) {
  return "sigma_A" + std::to_string(actionSet) + "_a" + std::to_string(action);
}

std::string tauName(std::size_t experiment, StateIndex s, ActionIndex action) {
  return "tau_" + std::to_string(experiment) + "_s" + std::to_string(s) + "_a" + std::to_string(action);
}

namespace {

std::string transitionSuffix(std::size_t experiment, ModeState from, ActionIndex action, ModeState to) {
  return std::to_string(experiment) + "_s" + std::to_string(from.state) + "_" + std::to_string(from.mode) + "_a" +
         std::to_string(action) + "_s" + std::to_string(to.state) + "_" + std::to_string(to.mode);
}

std::string real(std::size_t x) { return std::to_string(x) + ".0"; }

// Joins terms under an n-ary operator, collapsing the unary case.
std::string nary(const std::string& op, const std::vector<std::string>& terms, const std::string& empty) {
  if (terms.empty()) return empty;
  if (terms.size() == 1) return terms.front();
  std::string out = "(" + op;
  for (const auto& t : terms) out += " " + t;
  return out + ")";
}

bool isBooleanNode(NodeKind kind) {
  switch (kind) {
    case NodeKind::True:
    case NodeKind::False:
    case NodeKind::Atom:
    case NodeKind::Not:
    case NodeKind::And:
    case NodeKind::Or:
    case NodeKind::Implies:
    case NodeKind::Compare:
      return true;
    default:
      return false;
  }
}

// Every composed state over the given experiments, as full-length vectors
// whose other positions are (0, 0).
std::vector<ComposedState> composedStates(std::size_t numStates, std::size_t m, std::size_t n,
                                          const std::vector<std::size_t>& experiments) {
  std::vector<ComposedState> out;
  ComposedState current(n, ModeState{0, 0});
  auto rec = [&](auto&& self, std::size_t pos) -> void {
    if (pos == experiments.size()) {
      out.push_back(current);
      return;
    }
    const std::size_t i = experiments[pos] - 1;
    for (StateIndex s = 0; s < numStates; ++s)
      for (std::size_t j = 0; j < m; ++j) {
        current[i] = {s, j};
        self(self, pos + 1);
      }
    current[i] = {0, 0};
  };
  rec(rec, 0);
  return out;
}

// One joint step over the listed experiments: the product of sigma*go*tr
// factors and the successor composed state.
struct JointStep {
  std::vector<std::string> factors;     // sigma, go, tr per experiment
  std::vector<std::string> enableFactors;  // sigma, go per experiment
  ComposedState target;
};

std::vector<JointStep> jointSteps(const Mdp& mdp, std::size_t m, const ConstraintSystem& sys, const ComposedState& from,
                                  const std::vector<std::size_t>& experiments) {
  std::vector<JointStep> out;
  JointStep current{{}, {}, from};
  auto rec = [&](auto&& self, std::size_t pos) -> void {
    if (pos == experiments.size()) {
      out.push_back(current);
      return;
    }
    const std::size_t i = experiments[pos];
    const ModeState here = from[i - 1];
    const ActionSet enabled = mdp.enabledActions(here.state);
    const std::size_t set = sys.actionSetIndex(enabled);
    for (ActionIndex a : enabled) {
      for (const ModeState& next : succPlus(mdp, here.state, here.mode, a, m)) {
        const std::string sigma = sigmaName(set, a);
        const std::string go = goName(i, here, a, next);
        current.factors.insert(current.factors.end(), {sigma, go, trName(i, here, a, next)});
        current.enableFactors.insert(current.enableFactors.end(), {sigma, go});
        current.target[i - 1] = next;
        self(self, pos + 1);
        current.factors.resize(current.factors.size() - 3);
        current.enableFactors.resize(current.enableFactors.size() - 2);
      }
    }
    current.target[i - 1] = here;
  };
  rec(rec, 0);
  return out;
}

std::string mul(std::vector<std::string> factors, const std::string& last) {
  factors.push_back(last);
  return nary("*", factors, "1.0");
}

std::string smtCompare(CompareOp op, const std::string& l, const std::string& r) {
  switch (op) {
    case CompareOp::Less: return "(< " + l + " " + r + ")";
    case CompareOp::LessEq: return "(<= " + l + " " + r + ")";
    case CompareOp::Equal: return "(= " + l + " " + r + ")";
    case CompareOp::NotEqual: return "(not (= " + l + " " + r + "))";
    case CompareOp::GreaterEq: return "(>= " + l + " " + r + ")";
    case CompareOp::Greater: return "(> " + l + " " + r + ")";
  }
  return "";
}

void collect(const NodePtr& node, const EncodeOptions& options, std::size_t n, SubformulaTable& table,
             ConstraintSystem& sys) {
  for (const auto& child : node->children) collect(child, options, n, table, sys);
  const std::string text = toString(*node);
  auto it = table.byText.find(text);
  if (it != table.byText.end()) {
    table.byNode.emplace(node.get(), it->second);
    return;
  }
  std::vector<std::size_t> relevant;
  if (options.relevantOpt) {
    relevant = relevantExperiments(*node);
  } else {
    for (std::size_t i = 1; i <= n; ++i) relevant.push_back(i);
  }
  const std::size_t id = table.entries.size();
  table.entries.push_back({node, relevant});
  table.byText.emplace(text, id);
  table.byNode.emplace(node.get(), id);
  sys.subformulas.push_back(text);
}

}  // namespace

std::string goName(std::size_t experiment, ModeState from, ActionIndex action, ModeState to) {
  return "go_" + transitionSuffix(experiment, from, action, to);
}

std::string trName(std::size_t experiment, ModeState from, ActionIndex action, ModeState to) {
  return "tr_" + transitionSuffix(experiment, from, action, to);
}

std::string stateTupleName(const ComposedState& state, const std::vector<std::size_t>& experiments) {
  std::string out;
  for (std::size_t i : experiments) {
    if (!out.empty()) out += "_";
    const ModeState ms = state.at(i - 1);
    out += "s" + std::to_string(ms.state) + "j" + std::to_string(ms.mode);
  }
  return out;
}

std::string subformulaVar(const char* prefix, const ComposedState& state, const std::vector<std::size_t>& experiments,
                          std::size_t id) {
  std::string tuple = stateTupleName(state, experiments);
  return std::string(prefix) + "_" + (tuple.empty() ? "" : tuple + "_") + "f" + std::to_string(id);
}

void encodeSchedulerChoice(const Mdp& mdp, ConstraintSystem& sys) {
  sys.actionSets = mdp.occurringActionSets();
  for (std::size_t k = 0; k < sys.actionSets.size(); ++k) {
    std::vector<std::string> names;
    for (ActionIndex a : sys.actionSets[k]) {
      const std::string& v = sys.declare(sigmaName(k, a), VarKind::Sigma);
      sys.sigmaVars.push_back({k, a, v});
      sys.assertTerm("(and (<= 0.0 " + v + ") (<= " + v + " 1.0))");
      names.push_back(v);
    }
    sys.assertTerm("(= " + nary("+", names, "0.0") + " 1.0)");
  }
}

void encodeStutterChoice(const Mdp& mdp, std::size_t n, std::size_t m, ConstraintSystem& sys) {
  if (m == 0) throw std::invalid_argument("memory bound must be positive");
  for (std::size_t i = 1; i <= n; ++i)
    for (StateIndex s = 0; s < mdp.numStates(); ++s)
      for (ActionIndex a : mdp.enabledActions(s)) {
        const std::string& v = sys.declare(tauName(i, s, a), VarKind::Tau);
        sys.tauVars.push_back({i, s, a, v});
        std::vector<std::string> options;
        for (std::size_t j = 0; j < m; ++j) options.push_back("(= " + v + " " + real(j) + ")");
        sys.assertTerm(nary("or", options, "false"));
      }
}

void encodeGoTr(const Mdp& mdp, std::size_t n, std::size_t m, ConstraintSystem& sys) {
  for (std::size_t i = 1; i <= n; ++i)
    for (StateIndex s = 0; s < mdp.numStates(); ++s)
      for (std::size_t j = 0; j < m; ++j)
        for (ActionIndex a : mdp.enabledActions(s)) {
          const std::string tau = tauName(i, s, a);
          for (const ModeState& next : succPlus(mdp, s, j, a, m)) {
            const ModeState from{s, j};
            const std::string& go = sys.declare(goName(i, from, a, next), VarKind::Go);
            sys.assertTerm("(or (= " + go + " 0.0) (= " + go + " 1.0))");
            const bool stutter = next.mode == j + 1;
            // j < tau stutters, j >= tau proceeds.
            const std::string condition = stutter ? "(< " + real(j) + " " + tau + ")" : "(<= " + tau + " " + real(j) + ")";
            sys.assertTerm("(= (= " + go + " 1.0) " + condition + ")");
            const std::string& tr = sys.declare(trName(i, from, a, next), VarKind::Tr);
            const Rational p = stutter ? Rational(1) : mdp.probability(s, a, next.state);
            sys.assertTerm("(= " + tr + " " + toSmtReal(p) + ")");
          }
        }
}

void encodeUntil(const Mdp& mdp, std::size_t n, std::size_t m, const Node& until, const SubformulaTable& table,
                 const EncodeOptions& options, ConstraintSystem& sys) {
  if (until.kind != NodeKind::ProbUntil) throw std::invalid_argument("encodeUntil expects P(a U b)");
  const std::size_t id = table.idOf(until);
  const auto& relevant = table.entries[id].relevant;
  const std::size_t id1 = table.idOf(*until.children[0]);
  const std::size_t id2 = table.idOf(*until.children[1]);
  const auto& r1 = table.entries[id1].relevant;
  const auto& r2 = table.entries[id2].relevant;

  const auto states = composedStates(mdp.numStates(), m, n, relevant);
  if (options.untilRanking)
    for (const auto& state : states) sys.declare(subformulaVar("d", state, relevant, id), VarKind::D);

  for (const auto& state : states) {
    const std::string prob = subformulaVar("prob", state, relevant, id);
    const std::string h1 = subformulaVar("holds", state, r1, id1);
    const std::string h2 = subformulaVar("holds", state, r2, id2);
    sys.assertTerm("(=> " + h2 + " (= " + prob + " 1.0))");
    sys.assertTerm("(=> (and (not " + h1 + ") (not " + h2 + ")) (= " + prob + " 0.0))");

    std::vector<std::string> sum;
    std::vector<std::string> progress;
    for (const auto& step : jointSteps(mdp, m, sys, state, relevant)) {
      sum.push_back(mul(step.factors, subformulaVar("prob", step.target, relevant, id)));
      if (options.untilRanking) {
        const std::string enabled = "(> " + nary("*", step.enableFactors, "1.0") + " 0.0)";
        const std::string closer = "(or " + subformulaVar("holds", step.target, r2, id2) + " (> " +
                                   subformulaVar("d", state, relevant, id) + " " +
                                   subformulaVar("d", step.target, relevant, id) + "))";
        progress.push_back("(and " + enabled + " " + closer + ")");
      }
    }
    std::string middle = "(= " + prob + " " + nary("+", sum, "0.0") + ")";
    if (options.untilRanking)
      middle = "(and " + middle + " (=> (> " + prob + " 0.0) " + nary("or", progress, "false") + "))";
    sys.assertTerm("(=> (and " + h1 + " (not " + h2 + ")) " + middle + ")");
  }
}

SubformulaTable encodeSemantics(const Mdp& mdp, std::size_t n, std::size_t m, const NodePtr& body,
                                const EncodeOptions& options, ConstraintSystem& sys) {
  if (!isDesugared(*body)) throw std::invalid_argument("encodeSemantics expects a desugared body");
  SubformulaTable table;
  collect(body, options, n, table, sys);

  for (std::size_t id = 0; id < table.entries.size(); ++id) {
    const Node& node = *table.entries[id].node;
    const auto& relevant = table.entries[id].relevant;
    const auto states = composedStates(mdp.numStates(), m, n, relevant);
    const bool boolean = isBooleanNode(node.kind);

    for (const auto& state : states)
      sys.declare(subformulaVar(boolean ? "holds" : "prob", state, relevant, id),
                  boolean ? VarKind::Holds : VarKind::Prob, boolean ? VarSort::Bool : VarSort::Real);
    if (boolean) sys.metrics.holdsPerSubformula[id] = states.size();
    // Path probabilities live in [0,1]; without the lower bound a state that
    // cannot reach the goal admits negative fixpoints of its own equation.
    if (node.kind == NodeKind::ProbNext || node.kind == NodeKind::ProbUntil)
      for (const auto& state : states) {
        const std::string prob = subformulaVar("prob", state, relevant, id);
        sys.assertTerm("(and (<= 0.0 " + prob + ") (<= " + prob + " 1.0))");
      }

    auto child = [&](std::size_t c, const char* prefix, const ComposedState& state) {
      const std::size_t cid = table.idOf(*node.children[c]);
      return subformulaVar(prefix, state, table.entries[cid].relevant, cid);
    };

    if (node.kind == NodeKind::ProbUntil) {
      encodeUntil(mdp, n, m, node, table, options, sys);
      continue;
    }

    if (node.kind == NodeKind::ProbNext) {
      // 0/1 mirror of the operand's truth value at every state.
      const std::size_t cid = table.idOf(*node.children[0]);
      const auto& rc = table.entries[cid].relevant;
      for (const auto& state : composedStates(mdp.numStates(), m, n, rc)) {
        const std::string h = subformulaVar("holds", state, rc, cid);
        const std::string hi = subformulaVar("holdsInt", state, rc, cid);
        if (sys.declared(hi)) continue;
        sys.declare(hi, VarKind::HoldsInt);
        sys.assertTerm("(or (and " + h + " (= " + hi + " 1.0)) (and (not " + h + ") (= " + hi + " 0.0)))");
      }
    }

    for (const auto& state : states) {
      const std::string self = subformulaVar(boolean ? "holds" : "prob", state, relevant, id);
      switch (node.kind) {
        case NodeKind::True:
          sys.assertTerm(self);
          break;
        case NodeKind::Atom: {
          const ModeState ms = state.at(node.experiment - 1);
          sys.assertTerm(mdp.hasLabel(ms.state, node.ap) ? self : "(not " + self + ")");
          break;
        }
        case NodeKind::Not:
          sys.assertTerm("(= " + self + " (not " + child(0, "holds", state) + "))");
          break;
        case NodeKind::And:
          sys.assertTerm("(= " + self + " (and " + child(0, "holds", state) + " " + child(1, "holds", state) + "))");
          break;
        case NodeKind::Compare:
          sys.assertTerm("(= " + self + " " + smtCompare(node.op, child(0, "prob", state), child(1, "prob", state)) +
                         ")");
          break;
        case NodeKind::Const:
          sys.assertTerm("(= " + self + " " + toSmtReal(node.value) + ")");
          break;
        case NodeKind::Add:
        case NodeKind::Sub:
        case NodeKind::Mul: {
          const char* op = node.kind == NodeKind::Add ? "+" : node.kind == NodeKind::Sub ? "-" : "*";
          sys.assertTerm("(= " + self + " (" + op + " " + child(0, "prob", state) + " " + child(1, "prob", state) +
                         "))");
          break;
        }
        case NodeKind::ProbNext: {
          const std::size_t cid = table.idOf(*node.children[0]);
          std::vector<std::string> sum;
          for (const auto& step : jointSteps(mdp, m, sys, state, relevant))
            sum.push_back(mul(step.factors, subformulaVar("holdsInt", step.target, table.entries[cid].relevant, cid)));
          sys.assertTerm("(= " + self + " " + nary("+", sum, "0.0") + ")");
          break;
        }
        default:
          throw std::invalid_argument("unexpected constructor in desugared body: " + toString(node));
      }
    }
  }
  return table;
}

void encodeTruth(const Mdp& mdp, const HyperFormula& formula, std::size_t m, const SubformulaTable& table,
                 const NodePtr& body, ConstraintSystem& sys) {
  (void)m;
  const ExperimentMap map = experimentMap(formula);
  const std::size_t id = table.idOf(*body);
  const auto& relevant = table.entries[id].relevant;
  std::vector<StateIndex> chosen;
  auto rec = [&](auto&& self, std::size_t q) -> std::string {
    if (q == map.l) {
      ComposedState start;
      for (std::size_t i = 0; i < map.n; ++i) start.push_back({chosen[map.k[i] - 1], 0});
      return subformulaVar("holds", start, relevant, id);
    }
    std::vector<std::string> terms;
    for (StateIndex s = 0; s < mdp.numStates(); ++s) {
      chosen.push_back(s);
      terms.push_back(self(self, q + 1));
      chosen.pop_back();
    }
    const bool forall = formula.states[q].quantifier == Quantifier::Forall;
    return nary(forall ? "and" : "or", terms, forall ? "true" : "false");
  };
  sys.assertTerm(rec(rec, 0));
}

ConstraintSystem encode(const Mdp& mdp, const HyperFormula& formula, std::size_t m, const EncodeOptions& options) {
  const auto started = std::chrono::steady_clock::now();
  if (!isExistentialFragment(formula))
    throw UnsupportedFragment("the encoding needs existential scheduler and stutter quantifiers");
  checkWellFormed(formula);
  if (m == 0) throw std::invalid_argument("memory bound must be positive");

  const std::size_t n = formula.stutters.size();
  const NodePtr body = desugar(indexAtoms(formula));

  ConstraintSystem sys;
  sys.memory = m;
  sys.experiments = n;
  for (StateIndex s = 0; s < mdp.numStates(); ++s) sys.header.push_back("s" + std::to_string(s) + " = " + mdp.stateId(s));
  for (ActionIndex a = 0; a < mdp.numActions(); ++a)
    sys.header.push_back("a" + std::to_string(a) + " = " + mdp.actionId(a));

  encodeSchedulerChoice(mdp, sys);
  for (std::size_t k = 0; k < sys.actionSets.size(); ++k) {
    std::string line = "A" + std::to_string(k) + " = {";
    for (std::size_t x = 0; x < sys.actionSets[k].size(); ++x)
      line += (x ? ", " : "") + mdp.actionId(sys.actionSets[k][x]);
    sys.header.push_back(line + "}");
  }
  encodeStutterChoice(mdp, n, m, sys);
  encodeGoTr(mdp, n, m, sys);
  const SubformulaTable table = encodeSemantics(mdp, n, m, body, options, sys);
  for (std::size_t id = 0; id < sys.subformulas.size(); ++id)
    sys.header.push_back("f" + std::to_string(id) + " = " + sys.subformulas[id]);
  encodeTruth(mdp, formula, m, table, body, sys);

  sys.refreshMetrics();
  sys.metrics.encodeSeconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return sys;
}

}  // namespace ahmc
