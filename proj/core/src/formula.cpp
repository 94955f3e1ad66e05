#include "ahmc/formula.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

namespace ahmc {

bool isBoolean(NodeKind kind) {
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

bool isProbability(NodeKind kind) { return !isBoolean(kind); }

namespace {

NodePtr make(NodeKind kind, std::vector<NodePtr> children = {}) {
  auto node = std::make_shared<Node>();
  node->kind = kind;
  node->children = std::move(children);
  return node;
}

void requireBoolean(const NodePtr& node, const char* context) {
  if (!node || !isBoolean(node->kind))
    throw std::invalid_argument(std::string(context) + " expects a state formula operand");
}

void requireProbability(const NodePtr& node, const char* context) {
  if (!node || !isProbability(node->kind))
    throw std::invalid_argument(std::string(context) + " expects a probability expression operand");
}

}  // namespace

NodePtr mkTrue() { return make(NodeKind::True); }
NodePtr mkFalse() { return make(NodeKind::False); }

NodePtr mkAtom(std::string ap, std::string variable, std::size_t experiment) {
  auto node = std::make_shared<Node>();
  node->kind = NodeKind::Atom;
  node->ap = std::move(ap);
  node->variable = std::move(variable);
  node->experiment = experiment;
  return node;
}

NodePtr mkNot(NodePtr child) {
  requireBoolean(child, "!");
  return make(NodeKind::Not, {std::move(child)});
}

NodePtr mkAnd(NodePtr lhs, NodePtr rhs) {
  requireBoolean(lhs, "&");
  requireBoolean(rhs, "&");
  return make(NodeKind::And, {std::move(lhs), std::move(rhs)});
}

NodePtr mkOr(NodePtr lhs, NodePtr rhs) {
  requireBoolean(lhs, "|");
  requireBoolean(rhs, "|");
  return make(NodeKind::Or, {std::move(lhs), std::move(rhs)});
}

NodePtr mkImplies(NodePtr lhs, NodePtr rhs) {
  requireBoolean(lhs, "->");
  requireBoolean(rhs, "->");
  return make(NodeKind::Implies, {std::move(lhs), std::move(rhs)});
}

NodePtr mkCompare(CompareOp op, NodePtr lhs, NodePtr rhs) {
  requireProbability(lhs, "comparison");
  requireProbability(rhs, "comparison");
  auto node = std::make_shared<Node>();
  node->kind = NodeKind::Compare;
  node->op = op;
  node->children = {std::move(lhs), std::move(rhs)};
  return node;
}

NodePtr mkNext(NodePtr child) {
  requireBoolean(child, "X");
  return make(NodeKind::ProbNext, {std::move(child)});
}

NodePtr mkUntil(NodePtr lhs, NodePtr rhs) {
  requireBoolean(lhs, "U");
  requireBoolean(rhs, "U");
  return make(NodeKind::ProbUntil, {std::move(lhs), std::move(rhs)});
}

NodePtr mkFinally(NodePtr child) {
  requireBoolean(child, "F");
  return make(NodeKind::ProbFinally, {std::move(child)});
}

NodePtr mkGlobally(NodePtr child) {
  requireBoolean(child, "G");
  return make(NodeKind::ProbGlobally, {std::move(child)});
}

NodePtr mkConst(Rational value) {
  auto node = std::make_shared<Node>();
  node->kind = NodeKind::Const;
  node->value = std::move(value);
  return node;
}

NodePtr mkArith(NodeKind kind, NodePtr lhs, NodePtr rhs) {
  if (kind != NodeKind::Add && kind != NodeKind::Sub && kind != NodeKind::Mul)
    throw std::invalid_argument("arithmetic operator must be +, - or *");
  requireProbability(lhs, "arithmetic");
  requireProbability(rhs, "arithmetic");
  return make(kind, {std::move(lhs), std::move(rhs)});
}

std::string toString(CompareOp op) {
  switch (op) {
    case CompareOp::Less: return "<";
    case CompareOp::LessEq: return "<=";
    case CompareOp::Equal: return "=";
    case CompareOp::NotEqual: return "!=";
    case CompareOp::GreaterEq: return ">=";
    case CompareOp::Greater: return ">";
  }
  return "?";
}

std::string toString(const Node& node) {
  auto binary = [&](const char* op) {
    return "(" + toString(*node.children[0]) + " " + op + " " + toString(*node.children[1]) + ")";
  };
  switch (node.kind) {
    case NodeKind::True: return "true";
    case NodeKind::False: return "false";
    case NodeKind::Atom: return node.ap + "(" + node.variable + ")";
    case NodeKind::Not: return "!" + toString(*node.children[0]);
    case NodeKind::And: return binary("&");
    case NodeKind::Or: return binary("|");
    case NodeKind::Implies: return binary("->");
    case NodeKind::Compare: return binary(toString(node.op).c_str());
    case NodeKind::ProbNext: return "P(X " + toString(*node.children[0]) + ")";
    case NodeKind::ProbUntil:
      return "P(" + toString(*node.children[0]) + " U " + toString(*node.children[1]) + ")";
    case NodeKind::ProbFinally: return "P(F " + toString(*node.children[0]) + ")";
    case NodeKind::ProbGlobally: return "P(G " + toString(*node.children[0]) + ")";
    case NodeKind::Const:
      return toString(node.value);
    case NodeKind::Add: return binary("+");
    case NodeKind::Sub: return binary("-");
    case NodeKind::Mul: return binary("*");
  }
  return "?";
}

namespace {

const char* keyword(Quantifier q) { return q == Quantifier::Forall ? "forall" : "exists"; }

}  // namespace

std::string toString(const HyperFormula& formula) {
  std::string out = std::string(keyword(formula.scheduler.quantifier)) + " sched " + formula.scheduler.variable + " . ";
  for (const auto& q : formula.states)
    out += std::string(keyword(q.quantifier)) + " state " + q.variable + "(" + q.scheduler + ") . ";
  for (const auto& q : formula.stutters)
    out += std::string(keyword(q.quantifier)) + " stutter " + q.variable + "(" + q.state + ") . ";
  return out + toString(*formula.body);
}

bool structurallyEqual(const Node& lhs, const Node& rhs) {
  if (lhs.kind != rhs.kind || lhs.children.size() != rhs.children.size()) return false;
  switch (lhs.kind) {
    case NodeKind::Atom:
      if (lhs.ap != rhs.ap || lhs.variable != rhs.variable || lhs.experiment != rhs.experiment) return false;
      break;
    case NodeKind::Compare:
      if (lhs.op != rhs.op) return false;
      break;
    case NodeKind::Const:
      if (lhs.value != rhs.value) return false;
      break;
    default:
      break;
  }
  for (std::size_t i = 0; i < lhs.children.size(); ++i)
    if (!structurallyEqual(*lhs.children[i], *rhs.children[i])) return false;
  return true;
}

bool structurallyEqual(const HyperFormula& lhs, const HyperFormula& rhs) {
  return lhs.scheduler == rhs.scheduler && lhs.states == rhs.states && lhs.stutters == rhs.stutters &&
         structurallyEqual(*lhs.body, *rhs.body);
}

NodePtr desugar(const NodePtr& node) {
  std::vector<NodePtr> kids;
  for (const auto& child : node->children) kids.push_back(desugar(child));
  switch (node->kind) {
    case NodeKind::False: return mkNot(mkTrue());
    case NodeKind::Or: return mkNot(mkAnd(mkNot(kids[0]), mkNot(kids[1])));
    case NodeKind::Implies: return mkNot(mkAnd(kids[0], mkNot(kids[1])));
    case NodeKind::ProbFinally: return mkUntil(mkTrue(), kids[0]);
    case NodeKind::ProbGlobally: return mkArith(NodeKind::Sub, mkConst(1), mkUntil(mkTrue(), mkNot(kids[0])));
    default: break;
  }
  if (kids.empty()) return node;
  auto copy = std::make_shared<Node>(*node);
  copy->children = std::move(kids);
  return copy;
}

HyperFormula desugar(const HyperFormula& formula) {
  HyperFormula out = formula;
  out.body = desugar(formula.body);
  return out;
}

bool isDesugared(const Node& node) {
  switch (node.kind) {
    case NodeKind::False:
    case NodeKind::Or:
    case NodeKind::Implies:
    case NodeKind::ProbFinally:
    case NodeKind::ProbGlobally:
      return false;
    default:
      break;
  }
  return std::all_of(node.children.begin(), node.children.end(),
                     [](const NodePtr& child) { return isDesugared(*child); });
}

bool isExistentialFragment(const HyperFormula& formula) {
  return formula.scheduler.quantifier == Quantifier::Exists &&
         std::all_of(formula.stutters.begin(), formula.stutters.end(),
                     [](const StutterQuantifier& q) { return q.quantifier == Quantifier::Exists; });
}

bool isUniversalFragment(const HyperFormula& formula) {
  return formula.scheduler.quantifier == Quantifier::Forall &&
         std::all_of(formula.stutters.begin(), formula.stutters.end(),
                     [](const StutterQuantifier& q) { return q.quantifier == Quantifier::Forall; });
}

HyperFormula negatePrefix(const HyperFormula& formula) {
  if (!isUniversalFragment(formula) && !isExistentialFragment(formula))
    throw UnsupportedFragment(
        "only purely universal (or purely existential) scheduler and stutter quantification can be dualized; "
        "mixed quantifiers over schedulers and stutter-schedulers are not supported");
  auto flip = [](Quantifier q) { return q == Quantifier::Forall ? Quantifier::Exists : Quantifier::Forall; };
  HyperFormula dual = formula;
  dual.scheduler.quantifier = flip(dual.scheduler.quantifier);
  for (auto& q : dual.states) q.quantifier = flip(q.quantifier);
  for (auto& q : dual.stutters) q.quantifier = flip(q.quantifier);
  dual.body = mkNot(formula.body);
  return dual;
}

ExperimentMap experimentMap(const HyperFormula& formula) {
  ExperimentMap map;
  map.n = formula.stutters.size();
  map.l = formula.states.size();
  for (const auto& q : formula.stutters) {
    auto it = std::find_if(formula.states.begin(), formula.states.end(),
                           [&](const StateQuantifier& s) { return s.variable == q.state; });
    if (it == formula.states.end())
      throw WellFormednessError("stutter quantifier '" + q.variable + "' refers to unbound state variable '" +
                                q.state + "'");
    map.k.push_back(static_cast<std::size_t>(it - formula.states.begin()) + 1);
  }
  return map;
}

namespace {

NodePtr indexAtomsRec(const NodePtr& node, const std::unordered_map<std::string, std::size_t>& experiments) {
  if (node->kind == NodeKind::Atom) {
    auto it = experiments.find(node->variable);
    if (it == experiments.end())
      throw WellFormednessError("atom '" + node->ap + "(" + node->variable +
                                ")' is not in the scope of a stutter quantifier");
    return mkAtom(node->ap, node->variable, it->second);
  }
  if (node->children.empty()) return node;
  auto copy = std::make_shared<Node>(*node);
  for (auto& child : copy->children) child = indexAtomsRec(child, experiments);
  return copy;
}

void collectExperiments(const Node& node, std::set<std::size_t>& out) {
  if (node.kind == NodeKind::Atom) out.insert(node.experiment);
  for (const auto& child : node.children) collectExperiments(*child, out);
}

}  // namespace

NodePtr indexAtoms(const HyperFormula& formula) {
  std::unordered_map<std::string, std::size_t> experiments;
  for (std::size_t i = 0; i < formula.stutters.size(); ++i) experiments[formula.stutters[i].variable] = i + 1;
  return indexAtomsRec(formula.body, experiments);
}

std::vector<std::size_t> relevantExperiments(const Node& node) {
  std::set<std::size_t> experiments;
  collectExperiments(node, experiments);
  return {experiments.begin(), experiments.end()};
}

}  // namespace ahmc
