#pragma once

#include "ahmc/rational.hpp"

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ahmc {

enum class NodeKind {
  // Boolean state formulas
  True,
  False,
  Atom,
  Not,
  And,
  Or,
  Implies,
  Compare,
  // Probability expressions
  ProbNext,
  ProbUntil,
  ProbFinally,
  ProbGlobally,
  Const,
  Add,
  Sub,
  Mul,
};

enum class CompareOp { Less, LessEq, Equal, NotEqual, GreaterEq, Greater };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

/// Immutable AST node of a quantifier-free body.
struct Node {
  NodeKind kind;
  std::vector<NodePtr> children;
  // Atom: proposition, stutter variable and (once indexed) 1-based experiment.
  std::string ap;
  std::string variable;
  std::size_t experiment = 0;
  CompareOp op = CompareOp::Equal;
  Rational value;  // Const
};

bool isBoolean(NodeKind kind);
bool isProbability(NodeKind kind);

NodePtr mkTrue();
NodePtr mkFalse();
NodePtr mkAtom(std::string ap, std::string variable, std::size_t experiment = 0);
NodePtr mkNot(NodePtr child);
NodePtr mkAnd(NodePtr lhs, NodePtr rhs);
NodePtr mkOr(NodePtr lhs, NodePtr rhs);
NodePtr mkImplies(NodePtr lhs, NodePtr rhs);
NodePtr mkCompare(CompareOp op, NodePtr lhs, NodePtr rhs);
NodePtr mkNext(NodePtr child);
NodePtr mkUntil(NodePtr lhs, NodePtr rhs);
NodePtr mkFinally(NodePtr child);
NodePtr mkGlobally(NodePtr child);
NodePtr mkConst(Rational value);
NodePtr mkArith(NodeKind kind, NodePtr lhs, NodePtr rhs);

enum class Quantifier { Forall, Exists };

struct SchedulerQuantifier {
  Quantifier quantifier;
  std::string variable;
  bool operator==(const SchedulerQuantifier&) const = default;
};

struct StateQuantifier {
  Quantifier quantifier;
  std::string variable;
  std::string scheduler;
  bool operator==(const StateQuantifier&) const = default;
};

struct StutterQuantifier {
  Quantifier quantifier;
  std::string variable;
  std::string state;
  bool operator==(const StutterQuantifier&) const = default;
};

/// ∃/∀ scheduler, then state quantifiers, then stutter quantifiers, then body.
struct HyperFormula {
  SchedulerQuantifier scheduler;
  std::vector<StateQuantifier> states;
  std::vector<StutterQuantifier> stutters;
  NodePtr body;
};

/// Syntax errors carry line/column; see ParseError.
class WellFormednessError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class UnsupportedFragment : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Parses and checks well-formedness. Sugar is kept.
HyperFormula parseFormula(std::string_view text);

/// Parses a quantifier-free body (atoms keep their variable names).
NodePtr parseBody(std::string_view text);

void checkWellFormed(const HyperFormula& formula);

std::string toString(const Node& node);
std::string toString(const HyperFormula& formula);
std::string toString(CompareOp op);

bool structurallyEqual(const Node& lhs, const Node& rhs);
bool structurallyEqual(const HyperFormula& lhs, const HyperFormula& rhs);

/// Rewrites false, |, ->, F and G into true, !, &, U and arithmetic.
NodePtr desugar(const NodePtr& node);
HyperFormula desugar(const HyperFormula& formula);

/// True when the body contains none of false, |, ->, F, G.
bool isDesugared(const Node& node);

/// Scheduler and stutter quantifiers all existential.
bool isExistentialFragment(const HyperFormula& formula);
/// Scheduler and stutter quantifiers all universal.
bool isUniversalFragment(const HyperFormula& formula);

/// Dual of a formula whose scheduler and stutter quantifiers are all
/// universal (or all existential): every quantifier flipped and the body
/// negated. Throws UnsupportedFragment on mixed scheduler/stutter
/// quantifiers.
HyperFormula negatePrefix(const HyperFormula& formula);

/// Experiment structure: n stutter quantifiers, l state quantifiers, and
/// k[i] = 1-based index of the state quantifier bound by stutter quantifier i+1.
struct ExperimentMap {
  std::size_t n = 0;
  std::size_t l = 0;
  std::vector<std::size_t> k;
};

ExperimentMap experimentMap(const HyperFormula& formula);

/// Copy of the body with every atom a(t_i) tagged with experiment i.
NodePtr indexAtoms(const HyperFormula& formula);

/// Sorted 1-based experiments whose atoms occur in the subtree.
std::vector<std::size_t> relevantExperiments(const Node& node);

}  // namespace ahmc
