#pragma once

#include "ahmc/dtmc.hpp"
#include "ahmc/formula.hpp"
#include "ahmc/mdp.hpp"

#include <map>
#include <string>
#include <unordered_map>
#include <vector>

namespace ahmc {

enum class VarKind { Sigma, Tau, Go, Tr, Holds, HoldsInt, Prob, D };
enum class VarSort { Real, Bool };

std::string toString(VarKind kind);

struct Variable {
  std::string name;
  VarKind kind;
  VarSort sort;
};

struct SigmaVar {
  std::size_t actionSet;  // index into ConstraintSystem::actionSets
  ActionIndex action;
  std::string name;
};

struct TauVar {
  std::size_t experiment;  // 1-based
  StateIndex state;
  ActionIndex action;
  std::string name;
};

struct EncodeMetrics {
  std::size_t variables = 0;
  std::size_t assertions = 0;
  std::size_t subformulas = 0;
  std::map<VarKind, std::size_t> perKind;
  /// Subformula id -> number of holds variables created for it.
  std::map<std::size_t, std::size_t> holdsPerSubformula;
  double encodeSeconds = 0;
};

/// The generated QF_NRA system. Integer-valued variables (tau, go,
/// holdsInt) are reals restricted by disjunctions of integral equalities.
class ConstraintSystem {
public:
  std::vector<std::string> header;  // comment lines
  std::vector<Variable> variables;
  std::vector<std::string> assertions;
  std::vector<ActionSet> actionSets;
  std::vector<SigmaVar> sigmaVars;
  std::vector<TauVar> tauVars;
  /// Subformula id -> printed subformula.
  std::vector<std::string> subformulas;
  std::size_t memory = 1;
  std::size_t experiments = 0;
  EncodeMetrics metrics;

  /// Adds a declaration; a second declaration of a name throws.
  const std::string& declare(std::string name, VarKind kind, VarSort sort = VarSort::Real);
  bool declared(const std::string& name) const { return lookup_.count(name) != 0; }
  void assertTerm(std::string term);

  std::size_t actionSetIndex(const ActionSet& set) const;
  void refreshMetrics();

  /// SMT-LIB 2.6 script; with `checkSat` a trailing (check-sat).
  std::string toSmtLib(bool checkSat = true) const;

private:
  std::unordered_map<std::string, std::size_t> lookup_;
};

struct EncodeOptions {
  /// Index holds/prob variables only by the experiments whose atoms occur
  /// in the subformula.
  bool relevantOpt = true;
  /// Ranking side-condition of the until encoding. Disabling it admits
  /// spurious fixpoints and exists only to demonstrate that.
  bool untilRanking = true;
};

/// Subformulas of an encoded body, identified by printed form and numbered
/// in post-order.
struct SubformulaTable {
  struct Entry {
    NodePtr node;
    std::vector<std::size_t> relevant;  // 1-based experiments
  };
  std::vector<Entry> entries;
  std::unordered_map<std::string, std::size_t> byText;
  std::unordered_map<const Node*, std::size_t> byNode;

  std::size_t idOf(const Node& node) const;
};

// Variable names; composed states are printed only on the listed experiments.
std::string sigmaName(std::size_t actionSet, ActionIndex action);
std::string tauName(std::size_t experiment, StateIndex s, ActionIndex action);
std::string goName(std::size_t experiment, ModeState from, ActionIndex action, ModeState to);
std::string trName(std::size_t experiment, ModeState from, ActionIndex action, ModeState to);
std::string stateTupleName(const ComposedState& state, const std::vector<std::size_t>& experiments);
std::string subformulaVar(const char* prefix, const ComposedState& state, const std::vector<std::size_t>& experiments,
                          std::size_t id);

void encodeSchedulerChoice(const Mdp& mdp, ConstraintSystem& sys);
void encodeStutterChoice(const Mdp& mdp, std::size_t n, std::size_t m, ConstraintSystem& sys);
void encodeGoTr(const Mdp& mdp, std::size_t n, std::size_t m, ConstraintSystem& sys);

/// Semantics of every subformula of a desugared, atom-indexed body.
/// Needs the scheduler, stutter and go/tr blocks already present.
SubformulaTable encodeSemantics(const Mdp& mdp, std::size_t n, std::size_t m, const NodePtr& body,
                                const EncodeOptions& options, ConstraintSystem& sys);

/// Until case of encodeSemantics; children must already be in `table`.
void encodeUntil(const Mdp& mdp, std::size_t n, std::size_t m, const Node& until, const SubformulaTable& table,
                 const EncodeOptions& options, ConstraintSystem& sys);

/// Combines holds_body at ((s_{k_1},0),...,(s_{k_n},0)) over the state
/// quantifiers and asserts it.
void encodeTruth(const Mdp& mdp, const HyperFormula& formula, std::size_t m, const SubformulaTable& table,
                 const NodePtr& body, ConstraintSystem& sys);

/// Full system for a formula with an existential scheduler quantifier and
/// existential stutter quantifiers. Throws UnsupportedFragment otherwise.
ConstraintSystem encode(const Mdp& mdp, const HyperFormula& formula, std::size_t m, const EncodeOptions& options = {});

}  // namespace ahmc
