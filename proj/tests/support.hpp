#pragma once

// Shared fixtures for the test programs.

#include "ahmc/dtmc.hpp"
#include "ahmc/formula.hpp"
#include "ahmc/mdp.hpp"

#include <optional>
#include <random>
#include <string>

namespace ahmc::test {

/// s0 -alpha-> {s1: 1/2, s2: 1/2}, s0 -beta-> {s3: 1}; s1..s3 loop on alpha.
/// s1 is labelled `a`, s3 `goal`.
inline Mdp exampleMdp() {
  Mdp mdp;
  mdp.declareAp("a");
  mdp.declareAp("goal");
  const auto s0 = mdp.addState("s0");
  const auto s1 = mdp.addState("s1", {"a"});
  const auto s2 = mdp.addState("s2");
  const auto s3 = mdp.addState("s3", {"goal"});
  const auto alpha = mdp.addAction("alpha");
  const auto beta = mdp.addAction("beta");
  mdp.addChoice(s0, alpha, {{s1, Rational(1, 2)}, {s2, Rational(1, 2)}});
  mdp.addChoice(s0, beta, {{s3, Rational(1)}});
  for (auto s : {s1, s2, s3}) mdp.addChoice(s, alpha, {{s, Rational(1)}});
  return mdp;
}

/// alpha with probability p in s0, the only choice elsewhere.
inline MemorylessScheduler exampleScheduler(const Rational& p) {
  const Mdp mdp = exampleMdp();
  MemorylessScheduler sched = MemorylessScheduler::uniform(mdp);
  std::map<ActionIndex, Rational> dist;
  if (p != 0) dist[0] = p;
  if (p != 1) dist[1] = 1 - p;
  sched.set({0, 1}, dist);
  return sched;
}

/// Stutters twice before alpha in s0, never before beta; memory 3.
inline CountingStutterScheduler exampleStutter() {
  CountingStutterScheduler tau(3);
  tau.set(0, 0, 2);
  tau.set(0, 1, 0);
  return tau;
}

inline Rational randomProbabilityPiece(std::mt19937& rng) {
  static const Rational pieces[] = {Rational(1, 4), Rational(1, 3), Rational(1, 2), Rational(2, 3), Rational(3, 4)};
  return pieces[std::uniform_int_distribution<std::size_t>(0, 4)(rng)];
}

/// Random distribution over up to `width` distinct targets in [0, n).
inline std::vector<Edge> randomDistribution(std::mt19937& rng, std::size_t n, std::size_t width = 2) {
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  const std::size_t count = std::uniform_int_distribution<std::size_t>(1, std::min(width, n))(rng);
  std::vector<StateIndex> targets;
  while (targets.size() < count) {
    const StateIndex t = pick(rng);
    if (std::find(targets.begin(), targets.end(), t) == targets.end()) targets.push_back(t);
  }
  std::vector<Edge> edges;
  Rational left = 1;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    Rational p = i + 1 == targets.size() ? left : left * randomProbabilityPiece(rng);
    edges.push_back({targets[i], p});
    left -= p;
  }
  return edges;
}

struct RandomMdpOptions {
  std::size_t minStates = 1;
  std::size_t maxStates = 4;
  std::size_t maxActions = 1;  // per state
  std::size_t actions = 2;     // size of the action alphabet
};

/// Random valid MDP over propositions a and b.
inline Mdp randomMdp(std::mt19937& rng, const RandomMdpOptions& o = {}) {
  Mdp mdp;
  mdp.declareAp("a");
  mdp.declareAp("b");
  const std::size_t n = std::uniform_int_distribution<std::size_t>(o.minStates, o.maxStates)(rng);
  std::bernoulli_distribution coin(0.5);
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<std::string> labels;
    if (coin(rng)) labels.push_back("a");
    if (coin(rng)) labels.push_back("b");
    mdp.addState("s" + std::to_string(s), labels);
  }
  for (std::size_t a = 0; a < o.actions; ++a) mdp.addAction("act" + std::to_string(a));
  for (std::size_t s = 0; s < n; ++s) {
    const std::size_t k = std::uniform_int_distribution<std::size_t>(1, std::min(o.maxActions, o.actions))(rng);
    std::vector<ActionIndex> acts;
    for (ActionIndex a = 0; a < o.actions; ++a) acts.push_back(a);
    std::shuffle(acts.begin(), acts.end(), rng);
    for (std::size_t i = 0; i < k; ++i) mdp.addChoice(s, acts[i], randomDistribution(rng, n));
  }
  return mdp;
}

/// Random scheduler with probabilities on a quarter grid.
inline MemorylessScheduler randomScheduler(std::mt19937& rng, const Mdp& mdp) {
  MemorylessScheduler sched;
  for (const auto& set : mdp.occurringActionSets()) {
    std::vector<std::size_t> quarters(set.size(), 0);
    for (int q = 0; q < 4; ++q) ++quarters[std::uniform_int_distribution<std::size_t>(0, set.size() - 1)(rng)];
    std::map<ActionIndex, Rational> dist;
    for (std::size_t i = 0; i < set.size(); ++i)
      if (quarters[i]) dist[set[i]] = Rational(quarters[i], 4);
    sched.set(set, dist);
  }
  return sched;
}

inline CountingStutterScheduler randomStutter(std::mt19937& rng, const Mdp& mdp, std::size_t m) {
  CountingStutterScheduler tau(m);
  for (StateIndex s = 0; s < mdp.numStates(); ++s)
    for (ActionIndex a : mdp.enabledActions(s)) tau.set(s, a, std::uniform_int_distribution<std::size_t>(0, m - 1)(rng));
  return tau;
}

inline Dtmc randomDtmc(std::mt19937& rng, std::size_t n) {
  Dtmc d;
  std::bernoulli_distribution coin(0.5);
  for (std::size_t s = 0; s < n; ++s) {
    std::set<std::string> labels;
    if (coin(rng)) labels.insert("a");
    if (coin(rng)) labels.insert("b");
    d.addState("d" + std::to_string(s), labels);
  }
  d.aps = {"a", "b"};
  for (std::size_t s = 0; s < n; ++s)
    for (const auto& e : randomDistribution(rng, n, 3)) d.addTransition(s, e.target, e.probability);
  return d;
}

/// Random sugared body over atoms a/b of the given stutter variables.
inline NodePtr randomBody(std::mt19937& rng, const std::vector<std::string>& vars, int depth);

inline NodePtr randomProb(std::mt19937& rng, const std::vector<std::string>& vars, int depth) {
  const int choice = std::uniform_int_distribution<int>(0, depth <= 0 ? 1 : 8)(rng);
  switch (choice) {
    case 0: return mkConst(randomProbabilityPiece(rng));
    case 1: return mkNext(randomBody(rng, vars, depth - 1));
    case 2: return mkUntil(randomBody(rng, vars, depth - 1), randomBody(rng, vars, depth - 1));
    case 3: return mkFinally(randomBody(rng, vars, depth - 1));
    case 4: return mkGlobally(randomBody(rng, vars, depth - 1));
    case 5: return mkArith(NodeKind::Add, randomProb(rng, vars, depth - 1), randomProb(rng, vars, depth - 1));
    case 6: return mkArith(NodeKind::Sub, randomProb(rng, vars, depth - 1), randomProb(rng, vars, depth - 1));
    case 7: return mkArith(NodeKind::Mul, randomProb(rng, vars, depth - 1), randomProb(rng, vars, depth - 1));
    default: return mkNext(randomBody(rng, vars, depth - 1));
  }
}

inline NodePtr randomBody(std::mt19937& rng, const std::vector<std::string>& vars, int depth) {
  std::uniform_int_distribution<std::size_t> var(0, vars.size() - 1);
  const int choice = std::uniform_int_distribution<int>(0, depth <= 0 ? 3 : 9)(rng);
  switch (choice) {
    case 0: return mkTrue();
    case 1: return mkFalse();
    case 2: return mkAtom("a", vars[var(rng)]);
    case 3: return mkAtom("b", vars[var(rng)]);
    case 4: return mkNot(randomBody(rng, vars, depth - 1));
    case 5: return mkAnd(randomBody(rng, vars, depth - 1), randomBody(rng, vars, depth - 1));
    case 6: return mkOr(randomBody(rng, vars, depth - 1), randomBody(rng, vars, depth - 1));
    case 7: return mkImplies(randomBody(rng, vars, depth - 1), randomBody(rng, vars, depth - 1));
    default: {
      static const CompareOp ops[] = {CompareOp::Less,      CompareOp::LessEq,  CompareOp::Equal,
                                      CompareOp::NotEqual, CompareOp::GreaterEq, CompareOp::Greater};
      return mkCompare(ops[std::uniform_int_distribution<int>(0, 5)(rng)], randomProb(rng, vars, depth - 1),
                       randomProb(rng, vars, depth - 1));
    }
  }
}

/// Solver command for tests that need one; empty when none was found at
/// configure time and $AHMC_SOLVER is unset.
inline std::string testSolver() {
  if (const char* env = std::getenv("AHMC_SOLVER"); env && *env) return env;
#ifdef AHMC_TEST_SOLVER
  return AHMC_TEST_SOLVER;
#else
  return "";
#endif
}

}  // namespace ahmc::test

#define AHMC_REQUIRE_SOLVER()                                     \
  do {                                                            \
    if (::ahmc::test::testSolver().empty()) GTEST_SKIP() << "no SMT solver available"; \
  } while (0)
