#include "support.hpp"

#include "ahmc/mdp_io.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace ahmc;
using namespace ahmc::test;

TEST(Rational, ParsesDecimalsAndFractionsExactly) {
  EXPECT_EQ(parseRational("0.1"), Rational(1, 10));
  EXPECT_EQ(parseRational("3/12"), Rational(1, 4));
  EXPECT_EQ(parseRational("-1.5"), Rational(-3, 2));
  EXPECT_EQ(parseRational("1e-3"), Rational(1, 1000));
  EXPECT_EQ(parseRational("2.5E2"), Rational(250));
  EXPECT_THROW(parseRational("1/0"), ParseError);
  EXPECT_THROW(parseRational("abc"), ParseError);
  EXPECT_THROW(parseRational(""), ParseError);
}

TEST(Rational, SmtLiterals) {
  EXPECT_EQ(toSmtReal(Rational(1)), "1.0");
  EXPECT_EQ(toSmtReal(Rational(1, 4)), "(/ 1.0 4.0)");
  EXPECT_EQ(toSmtReal(Rational(-3, 2)), "(- (/ 3.0 2.0))");
  EXPECT_EQ(toString(Rational(7, 8)), "7/8");
}

TEST(Mdp, ExampleIsValid) {
  const Mdp mdp = exampleMdp();
  EXPECT_TRUE(validateMdp(mdp).empty());
  EXPECT_EQ(mdp.enabledActions(0), (ActionSet{0, 1}));
  EXPECT_EQ(mdp.enabledActions(3), (ActionSet{0}));
  EXPECT_EQ(mdp.numTransitions(), 6u);
}

TEST(Mdp, ReportsNonStochasticRow) {
  Mdp mdp;
  auto s0 = mdp.addState("s0");
  auto s1 = mdp.addState("s1");
  mdp.addChoice(s0, mdp.addAction("alpha"), {{s1, Rational(9, 10)}});
  mdp.addChoice(s0, mdp.addAction("beta"), {{s1, Rational(1)}});
  mdp.addChoice(s1, mdp.addAction("loop"), {{s1, Rational(1)}});
  const auto violations = validateMdp(mdp);
  ASSERT_EQ(violations.size(), 1u);
  EXPECT_EQ(violations[0].kind, Violation::Kind::NotStochastic);
  EXPECT_EQ(violations[0].state, "s0");
  EXPECT_EQ(violations[0].action, "alpha");
  EXPECT_NE(describe(violations[0]).find("s0"), std::string::npos);
}

TEST(Mdp, ReportsStateWithoutEnabledAction) {
  Mdp mdp;
  mdp.addState("s0");
  auto s1 = mdp.addState("s1");
  mdp.addChoice(s1, mdp.addAction("loop"), {{s1, Rational(1)}});
  const auto violations = validateMdp(mdp);
  ASSERT_EQ(violations.size(), 1u);
  EXPECT_EQ(violations[0].kind, Violation::Kind::NoEnabledAction);
  EXPECT_EQ(violations[0].state, "s0");
}

TEST(Mdp, ReportsProbabilityOutOfRange) {
  Mdp mdp;
  auto s0 = mdp.addState("s0");
  mdp.addChoice(s0, mdp.addAction("loop"), {{s0, Rational(1)}});
  mdp.addChoice(s0, mdp.addAction("odd"), {{s0, Rational(3, 2)}});
  const auto violations = validateMdp(mdp);
  ASSERT_EQ(violations.size(), 1u);
  EXPECT_EQ(violations[0].kind, Violation::Kind::BadProbability);
}

TEST(Mdp, UnknownStateThrows) {
  const Mdp mdp = exampleMdp();
  EXPECT_THROW(mdp.stateIndex("nope"), ModelError);
  EXPECT_THROW(mdp.enabledActions(17), ModelError);
}

TEST(Mdp, EnabledActionsMatchRowSumScan) {
  std::mt19937 rng(11);
  for (int round = 0; round < 50; ++round) {
    Mdp mdp = randomMdp(rng, {1, 4, 3, 3});
    // Add a broken row now and then; it must not count as enabled.
    if (round % 3 == 0) {
      const ActionIndex extra = mdp.addAction("broken");
      mdp.addChoice(0, extra, {{0, Rational(1, 2)}});
    }
    for (StateIndex s = 0; s < mdp.numStates(); ++s) {
      ActionSet expected;
      for (ActionIndex a = 0; a < mdp.numActions(); ++a) {
        Rational sum = 0;
        for (StateIndex t = 0; t < mdp.numStates(); ++t) sum += mdp.probability(s, a, t);
        if (sum == 1) expected.push_back(a);
      }
      EXPECT_EQ(mdp.enabledActions(s), expected);
    }
  }
}

TEST(Mdp, DuplicateDeclarationsThrow) {
  Mdp mdp;
  mdp.addState("s0");
  EXPECT_THROW(mdp.addState("s0"), ModelError);
  auto a = mdp.addAction("x");
  mdp.addChoice(0, a, {{0, Rational(1)}});
  EXPECT_THROW(mdp.addChoice(0, a, {{0, Rational(1)}}), ModelError);
}

TEST(Scheduler, ValidatesDistributions) {
  MemorylessScheduler sched;
  EXPECT_THROW(sched.set({0, 1}, {{0, Rational(1, 2)}}), ModelError);
  EXPECT_THROW(sched.set({0}, {{1, Rational(1)}}), ModelError);
  sched.set({0, 1}, {{0, Rational(1, 3)}, {1, Rational(2, 3)}});
  EXPECT_EQ(sched.probability({0, 1}, 1), Rational(2, 3));
  EXPECT_TRUE(sched.covers({0, 1}));
  EXPECT_FALSE(sched.covers({0}));
}

TEST(StutterScheduler, DurationsBelowMemory) {
  EXPECT_THROW(CountingStutterScheduler(0), ModelError);
  CountingStutterScheduler tau(3);
  tau.set(0, 0, 2);
  EXPECT_THROW(tau.set(0, 1, 3), ModelError);
  EXPECT_EQ(tau.duration(0, 0), 2u);
  EXPECT_EQ(tau.duration(5, 5), 0u);
}

TEST(MdpIo, RoundTripsThroughText) {
  const Mdp mdp = exampleMdp();
  const std::string text = writeMdp(mdp);
  const Mdp again = parseValidMdp(text);
  EXPECT_EQ(writeMdp(again), text);
  EXPECT_EQ(again.probability(0, 0, 1), Rational(1, 2));
}

TEST(MdpIo, ParsesCommentsDecimalsAndForwardReferences) {
  const Mdp mdp = parseValidMdp(
      "mdp  # header\n"
      "state u a\n"
      "action u go : v 0.25, u 3/4   # forward reference to v\n"
      "state v\n"
      "action v go : v 1\n");
  EXPECT_EQ(mdp.numStates(), 2u);
  EXPECT_EQ(mdp.probability(0, 0, 1), Rational(1, 4));
  EXPECT_EQ(mdp.probability(0, 0, 0), Rational(3, 4));
}

TEST(MdpIo, ErrorsCarryLineNumbers) {
  try {
    parseMdp("mdp\nstate u\nstate u\n");
    FAIL() << "duplicate state accepted";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
  }
  try {
    parseMdp("mdp\nstate u\naction u go : w 1\n");
    FAIL() << "unknown successor accepted";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
  }
  EXPECT_THROW(parseMdp("state u\n"), ParseError);
  EXPECT_THROW(parseMdp("mdp\nstate u\naction u go : u 1\naction u go : u 1\n"), ParseError);
  EXPECT_THROW(parseValidMdp("mdp\nstate u\naction u go : u 0.9\n"), ModelError);
}
