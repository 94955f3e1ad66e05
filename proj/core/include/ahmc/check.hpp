#pragma once

#include "ahmc/encoder.hpp"
#include "ahmc/solver.hpp"

#include <filesystem>
#include <optional>

namespace ahmc {

struct CheckOptions {
  std::size_t memory = 1;
  EncodeOptions encode;
  SolverConfig solver;
  /// Write the generated system here before solving.
  std::optional<std::filesystem::path> dumpSmt;
};

struct CheckReport {
  CheckOutcome outcome;
  EncodeMetrics metrics;
  SolverStats solverStats;
  double encodeSeconds = 0;
  double solveSeconds = 0;
};

/// How a formula reaches the encoder: directly for an existential
/// scheduler/stutter prefix, via negatePrefix for a universal one.
/// Throws UnsupportedFragment for anything else.
bool needsDualization(const HyperFormula& formula);

/// Encodes, solves and interprets the verdict for the original formula.
CheckReport checkFormula(const Mdp& mdp, const HyperFormula& formula, const CheckOptions& options);

}  // namespace ahmc
