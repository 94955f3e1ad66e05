#pragma once

#include "ahmc/mdp.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace ahmc {

/// A case-study model together with the hyperproperty checked on it.
struct CaseStudyFixture {
  std::string name;                 // CE, TL or ACDB
  std::vector<std::size_t> params;  // CE: h1 h2, TL: k, ACDB: none
  Mdp mdp;
  std::string formula;
  /// State/transition counts reported for the original case study, used as
  /// a soft comparison only.
  std::size_t targetStates = 0;
  std::size_t targetTransitions = 0;
};

/// Two threads `while h>0 do h := h-1; l := 2` and `l := 1` interleaved by
/// the scheduler, started with h = h1 or h = h2.
CaseStudyFixture buildCE(std::size_t h1, std::size_t h2);

/// Modular exponentiation racing a counter; the secret key is all zeros
/// (k steps) or all ones (2k steps), and the counter's final value j is
/// observable. `onlyFirst` keeps just the l = 0 conjunct.
CaseStudyFixture buildTL(std::size_t k, bool onlyFirst = false);

/// Two threads synchronised by a semaphore printing a, b, c, d; the second
/// thread enters the critical region only when h = 1.
CaseStudyFixture buildACDB();

/// Writes model.mdp and formula.txt into `dir` (created if missing).
void writeFixture(const CaseStudyFixture& fixture, const std::filesystem::path& dir);

}  // namespace ahmc
