#pragma once

#include "ahmc/mdp.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace ahmc {

// Line-based model format:
//
//   mdp
//   state <id> [<ap> ...]
//   action <state-id> <action-id> : <succ-id> <prob> (, <succ-id> <prob>)*
//
// `#` starts a comment. Probabilities are decimals or `p/q` and are kept
// exact. Successors may be declared after their first use.

/// Structural parse only: syntax, duplicate declarations and unknown ids
/// raise ParseError. Stochasticity is checked by validateMdp.
Mdp parseMdp(std::string_view text);

/// parseMdp followed by validateMdp; throws ModelError listing violations.
Mdp parseValidMdp(std::string_view text);

Mdp loadMdp(const std::filesystem::path& path, bool validate = true);

std::string writeMdp(const Mdp& mdp);

std::string readTextFile(const std::filesystem::path& path);

}  // namespace ahmc
