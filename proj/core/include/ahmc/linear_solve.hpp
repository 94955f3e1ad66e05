#pragma once

#include "ahmc/rational.hpp"

#include <stdexcept>
#include <vector>

namespace ahmc {

class SingularSystem : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Solves A x = b exactly. Rows are scaled to integers and reduced with
/// fraction-free (Bareiss) elimination, so intermediate entries stay
/// polynomial in the input size. Throws SingularSystem when A is singular.
std::vector<Rational> solveLinearSystem(const std::vector<std::vector<Rational>>& a,
                                        const std::vector<Rational>& b);

}  // namespace ahmc
