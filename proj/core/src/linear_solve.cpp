#include "ahmc/linear_solve.hpp"

#include <utility>

namespace ahmc {

std::vector<Rational> solveLinearSystem(const std::vector<std::vector<Rational>>& a,
                                        const std::vector<Rational>& b) {
  const std::size_t n = a.size();
  if (b.size() != n) throw std::invalid_argument("solveLinearSystem: dimension mismatch");

  // Augmented integer matrix [A | b], each row multiplied by the lcm of its
  // denominators.
  std::vector<std::vector<mpz_class>> m(n, std::vector<mpz_class>(n + 1));
  for (std::size_t r = 0; r < n; ++r) {
    if (a[r].size() != n) throw std::invalid_argument("solveLinearSystem: matrix is not square");
    mpz_class scale = b[r].get_den();
    for (const auto& x : a[r]) mpz_lcm(scale.get_mpz_t(), scale.get_mpz_t(), x.get_den_mpz_t());
    for (std::size_t c = 0; c < n; ++c) m[r][c] = a[r][c].get_num() * (scale / a[r][c].get_den());
    m[r][n] = b[r].get_num() * (scale / b[r].get_den());
  }

  mpz_class previous = 1;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pivot = k;
    while (pivot < n && m[pivot][k] == 0) ++pivot;
    if (pivot == n) throw SingularSystem("linear system is singular");
    if (pivot != k) std::swap(m[pivot], m[k]);
    for (std::size_t r = k + 1; r < n; ++r) {
      for (std::size_t c = k + 1; c <= n; ++c) {
        m[r][c] = (m[r][c] * m[k][k] - m[r][k] * m[k][c]);
        mpz_divexact(m[r][c].get_mpz_t(), m[r][c].get_mpz_t(), previous.get_mpz_t());
      }
      m[r][k] = 0;
    }
    previous = m[k][k];
  }

  std::vector<Rational> x(n);
  for (std::size_t r = n; r-- > 0;) {
    Rational acc(m[r][n]);
    for (std::size_t c = r + 1; c < n; ++c) acc -= Rational(m[r][c]) * x[c];
    x[r] = acc / Rational(m[r][r]);
    x[r].canonicalize();
  }
  return x;
}

}  // namespace ahmc
