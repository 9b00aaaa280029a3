#pragma once

#include <vector>

#include "gmsx/common.hpp"

namespace gmsx {

// Discrete clause structure: entries[j][i] in {-1, 0, +1} is the sign of
// variable i in clause j (0 = absent). Row j must contain a literal.
struct SignMatrix {
  int m = 0;
  int n = 0;
  std::vector<int> entries;  // row-major m x n

  int at(int clause, int var) const { return entries[static_cast<std::size_t>(clause) * n + var]; }

  void validate() const {
    require(m >= 1 && n >= 1, "SignMatrix: m and n must be positive");
    require(entries.size() == static_cast<std::size_t>(m) * n, "SignMatrix: entry count mismatch");
    for (int j = 0; j < m; ++j) {
      bool nonzero = false;
      for (int i = 0; i < n; ++i) {
        const int s = at(j, i);
        require(s == -1 || s == 0 || s == 1, "SignMatrix: entries must be in {-1,0,1}");
        nonzero |= (s != 0);
      }
      require(nonzero, "SignMatrix: clause row with no literals");
    }
  }
};

// Random clause structure: m clauses, each with `lits` distinct literals
// over n variables.
inline SignMatrix random_clause_signs(int n, int m, int lits, Rng& rng) {
  require(n >= 1 && m >= 1, "random_clause_signs: dimensions must be positive");
  require(lits >= 1 && lits <= n, "random_clause_signs: literal count out of range");
  SignMatrix signs;
  signs.m = m;
  signs.n = n;
  signs.entries.assign(static_cast<std::size_t>(m) * n, 0);
  std::vector<int> vars(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) vars[static_cast<std::size_t>(v)] = v;
  for (int j = 0; j < m; ++j) {
    shuffle(vars, rng);
    for (int l = 0; l < lits; ++l)
      signs.entries[static_cast<std::size_t>(j) * n + vars[static_cast<std::size_t>(l)]] = rng.uniform_int(2) ? 1 : -1;
  }
  return signs;
}

// Number of satisfied clauses of `signs` under a +/-1 assignment: clause j
// counts iff some literal has s_ij * v_i > 0.
inline int maxsat_objective(const std::vector<int>& assignment, const SignMatrix& signs) {
  require(static_cast<int>(assignment.size()) == signs.n, "maxsat_objective: assignment length != variable count");
  for (int v : assignment) require(v == -1 || v == 1, "maxsat_objective: assignment values must be +/-1");
  int satisfied = 0;
  for (int j = 0; j < signs.m; ++j) {
    for (int i = 0; i < signs.n; ++i) {
      if (signs.at(j, i) * assignment[i] > 0) {
        ++satisfied;
        break;
      }
    }
  }
  return satisfied;
}

}  // namespace gmsx
