#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <vector>

#include "gmsx/clause_matrix.hpp"
#include "gmsx/common.hpp"
#include "gmsx/sign_matrix.hpp"

namespace gmsx {

struct OracleResult {
  double best_value = 0.0;
  std::vector<std::vector<int>> best_assignments;  // +/-1 vectors attaining best_value
  bool exhaustive = false;
};

// Exhaustive MAXSAT: all 2^n assignments, every maximizer returned in
// canonical (enumeration-independent) order.
inline OracleResult brute_force_maxsat(const SignMatrix& signs) {
  signs.validate();
  require(signs.n <= 20, "brute_force_maxsat: refusing n > 20 variables");
  OracleResult result;
  result.exhaustive = true;
  int best = -1;
  std::vector<int> assignment(static_cast<std::size_t>(signs.n));
  const std::uint32_t limit = 1u << signs.n;
  for (std::uint32_t code = 0; code < limit; ++code) {
    for (int i = 0; i < signs.n; ++i) assignment[static_cast<std::size_t>(i)] = (code >> i) & 1 ? 1 : -1;
    const int value = maxsat_objective(assignment, signs);
    if (value > best) {
      best = value;
      result.best_assignments.clear();
    }
    if (value == best) result.best_assignments.push_back(assignment);
  }
  result.best_value = best;
  std::sort(result.best_assignments.begin(), result.best_assignments.end());
  return result;
}

// <S^T S, v v^T> = ||S v||^2 for a +/-1 assignment over all columns
// (truth column included in v).
inline double discrete_energy(const ClauseMatrix& s, const std::vector<int>& signs_all) {
  require(static_cast<int>(signs_all.size()) == s.total_vars(), "discrete_energy: assignment length mismatch");
  Eigen::VectorXd v(s.total_vars());
  for (int i = 0; i < s.total_vars(); ++i) v[i] = signs_all[static_cast<std::size_t>(i)];
  return (s.entries * v).squaredNorm();
}

// Minimizes <S^T S, v v^T> over +/-1 assignments of the free columns with
// the truth column fixed to +1 and `fixed` columns pinned. fixed maps
// column index -> +/-1 (must cover the truth column or leave it implicit).
// Assignments are returned over all columns in canonical order.
inline OracleResult brute_force_energy_min(const ClauseMatrix& s, const std::vector<std::pair<int, int>>& fixed) {
  s.validate();
  const int total = s.total_vars();
  std::vector<int> base(static_cast<std::size_t>(total), 0);
  base[0] = 1;  // truth
  for (const auto& [col, sign] : fixed) {
    require(col >= 1 && col < total, "brute_force_energy_min: fixed column out of range");
    require(sign == 1 || sign == -1, "brute_force_energy_min: fixed sign must be +/-1");
    base[static_cast<std::size_t>(col)] = sign;
  }
  std::vector<int> free_cols;
  for (int c = 0; c < total; ++c)
    if (base[static_cast<std::size_t>(c)] == 0) free_cols.push_back(c);
  require(static_cast<int>(free_cols.size()) <= 16, "brute_force_energy_min: refusing more than 16 free variables");

  OracleResult result;
  result.exhaustive = true;
  Eigen::VectorXd v(total);
  for (int c = 0; c < total; ++c) v[c] = base[static_cast<std::size_t>(c)];
  double best = std::numeric_limits<double>::infinity();
  const std::uint32_t count = 1u << free_cols.size();
  for (std::uint32_t code = 0; code < count; ++code) {
    for (std::size_t b = 0; b < free_cols.size(); ++b) v[free_cols[b]] = (code >> b) & 1 ? 1.0 : -1.0;
    const double value = (s.entries * v).squaredNorm();
    if (value < best - 1e-12) {
      best = value;
      result.best_assignments.clear();
    }
    if (value <= best + 1e-12) {
      std::vector<int> a(static_cast<std::size_t>(total));
      for (int c = 0; c < total; ++c) a[static_cast<std::size_t>(c)] = v[c] > 0 ? 1 : -1;
      result.best_assignments.push_back(std::move(a));
    }
  }
  result.best_value = best;
  std::sort(result.best_assignments.begin(), result.best_assignments.end());
  result.best_assignments.erase(std::unique(result.best_assignments.begin(), result.best_assignments.end()),
                                result.best_assignments.end());
  return result;
}

}  // namespace gmsx
