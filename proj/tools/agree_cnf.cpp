// Agreement of mixing + rounding with the discrete energy minimizer on
// clause-structured instances (rows encode k-literal clauses with a truth
// column), and on planted-signal Gaussian instances.
#include <cstdio>

#include "gmsx/mixing.hpp"
#include "gmsx/oracle.hpp"

using namespace gmsx;

static ClauseMatrix cnf_instance(int n_in, int n_out, int aux, int m, int lits, std::uint64_t seed) {
  ClauseMatrix s;
  s.m = m;
  s.n_in = n_in;
  s.n_out = n_out;
  s.aux = aux;
  s.entries = Eigen::MatrixXd::Zero(m, s.total_vars());
  Rng rng(derive_seed(seed, fnv1a("cnf-instance")));
  const int n_logical = n_in + n_out;
  for (int j = 0; j < m; ++j) {
    s.entries(j, 0) = -1.0;
    std::vector<int> vars(static_cast<std::size_t>(n_logical));
    for (int v = 0; v < n_logical; ++v) vars[static_cast<std::size_t>(v)] = v;
    shuffle(vars, rng);
    for (int l = 0; l < lits; ++l) {
      const int col = s.var_col(vars[static_cast<std::size_t>(l)]);
      s.entries(j, col) = rng.uniform_int(2) ? 1.0 : -1.0;
    }
    s.entries.row(j) /= 2.0 * std::sqrt(static_cast<double>(lits) + 1.0);
  }
  return s;
}

static double rate(int n_in, int n_out, int aux, int m, int lits, int trials, bool cnf) {
  int agree = 0;
  for (int trial = 0; trial < trials; ++trial) {
    ClauseMatrix s = cnf ? cnf_instance(n_in, n_out, aux, m, lits, 1000 + trial)
                         : init_clause_matrix(n_in, n_out, aux, m, 1000 + trial);
    MixingConfig cfg;
    cfg.seed = 2000 + static_cast<std::uint64_t>(trial);
    Rng bits(3000 + static_cast<std::uint64_t>(trial));
    std::vector<double> z_in(static_cast<std::size_t>(n_in));
    std::vector<std::pair<int, int>> fixed;
    for (int i = 0; i < n_in; ++i) {
      const int b = static_cast<int>(bits.uniform_int(2));
      z_in[static_cast<std::size_t>(i)] = b;
      fixed.push_back({s.var_col(i), b == 1 ? 1 : -1});
    }
    Relaxation relax = relax_inputs(s, z_in, cfg);
    mixing_forward(s, relax, cfg);
    std::vector<int> rounded = round_outputs(read_outputs(s, relax));
    OracleResult oracle = brute_force_energy_min(s, fixed);
    for (const auto& assignment : oracle.best_assignments) {
      bool match = true;
      for (int o = 0; o < n_out && match; ++o)
        match = rounded[static_cast<std::size_t>(o)] == (assignment[static_cast<std::size_t>(s.var_col(n_in + o))] > 0 ? 1 : 0);
      if (match) {
        ++agree;
        break;
      }
    }
  }
  return static_cast<double>(agree) / trials;
}

static double rate_base(int n_in, int n_out, int aux, int m, int lits, int trials, bool cnf, std::uint64_t base) {
  int agree = 0;
  for (int trial = 0; trial < trials; ++trial) {
    const std::uint64_t t = base + static_cast<std::uint64_t>(trial);
    ClauseMatrix s = cnf ? cnf_instance(n_in, n_out, aux, m, lits, t) : init_clause_matrix(n_in, n_out, aux, m, t);
    MixingConfig cfg;
    cfg.seed = derive_seed(t, 1);
    Rng bits(derive_seed(t, 2));
    std::vector<double> z_in(static_cast<std::size_t>(n_in));
    std::vector<std::pair<int, int>> fixed;
    for (int i = 0; i < n_in; ++i) {
      const int b = static_cast<int>(bits.uniform_int(2));
      z_in[static_cast<std::size_t>(i)] = b;
      fixed.push_back({s.var_col(i), b == 1 ? 1 : -1});
    }
    Relaxation relax = relax_inputs(s, z_in, cfg);
    mixing_forward(s, relax, cfg);
    std::vector<int> rounded = round_outputs(read_outputs(s, relax));
    OracleResult oracle = brute_force_energy_min(s, fixed);
    for (const auto& assignment : oracle.best_assignments) {
      bool match = true;
      for (int o = 0; o < n_out && match; ++o)
        match = rounded[static_cast<std::size_t>(o)] == (assignment[static_cast<std::size_t>(s.var_col(n_in + o))] > 0 ? 1 : 0);
      if (match) {
        ++agree;
        break;
      }
    }
  }
  return static_cast<double>(agree) / trials;
}

int main() {
  for (std::uint64_t base : {0ull, 500ull, 9000ull, 123456ull}) {
    std::printf("cnf2 6/8/0 m=24 50@base %-7llu: %.3f\n", static_cast<unsigned long long>(base),
                rate_base(6, 8, 0, 24, 2, 50, true, base));
  }
  for (std::uint64_t base : {0ull, 10ull, 20ull, 30ull, 40ull}) {
    std::printf("gauss 3/3/2 m=128 10@base %-4llu: %.1f/10\n", static_cast<unsigned long long>(base),
                10.0 * rate_base(3, 3, 2, 128, 0, 10, false, base));
  }
  return 0;
}
