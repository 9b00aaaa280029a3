// Measures how often rounded mixing output matches the brute-force energy
// minimizer, across instance shapes and mixing settings.
#include <cstdio>

#include "gmsx/mixing.hpp"
#include "gmsx/oracle.hpp"

using namespace gmsx;

static double rate(int n_in, int n_out, int aux, int m, int trials, const MixingConfig& base) {
  int agree = 0;
  for (int trial = 0; trial < trials; ++trial) {
    ClauseMatrix s = init_clause_matrix(n_in, n_out, aux, m, 1000 + trial);
    MixingConfig cfg = base;
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

int main() {
  MixingConfig defaults;
  MixingConfig tight;
  tight.max_iters = 200;
  tight.tol = 1e-8;
  std::printf("3/3/2  defaults: %.3f\n", rate(3, 3, 2, 8, 100, defaults));
  std::printf("3/3/2  tight:    %.3f\n", rate(3, 3, 2, 8, 100, tight));
  std::printf("4/5/3  defaults: %.3f\n", rate(4, 5, 3, 12, 100, defaults));
  std::printf("4/5/3  tight:    %.3f\n", rate(4, 5, 3, 12, 100, tight));
  return 0;
}
