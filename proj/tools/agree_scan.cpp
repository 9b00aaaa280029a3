#include <cstdio>

#include "gmsx/mixing.hpp"
#include "gmsx/oracle.hpp"

using namespace gmsx;

struct Stats {
  double agree = 0.0;
  double relaxed_below = 0.0;  // relaxed energy < discrete best (gap cases)
  double rounded_opt = 0.0;    // rounded solution attains discrete best energy
};

static Stats run(int n_in, int n_out, int aux, int m, int k, int trials) {
  Stats st;
  for (int trial = 0; trial < trials; ++trial) {
    ClauseMatrix s = init_clause_matrix(n_in, n_out, aux, m, 1000 + trial);
    MixingConfig cfg;
    cfg.k = k;
    cfg.max_iters = 100;
    cfg.tol = 1e-6;
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

    if (relaxation_energy(s, relax) < oracle.best_value - 1e-9) st.relaxed_below += 1;

    // Energy of the fully rounded assignment (aux rounded too).
    std::vector<double> z_all = read_all(s, relax);
    std::vector<int> full(static_cast<std::size_t>(s.total_vars()), 1);
    for (int i = 0; i < n_in; ++i) full[static_cast<std::size_t>(s.var_col(i))] = fixed[static_cast<std::size_t>(i)].second;
    for (int o = 0; o < n_out; ++o)
      full[static_cast<std::size_t>(s.var_col(n_in + o))] = z_all[static_cast<std::size_t>(n_in + o)] >= 0.5 ? 1 : -1;
    for (int a = 0; a < aux; ++a) {
      const int col = s.aux_col(a);
      const double za = read_output_col(relax, col);
      full[static_cast<std::size_t>(col)] = za >= 0.5 ? 1 : -1;
    }
    if (discrete_energy(s, full) <= oracle.best_value + 1e-9) st.rounded_opt += 1;

    for (const auto& assignment : oracle.best_assignments) {
      bool match = true;
      for (int o = 0; o < n_out && match; ++o)
        match = rounded[static_cast<std::size_t>(o)] == (assignment[static_cast<std::size_t>(s.var_col(n_in + o))] > 0 ? 1 : 0);
      if (match) {
        st.agree += 1;
        break;
      }
    }
  }
  st.agree /= trials;
  st.relaxed_below /= trials;
  st.rounded_opt /= trials;
  return st;
}

int main() {
  const int trials = 100;
  std::printf("%-26s %7s %9s %11s\n", "shape", "agree", "gap<best", "rounded=opt");
  for (int m : {32, 64, 128, 256}) {
    Stats st = run(3, 3, 2, m, 0, trials);
    std::printf("3/3/2  m=%-4d             %7.2f %9.2f %11.2f\n", m, st.agree, st.relaxed_below, st.rounded_opt);
  }
  for (int m : {16, 32, 64, 128, 256}) {
    Stats st = run(8, 8, 0, m, 0, trials);
    std::printf("8/8/0  m=%-4d             %7.2f %9.2f %11.2f\n", m, st.agree, st.relaxed_below, st.rounded_opt);
  }
  for (int m : {32, 64, 128}) {
    Stats st = run(12, 6, 2, m, 0, trials);
    std::printf("12/6/2 m=%-4d             %7.2f %9.2f %11.2f\n", m, st.agree, st.relaxed_below, st.rounded_opt);
  }
  for (int m : {32, 64, 128}) {
    Stats st = run(16, 8, 0, m, 0, trials);
    std::printf("16/8/0 m=%-4d             %7.2f %9.2f %11.2f\n", m, st.agree, st.relaxed_below, st.rounded_opt);
  }
  return 0;
}
