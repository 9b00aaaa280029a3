#include <cstdio>

#include "gmsx/mixing.hpp"

using namespace gmsx;

int main(int argc, char** argv) {
  const int sweeps = argc > 1 ? std::atoi(argv[1]) : 1;
  const int aux = argc > 2 ? std::atoi(argv[2]) : 0;
  ClauseMatrix s = init_clause_matrix(1, 1, aux, 2, 3);
  MixingConfig cfg;
  cfg.seed = 5;
  cfg.k = 2;
  cfg.max_iters = sweeps;
  cfg.tol = 1e-300;
  std::vector<double> z_in = {0.37};
  std::vector<double> c = {1.0};

  auto loss = [&](const ClauseMatrix& sm, const std::vector<double>& zi) {
    Relaxation relax = relax_inputs(sm, zi, cfg);
    mixing_forward(sm, relax, cfg);
    return read_outputs(sm, relax)[0];
  };

  Relaxation relax = relax_inputs(s, z_in, cfg);
  OwnedTrace trace = mixing_forward(s, relax, cfg);
  auto [d_s, d_z] = layer_backward(trace, c);

  const double h = 1e-6;
  for (int r = 0; r < s.m; ++r)
    for (int col = 0; col < s.total_vars(); ++col) {
      ClauseMatrix plus = s, minus = s;
      plus.entries(r, col) += h;
      minus.entries(r, col) -= h;
      const double fd = (loss(plus, z_in) - loss(minus, z_in)) / (2 * h);
      std::printf("dS(%d,%d): analytic=% .8f fd=% .8f\n", r, col, d_s(r, col), fd);
    }
  const double fdz = (loss(s, {z_in[0] + h}) - loss(s, {z_in[0] - h})) / (2 * h);
  std::printf("dz[0]:  analytic=% .8f fd=% .8f\n", d_z[0], fdz);
  return 0;
}
