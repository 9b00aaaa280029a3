#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>

#include "gmsx/clause_matrix.hpp"
#include "gmsx/mixing.hpp"
#include "gmsx/oracle.hpp"
#include "gmsx/sign_matrix.hpp"

using namespace gmsx;

TEST_CASE("maxsat_objective counts satisfied clauses") {
  SignMatrix signs;
  signs.m = 1;
  signs.n = 3;
  signs.entries = {1, 1, 1};
  CHECK(maxsat_objective({-1, -1, -1}, signs) == 0);
  CHECK(maxsat_objective({-1, 1, -1}, signs) == 1);

  SignMatrix two;
  two.m = 2;
  two.n = 2;
  two.entries = {1, -1, 0, 1};
  CHECK(maxsat_objective({1, 1}, two) == 2);

  CHECK_THROWS_AS(maxsat_objective({1, 1}, signs), std::invalid_argument);
}

TEST_CASE("maxsat_objective at oracle maximizer equals oracle best") {
  Rng rng(404);
  SignMatrix signs;
  signs.m = 12;
  signs.n = 8;
  signs.entries.resize(96);
  for (auto& e : signs.entries) e = static_cast<int>(rng.uniform_int(3)) - 1;
  for (int j = 0; j < signs.m; ++j)
    if (std::all_of(signs.entries.begin() + j * 8, signs.entries.begin() + (j + 1) * 8, [](int v) { return v == 0; }))
      signs.entries[static_cast<std::size_t>(j) * 8] = 1;
  OracleResult oracle = brute_force_maxsat(signs);
  REQUIRE(!oracle.best_assignments.empty());
  for (const auto& a : oracle.best_assignments) CHECK(maxsat_objective(a, signs) == static_cast<int>(oracle.best_value));
}

TEST_CASE("init_clause_matrix layout, determinism and scale") {
  ClauseMatrix s = init_clause_matrix(2, 3, 0, 5, 42);
  CHECK(s.entries.rows() == 5);
  CHECK(s.entries.cols() == 6);

  ClauseMatrix a = init_clause_matrix(10, 10, 100, 200, 9);
  ClauseMatrix b = init_clause_matrix(10, 10, 100, 200, 9);
  CHECK(a.entries == b.entries);
  CHECK(a.entries.cols() == 121);

  const double stddev = 1.0 / std::sqrt(121.0);
  const double mean = a.entries.mean();
  const double entries = static_cast<double>(a.entries.size());
  CHECK(std::abs(mean) < 3.0 * stddev / std::sqrt(entries));
  const double var = (a.entries.array() - mean).square().sum() / entries;
  CHECK(var == Catch::Approx(stddev * stddev).epsilon(0.05));

  CHECK_THROWS_AS(init_clause_matrix(0, 10, 0, 5, 1), std::invalid_argument);
  CHECK_THROWS_AS(init_clause_matrix(10, 0, 0, 5, 1), std::invalid_argument);
  CHECK_THROWS_AS(init_clause_matrix(10, 10, 0, 0, 1), std::invalid_argument);
}

TEST_CASE("relax_inputs aligns input rows with the truth vector") {
  ClauseMatrix s = init_clause_matrix(3, 2, 1, 4, 5);
  MixingConfig cfg;
  cfg.seed = 17;
  Relaxation relax = relax_inputs(s, {1.0, 0.0, 0.5}, cfg);

  const auto truth = relax.vectors.col(0);
  CHECK(relax.vectors.col(s.var_col(0)).dot(truth) == Catch::Approx(1.0).margin(1e-12));
  CHECK(relax.vectors.col(s.var_col(1)).dot(truth) == Catch::Approx(-1.0).margin(1e-12));
  CHECK(relax.vectors.col(s.var_col(2)).dot(truth) == Catch::Approx(0.0).margin(1e-12));
  for (int c = 0; c < relax.total_vars(); ++c) CHECK(relax.vectors.col(c).norm() == Catch::Approx(1.0).margin(1e-6));

  CHECK_THROWS_AS(relax_inputs(s, {1.2, 0.0, 0.5}, cfg), std::invalid_argument);
}

TEST_CASE("read_outputs inverts the input relaxation") {
  ClauseMatrix s = init_clause_matrix(4, 2, 0, 3, 6);
  MixingConfig cfg;
  cfg.seed = 3;
  std::vector<double> z_in = {0.0, 0.25, 0.625, 1.0};
  Relaxation relax = relax_inputs(s, z_in, cfg);
  std::vector<double> all = read_all(s, relax);
  for (int i = 0; i < s.n_in; ++i) CHECK(all[static_cast<std::size_t>(i)] == Catch::Approx(z_in[static_cast<std::size_t>(i)]).margin(1e-9));
}

TEST_CASE("mixing_forward invariants: unit norms, monotone energy, frozen inputs") {
  ClauseMatrix s = init_clause_matrix(4, 4, 3, 10, 21);
  MixingConfig cfg;
  cfg.seed = 33;
  std::vector<double> z_in = {0.9, 0.2, 0.7, 0.4};
  Relaxation relax = relax_inputs(s, z_in, cfg);
  const Eigen::MatrixXd before = relax.vectors;
  OwnedTrace trace = mixing_forward(s, relax, cfg);

  for (int c = 0; c < relax.total_vars(); ++c) {
    const double norm = relax.vectors.col(c).norm();
    CHECK(norm >= 1.0 - 1e-6);
    CHECK(norm <= 1.0 + 1e-6);
  }
  // Input and truth columns bit-identical before and after.
  CHECK(relax.vectors.col(0) == before.col(0));
  for (int i = 0; i < s.n_in; ++i) CHECK(relax.vectors.col(s.var_col(i)) == before.col(s.var_col(i)));

  REQUIRE(trace.sweeps() >= 1);
  for (std::size_t i = 1; i < trace.sweep_energy().size(); ++i) {
    const double prev = trace.sweep_energy()[i - 1];
    CHECK(trace.sweep_energy()[i] <= prev + 1e-9 * std::abs(prev));
  }
  // Recorded energies track the true relaxed objective.
  CHECK(trace.sweep_energy().back() == Catch::Approx(relaxation_energy(s, relax)).epsilon(1e-9));
}

TEST_CASE("mixing_forward converges to the per-row fixed point") {
  ClauseMatrix s = init_clause_matrix(3, 3, 2, 8, 77);
  MixingConfig cfg;
  cfg.seed = 5;
  cfg.max_iters = 200;
  cfg.tol = 1e-10;
  Relaxation relax = relax_inputs(s, {0.8, 0.1, 0.6}, cfg);
  OwnedTrace trace = mixing_forward(s, relax, cfg);
  REQUIRE(trace.sweeps() < cfg.max_iters);

  Eigen::MatrixXd w = relax.vectors * s.entries.transpose();
  for (int var = s.n_in; var < s.logical_vars(); ++var) {
    const int col = s.var_col(var);
    Eigen::VectorXd g = w * s.entries.col(col) - s.entries.col(col).squaredNorm() * relax.vectors.col(col);
    Eigen::VectorXd expected = -g / g.norm();
    CHECK((relax.vectors.col(col) - expected).norm() < 1e-6);
  }
}

TEST_CASE("mixing is deterministic and replayable") {
  ClauseMatrix s = init_clause_matrix(5, 4, 2, 12, 99);
  MixingConfig cfg;
  cfg.seed = 123;
  std::vector<double> z_in = {0.3, 0.8, 0.55, 0.1, 0.95};

  Relaxation r1 = relax_inputs(s, z_in, cfg);
  OwnedTrace t1 = mixing_forward(s, r1, cfg);
  Relaxation r2 = relax_inputs(s, z_in, cfg);
  OwnedTrace t2 = mixing_forward(s, r2, cfg);
  CHECK(r1.vectors == r2.vectors);
  CHECK(t1.sweeps() == t2.sweeps());

  // Trace replay reproduces the forward output bit-exactly.
  Eigen::MatrixXd replayed = replay_forward(t1);
  CHECK(replayed == t1.trace.v_final);
}

TEST_CASE("rounded mixing output matches the discrete energy minimizer on most instances") {
  int agree = 0;
  const int trials = 10;
  for (int trial = 0; trial < trials; ++trial) {
    const std::uint64_t t = static_cast<std::uint64_t>(trial);
    ClauseMatrix s = init_clause_matrix(3, 3, 2, 128, t);
    MixingConfig cfg;
    cfg.seed = derive_seed(t, 1);
    Rng bits(derive_seed(t, 2));
    std::vector<double> z_in(3);
    std::vector<std::pair<int, int>> fixed;
    for (int i = 0; i < 3; ++i) {
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
      for (int o = 0; o < s.n_out; ++o) {
        const int want = assignment[static_cast<std::size_t>(s.var_col(s.n_in + o))] > 0 ? 1 : 0;
        if (rounded[static_cast<std::size_t>(o)] != want) {
          match = false;
          break;
        }
      }
      if (match) {
        ++agree;
        break;
      }
    }
  }
  CHECK(agree >= 9);
}

TEST_CASE("mixing recovers discrete optima on clause-structured instances") {
  // 2-literal clause rows with a truth column; 8 free variables.
  int agree = 0;
  const int trials = 20;
  for (int trial = 0; trial < trials; ++trial) {
    const std::uint64_t t = static_cast<std::uint64_t>(trial);
    Rng gen(derive_seed(t, fnv1a("cnf-agree")));
    SignMatrix signs = random_clause_signs(14, 24, 2, gen);
    ClauseMatrix s = embed_sign_matrix(signs, 6, 8, 0);
    MixingConfig cfg;
    cfg.seed = derive_seed(t, 1);
    Rng bits(derive_seed(t, 2));
    std::vector<double> z_in(6);
    std::vector<std::pair<int, int>> fixed;
    for (int i = 0; i < 6; ++i) {
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
      for (int o = 0; o < s.n_out && match; ++o)
        match = rounded[static_cast<std::size_t>(o)] == (assignment[static_cast<std::size_t>(s.var_col(s.n_in + o))] > 0 ? 1 : 0);
      if (match) {
        ++agree;
        break;
      }
    }
  }
  CHECK(agree >= 18);
}

TEST_CASE("degenerate zero-gradient update leaves the row unchanged") {
  // An all-zero clause column gives g = 0 for that variable.
  ClauseMatrix s = init_clause_matrix(2, 2, 0, 4, 8);
  const int dead = s.var_col(2);  // first output
  s.entries.col(dead).setZero();
  MixingConfig cfg;
  cfg.seed = 4;
  cfg.max_iters = 3;
  Relaxation relax = relax_inputs(s, {0.2, 0.9}, cfg);
  const Eigen::VectorXd before = relax.vectors.col(dead);
  OwnedTrace trace = mixing_forward(s, relax, cfg);
  CHECK(relax.vectors.col(dead) == before);
  CHECK(trace.degenerate_updates() == trace.sweeps());
}

TEST_CASE("round_outputs thresholds and groups") {
  CHECK(round_outputs({0.9, 0.1}) == std::vector<int>{1, 0});
  CHECK(round_outputs({0.2, 0.2, 0.2}, {{0, 1, 2}}) == std::vector<int>{1, 0, 0});
  CHECK(round_outputs({0.1, 0.3, 0.2, 0.9}, {{0, 1}, {2, 3}}) == std::vector<int>{0, 1, 0, 1});
  CHECK_THROWS_AS(round_outputs({0.1, 0.2}, {{0, 1}, {1}}), std::invalid_argument);

  // One-hot per group regardless of magnitudes.
  std::vector<double> cell(9, 0.11);
  auto bits = round_outputs(cell, {{0, 1, 2, 3, 4, 5, 6, 7, 8}});
  CHECK(std::count(bits.begin(), bits.end(), 1) == 1);
}

TEST_CASE("clause matrix serialization round-trips") {
  ClauseMatrix s = init_clause_matrix(3, 4, 2, 6, 31337);
  const std::string path = (std::filesystem::temp_directory_path() / "gmsx_test_matrix.gmsx").string();
  save_clause_matrix(s, path);
  ClauseMatrix loaded = load_clause_matrix(path);
  CHECK(loaded.m == s.m);
  CHECK(loaded.n_in == s.n_in);
  CHECK(loaded.n_out == s.n_out);
  CHECK(loaded.aux == s.aux);
  CHECK(loaded.entries == s.entries);
  std::filesystem::remove(path);

  CHECK_THROWS_AS(load_clause_matrix("/nonexistent/file.gmsx"), data_error);
}

TEST_CASE("extract_sign_matrix thresholds learned weights") {
  ClauseMatrix s = init_clause_matrix(2, 2, 0, 3, 15);
  s.entries.setZero();
  s.entries(0, 1) = 0.8;
  s.entries(0, 2) = -0.6;
  s.entries(1, 3) = 0.05;
  SignMatrix signs = extract_sign_matrix(s, 0.1);
  REQUIRE(signs.m == 1);  // second clause fully below threshold
  CHECK(signs.at(0, 1) == 1);
  CHECK(signs.at(0, 2) == -1);
  CHECK(signs.at(0, 3) == 0);
}
