#pragma once

#include <Eigen/Dense>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>

#include "gmsx/common.hpp"
#include "gmsx/sign_matrix.hpp"

namespace gmsx {

// Learnable clause weights. Column layout is fixed as
// [truth | inputs | outputs | aux]; column 0 is the truth variable.
struct ClauseMatrix {
  int m = 0;
  int n_in = 0;
  int n_out = 0;
  int aux = 0;
  Eigen::MatrixXd entries;  // m x (1 + n_in + n_out + aux), column-major

  int total_vars() const { return 1 + n_in + n_out + aux; }
  int logical_vars() const { return n_in + n_out; }

  // Column index of logical variable v (0-based, v in [0, n_in+n_out)).
  int var_col(int v) const { return 1 + v; }
  int aux_col(int a) const { return 1 + n_in + n_out + a; }

  void validate() const {
    require(m >= 1, "ClauseMatrix: m must be >= 1");
    require(n_in >= 1 && n_out >= 1, "ClauseMatrix: n_in and n_out must be >= 1");
    require(aux >= 0, "ClauseMatrix: aux must be >= 0");
    require(entries.rows() == m && entries.cols() == total_vars(), "ClauseMatrix: entry shape mismatch");
    require(entries.allFinite(), "ClauseMatrix: entries must be finite");
  }
};

// Entries i.i.d. N(0, 1/sqrt(total vars)); deterministic in `seed`.
inline ClauseMatrix init_clause_matrix(int n_in, int n_out, int aux, int m, std::uint64_t seed) {
  require(m >= 1, "init_clause_matrix: m must be >= 1");
  require(n_in >= 1, "init_clause_matrix: n_in must be >= 1");
  require(n_out >= 1, "init_clause_matrix: n_out must be >= 1");
  require(aux >= 0, "init_clause_matrix: aux must be >= 0");
  ClauseMatrix s;
  s.m = m;
  s.n_in = n_in;
  s.n_out = n_out;
  s.aux = aux;
  const int cols = s.total_vars();
  s.entries.resize(m, cols);
  const double stddev = 1.0 / std::sqrt(static_cast<double>(cols));
  Rng rng(derive_seed(seed, fnv1a("clause-matrix-init")));
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < m; ++r) s.entries(r, c) = rng.normal(0.0, stddev);
  return s;
}

// Real-valued embedding of a discrete clause structure: literal signs over
// the logical variables, truth column fixed to -1, each row scaled by
// 1/(2 sqrt(lits+1)). signs.n must equal n_in + n_out.
inline ClauseMatrix embed_sign_matrix(const SignMatrix& signs, int n_in, int n_out, int aux) {
  signs.validate();
  require(signs.n == n_in + n_out, "embed_sign_matrix: sign columns != n_in + n_out");
  ClauseMatrix s;
  s.m = signs.m;
  s.n_in = n_in;
  s.n_out = n_out;
  s.aux = aux;
  s.entries = Eigen::MatrixXd::Zero(signs.m, s.total_vars());
  for (int j = 0; j < signs.m; ++j) {
    int lits = 0;
    for (int v = 0; v < signs.n; ++v) lits += signs.at(j, v) != 0;
    const double scale = 1.0 / (2.0 * std::sqrt(static_cast<double>(lits) + 1.0));
    s.entries(j, 0) = -scale;
    for (int v = 0; v < signs.n; ++v) s.entries(j, s.var_col(v)) = scale * signs.at(j, v);
  }
  return s;
}

// Diagnostic extraction of a discrete clause structure from learned
// weights: sign of every entry with |entry| > threshold, zero otherwise.
// Clause rows left empty by the threshold are dropped.
inline SignMatrix extract_sign_matrix(const ClauseMatrix& s, double threshold) {
  require(threshold >= 0.0, "extract_sign_matrix: threshold must be >= 0");
  SignMatrix out;
  out.n = s.total_vars();
  for (int j = 0; j < s.m; ++j) {
    std::vector<int> row(out.n, 0);
    bool nonzero = false;
    for (int i = 0; i < out.n; ++i) {
      const double e = s.entries(j, i);
      if (std::abs(e) > threshold) {
        row[i] = e > 0 ? 1 : -1;
        nonzero = true;
      }
    }
    if (nonzero) {
      out.entries.insert(out.entries.end(), row.begin(), row.end());
      ++out.m;
    }
  }
  return out;
}

namespace detail {

inline void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff), static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff), static_cast<unsigned char>((v >> 24) & 0xff)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

inline std::uint32_t get_u32(std::istream& is, const char* field) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4)) throw data_error(std::string("gmsx file: truncated reading ") + field);
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) | (static_cast<std::uint32_t>(b[2]) << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

inline void put_f64(std::ostream& os, double v) {
  std::uint64_t u;
  std::memcpy(&u, &v, 8);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((u >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char*>(b), 8);
}

inline double get_f64(std::istream& is, const char* field) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) throw data_error(std::string("gmsx file: truncated reading ") + field);
  std::uint64_t u = 0;
  for (int i = 0; i < 8; ++i) u |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  double v;
  std::memcpy(&v, &u, 8);
  return v;
}

inline constexpr char kMagic[4] = {'G', 'M', 'S', 'X'};
inline constexpr std::uint32_t kFormatVersion = 1;

inline void put_magic(std::ostream& os) { os.write(kMagic, 4); }

inline void check_magic(std::istream& is) {
  char m[4];
  if (!is.read(m, 4) || std::memcmp(m, kMagic, 4) != 0) throw data_error("gmsx file: bad magic (expected GMSX)");
}

}  // namespace detail

// Flat binary format: "GMSX", version u32, m, n_in, n_out, aux as
// little-endian u32, then row-major 64-bit little-endian floats.
inline void save_clause_matrix(const ClauseMatrix& s, const std::string& path) {
  s.validate();
  std::ofstream os(path, std::ios::binary);
  if (!os) throw data_error("save_clause_matrix: cannot open " + path);
  detail::put_magic(os);
  detail::put_u32(os, detail::kFormatVersion);
  detail::put_u32(os, static_cast<std::uint32_t>(s.m));
  detail::put_u32(os, static_cast<std::uint32_t>(s.n_in));
  detail::put_u32(os, static_cast<std::uint32_t>(s.n_out));
  detail::put_u32(os, static_cast<std::uint32_t>(s.aux));
  for (int r = 0; r < s.m; ++r)
    for (int c = 0; c < s.entries.cols(); ++c) detail::put_f64(os, s.entries(r, c));
  if (!os) throw data_error("save_clause_matrix: write failed for " + path);
}

inline ClauseMatrix load_clause_matrix(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw data_error("load_clause_matrix: cannot open " + path);
  detail::check_magic(is);
  const std::uint32_t version = detail::get_u32(is, "version");
  if (version != detail::kFormatVersion) throw data_error("load_clause_matrix: unsupported format version");
  ClauseMatrix s;
  s.m = static_cast<int>(detail::get_u32(is, "m"));
  s.n_in = static_cast<int>(detail::get_u32(is, "n_in"));
  s.n_out = static_cast<int>(detail::get_u32(is, "n_out"));
  s.aux = static_cast<int>(detail::get_u32(is, "aux"));
  require(s.m >= 1 && s.n_in >= 1 && s.n_out >= 1 && s.aux >= 0, "load_clause_matrix: bad header dimensions");
  s.entries.resize(s.m, s.total_vars());
  for (int r = 0; r < s.m; ++r)
    for (int c = 0; c < s.entries.cols(); ++c) s.entries(r, c) = detail::get_f64(is, "entries");
  s.validate();
  return s;
}

}  // namespace gmsx
