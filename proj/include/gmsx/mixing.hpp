#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <memory>
#include <vector>

#include "gmsx/clause_matrix.hpp"
#include "gmsx/common.hpp"

namespace gmsx {

inline constexpr double kPi = 3.14159265358979323846;

struct MixingConfig {
  int k = 0;           // embedding dimension; 0 = ceil(sqrt(2N)) + 1 for N total variables
  int max_iters = 40;  // sweep limit
  double tol = 1e-4;   // max per-vector displacement threshold
  std::uint64_t seed = 0;

  int resolve_k(int total_vars) const {
    if (k > 0) return k;
    return static_cast<int>(std::ceil(std::sqrt(2.0 * total_vars))) + 1;
  }

  void validate() const {
    require(k == 0 || k >= 2, "MixingConfig: k must be >= 2");
    require(max_iters >= 1, "MixingConfig: max_iters must be >= 1");
    require(tol > 0.0, "MixingConfig: tol must be > 0");
  }
};

// Unit vectors of the low-rank relaxation. Stored with one column per
// variable (k x N); column 0 is the truth vector e1 and is never modified.
// Carries the z values and input mask it was built from so the backward
// pass can differentiate through the input embedding.
template <typename Scalar>
struct RelaxationT {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> vectors;  // k x total_vars
  std::vector<double> z;              // per logical variable
  std::vector<std::uint8_t> is_input; // per logical variable
  static constexpr int truth_index = 0;

  int k() const { return static_cast<int>(vectors.rows()); }
  int total_vars() const { return static_cast<int>(vectors.cols()); }
};

using Relaxation = RelaxationT<double>;

struct LayerIO {
  std::vector<double> z_in;
  std::vector<double> z_out;
};

// One coordinate update, recorded for reverse-mode replay.
template <typename Scalar>
struct TraceStepT {
  int col;
  Scalar g_norm;  // 0 marks a skipped (degenerate) update
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> v_old;
};

template <typename Scalar>
struct MixLayerT;

// Everything needed to replay or differentiate one forward call. The
// referenced MixLayerT must stay alive and unmodified until backward.
template <typename Scalar>
struct ForwardTraceT {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const MixLayerT<Scalar>* layer = nullptr;
  MixingConfig cfg;
  int k = 0;
  std::vector<double> z;
  std::vector<std::uint8_t> is_input;
  std::vector<int> free_cols;
  Mat v_init;
  Mat v_final;
  Mat w_final;  // running W = V S^T at exit
  std::vector<TraceStepT<Scalar>> steps;
  std::vector<double> sweep_energy;  // <S^T S, V V^T> after each sweep
  int sweeps = 0;
  int degenerate_updates = 0;
};

using ForwardTrace = ForwardTraceT<double>;

template <typename Scalar>
struct LayerGradientsT {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> d_entries;  // m x total_vars
  std::vector<double> d_z;  // per logical variable; zero at non-input positions
};

using LayerGradients = LayerGradientsT<double>;

namespace detail {

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> random_unit_vector(Rng& rng, int k) {
  Eigen::VectorXd v(k);
  while (true) {
    for (int i = 0; i < k; ++i) v[i] = rng.normal();
    const double n = v.norm();
    if (n > 1e-12) return (v / n).cast<Scalar>();
  }
}

// Seeded direction orthogonal to the truth vector e1 (first component 0).
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> input_direction(std::uint64_t seed, int var_col, int k) {
  Rng rng(derive_seed(seed, fnv1a("relax-input-dir"), static_cast<std::uint64_t>(var_col)));
  Eigen::VectorXd u = Eigen::VectorXd::Zero(k);
  while (true) {
    for (int i = 1; i < k; ++i) u[i] = rng.normal();
    const double n = u.norm();
    if (n > 1e-12) return (u / n).cast<Scalar>();
  }
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> free_init_vector(std::uint64_t seed, int var_col, int k) {
  Rng rng(derive_seed(seed, fnv1a("relax-free-init"), static_cast<std::uint64_t>(var_col)));
  return random_unit_vector<Scalar>(rng, k);
}

}  // namespace detail

// Mixing engine bound to one ClauseMatrix snapshot. Holds the Scalar copy
// of S and the per-column squared norms; forward/backward for different
// examples may run concurrently against the same const MixLayerT.
template <typename Scalar>
struct MixLayerT {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  int m = 0;
  int n_in = 0;
  int n_out = 0;
  int aux = 0;
  Mat entries;  // m x total_vars
  Vec snorm;    // per-column squared norms

  MixLayerT() = default;
  explicit MixLayerT(const ClauseMatrix& s) { reset(s); }

  void reset(const ClauseMatrix& s) {
    s.validate();
    m = s.m;
    n_in = s.n_in;
    n_out = s.n_out;
    aux = s.aux;
    entries = s.entries.template cast<Scalar>();
    snorm.resize(entries.cols());
    for (int c = 0; c < entries.cols(); ++c) snorm[c] = entries.col(c).squaredNorm();
  }

  int total_vars() const { return 1 + n_in + n_out + aux; }
  int logical_vars() const { return n_in + n_out; }
  int var_col(int v) const { return 1 + v; }
  int aux_col(int a) const { return 1 + n_in + n_out + a; }

  // Relaxation for one example with a per-variable input mask. Only z
  // entries at input positions are read. Input rows are
  // -cos(pi z) v_truth + sin(pi z) u with u seeded orthogonal to truth;
  // free rows are seeded random unit vectors.
  RelaxationT<Scalar> relax_masked(const std::vector<double>& z, const std::vector<std::uint8_t>& is_input,
                                   const MixingConfig& cfg) const {
    cfg.validate();
    const int n_logical = logical_vars();
    require(static_cast<int>(z.size()) == n_logical, "relax_masked: z length != logical variable count");
    require(static_cast<int>(is_input.size()) == n_logical, "relax_masked: mask length != logical variable count");
    const int k = cfg.resolve_k(total_vars());
    require(k >= 2, "relax_masked: embedding dimension must be >= 2");

    RelaxationT<Scalar> relax;
    relax.z = z;
    relax.is_input = is_input;
    relax.vectors.setZero(k, total_vars());
    relax.vectors(0, 0) = Scalar(1);
    for (int v = 0; v < n_logical; ++v) {
      const int col = var_col(v);
      if (is_input[v]) {
        const double zi = z[v];
        require(zi >= 0.0 && zi <= 1.0, "relax_masked: input z outside [0,1]");
        const Vec u = detail::input_direction<Scalar>(cfg.seed, col, k);
        relax.vectors.col(col) = Scalar(std::sin(kPi * zi)) * u;
        relax.vectors(0, col) += Scalar(-std::cos(kPi * zi));
      } else {
        relax.vectors.col(col) = detail::free_init_vector<Scalar>(cfg.seed, col, k);
      }
    }
    for (int a = 0; a < aux; ++a) relax.vectors.col(aux_col(a)) = detail::free_init_vector<Scalar>(cfg.seed, aux_col(a), k);
    return relax;
  }

  // Block coordinate descent over the free columns in ascending order.
  // Maintains W = V S^T so one update costs O(m k): g = W s_i - ||s_i||^2 v_i
  // and v_i <- -g/||g||. Stops when the largest per-vector displacement in
  // a sweep drops below tol.
  ForwardTraceT<Scalar> forward(RelaxationT<Scalar>& relax, const MixingConfig& cfg) const {
    cfg.validate();
    const int k = relax.k();
    require(relax.total_vars() == total_vars(), "mixing forward: relaxation shape mismatch");
    require(static_cast<int>(relax.is_input.size()) == logical_vars(), "mixing forward: relaxation mask length mismatch");

    ForwardTraceT<Scalar> trace;
    trace.layer = this;
    trace.cfg = cfg;
    trace.k = k;
    trace.z = relax.z;
    trace.is_input = relax.is_input;
    for (int v = 0; v < logical_vars(); ++v)
      if (!relax.is_input[v]) trace.free_cols.push_back(var_col(v));
    for (int a = 0; a < aux; ++a) trace.free_cols.push_back(aux_col(a));
    trace.v_init = relax.vectors;

    Mat& v = relax.vectors;
    Mat w = v * entries.transpose();  // k x m
    trace.steps.reserve(trace.free_cols.size() * static_cast<std::size_t>(std::min(cfg.max_iters, 8)));

    Vec g(k), delta(k);
    for (int sweep = 0; sweep < cfg.max_iters; ++sweep) {
      Scalar max_disp = 0;
      for (int col : trace.free_cols) {
        g.noalias() = w * entries.col(col);
        g -= snorm[col] * v.col(col);
        const Scalar ng = g.norm();
        if (ng == Scalar(0)) {
          trace.steps.push_back({col, Scalar(0), v.col(col)});
          ++trace.degenerate_updates;
          continue;
        }
        trace.steps.push_back({col, ng, v.col(col)});
        delta = (Scalar(-1) / ng) * g - v.col(col);
        w.noalias() += delta * entries.col(col).transpose();
        const Scalar disp = delta.norm();
        if (disp > max_disp) max_disp = disp;
        v.col(col) += delta;
      }
      ++trace.sweeps;
      trace.sweep_energy.push_back(static_cast<double>(w.squaredNorm()));
      if (!std::isfinite(static_cast<double>(max_disp))) throw numeric_error("mixing forward: non-finite update displacement");
      if (static_cast<double>(max_disp) < cfg.tol) break;
    }

    trace.v_final = v;
    trace.w_final = w;
    return trace;
  }

  // z_o = arccos(-v_o . v_truth) / pi; with truth = e1 this reads the
  // first component.
  double read_col(const RelaxationT<Scalar>& relax, int col) const {
    const double d = std::clamp(-static_cast<double>(relax.vectors(0, col)), -1.0, 1.0);
    return std::acos(d) / kPi;
  }

  std::vector<double> read_logical(const RelaxationT<Scalar>& relax) const {
    std::vector<double> z(static_cast<std::size_t>(logical_vars()));
    for (int v = 0; v < logical_vars(); ++v) z[static_cast<std::size_t>(v)] = read_col(relax, var_col(v));
    return z;
  }

  // Exact reverse-mode differentiation of the recorded forward computation
  // (input embedding -> recorded sweeps -> readout of free logical
  // variables). d_z_logical supplies dL/dz per logical variable; entries at
  // input positions are ignored (the layer does not produce those).
  LayerGradientsT<Scalar> backward(const ForwardTraceT<Scalar>& trace, const std::vector<double>& d_z_logical) const {
    require(trace.layer == this, "mixing backward: trace belongs to a different layer");
    const int n_logical = logical_vars();
    require(static_cast<int>(d_z_logical.size()) == n_logical, "mixing backward: gradient length mismatch");
    const int k = trace.k;

    Mat v = trace.v_final;
    Mat w = trace.w_final;
    Mat v_bar = Mat::Zero(k, total_vars());
    Mat w_bar = Mat::Zero(k, m);
    LayerGradientsT<Scalar> grads;
    grads.d_entries = Mat::Zero(m, total_vars());

    for (int var = 0; var < n_logical; ++var) {
      if (trace.is_input[var]) continue;
      const double gz = d_z_logical[var];
      if (gz == 0.0) continue;
      const int col = var_col(var);
      const double d = std::clamp(-static_cast<double>(v(0, col)), -1.0 + 1e-9, 1.0 - 1e-9);
      v_bar(0, col) += Scalar(gz / (kPi * std::sqrt(1.0 - d * d)));
    }

    Vec delta(k), delta_bar(k), vbar(k), gbar(k);
    for (std::size_t t = trace.steps.size(); t-- > 0;) {
      const TraceStepT<Scalar>& step = trace.steps[t];
      if (step.g_norm == Scalar(0)) continue;
      const int col = step.col;
      const auto s_col = entries.col(col);
      const Vec v_new = v.col(col);
      delta = v_new - step.v_old;

      // W_t = W_{t-1} + delta s_i^T
      delta_bar.noalias() = w_bar * s_col;
      grads.d_entries.col(col).noalias() += w_bar.transpose() * delta;

      vbar = v_bar.col(col) + delta_bar;
      gbar = (v_new.dot(vbar) * v_new - vbar) * (Scalar(1) / step.g_norm);

      w.noalias() -= delta * s_col.transpose();  // back to W_{t-1}

      // g = W_{t-1} s_i - ||s_i||^2 v_old
      w_bar.noalias() += gbar * s_col.transpose();
      grads.d_entries.col(col).noalias() += w.transpose() * gbar;
      grads.d_entries.col(col).noalias() += (Scalar(-2) * gbar.dot(step.v_old)) * s_col;
      v_bar.col(col) = -snorm[col] * gbar - delta_bar;

      v.col(col) = step.v_old;
    }

    // W_0 = V_0 S^T
    grads.d_entries.noalias() += w_bar.transpose() * trace.v_init;
    v_bar.noalias() += w_bar * entries;

    // Input rows: v_i(z) = -cos(pi z) e1 + sin(pi z) u_i.
    grads.d_z.assign(static_cast<std::size_t>(n_logical), 0.0);
    for (int var = 0; var < n_logical; ++var) {
      if (!trace.is_input[var]) continue;
      const int col = var_col(var);
      const double z = trace.z[var];
      const Vec u = detail::input_direction<Scalar>(trace.cfg.seed, col, k);
      grads.d_z[static_cast<std::size_t>(var)] = kPi * std::sin(kPi * z) * static_cast<double>(v_bar(0, col)) +
                                                 kPi * std::cos(kPi * z) * static_cast<double>(v_bar.col(col).dot(u));
    }
    return grads;
  }

  // Re-executes the recorded update sequence from v_init; bit-exact with
  // the original forward because the arithmetic sequence is identical.
  Mat replay(const ForwardTraceT<Scalar>& trace) const {
    Mat v = trace.v_init;
    Mat w = v * entries.transpose();
    Vec g(trace.k), delta(trace.k);
    for (const TraceStepT<Scalar>& step : trace.steps) {
      g.noalias() = w * entries.col(step.col);
      g -= snorm[step.col] * v.col(step.col);
      const Scalar ng = g.norm();
      if (ng == Scalar(0)) continue;
      delta = (Scalar(-1) / ng) * g - v.col(step.col);
      w.noalias() += delta * entries.col(step.col).transpose();
      v.col(step.col) += delta;
    }
    return v;
  }
};

using MixLayer = MixLayerT<double>;
using MixLayerF = MixLayerT<float>;

// ---------------------------------------------------------------------
// Free-function API over a double engine; used by tests, the oracle
// comparisons, and anything else that works a single call at a time.
// These construct a MixLayer internally, so the trace from mixing_forward
// must be differentiated with layer_backward before the next call chain.
// ---------------------------------------------------------------------

namespace detail {
// Single-call convenience keeps the engine alive between forward and
// backward through the shared_ptr captured in the trace wrapper below.
}  // namespace detail

inline Relaxation relax_masked(const ClauseMatrix& s, const std::vector<double>& z, const std::vector<std::uint8_t>& is_input,
                               const MixingConfig& cfg) {
  return MixLayer(s).relax_masked(z, is_input, cfg);
}

// Fixed-split variant: logical variables [0, n_in) are the inputs.
inline Relaxation relax_inputs(const ClauseMatrix& s, const std::vector<double>& z_in, const MixingConfig& cfg) {
  require(static_cast<int>(z_in.size()) == s.n_in, "relax_inputs: z_in length != n_in");
  std::vector<double> z(static_cast<std::size_t>(s.logical_vars()), 0.0);
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(s.logical_vars()), 0);
  for (int i = 0; i < s.n_in; ++i) {
    z[static_cast<std::size_t>(i)] = z_in[static_cast<std::size_t>(i)];
    mask[static_cast<std::size_t>(i)] = 1;
  }
  return relax_masked(s, z, mask, cfg);
}

// Single-call forward. The returned trace carries its own engine copy so
// layer_backward works on it directly.
struct OwnedTrace {
  std::shared_ptr<MixLayer> layer;
  ForwardTrace trace;

  int sweeps() const { return trace.sweeps; }
  const std::vector<double>& sweep_energy() const { return trace.sweep_energy; }
  int degenerate_updates() const { return trace.degenerate_updates; }
};

inline OwnedTrace mixing_forward(const ClauseMatrix& s, Relaxation& relax, const MixingConfig& cfg) {
  OwnedTrace owned;
  owned.layer = std::make_shared<MixLayer>(s);
  owned.trace = owned.layer->forward(relax, cfg);
  return owned;
}

inline double relaxation_energy(const ClauseMatrix& s, const Relaxation& relax) {
  return (relax.vectors * s.entries.transpose()).squaredNorm();
}

inline double read_output_col(const Relaxation& relax, int col) {
  const double d = std::clamp(-relax.vectors(0, col), -1.0, 1.0);
  return std::acos(d) / kPi;
}

inline std::vector<double> read_outputs(const ClauseMatrix& s, const Relaxation& relax) {
  std::vector<double> z_out(static_cast<std::size_t>(s.n_out));
  for (int o = 0; o < s.n_out; ++o) z_out[static_cast<std::size_t>(o)] = read_output_col(relax, s.var_col(s.n_in + o));
  return z_out;
}

inline std::vector<double> read_all(const ClauseMatrix& s, const Relaxation& relax) {
  std::vector<double> z(static_cast<std::size_t>(s.logical_vars()));
  for (int v = 0; v < s.logical_vars(); ++v) z[static_cast<std::size_t>(v)] = read_output_col(relax, s.var_col(v));
  return z;
}

inline LayerGradients layer_backward_masked(const OwnedTrace& owned, const std::vector<double>& d_z_logical) {
  require(owned.layer != nullptr, "layer_backward: trace missing engine");
  return owned.layer->backward(owned.trace, d_z_logical);
}

// Fixed-split wrapper: dL_dz_out over the output block, input gradients
// returned for the input block.
inline std::pair<Eigen::MatrixXd, std::vector<double>> layer_backward(const OwnedTrace& owned,
                                                                      const std::vector<double>& dL_dz_out) {
  require(owned.layer != nullptr, "layer_backward: trace missing engine");
  const MixLayer& layer = *owned.layer;
  require(static_cast<int>(dL_dz_out.size()) == layer.n_out, "layer_backward: dL_dz_out length != n_out");
  std::vector<double> d_z(static_cast<std::size_t>(layer.logical_vars()), 0.0);
  for (int o = 0; o < layer.n_out; ++o) d_z[static_cast<std::size_t>(layer.n_in + o)] = dL_dz_out[static_cast<std::size_t>(o)];
  LayerGradients grads = layer.backward(owned.trace, d_z);
  std::vector<double> d_z_in(grads.d_z.begin(), grads.d_z.begin() + layer.n_in);
  return {std::move(grads.d_entries), std::move(d_z_in)};
}

inline Eigen::MatrixXd replay_forward(const OwnedTrace& owned) {
  require(owned.layer != nullptr, "replay_forward: trace missing engine");
  return owned.layer->replay(owned.trace);
}

// Probabilities to bits. Without groups: z >= 0.5. With groups: exactly the
// argmax index of each group is set, ties broken by lowest index; indices
// not covered by any group fall back to the threshold rule.
inline std::vector<int> round_outputs(const std::vector<double>& z_out, const std::vector<std::vector<int>>& groups = {}) {
  for (double z : z_out) require(z >= 0.0 && z <= 1.0, "round_outputs: values must lie in [0,1]");
  std::vector<int> bits(z_out.size(), 0);
  std::vector<std::uint8_t> covered(z_out.size(), 0);
  for (const auto& group : groups) {
    require(!group.empty(), "round_outputs: empty group");
    int best = -1;
    double best_z = -1.0;
    for (int idx : group) {
      require(idx >= 0 && idx < static_cast<int>(z_out.size()), "round_outputs: group index out of range");
      require(!covered[static_cast<std::size_t>(idx)], "round_outputs: overlapping groups");
      covered[static_cast<std::size_t>(idx)] = 1;
      if (z_out[static_cast<std::size_t>(idx)] > best_z || (z_out[static_cast<std::size_t>(idx)] == best_z && idx < best)) {
        best_z = z_out[static_cast<std::size_t>(idx)];
        best = idx;
      }
    }
    bits[static_cast<std::size_t>(best)] = 1;
  }
  for (std::size_t i = 0; i < z_out.size(); ++i)
    if (!covered[i]) bits[i] = z_out[i] >= 0.5 ? 1 : 0;
  return bits;
}

}  // namespace gmsx
