#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "gmsx/common.hpp"

namespace gmsx {

// One training example over n variables: label bits plus disjoint,
// complementary input/output masks.
struct MaskedExample {
  std::vector<double> bits;            // labels l, values in [0,1]
  std::vector<std::uint8_t> input_mask;
  std::vector<std::uint8_t> output_mask;

  int n() const { return static_cast<int>(bits.size()); }

  void validate() const {
    require(input_mask.size() == bits.size() && output_mask.size() == bits.size(), "MaskedExample: mask length mismatch");
    for (std::size_t i = 0; i < bits.size(); ++i) {
      require(bits[i] >= 0.0 && bits[i] <= 1.0, "MaskedExample: label outside [0,1]");
      require(input_mask[i] <= 1 && output_mask[i] <= 1, "MaskedExample: masks must be 0/1");
      require((input_mask[i] & output_mask[i]) == 0, "MaskedExample: masks overlap");
      require((input_mask[i] | output_mask[i]) == 1, "MaskedExample: variable neither input nor output");
    }
  }
};

// Complementary indicator masks for input positions `input_indices`
// (0-based) over n variables.
inline std::pair<std::vector<std::uint8_t>, std::vector<std::uint8_t>> build_masks(int n, const std::vector<int>& input_indices) {
  require(n >= 1, "build_masks: n must be >= 1");
  std::vector<std::uint8_t> input_mask(static_cast<std::size_t>(n), 0);
  for (int idx : input_indices) {
    require(idx >= 0 && idx < n, "build_masks: index out of range");
    input_mask[static_cast<std::size_t>(idx)] = 1;
  }
  std::vector<std::uint8_t> output_mask(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) output_mask[static_cast<std::size_t>(i)] = input_mask[static_cast<std::size_t>(i)] ? 0 : 1;
  return {std::move(input_mask), std::move(output_mask)};
}

inline constexpr double kBceEps = 1e-12;

// -l ln z - (1-l) ln(1-z), with z clamped to [eps, 1-eps].
inline double bce(double z, double l) {
  require(z >= 0.0 && z <= 1.0 && l >= 0.0 && l <= 1.0, "bce: arguments must lie in [0,1]");
  const double zc = std::clamp(z, kBceEps, 1.0 - kBceEps);
  return -l * std::log(zc) - (1.0 - l) * std::log(1.0 - zc);
}

// d bce / d z at the clamped point.
inline double bce_grad(double z, double l) {
  const double zc = std::clamp(z, kBceEps, 1.0 - kBceEps);
  return -l / zc + (1.0 - l) / (1.0 - zc);
}

struct LossReport {
  double total = 0.0;        // the trained loss (output term, plus input term when unmasked)
  double input_term = 0.0;   // BCE summed over input positions
  double output_term = 0.0;  // BCE summed over output positions
  std::vector<double> grad_z;
};

// Sum of per-position binary cross entropies against the example's labels.
// With mask_outputs=true the trained total and grad_z cover output
// positions only; with false they cover every position, which is the
// label-leakage configuration: input-position gradients reach whatever
// produced z there, bypassing the layer.
inline LossReport masked_total_loss(const std::vector<double>& z_full, const MaskedExample& example, bool mask_outputs) {
  require(z_full.size() == example.bits.size(), "masked_total_loss: z length != label length");
  example.validate();
  LossReport report;
  report.grad_z.assign(z_full.size(), 0.0);
  for (std::size_t i = 0; i < z_full.size(); ++i) {
    const double term = bce(z_full[i], example.bits[i]);
    if (example.output_mask[i]) {
      report.output_term += term;
      report.grad_z[i] = bce_grad(z_full[i], example.bits[i]);
    } else {
      report.input_term += term;
      if (!mask_outputs) report.grad_z[i] = bce_grad(z_full[i], example.bits[i]);
    }
  }
  report.total = mask_outputs ? report.output_term : report.input_term + report.output_term;
  return report;
}

}  // namespace gmsx
