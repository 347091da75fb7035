// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <vector>

#include "cafscore/fleur.hpp"
#include "cafscore/types.hpp"

namespace cafscore {

inline constexpr double kDefaultAlpha = 0.8;

inline const std::vector<double>& default_alpha_grid() {
  static const std::vector<double> grid{0.0, 0.2, 0.5, 0.8, 1.0};
  return grid;
}

class AlphaPolicy {
 public:
  static AlphaPolicy fixed(double alpha);
  static AlphaPolicy adaptive() { return AlphaPolicy(true, 0.0); }

  bool is_adaptive() const { return adaptive_; }
  /// Only meaningful for fixed policies.
  double alpha() const { return alpha_; }

 private:
  AlphaPolicy(bool adaptive, double alpha) : adaptive_(adaptive), alpha_(alpha) {}

  bool adaptive_;
  double alpha_;
};

/// CAF = alpha * s_clap + (1 - alpha) * fleur.
double caf_score(double s_clap, double fleur, double alpha);

/// Fixed policy returns its alpha. Adaptive returns the digit-distribution
/// entropy, clamped to [0, 1] (only the unnormalized mode can exceed 1).
double resolve_alpha(const AlphaPolicy& policy, const DigitDistribution* dist,
                     EntropyMode mode = EntropyMode::normalized_first_place);

/// Same as resolve_alpha but from a precomputed entropy.
double resolve_alpha(const AlphaPolicy& policy, std::optional<double> entropy);

}  // namespace cafscore
