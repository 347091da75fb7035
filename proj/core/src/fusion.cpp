// SPDX-License-Identifier: Apache-2.0
#include "cafscore/fusion.hpp"

#include <algorithm>
#include <cmath>

#include "cafscore/errors.hpp"

namespace cafscore {

AlphaPolicy AlphaPolicy::fixed(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in [0, 1]");
  return AlphaPolicy(false, alpha);
}

double caf_score(double s_clap, double fleur, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("caf_score: alpha must lie in [0, 1]");
  if (!std::isfinite(s_clap) || !std::isfinite(fleur))
    throw DomainError("caf_score: component scores must be finite");
  // Endpoints are returned exactly rather than through the arithmetic.
  if (alpha == 1.0) return s_clap;
  if (alpha == 0.0) return fleur;
  // Clamp absorbs rounding so the result stays between its two components.
  return std::clamp(alpha * s_clap + (1.0 - alpha) * fleur, std::min(s_clap, fleur),
                    std::max(s_clap, fleur));
}

double resolve_alpha(const AlphaPolicy& policy, const DigitDistribution* dist, EntropyMode mode) {
  if (!policy.is_adaptive()) return policy.alpha();
  if (dist == nullptr) throw DomainError("adaptive alpha needs a digit distribution");
  return std::clamp(distribution_entropy(*dist, mode), 0.0, 1.0);
}

double resolve_alpha(const AlphaPolicy& policy, std::optional<double> entropy) {
  if (!policy.is_adaptive()) return policy.alpha();
  if (!entropy) throw DomainError("adaptive alpha needs an entropy value");
  return std::clamp(*entropy, 0.0, 1.0);
}

}  // namespace cafscore
