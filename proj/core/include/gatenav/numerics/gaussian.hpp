#pragma once

#include <vector>

#include "gatenav/numerics/ops.hpp"
#include "gatenav/numerics/rng.hpp"

namespace gatenav::nn {

// Diagonal Gaussian over the latent space.
struct LatentDistribution {
  std::vector<float> mu;
  std::vector<float> sigma;  // strictly positive
};

// Encoders emit log-variance; sigma = exp(logvar / 2) with logvar clamped to
// [kLogvarMin, kLogvarMax] to keep the KL term bounded.
inline constexpr float kLogvarMin = -10.0f;
inline constexpr float kLogvarMax = 10.0f;

// KL(N(mu, diag sigma^2) || N(0, I)) = sum_i 0.5 (mu_i^2 + sigma_i^2 - 1 - ln sigma_i^2).
// Throws DataError on non-positive sigma.
double gaussian_kl(const LatentDistribution& d);

// Graph path over batched [B x N] mu / logvar: mean-over-batch KL, scalar.
Var kl_divergence(const Var& mu, const Var& logvar);

// z = mu + sigma .* eps with eps ~ N(0, I) drawn from rng; the noise is a
// constant so gradients flow to mu and logvar only.
Var reparameterize(const Var& mu, const Var& logvar, Rng& rng);

// Clamped sigma from a logvar row (plain, for eval-time use).
std::vector<float> sigma_from_logvar(const std::vector<float>& logvar);

}  // namespace gatenav::nn
