#include "gatenav/numerics/gaussian.hpp"

#include <cmath>

#include "gatenav/common/error.hpp"

namespace gatenav::nn {

double gaussian_kl(const LatentDistribution& d) {
  if (d.mu.size() != d.sigma.size()) throw DataError("gaussian_kl: mu/sigma length mismatch");
  double acc = 0.0;
  for (size_t i = 0; i < d.mu.size(); ++i) {
    const double mu = d.mu[i];
    const double sigma = d.sigma[i];
    if (!(sigma > 0.0)) throw DataError("gaussian_kl: sigma must be strictly positive");
    acc += 0.5 * (mu * mu + sigma * sigma - 1.0 - std::log(sigma * sigma));
  }
  return acc;
}

Var kl_divergence(const Var& mu, const Var& logvar) {
  const int batch = mu.shape()[0];
  Var lv = clamp(logvar, kLogvarMin, kLogvarMax);
  Var per_elem = add_scalar(sub(add(mul(mu, mu), exp_op(lv)), lv), -1.0f);
  return scale(sum(per_elem), 0.5f / static_cast<float>(batch));
}

Var reparameterize(const Var& mu, const Var& logvar, Rng& rng) {
  Var lv = clamp(logvar, kLogvarMin, kLogvarMax);
  Var sigma = exp_op(scale(lv, 0.5f));
  Tensor eps(mu.shape());
  float* pe = eps.data();
  const int64_t n = eps.size();
  for (int64_t i = 0; i < n; ++i) pe[i] = static_cast<float>(rng.normal());
  return add(mu, mul(sigma, Var::constant(std::move(eps), "eps")));
}

std::vector<float> sigma_from_logvar(const std::vector<float>& logvar) {
  std::vector<float> sigma(logvar.size());
  for (size_t i = 0; i < logvar.size(); ++i) {
    float lv = logvar[i];
    lv = lv < kLogvarMin ? kLogvarMin : (lv > kLogvarMax ? kLogvarMax : lv);
    sigma[i] = std::exp(0.5f * lv);
  }
  return sigma;
}

}  // namespace gatenav::nn
