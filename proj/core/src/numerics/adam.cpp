#include "gatenav/numerics/adam.hpp"

#include <cmath>
#include <cstring>

#include "gatenav/common/error.hpp"

namespace gatenav::nn {

Var ParameterStore::create(const std::string& name, Tensor init) {
  if (index_.count(name)) throw ConfigError("duplicate parameter name: " + name);
  Entry e;
  e.name = name;
  e.var = Var::parameter(std::move(init), name);
  e.var.value().alloc_grad();
  const size_t n = static_cast<size_t>(e.var.value().size());
  e.m.assign(n, 0.0f);
  e.v.assign(n, 0.0f);
  index_[name] = entries_.size();
  entries_.push_back(std::move(e));
  return entries_.back().var;
}

Var ParameterStore::get(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw ConfigError("unknown parameter: " + name);
  return entries_[it->second].var;
}

bool ParameterStore::contains(const std::string& name) const { return index_.count(name) > 0; }

int64_t ParameterStore::parameter_count() const {
  int64_t n = 0;
  for (const auto& e : entries_) n += e.var.value().size();
  return n;
}

void ParameterStore::zero_grads() {
  for (auto& e : entries_) e.var.value().zero_grad();
}

namespace {
bool matches_any(const std::string& name, const std::vector<std::string>& prefixes) {
  if (prefixes.empty()) return true;
  for (const auto& p : prefixes)
    if (name.rfind(p, 0) == 0) return true;
  return false;
}
}  // namespace

void ParameterStore::adam_step(const AdamConfig& cfg, const std::vector<std::string>& prefixes) {
  for (auto& e : entries_) {
    if (!matches_any(e.name, prefixes)) continue;
    e.t += 1;
    const float bc1 = 1.0f - std::pow(cfg.beta1, static_cast<float>(e.t));
    const float bc2 = 1.0f - std::pow(cfg.beta2, static_cast<float>(e.t));
    float* p = e.var.value().data();
    const float* g = e.var.value().grad();
    const size_t n = e.m.size();
    for (size_t i = 0; i < n; ++i) {
      e.m[i] = cfg.beta1 * e.m[i] + (1.0f - cfg.beta1) * g[i];
      e.v[i] = cfg.beta2 * e.v[i] + (1.0f - cfg.beta2) * g[i] * g[i];
      const float mhat = e.m[i] / bc1;
      const float vhat = e.v[i] / bc2;
      p[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
    }
    e.var.value().check_finite("adam(" + e.name + ")");
  }
  zero_grads();
}

uint64_t ParameterStore::value_hash(const std::string& prefix) const {
  uint64_t h = 1469598103934665603ull;  // FNV-1a
  auto feed = [&h](const void* bytes, size_t n) {
    const unsigned char* b = static_cast<const unsigned char*>(bytes);
    for (size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 1099511628211ull;
    }
  };
  for (const auto& e : entries_) {
    if (!prefix.empty() && e.name.rfind(prefix, 0) != 0) continue;
    feed(e.name.data(), e.name.size());
    feed(e.var.value().data(), sizeof(float) * static_cast<size_t>(e.var.value().size()));
  }
  return h;
}

Tensor kaiming_uniform(std::vector<int> shape, int fan_in, Rng& rng) {
  Tensor t(std::move(shape));
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
  float* p = t.data();
  const int64_t n = t.size();
  for (int64_t i = 0; i < n; ++i) p[i] = static_cast<float>(rng.uniform(-bound, bound));
  return t;
}

}  // namespace gatenav::nn
