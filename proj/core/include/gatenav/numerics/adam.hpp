#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "gatenav/numerics/graph.hpp"
#include "gatenav/numerics/rng.hpp"

namespace gatenav::nn {

struct AdamConfig {
  float lr = 1e-3f;
  float beta1 = 0.9f;
  float beta2 = 0.999f;
  float eps = 1e-8f;
};

// Ordered name -> parameter map with per-parameter Adam state. Iteration is
// insertion order, so update sweeps are deterministic.
class ParameterStore {
 public:
  struct Entry {
    std::string name;
    Var var;
    std::vector<float> m;  // first moment
    std::vector<float> v;  // second moment
    int64_t t = 0;         // step counter
  };

  // Registers a new parameter; the name must be unique.
  Var create(const std::string& name, Tensor init);
  Var get(const std::string& name) const;
  bool contains(const std::string& name) const;

  const std::vector<Entry>& entries() const { return entries_; }
  std::vector<Entry>& entries() { return entries_; }
  size_t size() const { return entries_.size(); }
  int64_t parameter_count() const;

  void zero_grads();

  // Standard Adam with bias correction over parameters whose name starts
  // with one of the given prefixes (empty list = all). All gradients in the
  // store are zeroed afterwards.
  void adam_step(const AdamConfig& cfg, const std::vector<std::string>& prefixes = {});

  // FNV-1a content hash of the selected parameter values (bitwise).
  uint64_t value_hash(const std::string& prefix = "") const;

 private:
  std::vector<Entry> entries_;
  std::unordered_map<std::string, size_t> index_;
};

// Fan-in scaled uniform init, U(-sqrt(6/fan_in), +sqrt(6/fan_in)).
Tensor kaiming_uniform(std::vector<int> shape, int fan_in, Rng& rng);

}  // namespace gatenav::nn
