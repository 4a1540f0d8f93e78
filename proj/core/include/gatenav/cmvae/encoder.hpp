#pragma once

#include <string>

#include "gatenav/numerics/adam.hpp"
#include "gatenav/numerics/ops.hpp"

namespace gatenav::cmvae {

// Residual conv trunk shared by the CM-VAE/regressor encoders and the
// end-to-end policy: `blocks` stride-2 residual blocks with channel widths
// base, 2*base, 4*base, ..., flattened.
struct EncoderConfig {
  int image_size = 32;
  int base_channels = 16;
  int blocks = 3;

  int out_side() const { return image_size >> blocks; }
  int out_channels() const { return base_channels << (blocks - 1); }
  int flat_width() const { return out_channels() * out_side() * out_side(); }
};

void build_encoder_params(nn::ParameterStore& store, const std::string& prefix, const EncoderConfig& cfg, Rng& rng);

// [B x 3 x S x S] -> [B x flat_width]
nn::Var encoder_forward(const nn::ParameterStore& store, const std::string& prefix, const EncoderConfig& cfg,
                        const nn::Var& images);

}  // namespace gatenav::cmvae
