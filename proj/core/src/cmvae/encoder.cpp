#include "gatenav/cmvae/encoder.hpp"

#include "gatenav/common/error.hpp"

namespace gatenav::cmvae {

void build_encoder_params(nn::ParameterStore& store, const std::string& prefix, const EncoderConfig& cfg, Rng& rng) {
  int ch = 3;
  for (int b = 1; b <= cfg.blocks; ++b) {
    const int out_ch = cfg.base_channels << (b - 1);
    const std::string base = prefix + "b" + std::to_string(b);
    store.create(base + ".conv1.w", nn::kaiming_uniform({out_ch, ch, 3, 3}, ch * 9, rng));
    store.create(base + ".conv2.w", nn::kaiming_uniform({out_ch, out_ch, 3, 3}, out_ch * 9, rng));
    store.create(base + ".skip.w", nn::kaiming_uniform({out_ch, ch, 1, 1}, ch, rng));
    ch = out_ch;
  }
}

nn::Var encoder_forward(const nn::ParameterStore& store, const std::string& prefix, const EncoderConfig& cfg,
                        const nn::Var& images) {
  const auto& s = images.shape();
  if (s.size() != 4 || s[1] != 3 || s[2] != cfg.image_size || s[3] != cfg.image_size)
    throw ConfigError("encoder: image batch shape " + shape_str(s) + " does not match " +
                      std::to_string(cfg.image_size) + "x" + std::to_string(cfg.image_size));
  nn::Var x = images;
  for (int b = 1; b <= cfg.blocks; ++b) {
    const std::string base = prefix + "b" + std::to_string(b);
    nn::Var main = nn::conv2d(x, store.get(base + ".conv1.w"), 2, 1);
    main = nn::leaky_relu(main);
    main = nn::conv2d(main, store.get(base + ".conv2.w"), 1, 1);
    nn::Var skip = nn::conv2d(x, store.get(base + ".skip.w"), 2, 0);
    x = nn::leaky_relu(nn::add(main, skip));
  }
  return nn::reshape(x, {s[0], cfg.flat_width()});
}

}  // namespace gatenav::cmvae
