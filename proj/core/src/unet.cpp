#include "r2l/unet.hpp"

#include <stdexcept>

namespace r2l {

void UNetConfig::validate() const {
  if (levels < 1) throw std::invalid_argument("UNetConfig: levels >= 1");
  if (static_cast<int>(encoder_filters.size()) != levels)
    throw std::invalid_argument("UNetConfig: encoder_filters length must equal levels");
  for (int f : encoder_filters)
    if (f < 1) throw std::invalid_argument("UNetConfig: filter counts >= 1");
  if (history < 0) throw std::invalid_argument("UNetConfig: history >= 0");
  if (n_range < 1 || n_az_in < 1) throw std::invalid_argument("UNetConfig: bad input dims");
  int f = az_upsample_factor;
  if (f < 1) throw std::invalid_argument("UNetConfig: az_upsample_factor >= 1");
  while (f > 1) {
    if (f % 2 != 0)
      throw std::invalid_argument("UNetConfig: az_upsample_factor must be a power of two");
    f /= 2;
  }
  const int down = 1 << (levels - 1);
  if (n_range % down != 0 || n_az_in % down != 0)
    throw std::invalid_argument("UNetConfig: input dims must be divisible by 2^(levels-1)");
}

UNetConfig UNetConfig::paper_scale() {
  UNetConfig cfg;
  cfg.levels = 5;
  cfg.encoder_filters = {64, 128, 256, 512, 512};
  cfg.history = 40;
  cfg.n_range = 256;
  cfg.n_az_in = 64;
  cfg.az_upsample_factor = 8;
  return cfg;
}

std::vector<ConvSpec> unet_layer_specs(const UNetConfig& cfg) {
  cfg.validate();
  std::vector<ConvSpec> specs;
  const auto& f = cfg.encoder_filters;
  const int L = cfg.levels;
  for (int i = 0; i < L; ++i) {
    int in_ch = (i == 0) ? cfg.in_channels() : f[i - 1];
    specs.push_back({"enc" + std::to_string(i) + "a", in_ch, f[i], 3, 3});
    specs.push_back({"enc" + std::to_string(i) + "b", f[i], f[i], 3, 3});
  }
  for (int i = L - 2; i >= 0; --i) {
    int below = f[i + 1];  // channels arriving from the level beneath
    specs.push_back({"dec" + std::to_string(i) + "a", below + f[i], f[i], 3, 3});
    specs.push_back({"dec" + std::to_string(i) + "b", f[i], f[i], 3, 3});
  }
  for (int j = 0; j < cfg.asym_stages(); ++j)
    specs.push_back({"asym" + std::to_string(j), f[0], f[0], 3, 3});
  specs.push_back({"final", f[0], 1, 1, 1});
  return specs;
}

PolarImage unet_infer(const UNet<float>& net, const Tensor<float>& input,
                      double max_range) {
  Graph<float> g;
  auto in = g.leaf(input, false);
  auto params = add_params(g, net, false);
  auto out = unet_forward(g, net.cfg, params, in);
  const Tensor<float>& o = g.value(out);
  PolarImage img(net.cfg.n_range, net.cfg.n_az_out(), max_range,
                 AzimuthGrid::angle_uniform, ImageKind::probability);
  std::copy(o.v.begin(), o.v.end(), img.data.begin());
  return img;
}

}  // namespace r2l
