#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "r2l/graph.hpp"
#include "r2l/polar_image.hpp"
#include "r2l/rng.hpp"

namespace r2l {

struct UNetConfig {
  int levels = 3;
  std::vector<int> encoder_filters = {8, 16, 32};
  int history = 4;  // past frames; input has history+1 channels
  int n_range = 64;
  int n_az_in = 16;
  int az_upsample_factor = 8;  // output azimuth = n_az_in * factor

  int in_channels() const { return history + 1; }
  int n_az_out() const { return n_az_in * az_upsample_factor; }
  int asym_stages() const {
    int k = 0, f = az_upsample_factor;
    while (f > 1) {
      f /= 2;
      ++k;
    }
    return k;
  }

  void validate() const;
  static UNetConfig paper_scale();
};

// One convolution's shape: name is a stable layer path used in checkpoints.
struct ConvSpec {
  std::string name;
  int in_ch = 0, out_ch = 0, kh = 3, kw = 3;
};

// The full layer list implied by a config, in forward order:
// enc{i}a, enc{i}b for each encoder level; dec{i}a, dec{i}b for each decoder
// level (deep to shallow); asym{j} azimuth-upsampling convs; final 1x1.
std::vector<ConvSpec> unet_layer_specs(const UNetConfig& cfg);

template <class T>
struct UNet {
  struct ConvLayer {
    std::string name;
    Tensor<T> w;  // [out,in,kh,kw]
    Tensor<T> b;  // [out]
  };

  UNetConfig cfg;
  std::vector<ConvLayer> layers;

  // He-style uniform init, bound sqrt(6/fan_in); zero biases; deterministic
  // per seed.
  static UNet init(const UNetConfig& cfg, uint64_t seed) {
    cfg.validate();
    UNet net;
    net.cfg = cfg;
    auto specs = unet_layer_specs(cfg);
    for (size_t li = 0; li < specs.size(); ++li) {
      const ConvSpec& s = specs[li];
      ConvLayer layer;
      layer.name = s.name;
      layer.w = Tensor<T>({s.out_ch, s.in_ch, s.kh, s.kw});
      layer.b = Tensor<T>({s.out_ch});
      const double fan_in = static_cast<double>(s.in_ch) * s.kh * s.kw;
      const double bound = std::sqrt(6.0 / fan_in);
      auto rng = make_rng(seed, li + 31);
      std::uniform_real_distribution<double> u(-bound, bound);
      for (auto& x : layer.w.v) x = static_cast<T>(u(rng));
      net.layers.push_back(std::move(layer));
    }
    return net;
  }

  long long n_params() const {
    long long n = 0;
    for (const auto& l : layers)
      n += static_cast<long long>(l.w.size()) + static_cast<long long>(l.b.size());
    return n;
  }

  template <class U>
  UNet<U> cast() const {
    UNet<U> out;
    out.cfg = cfg;
    for (const auto& l : layers)
      out.layers.push_back({l.name, l.w.template cast<U>(), l.b.template cast<U>()});
    return out;
  }
};

// Registers every layer's weights/biases as graph leaves, in layer order
// (w then b per layer).
template <class T>
std::vector<typename Graph<T>::Value> add_params(Graph<T>& g, const UNet<T>& net,
                                                 bool needs_grad) {
  std::vector<typename Graph<T>::Value> vals;
  vals.reserve(net.layers.size() * 2);
  for (const auto& l : net.layers) {
    vals.push_back(g.leaf(l.w, needs_grad));
    vals.push_back(g.leaf(l.b, needs_grad));
  }
  return vals;
}

// Assembles the network graph from input to the sigmoid output
// [1, n_range, n_az_out]. `params` must come from add_params on the same
// config.
template <class T>
typename Graph<T>::Value unet_forward(Graph<T>& g, const UNetConfig& cfg,
                                      const std::vector<typename Graph<T>::Value>& params,
                                      typename Graph<T>::Value input) {
  using Value = typename Graph<T>::Value;
  cfg.validate();
  size_t li = 0;
  auto conv_relu = [&](Value x) {
    Value y = g.relu(g.conv2d(x, params.at(2 * li), params.at(2 * li + 1)));
    ++li;
    return y;
  };

  const int L = cfg.levels;
  std::vector<Value> skips;
  Value x = input;
  for (int i = 0; i < L; ++i) {
    x = conv_relu(x);
    x = conv_relu(x);
    if (i < L - 1) {
      skips.push_back(x);
      x = g.maxpool2d(x, 2, 2);
    }
  }
  for (int i = L - 2; i >= 0; --i) {
    x = g.upsample_nearest(x, 2, 2);
    x = g.concat_channels(x, skips[i]);
    x = conv_relu(x);
    x = conv_relu(x);
  }
  for (int j = 0; j < cfg.asym_stages(); ++j) {
    x = g.upsample_nearest(x, 1, 2);
    x = conv_relu(x);
  }
  // Final 1x1 projection + sigmoid (no relu).
  Value logits = g.conv2d(x, params.at(2 * li), params.at(2 * li + 1));
  ++li;
  return g.sigmoid(logits);
}

// Convenience inference: input [H+1, n_range, n_az_in] -> probability image.
PolarImage unet_infer(const UNet<float>& net, const Tensor<float>& input,
                      double max_range);

// |d output(row, col) / d input|, one backward pass from the sigmoid output.
// Returns [H+1, n_range, n_az_in].
template <class T>
Tensor<T> saliency_map(const UNet<T>& net, const Tensor<T>& input, int row, int col) {
  const UNetConfig& cfg = net.cfg;
  if (input.ndim() != 3 || input.shape[0] != cfg.in_channels() ||
      input.shape[1] != cfg.n_range || input.shape[2] != cfg.n_az_in)
    throw std::invalid_argument("saliency_map: input shape mismatch");
  if (row < 0 || row >= cfg.n_range || col < 0 || col >= cfg.n_az_out())
    throw std::invalid_argument("saliency_map: target pixel out of range");

  Graph<T> g;
  auto in = g.leaf(input, /*needs_grad=*/true);
  auto params = add_params(g, net, /*needs_grad=*/false);
  auto out = unet_forward(g, cfg, params, in);
  auto target = g.pick(out, static_cast<size_t>(row) * cfg.n_az_out() + col);
  g.backward(target);
  Tensor<T> s = g.grad(in);
  for (auto& v : s.v) v = std::abs(v);
  return s;
}

}  // namespace r2l
