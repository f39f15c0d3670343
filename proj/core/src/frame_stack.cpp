#include "r2l/frame_stack.hpp"

#include <stdexcept>

namespace r2l {

FrameStack::FrameStack(int history, int n_range, int n_az, double max_range) {
  if (history < 0) throw std::invalid_argument("FrameStack: history >= 0");
  ch_.assign(history + 1, PolarImage(n_range, n_az, max_range,
                                     AzimuthGrid::sine_uniform, ImageKind::normalized));
}

void FrameStack::push(const PolarImage& frame) {
  if (frame.n_range != ch_[0].n_range || frame.n_azimuth != ch_[0].n_azimuth)
    throw std::invalid_argument("FrameStack: frame shape mismatch");
  for (size_t i = 0; i + 1 < ch_.size(); ++i) ch_[i] = std::move(ch_[i + 1]);
  ch_.back() = frame;
}

Tensor<float> FrameStack::as_tensor() const {
  const int C = n_channels();
  const int H = ch_[0].n_range, W = ch_[0].n_azimuth;
  Tensor<float> t({C, H, W});
  for (int c = 0; c < C; ++c)
    std::copy(ch_[c].data.begin(), ch_[c].data.end(), &t.at3(c, 0, 0));
  return t;
}

}  // namespace r2l
