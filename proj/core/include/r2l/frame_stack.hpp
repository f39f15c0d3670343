#pragma once

#include <vector>

#include "r2l/polar_image.hpp"
#include "r2l/tensor.hpp"

namespace r2l {

// Rolling window of the current frame plus `history` past frames, presented
// as input channels ordered oldest -> current. Slots not yet filled by a
// real frame are zero.
class FrameStack {
 public:
  FrameStack(int history, int n_range, int n_az, double max_range);

  void push(const PolarImage& frame);
  const PolarImage& channel(int i) const { return ch_.at(i); }
  int n_channels() const { return static_cast<int>(ch_.size()); }

  // [history+1, n_range, n_az], channel 0 oldest.
  Tensor<float> as_tensor() const;

 private:
  std::vector<PolarImage> ch_;
};

}  // namespace r2l
