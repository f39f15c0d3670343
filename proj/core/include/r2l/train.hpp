#pragma once

#include <cstdint>
#include <vector>

#include "r2l/adam.hpp"
#include "r2l/loss.hpp"
#include "r2l/unet.hpp"

namespace r2l {

struct TrainSample {
  Tensor<float> input;   // [H+1, n_range, n_az_in]
  Tensor<float> target;  // [1, n_range, n_az_out], binary values
};

struct TrainConfig {
  int epochs = 10;
  int batch_size = 8;
  uint64_t shuffle_seed = 1;
  // Index of the first epoch of this call; a resumed run passes the number
  // of epochs already completed so the shuffle sequence continues unbroken.
  int start_epoch = 0;

  void validate() const;
};

// Mini-batch Adam training. Shuffles per epoch from (shuffle_seed, absolute
// epoch index); gradients are averaged over the batch. Returns the mean
// training loss per epoch. Throws NumericError (with the batch index) if the
// loss goes non-finite.
std::vector<double> train_unet(UNet<float>& net, const std::vector<TrainSample>& data,
                               const LossConfig& loss_cfg, const AdamConfig& adam_cfg,
                               AdamState<float>& state, const TrainConfig& train_cfg);

}  // namespace r2l
