#pragma once

#include <stdexcept>

#include "r2l/graph.hpp"

namespace r2l {

struct LossConfig {
  double bce_weight = 1.0;
  double dice_weight = 1.0;
  double dice_epsilon = 1e-6;

  void validate() const {
    if (bce_weight < 0.0 || dice_weight < 0.0)
      throw std::invalid_argument("LossConfig: weights must be >= 0");
    if (!(bce_weight + dice_weight > 0.0))
      throw std::invalid_argument("LossConfig: bce_weight + dice_weight must be > 0");
    if (dice_epsilon < 0.0) throw std::invalid_argument("LossConfig: dice_epsilon >= 0");
  }
};

// bce_weight * BCE(o, g) + dice_weight * Dice(o, g).
template <class T>
typename Graph<T>::Value combined_loss(Graph<T>& g, typename Graph<T>::Value o,
                                       const Tensor<T>& target, const LossConfig& cfg) {
  cfg.validate();
  auto b = g.bce_loss(o, target);
  auto d = g.dice_loss(o, target, static_cast<T>(cfg.dice_epsilon));
  return g.add_scaled(static_cast<T>(cfg.bce_weight), b,
                      static_cast<T>(cfg.dice_weight), d);
}

}  // namespace r2l
