#include "r2l/train.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

#include "r2l/rng.hpp"

namespace r2l {

void TrainConfig::validate() const {
  if (epochs < 0) throw std::invalid_argument("TrainConfig: epochs >= 0");
  if (batch_size < 1) throw std::invalid_argument("TrainConfig: batch_size >= 1");
  if (start_epoch < 0) throw std::invalid_argument("TrainConfig: start_epoch >= 0");
}

std::vector<double> train_unet(UNet<float>& net, const std::vector<TrainSample>& data,
                               const LossConfig& loss_cfg, const AdamConfig& adam_cfg,
                               AdamState<float>& state, const TrainConfig& train_cfg) {
  train_cfg.validate();
  loss_cfg.validate();
  adam_cfg.validate();
  if (data.empty()) throw std::invalid_argument("train_unet: empty dataset");

  std::vector<Tensor<float>*> params;
  for (auto& l : net.layers) {
    params.push_back(&l.w);
    params.push_back(&l.b);
  }
  if (state.m.empty()) state.init_like(params);
  if (!state.matches(params))
    throw std::invalid_argument("train_unet: optimizer state does not match model");

  std::vector<Tensor<float>> grad_acc;
  for (auto* p : params) grad_acc.emplace_back(p->shape);

  std::vector<size_t> order(data.size());
  std::iota(order.begin(), order.end(), size_t{0});

  std::vector<double> epoch_losses;
  for (int e = 0; e < train_cfg.epochs; ++e) {
    const int abs_epoch = train_cfg.start_epoch + e;
    auto rng = make_rng(train_cfg.shuffle_seed, static_cast<uint64_t>(abs_epoch) + 0xe90c);
    std::iota(order.begin(), order.end(), size_t{0});
    std::shuffle(order.begin(), order.end(), rng);

    double loss_sum = 0.0;
    size_t cursor = 0;
    int batch_index = 0;
    while (cursor < order.size()) {
      const size_t batch_n =
          std::min<size_t>(train_cfg.batch_size, order.size() - cursor);
      for (auto& t : grad_acc) t.fill(0.0f);

      for (size_t bi = 0; bi < batch_n; ++bi) {
        const TrainSample& sample = data[order[cursor + bi]];
        try {
          Graph<float> g;
          auto in = g.leaf(sample.input, false);
          auto pvals = add_params(g, net, true);
          auto out = unet_forward(g, net.cfg, pvals, in);
          auto loss = combined_loss(g, out, sample.target, loss_cfg);
          loss_sum += static_cast<double>(g.value(loss)[0]);
          g.backward(loss);
          for (size_t pi = 0; pi < params.size(); ++pi) {
            const Tensor<float>& gr = g.grad(pvals[pi]);
            for (size_t j = 0; j < gr.size(); ++j) grad_acc[pi][j] += gr[j];
          }
        } catch (const NumericError& err) {
          throw NumericError("epoch " + std::to_string(abs_epoch) + " batch " +
                             std::to_string(batch_index) + ": " + err.what());
        }
      }

      const float inv = 1.0f / static_cast<float>(batch_n);
      for (auto& t : grad_acc)
        for (auto& x : t.v) x *= inv;
      std::vector<const Tensor<float>*> gptrs;
      for (auto& t : grad_acc) gptrs.push_back(&t);
      adam_step(params, gptrs, state, adam_cfg);

      cursor += batch_n;
      ++batch_index;
    }
    epoch_losses.push_back(loss_sum / static_cast<double>(order.size()));
  }
  return epoch_losses;
}

}  // namespace r2l
