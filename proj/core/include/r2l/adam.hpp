#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "r2l/tensor.hpp"

namespace r2l {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  uint64_t seed = 0;  // parameter init seed

  void validate() const {
    if (!(lr > 0.0)) throw std::invalid_argument("AdamConfig: lr > 0");
    if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0)
      throw std::invalid_argument("AdamConfig: betas in [0, 1)");
    if (!(eps > 0.0)) throw std::invalid_argument("AdamConfig: eps > 0");
  }
};

template <class T>
struct AdamState {
  std::vector<Tensor<T>> m, v;
  int64_t step = 0;

  void init_like(const std::vector<Tensor<T>*>& params) {
    m.clear();
    v.clear();
    for (const Tensor<T>* p : params) {
      m.emplace_back(p->shape);
      v.emplace_back(p->shape);
    }
    step = 0;
  }
  bool matches(const std::vector<Tensor<T>*>& params) const {
    if (m.size() != params.size() || v.size() != params.size()) return false;
    for (size_t i = 0; i < params.size(); ++i)
      if (m[i].shape != params[i]->shape || v[i].shape != params[i]->shape) return false;
    return true;
  }
};

// One Adam update with bias correction. Deterministic; no internal RNG.
template <class T>
void adam_step(const std::vector<Tensor<T>*>& params,
               const std::vector<const Tensor<T>*>& grads, AdamState<T>& st,
               const AdamConfig& cfg) {
  cfg.validate();
  if (params.size() != grads.size())
    throw std::invalid_argument("adam_step: params/grads size mismatch");
  if (!st.matches(params)) throw std::invalid_argument("adam_step: state shape mismatch");

  st.step += 1;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(st.step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(st.step));
  for (size_t i = 0; i < params.size(); ++i) {
    Tensor<T>& p = *params[i];
    const Tensor<T>& g = *grads[i];
    if (!p.same_shape(g)) throw std::invalid_argument("adam_step: grad shape mismatch");
    Tensor<T>& m = st.m[i];
    Tensor<T>& v = st.v[i];
    for (size_t j = 0; j < p.size(); ++j) {
      const double gj = static_cast<double>(g[j]);
      const double mj = cfg.beta1 * static_cast<double>(m[j]) + (1.0 - cfg.beta1) * gj;
      const double vj = cfg.beta2 * static_cast<double>(v[j]) + (1.0 - cfg.beta2) * gj * gj;
      m[j] = static_cast<T>(mj);
      v[j] = static_cast<T>(vj);
      const double mhat = mj / bc1;
      const double vhat = vj / bc2;
      p[j] = static_cast<T>(static_cast<double>(p[j]) -
                            cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps));
    }
  }
}

}  // namespace r2l
