#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "r2l/tensor.hpp"

namespace r2l {

// Reverse-mode autodiff over dense tensors. Eager evaluation: each op
// computes its output immediately and records a backward closure; node
// creation order is already a topological order, so backward() is a single
// reverse sweep. One graph instance serves one forward/backward episode.
template <class T>
class Graph {
 public:
  struct Value {
    int id = -1;
    bool valid() const { return id >= 0; }
  };

  Value leaf(Tensor<T> t, bool needs_grad) {
    check_finite(t, "leaf");
    return push(std::move(t), needs_grad, nullptr);
  }

  // --- elementwise and structural ops ---

  Value relu(Value xv) {
    const Tensor<T>& x = out(xv);
    Tensor<T> y = x;
    for (T& e : y.v) e = e > T(0) ? e : T(0);
    return push_op("relu", std::move(y), {xv}, [this, xv](int self) {
      const Tensor<T>& g = nodes_[self].grad;
      const Tensor<T>& x = out(xv);
      Tensor<T>& dx = nodes_[xv.id].grad;
      for (size_t i = 0; i < g.size(); ++i)
        if (x[i] > T(0)) dx[i] += g[i];
    });
  }

  Value sigmoid(Value xv) {
    const Tensor<T>& x = out(xv);
    Tensor<T> y = x;
    for (T& e : y.v) e = T(1) / (T(1) + std::exp(-e));
    return push_op("sigmoid", std::move(y), {xv}, [this, xv](int self) {
      const Tensor<T>& g = nodes_[self].grad;
      const Tensor<T>& y = nodes_[self].out;
      Tensor<T>& dx = nodes_[xv.id].grad;
      for (size_t i = 0; i < g.size(); ++i) dx[i] += g[i] * y[i] * (T(1) - y[i]);
    });
  }

  // "Same"-padded 2D cross-correlation: x [Ci,H,W], w [Co,Ci,kh,kw] with odd
  // kh/kw, b [Co] -> [Co,H,W].
  Value conv2d(Value xv, Value wv, Value bv) {
    const Tensor<T>& x = out(xv);
    const Tensor<T>& w = out(wv);
    const Tensor<T>& b = out(bv);
    if (x.ndim() != 3 || w.ndim() != 4 || b.ndim() != 1)
      throw std::invalid_argument("conv2d: want x[C,H,W], w[Co,Ci,kh,kw], b[Co]");
    const int Ci = x.shape[0], H = x.shape[1], W = x.shape[2];
    const int Co = w.shape[0], kh = w.shape[2], kw = w.shape[3];
    if (w.shape[1] != Ci) throw std::invalid_argument("conv2d: channel mismatch");
    if (b.shape[0] != Co) throw std::invalid_argument("conv2d: bias mismatch");
    if (kh % 2 == 0 || kw % 2 == 0) throw std::invalid_argument("conv2d: kernel dims must be odd");
    const int ph = kh / 2, pw = kw / 2;

    Tensor<T> y({Co, H, W});
    for (int co = 0; co < Co; ++co) {
      T bias = b[co];
      T* plane = &y.at3(co, 0, 0);
      for (int i = 0; i < H * W; ++i) plane[i] = bias;
      for (int ci = 0; ci < Ci; ++ci) {
        for (int kr = 0; kr < kh; ++kr) {
          const int dr = kr - ph;
          const int r0 = std::max(0, -dr), r1 = std::min(H, H - dr);
          for (int kc = 0; kc < kw; ++kc) {
            const int dc = kc - pw;
            const int c0 = std::max(0, -dc), c1 = std::min(W, W - dc);
            if (c0 >= c1) continue;
            const T wval = w.at4(co, ci, kr, kc);
            for (int r = r0; r < r1; ++r) {
              const T* xrow = &x.at3(ci, r + dr, c0 + dc);
              T* yrow = &y.at3(co, r, c0);
              const int n = c1 - c0;
              for (int i = 0; i < n; ++i) yrow[i] += wval * xrow[i];
            }
          }
        }
      }
    }

    return push_op("conv2d", std::move(y), {xv, wv, bv}, [this, xv, wv, bv](int self) {
      const Tensor<T>& g = nodes_[self].grad;
      const Tensor<T>& x = out(xv);
      const Tensor<T>& w = out(wv);
      const int Ci = x.shape[0], H = x.shape[1], W = x.shape[2];
      const int Co = w.shape[0], kh = w.shape[2], kw = w.shape[3];
      const int ph = kh / 2, pw = kw / 2;
      const bool need_x = nodes_[xv.id].needs_grad;
      const bool need_w = nodes_[wv.id].needs_grad;
      const bool need_b = nodes_[bv.id].needs_grad;

      if (need_b) {
        Tensor<T>& db = nodes_[bv.id].grad;
        for (int co = 0; co < Co; ++co) {
          const T* gp = &g.at3(co, 0, 0);
          T acc = T(0);
          for (int i = 0; i < H * W; ++i) acc += gp[i];
          db[co] += acc;
        }
      }
      if (!need_x && !need_w) return;
      Tensor<T>* dx = need_x ? &nodes_[xv.id].grad : nullptr;
      Tensor<T>* dw = need_w ? &nodes_[wv.id].grad : nullptr;
      for (int co = 0; co < Co; ++co) {
        for (int ci = 0; ci < Ci; ++ci) {
          for (int kr = 0; kr < kh; ++kr) {
            const int dr = kr - ph;
            const int r0 = std::max(0, -dr), r1 = std::min(H, H - dr);
            for (int kc = 0; kc < kw; ++kc) {
              const int dc = kc - pw;
              const int c0 = std::max(0, -dc), c1 = std::min(W, W - dc);
              if (c0 >= c1) continue;
              const T wval = w.at4(co, ci, kr, kc);
              T acc = T(0);
              const int n = c1 - c0;
              for (int r = r0; r < r1; ++r) {
                const T* grow = &g.at3(co, r, c0);
                const T* xrow = &x.at3(ci, r + dr, c0 + dc);
                if (dx) {
                  T* dxrow = &dx->at3(ci, r + dr, c0 + dc);
                  for (int i = 0; i < n; ++i) {
                    dxrow[i] += wval * grow[i];
                    acc += grow[i] * xrow[i];
                  }
                } else {
                  for (int i = 0; i < n; ++i) acc += grow[i] * xrow[i];
                }
              }
              if (dw) dw->at4(co, ci, kr, kc) += acc;
            }
          }
        }
      }
    });
  }

  // Max pooling with window (ph, pw); H % ph == 0 and W % pw == 0.
  // Ties route the gradient to the first maximum in row-major window order.
  Value maxpool2d(Value xv, int ph, int pw) {
    const Tensor<T>& x = out(xv);
    if (x.ndim() != 3) throw std::invalid_argument("maxpool2d: want [C,H,W]");
    const int C = x.shape[0], H = x.shape[1], W = x.shape[2];
    if (ph < 1 || pw < 1 || H % ph != 0 || W % pw != 0)
      throw std::invalid_argument("maxpool2d: dims not divisible by window");
    const int Ho = H / ph, Wo = W / pw;

    Tensor<T> y({C, Ho, Wo});
    auto argmax = std::make_shared<std::vector<size_t>>(y.size());
    size_t oi = 0;
    for (int c = 0; c < C; ++c) {
      for (int ro = 0; ro < Ho; ++ro) {
        for (int co = 0; co < Wo; ++co, ++oi) {
          T best{};
          size_t best_idx = 0;
          bool first = true;
          for (int i = 0; i < ph; ++i) {
            for (int j = 0; j < pw; ++j) {
              const int r = ro * ph + i, cc = co * pw + j;
              const T val = x.at3(c, r, cc);
              if (first || val > best) {
                best = val;
                best_idx = (static_cast<size_t>(c) * H + r) * W + cc;
                first = false;
              }
            }
          }
          y[oi] = best;
          (*argmax)[oi] = best_idx;
        }
      }
    }

    return push_op("maxpool2d", std::move(y), {xv}, [this, xv, argmax](int self) {
      const Tensor<T>& g = nodes_[self].grad;
      Tensor<T>& dx = nodes_[xv.id].grad;
      for (size_t i = 0; i < g.size(); ++i) dx[(*argmax)[i]] += g[i];
    });
  }

  // Nearest-neighbor upsampling by integer factors (fh, fw).
  Value upsample_nearest(Value xv, int fh, int fw) {
    const Tensor<T>& x = out(xv);
    if (x.ndim() != 3) throw std::invalid_argument("upsample_nearest: want [C,H,W]");
    if (fh < 1 || fw < 1) throw std::invalid_argument("upsample_nearest: factors >= 1");
    const int C = x.shape[0], H = x.shape[1], W = x.shape[2];
    const int Ho = H * fh, Wo = W * fw;

    Tensor<T> y({C, Ho, Wo});
    for (int c = 0; c < C; ++c)
      for (int r = 0; r < Ho; ++r) {
        const T* xrow = &x.at3(c, r / fh, 0);
        T* yrow = &y.at3(c, r, 0);
        for (int cc = 0; cc < Wo; ++cc) yrow[cc] = xrow[cc / fw];
      }

    return push_op("upsample_nearest", std::move(y), {xv}, [this, xv, fh, fw](int self) {
      const Tensor<T>& g = nodes_[self].grad;
      Tensor<T>& dx = nodes_[xv.id].grad;
      const int C = dx.shape[0], H = dx.shape[1], W = dx.shape[2];
      const int Ho = H * fh, Wo = W * fw;
      for (int c = 0; c < C; ++c)
        for (int r = 0; r < Ho; ++r) {
          const T* grow = &g.v[(static_cast<size_t>(c) * Ho + r) * Wo];
          T* dxrow = &dx.at3(c, r / fh, 0);
          for (int cc = 0; cc < Wo; ++cc) dxrow[cc / fw] += grow[cc];
        }
    });
  }

  Value concat_channels(Value av, Value bv) {
    const Tensor<T>& a = out(av);
    const Tensor<T>& b = out(bv);
    if (a.ndim() != 3 || b.ndim() != 3 || a.shape[1] != b.shape[1] || a.shape[2] != b.shape[2])
      throw std::invalid_argument("concat_channels: spatial shape mismatch");
    const int Ca = a.shape[0], Cb = b.shape[0];
    Tensor<T> y({Ca + Cb, a.shape[1], a.shape[2]});
    std::copy(a.v.begin(), a.v.end(), y.v.begin());
    std::copy(b.v.begin(), b.v.end(), y.v.begin() + a.size());
    return push_op("concat_channels", std::move(y), {av, bv}, [this, av, bv](int self) {
      const Tensor<T>& g = nodes_[self].grad;
      Tensor<T>& da = nodes_[av.id].grad;
      Tensor<T>& db = nodes_[bv.id].grad;
      const size_t na = da.size();
      if (nodes_[av.id].needs_grad)
        for (size_t i = 0; i < na; ++i) da[i] += g[i];
      if (nodes_[bv.id].needs_grad)
        for (size_t i = 0; i < db.size(); ++i) db[i] += g[na + i];
    });
  }

  // --- losses (scalar outputs) ---

  // -mean(g*log o + (1-g)*log(1-o)) with o clamped to [1e-7, 1-1e-7].
  // Gradient is zero where the clamp is active.
  Value bce_loss(Value ov, const Tensor<T>& target) {
    const Tensor<T>& o = out(ov);
    if (!o.same_shape(target)) throw std::invalid_argument("bce_loss: shape mismatch");
    const T lo = T(1e-7), hi = T(1) - T(1e-7);
    const size_t n = o.size();
    double acc = 0.0;
    for (size_t i = 0; i < n; ++i) {
      double c = std::clamp(static_cast<double>(o[i]), static_cast<double>(lo),
                            static_cast<double>(hi));
      double g = static_cast<double>(target[i]);
      acc -= g * std::log(c) + (1.0 - g) * std::log(1.0 - c);
    }
    Tensor<T> y = Tensor<T>::scalar(static_cast<T>(acc / static_cast<double>(n)));
    auto tgt = std::make_shared<Tensor<T>>(target);
    return push_op("bce_loss", std::move(y), {ov}, [this, ov, tgt, lo, hi](int self) {
      const T gout = nodes_[self].grad[0];
      const Tensor<T>& o = out(ov);
      Tensor<T>& dx = nodes_[ov.id].grad;
      const T invn = T(1) / static_cast<T>(o.size());
      for (size_t i = 0; i < o.size(); ++i) {
        if (o[i] <= lo || o[i] >= hi) continue;
        dx[i] += gout * invn * (o[i] - (*tgt)[i]) / (o[i] * (T(1) - o[i]));
      }
    });
  }

  // 1 - (2*sum(o*g) + eps) / (sum(o^2) + sum(g^2) + eps).
  Value dice_loss(Value ov, const Tensor<T>& target, T eps) {
    const Tensor<T>& o = out(ov);
    if (!o.same_shape(target)) throw std::invalid_argument("dice_loss: shape mismatch");
    double inter = 0.0, osq = 0.0, gsq = 0.0;
    for (size_t i = 0; i < o.size(); ++i) {
      inter += static_cast<double>(o[i]) * static_cast<double>(target[i]);
      osq += static_cast<double>(o[i]) * static_cast<double>(o[i]);
      gsq += static_cast<double>(target[i]) * static_cast<double>(target[i]);
    }
    const double num = 2.0 * inter + static_cast<double>(eps);
    const double den = osq + gsq + static_cast<double>(eps);
    Tensor<T> y = Tensor<T>::scalar(static_cast<T>(1.0 - num / den));
    auto tgt = std::make_shared<Tensor<T>>(target);
    return push_op("dice_loss", std::move(y), {ov},
                   [this, ov, tgt, num, den](int self) {
                     const T gout = nodes_[self].grad[0];
                     const Tensor<T>& o = out(ov);
                     Tensor<T>& dx = nodes_[ov.id].grad;
                     const T dennum = static_cast<T>(num / (den * den));
                     const T invden = static_cast<T>(1.0 / den);
                     for (size_t i = 0; i < o.size(); ++i)
                       dx[i] += gout * (T(2) * o[i] * dennum - T(2) * (*tgt)[i] * invden);
                   });
  }

  // ca*a + cb*b for scalar values a, b.
  Value add_scaled(T ca, Value av, T cb, Value bv) {
    const Tensor<T>& a = out(av);
    const Tensor<T>& b = out(bv);
    if (a.size() != 1 || b.size() != 1)
      throw std::invalid_argument("add_scaled: scalars only");
    Tensor<T> y = Tensor<T>::scalar(ca * a[0] + cb * b[0]);
    return push_op("add_scaled", std::move(y), {av, bv}, [this, av, bv, ca, cb](int self) {
      const T g = nodes_[self].grad[0];
      if (nodes_[av.id].needs_grad) nodes_[av.id].grad[0] += ca * g;
      if (nodes_[bv.id].needs_grad) nodes_[bv.id].grad[0] += cb * g;
    });
  }

  // Scalar sum(weights[i] * x[i]) with constant weights (no gradient to
  // them). Reduces a tensor to a scalar so its whole gradient can be probed.
  Value weighted_sum(Value xv, const Tensor<T>& weights) {
    const Tensor<T>& x = out(xv);
    if (!x.same_shape(weights))
      throw std::invalid_argument("weighted_sum: shape mismatch");
    double acc = 0.0;
    for (size_t i = 0; i < x.size(); ++i)
      acc += static_cast<double>(weights[i]) * static_cast<double>(x[i]);
    Tensor<T> y = Tensor<T>::scalar(static_cast<T>(acc));
    auto w = std::make_shared<Tensor<T>>(weights);
    return push_op("weighted_sum", std::move(y), {xv}, [this, xv, w](int self) {
      const T gout = nodes_[self].grad[0];
      Tensor<T>& dx = nodes_[xv.id].grad;
      for (size_t i = 0; i < dx.size(); ++i) dx[i] += gout * (*w)[i];
    });
  }

  // Extracts one element as a scalar value (saliency target pixel).
  Value pick(Value xv, size_t flat_index) {
    const Tensor<T>& x = out(xv);
    if (flat_index >= x.size()) throw std::invalid_argument("pick: index out of range");
    Tensor<T> y = Tensor<T>::scalar(x[flat_index]);
    return push_op("pick", std::move(y), {xv}, [this, xv, flat_index](int self) {
      nodes_[xv.id].grad[flat_index] += nodes_[self].grad[0];
    });
  }

  // --- access and backward ---

  const Tensor<T>& value(Value v) const { return nodes_.at(v.id).out; }
  const Tensor<T>& grad(Value v) const { return nodes_.at(v.id).grad; }
  size_t n_nodes() const { return nodes_.size(); }

  // Reverse sweep from a scalar root. Each node's closure runs exactly once,
  // in reverse creation (= reverse topological) order.
  void backward(Value root) {
    if (nodes_.at(root.id).out.size() != 1)
      throw std::invalid_argument("backward: root must be scalar");
    for (Node& n : nodes_) {
      n.grad = Tensor<T>(n.out.shape);  // zero-filled
    }
    nodes_[root.id].grad[0] = T(1);
    for (int i = root.id; i >= 0; --i) {
      Node& n = nodes_[i];
      if (n.back && n.needs_grad) n.back(i);
    }
    for (const Node& n : nodes_)
      if (n.needs_grad) check_finite(n.grad, "backward");
  }

 private:
  struct Node {
    Tensor<T> out;
    Tensor<T> grad;
    bool needs_grad = false;
    std::function<void(int)> back;
  };

  const Tensor<T>& out(Value v) const { return nodes_.at(v.id).out; }

  Value push(Tensor<T> t, bool needs_grad, std::function<void(int)> back) {
    nodes_.push_back(Node{std::move(t), {}, needs_grad, std::move(back)});
    return Value{static_cast<int>(nodes_.size()) - 1};
  }

  Value push_op(const char* name, Tensor<T> y, std::initializer_list<Value> inputs,
                std::function<void(int)> back) {
    check_finite(y, name);
    bool needs = false;
    for (Value v : inputs) {
      if (!v.valid() || v.id >= static_cast<int>(nodes_.size()))
        throw std::invalid_argument("graph op: input from another graph");
      needs = needs || nodes_[v.id].needs_grad;
    }
    return push(std::move(y), needs, needs ? std::move(back) : nullptr);
  }

  std::vector<Node> nodes_;
};

}  // namespace r2l
