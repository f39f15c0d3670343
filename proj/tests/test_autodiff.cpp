#include <doctest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "r2l/adam.hpp"
#include "r2l/errors.hpp"
#include "r2l/gradcheck.hpp"
#include "r2l/graph.hpp"
#include "r2l/loss.hpp"
#include "r2l/rng.hpp"
#include "r2l/train.hpp"
#include "r2l/unet.hpp"

using namespace r2l;
using G = Graph<double>;

namespace {

Tensor<double> rnd(std::vector<int> shape, std::mt19937_64& rng, double lo, double hi) {
  Tensor<double> t(shape);
  std::uniform_real_distribution<double> u(lo, hi);
  for (auto& x : t.v) x = u(rng);
  return t;
}

// <op(x), y> vs <x, op^T(y)> via one backward pass from weighted_sum.
// Returns the absolute gap; exact adjoints keep it at rounding level.
double adjoint_gap(const std::function<G::Value(G&, std::vector<G::Value>&)>& op,
                   const std::vector<Tensor<double>>& inputs,
                   const Tensor<double>& y) {
  G g;
  std::vector<G::Value> leaves;
  for (const auto& t : inputs) leaves.push_back(g.leaf(t, true));
  G::Value out = op(g, leaves);
  G::Value L = g.weighted_sum(out, y);
  g.backward(L);
  const double lhs = g.value(L)[0];
  double rhs = 0.0;
  for (size_t k = 0; k < inputs.size(); ++k) {
    const Tensor<double>& grad = g.grad(leaves[k]);
    for (size_t i = 0; i < inputs[k].size(); ++i) rhs += inputs[k][i] * grad[i];
  }
  return std::abs(lhs - rhs);
}

}  // namespace

TEST_CASE("gradient check suite passes with margin") {
  const auto report = run_gradcheck_suite(7);
  CHECK(report.all_pass());
  bool saw_composed = false;
  for (const auto& c : report.checks) {
    INFO(c.name << ": rel err " << c.max_rel_err << " tol " << c.tolerance);
    CHECK(c.pass());
    CHECK(c.n_coords >= 20);
    if (c.name == "composed_unet") {
      saw_composed = true;
      CHECK(c.tolerance == 1e-5);
    } else {
      CHECK(c.tolerance <= 1e-6);  // per-op bound
    }
  }
  CHECK(saw_composed);
  CHECK(report.checks.size() >= 14);
}

TEST_CASE("linear op adjointness <Ax,y> = <x,A^T y>") {
  auto rng = make_rng(99, 1);
  const double tol = 1e-10;

  // conv2d, linear in x with fixed weights and zero bias.
  {
    auto w = rnd({3, 2, 3, 3}, rng, -1.0, 1.0);
    auto b = Tensor<double>({3});
    auto y = rnd({3, 5, 7}, rng, -1.0, 1.0);
    double gap = adjoint_gap(
        [&](G& g, std::vector<G::Value>& in) {
          return g.conv2d(in[0], g.leaf(w, false), g.leaf(b, false));
        },
        {rnd({2, 5, 7}, rng, -1.0, 1.0)}, y);
    CHECK(gap < tol);
  }
  // conv2d, linear in w with fixed input and zero bias.
  {
    auto x = rnd({2, 5, 7}, rng, -1.0, 1.0);
    auto b = Tensor<double>({3});
    auto y = rnd({3, 5, 7}, rng, -1.0, 1.0);
    double gap = adjoint_gap(
        [&](G& g, std::vector<G::Value>& in) {
          return g.conv2d(g.leaf(x, false), in[0], g.leaf(b, false));
        },
        {rnd({3, 2, 3, 3}, rng, -1.0, 1.0)}, y);
    CHECK(gap < tol);
  }
  // upsample_nearest.
  {
    auto y = rnd({2, 6, 8}, rng, -1.0, 1.0);
    double gap = adjoint_gap(
        [](G& g, std::vector<G::Value>& in) { return g.upsample_nearest(in[0], 2, 2); },
        {rnd({2, 3, 4}, rng, -1.0, 1.0)}, y);
    CHECK(gap < tol);
  }
  // concat_channels, joint over both inputs.
  {
    auto y = rnd({5, 4, 6}, rng, -1.0, 1.0);
    double gap = adjoint_gap(
        [](G& g, std::vector<G::Value>& in) { return g.concat_channels(in[0], in[1]); },
        {rnd({2, 4, 6}, rng, -1.0, 1.0), rnd({3, 4, 6}, rng, -1.0, 1.0)}, y);
    CHECK(gap < tol);
  }
  // maxpool2d and relu are selections once the active set is fixed; away
  // from ties/kinks the same identity holds for the linearization.
  {
    auto y = rnd({2, 2, 3}, rng, -1.0, 1.0);
    double gap = adjoint_gap(
        [](G& g, std::vector<G::Value>& in) { return g.maxpool2d(in[0], 2, 2); },
        {rnd({2, 4, 6}, rng, 0.5, 3.0)}, y);
    CHECK(gap < tol);
  }
  {
    auto x = rnd({2, 4, 6}, rng, 0.2, 2.0);
    for (size_t i = 0; i < x.size(); i += 2) x[i] = -x[i];  // both sides of the kink
    auto y = rnd({2, 4, 6}, rng, -1.0, 1.0);
    double gap = adjoint_gap(
        [](G& g, std::vector<G::Value>& in) { return g.relu(in[0]); }, {x}, y);
    CHECK(gap < tol);
  }
}

TEST_CASE("concat backward splits the gradient exactly") {
  auto rng = make_rng(99, 2);
  auto x1 = rnd({2, 3, 4}, rng, -1.0, 1.0);
  auto x2 = rnd({1, 3, 4}, rng, -1.0, 1.0);
  auto w = rnd({3, 3, 4}, rng, -1.0, 1.0);
  G g;
  auto a = g.leaf(x1, true), b = g.leaf(x2, true);
  g.backward(g.weighted_sum(g.concat_channels(a, b), w));
  const auto& g1 = g.grad(a);
  const auto& g2 = g.grad(b);
  for (size_t i = 0; i < g1.size(); ++i) CHECK(g1[i] == w[i]);
  for (size_t i = 0; i < g2.size(); ++i) CHECK(g2[i] == w[g1.size() + i]);
}

TEST_CASE("upsample backward sums each block") {
  auto rng = make_rng(99, 3);
  auto x = rnd({1, 2, 2}, rng, -1.0, 1.0);
  auto w = rnd({1, 4, 4}, rng, -1.0, 1.0);
  G g;
  auto xv = g.leaf(x, true);
  g.backward(g.weighted_sum(g.upsample_nearest(xv, 2, 2), w));
  const auto& gx = g.grad(xv);
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) {
      double want = w.at3(0, 2 * r, 2 * c) + w.at3(0, 2 * r, 2 * c + 1) +
                    w.at3(0, 2 * r + 1, 2 * c) + w.at3(0, 2 * r + 1, 2 * c + 1);
      CHECK(gx.at3(0, r, c) == doctest::Approx(want).epsilon(1e-15));
    }
}

TEST_CASE("maxpool ties route the gradient to the first maximum") {
  Tensor<double> x({1, 2, 2});
  x.fill(1.0);
  Tensor<double> w({1, 1, 1});
  w[0] = 0.7;
  G g;
  auto xv = g.leaf(x, true);
  g.backward(g.weighted_sum(g.maxpool2d(xv, 2, 2), w));
  const auto& gx = g.grad(xv);
  CHECK(gx[0] == 0.7);
  CHECK(gx[1] == 0.0);
  CHECK(gx[2] == 0.0);
  CHECK(gx[3] == 0.0);
}

TEST_CASE("bce value and clamp behavior") {
  // o = 0.5 everywhere -> every term is ln 2 regardless of the target.
  {
    Tensor<double> o({1, 4, 6});
    o.fill(0.5);
    Tensor<double> tgt({1, 4, 6});
    for (size_t i = 0; i < tgt.size(); ++i) tgt[i] = (i % 3 == 0) ? 1.0 : 0.0;
    G g;
    auto loss = g.bce_loss(g.leaf(o, true), tgt);
    CHECK(std::abs(g.value(loss)[0] - std::log(2.0)) < 1e-9);
  }
  // Outputs beyond the 1e-7 clamp carry zero gradient but a finite value.
  {
    Tensor<double> o({2});
    o[0] = 1e-9;  // below the clamp
    o[1] = 0.5;
    Tensor<double> tgt({2});
    tgt[0] = 1.0;
    tgt[1] = 1.0;
    G g;
    auto ov = g.leaf(o, true);
    auto loss = g.bce_loss(ov, tgt);
    const double want = 0.5 * (-std::log(1e-7) - std::log(0.5));
    CHECK(g.value(loss)[0] == doctest::Approx(want).epsilon(1e-12));
    g.backward(loss);
    CHECK(g.grad(ov)[0] == 0.0);  // clamped coordinate
    CHECK(g.grad(ov)[1] == doctest::Approx(-1.0).epsilon(1e-12));
  }
}

TEST_CASE("dice worked examples") {
  const double eps = 1e-6;
  auto dice = [&](const std::vector<double>& ov, const std::vector<double>& gv) {
    Tensor<double> o({static_cast<int>(ov.size())});
    Tensor<double> t({static_cast<int>(gv.size())});
    o.v = ov;
    t.v = gv;
    G g;
    return g.value(g.dice_loss(g.leaf(o, false), t, eps))[0];
  };

  // Identical binary masks -> 0 exactly (numerator equals denominator).
  CHECK(dice({1, 0, 1}, {1, 0, 1}) == 0.0);
  // Disjoint supports -> 1 up to eps.
  const double disjoint = 1.0 - eps / (4.0 + eps);
  CHECK(std::abs(dice({1, 1, 0, 0}, {0, 0, 1, 1}) - disjoint) < 1e-9);
  // Soft prediction: 1 - (2*0.5 + eps) / (0.25 + 0.25 + 1 + eps).
  const double soft = 1.0 - (1.0 + eps) / (1.5 + eps);
  CHECK(std::abs(dice({0.5, 0.5}, {1, 0}) - soft) < 1e-9);
}

TEST_CASE("dice stays within [0, 1 + eps]") {
  auto rng = make_rng(99, 4);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  std::bernoulli_distribution coin(0.35);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + trial % 64;
    Tensor<double> z({n}), tgt({n});
    for (auto& x : z.v) x = u(rng);
    for (auto& x : tgt.v) x = coin(rng) ? 1.0 : 0.0;
    G g;
    const double v = g.value(g.dice_loss(g.sigmoid(g.leaf(z, false)), tgt, 1e-6))[0];
    CHECK(v >= 0.0);
    CHECK(v <= 1.0 + 1e-6);
  }
}

TEST_CASE("combined loss composition") {
  auto rng = make_rng(99, 5);
  auto z = rnd({1, 2, 6}, rng, -2.0, 2.0);
  Tensor<double> tgt({1, 2, 6});
  for (size_t i = 0; i < tgt.size(); ++i) tgt[i] = (i % 2 == 0) ? 1.0 : 0.0;

  auto eval = [&](const LossConfig& lc) {
    G g;
    auto o = g.sigmoid(g.leaf(z, false));
    return g.value(combined_loss(g, o, tgt, lc))[0];
  };
  auto bce_only = [&]() {
    G g;
    return g.value(g.bce_loss(g.sigmoid(g.leaf(z, false)), tgt))[0];
  };
  auto dice_only = [&]() {
    G g;
    return g.value(g.dice_loss(g.sigmoid(g.leaf(z, false)), tgt, 1e-6))[0];
  };

  CHECK(eval({1.0, 0.0, 1e-6}) == bce_only());
  CHECK(eval({0.0, 1.0, 1e-6}) == dice_only());

  // lambda_b = lambda_d = 1, o = 0.5 const, half the pixels on:
  // ln 2 plus the hand-evaluated dice value.
  {
    Tensor<double> o({24});
    o.fill(0.5);
    Tensor<double> half({24});
    for (int i = 0; i < 12; ++i) half[i] = 1.0;
    G g;
    // o = sigmoid(0) = 0.5 exactly.
    Tensor<double> zero({24});
    auto loss = combined_loss(g, g.sigmoid(g.leaf(zero, false)), half, LossConfig{});
    const double dice_hand = 1.0 - (12.0 + 1e-6) / (18.0 + 1e-6);
    CHECK(std::abs(g.value(loss)[0] - (std::log(2.0) + dice_hand)) < 1e-9);
  }

  CHECK_THROWS_AS(eval({0.0, 0.0, 1e-6}), std::invalid_argument);
  CHECK_THROWS_AS(eval({-1.0, 1.0, 1e-6}), std::invalid_argument);
}

TEST_CASE("graph rejects non-finite values") {
  Tensor<double> bad({3});
  bad[1] = std::numeric_limits<double>::quiet_NaN();
  G g;
  CHECK_THROWS_AS(g.leaf(bad, false), NumericError);
}

TEST_CASE("adam zero gradient leaves parameters untouched") {
  auto rng = make_rng(99, 6);
  Tensor<double> p = rnd({4, 3}, rng, -1.0, 1.0);
  const Tensor<double> orig = p;
  Tensor<double> zero({4, 3});
  AdamState<double> st;
  std::vector<Tensor<double>*> params{&p};
  st.init_like(params);
  AdamConfig cfg;
  for (int i = 0; i < 5; ++i) adam_step<double>(params, {&zero}, st, cfg);
  for (size_t i = 0; i < p.size(); ++i) CHECK(p[i] == orig[i]);
}

TEST_CASE("adam constant gradient step size approaches lr") {
  Tensor<double> p({1});
  Tensor<double> grad({1});
  grad[0] = 3.7;  // any constant
  AdamState<double> st;
  std::vector<Tensor<double>*> params{&p};
  st.init_like(params);
  AdamConfig cfg;
  cfg.lr = 1e-3;
  double prev = p[0];
  double delta = 0.0;
  for (int i = 0; i < 2000; ++i) {
    adam_step<double>(params, {&grad}, st, cfg);
    delta = prev - p[0];
    prev = p[0];
  }
  CHECK(std::abs(delta - cfg.lr) < 1e-6);  // m_hat/sqrt(v_hat) -> 1
}

TEST_CASE("adam determinism and validation") {
  auto rng = make_rng(99, 7);
  auto run = [&](uint64_t seed) {
    auto r = make_rng(seed, 0);
    Tensor<double> p = rnd({8}, r, -1.0, 1.0);
    AdamState<double> st;
    std::vector<Tensor<double>*> params{&p};
    st.init_like(params);
    AdamConfig cfg;
    for (int i = 0; i < 50; ++i) {
      Tensor<double> grd = rnd({8}, r, -1.0, 1.0);
      adam_step<double>(params, {&grd}, st, cfg);
    }
    return p;
  };
  Tensor<double> a = run(5), b = run(5);
  for (size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);

  Tensor<double> p = rnd({4}, rng, -1.0, 1.0), g4 = rnd({4}, rng, -1.0, 1.0);
  Tensor<double> g3({3});
  AdamState<double> st;
  std::vector<Tensor<double>*> params{&p};
  st.init_like(params);
  CHECK_THROWS_AS(adam_step<double>(params, {&g3}, st, AdamConfig{}),
                  std::invalid_argument);
  CHECK_THROWS_AS(adam_step<double>(params, {&g4, &g4}, st, AdamConfig{}),
                  std::invalid_argument);
  AdamConfig bad;
  bad.lr = 0.0;
  CHECK_THROWS_AS(adam_step<double>(params, {&g4}, st, bad), std::invalid_argument);
}

namespace {

UNetConfig tiny_cfg() {
  UNetConfig cfg;
  cfg.levels = 2;
  cfg.encoder_filters = {4, 8};
  cfg.history = 0;
  cfg.n_range = 8;
  cfg.n_az_in = 8;
  cfg.az_upsample_factor = 2;
  return cfg;
}

std::vector<TrainSample> tiny_samples(const UNetConfig& cfg, int n, uint64_t seed) {
  auto rng = make_rng(seed, 0);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  std::bernoulli_distribution coin(0.3);
  std::vector<TrainSample> out;
  for (int i = 0; i < n; ++i) {
    TrainSample s{Tensor<float>({cfg.in_channels(), cfg.n_range, cfg.n_az_in}),
                  Tensor<float>({1, cfg.n_range, cfg.n_az_out()})};
    for (auto& x : s.input.v) x = u(rng);
    for (auto& x : s.target.v) x = coin(rng) ? 1.0f : 0.0f;
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

TEST_CASE("training replays bitwise identically") {
  const UNetConfig cfg = tiny_cfg();
  auto data = tiny_samples(cfg, 6, 42);
  auto run = [&]() {
    UNet<float> net = UNet<float>::init(cfg, 3);
    AdamState<float> st;
    TrainConfig tc;
    tc.epochs = 2;
    tc.batch_size = 4;
    auto losses = train_unet(net, data, LossConfig{}, AdamConfig{}, st, tc);
    return std::pair{net, losses};
  };
  auto [net1, losses1] = run();
  auto [net2, losses2] = run();
  REQUIRE(losses1.size() == 2);
  CHECK(losses1 == losses2);
  for (size_t li = 0; li < net1.layers.size(); ++li) {
    for (size_t i = 0; i < net1.layers[li].w.size(); ++i)
      CHECK(net1.layers[li].w[i] == net2.layers[li].w[i]);
    for (size_t i = 0; i < net1.layers[li].b.size(); ++i)
      CHECK(net1.layers[li].b[i] == net2.layers[li].b[i]);
  }
}

TEST_CASE("training aborts on non-finite input with batch diagnostics") {
  const UNetConfig cfg = tiny_cfg();
  auto data = tiny_samples(cfg, 4, 43);
  data[2].input[5] = std::numeric_limits<float>::quiet_NaN();
  UNet<float> net = UNet<float>::init(cfg, 3);
  AdamState<float> st;
  TrainConfig tc;
  tc.epochs = 1;
  tc.batch_size = 2;
  try {
    train_unet(net, data, LossConfig{}, AdamConfig{}, st, tc);
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("batch") != std::string::npos);
  }
}

TEST_CASE("train config validation") {
  const UNetConfig cfg = tiny_cfg();
  auto data = tiny_samples(cfg, 2, 44);
  UNet<float> net = UNet<float>::init(cfg, 3);
  AdamState<float> st;
  TrainConfig tc;
  tc.batch_size = 0;
  CHECK_THROWS_AS(train_unet(net, data, LossConfig{}, AdamConfig{}, st, tc),
                  std::invalid_argument);
  TrainConfig tc2;
  tc2.epochs = -1;
  CHECK_THROWS_AS(train_unet(net, data, LossConfig{}, AdamConfig{}, st, tc2),
                  std::invalid_argument);
  TrainConfig ok;
  ok.epochs = 1;
  CHECK_THROWS_AS(train_unet(net, {}, LossConfig{}, AdamConfig{}, st, ok),
                  std::invalid_argument);
}
