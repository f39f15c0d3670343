#pragma once

#include <functional>
#include <string>
#include <vector>

#include "r2l/graph.hpp"
#include "r2l/tensor.hpp"

namespace r2l {

// Builds a scalar-rooted graph over leaves created from the checker's input
// tensors (same order). Called repeatedly with perturbed inputs; must be a
// pure function of them.
using GradCheckBuild = std::function<Graph<double>::Value(
    Graph<double>&, const std::vector<Graph<double>::Value>&)>;

// One probed coordinate: flat element `flat` of input tensor `input`.
struct CoordRef {
  size_t input = 0;
  size_t flat = 0;
};

// Central-difference gradient check in f64: returns the max over the probed
// coordinates of |analytic - numeric| / max(|analytic|, |numeric|, 1e-12),
// with numeric = (f(x+h) - f(x-h)) / 2h. Empty coords = every coordinate of
// every input.
double grad_check(const GradCheckBuild& build,
                  const std::vector<Tensor<double>>& inputs, double h = 1e-5,
                  std::vector<CoordRef> coords = {});

struct GradCheckResult {
  std::string name;
  double max_rel_err = 0.0;
  double tolerance = 0.0;
  int n_coords = 0;

  bool pass() const { return max_rel_err < tolerance; }
};

struct GradCheckReport {
  std::vector<GradCheckResult> checks;
  bool all_pass() const;
};

// The full verification suite: every differentiable op in isolation
// (tolerance 1e-6; linear ops 1e-9), the loss compositions, and a composed
// small network probed at 20 random parameter coordinates (tolerance 1e-5).
// Inputs avoid the relu kink and exact pooling ties, where the derivative
// does not exist.
GradCheckReport run_gradcheck_suite(uint64_t seed = 7);

}  // namespace r2l
