#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "r2l/errors.hpp"

namespace r2l {

// Dense row-major N-dimensional array. T is float for training and double
// for gradient-check mode.
template <class T>
struct Tensor {
  std::vector<int> shape;
  std::vector<T> v;

  Tensor() = default;
  explicit Tensor(std::vector<int> s) : shape(std::move(s)), v(numel(shape), T(0)) {}
  Tensor(std::vector<int> s, std::vector<T> vals) : shape(std::move(s)), v(std::move(vals)) {
    if (v.size() != numel(shape)) throw std::invalid_argument("Tensor: size/shape mismatch");
  }

  static size_t numel(const std::vector<int>& s) {
    size_t n = 1;
    for (int d : s) {
      if (d <= 0) throw std::invalid_argument("Tensor: non-positive dim");
      n *= static_cast<size_t>(d);
    }
    return n;
  }

  static Tensor scalar(T val) {
    Tensor t({1});
    t.v[0] = val;
    return t;
  }

  size_t size() const { return v.size(); }
  int dim(int i) const { return shape[i]; }
  int ndim() const { return static_cast<int>(shape.size()); }

  T& operator[](size_t i) { return v[i]; }
  const T& operator[](size_t i) const { return v[i]; }
  T* data() { return v.data(); }
  const T* data() const { return v.data(); }

  // 3D [C,H,W] accessors.
  T& at3(int c, int h, int w) {
    return v[(static_cast<size_t>(c) * shape[1] + h) * shape[2] + w];
  }
  const T& at3(int c, int h, int w) const {
    return v[(static_cast<size_t>(c) * shape[1] + h) * shape[2] + w];
  }
  // 4D [A,B,C,D] accessors.
  T& at4(int a, int b, int c, int d) {
    return v[((static_cast<size_t>(a) * shape[1] + b) * shape[2] + c) * shape[3] + d];
  }
  const T& at4(int a, int b, int c, int d) const {
    return v[((static_cast<size_t>(a) * shape[1] + b) * shape[2] + c) * shape[3] + d];
  }

  bool same_shape(const Tensor& o) const { return shape == o.shape; }

  void fill(T val) { std::fill(v.begin(), v.end(), val); }

  template <class U>
  Tensor<U> cast() const {
    Tensor<U> out;
    out.shape = shape;
    out.v.resize(v.size());
    for (size_t i = 0; i < v.size(); ++i) out.v[i] = static_cast<U>(v[i]);
    return out;
  }
};

template <class T>
std::string shape_str(const Tensor<T>& t) {
  std::string s = "[";
  for (size_t i = 0; i < t.shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(t.shape[i]);
  }
  return s + "]";
}

template <class T>
void check_finite(const Tensor<T>& t, const char* where) {
  for (const T& x : t.v)
    if (!std::isfinite(static_cast<double>(x)))
      throw NumericError(std::string("non-finite value in ") + where);
}

}  // namespace r2l
