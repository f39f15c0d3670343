#include "r2l/fft.hpp"

#include <cmath>
#include <stdexcept>

#include "r2l/geometry.hpp"

namespace r2l {

bool is_pow2(size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void fft_inplace(std::vector<cplx>& x) {
  const size_t n = x.size();
  if (!is_pow2(n)) throw std::invalid_argument("fft_inplace: size must be a power of two");
  if (n <= 1) return;

  // Bit-reversal permutation.
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(x[i], x[j]);
  }

  for (size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * kPi / static_cast<double>(len);
    const cplx wlen = std::polar(1.0, ang);
    for (size_t i = 0; i < n; i += len) {
      cplx w{1.0, 0.0};
      for (size_t k = 0; k < len / 2; ++k) {
        cplx u = x[i + k];
        cplx v = x[i + k + len / 2] * w;
        x[i + k] = u + v;
        x[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

std::vector<cplx> fft(const std::vector<cplx>& x, size_t n) {
  std::vector<cplx> y(n, cplx{0.0, 0.0});
  const size_t m = std::min(n, x.size());
  for (size_t i = 0; i < m; ++i) y[i] = x[i];
  fft_inplace(y);
  return y;
}

void fftshift_inplace(std::vector<cplx>& x) {
  const size_t n = x.size();
  if (n % 2 != 0) throw std::invalid_argument("fftshift_inplace: even length required");
  for (size_t i = 0; i < n / 2; ++i) std::swap(x[i], x[i + n / 2]);
}

std::vector<double> hann_window(int n) {
  std::vector<double> w(n);
  for (int k = 0; k < n; ++k) w[k] = 0.5 * (1.0 - std::cos(2.0 * kPi * k / n));
  return w;
}

}  // namespace r2l
