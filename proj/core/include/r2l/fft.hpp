#pragma once

#include <complex>
#include <vector>

namespace r2l {

using cplx = std::complex<double>;

bool is_pow2(size_t n);

// In-place forward DFT, X[k] = sum_n x[n] exp(-2*pi*i*n*k/N).
// Radix-2 decimation in time; size must be a power of two.
void fft_inplace(std::vector<cplx>& x);

// Forward DFT of x zero-padded (or truncated) to n points.
std::vector<cplx> fft(const std::vector<cplx>& x, size_t n);

// Swap the two halves so the zero bin moves to index n/2. Even length only.
void fftshift_inplace(std::vector<cplx>& x);

// Periodic Hann window, w[k] = 0.5 * (1 - cos(2*pi*k/n)).
std::vector<double> hann_window(int n);

}  // namespace r2l
