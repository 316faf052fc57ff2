#pragma once

#include <complex>
#include <span>
#include <vector>

namespace hbc {

// One-sided DFT (bins 0..n_fft/2) of a real series, zero-padded to n_fft
// when n_fft exceeds the series length. n_fft == 0 means the series length.
std::vector<std::complex<double>> rfft(std::span<const double> x, std::size_t n_fft = 0);

// Inverse of rfft for a length-n real series (normalized by 1/n).
std::vector<double> irfft(std::span<const std::complex<double>> bins, std::size_t n);

// |X_k| for k = 0..n/2.
std::vector<double> magnitude_spectrum(std::span<const double> x, std::size_t n_fft = 0);

}  // namespace hbc
