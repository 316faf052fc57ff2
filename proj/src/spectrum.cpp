#include "hbc/spectrum.hpp"

#include <fftw3.h>

#include <algorithm>
#include <memory>

#include "hbc/errors.hpp"

namespace hbc {
namespace {

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};
template <typename T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

template <typename T>
FftwBuffer<T> allocate(std::size_t n) {
  return FftwBuffer<T>(static_cast<T*>(fftw_malloc(sizeof(T) * n)));
}

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const { fftw_destroy_plan(p); }
};
using Plan = std::unique_ptr<fftw_plan_s, PlanDeleter>;

}  // namespace

std::vector<std::complex<double>> rfft(std::span<const double> x, std::size_t n_fft) {
  if (x.empty()) throw DomainError("rfft of an empty series");
  const std::size_t n = n_fft == 0 ? x.size() : n_fft;
  if (n < x.size()) throw DomainError("rfft length shorter than the series");
  auto in = allocate<double>(n);
  auto out = allocate<fftw_complex>(n / 2 + 1);
  Plan plan(fftw_plan_dft_r2c_1d(static_cast<int>(n), in.get(), out.get(), FFTW_ESTIMATE));
  std::fill(in.get(), in.get() + n, 0.0);
  std::copy(x.begin(), x.end(), in.get());
  fftw_execute(plan.get());
  std::vector<std::complex<double>> bins(n / 2 + 1);
  for (std::size_t k = 0; k < bins.size(); ++k) bins[k] = {out[k][0], out[k][1]};
  return bins;
}

std::vector<double> irfft(std::span<const std::complex<double>> bins, std::size_t n) {
  if (bins.size() != n / 2 + 1) throw DomainError("irfft bin count does not match length");
  auto in = allocate<fftw_complex>(bins.size());
  auto out = allocate<double>(n);
  Plan plan(fftw_plan_dft_c2r_1d(static_cast<int>(n), in.get(), out.get(), FFTW_ESTIMATE));
  for (std::size_t k = 0; k < bins.size(); ++k) {
    in[k][0] = bins[k].real();
    in[k][1] = bins[k].imag();
  }
  fftw_execute(plan.get());
  std::vector<double> result(out.get(), out.get() + n);
  for (double& v : result) v /= static_cast<double>(n);
  return result;
}

std::vector<double> magnitude_spectrum(std::span<const double> x, std::size_t n_fft) {
  auto bins = rfft(x, n_fft);
  std::vector<double> mag(bins.size());
  std::transform(bins.begin(), bins.end(), mag.begin(), [](auto c) { return std::abs(c); });
  return mag;
}

}  // namespace hbc
