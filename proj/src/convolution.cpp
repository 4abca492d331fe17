#include "nlfkpp/convolution.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>

#include "fftw_lock.hpp"
#include "nlfkpp/kernels.hpp"

namespace nlfkpp {

std::mutex& detail::fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

namespace {

bool is_integer(double p) { return std::floor(p) == p; }

}  // namespace

std::size_t fft_friendly_size(std::size_t n) {
  if (n <= 1) return 1;
  for (std::size_t m = n;; ++m) {
    std::size_t r = m;
    for (std::size_t p : {2u, 3u, 5u, 7u})
      while (r % p == 0) r /= p;
    if (r == 1) return m;
  }
}

struct Convolver::FftState {
  std::size_t size = 0;
  double* real = nullptr;
  fftw_complex* spectrum = nullptr;
  std::vector<std::complex<double>> kernel_hat;  // already divided by size
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  explicit FftState(std::size_t n) : size(n) {
    real = fftw_alloc_real(n);
    spectrum = fftw_alloc_complex(n / 2 + 1);
    std::lock_guard lock(detail::fftw_planner_mutex());
    forward = fftw_plan_dft_r2c_1d(static_cast<int>(n), real, spectrum, FFTW_ESTIMATE);
    backward = fftw_plan_dft_c2r_1d(static_cast<int>(n), spectrum, real, FFTW_ESTIMATE);
  }

  ~FftState() {
    {
      std::lock_guard lock(detail::fftw_planner_mutex());
      if (forward) fftw_destroy_plan(forward);
      if (backward) fftw_destroy_plan(backward);
    }
    fftw_free(real);
    fftw_free(spectrum);
  }

  FftState(const FftState&) = delete;
  FftState& operator=(const FftState&) = delete;
};

Convolver::Convolver(const Kernel& kernel, const Grid1D& grid, ConvolutionMethod method)
    : grid_(grid), method_(method), weights_(discrete_weights(kernel, grid.spacing())) {
  const std::size_t n = grid.node_count();
  const auto k_lo = static_cast<std::ptrdiff_t>(weights_.k_lo());
  const auto k_hi = static_cast<std::ptrdiff_t>(weights_.k_hi());
  const auto nn = static_cast<std::ptrdiff_t>(n);

  if (!grid.periodic()) {
    // Suffix/prefix sums accumulate from the small far-tail weights inwards.
    std::vector<double> suffix(weights_.w.size() + 1, 0.0);
    for (std::size_t j = weights_.w.size(); j-- > 0;) suffix[j] = suffix[j + 1] + weights_.w[j];
    std::vector<double> prefix(weights_.w.size() + 1, 0.0);
    for (std::size_t j = 0; j < weights_.w.size(); ++j) prefix[j + 1] = prefix[j] + weights_.w[j];

    left_tail_.assign(n, 0.0);
    right_tail_.assign(n, 0.0);
    for (std::ptrdiff_t i = 0; i < nn; ++i) {
      // exterior on the left: source index j < 0, i.e. k = i - j > i
      const std::ptrdiff_t k_first = std::max(i + 1, k_lo);
      if (k_first <= k_hi) left_tail_[static_cast<std::size_t>(i)] = suffix[static_cast<std::size_t>(k_first - k_lo)];
      // exterior on the right: j > n - 1, i.e. k < i - n + 1
      const std::ptrdiff_t k_last = std::min(i - nn, k_hi);
      if (k_last >= k_lo) right_tail_[static_cast<std::size_t>(i)] = prefix[static_cast<std::size_t>(k_last - k_lo + 1)];
    }
  }

  if (method_ == ConvolutionMethod::FFT) {
    std::vector<double> placed;
    if (grid.periodic()) {
      fft_size_ = n;
      placed = kernels::fold_periodic(weights_, n);
    } else {
      fft_size_ = fft_friendly_size(n + weights_.w.size() - 1);
      placed.assign(fft_size_, 0.0);
      std::copy(weights_.w.begin(), weights_.w.end(), placed.begin());
    }
    fft_ = std::make_unique<FftState>(fft_size_);
    std::copy(placed.begin(), placed.end(), fft_->real);
    fftw_execute(fft_->forward);
    const std::size_t m = fft_size_ / 2 + 1;
    fft_->kernel_hat.resize(m);
    const double scale = 1.0 / static_cast<double>(fft_size_);
    for (std::size_t j = 0; j < m; ++j)
      fft_->kernel_hat[j] = std::complex<double>(fft_->spectrum[j][0], fft_->spectrum[j][1]) * scale;
  }
}

Convolver::~Convolver() = default;
Convolver::Convolver(Convolver&&) noexcept = default;
Convolver& Convolver::operator=(Convolver&&) noexcept = default;

void Convolver::apply_fft(std::span<const double> v, std::span<double> out) {
  FftState& s = *fft_;
  const std::size_t n = v.size();
  std::copy(v.begin(), v.end(), s.real);
  std::fill(s.real + n, s.real + s.size, 0.0);
  fftw_execute(s.forward);
  const std::size_t m = s.size / 2 + 1;
  for (std::size_t j = 0; j < m; ++j) {
    const std::complex<double> z = std::complex<double>(s.spectrum[j][0], s.spectrum[j][1]) * s.kernel_hat[j];
    s.spectrum[j][0] = z.real();
    s.spectrum[j][1] = z.imag();
  }
  fftw_execute(s.backward);
  if (grid_.periodic()) {
    std::copy(s.real, s.real + n, out.begin());
  } else {
    // full linear convolution index m = i - k_lo
    const std::ptrdiff_t shift = -static_cast<std::ptrdiff_t>(weights_.k_lo());
    for (std::size_t i = 0; i < n; ++i) out[i] = s.real[static_cast<std::ptrdiff_t>(i) + shift];
  }
}

void Convolver::apply(std::span<const double> v, double left_ext, double right_ext, std::span<double> out) {
  if (v.size() != grid_.node_count() || out.size() != v.size())
    throw Error("convolver applied to an array of the wrong length");
  if (method_ == ConvolutionMethod::FFT) {
    apply_fft(v, out);
  } else if (grid_.periodic()) {
    kernels::convolve_periodic(weights_, v, out);
  } else {
    kernels::convolve_linear(weights_, v, out);
  }
  if (!grid_.periodic() && (left_ext != 0.0 || right_ext != 0.0)) {
    const auto n = static_cast<std::ptrdiff_t>(v.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] += left_ext * left_tail_[i] + right_ext * right_tail_[i];
  }
}

Field convolve(const Kernel& kernel, const Field& field, double beta, ConvolutionMethod method) {
  if (!(beta > 0.0)) throw ConfigError("convolution exponent must be > 0");
  const Grid1D& grid = field.grid();
  const bool integral = is_integer(beta);
  auto power = [&](double u, const char* where, std::size_t node) {
    if (u < 0.0 && !integral) {
      std::ostringstream os;
      os << "negative value " << u << " at " << where << ' ' << node << " cannot be raised to non-integer power "
         << beta;
      throw Error(os.str());
    }
    return std::pow(u, beta);
  };
  std::vector<double> v(field.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = power(field[i], "node", i);
  double left = 0.0;
  double right = 0.0;
  if (!grid.periodic()) {
    left = power(grid.extension().left_value, "left extension", 0);
    right = power(grid.extension().right_value, "right extension", 0);
  }
  Convolver conv(kernel, grid, method);
  std::vector<double> out(v.size());
  conv.apply(v, left, right, out);
  return Field(grid, std::move(out), field.time());
}

}  // namespace nlfkpp
