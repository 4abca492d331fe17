#pragma once

#include <complex>
#include <memory>
#include <span>
#include <vector>

#include "nlfkpp/core_model.hpp"

namespace nlfkpp {

enum class ConvolutionMethod { FFT, Direct };

/// Applies J * v on a fixed grid.
///
/// The interior contribution is a discrete sum with the cell-integrated
/// kernel weights. Under a Dirichlet extension the exterior contributes
/// `ext^beta * tail_mass(i)`, where the tail masses are the kernel mass
/// beyond each end of the grid as seen from node i. Owns its FFT plans and
/// scratch buffers, so one instance must not be shared across threads.
class Convolver {
 public:
  Convolver(const Kernel& kernel, const Grid1D& grid, ConvolutionMethod method);
  ~Convolver();
  Convolver(Convolver&&) noexcept;
  Convolver& operator=(Convolver&&) noexcept;
  Convolver(const Convolver&) = delete;
  Convolver& operator=(const Convolver&) = delete;

  /// out = J * v, where v already holds u^beta and the exterior values are
  /// `left_ext`/`right_ext` (already raised to beta). Ignored when periodic.
  void apply(std::span<const double> v, double left_ext, double right_ext, std::span<double> out);

  const KernelWeights& weights() const { return weights_; }
  std::span<const double> left_tail() const { return left_tail_; }
  std::span<const double> right_tail() const { return right_tail_; }
  ConvolutionMethod method() const { return method_; }
  std::size_t fft_size() const { return fft_size_; }

 private:
  struct FftState;

  void apply_fft(std::span<const double> v, std::span<double> out);

  Grid1D grid_;
  ConvolutionMethod method_;
  KernelWeights weights_;
  std::vector<double> left_tail_;
  std::vector<double> right_tail_;
  std::size_t fft_size_ = 0;
  std::unique_ptr<FftState> fft_;
};

/// Pointwise J * u^beta on the field's grid, honoring its boundary policy.
/// Throws if a value is negative and beta is not an integer.
Field convolve(const Kernel& kernel, const Field& field, double beta,
               ConvolutionMethod method = ConvolutionMethod::FFT);

/// Smallest integer >= n whose prime factors are all in {2, 3, 5, 7}.
std::size_t fft_friendly_size(std::size_t n);

}  // namespace nlfkpp
