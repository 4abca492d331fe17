#include "nlfkpp/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace nlfkpp {

namespace {

// |y| beyond which the base logistic / Gaussian densities drop below 1e-16.
constexpr double kLogisticCutoff = 36.841361487904734;
constexpr double kGaussianCutoff = 8.476133901101505;

double logistic_density(double y) {
  const double e = std::exp(-std::abs(y));
  return e / ((1.0 + e) * (1.0 + e));
}

double logistic_cdf(double y) {
  if (y >= 0.0) return 1.0 / (1.0 + std::exp(-y));
  const double e = std::exp(y);
  return e / (1.0 + e);
}

double gaussian_density(double y) {
  return std::exp(-0.5 * y * y) / std::sqrt(2.0 * std::numbers::pi);
}

double gaussian_cdf(double y) { return 0.5 * std::erfc(-y / std::numbers::sqrt2); }

}  // namespace

void ModelParams::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError("invalid model parameters: " + what); };
  if (!(alpha >= 1.0) || !std::isfinite(alpha)) fail("alpha must be >= 1");
  if (!(beta > 0.0) || !std::isfinite(beta)) fail("beta must be > 0");
  if (!(mu > 0.0) || !std::isfinite(mu)) fail("mu must be > 0");
  if (!(kappa > 0.0) || !std::isfinite(kappa)) fail("kappa must be > 0");
  if (!(diffusion >= 0.0) || !std::isfinite(diffusion)) fail("diffusion must be >= 0");
  const double c = std::pow(kappa, -1.0 / beta);
  if (!std::isfinite(c) || !(c > 0.0)) fail("kappa^(-1/beta) is not a finite positive number");
}

double steady_state(const ModelParams& params) { return std::pow(params.kappa, -1.0 / params.beta); }

std::string to_string(KernelShape shape) {
  switch (shape) {
    case KernelShape::Uniform: return "uniform";
    case KernelShape::Logistic: return "logistic";
    case KernelShape::Gaussian: return "gaussian";
    case KernelShape::Tabulated: return "tabulated";
    case KernelShape::Dirac: return "dirac";
  }
  return "unknown";
}

KernelShape kernel_shape_from_string(const std::string& name) {
  if (name == "uniform") return KernelShape::Uniform;
  if (name == "logistic") return KernelShape::Logistic;
  if (name == "gaussian") return KernelShape::Gaussian;
  if (name == "tabulated") return KernelShape::Tabulated;
  if (name == "dirac") return KernelShape::Dirac;
  throw ConfigError("unknown kernel shape '" + name + "'");
}

Kernel::Kernel(KernelShape shape, double sigma, double delta0, double eta)
    : shape_(shape), sigma_(sigma), base_delta0_(delta0), base_eta_(eta) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ConfigError("kernel sigma must be > 0");
  if (!(delta0 > 0.0) || !(eta > 0.0)) throw ConfigError("kernel delta0 and eta must be > 0");
}

Kernel Kernel::uniform(double sigma) { return Kernel(KernelShape::Uniform, sigma, 0.5, 0.49); }

Kernel Kernel::logistic(double sigma) {
  return Kernel(KernelShape::Logistic, sigma, 1.0, logistic_density(1.0) - 1e-6);
}

Kernel Kernel::gaussian(double sigma) {
  return Kernel(KernelShape::Gaussian, sigma, 1.0, gaussian_density(1.0) - 1e-6);
}

Kernel Kernel::dirac() {
  // Formally J > eta holds for any eta on a vanishing neighbourhood; the
  // metadata is only used by the bounds calculator, which rejects nothing here.
  return Kernel(KernelShape::Dirac, 1.0, 1.0, 1.0);
}

Kernel Kernel::tabulated(std::vector<std::pair<double, double>> samples, double delta0,
                         double eta, double sigma) {
  if (samples.size() < 2) throw ConfigError("tabulated kernel needs at least two samples");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto [x, y] = samples[i];
    if (!std::isfinite(x) || !std::isfinite(y) || y < 0.0)
      throw ConfigError("tabulated kernel samples must be finite with y >= 0");
    if (i > 0 && !(x > samples[i - 1].first))
      throw ConfigError("tabulated kernel sample abscissae must be strictly increasing");
  }
  double mass = 0.0;
  for (std::size_t i = 1; i < samples.size(); ++i)
    mass += 0.5 * (samples[i].second + samples[i - 1].second) * (samples[i].first - samples[i - 1].first);
  if (!(mass > 0.0)) throw ConfigError("tabulated kernel has zero mass");
  for (auto& s : samples) s.second /= mass;

  Kernel k(KernelShape::Tabulated, sigma, delta0, eta);
  k.sample_cdf_.assign(samples.size(), 0.0);
  for (std::size_t i = 1; i < samples.size(); ++i)
    k.sample_cdf_[i] = k.sample_cdf_[i - 1] +
                       0.5 * (samples[i].second + samples[i - 1].second) * (samples[i].first - samples[i - 1].first);
  k.samples_ = std::move(samples);
  return k;
}

Kernel Kernel::with_sigma(double sigma) const {
  Kernel k = *this;
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ConfigError("kernel sigma must be > 0");
  k.sigma_ = sigma;
  return k;
}

double Kernel::base_evaluate(double y) const {
  switch (shape_) {
    case KernelShape::Uniform: return std::abs(y) <= 1.0 ? 0.5 : 0.0;
    case KernelShape::Logistic: return logistic_density(y);
    case KernelShape::Gaussian: return gaussian_density(y);
    case KernelShape::Tabulated: {
      if (y < samples_.front().first || y > samples_.back().first) return 0.0;
      auto it = std::upper_bound(samples_.begin(), samples_.end(), y,
                                 [](double v, const auto& s) { return v < s.first; });
      if (it == samples_.end()) return samples_.back().second;
      const auto& [x1, y1] = *it;
      const auto& [x0, y0] = *(it - 1);
      return y0 + (y1 - y0) * (y - x0) / (x1 - x0);
    }
    case KernelShape::Dirac:
      throw Error("the Dirac kernel has no pointwise values");
  }
  return 0.0;
}

double Kernel::base_cdf(double y) const {
  switch (shape_) {
    case KernelShape::Uniform: return std::clamp(0.5 * (y + 1.0), 0.0, 1.0);
    case KernelShape::Logistic: return logistic_cdf(y);
    case KernelShape::Gaussian: return gaussian_cdf(y);
    case KernelShape::Tabulated: {
      if (y <= samples_.front().first) return 0.0;
      if (y >= samples_.back().first) return 1.0;
      auto it = std::upper_bound(samples_.begin(), samples_.end(), y,
                                 [](double v, const auto& s) { return v < s.first; });
      const std::size_t i = static_cast<std::size_t>(it - samples_.begin()) - 1;
      const double x0 = samples_[i].first;
      const double y0 = samples_[i].second;
      const double yy = base_evaluate(y);
      return sample_cdf_[i] + 0.5 * (y0 + yy) * (y - x0);
    }
    case KernelShape::Dirac: return y >= 0.0 ? 1.0 : 0.0;
  }
  return 0.0;
}

double Kernel::base_survival(double y) const {
  switch (shape_) {
    case KernelShape::Uniform:
    case KernelShape::Logistic:
    case KernelShape::Gaussian:
      return base_cdf(-y);
    case KernelShape::Tabulated:
    case KernelShape::Dirac:
      return 1.0 - base_cdf(y);
  }
  return 0.0;
}

double Kernel::evaluate(double x) const { return base_evaluate(x / sigma_) / sigma_; }

double Kernel::cdf(double x) const { return base_cdf(x / sigma_); }

double Kernel::mass_between(double a, double b) const {
  if (b < a) return -mass_between(b, a);
  const double ya = a / sigma_;
  const double yb = b / sigma_;
  if (ya >= 0.0) return base_survival(ya) - base_survival(yb);
  if (yb <= 0.0) return base_cdf(yb) - base_cdf(ya);
  return 1.0 - base_cdf(ya) - base_survival(yb);
}

std::pair<double, double> Kernel::support() const {
  switch (shape_) {
    case KernelShape::Uniform: return {-sigma_, sigma_};
    case KernelShape::Logistic: return {-kLogisticCutoff * sigma_, kLogisticCutoff * sigma_};
    case KernelShape::Gaussian: return {-kGaussianCutoff * sigma_, kGaussianCutoff * sigma_};
    case KernelShape::Tabulated:
      return {samples_.front().first * sigma_, samples_.back().first * sigma_};
    case KernelShape::Dirac: return {0.0, 0.0};
  }
  return {0.0, 0.0};
}

KernelWeights discrete_weights(const Kernel& kernel, double spacing) {
  if (!(spacing > 0.0)) throw ConfigError("grid spacing must be > 0");
  KernelWeights out;
  if (kernel.shape() == KernelShape::Dirac) {
    out.w = {1.0};
    out.offset = 0;
    return out;
  }
  const auto [lo, hi] = kernel.support();
  int k_lo = static_cast<int>(std::floor(lo / spacing - 0.5));
  int k_hi = static_cast<int>(std::ceil(hi / spacing + 0.5));
  std::vector<double> w;
  w.reserve(static_cast<std::size_t>(k_hi - k_lo + 1));
  for (int k = k_lo; k <= k_hi; ++k)
    w.push_back(std::max(0.0, kernel.mass_between((k - 0.5) * spacing, (k + 0.5) * spacing)));

  // Cells beyond the truncation radius carry no mass by construction.
  std::size_t first = 0;
  while (first + 1 < w.size() && w[first] <= 0.0) ++first;
  std::size_t last = w.size() - 1;
  while (last > first && w[last] <= 0.0) --last;

  out.offset = k_lo + static_cast<int>(first);
  out.w.assign(w.begin() + static_cast<std::ptrdiff_t>(first), w.begin() + static_cast<std::ptrdiff_t>(last) + 1);
  double total = 0.0;
  for (double v : out.w) total += v;
  if (!(total > 0.0)) throw Error("kernel has no mass on the grid");
  for (double& v : out.w) v /= total;
  return out;
}

Grid1D::Grid1D(double x_left, double x_right, int n_cells, BoundaryPolicy boundary)
    : x_left_(x_left), x_right_(x_right), n_cells_(n_cells), boundary_(boundary) {
  if (!std::isfinite(x_left) || !std::isfinite(x_right) || !(x_left < x_right))
    throw ConfigError("grid requires finite x_left < x_right");
  if (n_cells < 2) throw ConfigError("grid requires at least two cells");
  if (const auto* ext = std::get_if<DirichletExtension>(&boundary_)) {
    if (!std::isfinite(ext->left_value) || !std::isfinite(ext->right_value))
      throw ConfigError("extension values must be finite");
  }
}

std::size_t Grid1D::node_count() const {
  return periodic() ? static_cast<std::size_t>(n_cells_) : static_cast<std::size_t>(n_cells_) + 1;
}

std::vector<double> Grid1D::nodes() const {
  std::vector<double> xs(node_count());
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = x(i);
  return xs;
}

const DirichletExtension& Grid1D::extension() const {
  if (const auto* ext = std::get_if<DirichletExtension>(&boundary_)) return *ext;
  throw Error("grid has no Dirichlet extension");
}

Field::Field(Grid1D grid, std::vector<double> values, double time)
    : grid_(std::move(grid)), values_(std::move(values)), time_(time) {
  if (values_.size() != grid_.node_count()) {
    std::ostringstream os;
    os << "field has " << values_.size() << " values but the grid has " << grid_.node_count() << " nodes";
    throw Error(os.str());
  }
  if (!(time_ >= 0.0)) throw Error("field time must be >= 0");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      std::ostringstream os;
      os << "non-finite field value at node " << i << " (x = " << grid_.x(i) << ")";
      throw Error(os.str());
    }
  }
}

double Field::sup_abs() const {
  double s = 0.0;
  for (double v : values_) s = std::max(s, std::abs(v));
  return s;
}

double Field::inf() const { return *std::min_element(values_.begin(), values_.end()); }

RescaledProblem rescale_to_mu(const Kernel& kernel, const ModelParams& params) {
  params.validate();
  if (params.diffusion == 0.0)
    throw ConfigError("rescaling requires a nonzero diffusion coefficient");
  const double sigma = kernel.sigma();
  ModelParams p = params;
  p.mu = params.mu * sigma * sigma;
  return {kernel.with_sigma(1.0), p, RescaleMap{sigma, sigma * sigma}};
}

RescaledProblem rescale_to_sigma(const Kernel& kernel, const ModelParams& params) {
  params.validate();
  if (params.diffusion == 0.0)
    throw ConfigError("rescaling requires a nonzero diffusion coefficient");
  const double root = std::sqrt(params.mu);
  ModelParams p = params;
  p.mu = 1.0;
  return {kernel.with_sigma(kernel.sigma() * root), p, RescaleMap{1.0 / root, 1.0 / params.mu}};
}

double front_initial_value(double x, double x_left, double x_right) {
  if (x <= x_left) return 1.0;
  if (x <= 0.0) return std::exp(-(x - x_left) * (x - x_left));
  if (x <= x_right) return std::exp(-x_left * x_left) * (1.0 - x / x_right);
  return 0.0;
}

Field front_initial_condition(const Grid1D& grid) {
  if (!(grid.x_left() < 0.0 && grid.x_right() > 0.0))
    throw ConfigError("front initial condition needs x_left < 0 < x_right");
  std::vector<double> v(grid.node_count());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = front_initial_value(grid.x(i), grid.x_left(), grid.x_right());
  return Field(grid, std::move(v), 0.0);
}

}  // namespace nlfkpp
