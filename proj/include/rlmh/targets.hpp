#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rlmh/numkit.hpp"

namespace rlmh {

/// Gold-standard draws from a target plus their empirical moments.
struct ReferenceSet {
  Matrix samples;  // m x d, one sample per row
  Vector mean;
  std::shared_ptr<SpdMatrix> covariance;  // unbiased empirical covariance

  static ReferenceSet from_samples(Matrix samples);
  int size() const { return static_cast<int>(samples.rows()); }
  int dim() const { return static_cast<int>(samples.cols()); }
};

/// Unnormalised log-density and gradient on R^d.
/// Additive constants are documented per builder; consumers use differences
/// and gradients only.
class TargetDistribution {
 public:
  using LogDensityFn = std::function<double(const Vector&)>;
  using GradFn = std::function<Vector(const Vector&)>;

  TargetDistribution(std::string name, int dim, LogDensityFn logp, GradFn grad);

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }

  double log_density(const Vector& x) const;
  Vector grad_log_density(const Vector& x) const;

  const std::optional<ReferenceSet>& reference() const { return reference_; }
  void set_reference(ReferenceSet ref);

 private:
  std::string name_;
  int dim_;
  LogDensityFn logp_;
  GradFn grad_;
  std::optional<ReferenceSet> reference_;
};

/// Central finite differences of log_density; oracle for gradient checks.
Vector fd_gradient(const TargetDistribution& t, const Vector& x, double h);

/// N(mean, cov), normalising constant kept.
TargetDistribution make_gaussian(const Vector& mean, const Matrix& cov);
TargetDistribution make_standard_gaussian(int dim);

/// Product of independent Laplace(0, b) marginals, constant kept;
/// gradient component at a coordinate zero is 0 (sign(0) = 0).
TargetDistribution make_laplace(int dim, double b);

/// Curved 2D ridge: log p = -x1^2/(2 sigma1^2) - (x2 - b(x1^2 - sigma1^2))^2/2.
TargetDistribution make_banana(double sigma1, double b);

/// Two-component Gaussian mixture with common isotropic variance.
TargetDistribution make_gaussian_mixture(const Vector& mean1, const Vector& mean2,
                                         double sd, double weight1);

enum class GlmFamily { GaussianLikelihood, Logistic };

/// Tabular data: first row column names, last column response, predictors
/// before it. No implicit intercept: one coefficient per predictor column
/// (add a ones column for an intercept). The gaussian-likelihood family
/// appends an unconstrained log-sigma coordinate.
struct GlmData {
  std::vector<std::string> column_names;
  Matrix predictors;  // n x k
  Vector response;    // n
};

GlmData load_csv_data(const std::string& path);
GlmData parse_csv_data(const std::string& text);

TargetDistribution make_glm_target(const GlmData& data, GlmFamily family,
                                   double prior_scale);
TargetDistribution load_glm_target(const std::string& csv_path, GlmFamily family,
                                   double prior_scale);

/// Deterministic reference generators (see harness for the chain recipe).
ReferenceSet sample_gaussian_reference(const Vector& mean, const Matrix& cov,
                                       int m, RngStream& rng);
ReferenceSet sample_laplace_reference(int dim, double b, int m, RngStream& rng);
/// Exact factorised banana sampler (x1 marginal Gaussian, x2 | x1 Gaussian).
ReferenceSet sample_banana_reference(double sigma1, double b, int m, RngStream& rng);
ReferenceSet sample_mixture_reference(const Vector& mean1, const Vector& mean2,
                                      double sd, double weight1, int m,
                                      RngStream& rng);

/// CSV persistence: one sample per row; sidecar JSON metadata
/// (target, seed, generator, m, d) at path + ".meta.json".
void save_reference(const ReferenceSet& ref, const std::string& path,
                    const std::string& target_name, std::uint64_t seed,
                    const std::string& generator);
ReferenceSet load_reference(const std::string& path);

}  // namespace rlmh
