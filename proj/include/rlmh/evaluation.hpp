#pragma once

#include <vector>

#include "rlmh/kernels.hpp"
#include "rlmh/targets.hpp"

namespace rlmh {

struct KernelConfig {
  double lengthscale = 1.0;  // > 0
};

/// Half the median of all m^2 pairwise distances (zero diagonal included,
/// as the formula prints); even-cardinality median = mean of the two middle
/// order statistics. Throws DegenerateLengthscale when the median is 0.
double median_heuristic(const Matrix& samples, bool exclude_diagonal = false);

/// k(x, y) = exp(-|x - y|^2 / l^2). No factor 2 in the denominator.
double gaussian_kernel(const Vector& x, const Vector& y, const KernelConfig& cfg);

/// Biased V-statistic MMD with diagonal terms, sqrt(max(0, MMD^2)).
double mmd(const Matrix& p_samples, const Matrix& q_samples, const KernelConfig& cfg);

struct RunSummary {
  double aar = 0.0;
  double mean_esjd = 0.0;
  double mmd = 0.0;
  int n_eval = 0;
  int nonfinite_count = 0;
};

/// Statistics over the final eval_window transitions; MMD against the
/// reference with the reference's median-heuristic lengthscale.
RunSummary summarize(const std::vector<Transition>& trace, int eval_window,
                     const ReferenceSet& reference,
                     const std::optional<KernelConfig>& cfg = std::nullopt);

}  // namespace rlmh
