#include "rlmh/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace rlmh {

double median_heuristic(const Matrix& samples, bool exclude_diagonal) {
  const auto m = samples.rows();
  if (m < 2) {
    throw Error(ErrorCode::TooFewSamples, "median heuristic needs at least 2 samples");
  }
  std::vector<double> dists;
  dists.reserve(static_cast<std::size_t>(m) * m);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (!exclude_diagonal) dists.push_back(0.0);
    for (Eigen::Index j = i + 1; j < m; ++j) {
      const double dist = (samples.row(i) - samples.row(j)).norm();
      // ordered pairs (i,j) and (j,i) both enter the multiset
      dists.push_back(dist);
      dists.push_back(dist);
    }
  }
  const std::size_t n = dists.size();
  double median;
  if (n % 2 == 1) {
    auto mid = dists.begin() + n / 2;
    std::nth_element(dists.begin(), mid, dists.end());
    median = *mid;
  } else {
    auto hi = dists.begin() + n / 2;
    std::nth_element(dists.begin(), hi, dists.end());
    const double upper = *hi;
    const double lower = *std::max_element(dists.begin(), hi);
    median = 0.5 * (lower + upper);
  }
  if (!(median > 0.0)) {
    throw Error(ErrorCode::DegenerateLengthscale,
                "median pairwise distance is zero (all points identical?)");
  }
  return 0.5 * median;
}

double gaussian_kernel(const Vector& x, const Vector& y, const KernelConfig& cfg) {
  if (!(cfg.lengthscale > 0.0)) {
    throw Error(ErrorCode::DegenerateLengthscale, "lengthscale must be > 0");
  }
  if (x.size() != y.size()) {
    throw Error(ErrorCode::DimensionMismatch, "gaussian_kernel: point lengths differ");
  }
  const double d2 = (x - y).squaredNorm();
  return std::exp(-d2 / (cfg.lengthscale * cfg.lengthscale));
}

namespace {

// Mean of k(a_i, b_j) over all ordered pairs, blocked GEMM evaluation.
double mean_cross_kernel(const Matrix& a, const Matrix& b, double inv_l2) {
  constexpr Eigen::Index kBlock = 512;
  const Vector a2 = a.rowwise().squaredNorm();
  const Vector b2 = b.rowwise().squaredNorm();
  double total = 0.0;
  for (Eigen::Index i0 = 0; i0 < a.rows(); i0 += kBlock) {
    const Eigen::Index ni = std::min(kBlock, a.rows() - i0);
    for (Eigen::Index j0 = 0; j0 < b.rows(); j0 += kBlock) {
      const Eigen::Index nj = std::min(kBlock, b.rows() - j0);
      Matrix d2 = -2.0 * a.middleRows(i0, ni) * b.middleRows(j0, nj).transpose();
      d2.colwise() += a2.segment(i0, ni);
      d2.rowwise() += b2.segment(j0, nj).transpose();
      total += (-(d2.cwiseMax(0.0)) * inv_l2).array().exp().sum();
    }
  }
  return total / (static_cast<double>(a.rows()) * static_cast<double>(b.rows()));
}

}  // namespace

double mmd(const Matrix& p_samples, const Matrix& q_samples, const KernelConfig& cfg) {
  if (!(cfg.lengthscale > 0.0)) {
    throw Error(ErrorCode::DegenerateLengthscale, "lengthscale must be > 0");
  }
  if (p_samples.rows() < 1 || q_samples.rows() < 1) {
    throw Error(ErrorCode::TooFewSamples, "mmd needs at least one sample per set");
  }
  if (p_samples.cols() != q_samples.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "mmd: sample dimensions differ");
  }
  const double inv_l2 = 1.0 / (cfg.lengthscale * cfg.lengthscale);
  const double pp = mean_cross_kernel(p_samples, p_samples, inv_l2);
  const double pq = mean_cross_kernel(p_samples, q_samples, inv_l2);
  const double qq = mean_cross_kernel(q_samples, q_samples, inv_l2);
  return std::sqrt(std::max(0.0, pp - 2.0 * pq + qq));
}

RunSummary summarize(const std::vector<Transition>& trace, int eval_window,
                     const ReferenceSet& reference,
                     const std::optional<KernelConfig>& cfg) {
  if (eval_window < 1 || static_cast<std::size_t>(eval_window) > trace.size()) {
    throw Error(ErrorCode::WindowTooLarge, "eval window exceeds trace length");
  }
  const std::size_t start = trace.size() - static_cast<std::size_t>(eval_window);
  RunSummary summary;
  summary.n_eval = eval_window;
  Matrix states(eval_window, reference.dim());
  for (int i = 0; i < eval_window; ++i) {
    const Transition& t = trace[start + i];
    if (t.accepted) ++summary.aar;
    if (t.nonfinite) ++summary.nonfinite_count;
    summary.mean_esjd += (t.x - t.x_next).squaredNorm();
    states.row(i) = t.x_next.transpose();
  }
  summary.aar /= eval_window;
  summary.mean_esjd /= eval_window;
  KernelConfig kc = cfg.value_or(KernelConfig{median_heuristic(reference.samples)});
  summary.mmd = mmd(states, reference.samples, kc);
  return summary;
}

}  // namespace rlmh
