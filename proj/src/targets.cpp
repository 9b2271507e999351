#include "rlmh/targets.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace rlmh {

namespace {

void check_point(const TargetDistribution& t, const Vector& x) {
  if (x.size() != t.dim()) {
    std::ostringstream os;
    os << "target '" << t.name() << "' has dim " << t.dim() << ", point has length "
       << x.size();
    throw Error(ErrorCode::DimensionMismatch, os.str());
  }
  if (!x.allFinite()) {
    throw Error(ErrorCode::NonFinite, "point has non-finite entries");
  }
}

double log_sigmoid(double t) {
  // log(1/(1+e^{-t})) without overflow on either tail.
  if (t >= 0.0) return -std::log1p(std::exp(-t));
  return t - std::log1p(std::exp(t));
}

}  // namespace

ReferenceSet ReferenceSet::from_samples(Matrix samples) {
  const auto m = samples.rows();
  if (m < 2) {
    throw Error(ErrorCode::TooFewSamples, "reference needs at least 2 samples");
  }
  if (!samples.allFinite()) {
    throw Error(ErrorCode::NonFinite, "reference samples contain non-finite values");
  }
  ReferenceSet ref;
  ref.mean = samples.colwise().mean();
  Matrix centered = samples.rowwise() - ref.mean.transpose();
  Matrix cov = (centered.transpose() * centered) / static_cast<double>(m - 1);
  cov = 0.5 * (cov + cov.transpose());
  try {
    ref.covariance = std::make_shared<SpdMatrix>(std::move(cov));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NotSpd) {
      throw Error(ErrorCode::DegenerateCovariance,
                  "empirical covariance of reference is not positive definite");
    }
    throw;
  }
  ref.samples = std::move(samples);
  return ref;
}

TargetDistribution::TargetDistribution(std::string name, int dim, LogDensityFn logp,
                                       GradFn grad)
    : name_(std::move(name)), dim_(dim), logp_(std::move(logp)), grad_(std::move(grad)) {
  if (dim_ < 1) {
    throw Error(ErrorCode::InvalidParameter, "target dimension must be >= 1");
  }
}

double TargetDistribution::log_density(const Vector& x) const {
  check_point(*this, x);
  return logp_(x);
}

Vector TargetDistribution::grad_log_density(const Vector& x) const {
  check_point(*this, x);
  return grad_(x);
}

void TargetDistribution::set_reference(ReferenceSet ref) {
  if (ref.dim() != dim_) {
    throw Error(ErrorCode::DimensionMismatch, "reference dimension differs from target");
  }
  reference_ = std::move(ref);
}

Vector fd_gradient(const TargetDistribution& t, const Vector& x, double h) {
  if (!(h > 0.0)) {
    throw Error(ErrorCode::InvalidParameter, "fd_gradient: h must be > 0");
  }
  Vector g(t.dim());
  Vector xp = x, xm = x;
  for (int i = 0; i < t.dim(); ++i) {
    xp[i] = x[i] + h;
    xm[i] = x[i] - h;
    g[i] = (t.log_density(xp) - t.log_density(xm)) / (2.0 * h);
    xp[i] = x[i];
    xm[i] = x[i];
  }
  return g;
}

TargetDistribution make_gaussian(const Vector& mean, const Matrix& cov) {
  auto spd = std::make_shared<SpdMatrix>(cov);
  const int d = static_cast<int>(mean.size());
  if (spd->dim() != d) {
    throw Error(ErrorCode::DimensionMismatch, "gaussian: mean/cov dimensions differ");
  }
  auto logp = [mean, spd, d](const Vector& x) {
    return mvn_logpdf(x, mean, spd->chol());
  };
  auto grad = [mean, spd](const Vector& x) -> Vector {
    return -spd_solve(spd->chol(), x - mean);
  };
  return TargetDistribution("gaussian", d, logp, grad);
}

TargetDistribution make_standard_gaussian(int dim) {
  return make_gaussian(Vector::Zero(dim), Matrix::Identity(dim, dim));
}

TargetDistribution make_laplace(int dim, double b) {
  if (!(b > 0.0)) {
    throw Error(ErrorCode::InvalidParameter, "laplace: scale must be > 0");
  }
  const double log_norm = dim * std::log(2.0 * b);
  auto logp = [b, log_norm](const Vector& x) {
    return -x.cwiseAbs().sum() / b - log_norm;
  };
  auto grad = [b](const Vector& x) -> Vector {
    Vector g(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      g[i] = x[i] > 0.0 ? -1.0 / b : (x[i] < 0.0 ? 1.0 / b : 0.0);
    }
    return g;
  };
  return TargetDistribution("laplace", dim, logp, grad);
}

TargetDistribution make_banana(double sigma1, double b) {
  if (!(sigma1 > 0.0)) {
    throw Error(ErrorCode::InvalidParameter, "banana: sigma1 must be > 0");
  }
  const double s2 = sigma1 * sigma1;
  auto logp = [s2, b](const Vector& x) {
    const double resid = x[1] - b * (x[0] * x[0] - s2);
    return -x[0] * x[0] / (2.0 * s2) - 0.5 * resid * resid;
  };
  auto grad = [s2, b](const Vector& x) -> Vector {
    const double resid = x[1] - b * (x[0] * x[0] - s2);
    Vector g(2);
    g[0] = -x[0] / s2 + 2.0 * b * x[0] * resid;
    g[1] = -resid;
    return g;
  };
  return TargetDistribution("banana", 2, logp, grad);
}

TargetDistribution make_gaussian_mixture(const Vector& mean1, const Vector& mean2,
                                         double sd, double weight1) {
  if (mean1.size() != mean2.size()) {
    throw Error(ErrorCode::DimensionMismatch, "mixture: component means differ in length");
  }
  if (!(sd > 0.0)) {
    throw Error(ErrorCode::InvalidParameter, "mixture: sd must be > 0");
  }
  if (!(weight1 > 0.0 && weight1 < 1.0)) {
    throw Error(ErrorCode::InvalidParameter, "mixture: weight must be in (0,1)");
  }
  const int d = static_cast<int>(mean1.size());
  const double var = sd * sd;
  const double log_norm = -0.5 * d * std::log(2.0 * M_PI * var);
  const double lw1 = std::log(weight1);
  const double lw2 = std::log(1.0 - weight1);
  auto comp = [=](const Vector& x, const Vector& mu) {
    return log_norm - (x - mu).squaredNorm() / (2.0 * var);
  };
  auto logp = [=](const Vector& x) {
    const double a = lw1 + comp(x, mean1);
    const double b2 = lw2 + comp(x, mean2);
    const double m = std::max(a, b2);
    return m + std::log(std::exp(a - m) + std::exp(b2 - m));
  };
  auto grad = [=](const Vector& x) -> Vector {
    const double a = lw1 + comp(x, mean1);
    const double b2 = lw2 + comp(x, mean2);
    const double m = std::max(a, b2);
    const double p1 = std::exp(a - m);
    const double p2 = std::exp(b2 - m);
    Vector g1 = -(x - mean1) / var;
    Vector g2 = -(x - mean2) / var;
    return (p1 * g1 + p2 * g2) / (p1 + p2);
  };
  return TargetDistribution("mixture", d, logp, grad);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    cells.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

double parse_cell(const std::string& raw, int row, int col) {
  std::string s = raw;
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.erase(s.begin());
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.pop_back();
  if (s.empty()) {
    std::ostringstream os;
    os << "missing value at row " << row << ", column " << col;
    throw Error(ErrorCode::MalformedData, os.str());
  }
  double value = 0.0;
  const char* begin = s.data();
  const char* end = begin + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    std::ostringstream os;
    os << "non-numeric cell '" << s << "' at row " << row << ", column " << col;
    throw Error(ErrorCode::MalformedData, os.str());
  }
  return value;
}

}  // namespace

GlmData parse_csv_data(const std::string& text) {
  std::stringstream ss(text);
  std::string line;
  std::vector<std::vector<double>> rows;
  GlmData data;
  bool have_header = false;
  while (std::getline(ss, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    if (!have_header) {
      for (auto& c : cells) {
        while (!c.empty() && (c.back() == ' ' || c.back() == '\r')) c.pop_back();
        data.column_names.push_back(c);
      }
      have_header = true;
      continue;
    }
    if (cells.size() != data.column_names.size()) {
      std::ostringstream os;
      os << "row " << rows.size() + 1 << " has " << cells.size() << " cells, expected "
         << data.column_names.size();
      throw Error(ErrorCode::MalformedData, os.str());
    }
    std::vector<double> row(cells.size());
    for (std::size_t j = 0; j < cells.size(); ++j) {
      row[j] = parse_cell(cells[j], static_cast<int>(rows.size()) + 1,
                          static_cast<int>(j) + 1);
    }
    rows.push_back(std::move(row));
  }
  if (!have_header || data.column_names.size() < 2) {
    throw Error(ErrorCode::MalformedData,
                "need a header row with at least one predictor and one response column");
  }
  if (rows.empty()) {
    throw Error(ErrorCode::EmptyData, "no data rows");
  }
  const int n = static_cast<int>(rows.size());
  const int k = static_cast<int>(data.column_names.size()) - 1;
  data.predictors.resize(n, k);
  data.response.resize(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < k; ++j) data.predictors(i, j) = rows[i][j];
    data.response[i] = rows[i][k];
  }
  return data;
}

GlmData load_csv_data(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::MissingFile, "cannot open data file: " + path);
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_csv_data(buffer.str());
}

TargetDistribution make_glm_target(const GlmData& data, GlmFamily family,
                                   double prior_scale) {
  if (!(prior_scale > 0.0)) {
    throw Error(ErrorCode::InvalidParameter, "prior_scale must be > 0");
  }
  const Matrix X = data.predictors;
  const Vector y = data.response;
  const int k = static_cast<int>(X.cols());
  const double pv = prior_scale * prior_scale;
  const double prior_log_norm = -0.5 * std::log(2.0 * M_PI * pv);

  if (family == GlmFamily::Logistic) {
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      if (y[i] != 0.0 && y[i] != 1.0) {
        throw Error(ErrorCode::MalformedData,
                    "logistic response must be 0 or 1");
      }
    }
    auto logp = [X, y, pv, prior_log_norm, k](const Vector& beta) {
      Vector eta = X * beta;
      double ll = 0.0;
      for (Eigen::Index i = 0; i < y.size(); ++i) {
        // y log s(eta) + (1-y) log(1-s(eta)) = y*eta + log(1-s(eta))
        ll += y[i] * eta[i] + log_sigmoid(-eta[i]);
      }
      double prior = k * prior_log_norm - beta.squaredNorm() / (2.0 * pv);
      return ll + prior;
    };
    auto grad = [X, y, pv](const Vector& beta) -> Vector {
      Vector eta = X * beta;
      Vector mu(eta.size());
      for (Eigen::Index i = 0; i < eta.size(); ++i) {
        mu[i] = 1.0 / (1.0 + std::exp(-eta[i]));
      }
      return X.transpose() * (y - mu) - beta / pv;
    };
    return TargetDistribution("glm_logistic", k, logp, grad);
  }

  // Gaussian likelihood with unconstrained log-sigma appended to beta.
  const int d = k + 1;
  auto logp = [X, y, pv, prior_log_norm, k](const Vector& params) {
    Vector beta = params.head(k);
    const double log_sigma = params[k];
    const double inv_var = std::exp(-2.0 * log_sigma);
    Vector resid = y - X * beta;
    const double n = static_cast<double>(y.size());
    double ll = -0.5 * n * std::log(2.0 * M_PI) - n * log_sigma -
                0.5 * inv_var * resid.squaredNorm();
    double prior = (k + 1) * prior_log_norm -
                   (beta.squaredNorm() + log_sigma * log_sigma) / (2.0 * pv);
    return ll + prior;
  };
  auto grad = [X, y, pv, k](const Vector& params) -> Vector {
    Vector beta = params.head(k);
    const double log_sigma = params[k];
    const double inv_var = std::exp(-2.0 * log_sigma);
    Vector resid = y - X * beta;
    Vector g(k + 1);
    g.head(k) = inv_var * (X.transpose() * resid) - beta / pv;
    g[k] = -static_cast<double>(y.size()) + inv_var * resid.squaredNorm() -
           log_sigma / pv;
    return g;
  };
  return TargetDistribution("glm_gaussian", d, logp, grad);
}

TargetDistribution load_glm_target(const std::string& csv_path, GlmFamily family,
                                   double prior_scale) {
  return make_glm_target(load_csv_data(csv_path), family, prior_scale);
}

ReferenceSet sample_gaussian_reference(const Vector& mean, const Matrix& cov, int m,
                                       RngStream& rng) {
  SpdMatrix spd(cov);
  Matrix samples(m, mean.size());
  for (int i = 0; i < m; ++i) {
    samples.row(i) = mvn_sample(mean, spd.chol(), rng).transpose();
  }
  return ReferenceSet::from_samples(std::move(samples));
}

namespace {

// Laplace(0, b) as a difference of two exponentials.
double laplace_draw(double b, RngStream& rng) {
  const double u1 = 1.0 - rng.next_uniform();
  const double u2 = 1.0 - rng.next_uniform();
  return b * (std::log(u1) - std::log(u2));
}

}  // namespace

ReferenceSet sample_laplace_reference(int dim, double b, int m, RngStream& rng) {
  Matrix samples(m, dim);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < dim; ++j) samples(i, j) = laplace_draw(b, rng);
  }
  return ReferenceSet::from_samples(std::move(samples));
}

ReferenceSet sample_banana_reference(double sigma1, double b, int m, RngStream& rng) {
  Matrix samples(m, 2);
  for (int i = 0; i < m; ++i) {
    const double x1 = sigma1 * rng.next_normal();
    const double x2 = b * (x1 * x1 - sigma1 * sigma1) + rng.next_normal();
    samples(i, 0) = x1;
    samples(i, 1) = x2;
  }
  return ReferenceSet::from_samples(std::move(samples));
}

ReferenceSet sample_mixture_reference(const Vector& mean1, const Vector& mean2,
                                      double sd, double weight1, int m,
                                      RngStream& rng) {
  const int d = static_cast<int>(mean1.size());
  Matrix samples(m, d);
  for (int i = 0; i < m; ++i) {
    const Vector& mu = rng.next_uniform() < weight1 ? mean1 : mean2;
    for (int j = 0; j < d; ++j) samples(i, j) = mu[j] + sd * rng.next_normal();
  }
  return ReferenceSet::from_samples(std::move(samples));
}

void save_reference(const ReferenceSet& ref, const std::string& path,
                    const std::string& target_name, std::uint64_t seed,
                    const std::string& generator) {
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorCode::WriteError, "cannot write reference file: " + path);
  }
  out.precision(17);
  for (int i = 0; i < ref.size(); ++i) {
    for (int j = 0; j < ref.dim(); ++j) {
      if (j) out << ',';
      out << ref.samples(i, j);
    }
    out << '\n';
  }
  nlohmann::json meta{{"target", target_name},
                      {"seed", seed},
                      {"generator", generator},
                      {"m", ref.size()},
                      {"d", ref.dim()}};
  std::ofstream meta_out(path + ".meta.json");
  if (!meta_out) {
    throw Error(ErrorCode::WriteError, "cannot write reference metadata: " + path);
  }
  meta_out << meta.dump(2) << '\n';
}

ReferenceSet load_reference(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::MissingFile, "cannot open reference file: " + path);
  }
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    std::vector<double> row(cells.size());
    for (std::size_t j = 0; j < cells.size(); ++j) {
      row[j] = parse_cell(cells[j], static_cast<int>(rows.size()) + 1,
                          static_cast<int>(j) + 1);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw Error(ErrorCode::MalformedData, "ragged reference file");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    throw Error(ErrorCode::EmptyData, "reference file has no rows");
  }
  Matrix samples(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      samples(static_cast<int>(i), static_cast<int>(j)) = rows[i][j];
    }
  }
  return ReferenceSet::from_samples(std::move(samples));
}

}  // namespace rlmh
