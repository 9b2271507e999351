#include "rlmh/numkit.hpp"

#include <cmath>
#include <sstream>

namespace rlmh {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotSpd: return "NotSpd";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::MalformedData: return "MalformedData";
    case ErrorCode::EmptyData: return "EmptyData";
    case ErrorCode::UnknownFamily: return "UnknownFamily";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::InvalidStepSize: return "InvalidStepSize";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::IncompleteTransition: return "IncompleteTransition";
    case ErrorCode::UnknownKind: return "UnknownKind";
    case ErrorCode::InvalidLayout: return "InvalidLayout";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::BufferTooSmall: return "BufferTooSmall";
    case ErrorCode::DegenerateCovariance: return "DegenerateCovariance";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::InvalidFactor: return "InvalidFactor";
    case ErrorCode::InvalidBounds: return "InvalidBounds";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::DegenerateLengthscale: return "DegenerateLengthscale";
    case ErrorCode::WindowTooLarge: return "WindowTooLarge";
    case ErrorCode::UnsupportedDimension: return "UnsupportedDimension";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownKey: return "UnknownKey";
    case ErrorCode::InvalidValue: return "InvalidValue";
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::WriteError: return "WriteError";
    case ErrorCode::CatastrophicFailure: return "CatastrophicFailure";
  }
  return "Unknown";
}

CholFactor::CholFactor(Matrix lower) : lower_(std::move(lower)) {
  if (lower_.rows() != lower_.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "Cholesky factor must be square");
  }
}

CholFactor CholFactor::scaled(double s) const {
  if (!(s > 0.0) || !std::isfinite(s)) {
    throw Error(ErrorCode::InvalidParameter, "scale must be positive and finite");
  }
  return CholFactor(lower_ * s);
}

CholFactor cholesky(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "matrix must be square");
  }
  if (!m.allFinite()) {
    throw Error(ErrorCode::NonFinite, "matrix has non-finite entries");
  }
  const double scale = m.cwiseAbs().maxCoeff();
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (scale > 0.0 && asym > 1e-12 * scale) {
    throw Error(ErrorCode::NotSymmetric, "matrix asymmetry exceeds relative tolerance 1e-12");
  }
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::NotSpd, "Cholesky failed: matrix is not positive definite");
  }
  Matrix lower = llt.matrixL();
  if (!(lower.diagonal().array() > 0.0).all()) {
    throw Error(ErrorCode::NotSpd, "Cholesky pivot <= 0");
  }
  return CholFactor(std::move(lower));
}

SpdMatrix::SpdMatrix(Matrix m) : dense_(std::move(m)), chol_(cholesky(dense_)) {}

Vector spd_solve(const CholFactor& factor, const Vector& v) {
  if (v.size() != factor.dim()) {
    std::ostringstream os;
    os << "spd_solve: factor dim " << factor.dim() << " vs vector length " << v.size();
    throw Error(ErrorCode::DimensionMismatch, os.str());
  }
  const auto tri = factor.lower().triangularView<Eigen::Lower>();
  Vector w = tri.solve(v);
  return tri.transpose().solve(w);
}

double spd_logdet(const CholFactor& factor) {
  return 2.0 * factor.lower().diagonal().array().log().sum();
}

namespace {

// Philox 2x64 round constants (Salmon et al., Random123).
constexpr std::uint64_t kPhiloxM = 0xD2B74407B1CE6E93ULL;
constexpr std::uint64_t kPhiloxW = 0x9E3779B97F4A7C15ULL;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
  unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  hi = static_cast<std::uint64_t>(p >> 64);
  lo = static_cast<std::uint64_t>(p);
}

inline void philox2x64(std::uint64_t key, std::uint64_t c0, std::uint64_t c1,
                       std::uint64_t out[2]) {
  for (int round = 0; round < 10; ++round) {
    std::uint64_t hi, lo;
    mulhilo(kPhiloxM, c0, hi, lo);
    c0 = hi ^ key ^ c1;
    c1 = lo;
    key += kPhiloxW;
  }
  out[0] = c0;
  out[1] = c1;
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream) {}

std::uint64_t RngStream::next_u64() {
  if (block_pos_ >= 2) {
    philox2x64(seed_, stream_, counter_, block_);
    ++counter_;
    block_pos_ = 0;
  }
  return block_[block_pos_++];
}

double RngStream::next_uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::next_normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  // u1 on (0,1] so the log is finite.
  const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = next_uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * M_PI * u2;
  cached_normal_ = r * std::sin(theta);
  has_cached_normal_ = true;
  return r * std::cos(theta);
}

Vector RngStream::normal_vector(int d) {
  Vector z(d);
  for (int i = 0; i < d; ++i) z[i] = next_normal();
  return z;
}

Vector mvn_sample(const Vector& mean, const CholFactor& cov_factor, RngStream& rng) {
  if (mean.size() != cov_factor.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "mvn_sample: mean/factor dimensions differ");
  }
  Vector z = rng.normal_vector(cov_factor.dim());
  return mean + cov_factor.lower().triangularView<Eigen::Lower>() * z;
}

double mvn_logpdf(const Vector& x, const Vector& mean, const CholFactor& cov_factor) {
  if (x.size() != mean.size() || x.size() != cov_factor.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "mvn_logpdf: dimensions differ");
  }
  const int d = cov_factor.dim();
  Vector w = cov_factor.lower().triangularView<Eigen::Lower>().solve(x - mean);
  return -0.5 * d * std::log(2.0 * M_PI) - 0.5 * spd_logdet(cov_factor) -
         0.5 * w.squaredNorm();
}

}  // namespace rlmh
