#pragma once

#include <string>
#include <utility>
#include <vector>

#include "rlmh/numkit.hpp"

namespace rlmh {

/// (in_width, out_width) per affine layer; ReLU between layers, identity out.
using Layout = std::vector<std::pair<int, int>>;

int param_count(const Layout& layout);
void validate_layout(const Layout& layout);

/// Flat storage, layer-major: per layer the (out x in) weight matrix in
/// column-major order, then the bias vector.
struct MlpParams {
  Layout layout;
  Vector flat;

  Eigen::Map<const Matrix> weight(int layer) const;
  Eigen::Map<const Vector> bias(int layer) const;
  int input_width() const { return layout.front().first; }
  int output_width() const { return layout.back().second; }
};

/// Weights and biases Uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)).
MlpParams mlp_init(const Layout& layout, RngStream& rng);

/// Per-layer inputs and pre-activations for one batch (columns = batch items).
struct ForwardTape {
  std::vector<Matrix> inputs;   // a_{k-1} entering layer k
  std::vector<Matrix> preacts;  // z_k = W_k a_{k-1} + b_k
};

/// x: (input_width x batch). Returns (output_width x batch) and the tape.
std::pair<Matrix, ForwardTape> forward(const MlpParams& p, const Matrix& x);
/// Single-sample convenience: first output coordinate.
double forward_scalar(const MlpParams& p, const Vector& x);

/// Reverse-mode gradients of <dy, y>; ReLU subgradient at 0 is 0.
/// Returns (d params flat, d input).
std::pair<Vector, Matrix> backward(const MlpParams& p, const ForwardTape& tape,
                                   const Matrix& dy);

/// g clipped to norm <= clip_norm, then p + lr * g (sign chosen by caller).
MlpParams apply_update(const MlpParams& p, const Vector& g, double lr,
                       double clip_norm);

/// CSV snapshot: layout header line, then the flat vector.
void save_mlp(const MlpParams& p, const std::string& path);
MlpParams load_mlp(const std::string& path);

}  // namespace rlmh
