#include "rlmh/neuralnet.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace rlmh {

void validate_layout(const Layout& layout) {
  if (layout.empty()) {
    throw Error(ErrorCode::InvalidLayout, "layout must have at least one layer");
  }
  for (std::size_t k = 0; k < layout.size(); ++k) {
    if (layout[k].first < 1 || layout[k].second < 1) {
      throw Error(ErrorCode::InvalidLayout, "layer widths must be >= 1");
    }
    if (k > 0 && layout[k].first != layout[k - 1].second) {
      throw Error(ErrorCode::InvalidLayout, "adjacent layer widths do not chain");
    }
  }
}

int param_count(const Layout& layout) {
  validate_layout(layout);
  int n = 0;
  for (const auto& [in, out] : layout) n += in * out + out;
  return n;
}

namespace {

int layer_offset(const Layout& layout, int layer) {
  int off = 0;
  for (int k = 0; k < layer; ++k) {
    off += layout[k].first * layout[k].second + layout[k].second;
  }
  return off;
}

}  // namespace

Eigen::Map<const Matrix> MlpParams::weight(int layer) const {
  const auto& [in, out] = layout[layer];
  return Eigen::Map<const Matrix>(flat.data() + layer_offset(layout, layer), out, in);
}

Eigen::Map<const Vector> MlpParams::bias(int layer) const {
  const auto& [in, out] = layout[layer];
  return Eigen::Map<const Vector>(flat.data() + layer_offset(layout, layer) + in * out,
                                  out);
}

MlpParams mlp_init(const Layout& layout, RngStream& rng) {
  validate_layout(layout);
  MlpParams p;
  p.layout = layout;
  p.flat.resize(param_count(layout));
  int pos = 0;
  for (const auto& [in, out] : layout) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    for (int i = 0; i < in * out + out; ++i) {
      p.flat[pos++] = (2.0 * rng.next_uniform() - 1.0) * bound;
    }
  }
  return p;
}

std::pair<Matrix, ForwardTape> forward(const MlpParams& p, const Matrix& x) {
  validate_layout(p.layout);
  if (x.rows() != p.input_width()) {
    std::ostringstream os;
    os << "forward: input width " << x.rows() << " != layout width "
       << p.input_width();
    throw Error(ErrorCode::DimensionMismatch, os.str());
  }
  const int n_layers = static_cast<int>(p.layout.size());
  ForwardTape tape;
  tape.inputs.reserve(n_layers);
  tape.preacts.reserve(n_layers);
  Matrix a = x;
  for (int k = 0; k < n_layers; ++k) {
    tape.inputs.push_back(a);
    Matrix z = (p.weight(k) * a).colwise() + p.bias(k);
    tape.preacts.push_back(z);
    if (k + 1 < n_layers) {
      a = z.cwiseMax(0.0);
    } else {
      a = z;
    }
  }
  return {std::move(a), std::move(tape)};
}

double forward_scalar(const MlpParams& p, const Vector& x) {
  return forward(p, x).first(0, 0);
}

std::pair<Vector, Matrix> backward(const MlpParams& p, const ForwardTape& tape,
                                   const Matrix& dy) {
  const int n_layers = static_cast<int>(p.layout.size());
  if (static_cast<int>(tape.inputs.size()) != n_layers ||
      static_cast<int>(tape.preacts.size()) != n_layers) {
    throw Error(ErrorCode::ShapeMismatch, "backward: tape does not match layout");
  }
  if (dy.rows() != p.output_width() || dy.cols() != tape.inputs.front().cols()) {
    throw Error(ErrorCode::ShapeMismatch, "backward: dy shape mismatch");
  }
  Vector dflat = Vector::Zero(p.flat.size());
  Matrix dz = dy;
  Matrix dx;
  for (int k = n_layers - 1; k >= 0; --k) {
    const auto& [in, out] = p.layout[k];
    const int off = layer_offset(p.layout, k);
    Eigen::Map<Matrix> dw(dflat.data() + off, out, in);
    Eigen::Map<Vector> db(dflat.data() + off + in * out, out);
    dw = dz * tape.inputs[k].transpose();
    db = dz.rowwise().sum();
    dx = p.weight(k).transpose() * dz;
    if (k > 0) {
      // ReLU subgradient: 0 at preactivation 0.
      dz = dx.cwiseProduct(
          (tape.preacts[k - 1].array() > 0.0).cast<double>().matrix());
    }
  }
  return {std::move(dflat), std::move(dx)};
}

MlpParams apply_update(const MlpParams& p, const Vector& g, double lr,
                       double clip_norm) {
  if (g.size() != p.flat.size()) {
    throw Error(ErrorCode::ShapeMismatch, "apply_update: gradient length mismatch");
  }
  if (!(clip_norm > 0.0)) {
    throw Error(ErrorCode::InvalidParameter, "apply_update: clip_norm must be > 0");
  }
  if (lr < 0.0) {
    throw Error(ErrorCode::InvalidParameter, "apply_update: lr must be >= 0");
  }
  const double norm = g.norm();
  MlpParams out = p;
  if (norm > clip_norm) {
    out.flat += lr * (clip_norm / norm) * g;
  } else {
    out.flat += lr * g;
  }
  return out;
}

void save_mlp(const MlpParams& p, const std::string& path) {
  std::ofstream f(path);
  if (!f) {
    throw Error(ErrorCode::WriteError, "cannot write checkpoint: " + path);
  }
  f << "layout";
  for (const auto& [in, out] : p.layout) f << ',' << in << ',' << out;
  f << '\n';
  f.precision(17);
  for (Eigen::Index i = 0; i < p.flat.size(); ++i) {
    if (i) f << ',';
    f << p.flat[i];
  }
  f << '\n';
}

MlpParams load_mlp(const std::string& path) {
  std::ifstream f(path);
  if (!f) {
    throw Error(ErrorCode::MissingFile, "cannot open checkpoint: " + path);
  }
  std::string header, values;
  if (!std::getline(f, header) || !std::getline(f, values)) {
    throw Error(ErrorCode::MalformedData, "checkpoint is truncated: " + path);
  }
  std::stringstream hs(header);
  std::string tok;
  std::getline(hs, tok, ',');
  if (tok != "layout") {
    throw Error(ErrorCode::MalformedData, "checkpoint missing layout header");
  }
  std::vector<int> widths;
  while (std::getline(hs, tok, ',')) widths.push_back(std::stoi(tok));
  if (widths.empty() || widths.size() % 2 != 0) {
    throw Error(ErrorCode::MalformedData, "checkpoint layout header malformed");
  }
  MlpParams p;
  for (std::size_t i = 0; i < widths.size(); i += 2) {
    p.layout.emplace_back(widths[i], widths[i + 1]);
  }
  validate_layout(p.layout);
  std::vector<double> vals;
  std::stringstream vs(values);
  while (std::getline(vs, tok, ',')) vals.push_back(std::stod(tok));
  if (static_cast<int>(vals.size()) != param_count(p.layout)) {
    throw Error(ErrorCode::MalformedData, "checkpoint parameter count mismatch");
  }
  p.flat = Eigen::Map<const Vector>(vals.data(), static_cast<Eigen::Index>(vals.size()));
  return p;
}

}  // namespace rlmh
