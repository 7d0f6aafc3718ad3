// SPDX-License-Identifier: Apache-2.0
#include "sdon/sdeeponet.hpp"

#include <string>

#include "sdon/error.hpp"
#include "sdon/random.hpp"

namespace sdon {

using nn::Matrix;

namespace {

using StridedConst =
    Eigen::Map<const Matrix, Eigen::Unaligned, Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>>;
using Strided = Eigen::Map<Matrix, Eigen::Unaligned, Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>>;

// Columns h*C + c of a row-major [N x HD*C] block, viewed as [N x HD].
StridedConst component_view(const double* data, std::size_t n, std::size_t hd,
                            std::size_t comps, std::size_t c) {
  return StridedConst(data + c, static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(hd),
                      Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>(
                          static_cast<Eigen::Index>(hd * comps), static_cast<Eigen::Index>(comps)));
}

Strided component_view(double* data, std::size_t n, std::size_t hd, std::size_t comps,
                       std::size_t c) {
  return Strided(data + c, static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(hd),
                 Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>(static_cast<Eigen::Index>(hd * comps),
                                                               static_cast<Eigen::Index>(comps)));
}

nn::Sequence load_sequence(const Matrix& loads) {
  nn::Sequence seq(static_cast<std::size_t>(loads.cols()));
  for (Eigen::Index s = 0; s < loads.cols(); ++s) seq[static_cast<std::size_t>(s)] = loads.col(s);
  return seq;
}

// Sequence of S [b x h] blocks -> [b*S x h], rows ordered (case, step).
Matrix stack(const nn::Sequence& seq) {
  const Eigen::Index b = seq.front().rows();
  const auto steps = static_cast<Eigen::Index>(seq.size());
  Matrix out(b * steps, seq.front().cols());
  for (Eigen::Index s = 0; s < steps; ++s) {
    for (Eigen::Index i = 0; i < b; ++i) out.row(i * steps + s) = seq[static_cast<std::size_t>(s)].row(i);
  }
  return out;
}

nn::Sequence unstack(const Matrix& flat, Eigen::Index batch, Eigen::Index steps) {
  nn::Sequence seq(static_cast<std::size_t>(steps), Matrix(batch, flat.cols()));
  for (Eigen::Index s = 0; s < steps; ++s) {
    for (Eigen::Index i = 0; i < batch; ++i) seq[static_cast<std::size_t>(s)].row(i) = flat.row(i * steps + s);
  }
  return seq;
}

}  // namespace

ModelConfig ModelConfig::make(std::size_t hd, std::size_t steps, std::size_t components,
                              std::vector<std::size_t> branch_hidden,
                              const std::vector<std::size_t>& trunk_hidden) {
  ModelConfig c;
  c.hd = hd;
  c.steps = steps;
  c.components = components;
  c.branch_hidden = std::move(branch_hidden);
  c.trunk_widths.assign(1, 2);
  c.trunk_widths.insert(c.trunk_widths.end(), trunk_hidden.begin(), trunk_hidden.end());
  c.trunk_widths.push_back(hd * components);
  c.validate();
  return c;
}

void ModelConfig::validate() const {
  if (hd == 0 || steps == 0 || components == 0) throw InvalidArgument("model: HD, S and C must be positive");
  if (branch_hidden.empty()) throw InvalidArgument("model: branch needs at least one GRU layer");
  for (std::size_t h : branch_hidden) {
    if (h == 0) throw InvalidArgument("model: GRU hidden sizes must be positive");
  }
  if (trunk_widths.size() < 2) throw InvalidArgument("model: trunk needs an input and an output width");
  if (trunk_widths.front() != 2) throw InvalidArgument("model: trunk input width must be 2");
  if (trunk_widths.back() != hd * components) {
    throw InvalidArgument("model: trunk output width " + std::to_string(trunk_widths.back()) +
                          " != HD*C = " + std::to_string(hd * components));
  }
  for (std::size_t w : trunk_widths) {
    if (w == 0) throw InvalidArgument("model: trunk widths must be positive");
  }
}

std::size_t count_params(const ModelConfig& c) {
  c.validate();
  std::size_t total = 0;
  std::size_t in = 1;
  for (std::size_t h : c.branch_hidden) {
    total += 3 * (in * h + h * h + h);
    in = h;
  }
  total += in * c.hd + c.hd;
  for (std::size_t l = 0; l + 1 < c.trunk_widths.size(); ++l) {
    total += c.trunk_widths[l] * c.trunk_widths[l + 1] + c.trunk_widths[l + 1];
  }
  return total + 1;
}

Tensor combine(const Tensor& branch, const Tensor& trunk, double beta) {
  if (branch.rank() != 2 || trunk.rank() != 3) {
    throw ShapeError("combine: expected B [HD x S] and T [N x HD x C]");
  }
  const std::size_t hd = branch.dim(0);
  const std::size_t steps = branch.dim(1);
  const std::size_t n = trunk.dim(0);
  const std::size_t comps = trunk.dim(2);
  if (trunk.dim(1) != hd) {
    throw ShapeError("combine: hidden dimension mismatch " + shape_string(branch.shape()) + " vs " +
                     shape_string(trunk.shape()));
  }
  const Eigen::Map<const Matrix> b(branch.data().data(), static_cast<Eigen::Index>(hd),
                                   static_cast<Eigen::Index>(steps));
  Tensor out({n, steps, comps});
  double* dst = out.data().data();
  for (std::size_t c = 0; c < comps; ++c) {
    const Matrix g = component_view(trunk.data().data(), n, hd, comps, c) * b;  // [N x S]
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t s = 0; s < steps; ++s) {
        dst[(i * steps + s) * comps + c] = g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(s)) + beta;
      }
    }
  }
  return out;
}

SDeepONet::SDeepONet(ModelConfig config) : config_(std::move(config)) {
  config_.validate();
  std::size_t in = 1;
  for (std::size_t h : config_.branch_hidden) {
    branch_.push_back(nn::GruLayer::zeros(in, h, true));
    in = h;
  }
  head_ = nn::DenseLayer::zeros(in, config_.hd, nn::Activation::kLinear);
  const auto& w = config_.trunk_widths;
  for (std::size_t l = 0; l + 1 < w.size(); ++l) {
    const bool last = l + 2 == w.size();
    trunk_.push_back(nn::DenseLayer::zeros(
        w[l], w[l + 1], last ? nn::Activation::kLinear : config_.trunk_activation));
  }
  beta_ = Matrix::Zero(1, 1);
}

SDeepONet SDeepONet::random(ModelConfig config, std::uint64_t seed) {
  SDeepONet m(std::move(config));
  Rng rng(seed);
  for (auto& g : m.branch_) g = nn::GruLayer::init(g.inputs(), g.hidden(), rng, true);
  m.head_ = nn::DenseLayer::glorot(m.head_.inputs(), m.head_.outputs(), m.head_.activation, rng);
  for (auto& d : m.trunk_) d = nn::DenseLayer::glorot(d.inputs(), d.outputs(), d.activation, rng);
  return m;
}

void SDeepONet::set_zero() {
  visit("", [](const std::string&, Matrix& m) { m.setZero(); });
}

Matrix SDeepONet::branch_batch(const Matrix& loads) const {
  if (static_cast<std::size_t>(loads.cols()) != config_.steps) {
    throw ShapeError("branch: load sequence length " + std::to_string(loads.cols()) +
                     " != S = " + std::to_string(config_.steps));
  }
  nn::Sequence seq = load_sequence(loads);
  for (const auto& g : branch_) seq = nn::gru_forward(g, seq);
  return nn::dense_forward(head_, stack(seq));
}

Matrix SDeepONet::trunk_matrix(const Matrix& coords) const {
  Matrix x = coords;
  for (const auto& d : trunk_) x = nn::dense_forward(d, x);
  return x;
}

Tensor SDeepONet::branch_forward(std::span<const double> load) const {
  Matrix loads(1, static_cast<Eigen::Index>(load.size()));
  for (std::size_t s = 0; s < load.size(); ++s) loads(0, static_cast<Eigen::Index>(s)) = load[s];
  const Matrix b = branch_batch(loads);  // [S x HD]
  Tensor out({config_.hd, config_.steps});
  Eigen::Map<Matrix>(out.data().data(), static_cast<Eigen::Index>(config_.hd),
                     static_cast<Eigen::Index>(config_.steps)) = b.transpose();
  return out;
}

Tensor SDeepONet::trunk_forward(const Tensor& coords) const {
  if (coords.rank() != 2 || coords.dim(1) != 2) throw ShapeError("trunk: coords must be [N x 2]");
  const Matrix t = trunk_matrix(to_matrix(coords));
  Tensor out({coords.dim(0), config_.hd, config_.components});
  std::copy(t.data(), t.data() + t.size(), out.data().begin());
  return out;
}

Tensor SDeepONet::forward(std::span<const double> load, const Tensor& coords) const {
  return combine(branch_forward(load), trunk_forward(coords), beta());
}

std::vector<double> SDeepONet::predict_batch(const Matrix& loads, const Matrix& trunk_out) const {
  const std::size_t hd = config_.hd;
  const std::size_t comps = config_.components;
  const std::size_t n = static_cast<std::size_t>(trunk_out.rows());
  if (static_cast<std::size_t>(trunk_out.cols()) != hd * comps) throw ShapeError("predict: trunk width mismatch");
  const Matrix b = branch_batch(loads);
  const auto rows = static_cast<std::size_t>(b.rows());
  std::vector<double> out(rows * n * comps);
  for (std::size_t c = 0; c < comps; ++c) {
    const Matrix g = b * component_view(trunk_out.data(), n, hd, comps, c).transpose();
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t i = 0; i < n; ++i) {
        out[(r * n + i) * comps + c] =
            g(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)) + beta();
      }
    }
  }
  return out;
}

double SDeepONet::loss(const Matrix& loads, const Matrix& coords,
                       const std::vector<Matrix>& targets) const {
  const std::size_t hd = config_.hd;
  const std::size_t comps = config_.components;
  if (targets.size() != comps) throw ShapeError("loss: expected one target matrix per component");
  const Matrix t = trunk_matrix(coords);
  const Matrix b = branch_batch(loads);
  const auto n = static_cast<std::size_t>(t.rows());
  double sum = 0.0;
  for (std::size_t c = 0; c < comps; ++c) {
    Matrix r = b * component_view(t.data(), n, hd, comps, c).transpose();
    r.array() += beta() - targets[c].array();
    sum += r.squaredNorm();
  }
  return sum / static_cast<double>(b.rows() * static_cast<Eigen::Index>(n * comps));
}

double SDeepONet::loss_and_grad(const Matrix& loads, const Matrix& coords,
                                const std::vector<Matrix>& targets, SDeepONet& grad) const {
  const std::size_t hd = config_.hd;
  const std::size_t comps = config_.components;
  if (!(grad.config_ == config_)) throw ShapeError("loss_and_grad: gradient model has a different configuration");
  if (targets.size() != comps) throw ShapeError("loss: expected one target matrix per component");
  if (static_cast<std::size_t>(loads.cols()) != config_.steps) {
    throw ShapeError("loss: load sequence length does not match S");
  }
  const Eigen::Index batch = loads.rows();
  const auto steps = static_cast<Eigen::Index>(config_.steps);

  std::vector<nn::DenseCache> trunk_cache(trunk_.size());
  Matrix t = coords;
  for (std::size_t l = 0; l < trunk_.size(); ++l) t = nn::dense_forward(trunk_[l], t, &trunk_cache[l]);
  const auto n = static_cast<std::size_t>(t.rows());

  std::vector<nn::GruCache> gru_cache(branch_.size());
  nn::Sequence seq = load_sequence(loads);
  for (std::size_t l = 0; l < branch_.size(); ++l) seq = nn::gru_forward(branch_[l], seq, nullptr, &gru_cache[l]);
  nn::DenseCache head_cache;
  const Matrix b = nn::dense_forward(head_, stack(seq), &head_cache);  // [b*S x HD]

  const double total = static_cast<double>(b.rows()) * static_cast<double>(n * comps);
  double sum = 0.0;
  double d_beta = 0.0;
  Matrix d_b = Matrix::Zero(b.rows(), b.cols());
  Matrix d_t = Matrix::Zero(t.rows(), t.cols());
  for (std::size_t c = 0; c < comps; ++c) {
    if (targets[c].rows() != b.rows() || static_cast<std::size_t>(targets[c].cols()) != n) {
      throw ShapeError("loss: target matrix for component " + std::to_string(c) + " has the wrong shape");
    }
    const auto tc = component_view(t.data(), n, hd, comps, c);
    Matrix r = b * tc.transpose();
    r.array() += beta() - targets[c].array();
    sum += r.squaredNorm();
    r *= 2.0 / total;
    d_beta += r.sum();
    d_b.noalias() += r * tc;
    component_view(d_t.data(), n, hd, comps, c) = r.transpose() * b;
  }

  Matrix d = d_t;
  for (std::size_t l = trunk_.size(); l-- > 0;) d = nn::dense_backward(trunk_[l], trunk_cache[l], d, grad.trunk_[l]);
  const Matrix d_h = nn::dense_backward(head_, head_cache, d_b, grad.head_);
  nn::Sequence d_seq = unstack(d_h, batch, steps);
  for (std::size_t l = branch_.size(); l-- > 0;) {
    d_seq = nn::gru_backward(branch_[l], gru_cache[l], d_seq, grad.branch_[l]);
  }
  grad.beta_(0, 0) += d_beta;
  return sum / total;
}

Tensor BasisDecomposition::reconstruct() const {
  const std::size_t comps = bases.dim(0);
  const std::size_t hd = bases.dim(1);
  const std::size_t n = bases.dim(2);
  const std::size_t steps = weights.dim(1);
  Tensor out({n, steps, comps});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t s = 0; s < steps; ++s) {
      for (std::size_t c = 0; c < comps; ++c) {
        double acc = 0.0;
        for (std::size_t h = 0; h < hd; ++h) acc += weights.at({h, s}) * bases.at({c, h, i});
        out.at({i, s, c}) = acc + beta;
      }
    }
  }
  return out;
}

BasisDecomposition extract_basis(const SDeepONet& model, std::span<const double> load,
                                 const Tensor& coords) {
  const Tensor t = model.trunk_forward(coords);
  BasisDecomposition d;
  d.weights = model.branch_forward(load);
  d.beta = model.beta();
  const std::size_t n = t.dim(0);
  const std::size_t hd = t.dim(1);
  const std::size_t comps = t.dim(2);
  d.bases = Tensor({comps, hd, n});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t h = 0; h < hd; ++h) {
      for (std::size_t c = 0; c < comps; ++c) d.bases.at({c, h, i}) = t.at({i, h, c});
    }
  }
  return d;
}

Matrix to_matrix(const Tensor& t) {
  if (t.rank() != 2) throw ShapeError("to_matrix: expected a rank-2 tensor, got " + shape_string(t.shape()));
  return Eigen::Map<const Matrix>(t.data().data(), static_cast<Eigen::Index>(t.dim(0)),
                                  static_cast<Eigen::Index>(t.dim(1)));
}

}  // namespace sdon
