// SPDX-License-Identifier: Apache-2.0
#include "sdon/nn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sdon/error.hpp"

namespace sdon::nn {

std::string_view to_string(Activation act) {
  switch (act) {
    case Activation::kLinear: return "linear";
    case Activation::kTanh: return "tanh";
    case Activation::kRelu: return "relu";
  }
  return "linear";
}

Activation activation_from_string(std::string_view name) {
  if (name == "linear") return Activation::kLinear;
  if (name == "tanh") return Activation::kTanh;
  if (name == "relu") return Activation::kRelu;
  throw InvalidArgument("unknown activation '" + std::string(name) + "'");
}

namespace {

Matrix glorot_matrix(std::size_t in, std::size_t out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
  Matrix m(in, out);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-limit, limit);
  return m;
}

Matrix orthogonal_matrix(std::size_t n, Rng& rng) {
  Matrix a(n, n);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = rng.normal();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  return q;
}

void activate(Matrix& y, Activation act) {
  switch (act) {
    case Activation::kLinear: break;
    case Activation::kTanh: y = y.array().tanh(); break;
    case Activation::kRelu: y = y.array().max(0.0); break;
  }
}

// dL/da given dL/dy and the activation output y.
Matrix activation_grad(const Matrix& y, const Matrix& d_out, Activation act) {
  switch (act) {
    case Activation::kLinear: return d_out;
    case Activation::kTanh: return (d_out.array() * (1.0 - y.array().square())).matrix();
    case Activation::kRelu: return (d_out.array() * (y.array() > 0.0).cast<double>()).matrix();
  }
  return d_out;
}

Matrix sigmoid(const Matrix& a) {
  return (1.0 / (1.0 + (-a.array()).exp())).matrix();
}

void check_cols(const Matrix& x, std::size_t expected, const char* what) {
  if (static_cast<std::size_t>(x.cols()) != expected) {
    throw ShapeError(std::string(what) + ": input width " + std::to_string(x.cols()) +
                     " != expected " + std::to_string(expected));
  }
}

}  // namespace

DenseLayer DenseLayer::zeros(std::size_t in, std::size_t out, Activation act) {
  return {Matrix::Zero(in, out), Matrix::Zero(1, out), act};
}

DenseLayer DenseLayer::glorot(std::size_t in, std::size_t out, Activation act, Rng& rng) {
  return {glorot_matrix(in, out, rng), Matrix::Zero(1, out), act};
}

Matrix dense_forward(const DenseLayer& layer, const Matrix& x, DenseCache* cache) {
  check_cols(x, layer.inputs(), "dense");
  Matrix y = x * layer.weight;
  y.rowwise() += layer.bias.row(0);
  activate(y, layer.activation);
  if (cache != nullptr) {
    cache->input = x;
    cache->output = y;
    cache->valid = true;
  }
  return y;
}

Matrix dense_backward(const DenseLayer& layer, const DenseCache& cache,
                      const Matrix& d_out, DenseLayer& grad) {
  if (!cache.valid) throw InvalidArgument("dense backward called without a cached forward pass");
  if (d_out.rows() != cache.output.rows() || d_out.cols() != cache.output.cols()) {
    throw ShapeError("dense backward: upstream gradient shape mismatch");
  }
  const Matrix da = activation_grad(cache.output, d_out, layer.activation);
  grad.weight.noalias() += cache.input.transpose() * da;
  grad.bias += da.colwise().sum();
  return da * layer.weight.transpose();
}

GruLayer GruLayer::zeros(std::size_t in, std::size_t hidden, bool returns_sequence) {
  GruLayer g;
  g.wz = g.wr = g.wh = Matrix::Zero(in, hidden);
  g.uz = g.ur = g.uh = Matrix::Zero(hidden, hidden);
  g.bz = g.br = g.bh = Matrix::Zero(1, hidden);
  g.returns_sequence = returns_sequence;
  return g;
}

GruLayer GruLayer::init(std::size_t in, std::size_t hidden, Rng& rng, bool returns_sequence) {
  GruLayer g = zeros(in, hidden, returns_sequence);
  g.wz = glorot_matrix(in, hidden, rng);
  g.wr = glorot_matrix(in, hidden, rng);
  g.wh = glorot_matrix(in, hidden, rng);
  g.uz = orthogonal_matrix(hidden, rng);
  g.ur = orthogonal_matrix(hidden, rng);
  g.uh = orthogonal_matrix(hidden, rng);
  return g;
}

Sequence gru_forward(const GruLayer& layer, const Sequence& x, const Matrix* h0,
                     GruCache* cache) {
  if (x.empty()) throw ShapeError("gru: empty input sequence");
  const Eigen::Index batch = x.front().rows();
  const std::size_t hid = layer.hidden();
  Matrix h = h0 != nullptr ? *h0 : Matrix::Zero(batch, hid);
  if (h.rows() != batch || static_cast<std::size_t>(h.cols()) != hid) {
    throw ShapeError("gru: initial state shape mismatch");
  }

  if (cache != nullptr) {
    cache->inputs = x;
    cache->states.assign(1, h);
    cache->z.clear();
    cache->r.clear();
    cache->cand.clear();
    cache->valid = true;
  }

  Sequence out;
  out.reserve(layer.returns_sequence ? x.size() : 1);
  for (const Matrix& xt : x) {
    check_cols(xt, layer.inputs(), "gru");
    if (xt.rows() != batch) throw ShapeError("gru: batch size changes along the sequence");
    Matrix az = xt * layer.wz + h * layer.uz;
    az.rowwise() += layer.bz.row(0);
    Matrix ar = xt * layer.wr + h * layer.ur;
    ar.rowwise() += layer.br.row(0);
    const Matrix z = sigmoid(az);
    const Matrix r = sigmoid(ar);
    Matrix ac = xt * layer.wh + (r.array() * h.array()).matrix() * layer.uh;
    ac.rowwise() += layer.bh.row(0);
    const Matrix c = ac.array().tanh().matrix();
    h = ((1.0 - z.array()) * h.array() + z.array() * c.array()).matrix();
    if (cache != nullptr) {
      cache->z.push_back(z);
      cache->r.push_back(r);
      cache->cand.push_back(c);
      cache->states.push_back(h);
    }
    if (layer.returns_sequence) out.push_back(h);
  }
  if (!layer.returns_sequence) out.push_back(h);
  return out;
}

Sequence gru_backward(const GruLayer& layer, const GruCache& cache,
                      const Sequence& d_out, GruLayer& grad) {
  if (!cache.valid) throw InvalidArgument("gru backward called without a cached forward pass");
  const std::size_t steps = cache.inputs.size();
  const std::size_t expected = layer.returns_sequence ? steps : 1;
  if (d_out.size() != expected) throw ShapeError("gru backward: upstream gradient length mismatch");

  Sequence dx(steps);
  Matrix dh = Matrix::Zero(cache.states.front().rows(), layer.hidden());
  for (std::size_t k = steps; k-- > 0;) {
    if (layer.returns_sequence) {
      dh += d_out[k];
    } else if (k + 1 == steps) {
      dh += d_out[0];
    }
    const Matrix& x = cache.inputs[k];
    const Matrix& h_prev = cache.states[k];
    const Matrix& z = cache.z[k];
    const Matrix& r = cache.r[k];
    const Matrix& c = cache.cand[k];

    const Matrix dc = (dh.array() * z.array()).matrix();
    const Matrix dz = (dh.array() * (c.array() - h_prev.array())).matrix();
    Matrix dh_prev = (dh.array() * (1.0 - z.array())).matrix();

    const Matrix dac = (dc.array() * (1.0 - c.array().square())).matrix();
    const Matrix rh = (r.array() * h_prev.array()).matrix();
    grad.wh.noalias() += x.transpose() * dac;
    grad.uh.noalias() += rh.transpose() * dac;
    grad.bh += dac.colwise().sum();
    const Matrix drh = dac * layer.uh.transpose();
    Matrix dxk = dac * layer.wh.transpose();
    dh_prev.array() += drh.array() * r.array();

    const Matrix dar = (drh.array() * h_prev.array() * r.array() * (1.0 - r.array())).matrix();
    grad.wr.noalias() += x.transpose() * dar;
    grad.ur.noalias() += h_prev.transpose() * dar;
    grad.br += dar.colwise().sum();
    dxk.noalias() += dar * layer.wr.transpose();
    dh_prev.noalias() += dar * layer.ur.transpose();

    const Matrix daz = (dz.array() * z.array() * (1.0 - z.array())).matrix();
    grad.wz.noalias() += x.transpose() * daz;
    grad.uz.noalias() += h_prev.transpose() * daz;
    grad.bz += daz.colwise().sum();
    dxk.noalias() += daz * layer.wz.transpose();
    dh_prev.noalias() += daz * layer.uz.transpose();

    dx[k] = std::move(dxk);
    dh = std::move(dh_prev);
  }
  return dx;
}

void adam_step(const std::vector<Matrix*>& params, const std::vector<Matrix*>& grads,
               AdamState& state) {
  if (params.size() != grads.size()) throw ShapeError("adam: parameter/gradient count mismatch");
  if (state.m.empty()) {
    for (const Matrix* p : params) {
      state.m.push_back(Matrix::Zero(p->rows(), p->cols()));
      state.v.push_back(Matrix::Zero(p->rows(), p->cols()));
    }
  }
  if (state.m.size() != params.size()) throw ShapeError("adam: state does not match parameters");

  ++state.t;
  const AdamConfig& c = state.config;
  const double t = static_cast<double>(state.t);
  const double corr1 = 1.0 - std::pow(c.beta1, t);
  const double corr2 = 1.0 - std::pow(c.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    Matrix& p = *params[i];
    const Matrix& g = *grads[i];
    if (p.rows() != g.rows() || p.cols() != g.cols() || state.m[i].rows() != p.rows() ||
        state.m[i].cols() != p.cols()) {
      throw ShapeError("adam: shape mismatch for parameter " + std::to_string(i));
    }
    state.m[i] = c.beta1 * state.m[i] + (1.0 - c.beta1) * g;
    state.v[i] = c.beta2 * state.v[i] + (1.0 - c.beta2) * g.cwiseProduct(g);
    p.array() -= c.lr * (state.m[i].array() / corr1) /
                 ((state.v[i].array() / corr2).sqrt() + c.eps);
  }
}

GradcheckResult gradcheck(const std::vector<Matrix*>& params,
                          const std::vector<Matrix*>& grads,
                          const std::function<double()>& loss, double eps,
                          std::size_t n_coords, std::uint64_t seed, double floor) {
  if (params.size() != grads.size()) throw ShapeError("gradcheck: parameter/gradient count mismatch");
  std::vector<std::size_t> offsets{0};
  for (const Matrix* p : params) offsets.push_back(offsets.back() + static_cast<std::size_t>(p->size()));
  const std::size_t total = offsets.back();

  std::vector<std::size_t> coords(total);
  std::iota(coords.begin(), coords.end(), std::size_t{0});
  if (n_coords < total) {
    Rng rng(seed);
    rng.shuffle(coords);
    coords.resize(n_coords);
    std::sort(coords.begin(), coords.end());
  }

  GradcheckResult result;
  for (std::size_t flat : coords) {
    const auto it = std::upper_bound(offsets.begin(), offsets.end(), flat);
    const std::size_t which = static_cast<std::size_t>(it - offsets.begin()) - 1;
    const std::size_t local = flat - offsets[which];
    double& value = params[which]->data()[local];
    const double saved = value;
    value = saved + eps;
    const double up = loss();
    value = saved - eps;
    const double down = loss();
    value = saved;

    const double numeric = (up - down) / (2.0 * eps);
    const double analytic = grads[which]->data()[local];
    const double denom = std::max({std::abs(numeric), std::abs(analytic), floor});
    const double rel = std::abs(numeric - analytic) / denom;
    if (result.checked == 0 || rel > result.max_rel_error) {
      result.max_rel_error = rel;
      result.worst_coordinate = flat;
    }
    ++result.checked;
  }
  return result;
}

}  // namespace sdon::nn
