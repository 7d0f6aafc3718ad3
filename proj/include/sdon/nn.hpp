// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "sdon/random.hpp"

namespace sdon::nn {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// One [batch x features] matrix per time step.
using Sequence = std::vector<Matrix>;

enum class Activation { kLinear, kTanh, kRelu };

std::string_view to_string(Activation act);
Activation activation_from_string(std::string_view name);

// ---------------------------------------------------------------------------
// Dense

struct DenseLayer {
  Matrix weight;  // [in x out]
  Matrix bias;    // [1 x out]
  Activation activation = Activation::kLinear;

  static DenseLayer zeros(std::size_t in, std::size_t out, Activation act);
  // Glorot-uniform weights, zero bias.
  static DenseLayer glorot(std::size_t in, std::size_t out, Activation act, Rng& rng);

  std::size_t inputs() const { return static_cast<std::size_t>(weight.rows()); }
  std::size_t outputs() const { return static_cast<std::size_t>(weight.cols()); }

  template <typename F>
  void visit(const std::string& prefix, F&& f) {
    f(prefix + ".weight", weight);
    f(prefix + ".bias", bias);
  }
};

struct DenseCache {
  Matrix input;
  Matrix output;
  bool valid = false;
};

// y = act(x W + b). When a cache is given, stores what backward needs.
Matrix dense_forward(const DenseLayer& layer, const Matrix& x,
                     DenseCache* cache = nullptr);

// Accumulates parameter gradients into `grad` (a layer of the same shape)
// and returns the gradient with respect to the input.
Matrix dense_backward(const DenseLayer& layer, const DenseCache& cache,
                      const Matrix& d_out, DenseLayer& grad);

// ---------------------------------------------------------------------------
// GRU
//
//   z  = sigmoid(x Wz + h Uz + bz)
//   r  = sigmoid(x Wr + h Ur + br)
//   c  = tanh(x Wh + (r * h) Uh + bh)
//   h' = (1 - z) * h + z * c
//
// One bias vector per gate; the reset gate multiplies the previous state
// before the recurrent matmul.

inline constexpr std::string_view kGruConvention = "gru:mix=(1-z)h+zc;reset=before-matmul;bias=single";

struct GruLayer {
  Matrix wz, wr, wh;  // [in x h]
  Matrix uz, ur, uh;  // [h x h]
  Matrix bz, br, bh;  // [1 x h]
  bool returns_sequence = true;

  static GruLayer zeros(std::size_t in, std::size_t hidden, bool returns_sequence = true);
  // Glorot-uniform input kernels, orthogonal recurrent kernels, zero biases.
  static GruLayer init(std::size_t in, std::size_t hidden, Rng& rng,
                       bool returns_sequence = true);

  std::size_t inputs() const { return static_cast<std::size_t>(wz.rows()); }
  std::size_t hidden() const { return static_cast<std::size_t>(wz.cols()); }

  template <typename F>
  void visit(const std::string& prefix, F&& f) {
    f(prefix + ".wz", wz);
    f(prefix + ".wr", wr);
    f(prefix + ".wh", wh);
    f(prefix + ".uz", uz);
    f(prefix + ".ur", ur);
    f(prefix + ".uh", uh);
    f(prefix + ".bz", bz);
    f(prefix + ".br", br);
    f(prefix + ".bh", bh);
  }
};

struct GruCache {
  Sequence inputs;
  Sequence states;  // h_0 .. h_T
  Sequence z, r, cand;
  bool valid = false;
};

// Returns h_1..h_T, or just {h_T} when the layer does not return sequences.
// h0 defaults to zeros.
Sequence gru_forward(const GruLayer& layer, const Sequence& x,
                     const Matrix* h0 = nullptr, GruCache* cache = nullptr);

// Backpropagation through time. `d_out` matches the forward output (T
// matrices, or one for the final state). Returns d/dx per step.
Sequence gru_backward(const GruLayer& layer, const GruCache& cache,
                      const Sequence& d_out, GruLayer& grad);

// ---------------------------------------------------------------------------
// Adam

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  AdamConfig config;
  std::vector<Matrix> m, v;
  std::int64_t t = 0;
};

// Standard Adam with bias correction. Moment buffers are created lazily.
void adam_step(const std::vector<Matrix*>& params,
               const std::vector<Matrix*>& grads, AdamState& state);

// ---------------------------------------------------------------------------
// Finite-difference verification

struct GradcheckResult {
  double max_rel_error = 0.0;
  std::size_t checked = 0;
  std::size_t worst_coordinate = 0;
};

/// Central differences over `n_coords` random coordinates (all of them when
/// the model is smaller) compared against the analytic gradients already
/// stored in `grads`. Relative error is |a - n| / max(|a|, |n|, floor).
/// Rounding in the difference quotient is about 1e-16 * |loss| / eps, so
/// gradients below `floor` are effectively held to an absolute tolerance.
GradcheckResult gradcheck(const std::vector<Matrix*>& params,
                          const std::vector<Matrix*>& grads,
                          const std::function<double()>& loss, double eps,
                          std::size_t n_coords, std::uint64_t seed,
                          double floor = 1e-4);

// Collects pointers in visit order.
template <typename Model>
std::vector<Matrix*> parameter_list(Model& model) {
  std::vector<Matrix*> out;
  model.visit("", [&out](const std::string&, Matrix& m) { out.push_back(&m); });
  return out;
}

}  // namespace sdon::nn
