// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sdon/nn.hpp"
#include "sdon/tensor.hpp"

namespace sdon {

/// Architecture of the vector sequential DeepONet.
///
/// Branch: four sequence-returning GRU layers (encoder pair, decoder pair)
/// followed by a time-distributed linear dense layer to `hd` features, so a
/// load history of length S becomes B with shape [HD x S].
/// Trunk: fully connected, widths [2, ..., HD*C], hidden activation
/// `trunk_activation`, linear output reshaped to [HD x C] per node with
/// slot h*C + c holding (h, c).
/// Output: G[n,s,c] = sum_h B[h,s] T[n,h,c] + beta.
struct ModelConfig {
  std::size_t hd = 32;
  std::size_t steps = 25;
  std::size_t components = 3;
  std::vector<std::size_t> branch_hidden{64, 32, 32, 64};
  std::vector<std::size_t> trunk_widths{2, 101, 101, 101, 101, 101, 96};
  nn::Activation trunk_activation = nn::Activation::kTanh;

  // trunk_widths = [2, trunk_hidden..., hd * components]
  static ModelConfig make(std::size_t hd, std::size_t steps, std::size_t components,
                          std::vector<std::size_t> branch_hidden,
                          const std::vector<std::size_t>& trunk_hidden);

  void validate() const;
  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

// Closed-form trainable parameter count under the single-bias GRU convention.
std::size_t count_params(const ModelConfig& config);

/// G[n,s,c] = sum_h B[h,s] T[n,h,c] + beta, evaluated as one GEMM per
/// component. B: [HD x S], T: [N x HD x C], result [N x S x C].
Tensor combine(const Tensor& branch, const Tensor& trunk, double beta);

class SDeepONet {
 public:
  // Zero-initialised parameters (also used as the gradient accumulator).
  explicit SDeepONet(ModelConfig config);
  static SDeepONet random(ModelConfig config, std::uint64_t seed);

  const ModelConfig& config() const { return config_; }

  /// [HD x S] for one (scaled) load history of length S.
  Tensor branch_forward(std::span<const double> load) const;
  /// [N x HD x C] for normalized coordinates [N x 2].
  Tensor trunk_forward(const Tensor& coords) const;
  /// [N x S x C] in scaled space.
  Tensor forward(std::span<const double> load, const Tensor& coords) const;

  // Batched forms. Rows of the branch output are ordered (case, step).
  nn::Matrix branch_batch(const nn::Matrix& loads) const;   // [b*S x HD]
  nn::Matrix trunk_matrix(const nn::Matrix& coords) const;  // [N x HD*C]

  /// Per-case fields in dataset order [b x S x N x C], scaled space.
  std::vector<double> predict_batch(const nn::Matrix& loads, const nn::Matrix& trunk_out) const;

  /// Mean squared error over all b*S*N*C entries. `targets` holds one
  /// [b*S x N] matrix per component. Gradients accumulate into `grad`,
  /// which must be a model of the same configuration.
  double loss_and_grad(const nn::Matrix& loads, const nn::Matrix& coords,
                       const std::vector<nn::Matrix>& targets, SDeepONet& grad) const;
  double loss(const nn::Matrix& loads, const nn::Matrix& coords,
              const std::vector<nn::Matrix>& targets) const;

  void set_zero();

  template <typename F>
  void visit(const std::string& prefix, F&& f) {
    for (std::size_t i = 0; i < branch_.size(); ++i) {
      branch_[i].visit(prefix + "branch.gru" + std::to_string(i), f);
    }
    head_.visit(prefix + "branch.dense", f);
    for (std::size_t i = 0; i < trunk_.size(); ++i) {
      trunk_[i].visit(prefix + "trunk.dense" + std::to_string(i), f);
    }
    f(prefix + "beta", beta_);
  }

  double beta() const { return beta_(0, 0); }
  void set_beta(double b) { beta_(0, 0) = b; }

  std::vector<nn::GruLayer>& branch_layers() { return branch_; }
  nn::DenseLayer& branch_head() { return head_; }
  std::vector<nn::DenseLayer>& trunk_layers() { return trunk_; }
  const std::vector<nn::GruLayer>& branch_layers() const { return branch_; }
  const nn::DenseLayer& branch_head() const { return head_; }
  const std::vector<nn::DenseLayer>& trunk_layers() const { return trunk_; }

 private:
  ModelConfig config_;
  std::vector<nn::GruLayer> branch_;
  nn::DenseLayer head_;
  std::vector<nn::DenseLayer> trunk_;
  nn::Matrix beta_;  // [1 x 1]
};

/// Basis/weight view of one prediction: field c at step s equals
/// sum_h weights[h,s] * bases[c,h,:] + beta.
struct BasisDecomposition {
  Tensor bases;    // [C x HD x N]
  Tensor weights;  // [HD x S]
  double beta = 0.0;

  // [N x S x C]
  Tensor reconstruct() const;
};

BasisDecomposition extract_basis(const SDeepONet& model, std::span<const double> load,
                                 const Tensor& coords);

nn::Matrix to_matrix(const Tensor& t);  // rank-2 tensors only

}  // namespace sdon
