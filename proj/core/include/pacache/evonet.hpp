// Copyright 2026 The pacache Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "pacache/features.hpp"

namespace pacache {

struct Hyperparameters {
    double beta = 0.99;   // hedge discount factor, in (0, 1)
    double kappa = 100.0; // hedge loss clip
    double zeta = 0.1;    // smoothing floor, alpha >= zeta / L
    double eta = 10.0;    // learning rate
    double grad_clip = 10.0;  // global gradient-norm clip; <= 0 disables
    /// false: hidden state stays zero (feedforward gated network).
    bool recurrent = true;
    /// true: alpha is never updated (fixed-depth comparator).
    bool freeze_alpha = false;
};

/// Geometric widths from `first` down to `last` over `depth` layers.
[[nodiscard]] std::vector<std::size_t> geometric_widths(std::size_t depth, std::size_t first, std::size_t last);

/// One GRU layer with its attached regressor.
/// W_* are n x n_in, U_* are n x n, biases and the stored hidden state are n-vectors, theta is 1 x n.
struct GruLayer {
    Eigen::MatrixXd w_r, w_z, w_h;
    Eigen::MatrixXd u_r, u_z, u_h;
    Eigen::VectorXd b_r, b_z, b_h;
    Eigen::RowVectorXd theta;
    Eigen::VectorXd hidden;

    [[nodiscard]] std::size_t width() const noexcept { return static_cast<std::size_t>(b_r.size()); }
    [[nodiscard]] std::size_t input_width() const noexcept { return static_cast<std::size_t>(w_r.cols()); }
};

/// Evolving GRU stack: a regressor on every hidden layer, combined by hedge weights alpha.
class Network {
public:
    Network(std::size_t input_dim, std::span<const std::size_t> widths, const Hyperparameters& hp, std::uint64_t seed);

    [[nodiscard]] std::size_t depth() const noexcept { return layers_.size(); }
    [[nodiscard]] std::size_t input_dim() const noexcept { return input_dim_; }
    [[nodiscard]] const std::vector<GruLayer>& layers() const noexcept { return layers_; }
    [[nodiscard]] const std::vector<double>& alpha() const noexcept { return alpha_; }
    [[nodiscard]] const Hyperparameters& hyperparameters() const noexcept { return hp_; }
    [[nodiscard]] std::uint64_t version() const noexcept { return version_; }

    /// Mutable access bumps the version so outstanding forward traces become stale.
    GruLayer& mutable_layer(std::size_t l);
    void set_alpha(std::vector<double> alpha);
    void set_hyperparameters(const Hyperparameters& hp);
    void reset_hidden_state();

    /// Flat parameter view in a fixed order (per layer: W_r W_z W_h U_r U_z U_h b_r b_z b_h theta).
    [[nodiscard]] std::size_t parameter_count() const;
    [[nodiscard]] double parameter(std::size_t i) const;
    void set_parameter(std::size_t i, double v);

private:
    double* parameter_ptr(std::size_t i);

    std::size_t input_dim_ = 0;
    std::vector<GruLayer> layers_;
    std::vector<double> alpha_;
    Hyperparameters hp_;
    std::uint64_t version_ = 0;
};

[[nodiscard]] Network init_network(std::size_t input_dim, std::span<const std::size_t> widths,
                                   const Hyperparameters& hp, std::uint64_t seed);

struct LayerTrace {
    Eigen::MatrixXd r, z, candidate, h;  // m x n activations
    Eigen::VectorXd prediction;          // f^(l), m-vector
};

struct ForwardTrace {
    Eigen::MatrixXd input;  // m x d
    std::vector<LayerTrace> layers;
    Eigen::VectorXd combined;  // sum_l alpha_l f^(l)
    std::uint64_t network_version = 0;
};

class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class StaleTraceError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class NonFiniteError : public std::runtime_error {
public:
    NonFiniteError(std::size_t layer, const std::string& what) : std::runtime_error(what), layer_(layer) {}
    /// 1-based layer index, 0 when not attributable to a single layer.
    [[nodiscard]] std::size_t layer() const noexcept { return layer_; }

private:
    std::size_t layer_;
};

/// Evaluates every layer against the stored hidden states without mutating them.
[[nodiscard]] ForwardTrace forward(const Network& net, const Eigen::MatrixXd& x);

/// Combined prediction only.
[[nodiscard]] Eigen::VectorXd predict(const Network& net, const Eigen::MatrixXd& x);

/// Mean relative squared error (1/m) sum (f_i / y_i - 1)^2. Throws std::domain_error if any y_i <= 0.
[[nodiscard]] double mrse_loss(const Eigen::VectorXd& f, const Eigen::VectorXd& y);

/// Decay by beta^min(loss, kappa), floor at zeta / L, renormalize.
[[nodiscard]] std::vector<double> hedge_update(std::span<const double> alpha, std::span<const double> losses,
                                               double beta, double kappa, double zeta);

struct LayerGradients {
    Eigen::MatrixXd w_r, w_z, w_h;
    Eigen::MatrixXd u_r, u_z, u_h;
    Eigen::VectorXd b_r, b_z, b_h;
    Eigen::RowVectorXd theta;
};

struct Gradients {
    std::vector<LayerGradients> layers;

    [[nodiscard]] double squared_norm() const;
    [[nodiscard]] bool all_finite() const;
    void scale(double factor);
    /// Flat entry in Network::parameter order.
    [[nodiscard]] double entry(std::size_t i) const;
};

/// Gradient of sum_l alpha_l * mrse(f^(l), y). Layer-l gate parameters collect error from every head j >= l;
/// the stored hidden state is a constant (truncated BPTT of length one).
[[nodiscard]] Gradients backward(const Network& net, const ForwardTrace& trace, const Eigen::VectorXd& y);

/// Plain gradient-descent step: params -= eta * grads.
void apply_update(Network& net, const Gradients& grads, double eta);

/// Stores the batch mean of each layer's new hidden state.
void advance_hidden_state(Network& net, const ForwardTrace& trace);

struct StepDiagnostics {
    std::vector<double> layer_losses;
    double combined_loss = 0.0;  // sum of pre-update alpha times layer loss
    std::vector<double> alpha;   // post-update
    double gradient_norm = 0.0;  // before clipping
    bool clipped = false;
};

/// One pass of the evolving training procedure on a batch (targets must be positive).
/// On a non-finite loss or gradient the network is left untouched and NonFiniteError is thrown.
StepDiagnostics train_step(Network& net, const TrainingBatch& batch);

/// Text checkpoint (JSON) of widths, hyperparameters, matrices, alpha, hidden states
/// and the feature-schema fingerprint.
void save_checkpoint(std::ostream& out, const Network& net, std::uint64_t schema_fingerprint);
/// Throws std::runtime_error when the stored fingerprint differs from `expected_fingerprint`.
[[nodiscard]] Network load_checkpoint(std::istream& in, std::uint64_t expected_fingerprint);

}  // namespace pacache
