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

#include "pacache/evonet.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "pacache/random.hpp"

namespace pacache {

namespace {

struct Block {
    double* data;
    std::size_t size;
};

// Parameter order shared by Network::parameter and Gradients::entry.
template <typename L>
std::array<Block, 10> blocks_of(L& l) {
    auto b = [](auto& m) { return Block{const_cast<double*>(m.data()), static_cast<std::size_t>(m.size())}; };
    return {b(l.w_r), b(l.w_z), b(l.w_h), b(l.u_r), b(l.u_z), b(l.u_h), b(l.b_r), b(l.b_z), b(l.b_h), b(l.theta)};
}

template <typename Layers>
double* locate(Layers& layers, std::size_t i) {
    for (auto& l : layers) {
        for (const Block& blk : blocks_of(l)) {
            if (i < blk.size) return blk.data + i;
            i -= blk.size;
        }
    }
    throw std::out_of_range("parameter index out of range");
}

Eigen::MatrixXd glorot(std::size_t rows, std::size_t cols, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = uniform_in(rng, -limit, limit);
    return m;
}

Eigen::MatrixXd sigmoid(const Eigen::MatrixXd& pre) {
    return (1.0 + (-pre.array()).exp()).inverse().matrix();
}

}  // namespace

std::vector<std::size_t> geometric_widths(std::size_t depth, std::size_t first, std::size_t last) {
    if (depth == 0 || first == 0 || last == 0) throw std::invalid_argument("depth and widths must be positive");
    std::vector<std::size_t> out(depth);
    for (std::size_t l = 0; l < depth; ++l) {
        const double frac = depth == 1 ? 0.0 : static_cast<double>(l) / static_cast<double>(depth - 1);
        const double w = static_cast<double>(first) * std::pow(static_cast<double>(last) / first, frac);
        out[l] = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(w)));
    }
    return out;
}

Network::Network(std::size_t input_dim, std::span<const std::size_t> widths, const Hyperparameters& hp,
                 std::uint64_t seed)
    : input_dim_(input_dim), hp_(hp) {
    if (widths.empty()) throw std::invalid_argument("network needs at least one layer");
    if (input_dim == 0) throw std::invalid_argument("input dimension must be positive");
    Rng rng(seed);
    std::size_t n_in = input_dim;
    for (std::size_t n : widths) {
        if (n == 0) throw std::invalid_argument("layer widths must be positive");
        GruLayer l;
        l.w_r = glorot(n, n_in, n_in, n, rng);
        l.w_z = glorot(n, n_in, n_in, n, rng);
        l.w_h = glorot(n, n_in, n_in, n, rng);
        l.u_r = glorot(n, n, n, n, rng);
        l.u_z = glorot(n, n, n, n, rng);
        l.u_h = glorot(n, n, n, n, rng);
        l.b_r = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
        l.b_z = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
        l.b_h = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
        l.theta = glorot(1, n, n, 1, rng);
        l.hidden = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
        layers_.push_back(std::move(l));
        n_in = n;
    }
    alpha_.assign(layers_.size(), 1.0 / static_cast<double>(layers_.size()));
}

Network init_network(std::size_t input_dim, std::span<const std::size_t> widths, const Hyperparameters& hp,
                     std::uint64_t seed) {
    return Network(input_dim, widths, hp, seed);
}

GruLayer& Network::mutable_layer(std::size_t l) {
    ++version_;
    return layers_.at(l);
}

void Network::set_alpha(std::vector<double> alpha) {
    if (alpha.size() != layers_.size()) throw DimensionError("alpha length must equal depth");
    alpha_ = std::move(alpha);
    ++version_;
}

void Network::set_hyperparameters(const Hyperparameters& hp) { hp_ = hp; }

void Network::reset_hidden_state() {
    for (auto& l : layers_) l.hidden.setZero();
    ++version_;
}

std::size_t Network::parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers_)
        for (const Block& b : blocks_of(l)) n += b.size;
    return n;
}

double Network::parameter(std::size_t i) const { return *locate(layers_, i); }

double* Network::parameter_ptr(std::size_t i) { return locate(layers_, i); }

void Network::set_parameter(std::size_t i, double v) {
    *parameter_ptr(i) = v;
    ++version_;
}

ForwardTrace forward(const Network& net, const Eigen::MatrixXd& x) {
    if (static_cast<std::size_t>(x.cols()) != net.input_dim()) {
        throw DimensionError("input has " + std::to_string(x.cols()) + " columns, network expects " +
                             std::to_string(net.input_dim()));
    }
    ForwardTrace tr;
    tr.input = x;
    tr.network_version = net.version();
    tr.combined = Eigen::VectorXd::Zero(x.rows());
    tr.layers.reserve(net.depth());

    const Eigen::MatrixXd* a = &tr.input;
    for (std::size_t l = 0; l < net.depth(); ++l) {
        const GruLayer& p = net.layers()[l];
        const Eigen::VectorXd& hp = p.hidden;
        LayerTrace lt;

        Eigen::MatrixXd pre_r = *a * p.w_r.transpose();
        pre_r.rowwise() += (p.u_r * hp + p.b_r).transpose();
        lt.r = sigmoid(pre_r);

        Eigen::MatrixXd pre_z = *a * p.w_z.transpose();
        pre_z.rowwise() += (p.u_z * hp + p.b_z).transpose();
        lt.z = sigmoid(pre_z);

        const Eigen::MatrixXd reset_hidden = (lt.r.array().rowwise() * hp.transpose().array()).matrix();
        Eigen::MatrixXd pre_c = *a * p.w_h.transpose() + reset_hidden * p.u_h.transpose();
        pre_c.rowwise() += p.b_h.transpose();
        lt.candidate = pre_c.array().tanh().matrix();

        lt.h = (lt.z.array().rowwise() * hp.transpose().array() + (1.0 - lt.z.array()) * lt.candidate.array())
                   .matrix();
        lt.prediction = lt.h * p.theta.transpose();
        tr.combined += net.alpha()[l] * lt.prediction;

        tr.layers.push_back(std::move(lt));
        a = &tr.layers.back().h;
    }
    return tr;
}

Eigen::VectorXd predict(const Network& net, const Eigen::MatrixXd& x) { return forward(net, x).combined; }

double mrse_loss(const Eigen::VectorXd& f, const Eigen::VectorXd& y) {
    if (f.size() != y.size()) throw DimensionError("prediction and target lengths differ");
    if (y.size() == 0) throw DimensionError("empty batch");
    if ((y.array() <= 0.0).any()) throw std::domain_error("relative error needs strictly positive targets");
    return ((f.array() / y.array()) - 1.0).square().mean();
}

std::vector<double> hedge_update(std::span<const double> alpha, std::span<const double> losses, double beta,
                                 double kappa, double zeta) {
    if (alpha.size() != losses.size()) throw DimensionError("alpha and losses lengths differ");
    const double floor = zeta / static_cast<double>(alpha.size());
    std::vector<double> out(alpha.size());
    double total = 0.0;
    for (std::size_t l = 0; l < alpha.size(); ++l) {
        out[l] = std::max(alpha[l] * std::pow(beta, std::min(losses[l], kappa)), floor);
        total += out[l];
    }
    for (double& a : out) a /= total;
    return out;
}

double Gradients::squared_norm() const {
    double s = 0.0;
    for (const auto& l : layers)
        for (const Block& b : blocks_of(l))
            for (std::size_t i = 0; i < b.size; ++i) s += b.data[i] * b.data[i];
    return s;
}

bool Gradients::all_finite() const {
    for (const auto& l : layers)
        for (const Block& b : blocks_of(l))
            for (std::size_t i = 0; i < b.size; ++i)
                if (!std::isfinite(b.data[i])) return false;
    return true;
}

void Gradients::scale(double factor) {
    for (auto& l : layers)
        for (const Block& b : blocks_of(l))
            for (std::size_t i = 0; i < b.size; ++i) b.data[i] *= factor;
}

double Gradients::entry(std::size_t i) const { return *locate(layers, i); }

Gradients backward(const Network& net, const ForwardTrace& trace, const Eigen::VectorXd& y) {
    if (trace.network_version != net.version()) throw StaleTraceError("network changed since forward pass");
    if (trace.layers.size() != net.depth()) throw StaleTraceError("trace depth does not match network");
    const Eigen::Index m = trace.input.rows();
    if (y.size() != m) throw DimensionError("target length does not match batch");

    Gradients g;
    g.layers.resize(net.depth());
    Eigen::MatrixXd carry;  // dJ/dh^(l) flowing down from layer l+1

    for (std::size_t li = net.depth(); li-- > 0;) {
        const GruLayer& p = net.layers()[li];
        const LayerTrace& lt = trace.layers[li];
        const Eigen::MatrixXd& a = li == 0 ? trace.input : trace.layers[li - 1].h;
        const Eigen::RowVectorXd hp = p.hidden.transpose();
        LayerGradients& lg = g.layers[li];

        // d(alpha_l * mrse)/df = alpha_l * (2/m) (f/y - 1) / y
        const Eigen::VectorXd head =
            (net.alpha()[li] * 2.0 / static_cast<double>(m)) *
            ((lt.prediction.array() / y.array() - 1.0) / y.array()).matrix();
        lg.theta = head.transpose() * lt.h;

        Eigen::MatrixXd dh = head * p.theta;
        if (carry.size() != 0) dh += carry;

        const Eigen::ArrayXXd hp_rows = hp.replicate(m, 1).array();
        const Eigen::MatrixXd dpre_c =
            (dh.array() * (1.0 - lt.z.array()) * (1.0 - lt.candidate.array().square())).matrix();
        const Eigen::MatrixXd dpre_z =
            (dh.array() * (hp_rows - lt.candidate.array()) * lt.z.array() * (1.0 - lt.z.array())).matrix();
        const Eigen::MatrixXd reset_hidden = (lt.r.array() * hp_rows).matrix();
        const Eigen::MatrixXd dpre_r =
            ((dpre_c * p.u_h).array() * hp_rows * lt.r.array() * (1.0 - lt.r.array())).matrix();

        lg.w_h = dpre_c.transpose() * a;
        lg.u_h = dpre_c.transpose() * reset_hidden;
        lg.b_h = dpre_c.colwise().sum().transpose();

        lg.b_z = dpre_z.colwise().sum().transpose();
        lg.w_z = dpre_z.transpose() * a;
        lg.u_z = lg.b_z * hp;

        lg.b_r = dpre_r.colwise().sum().transpose();
        lg.w_r = dpre_r.transpose() * a;
        lg.u_r = lg.b_r * hp;

        if (li > 0) carry = dpre_r * p.w_r + dpre_z * p.w_z + dpre_c * p.w_h;
    }
    return g;
}

void apply_update(Network& net, const Gradients& grads, double eta) {
    if (grads.layers.size() != net.depth()) throw DimensionError("gradient depth does not match network");
    for (std::size_t l = 0; l < net.depth(); ++l) {
        GruLayer& p = net.mutable_layer(l);
        const LayerGradients& d = grads.layers[l];
        p.w_r -= eta * d.w_r;
        p.w_z -= eta * d.w_z;
        p.w_h -= eta * d.w_h;
        p.u_r -= eta * d.u_r;
        p.u_z -= eta * d.u_z;
        p.u_h -= eta * d.u_h;
        p.b_r -= eta * d.b_r;
        p.b_z -= eta * d.b_z;
        p.b_h -= eta * d.b_h;
        p.theta -= eta * d.theta;
    }
}

void advance_hidden_state(Network& net, const ForwardTrace& trace) {
    if (trace.layers.size() != net.depth()) throw StaleTraceError("trace depth does not match network");
    for (std::size_t l = 0; l < net.depth(); ++l) {
        net.mutable_layer(l).hidden = trace.layers[l].h.colwise().mean().transpose();
    }
}

StepDiagnostics train_step(Network& net, const TrainingBatch& batch) {
    if (batch.x.rows() != batch.y.size() || batch.x.rows() == 0)
        throw DimensionError("batch features and targets disagree or batch is empty");
    const Hyperparameters& hp = net.hyperparameters();
    const ForwardTrace trace = forward(net, batch.x);

    StepDiagnostics diag;
    diag.layer_losses.resize(net.depth());
    for (std::size_t l = 0; l < net.depth(); ++l) {
        const double loss = mrse_loss(trace.layers[l].prediction, batch.y);
        if (!std::isfinite(loss)) throw NonFiniteError(l + 1, "non-finite loss at layer " + std::to_string(l + 1));
        diag.layer_losses[l] = loss;
        diag.combined_loss += net.alpha()[l] * loss;
    }

    Gradients grads = backward(net, trace, batch.y);
    if (!grads.all_finite()) {
        for (std::size_t l = 0; l < net.depth(); ++l) {
            Gradients single;
            single.layers = {grads.layers[l]};
            if (!single.all_finite())
                throw NonFiniteError(l + 1, "non-finite gradient at layer " + std::to_string(l + 1));
        }
    }
    diag.gradient_norm = std::sqrt(grads.squared_norm());
    if (hp.grad_clip > 0.0 && diag.gradient_norm > hp.grad_clip) {
        grads.scale(hp.grad_clip / diag.gradient_norm);
        diag.clipped = true;
    }

    if (hp.eta != 0.0) apply_update(net, grads, hp.eta);
    if (!hp.freeze_alpha) net.set_alpha(hedge_update(net.alpha(), diag.layer_losses, hp.beta, hp.kappa, hp.zeta));
    if (hp.recurrent) advance_hidden_state(net, trace);
    diag.alpha = net.alpha();
    return diag;
}

}  // namespace pacache
