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

#include <algorithm>
#include <cmath>

#include "pacache/verify/oracles.hpp"

namespace pacache::verify {

namespace {

double sigm(double v) { return 1.0 / (1.0 + std::exp(-v)); }

}  // namespace

NaiveForward naive_forward(const Network& net, const Eigen::MatrixXd& x) {
    if (static_cast<std::size_t>(x.cols()) != net.input_dim()) throw DimensionError("input width mismatch");
    const auto m = static_cast<std::size_t>(x.rows());
    NaiveForward out;
    out.combined.assign(m, 0.0);
    for (std::size_t row = 0; row < m; ++row) {
        std::vector<double> below(static_cast<std::size_t>(x.cols()));
        for (std::size_t j = 0; j < below.size(); ++j) below[j] = x(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(j));
        for (std::size_t l = 0; l < net.depth(); ++l) {
            const GruLayer& g = net.layers()[l];
            const std::size_t n = g.width();
            const std::size_t n_in = below.size();
            std::vector<double> r(n), z(n), cand(n), h(n);
            for (std::size_t i = 0; i < n; ++i) {
                const auto I = static_cast<Eigen::Index>(i);
                double ar = g.b_r[I], az = g.b_z[I];
                for (std::size_t j = 0; j < n_in; ++j) {
                    ar += g.w_r(I, static_cast<Eigen::Index>(j)) * below[j];
                    az += g.w_z(I, static_cast<Eigen::Index>(j)) * below[j];
                }
                for (std::size_t j = 0; j < n; ++j) {
                    ar += g.u_r(I, static_cast<Eigen::Index>(j)) * g.hidden[static_cast<Eigen::Index>(j)];
                    az += g.u_z(I, static_cast<Eigen::Index>(j)) * g.hidden[static_cast<Eigen::Index>(j)];
                }
                r[i] = sigm(ar);
                z[i] = sigm(az);
            }
            for (std::size_t i = 0; i < n; ++i) {
                const auto I = static_cast<Eigen::Index>(i);
                double ac = g.b_h[I];
                for (std::size_t j = 0; j < n_in; ++j) ac += g.w_h(I, static_cast<Eigen::Index>(j)) * below[j];
                for (std::size_t j = 0; j < n; ++j) {
                    const auto J = static_cast<Eigen::Index>(j);
                    ac += g.u_h(I, J) * (r[j] * g.hidden[J]);
                }
                cand[i] = std::tanh(ac);
                h[i] = z[i] * g.hidden[I] + (1.0 - z[i]) * cand[i];
            }
            double f = 0.0;
            for (std::size_t i = 0; i < n; ++i) f += g.theta[static_cast<Eigen::Index>(i)] * h[i];
            if (out.layer_predictions.size() <= l) out.layer_predictions.emplace_back(m, 0.0);
            out.layer_predictions[l][row] = f;
            out.combined[row] += net.alpha()[l] * f;
            below = std::move(h);
        }
    }
    return out;
}

double naive_combined_loss(const Network& net, const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    const NaiveForward fw = naive_forward(net, x);
    double total = 0.0;
    for (std::size_t l = 0; l < net.depth(); ++l) {
        double s = 0.0;
        for (std::size_t i = 0; i < fw.combined.size(); ++i) {
            const double e = fw.layer_predictions[l][i] / y[static_cast<Eigen::Index>(i)] - 1.0;
            s += e * e;
        }
        total += net.alpha()[l] * s / static_cast<double>(fw.combined.size());
    }
    return total;
}

double finite_difference(Network& net, std::size_t i, const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                         double step) {
    const double keep = net.parameter(i);
    net.set_parameter(i, keep + step);
    const double up = naive_combined_loss(net, x, y);
    net.set_parameter(i, keep - step);
    const double down = naive_combined_loss(net, x, y);
    net.set_parameter(i, keep);
    return (up - down) / (2.0 * step);
}

double relative_error(double analytic, double numeric, double floor) {
    return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
}

}  // namespace pacache::verify
