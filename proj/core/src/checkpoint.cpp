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

#include <istream>
#include <ostream>
#include <string>

#include <json.hpp>

#include "pacache/evonet.hpp"

namespace pacache {

namespace {

using nlohmann::json;

constexpr int kCheckpointVersion = 1;

json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(rows)}};
}

Eigen::MatrixXd matrix_from_json(const json& j, Eigen::Index rows, Eigen::Index cols, const char* name) {
    if (j.at("rows").get<Eigen::Index>() != rows || j.at("cols").get<Eigen::Index>() != cols)
        throw std::runtime_error(std::string("checkpoint shape mismatch for ") + name);
    Eigen::MatrixXd m(rows, cols);
    const auto& data = j.at("data");
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = data.at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(k)).get<double>();
    return m;
}

}  // namespace

void save_checkpoint(std::ostream& out, const Network& net, std::uint64_t schema_fingerprint) {
    const auto& hp = net.hyperparameters();
    json doc;
    doc["format"] = "pacache-evonet";
    doc["version"] = kCheckpointVersion;
    doc["schema_fingerprint"] = std::to_string(schema_fingerprint);
    doc["input_dim"] = net.input_dim();
    doc["hyperparameters"] = {{"beta", hp.beta},       {"kappa", hp.kappa},         {"zeta", hp.zeta},
                              {"eta", hp.eta},         {"grad_clip", hp.grad_clip}, {"recurrent", hp.recurrent},
                              {"freeze_alpha", hp.freeze_alpha}};
    doc["alpha"] = net.alpha();
    json layers = json::array();
    for (const auto& l : net.layers()) {
        layers.push_back({{"width", l.width()},
                          {"w_r", matrix_to_json(l.w_r)},
                          {"w_z", matrix_to_json(l.w_z)},
                          {"w_h", matrix_to_json(l.w_h)},
                          {"u_r", matrix_to_json(l.u_r)},
                          {"u_z", matrix_to_json(l.u_z)},
                          {"u_h", matrix_to_json(l.u_h)},
                          {"b_r", matrix_to_json(l.b_r)},
                          {"b_z", matrix_to_json(l.b_z)},
                          {"b_h", matrix_to_json(l.b_h)},
                          {"theta", matrix_to_json(l.theta)},
                          {"hidden", matrix_to_json(l.hidden)}});
    }
    doc["layers"] = std::move(layers);
    out << doc.dump(1) << '\n';
    if (!out) throw std::runtime_error("checkpoint write failed");
}

Network load_checkpoint(std::istream& in, std::uint64_t expected_fingerprint) {
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("malformed checkpoint: ") + e.what());
    }
    try {
        if (doc.at("format").get<std::string>() != "pacache-evonet" || doc.at("version").get<int>() != kCheckpointVersion)
            throw std::runtime_error("unsupported checkpoint format");
        const auto stored = std::stoull(doc.at("schema_fingerprint").get<std::string>());
        if (stored != expected_fingerprint) {
            throw std::runtime_error("checkpoint feature-schema fingerprint " + std::to_string(stored) +
                                     " does not match " + std::to_string(expected_fingerprint));
        }
        const auto& h = doc.at("hyperparameters");
        Hyperparameters hp;
        hp.beta = h.at("beta").get<double>();
        hp.kappa = h.at("kappa").get<double>();
        hp.zeta = h.at("zeta").get<double>();
        hp.eta = h.at("eta").get<double>();
        hp.grad_clip = h.at("grad_clip").get<double>();
        hp.recurrent = h.at("recurrent").get<bool>();
        hp.freeze_alpha = h.at("freeze_alpha").get<bool>();

        std::vector<std::size_t> widths;
        for (const auto& l : doc.at("layers")) widths.push_back(l.at("width").get<std::size_t>());
        const auto input_dim = doc.at("input_dim").get<std::size_t>();
        Network net(input_dim, widths, hp, 0);

        std::size_t n_in = input_dim;
        for (std::size_t i = 0; i < widths.size(); ++i) {
            const auto& lj = doc.at("layers").at(i);
            const auto n = static_cast<Eigen::Index>(widths[i]);
            const auto ni = static_cast<Eigen::Index>(n_in);
            GruLayer& l = net.mutable_layer(i);
            l.w_r = matrix_from_json(lj.at("w_r"), n, ni, "w_r");
            l.w_z = matrix_from_json(lj.at("w_z"), n, ni, "w_z");
            l.w_h = matrix_from_json(lj.at("w_h"), n, ni, "w_h");
            l.u_r = matrix_from_json(lj.at("u_r"), n, n, "u_r");
            l.u_z = matrix_from_json(lj.at("u_z"), n, n, "u_z");
            l.u_h = matrix_from_json(lj.at("u_h"), n, n, "u_h");
            l.b_r = matrix_from_json(lj.at("b_r"), n, 1, "b_r");
            l.b_z = matrix_from_json(lj.at("b_z"), n, 1, "b_z");
            l.b_h = matrix_from_json(lj.at("b_h"), n, 1, "b_h");
            l.theta = matrix_from_json(lj.at("theta"), 1, n, "theta");
            l.hidden = matrix_from_json(lj.at("hidden"), n, 1, "hidden");
            n_in = widths[i];
        }
        net.set_alpha(doc.at("alpha").get<std::vector<double>>());
        return net;
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("malformed checkpoint: ") + e.what());
    }
}

}  // namespace pacache
