// Copyright 2026 The mcdd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mcdd/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "mcdd/error.hpp"
#include "mcdd/rng.hpp"

namespace mcdd {
namespace {

void check_input(const EncoderParams& params, Eigen::Index rows) {
    if (rows != params.w1.cols()) {
        throw ContractError("encoder: input dimension " + std::to_string(rows) + " does not match " +
                            std::to_string(params.w1.cols()));
    }
}

double log_sum_exp(std::span<const double> values) {
    if (values.empty()) {
        return -std::numeric_limits<double>::infinity();
    }
    const double top = *std::max_element(values.begin(), values.end());
    double sum = 0.0;
    for (double v : values) {
        sum += std::exp(v - top);
    }
    return top + std::log(sum);
}

// Copies `values` row-major into a flat vector.
void append_row_major(std::vector<double>& out, const Eigen::MatrixXd& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            out.push_back(m(r, c));
        }
    }
}

std::size_t read_row_major(Eigen::MatrixXd& m, std::span<const double> values, std::size_t offset) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            m(r, c) = values[offset++];
        }
    }
    return offset;
}

double distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return (a - b).norm();
}

} // namespace

std::size_t EncoderWeights::size() const noexcept {
    return static_cast<std::size_t>(w1.size() + b1.size() + w2.size() + b2.size());
}

std::vector<double> EncoderWeights::flatten() const {
    std::vector<double> out;
    out.reserve(size());
    append_row_major(out, w1);
    out.insert(out.end(), b1.data(), b1.data() + b1.size());
    append_row_major(out, w2);
    out.insert(out.end(), b2.data(), b2.data() + b2.size());
    return out;
}

void EncoderWeights::assign_flat(std::span<const double> values) {
    if (values.size() != size()) {
        throw ContractError("assign_flat: expected " + std::to_string(size()) + " values");
    }
    std::size_t offset = read_row_major(w1, values, 0);
    for (Eigen::Index i = 0; i < b1.size(); ++i) {
        b1(i) = values[offset++];
    }
    offset = read_row_major(w2, values, offset);
    for (Eigen::Index i = 0; i < b2.size(); ++i) {
        b2(i) = values[offset++];
    }
}

void EncoderWeights::axpy(double scale, const EncoderWeights& other) {
    w1 += scale * other.w1;
    b1 += scale * other.b1;
    w2 += scale * other.w2;
    b2 += scale * other.b2;
}

bool EncoderWeights::all_finite() const {
    return w1.allFinite() && b1.allFinite() && w2.allFinite() && b2.allFinite();
}

EncoderWeights EncoderWeights::zeros(std::size_t input_dim, std::size_t hidden, std::size_t output) {
    EncoderWeights w;
    const auto d = static_cast<Eigen::Index>(input_dim);
    const auto h = static_cast<Eigen::Index>(hidden);
    const auto o = static_cast<Eigen::Index>(output);
    w.w1 = Eigen::MatrixXd::Zero(h, d);
    w.b1 = Eigen::VectorXd::Zero(h);
    w.w2 = Eigen::MatrixXd::Zero(o, h);
    w.b2 = Eigen::VectorXd::Zero(o);
    return w;
}

EncoderParams EncoderParams::zeros(std::size_t input_dim, std::size_t hidden, std::size_t output,
                                   double lipschitz_target) {
    EncoderParams p;
    static_cast<EncoderWeights&>(p) = EncoderWeights::zeros(input_dim, hidden, output);
    p.lipschitz_target = lipschitz_target;
    return p;
}

EncoderParams EncoderParams::random_init(std::size_t input_dim, std::size_t hidden, std::size_t output,
                                         double lipschitz_target, Rng& rng) {
    if (input_dim == 0 || hidden == 0 || output == 0) {
        throw ContractError("random_init: layer sizes must be positive");
    }
    EncoderParams p = zeros(input_dim, hidden, output, lipschitz_target);
    const auto fill = [&rng](auto& block, double fan_in) {
        const double bound = 1.0 / std::sqrt(fan_in);
        for (Eigen::Index r = 0; r < block.rows(); ++r) {
            for (Eigen::Index c = 0; c < block.cols(); ++c) {
                block(r, c) = bound * (2.0 * rng.uniform() - 1.0);
            }
        }
    };
    fill(p.w1, static_cast<double>(input_dim));
    fill(p.b1, static_cast<double>(input_dim));
    fill(p.w2, static_cast<double>(hidden));
    fill(p.b2, static_cast<double>(hidden));
    return p;
}

Eigen::VectorXd forward(const EncoderParams& params, const Eigen::VectorXd& x) {
    check_input(params, x.size());
    const Eigen::VectorXd hidden = (params.w1 * x + params.b1).cwiseMax(0.0);
    return params.w2 * hidden + params.b2;
}

Eigen::VectorXd forward(const EncoderParams& params, std::span<const double> x) {
    const Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
    return forward(params, v);
}

Embedding set_encode(const EncoderParams& params, const Eigen::MatrixXd& points) {
    if (points.cols() == 0) {
        throw ContractError("set_encode: empty sample set");
    }
    check_input(params, points.rows());
    Eigen::MatrixXd hidden = params.w1 * points;
    hidden.colwise() += params.b1;
    // Averaging before the second (affine) layer gives the same mean of f.
    const Eigen::VectorXd mean_hidden = hidden.cwiseMax(0.0).rowwise().mean();
    return {params.w2 * mean_hidden + params.b2};
}

Embedding set_encode(const EncoderParams& params, const SampleSet& set) {
    return set_encode(params, set.points);
}

double input_jacobian_norm(const EncoderParams& params, const Eigen::VectorXd& x) {
    check_input(params, x.size());
    const Eigen::VectorXd pre = params.w1 * x + params.b1;
    const Eigen::VectorXd active = (pre.array() > 0.0).cast<double>().matrix();
    return (params.w2 * active.asDiagonal() * params.w1).norm();
}

InfoNceTerms info_nce(std::span<const double> positive, std::span<const double> weak,
                      std::span<const double> strong, std::size_t n_sub, std::size_t k) {
    if (n_sub == 0 || k == 0 || positive.size() != n_sub * k || weak.size() != n_sub * k) {
        throw ContractError("info_nce: expected n_sub * k positive and weak-negative distances");
    }
    InfoNceTerms out;
    out.d_positive.assign(positive.size(), 0.0);
    out.d_weak.assign(weak.size(), 0.0);
    out.d_strong.assign(strong.size(), 0.0);

    // ratio_j = lse(P_j) - lse(P_j u WN_j u SN); loss = lse_j ratio_j.
    std::vector<double> log_ratio(n_sub);
    std::vector<double> denom_lse(n_sub);
    std::vector<double> num_lse(n_sub);
    std::vector<double> pooled;
    pooled.reserve(2 * k + strong.size());
    for (std::size_t j = 0; j < n_sub; ++j) {
        const auto p = positive.subspan(j * k, k);
        const auto w = weak.subspan(j * k, k);
        pooled.assign(p.begin(), p.end());
        pooled.insert(pooled.end(), w.begin(), w.end());
        pooled.insert(pooled.end(), strong.begin(), strong.end());
        num_lse[j] = log_sum_exp(p);
        denom_lse[j] = log_sum_exp(pooled);
        log_ratio[j] = num_lse[j] - denom_lse[j];
    }
    out.value = log_sum_exp(log_ratio);

    for (std::size_t j = 0; j < n_sub; ++j) {
        const double weight = std::exp(log_ratio[j] - out.value);
        for (std::size_t i = 0; i < k; ++i) {
            const double p = positive[j * k + i];
            out.d_positive[j * k + i] = weight * (std::exp(p - num_lse[j]) - std::exp(p - denom_lse[j]));
            out.d_weak[j * k + i] = -weight * std::exp(weak[j * k + i] - denom_lse[j]);
        }
        for (std::size_t i = 0; i < strong.size(); ++i) {
            out.d_strong[i] -= weight * std::exp(strong[i] - denom_lse[j]);
        }
    }
    return out;
}

LossResult loss_and_grads(const EncoderParams& params, const PairBatch& batch, double lambda,
                          const Eigen::MatrixXd& penalty_points) {
    if (!(lambda >= 0.0)) {
        throw ContractError("loss_and_grads: lambda must be non-negative");
    }
    const std::size_t n_pos = batch.positives.size();
    const std::size_t n_weak = batch.weak_negatives.size();
    const std::size_t n_strong = batch.strong_negatives.size();
    if (n_pos != batch.n_sub * batch.k || n_weak != batch.n_sub * batch.k) {
        throw ContractError("loss_and_grads: pair counts do not match n_sub * k");
    }

    // Gather every set of every pair; set 2q is pair q's first member.
    std::vector<const SampleSet*> sets;
    sets.reserve(2 * (n_pos + n_weak + n_strong));
    for (const auto* group : {&batch.positives, &batch.weak_negatives, &batch.strong_negatives}) {
        for (const auto& pair : *group) {
            sets.push_back(&pair.first);
            sets.push_back(&pair.second);
        }
    }
    const auto n_sets = static_cast<Eigen::Index>(sets.size());
    const Eigen::Index hidden = params.w1.rows();

    // Mean hidden activation per set; the second layer is affine, so the set
    // embedding is w2 * mean_hidden + b2.
    Eigen::MatrixXd mean_hidden(hidden, n_sets);
    std::vector<Eigen::MatrixXd> pre_activations(sets.size());
    for (Eigen::Index s = 0; s < n_sets; ++s) {
        const auto& pts = sets[s]->points;
        if (pts.cols() == 0) {
            throw ContractError("loss_and_grads: empty sample set in batch");
        }
        check_input(params, pts.rows());
        Eigen::MatrixXd pre = params.w1 * pts;
        pre.colwise() += params.b1;
        mean_hidden.col(s) = pre.cwiseMax(0.0).rowwise().mean();
        pre_activations[s] = std::move(pre);
    }
    Eigen::MatrixXd embeddings = params.w2 * mean_hidden;
    embeddings.colwise() += params.b2;

    LossResult result;
    std::vector<double> all_mcds(sets.size() / 2);
    for (std::size_t q = 0; q < all_mcds.size(); ++q) {
        all_mcds[q] = distance(embeddings.col(2 * q), embeddings.col(2 * q + 1));
    }
    result.positive_mcds.assign(all_mcds.begin(), all_mcds.begin() + n_pos);
    result.weak_mcds.assign(all_mcds.begin() + n_pos, all_mcds.begin() + n_pos + n_weak);
    result.strong_mcds.assign(all_mcds.begin() + n_pos + n_weak, all_mcds.end());

    const InfoNceTerms nce =
        info_nce(result.positive_mcds, result.weak_mcds, result.strong_mcds, batch.n_sub, batch.k);
    result.contrastive = nce.value;

    // dL/dh per set.
    Eigen::MatrixXd d_embed = Eigen::MatrixXd::Zero(embeddings.rows(), n_sets);
    for (std::size_t q = 0; q < all_mcds.size(); ++q) {
        double g = 0.0;
        if (q < n_pos) {
            g = nce.d_positive[q];
        } else if (q < n_pos + n_weak) {
            g = nce.d_weak[q - n_pos];
        } else {
            g = nce.d_strong[q - n_pos - n_weak];
        }
        if (all_mcds[q] == 0.0 || g == 0.0) {
            continue; // subgradient 0 at coincident embeddings
        }
        const Eigen::VectorXd u =
            (embeddings.col(2 * q) - embeddings.col(2 * q + 1)) * (g / all_mcds[q]);
        d_embed.col(2 * q) += u;
        d_embed.col(2 * q + 1) -= u;
    }

    EncoderWeights grads = EncoderWeights::zeros(params.input_dim(), params.hidden_dim(), params.output_dim());
    grads.w2 = d_embed * mean_hidden.transpose();
    grads.b2 = d_embed.rowwise().sum();
    const Eigen::MatrixXd d_mean_hidden = params.w2.transpose() * d_embed;
    for (Eigen::Index s = 0; s < n_sets; ++s) {
        const auto& pre = pre_activations[s];
        const double inv_m = 1.0 / static_cast<double>(pre.cols());
        const Eigen::VectorXd upstream = d_mean_hidden.col(s) * inv_m;
        Eigen::MatrixXd d_pre = (pre.array() > 0.0).cast<double>().matrix();
        d_pre = upstream.asDiagonal() * d_pre;
        grads.w1.noalias() += d_pre * sets[s]->points.transpose();
        grads.b1 += d_pre.rowwise().sum();
    }

    // Gradient penalty. The Jacobian is piecewise constant in x, so its
    // derivative with respect to the weights is exact away from kinks.
    if (lambda > 0.0) {
        check_input(params, penalty_points.rows());
        for (Eigen::Index i = 0; i < penalty_points.cols(); ++i) {
            const Eigen::VectorXd pre = params.w1 * penalty_points.col(i) + params.b1;
            const Eigen::VectorXd active = (pre.array() > 0.0).cast<double>().matrix();
            const Eigen::MatrixXd masked_w1 = active.asDiagonal() * params.w1; // hidden x d
            const Eigen::MatrixXd jac = params.w2 * masked_w1;                 // out x d
            const double norm = jac.norm();
            const double gap = norm - params.lipschitz_target;
            result.penalty += lambda * gap * gap;
            if (norm == 0.0) {
                continue;
            }
            const double coeff = 2.0 * lambda * gap / norm;
            grads.w2.noalias() += coeff * jac * masked_w1.transpose();
            grads.w1.noalias() += coeff * (active.asDiagonal() * (params.w2.transpose() * jac));
        }
    }

    result.loss = result.contrastive + result.penalty;
    if (!std::isfinite(result.loss) || !grads.all_finite()) {
        std::ostringstream msg;
        msg << "loss_and_grads: non-finite objective (contrastive=" << result.contrastive
            << ", penalty=" << result.penalty << ", max distance="
            << (all_mcds.empty() ? 0.0 : *std::max_element(all_mcds.begin(), all_mcds.end()))
            << ", weights finite=" << (params.all_finite() ? "yes" : "no") << ")";
        throw NumericalError(msg.str());
    }
    result.grads = std::move(grads);
    return result;
}

nlohmann::json to_json(const Checkpoint& checkpoint) {
    const auto& p = checkpoint.params;
    std::vector<double> w1;
    std::vector<double> w2;
    append_row_major(w1, p.w1);
    append_row_major(w2, p.w2);
    nlohmann::json doc;
    doc["format"] = "mcdd-encoder";
    doc["version"] = 1;
    doc["input_dim"] = p.input_dim();
    doc["hidden_dim"] = p.hidden_dim();
    doc["output_dim"] = p.output_dim();
    doc["lipschitz_target"] = p.lipschitz_target;
    doc["seed"] = checkpoint.seed;
    doc["hyperparameters"] = checkpoint.hyperparameters;
    doc["w1"] = w1;
    doc["b1"] = std::vector<double>(p.b1.data(), p.b1.data() + p.b1.size());
    doc["w2"] = w2;
    doc["b2"] = std::vector<double>(p.b2.data(), p.b2.data() + p.b2.size());
    return doc;
}

Checkpoint checkpoint_from_json(const nlohmann::json& doc) {
    try {
        if (doc.at("format").get<std::string>() != "mcdd-encoder" || doc.at("version").get<int>() != 1) {
            throw SchemaError("checkpoint: unsupported format or version");
        }
        Checkpoint out;
        const auto d = doc.at("input_dim").get<std::size_t>();
        const auto h = doc.at("hidden_dim").get<std::size_t>();
        const auto o = doc.at("output_dim").get<std::size_t>();
        out.params = EncoderParams::zeros(d, h, o, doc.at("lipschitz_target").get<double>());
        out.seed = doc.at("seed").get<std::uint64_t>();
        out.hyperparameters = doc.value("hyperparameters", nlohmann::json::object());

        std::vector<double> flat;
        for (const char* key : {"w1", "b1", "w2", "b2"}) {
            const auto part = doc.at(key).get<std::vector<double>>();
            flat.insert(flat.end(), part.begin(), part.end());
        }
        if (flat.size() != out.params.size()) {
            throw SchemaError("checkpoint: weight arrays do not match the declared shapes");
        }
        out.params.assign_flat(flat);
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("checkpoint: ") + e.what());
    }
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
    std::ofstream out(path);
    if (!out) {
        throw ContractError("save_checkpoint: cannot open " + path.string());
    }
    out << to_json(checkpoint).dump(1) << '\n';
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ContractError("load_checkpoint: cannot open " + path.string());
    }
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("checkpoint: ") + e.what());
    }
    return checkpoint_from_json(doc);
}

} // namespace mcdd
