#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "carbcast/errors.hpp"
#include "carbcast/rnn.hpp"
#include "carbcast/rng.hpp"

namespace carbcast {

struct TrainingSample {
    Eigen::MatrixXd window; // n1 rows (time steps) x input_dim columns
    double target = 0.0;
};

namespace detail {

struct CellTrace {
    std::vector<Eigen::VectorXd> inputs;
    std::vector<Eigen::VectorXd> h; // h[0] is the zero initial state
    // LSTM
    std::vector<Eigen::VectorXd> c; // c[0] is the zero initial state
    std::vector<Eigen::ArrayXd> gate_i, gate_f, gate_o, cand_g, tanh_c;
    // GRU
    std::vector<Eigen::ArrayXd> reset, update, cand_n, recurrent_pre;
};

inline CellTrace forward_trace(const RnnWeights& w, const Eigen::MatrixXd& window) {
    CellTrace trace;
    const auto steps = static_cast<std::size_t>(window.rows());
    trace.h.push_back(Eigen::VectorXd::Zero(w.hidden_dim));
    if (w.cell == CellKind::LSTM) trace.c.push_back(Eigen::VectorXd::Zero(w.hidden_dim));

    for (std::size_t t = 0; t < steps; ++t) {
        const Eigen::VectorXd x = window.row(static_cast<Eigen::Index>(t)).transpose();
        trace.inputs.push_back(x);
        const Eigen::VectorXd& h_prev = trace.h.back();
        if (w.cell == CellKind::LSTM) {
            namespace idx = lstm_idx;
            const Eigen::VectorXd& c_prev = trace.c.back();
            const Eigen::ArrayXd gi = sigmoid(
                (w.at(idx::WxInput).transpose() * x + w.at(idx::WhInput).transpose() * h_prev +
                 w.at(idx::BInput).col(0)).array());
            const Eigen::ArrayXd gf = sigmoid(
                (w.at(idx::WxForget).transpose() * x + w.at(idx::WhForget).transpose() * h_prev +
                 w.at(idx::BForget).col(0)).array());
            const Eigen::ArrayXd go = sigmoid(
                (w.at(idx::WxOutput).transpose() * x + w.at(idx::WhOutput).transpose() * h_prev +
                 w.at(idx::BOutput).col(0)).array());
            const Eigen::ArrayXd gg =
                ((w.at(idx::WxCand).transpose() * x + w.at(idx::WhCand).transpose() * h_prev +
                  w.at(idx::BCand).col(0)).array()).tanh();
            const Eigen::ArrayXd c = gf * c_prev.array() + gi * gg;
            const Eigen::ArrayXd tc = c.tanh();
            trace.gate_i.push_back(gi);
            trace.gate_f.push_back(gf);
            trace.gate_o.push_back(go);
            trace.cand_g.push_back(gg);
            trace.tanh_c.push_back(tc);
            trace.c.push_back(c.matrix());
            trace.h.push_back((go * tc).matrix());
        } else {
            namespace idx = gru_idx;
            const Eigen::ArrayXd r = sigmoid(
                (w.at(idx::WxReset) * x + w.at(idx::BxReset).col(0) + w.at(idx::WhReset) * h_prev +
                 w.at(idx::BhReset).col(0)).array());
            const Eigen::ArrayXd z = sigmoid(
                (w.at(idx::WxUpdate) * x + w.at(idx::BxUpdate).col(0) +
                 w.at(idx::WhUpdate) * h_prev + w.at(idx::BhUpdate).col(0)).array());
            const Eigen::ArrayXd pre = (w.at(idx::WhCand) * h_prev + w.at(idx::BhCand).col(0)).array();
            const Eigen::ArrayXd n =
                ((w.at(idx::WxCand) * x + w.at(idx::BxCand).col(0)).array() + r * pre).tanh();
            trace.reset.push_back(r);
            trace.update.push_back(z);
            trace.cand_n.push_back(n);
            trace.recurrent_pre.push_back(pre);
            trace.h.push_back(((1.0 - z) * n + z * h_prev.array()).matrix());
        }
    }
    return trace;
}

/// Accumulates dLoss/dTensor for one sample into `grads`, given the
/// gradient at the final hidden state.
inline void backward_trace(const RnnWeights& w, const CellTrace& trace,
                           const Eigen::VectorXd& dh_final,
                           std::vector<Eigen::MatrixXd>& grads) {
    const std::size_t steps = trace.inputs.size();
    Eigen::VectorXd dh = dh_final;
    if (w.cell == CellKind::LSTM) {
        namespace idx = lstm_idx;
        Eigen::VectorXd dc = Eigen::VectorXd::Zero(w.hidden_dim);
        for (std::size_t t = steps; t-- > 0;) {
            const Eigen::VectorXd& x = trace.inputs[t];
            const Eigen::VectorXd& h_prev = trace.h[t];
            const Eigen::VectorXd& c_prev = trace.c[t];
            const Eigen::ArrayXd& gi = trace.gate_i[t];
            const Eigen::ArrayXd& gf = trace.gate_f[t];
            const Eigen::ArrayXd& go = trace.gate_o[t];
            const Eigen::ArrayXd& gg = trace.cand_g[t];
            const Eigen::ArrayXd& tc = trace.tanh_c[t];

            const Eigen::ArrayXd da_o = dh.array() * tc * go * (1.0 - go);
            const Eigen::ArrayXd dc_total = dc.array() + dh.array() * go * (1.0 - tc * tc);
            const Eigen::ArrayXd da_f = dc_total * c_prev.array() * gf * (1.0 - gf);
            const Eigen::ArrayXd da_i = dc_total * gg * gi * (1.0 - gi);
            const Eigen::ArrayXd da_g = dc_total * gi * (1.0 - gg * gg);

            grads[idx::WxInput] += x * da_i.matrix().transpose();
            grads[idx::WxForget] += x * da_f.matrix().transpose();
            grads[idx::WxOutput] += x * da_o.matrix().transpose();
            grads[idx::WxCand] += x * da_g.matrix().transpose();
            grads[idx::WhInput] += h_prev * da_i.matrix().transpose();
            grads[idx::WhForget] += h_prev * da_f.matrix().transpose();
            grads[idx::WhOutput] += h_prev * da_o.matrix().transpose();
            grads[idx::WhCand] += h_prev * da_g.matrix().transpose();
            grads[idx::BInput].col(0) += da_i.matrix();
            grads[idx::BForget].col(0) += da_f.matrix();
            grads[idx::BOutput].col(0) += da_o.matrix();
            grads[idx::BCand].col(0) += da_g.matrix();

            dh = w.at(idx::WhInput) * da_i.matrix() + w.at(idx::WhForget) * da_f.matrix() +
                 w.at(idx::WhOutput) * da_o.matrix() + w.at(idx::WhCand) * da_g.matrix();
            dc = (dc_total * gf).matrix();
        }
    } else {
        namespace idx = gru_idx;
        for (std::size_t t = steps; t-- > 0;) {
            const Eigen::VectorXd& x = trace.inputs[t];
            const Eigen::VectorXd& h_prev = trace.h[t];
            const Eigen::ArrayXd& r = trace.reset[t];
            const Eigen::ArrayXd& z = trace.update[t];
            const Eigen::ArrayXd& n = trace.cand_n[t];
            const Eigen::ArrayXd& pre = trace.recurrent_pre[t];

            const Eigen::ArrayXd da_z = dh.array() * (h_prev.array() - n) * z * (1.0 - z);
            const Eigen::ArrayXd da_n = dh.array() * (1.0 - z) * (1.0 - n * n);
            const Eigen::ArrayXd da_r = da_n * pre * r * (1.0 - r);
            const Eigen::ArrayXd d_pre = da_n * r;

            grads[idx::WxReset] += da_r.matrix() * x.transpose();
            grads[idx::WxUpdate] += da_z.matrix() * x.transpose();
            grads[idx::WxCand] += da_n.matrix() * x.transpose();
            grads[idx::WhReset] += da_r.matrix() * h_prev.transpose();
            grads[idx::WhUpdate] += da_z.matrix() * h_prev.transpose();
            grads[idx::WhCand] += d_pre.matrix() * h_prev.transpose();
            grads[idx::BxReset].col(0) += da_r.matrix();
            grads[idx::BxUpdate].col(0) += da_z.matrix();
            grads[idx::BxCand].col(0) += da_n.matrix();
            grads[idx::BhReset].col(0) += da_r.matrix();
            grads[idx::BhUpdate].col(0) += da_z.matrix();
            grads[idx::BhCand].col(0) += d_pre.matrix();

            dh = (dh.array() * z).matrix() + w.at(idx::WhReset).transpose() * da_r.matrix() +
                 w.at(idx::WhUpdate).transpose() * da_z.matrix() +
                 w.at(idx::WhCand).transpose() * d_pre.matrix();
        }
    }
}

inline std::vector<Eigen::MatrixXd> zero_like(const RnnWeights& w) {
    std::vector<Eigen::MatrixXd> grads;
    grads.reserve(w.tensor_count());
    for (std::size_t i = 0; i < w.tensor_count(); ++i)
        grads.push_back(Eigen::MatrixXd::Zero(w.at(i).rows(), w.at(i).cols()));
    return grads;
}

/**
 * Full-batch MSE loss and gradient in normalized units. Dropout masks, when
 * given, hold one column per sample (inverted dropout on the final hidden
 * state).
 */
inline double loss_and_gradient(const RnnWeights& w,
                                const std::vector<Eigen::MatrixXd>& windows,
                                const std::vector<double>& targets,
                                const Eigen::MatrixXd* dropout_masks,
                                std::vector<Eigen::MatrixXd>& grads) {
    const std::size_t readout_w = w.cell == CellKind::GRU
                                      ? static_cast<std::size_t>(gru_idx::ReadoutW)
                                      : static_cast<std::size_t>(lstm_idx::ReadoutW);
    const std::size_t readout_b = readout_w + 1;
    const std::size_t count = windows.size();
    double loss = 0.0;
    for (std::size_t s = 0; s < count; ++s) {
        const CellTrace trace = forward_trace(w, windows[s]);
        Eigen::VectorXd h = trace.h.back();
        if (dropout_masks) h = h.cwiseProduct(dropout_masks->col(static_cast<Eigen::Index>(s)));
        const double pred = w.at(readout_w).col(0).dot(h) + w.at(readout_b)(0, 0);
        const double err = pred - targets[s];
        loss += err * err;

        const double dpred = 2.0 * err / static_cast<double>(count);
        grads[readout_w].col(0) += dpred * h;
        grads[readout_b](0, 0) += dpred;
        Eigen::VectorXd dh = dpred * w.at(readout_w).col(0);
        if (dropout_masks) dh = dh.cwiseProduct(dropout_masks->col(static_cast<Eigen::Index>(s)));
        backward_trace(w, trace, dh, grads);
    }
    return loss / static_cast<double>(count);
}

} // namespace detail

/**
 * Trains a fresh model by full-batch backpropagation through time with
 * Adam-style adaptive moments and gradient clipping at global norm 5.
 * Dropout (inverted, on the cell output) is active during training only.
 * Fully deterministic given the spec seed.
 */
inline RnnModel train(const RnnSpec& spec, const std::vector<TrainingSample>& samples) {
    validate_spec(spec);
    if (samples.empty()) throw InsufficientDataError("train: need at least one sample");
    for (const auto& s : samples)
        if (s.window.cols() != static_cast<Eigen::Index>(spec.input_dim))
            throw ShapeError("train: sample window width does not match spec input_dim");

    RnnModel model;
    model.spec = spec;

    // Per-feature z-score over all training rows; constant features pass
    // through with unit scale.
    const auto dim = static_cast<Eigen::Index>(spec.input_dim);
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
    std::size_t rows = 0;
    for (const auto& s : samples) {
        mean += s.window.colwise().sum().transpose();
        rows += static_cast<std::size_t>(s.window.rows());
    }
    mean /= static_cast<double>(rows);
    Eigen::VectorXd var = Eigen::VectorXd::Zero(dim);
    for (const auto& s : samples)
        var += (s.window.rowwise() - mean.transpose()).array().square().colwise().sum().matrix().transpose();
    var /= static_cast<double>(rows);
    model.feature_shift = mean;
    model.feature_scale = var.array().sqrt().max(1e-12).matrix();
    for (Eigen::Index c = 0; c < dim; ++c)
        if (var(c) < 1e-24) model.feature_scale(c) = 1.0;

    double t_mean = 0.0;
    for (const auto& s : samples) t_mean += s.target;
    t_mean /= static_cast<double>(samples.size());
    double t_var = 0.0;
    for (const auto& s : samples) t_var += (s.target - t_mean) * (s.target - t_mean);
    t_var /= static_cast<double>(samples.size());
    model.target_shift = t_mean;
    model.target_scale = t_var > 1e-24 ? std::sqrt(t_var) : 1.0;

    std::vector<Eigen::MatrixXd> windows;
    std::vector<double> targets;
    windows.reserve(samples.size());
    targets.reserve(samples.size());
    for (const auto& s : samples) {
        Eigen::MatrixXd w = s.window;
        for (Eigen::Index c = 0; c < dim; ++c)
            w.col(c) = (w.col(c).array() - model.feature_shift(c)) / model.feature_scale(c);
        windows.push_back(std::move(w));
        targets.push_back((s.target - model.target_shift) / model.target_scale);
    }

    Rng master(spec.seed);
    Rng init_rng = master.derive(0);
    Rng dropout_rng = master.derive(1);
    model.weights = init_weights(spec.cell, spec.input_dim, spec.hidden_dim, init_rng);

    auto moments1 = detail::zero_like(model.weights);
    auto moments2 = detail::zero_like(model.weights);
    constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEpsilon = 1e-8, kClipNorm = 5.0;

    const bool use_dropout = spec.dropout > 0.0;
    const double keep = 1.0 - spec.dropout;
    Eigen::MatrixXd masks(spec.hidden_dim, samples.size());

    model.loss_history.reserve(spec.epochs);
    for (std::size_t epoch = 1; epoch <= spec.epochs; ++epoch) {
        if (use_dropout) {
            for (Eigen::Index c = 0; c < masks.cols(); ++c)
                for (Eigen::Index r = 0; r < masks.rows(); ++r)
                    masks(r, c) = dropout_rng.uniform() < keep ? 1.0 / keep : 0.0;
        }
        auto grads = detail::zero_like(model.weights);
        const double loss = detail::loss_and_gradient(model.weights, windows, targets,
                                                      use_dropout ? &masks : nullptr, grads);
        if (!std::isfinite(loss))
            throw TrainingDivergedError("train: non-finite loss at epoch " + std::to_string(epoch));
        model.loss_history.push_back(loss);

        double norm_sq = 0.0;
        for (const auto& g : grads) norm_sq += g.squaredNorm();
        const double norm = std::sqrt(norm_sq);
        const double clip = norm > kClipNorm ? kClipNorm / norm : 1.0;

        const double correction1 = 1.0 - std::pow(kBeta1, static_cast<double>(epoch));
        const double correction2 = 1.0 - std::pow(kBeta2, static_cast<double>(epoch));
        for (std::size_t i = 0; i < grads.size(); ++i) {
            const Eigen::MatrixXd g = clip * grads[i];
            moments1[i] = kBeta1 * moments1[i] + (1.0 - kBeta1) * g;
            moments2[i] = kBeta2 * moments2[i] + (1.0 - kBeta2) * g.cwiseProduct(g);
            const Eigen::MatrixXd m_hat = moments1[i] / correction1;
            const Eigen::MatrixXd v_hat = moments2[i] / correction2;
            model.weights.at(i) -=
                spec.learning_rate *
                (m_hat.array() / (v_hat.array().sqrt() + kEpsilon)).matrix();
        }
    }
    return model;
}

/**
 * Compares analytic BPTT gradients against central finite differences over
 * every weight and bias (dropout disabled). Returns the maximum relative
 * error max |analytic - numeric| / max(|analytic|, |numeric|, 1e-8).
 */
inline double gradient_check(const RnnSpec& spec, const TrainingSample& sample,
                             double step = 1e-5) {
    validate_spec(spec);
    Rng rng(spec.seed);
    Rng init_rng = rng.derive(0);
    RnnWeights weights = init_weights(spec.cell, spec.input_dim, spec.hidden_dim, init_rng);

    const std::vector<Eigen::MatrixXd> windows = {sample.window};
    const std::vector<double> targets = {sample.target};

    auto analytic = detail::zero_like(weights);
    detail::loss_and_gradient(weights, windows, targets, nullptr, analytic);

    auto loss_at = [&](const RnnWeights& w) {
        auto scratch = detail::zero_like(w);
        return detail::loss_and_gradient(w, windows, targets, nullptr, scratch);
    };

    double max_rel = 0.0;
    for (std::size_t i = 0; i < weights.tensor_count(); ++i) {
        auto& t = weights.at(i);
        for (Eigen::Index r = 0; r < t.rows(); ++r)
            for (Eigen::Index c = 0; c < t.cols(); ++c) {
                const double saved = t(r, c);
                t(r, c) = saved + step;
                const double up = loss_at(weights);
                t(r, c) = saved - step;
                const double down = loss_at(weights);
                t(r, c) = saved;
                const double numeric = (up - down) / (2.0 * step);
                const double a = analytic[i](r, c);
                const double rel =
                    std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-8});
                max_rel = std::max(max_rel, rel);
            }
    }
    return max_rel;
}

} // namespace carbcast
