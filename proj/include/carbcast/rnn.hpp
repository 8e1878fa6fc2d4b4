#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "carbcast/csv.hpp"
#include "carbcast/errors.hpp"
#include "carbcast/rng.hpp"

namespace carbcast {

enum class CellKind { GRU, LSTM };

inline std::string_view cell_name(CellKind kind) {
    return kind == CellKind::GRU ? "GRU" : "LSTM";
}

struct RnnSpec {
    CellKind cell = CellKind::GRU;
    std::size_t input_dim = 19;
    std::size_t hidden_dim = 32;
    double dropout = 0.2;        // in [0, 1), applied to the cell output while training
    double learning_rate = 0.01; // > 0
    std::size_t epochs = 150;    // >= 1
    std::uint64_t seed = 0;
};

inline void validate_spec(const RnnSpec& spec) {
    if (spec.input_dim < 1 || spec.hidden_dim < 1) throw DomainError("rnn: dims must be >= 1");
    if (!(spec.dropout >= 0.0 && spec.dropout < 1.0)) throw DomainError("rnn: dropout must be in [0,1)");
    if (!(spec.learning_rate >= 0.0)) throw DomainError("rnn: learning rate must be non-negative");
    if (spec.epochs < 1) throw DomainError("rnn: epochs must be >= 1");
}

// Tensor order inside RnnWeights::tensors, per cell kind.
namespace lstm_idx {
enum : std::size_t {
    WxInput, WxForget, WxOutput, WxCand, // (input_dim x hidden_dim), applied transposed
    WhInput, WhForget, WhOutput, WhCand, // (hidden_dim x hidden_dim), applied transposed
    BInput, BForget, BOutput, BCand,     // (hidden_dim x 1)
    ReadoutW, ReadoutB,
    Count
};
}
namespace gru_idx {
enum : std::size_t {
    WxReset, WxUpdate, WxCand,           // (hidden_dim x input_dim)
    WhReset, WhUpdate, WhCand,           // (hidden_dim x hidden_dim)
    BxReset, BxUpdate, BxCand,           // (hidden_dim x 1)
    BhReset, BhUpdate, BhCand,           // (hidden_dim x 1)
    ReadoutW, ReadoutB,
    Count
};
}

inline const std::array<std::string_view, lstm_idx::Count>& lstm_tensor_names() {
    static const std::array<std::string_view, lstm_idx::Count> names = {
        "WxInput", "WxForget", "WxOutput", "WxCand", "WhInput", "WhForget", "WhOutput",
        "WhCand", "BInput", "BForget", "BOutput", "BCand", "ReadoutW", "ReadoutB"};
    return names;
}
inline const std::array<std::string_view, gru_idx::Count>& gru_tensor_names() {
    static const std::array<std::string_view, gru_idx::Count> names = {
        "WxReset", "WxUpdate", "WxCand", "WhReset", "WhUpdate", "WhCand", "BxReset",
        "BxUpdate", "BxCand", "BhReset", "BhUpdate", "BhCand", "ReadoutW", "ReadoutB"};
    return names;
}

/**
 * All learnable tensors of one recurrent model, including the linear
 * read-out. The flat tensor list keeps optimizer updates, serialization,
 * and finite-difference checks generic over cell kinds.
 */
struct RnnWeights {
    CellKind cell = CellKind::GRU;
    std::size_t input_dim = 0;
    std::size_t hidden_dim = 0;
    std::vector<Eigen::MatrixXd> tensors;

    Eigen::MatrixXd& at(std::size_t idx) { return tensors[idx]; }
    const Eigen::MatrixXd& at(std::size_t idx) const { return tensors[idx]; }

    const Eigen::MatrixXd& readout_weight() const {
        return tensors[cell == CellKind::GRU ? static_cast<std::size_t>(gru_idx::ReadoutW)
                                             : static_cast<std::size_t>(lstm_idx::ReadoutW)];
    }
    double readout_bias() const {
        return tensors[cell == CellKind::GRU ? static_cast<std::size_t>(gru_idx::ReadoutB)
                                             : static_cast<std::size_t>(lstm_idx::ReadoutB)](0, 0);
    }

    std::size_t tensor_count() const {
        return cell == CellKind::GRU ? static_cast<std::size_t>(gru_idx::Count)
                                     : static_cast<std::size_t>(lstm_idx::Count);
    }
    std::string_view tensor_name(std::size_t idx) const {
        return cell == CellKind::GRU ? gru_tensor_names()[idx] : lstm_tensor_names()[idx];
    }
};

/// Zero-valued weights with the shapes implied by (cell, input_dim, hidden_dim).
inline RnnWeights make_weights(CellKind cell, std::size_t input_dim, std::size_t hidden_dim) {
    RnnWeights w;
    w.cell = cell;
    w.input_dim = input_dim;
    w.hidden_dim = hidden_dim;
    const auto zeros = [](std::size_t r, std::size_t c) { return Eigen::MatrixXd::Zero(r, c); };
    if (cell == CellKind::LSTM) {
        w.tensors.resize(lstm_idx::Count);
        for (std::size_t i = lstm_idx::WxInput; i <= lstm_idx::WxCand; ++i)
            w.tensors[i] = zeros(input_dim, hidden_dim);
        for (std::size_t i = lstm_idx::WhInput; i <= lstm_idx::WhCand; ++i)
            w.tensors[i] = zeros(hidden_dim, hidden_dim);
        for (std::size_t i = lstm_idx::BInput; i <= lstm_idx::BCand; ++i)
            w.tensors[i] = zeros(hidden_dim, 1);
        w.tensors[lstm_idx::ReadoutW] = zeros(hidden_dim, 1);
        w.tensors[lstm_idx::ReadoutB] = zeros(1, 1);
    } else {
        w.tensors.resize(gru_idx::Count);
        for (std::size_t i = gru_idx::WxReset; i <= gru_idx::WxCand; ++i)
            w.tensors[i] = zeros(hidden_dim, input_dim);
        for (std::size_t i = gru_idx::WhReset; i <= gru_idx::WhCand; ++i)
            w.tensors[i] = zeros(hidden_dim, hidden_dim);
        for (std::size_t i = gru_idx::BxReset; i <= gru_idx::BhCand; ++i)
            w.tensors[i] = zeros(hidden_dim, 1);
        w.tensors[gru_idx::ReadoutW] = zeros(hidden_dim, 1);
        w.tensors[gru_idx::ReadoutB] = zeros(1, 1);
    }
    return w;
}

/// Uniform(-sqrt(6/(fan_in+fan_out)), +...) matrices, zero biases, from rng.
inline RnnWeights init_weights(CellKind cell, std::size_t input_dim, std::size_t hidden_dim,
                               Rng& rng) {
    RnnWeights w = make_weights(cell, input_dim, hidden_dim);
    for (std::size_t i = 0; i < w.tensor_count(); ++i) {
        auto& t = w.tensors[i];
        const auto name = w.tensor_name(i);
        if (name.front() == 'B' || name == "ReadoutB") continue; // biases stay zero
        const double limit = std::sqrt(6.0 / static_cast<double>(t.rows() + t.cols()));
        for (Eigen::Index r = 0; r < t.rows(); ++r)
            for (Eigen::Index c = 0; c < t.cols(); ++c) t(r, c) = rng.uniform(-limit, limit);
    }
    return w;
}

namespace detail {
inline Eigen::ArrayXd sigmoid(const Eigen::ArrayXd& a) { return 1.0 / (1.0 + (-a).exp()); }
} // namespace detail

/**
 * One LSTM step. Gates use the logistic sigmoid, the candidate uses tanh;
 * the new cell state is f (.) c_prev + i (.) g and the output is
 * o (.) tanh(c).
 */
inline std::pair<Eigen::VectorXd, Eigen::VectorXd> lstm_cell(const Eigen::VectorXd& x,
                                                             const Eigen::VectorXd& h_prev,
                                                             const Eigen::VectorXd& c_prev,
                                                             const RnnWeights& w) {
    namespace idx = lstm_idx;
    if (w.cell != CellKind::LSTM) throw ShapeError("lstm_cell: weights are not LSTM weights");
    if (x.size() != static_cast<Eigen::Index>(w.input_dim) ||
        h_prev.size() != static_cast<Eigen::Index>(w.hidden_dim) ||
        c_prev.size() != static_cast<Eigen::Index>(w.hidden_dim))
        throw ShapeError("lstm_cell: input/state sizes do not match the weights");

    const Eigen::ArrayXd gate_i = detail::sigmoid(
        (w.at(idx::WxInput).transpose() * x + w.at(idx::WhInput).transpose() * h_prev +
         w.at(idx::BInput).col(0)).array());
    const Eigen::ArrayXd gate_f = detail::sigmoid(
        (w.at(idx::WxForget).transpose() * x + w.at(idx::WhForget).transpose() * h_prev +
         w.at(idx::BForget).col(0)).array());
    const Eigen::ArrayXd gate_o = detail::sigmoid(
        (w.at(idx::WxOutput).transpose() * x + w.at(idx::WhOutput).transpose() * h_prev +
         w.at(idx::BOutput).col(0)).array());
    const Eigen::ArrayXd cand =
        ((w.at(idx::WxCand).transpose() * x + w.at(idx::WhCand).transpose() * h_prev +
          w.at(idx::BCand).col(0)).array()).tanh();

    const Eigen::ArrayXd c = gate_f * c_prev.array() + gate_i * cand;
    const Eigen::ArrayXd h = gate_o * c.tanh();
    return {h.matrix(), c.matrix()};
}

/**
 * One GRU step. The reset gate multiplies the recurrent part of the
 * candidate (including its bias); the new state blends the candidate and
 * the previous state through the update gate.
 */
inline Eigen::VectorXd gru_cell(const Eigen::VectorXd& x, const Eigen::VectorXd& h_prev,
                                const RnnWeights& w) {
    namespace idx = gru_idx;
    if (w.cell != CellKind::GRU) throw ShapeError("gru_cell: weights are not GRU weights");
    if (x.size() != static_cast<Eigen::Index>(w.input_dim) ||
        h_prev.size() != static_cast<Eigen::Index>(w.hidden_dim))
        throw ShapeError("gru_cell: input/state sizes do not match the weights");

    const Eigen::ArrayXd reset = detail::sigmoid(
        (w.at(idx::WxReset) * x + w.at(idx::BxReset).col(0) + w.at(idx::WhReset) * h_prev +
         w.at(idx::BhReset).col(0)).array());
    const Eigen::ArrayXd update = detail::sigmoid(
        (w.at(idx::WxUpdate) * x + w.at(idx::BxUpdate).col(0) + w.at(idx::WhUpdate) * h_prev +
         w.at(idx::BhUpdate).col(0)).array());
    const Eigen::ArrayXd recurrent_pre =
        (w.at(idx::WhCand) * h_prev + w.at(idx::BhCand).col(0)).array();
    const Eigen::ArrayXd cand =
        ((w.at(idx::WxCand) * x + w.at(idx::BxCand).col(0)).array() + reset * recurrent_pre).tanh();

    const Eigen::ArrayXd h = (1.0 - update) * cand + update * h_prev.array();
    return h.matrix();
}

/// Unrolls the cell over the window rows (time steps) from zero state and
/// returns the final hidden state.
inline Eigen::VectorXd run_cell(const RnnWeights& w, const Eigen::MatrixXd& window) {
    if (window.cols() != static_cast<Eigen::Index>(w.input_dim))
        throw ShapeError("run_cell: window has " + std::to_string(window.cols()) +
                         " columns, weights expect " + std::to_string(w.input_dim));
    Eigen::VectorXd h = Eigen::VectorXd::Zero(w.hidden_dim);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(w.hidden_dim);
    for (Eigen::Index t = 0; t < window.rows(); ++t) {
        const Eigen::VectorXd x = window.row(t).transpose();
        if (w.cell == CellKind::LSTM) {
            auto [h_next, c_next] = lstm_cell(x, h, c, w);
            h = h_next;
            c = c_next;
        } else {
            h = gru_cell(x, h, w);
        }
    }
    return h;
}

/**
 * A trained forecaster: spec + weights + the normalization fitted on the
 * training slice (per-feature z-score for inputs, one shift/scale pair for
 * the target).
 */
struct RnnModel {
    RnnSpec spec;
    RnnWeights weights;
    Eigen::VectorXd feature_shift;
    Eigen::VectorXd feature_scale; // entries > 0
    double target_shift = 0.0;
    double target_scale = 1.0;
    std::vector<double> loss_history; // per-epoch training MSE (normalized units)
};

inline Eigen::MatrixXd normalize_window(const RnnModel& model, const Eigen::MatrixXd& window) {
    if (window.cols() != model.feature_shift.size())
        throw ShapeError("predict: window has " + std::to_string(window.cols()) +
                         " columns, model expects " + std::to_string(model.feature_shift.size()));
    Eigen::MatrixXd out = window;
    for (Eigen::Index c = 0; c < out.cols(); ++c)
        out.col(c) = (out.col(c).array() - model.feature_shift(c)) / model.feature_scale(c);
    return out;
}

/// Normalize, unroll from zero state, read out the final hidden state,
/// de-normalize back to price units.
inline double predict(const RnnModel& model, const Eigen::MatrixXd& window) {
    const Eigen::MatrixXd normalized = normalize_window(model, window);
    const Eigen::VectorXd h = run_cell(model.weights, normalized);
    const double raw = model.weights.readout_weight().col(0).dot(h) + model.weights.readout_bias();
    return raw * model.target_scale + model.target_shift;
}

/// Flat text serialization: header, normalization, then one row-major line
/// per tensor.
inline std::string serialize_model(const RnnModel& model) {
    std::string out = "carbcast-rnn v1\n";
    out += "cell " + std::string(cell_name(model.spec.cell)) + "\n";
    out += "input_dim " + std::to_string(model.spec.input_dim) + "\n";
    out += "hidden_dim " + std::to_string(model.spec.hidden_dim) + "\n";
    out += "dropout " + format_double(model.spec.dropout) + "\n";
    out += "learning_rate " + format_double(model.spec.learning_rate) + "\n";
    out += "epochs " + std::to_string(model.spec.epochs) + "\n";
    out += "seed " + std::to_string(model.spec.seed) + "\n";
    auto vec_line = [](const char* name, const Eigen::VectorXd& v) {
        std::string line = name;
        for (Eigen::Index i = 0; i < v.size(); ++i) line += " " + format_double(v(i));
        return line + "\n";
    };
    out += vec_line("feature_shift", model.feature_shift);
    out += vec_line("feature_scale", model.feature_scale);
    out += "target_shift " + format_double(model.target_shift) + "\n";
    out += "target_scale " + format_double(model.target_scale) + "\n";
    for (std::size_t i = 0; i < model.weights.tensor_count(); ++i) {
        const auto& t = model.weights.at(i);
        out += "tensor " + std::string(model.weights.tensor_name(i)) + " " +
               std::to_string(t.rows()) + " " + std::to_string(t.cols());
        for (Eigen::Index r = 0; r < t.rows(); ++r)
            for (Eigen::Index c = 0; c < t.cols(); ++c) out += " " + format_double(t(r, c));
        out += "\n";
    }
    return out;
}

inline void save_model(const RnnModel& model, const std::filesystem::path& path) {
    write_file_atomic(path, serialize_model(model));
}

inline RnnModel deserialize_model(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    auto next_line = [&](const std::string& what) {
        if (!std::getline(in, line)) throw ParseError("model file truncated, expected " + what);
        return line;
    };
    if (next_line("magic") != "carbcast-rnn v1") throw ParseError("not a carbcast-rnn v1 model file");

    RnnModel model;
    auto field = [&](const std::string& key) {
        next_line(key);
        if (line.rfind(key + " ", 0) != 0) throw ParseError("expected field '" + key + "'");
        return line.substr(key.size() + 1);
    };
    const std::string cell = field("cell");
    model.spec.cell = cell == "GRU" ? CellKind::GRU : CellKind::LSTM;
    if (cell != "GRU" && cell != "LSTM") throw ParseError("unknown cell kind '" + cell + "'");
    model.spec.input_dim = std::stoul(field("input_dim"));
    model.spec.hidden_dim = std::stoul(field("hidden_dim"));
    model.spec.dropout = parse_double(field("dropout"), "dropout");
    model.spec.learning_rate = parse_double(field("learning_rate"), "learning_rate");
    model.spec.epochs = std::stoul(field("epochs"));
    model.spec.seed = std::stoull(field("seed"));

    auto parse_vec = [&](const std::string& key, Eigen::Index expected) {
        std::istringstream ss(field(key));
        std::vector<double> vals;
        std::string tok;
        while (ss >> tok) vals.push_back(parse_double(tok, key));
        if (static_cast<Eigen::Index>(vals.size()) != expected)
            throw ParseError("field '" + key + "' has wrong length");
        Eigen::VectorXd v(expected);
        for (Eigen::Index i = 0; i < expected; ++i) v(i) = vals[i];
        return v;
    };
    model.feature_shift = parse_vec("feature_shift", static_cast<Eigen::Index>(model.spec.input_dim));
    model.feature_scale = parse_vec("feature_scale", static_cast<Eigen::Index>(model.spec.input_dim));
    model.target_shift = parse_double(field("target_shift"), "target_shift");
    model.target_scale = parse_double(field("target_scale"), "target_scale");

    model.weights = make_weights(model.spec.cell, model.spec.input_dim, model.spec.hidden_dim);
    for (std::size_t i = 0; i < model.weights.tensor_count(); ++i) {
        next_line("tensor");
        std::istringstream ss(line);
        std::string tag, name;
        Eigen::Index rows = 0, cols = 0;
        ss >> tag >> name >> rows >> cols;
        if (tag != "tensor" || name != model.weights.tensor_name(i))
            throw ParseError("expected tensor '" + std::string(model.weights.tensor_name(i)) + "'");
        auto& t = model.weights.at(i);
        if (rows != t.rows() || cols != t.cols())
            throw ParseError("tensor '" + name + "' has wrong shape");
        std::string tok;
        for (Eigen::Index r = 0; r < rows; ++r)
            for (Eigen::Index c = 0; c < cols; ++c) {
                if (!(ss >> tok)) throw ParseError("tensor '" + name + "' truncated");
                t(r, c) = parse_double(tok, name);
            }
    }
    return model;
}

inline RnnModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open model file '" + path.string() + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return deserialize_model(buffer.str());
}

} // namespace carbcast
