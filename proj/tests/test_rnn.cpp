#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>

#include "carbcast/rnn.hpp"
#include "carbcast/rnn_train.hpp"

using namespace carbcast;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

double logistic(double a) { return 1.0 / (1.0 + std::exp(-a)); }

RnnWeights constant_weights(CellKind cell, std::size_t in, std::size_t hid, double value) {
    RnnWeights w = make_weights(cell, in, hid);
    for (std::size_t i = 0; i < w.tensor_count(); ++i) {
        const auto name = w.tensor_name(i);
        if (name.front() == 'B' || name == "ReadoutB" || name.substr(0, 7) == "Readout") continue;
        w.tensors[i].setConstant(value);
    }
    return w;
}

TrainingSample seeded_sample(std::uint64_t seed, std::size_t steps, std::size_t in) {
    Rng rng(seed);
    TrainingSample s;
    s.window.resize(steps, in);
    for (Eigen::Index r = 0; r < s.window.rows(); ++r)
        for (Eigen::Index c = 0; c < s.window.cols(); ++c) s.window(r, c) = rng.normal();
    s.target = rng.normal();
    return s;
}

} // namespace

TEST_CASE("lstm cell scalar oracle", "[rnn]") {
    // dims 1x1, every weight 0.5, biases 0, x = 1, h_prev = c_prev = 0:
    // recompute i, f, o, g, c, h with plain scalar arithmetic
    RnnWeights w = constant_weights(CellKind::LSTM, 1, 1, 0.5);
    Eigen::VectorXd x(1), h0(1), c0(1);
    x << 1.0;
    h0 << 0.0;
    c0 << 0.0;
    const auto [h, c] = lstm_cell(x, h0, c0, w);

    const double gate = logistic(0.5);
    const double cand = std::tanh(0.5);
    const double c_expected = gate * cand;
    const double h_expected = gate * std::tanh(c_expected);
    REQUIRE_THAT(c(0), WithinAbs(c_expected, 1e-14));
    REQUIRE_THAT(h(0), WithinAbs(h_expected, 1e-14));
    REQUIRE_THAT(gate, WithinAbs(0.62246, 5e-6));
    REQUIRE_THAT(cand, WithinAbs(0.46212, 5e-6));
}

TEST_CASE("gru cell scalar oracle", "[rnn]") {
    RnnWeights w = constant_weights(CellKind::GRU, 1, 1, 0.5);
    Eigen::VectorXd x(1), h0(1);
    x << 1.0;
    h0 << 0.0;
    const auto h = gru_cell(x, h0, w);

    const double r = logistic(0.5);
    const double z = logistic(0.5);
    const double n = std::tanh(0.5 + r * 0.0);
    const double h_expected = (1.0 - z) * n + z * 0.0;
    REQUIRE_THAT(h(0), WithinAbs(h_expected, 1e-14));
}

TEST_CASE("lstm gate saturation identities", "[rnn]") {
    // saturated pre-activations: sigma(+-500) is exactly 1 / denormal in double
    const std::size_t hid = 4;
    Rng rng(5);
    RnnWeights w = init_weights(CellKind::LSTM, 3, hid, rng);
    w.tensors[lstm_idx::BForget].setConstant(500.0);  // f = 1
    w.tensors[lstm_idx::BInput].setConstant(-500.0);  // i = 0

    Eigen::VectorXd x(3), h_prev = Eigen::VectorXd::Zero(hid), c_prev(hid);
    x << 0.3, -0.7, 1.1;
    c_prev << 0.5, -1.2, 2.0, 0.01;
    Eigen::VectorXd c = c_prev, h = h_prev;
    for (int step = 0; step < 7; ++step) {
        auto [h_next, c_next] = lstm_cell(x, h, c, w);
        h = h_next;
        c = c_next;
    }
    REQUIRE(c == c_prev); // exact: the cell state survives any number of steps

    RnnWeights w_out = init_weights(CellKind::LSTM, 3, hid, rng);
    w_out.tensors[lstm_idx::BOutput].setConstant(-500.0); // o = sigma(-500) ~ 7e-218
    const auto [h_zero, c_ignored] = lstm_cell(x, h_prev, c_prev, w_out);
    for (Eigen::Index i = 0; i < h_zero.size(); ++i) REQUIRE(std::abs(h_zero(i)) < 1e-200);
}

TEST_CASE("gru update gate identity: z = 1 freezes the state", "[rnn]") {
    const std::size_t hid = 4;
    Rng rng(6);
    RnnWeights w = init_weights(CellKind::GRU, 3, hid, rng);
    w.tensors[gru_idx::BxUpdate].setConstant(500.0); // z = 1 exactly

    Eigen::VectorXd x(3), h_prev(hid);
    x << 0.5, -0.2, 0.9;
    h_prev << 0.1, -0.4, 0.8, -1.5;
    Eigen::VectorXd h = h_prev;
    for (int step = 0; step < 7; ++step) h = gru_cell(x, h, w);
    REQUIRE(h == h_prev);
}

TEST_CASE("gru with r = 1, z = 0 is a vanilla RNN step", "[rnn]") {
    const std::size_t in = 3, hid = 4;
    Rng rng(7);
    RnnWeights w = init_weights(CellKind::GRU, in, hid, rng);
    w.tensors[gru_idx::WxReset].setZero();
    w.tensors[gru_idx::WhReset].setZero();
    w.tensors[gru_idx::BxReset].setConstant(500.0);  // r = 1 exactly
    w.tensors[gru_idx::BhReset].setZero();
    w.tensors[gru_idx::WxUpdate].setZero();
    w.tensors[gru_idx::WhUpdate].setZero();
    w.tensors[gru_idx::BxUpdate].setConstant(-500.0); // z = 0 up to denormals
    w.tensors[gru_idx::BhUpdate].setZero();

    Eigen::VectorXd x(in), h_prev(hid);
    x << 0.2, -1.0, 0.6;
    h_prev << 0.3, 0.1, -0.5, 0.9;

    // independently coded vanilla RNN step
    const Eigen::VectorXd vanilla =
        (w.at(gru_idx::WxCand) * x + w.at(gru_idx::BxCand).col(0) +
         w.at(gru_idx::WhCand) * h_prev + w.at(gru_idx::BhCand).col(0))
            .array()
            .tanh()
            .matrix();

    const auto h = gru_cell(x, h_prev, w);
    for (Eigen::Index i = 0; i < h.size(); ++i) REQUIRE(h(i) == vanilla(i));
}

TEST_CASE("gate activations stay in their open intervals", "[rnn]") {
    Rng rng(8);
    for (CellKind cell : {CellKind::GRU, CellKind::LSTM}) {
        RnnWeights w = init_weights(cell, 5, 6, rng);
        const auto sample = seeded_sample(rng.next_u64(), 7, 5);
        const auto trace = detail::forward_trace(w, sample.window);
        if (cell == CellKind::LSTM) {
            for (const auto& gates : {trace.gate_i, trace.gate_f, trace.gate_o})
                for (const auto& g : gates)
                    for (Eigen::Index i = 0; i < g.size(); ++i) {
                        REQUIRE(g(i) > 0.0);
                        REQUIRE(g(i) < 1.0);
                    }
            for (const auto& g : trace.cand_g)
                for (Eigen::Index i = 0; i < g.size(); ++i) REQUIRE(std::abs(g(i)) < 1.0);
        } else {
            for (const auto& gates : {trace.reset, trace.update})
                for (const auto& g : gates)
                    for (Eigen::Index i = 0; i < g.size(); ++i) {
                        REQUIRE(g(i) > 0.0);
                        REQUIRE(g(i) < 1.0);
                    }
            for (const auto& g : trace.cand_n)
                for (Eigen::Index i = 0; i < g.size(); ++i) REQUIRE(std::abs(g(i)) < 1.0);
        }
    }
}

TEST_CASE("cells reject mismatched shapes", "[rnn]") {
    RnnWeights gru = make_weights(CellKind::GRU, 3, 4);
    RnnWeights lstm = make_weights(CellKind::LSTM, 3, 4);
    Eigen::VectorXd wrong = Eigen::VectorXd::Zero(2);
    Eigen::VectorXd h = Eigen::VectorXd::Zero(4);
    REQUIRE_THROWS_AS(gru_cell(wrong, h, gru), ShapeError);
    REQUIRE_THROWS_AS(lstm_cell(wrong, h, h, lstm), ShapeError);
    REQUIRE_THROWS_AS(gru_cell(h, h, lstm), ShapeError);
}

TEST_CASE("predict with zero weights returns the de-normalized zero", "[rnn]") {
    RnnModel model;
    model.spec.cell = CellKind::GRU;
    model.spec.input_dim = 4;
    model.spec.hidden_dim = 3;
    model.weights = make_weights(CellKind::GRU, 4, 3);
    model.feature_shift = Eigen::VectorXd::Zero(4);
    model.feature_scale = Eigen::VectorXd::Ones(4);
    model.target_shift = 36.5;
    model.target_scale = 4.2;

    Eigen::MatrixXd window = Eigen::MatrixXd::Random(5, 4);
    REQUIRE(predict(model, window) == 36.5);

    Eigen::MatrixXd narrow = Eigen::MatrixXd::Random(5, 3);
    REQUIRE_THROWS_AS(predict(model, narrow), ShapeError);
}

TEST_CASE("state propagates through the window", "[rnn]") {
    Rng rng(12);
    RnnModel model;
    model.spec.input_dim = 4;
    model.spec.hidden_dim = 5;
    model.weights = init_weights(CellKind::GRU, 4, 5, rng);
    model.feature_shift = Eigen::VectorXd::Zero(4);
    model.feature_scale = Eigen::VectorXd::Ones(4);
    for (Eigen::Index i = 0; i < 5; ++i) model.weights.tensors[gru_idx::ReadoutW](i, 0) = 0.3;

    Eigen::MatrixXd window(6, 4);
    for (Eigen::Index r = 0; r < 6; ++r)
        for (Eigen::Index c = 0; c < 4; ++c) window(r, c) = 0.25;
    Eigen::MatrixXd perturbed = window;
    perturbed(0, 2) += 1.0;
    REQUIRE(predict(model, window) != predict(model, perturbed));
}

TEST_CASE("gradient check passes for both cells", "[rnn]") {
    for (CellKind cell : {CellKind::GRU, CellKind::LSTM}) {
        RnnSpec spec;
        spec.cell = cell;
        spec.input_dim = 3;
        spec.hidden_dim = 4;
        spec.dropout = 0.0;
        spec.seed = 1234;
        const auto sample = seeded_sample(77, 6, 3);
        REQUIRE(gradient_check(spec, sample) < 1e-4);
    }
}

TEST_CASE("analytic and numeric gradients agree at the zero-weight point", "[rnn]") {
    RnnWeights w = make_weights(CellKind::GRU, 2, 3);
    const auto sample = seeded_sample(31, 4, 2);
    const std::vector<Eigen::MatrixXd> windows = {sample.window};
    const std::vector<double> targets = {sample.target};

    auto analytic = detail::zero_like(w);
    detail::loss_and_gradient(w, windows, targets, nullptr, analytic);

    const double step = 1e-5;
    for (std::size_t i = 0; i < w.tensor_count(); ++i) {
        auto& t = w.tensors[i];
        for (Eigen::Index r = 0; r < t.rows(); ++r)
            for (Eigen::Index c = 0; c < t.cols(); ++c) {
                auto scratch = detail::zero_like(w);
                t(r, c) = step;
                const double up = detail::loss_and_gradient(w, windows, targets, nullptr, scratch);
                t(r, c) = -step;
                const double down = detail::loss_and_gradient(w, windows, targets, nullptr, scratch);
                t(r, c) = 0.0;
                REQUIRE_THAT(analytic[i](r, c), WithinAbs((up - down) / (2.0 * step), 1e-6));
            }
    }
}

TEST_CASE("training is deterministic and lowers the loss", "[rnn]") {
    RnnSpec spec;
    spec.cell = CellKind::GRU;
    spec.input_dim = 3;
    spec.hidden_dim = 6;
    spec.dropout = 0.2;
    spec.learning_rate = 0.01;
    spec.epochs = 150;
    spec.seed = 2021;

    std::vector<TrainingSample> samples;
    for (std::uint64_t i = 0; i < 10; ++i) samples.push_back(seeded_sample(100 + i, 5, 3));

    const RnnModel a = train(spec, samples);
    const RnnModel b = train(spec, samples);
    for (std::size_t i = 0; i < a.weights.tensor_count(); ++i)
        REQUIRE(a.weights.at(i) == b.weights.at(i));

    REQUIRE(a.loss_history.size() == 150);
    REQUIRE(a.loss_history.back() < a.loss_history.front());
}

TEST_CASE("zero learning rate leaves the seeded initialization untouched", "[rnn]") {
    RnnSpec spec;
    spec.cell = CellKind::LSTM;
    spec.input_dim = 2;
    spec.hidden_dim = 3;
    spec.dropout = 0.0;
    spec.learning_rate = 0.0;
    spec.epochs = 20;
    spec.seed = 55;

    const RnnModel model = train(spec, {seeded_sample(1, 4, 2), seeded_sample(2, 4, 2)});

    Rng master(spec.seed);
    Rng init_rng = master.derive(0);
    const RnnWeights expected = init_weights(spec.cell, spec.input_dim, spec.hidden_dim, init_rng);
    for (std::size_t i = 0; i < expected.tensor_count(); ++i)
        REQUIRE(model.weights.at(i) == expected.at(i));
}

TEST_CASE("training diverges loudly on absurd learning rates", "[rnn]") {
    RnnSpec spec;
    spec.cell = CellKind::GRU;
    spec.input_dim = 2;
    spec.hidden_dim = 3;
    spec.dropout = 0.0;
    spec.learning_rate = 1e200;
    spec.epochs = 10;
    spec.seed = 3;
    REQUIRE_THROWS_MATCHES(train(spec, {seeded_sample(9, 4, 2)}), TrainingDivergedError,
                           Catch::Matchers::MessageMatches(
                               Catch::Matchers::ContainsSubstring("epoch")));
}

TEST_CASE("model save/load round trip is exact", "[rnn]") {
    RnnSpec spec;
    spec.cell = CellKind::LSTM;
    spec.input_dim = 3;
    spec.hidden_dim = 4;
    spec.dropout = 0.1;
    spec.learning_rate = 0.02;
    spec.epochs = 12;
    spec.seed = 77;
    std::vector<TrainingSample> samples = {seeded_sample(5, 4, 3), seeded_sample(6, 4, 3)};
    const RnnModel model = train(spec, samples);

    const auto path = std::filesystem::temp_directory_path() / "rnn_model.txt";
    save_model(model, path);
    const RnnModel loaded = load_model(path);

    REQUIRE(loaded.spec.cell == model.spec.cell);
    REQUIRE(loaded.spec.seed == model.spec.seed);
    for (std::size_t i = 0; i < model.weights.tensor_count(); ++i)
        REQUIRE(loaded.weights.at(i) == model.weights.at(i));
    REQUIRE(loaded.feature_shift == model.feature_shift);
    REQUIRE(loaded.target_scale == model.target_scale);

    const auto probe = seeded_sample(8, 4, 3);
    REQUIRE(predict(loaded, probe.window) == predict(model, probe.window));
}

TEST_CASE("train input validation", "[rnn]") {
    RnnSpec spec;
    spec.input_dim = 2;
    REQUIRE_THROWS_AS(train(spec, {}), InsufficientDataError);
    REQUIRE_THROWS_AS(train(spec, {seeded_sample(1, 4, 3)}), ShapeError);
    RnnSpec bad = spec;
    bad.dropout = 1.0;
    REQUIRE_THROWS_AS(train(bad, {seeded_sample(1, 4, 2)}), DomainError);
}
