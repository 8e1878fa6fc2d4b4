#pragma once

#include <algorithm>
#include <array>
#include <string>
#include <vector>

#include "carbcast/harness.hpp"
#include "carbcast/metrics.hpp"

namespace carbcast {

/// One leave-one-out row: the implementation-segment errors after deleting
/// one input variable, and the per-metric importance ranks (1 = deleting it
/// hurts most).
struct ImportanceRow {
    VariableCode deleted = VariableCode::SHEA;
    MetricsReport metrics;
    std::array<std::size_t, 5> ranks = {0, 0, 0, 0, 0}; // MAE, MSE, MAPE, MSPE, LL
    double average_rank = 0.0;
};

struct ImportanceTable {
    std::vector<ImportanceRow> rows; // sorted by average rank, most important first

    std::string to_csv() const {
        std::string out =
            "deleted,mae,mse,mape,mspe,ll,rank_mae,rank_mse,rank_mape,rank_mspe,rank_ll,"
            "average_rank\n";
        for (const auto& r : rows) {
            out += std::string(variable_name(r.deleted)) + "," + detail::fixed4(r.metrics.mae) +
                   "," + detail::fixed4(r.metrics.mse) + "," + detail::fixed4(r.metrics.mape) +
                   "," + detail::sci2(r.metrics.mspe) + "," +
                   (r.metrics.ll ? detail::sci2(*r.metrics.ll) : std::string());
            for (std::size_t rank : r.ranks) out += "," + std::to_string(rank);
            out += "," + format_double(r.average_rank) + "\n";
        }
        return out;
    }
};

namespace detail {

/// Competition ranks, largest value first; equal values share the smallest
/// rank of their group.
inline std::vector<std::size_t> rank_descending(const std::vector<double>& values) {
    std::vector<std::size_t> order(values.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
    std::vector<std::size_t> ranks(values.size(), 0);
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        if (pos > 0 && values[order[pos]] == values[order[pos - 1]])
            ranks[order[pos]] = ranks[order[pos - 1]];
        else
            ranks[order[pos]] = pos + 1;
    }
    return ranks;
}

} // namespace detail

/**
 * Leave-one-out variable importance. For every input variable the rolling
 * run is repeated over the implementation segment with that variable
 * deleted (models retrained per roll, same per-roll seeds), the five error
 * metrics are ranked across variables (largest error = rank 1), and the
 * average rank is the mean of the five per-metric ranks.
 */
inline ImportanceTable leave_one_out_importance(const ObservationPanel& panel,
                                                const RollConfig& config, const RnnSpec& rnn,
                                                const FeatureSet& base_features) {
    const FeatureSet features = features_for_family(base_features, config.family);
    if (features.inputs.size() < 2)
        throw ConfigError("leave_one_out_importance: need at least 2 input features");
    if (!is_recurrent(config.family))
        throw ConfigError("leave_one_out_importance: requires a trainable model family");

    // implementation-roll range from the arithmetic probe
    RollingRunResult probe =
        rolling_run(panel, config, rnn, features, std::make_pair<std::size_t>(0, 0));
    const std::size_t tuning = probe.arithmetic.tuning_rolls;
    const std::size_t rolls = probe.arithmetic.rolls;
    if (tuning >= rolls)
        throw InsufficientDataError("leave_one_out_importance: implementation segment is empty");

    ImportanceTable table;
    for (std::size_t i = 0; i < features.inputs.size(); ++i) {
        FeatureSet reduced = features;
        reduced.inputs.erase(reduced.inputs.begin() + static_cast<std::ptrdiff_t>(i));
        const auto run =
            rolling_run(panel, config, rnn, reduced, std::make_pair(tuning, rolls));
        ImportanceRow row;
        row.deleted = features.inputs[i];
        row.metrics = compute_metrics(run.records);
        row.metrics.window = config.window;
        table.rows.push_back(std::move(row));
    }

    const std::size_t count = table.rows.size();
    bool ll_everywhere = true;
    for (const auto& row : table.rows) ll_everywhere &= row.metrics.ll.has_value();

    std::array<std::vector<double>, 5> columns;
    for (auto& c : columns) c.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        columns[0][i] = table.rows[i].metrics.mae;
        columns[1][i] = table.rows[i].metrics.mse;
        columns[2][i] = table.rows[i].metrics.mape;
        columns[3][i] = table.rows[i].metrics.mspe;
        columns[4][i] = ll_everywhere ? *table.rows[i].metrics.ll : 0.0;
    }
    const std::size_t metric_count = ll_everywhere ? 5 : 4;
    for (std::size_t m = 0; m < metric_count; ++m) {
        const auto ranks = detail::rank_descending(columns[m]);
        for (std::size_t i = 0; i < count; ++i) table.rows[i].ranks[m] = ranks[i];
    }
    for (auto& row : table.rows) {
        double sum = 0.0;
        for (std::size_t m = 0; m < metric_count; ++m) sum += static_cast<double>(row.ranks[m]);
        row.average_rank = sum / static_cast<double>(metric_count);
    }

    std::stable_sort(table.rows.begin(), table.rows.end(),
                     [](const ImportanceRow& a, const ImportanceRow& b) {
                         if (a.average_rank != b.average_rank) return a.average_rank < b.average_rank;
                         return static_cast<int>(a.deleted) < static_cast<int>(b.deleted);
                     });
    return table;
}

} // namespace carbcast
