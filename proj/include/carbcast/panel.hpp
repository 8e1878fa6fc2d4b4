#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "carbcast/csv.hpp"
#include "carbcast/date.hpp"
#include "carbcast/errors.hpp"

namespace carbcast {

/**
 * The closed set of panel columns: 23 observed market variables plus the
 * derived GSHEA column (the rolling GARCH price forecast of SHEA).
 */
enum class VariableCode : int {
    SHEA,   // Shanghai carbon allowance closing price (yuan/ton)
    SZA,    // Shenzhen carbon allowance closing price
    GDEA,   // Guangdong carbon allowance closing price
    HS300,  // CSI 300 index
    BP500,  // S&P 500 index
    OY,     // EUR/CNY central parity
    MY,     // USD/CNY central parity
    CCI500, // thermal coal price index
    YHQ,    // Shanghai LPG market price
    QY,     // domestic gasoline spot price
    FOB,    // Brent crude oil price
    WIRED,  // Wilder global new energy index
    TRQQH,  // natural gas futures
    TPFQH,  // carbon futures
    CER,    // CER continuous futures settlement
    EUA,    // EUA continuous futures settlement
    SZNY,   // SSE energy sector index
    SZGY,   // SSE industrial index
    SZZR,   // SSE natural resources index
    CKY,    // domestic mining index
    SSZNY,  // Shenzhen energy index
    ZZY,    // domestic manufacturing index
    PM,     // Shanghai PM2.5 daily mean
    GSHEA,  // derived: rolling GARCH one-step price forecast of SHEA
};

inline constexpr int kVariableCount = 24;

inline constexpr std::array<std::string_view, kVariableCount> kVariableNames = {
    "SHEA", "SZA", "GDEA", "HS300", "BP500", "OY", "MY", "CCI500",
    "YHQ", "QY", "FOB", "WIRED", "TRQQH", "TPFQH", "CER", "EUA",
    "SZNY", "SZGY", "SZZR", "CKY", "SSZNY", "ZZY", "PM", "GSHEA"};

inline std::string_view variable_name(VariableCode code) {
    return kVariableNames[static_cast<int>(code)];
}

inline std::optional<VariableCode> variable_from_name(std::string_view name) {
    for (int i = 0; i < kVariableCount; ++i)
        if (kVariableNames[i] == name) return static_cast<VariableCode>(i);
    return std::nullopt;
}

/// The 23 observed Table-style columns, in canonical order (GSHEA excluded).
inline std::vector<VariableCode> observed_variables() {
    std::vector<VariableCode> out;
    for (int i = 0; i < kVariableCount - 1; ++i) out.push_back(static_cast<VariableCode>(i));
    return out;
}

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

inline bool is_missing(double v) { return std::isnan(v); }

/**
 * Date-indexed matrix of market variables. Columns are kept in canonical
 * enum order, so two panels with the same content compare equal regardless
 * of the column order in the source file.
 *
 * Invariants: dates strictly increasing; every column has one value per
 * date; a cleaned panel (after fill_missing) contains no missing cells.
 */
class ObservationPanel {
public:
    ObservationPanel() = default;

    ObservationPanel(std::vector<Date> dates, std::vector<VariableCode> codes,
                     std::vector<std::vector<double>> columns)
        : dates_(std::move(dates)) {
        if (codes.size() != columns.size())
            throw SchemaError("panel: code/column count mismatch");
        std::vector<std::size_t> order(codes.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return static_cast<int>(codes[a]) < static_cast<int>(codes[b]);
        });
        for (std::size_t i : order) {
            if (!codes_.empty() && codes_.back() == codes[i])
                throw SchemaError(std::string("duplicate column ") + std::string(variable_name(codes[i])));
            if (columns[i].size() != dates_.size())
                throw SchemaError(std::string("column ") + std::string(variable_name(codes[i])) +
                                  " has " + std::to_string(columns[i].size()) + " rows, expected " +
                                  std::to_string(dates_.size()));
            codes_.push_back(codes[i]);
            columns_.push_back(std::move(columns[i]));
        }
        for (std::size_t i = 1; i < dates_.size(); ++i) {
            if (!(dates_[i - 1] < dates_[i]))
                throw OrderingError("dates not strictly increasing at " + dates_[i].to_string());
        }
    }

    std::size_t length() const { return dates_.size(); }
    const std::vector<Date>& dates() const { return dates_; }
    const std::vector<VariableCode>& codes() const { return codes_; }

    bool has_column(VariableCode code) const {
        return std::find(codes_.begin(), codes_.end(), code) != codes_.end();
    }

    const std::vector<double>& column(VariableCode code) const {
        for (std::size_t i = 0; i < codes_.size(); ++i)
            if (codes_[i] == code) return columns_[i];
        throw SchemaError(std::string("panel has no column ") + std::string(variable_name(code)));
    }

    bool has_missing() const {
        for (const auto& col : columns_)
            for (double v : col)
                if (is_missing(v)) return true;
        return false;
    }

    /// New panel with an extra (or replaced) column.
    ObservationPanel with_column(VariableCode code, std::vector<double> values) const {
        std::vector<VariableCode> codes;
        std::vector<std::vector<double>> cols;
        for (std::size_t i = 0; i < codes_.size(); ++i) {
            if (codes_[i] == code) continue;
            codes.push_back(codes_[i]);
            cols.push_back(columns_[i]);
        }
        codes.push_back(code);
        cols.push_back(std::move(values));
        return ObservationPanel(dates_, std::move(codes), std::move(cols));
    }

    /// New panel restricted to rows [first, first+count).
    ObservationPanel slice(std::size_t first, std::size_t count) const {
        if (first + count > length()) throw InsufficientDataError("panel slice out of range");
        std::vector<Date> dates(dates_.begin() + first, dates_.begin() + first + count);
        std::vector<std::vector<double>> cols;
        cols.reserve(columns_.size());
        for (const auto& col : columns_)
            cols.emplace_back(col.begin() + first, col.begin() + first + count);
        return ObservationPanel(std::move(dates), codes_, std::move(cols));
    }

    bool operator==(const ObservationPanel& other) const = default;

private:
    std::vector<Date> dates_;
    std::vector<VariableCode> codes_;            // canonical enum order
    std::vector<std::vector<double>> columns_;   // parallel to codes_
};

/**
 * Loads a panel from CSV. Dialect: UTF-8, header `date,<code>,...`, comma
 * separator, `.` decimal point, missing cells empty or `NA`. Rows are
 * reordered into ascending date order; duplicate dates are rejected.
 */
inline ObservationPanel load_panel(const std::filesystem::path& path,
                                   const std::vector<VariableCode>& schema) {
    const auto lines = read_lines(path);
    if (lines.empty()) throw SchemaError("file '" + path.string() + "' has no header row");

    const auto header = split_csv_line(lines[0]);
    if (header.empty() || header[0] != "date")
        throw SchemaError("first header column must be 'date' in '" + path.string() + "'");

    std::vector<VariableCode> file_codes;
    for (std::size_t i = 1; i < header.size(); ++i) {
        const auto code = variable_from_name(header[i]);
        if (!code) throw SchemaError("unknown column '" + header[i] + "' in '" + path.string() + "'");
        file_codes.push_back(*code);
    }
    for (VariableCode wanted : schema) {
        if (std::find(file_codes.begin(), file_codes.end(), wanted) == file_codes.end())
            throw SchemaError(std::string("missing column ") + std::string(variable_name(wanted)) +
                              " in '" + path.string() + "'");
    }
    if (file_codes.size() != schema.size())
        throw SchemaError("file '" + path.string() + "' has " + std::to_string(file_codes.size()) +
                          " value columns, schema expects " + std::to_string(schema.size()));

    struct Row {
        Date date;
        std::vector<double> values;
    };
    std::vector<Row> rows;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        if (lines[li].empty()) continue;
        const auto fields = split_csv_line(lines[li]);
        if (fields.size() != file_codes.size() + 1)
            throw ParseError("row " + std::to_string(li + 1) + " has " + std::to_string(fields.size()) +
                             " fields, expected " + std::to_string(file_codes.size() + 1));
        Row row;
        row.date = Date::parse(fields[0]);
        for (std::size_t c = 1; c < fields.size(); ++c) {
            const std::string& cell = fields[c];
            if (cell.empty() || cell == "NA") {
                row.values.push_back(kMissing);
            } else {
                row.values.push_back(parse_double(
                    cell, "row " + std::to_string(li + 1) + ", column " +
                              std::string(variable_name(file_codes[c - 1]))));
            }
        }
        rows.push_back(std::move(row));
    }

    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row& a, const Row& b) { return a.date < b.date; });
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i - 1].date == rows[i].date)
            throw OrderingError("duplicate date " + rows[i].date.to_string() + " in '" + path.string() + "'");

    std::vector<Date> dates;
    dates.reserve(rows.size());
    std::vector<std::vector<double>> columns(file_codes.size());
    for (auto& col : columns) col.reserve(rows.size());
    for (const auto& row : rows) {
        dates.push_back(row.date);
        for (std::size_t c = 0; c < file_codes.size(); ++c) columns[c].push_back(row.values[c]);
    }
    return ObservationPanel(std::move(dates), std::move(file_codes), std::move(columns));
}

/// Loads a panel taking the schema from the file's own header (all names
/// must still be known codes).
inline ObservationPanel load_panel_auto(const std::filesystem::path& path) {
    const auto lines = read_lines(path);
    if (lines.empty()) throw SchemaError("file '" + path.string() + "' has no header row");
    const auto header = split_csv_line(lines[0]);
    std::vector<VariableCode> schema;
    for (std::size_t i = 1; i < header.size(); ++i) {
        const auto code = variable_from_name(header[i]);
        if (!code) throw SchemaError("unknown column '" + header[i] + "' in '" + path.string() + "'");
        schema.push_back(*code);
    }
    return load_panel(path, schema);
}

/// Canonical CSV export; inverse of load_panel on cleaned panels.
inline void write_panel(const ObservationPanel& panel, const std::filesystem::path& path) {
    std::string out = "date";
    for (VariableCode code : panel.codes()) {
        out += ',';
        out += variable_name(code);
    }
    out += '\n';
    for (std::size_t r = 0; r < panel.length(); ++r) {
        out += panel.dates()[r].to_string();
        for (VariableCode code : panel.codes()) {
            out += ',';
            const double v = panel.column(code)[r];
            if (is_missing(v))
                out += "NA";
            else
                out += format_double(v);
        }
        out += '\n';
    }
    write_file_atomic(path, out);
}

/**
 * Replaces every missing cell with the mean of the nearest non-missing
 * value before it and the nearest non-missing value after it; cells at the
 * boundary take the single nearest non-missing neighbor. A run of
 * consecutive missing cells therefore receives one shared fill value.
 */
inline std::vector<double> fill_missing_series(const std::vector<double>& values,
                                               std::string_view column_name) {
    bool any_present = false;
    for (double v : values) any_present |= !is_missing(v);
    if (!any_present)
        throw UnusableColumnError(std::string("column ") + std::string(column_name) +
                                  " is entirely missing");

    std::vector<double> out = values;
    const std::size_t n = out.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (!is_missing(out[i])) continue;
        std::optional<double> before, after;
        for (std::size_t j = i; j-- > 0;) {
            if (!is_missing(values[j])) {
                before = values[j];
                break;
            }
        }
        for (std::size_t j = i + 1; j < n; ++j) {
            if (!is_missing(values[j])) {
                after = values[j];
                break;
            }
        }
        if (before && after)
            out[i] = 0.5 * (*before + *after);
        else if (before)
            out[i] = *before;
        else
            out[i] = *after;
    }
    return out;
}

inline ObservationPanel fill_missing(const ObservationPanel& panel) {
    std::vector<std::vector<double>> cols;
    cols.reserve(panel.codes().size());
    for (VariableCode code : panel.codes()) {
        auto filled = fill_missing_series(panel.column(code), variable_name(code));
        // every panel variable is a price, index, rate, or concentration
        for (std::size_t i = 0; i < filled.size(); ++i)
            if (!(filled[i] > 0.0))
                throw DataError(std::string("column ") + std::string(variable_name(code)) +
                                " is not strictly positive at " + panel.dates()[i].to_string());
        cols.push_back(std::move(filled));
    }
    return ObservationPanel(panel.dates(), panel.codes(), std::move(cols));
}

enum class TransformKind { Level, LogReturn, FirstDifference };

struct SeriesTransform {
    TransformKind kind = TransformKind::Level;
    VariableCode source = VariableCode::SHEA;
};

/// Level copies; log-return and first-difference drop the first observation.
inline std::vector<double> transform_series(const ObservationPanel& panel, SeriesTransform t) {
    const auto& src = panel.column(t.source);
    switch (t.kind) {
        case TransformKind::Level:
            return src;
        case TransformKind::FirstDifference: {
            std::vector<double> out;
            out.reserve(src.size() > 0 ? src.size() - 1 : 0);
            for (std::size_t i = 1; i < src.size(); ++i) out.push_back(src[i] - src[i - 1]);
            return out;
        }
        case TransformKind::LogReturn: {
            std::vector<double> out;
            out.reserve(src.size() > 0 ? src.size() - 1 : 0);
            for (std::size_t i = 0; i < src.size(); ++i) {
                if (!(src[i] > 0.0))
                    throw DomainError(std::string("log-return of non-positive value in ") +
                                      std::string(variable_name(t.source)) + " at " +
                                      panel.dates()[i].to_string());
                if (i > 0) out.push_back(std::log(src[i] / src[i - 1]));
            }
            return out;
        }
    }
    throw DomainError("unknown transform kind");
}

/// Log-returns of a bare price series (no panel context).
inline std::vector<double> log_returns(const std::vector<double>& prices) {
    std::vector<double> out;
    out.reserve(prices.size() > 0 ? prices.size() - 1 : 0);
    for (std::size_t i = 0; i < prices.size(); ++i) {
        if (!(prices[i] > 0.0))
            throw DomainError("log-return of non-positive price at index " + std::to_string(i));
        if (i > 0) out.push_back(std::log(prices[i] / prices[i - 1]));
    }
    return out;
}

} // namespace carbcast
