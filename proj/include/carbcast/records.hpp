#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "carbcast/csv.hpp"
#include "carbcast/date.hpp"

namespace carbcast {

/// Forecasting model families compared by the rolling harness.
enum class ModelFamily { GARCH, MA, GRU, LSTM, GARCH_GRU, GARCH_LSTM };

inline constexpr std::array<ModelFamily, 6> kAllFamilies = {
    ModelFamily::GARCH, ModelFamily::MA,        ModelFamily::GRU,
    ModelFamily::LSTM,  ModelFamily::GARCH_GRU, ModelFamily::GARCH_LSTM};

inline std::string_view family_name(ModelFamily family) {
    switch (family) {
        case ModelFamily::GARCH: return "GARCH";
        case ModelFamily::MA: return "MA";
        case ModelFamily::GRU: return "GRU";
        case ModelFamily::LSTM: return "LSTM";
        case ModelFamily::GARCH_GRU: return "GARCH-GRU";
        case ModelFamily::GARCH_LSTM: return "GARCH-LSTM";
    }
    return "?";
}

inline std::optional<ModelFamily> family_from_name(std::string_view name) {
    for (ModelFamily f : kAllFamilies)
        if (family_name(f) == name) return f;
    return std::nullopt;
}

inline bool is_hybrid(ModelFamily family) {
    return family == ModelFamily::GARCH_GRU || family == ModelFamily::GARCH_LSTM;
}

inline bool is_recurrent(ModelFamily family) {
    return family == ModelFamily::GRU || family == ModelFamily::LSTM || is_hybrid(family);
}

enum class Segment { Tuning, Implementation };

inline std::string_view segment_name(Segment s) {
    return s == Segment::Tuning ? "tuning" : "implementation";
}

/// One rolling-forecast outcome: predicted vs realized price for a date.
struct ForecastRecord {
    Date date;
    double predicted = 0.0; // PV, yuan/ton
    double realized = 0.0;  // RV, yuan/ton
    std::string model_id;
    Segment segment = Segment::Tuning;
};

inline std::vector<ForecastRecord> filter_segment(const std::vector<ForecastRecord>& records,
                                                  Segment segment) {
    std::vector<ForecastRecord> out;
    for (const auto& r : records)
        if (r.segment == segment) out.push_back(r);
    return out;
}

inline std::string records_to_csv(const std::vector<ForecastRecord>& records, std::size_t window) {
    std::string out = "model,window,date,pv,rv,segment\n";
    for (const auto& r : records) {
        out += r.model_id + "," + std::to_string(window) + "," + r.date.to_string() + "," +
               format_double(r.predicted) + "," + format_double(r.realized) + "," +
               std::string(segment_name(r.segment)) + "\n";
    }
    return out;
}

/// One forecast row as stored in forecasts.csv, window column included.
struct StoredRecord {
    ForecastRecord record;
    std::size_t window = 0;
};

inline std::vector<StoredRecord> records_from_csv_lines(const std::vector<std::string>& lines) {
    if (lines.empty() || split_csv_line(lines[0]) !=
                             std::vector<std::string>{"model", "window", "date", "pv", "rv", "segment"})
        throw SchemaError("forecast CSV must start with header model,window,date,pv,rv,segment");
    std::vector<StoredRecord> out;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const auto f = split_csv_line(lines[i]);
        if (f.size() != 6) throw ParseError("forecast CSV row " + std::to_string(i + 1) + " malformed");
        StoredRecord s;
        s.record.model_id = f[0];
        s.window = std::stoul(f[1]);
        s.record.date = Date::parse(f[2]);
        s.record.predicted = parse_double(f[3], "pv, row " + std::to_string(i + 1));
        s.record.realized = parse_double(f[4], "rv, row " + std::to_string(i + 1));
        if (f[5] == "tuning")
            s.record.segment = Segment::Tuning;
        else if (f[5] == "implementation")
            s.record.segment = Segment::Implementation;
        else
            throw ParseError("unknown segment '" + f[5] + "' in forecast CSV row " +
                             std::to_string(i + 1));
        out.push_back(std::move(s));
    }
    return out;
}

} // namespace carbcast
