#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "carbcast/panel.hpp"
#include "carbcast/rng.hpp"
#include "carbcast/synth.hpp"

using namespace carbcast;
namespace fs = std::filesystem;

namespace {

fs::path temp_csv(const std::string& name, const std::string& content) {
    const fs::path path = fs::temp_directory_path() / name;
    std::ofstream out(path, std::ios::trunc);
    out << content;
    return path;
}

} // namespace

TEST_CASE("load_panel reads a well-formed file", "[panel]") {
    const auto path = temp_csv("panel_basic.csv",
                               "date,SHEA,SZA\n"
                               "2018-07-02,36.5,24.1\n"
                               "2018-07-03,36.7,24.3\n"
                               "2018-07-04,36.2,24.0\n");
    const auto panel = load_panel(path, {VariableCode::SHEA, VariableCode::SZA});
    REQUIRE(panel.length() == 3);
    REQUIRE(panel.column(VariableCode::SHEA)[1] == 36.7);
    REQUIRE(panel.dates()[0].to_string() == "2018-07-02");
}

TEST_CASE("load_panel is invariant to column order", "[panel]") {
    const auto a = temp_csv("panel_order_a.csv",
                            "date,SHEA,SZA\n2018-07-02,36.5,24.1\n2018-07-03,36.7,24.3\n");
    const auto b = temp_csv("panel_order_b.csv",
                            "date,SZA,SHEA\n2018-07-02,24.1,36.5\n2018-07-03,24.3,36.7\n");
    const std::vector<VariableCode> schema = {VariableCode::SHEA, VariableCode::SZA};
    REQUIRE(load_panel(a, schema) == load_panel(b, schema));
}

TEST_CASE("load_panel sorts rows into date order", "[panel]") {
    const auto path = temp_csv("panel_unsorted.csv",
                               "date,SHEA\n2018-07-04,36.2\n2018-07-02,36.5\n2018-07-03,36.7\n");
    const auto panel = load_panel(path, {VariableCode::SHEA});
    REQUIRE(panel.dates()[0] < panel.dates()[1]);
    REQUIRE(panel.column(VariableCode::SHEA)[0] == 36.5);
}

TEST_CASE("load_panel error paths", "[panel]") {
    SECTION("duplicate date names the offender") {
        const auto path = temp_csv("panel_dup.csv",
                                   "date,SHEA\n2018-07-02,36.5\n2018-07-02,36.8\n");
        REQUIRE_THROWS_MATCHES(load_panel(path, {VariableCode::SHEA}), OrderingError,
                               Catch::Matchers::MessageMatches(
                                   Catch::Matchers::ContainsSubstring("2018-07-02")));
    }
    SECTION("unknown column is rejected") {
        const auto path = temp_csv("panel_unknown.csv", "date,NOPE\n2018-07-02,1\n");
        REQUIRE_THROWS_MATCHES(
            load_panel(path, {VariableCode::SHEA}), SchemaError,
            Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring("NOPE")));
    }
    SECTION("missing schema column is named") {
        const auto path = temp_csv("panel_missing_col.csv", "date,SZA\n2018-07-02,24.1\n");
        REQUIRE_THROWS_MATCHES(
            load_panel(path, {VariableCode::SHEA, VariableCode::SZA}), SchemaError,
            Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring("SHEA")));
    }
    SECTION("non-numeric cell reports row and column") {
        const auto path = temp_csv("panel_bad_cell.csv",
                                   "date,SHEA\n2018-07-02,36.5\n2018-07-03,oops\n");
        REQUIRE_THROWS_MATCHES(
            load_panel(path, {VariableCode::SHEA}), ParseError,
            Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring("row 3") &&
                                            Catch::Matchers::ContainsSubstring("SHEA")));
    }
    SECTION("missing file carries the path") {
        REQUIRE_THROWS_MATCHES(load_panel("/nonexistent/panel.csv", {VariableCode::SHEA}),
                               DataError,
                               Catch::Matchers::MessageMatches(
                                   Catch::Matchers::ContainsSubstring("/nonexistent/panel.csv")));
    }
}

TEST_CASE("missing markers: empty cell and NA", "[panel]") {
    const auto path = temp_csv("panel_na.csv",
                               "date,SHEA,SZA\n"
                               "2018-07-02,36.5,NA\n"
                               "2018-07-03,,24.3\n");
    const auto panel = load_panel(path, {VariableCode::SHEA, VariableCode::SZA});
    REQUIRE(is_missing(panel.column(VariableCode::SZA)[0]));
    REQUIRE(is_missing(panel.column(VariableCode::SHEA)[1]));
    REQUIRE(panel.has_missing());
}

TEST_CASE("fill_missing_series midpoint and boundary rules", "[panel]") {
    REQUIRE(fill_missing_series({1.0, kMissing, 3.0}, "x") == std::vector<double>{1.0, 2.0, 3.0});
    REQUIRE(fill_missing_series({kMissing, 4.0, 4.0}, "x") == std::vector<double>{4.0, 4.0, 4.0});
    // run of gaps: every cell takes the nearest-before/nearest-after mean
    REQUIRE(fill_missing_series({1.0, kMissing, kMissing, 7.0}, "x") ==
            std::vector<double>{1.0, 4.0, 4.0, 7.0});
    REQUIRE(fill_missing_series({5.0, kMissing}, "x") == std::vector<double>{5.0, 5.0});
    REQUIRE_THROWS_AS(fill_missing_series({kMissing, kMissing}, "x"), UnusableColumnError);
}

TEST_CASE("fill_missing rejects non-positive cleaned values", "[panel]") {
    std::vector<Date> dates = {Date{2020, 1, 1}, Date{2020, 1, 2}};
    const ObservationPanel panel(dates, {VariableCode::SHEA}, {{36.5, -0.2}});
    REQUIRE_THROWS_MATCHES(fill_missing(panel), DataError,
                           Catch::Matchers::MessageMatches(
                               Catch::Matchers::ContainsSubstring("2020-01-02")));
}

TEST_CASE("fill_missing is idempotent and touches only gaps", "[panel]") {
    Rng rng(2024);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> values(40);
        for (auto& v : values) v = rng.uniform(1.0, 100.0);
        std::vector<double> holey = values;
        bool any_left = false;
        for (auto& v : holey) {
            if (rng.uniform() < 0.3)
                v = kMissing;
            else
                any_left = true;
        }
        if (!any_left) holey[0] = values[0];
        const auto once = fill_missing_series(holey, "x");
        const auto twice = fill_missing_series(once, "x");
        REQUIRE(once == twice);
        for (std::size_t i = 0; i < values.size(); ++i)
            if (!is_missing(holey[i])) REQUIRE(once[i] == holey[i]);
    }
}

TEST_CASE("synthetic 605-day panel loads with all 23 columns", "[panel]") {
    SynthConfig config;
    const auto panel = synth_panel(config);
    REQUIRE(panel.length() == 605);
    REQUIRE(panel.codes().size() == 23);
    for (VariableCode code : panel.codes())
        for (double v : panel.column(code)) REQUIRE(v > 0.0);

    const auto path = fs::temp_directory_path() / "panel_roundtrip.csv";
    write_panel(panel, path);
    const auto reloaded = load_panel(path, panel.codes());
    REQUIRE(reloaded == panel); // write/load round-trip is the identity
}

TEST_CASE("load_panel_auto derives the schema from the header", "[panel]") {
    const auto path = temp_csv("panel_auto.csv", "date,GDEA\n2018-07-02,19.5\n2018-07-03,19.8\n");
    const auto panel = load_panel_auto(path);
    REQUIRE(panel.codes() == std::vector<VariableCode>{VariableCode::GDEA});
}

TEST_CASE("transform_series: level, log-return, first difference", "[panel]") {
    std::vector<Date> dates;
    for (int i = 0; i < 3; ++i) dates.push_back(Date{2020, 1, 1 + i});
    const ObservationPanel panel(dates, {VariableCode::SHEA, VariableCode::SZA},
                                 {{100.0, 100.0, 100.0 * std::exp(1.0)}, {5.0, 9.0, 4.0}});

    const auto level = transform_series(panel, {TransformKind::Level, VariableCode::SZA});
    REQUIRE(level == panel.column(VariableCode::SZA));

    const auto diff = transform_series(panel, {TransformKind::FirstDifference, VariableCode::SZA});
    REQUIRE(diff == std::vector<double>{4.0, -5.0});

    const auto lr = transform_series(panel, {TransformKind::LogReturn, VariableCode::SHEA});
    REQUIRE(lr.size() == 2);
    REQUIRE(lr[0] == 0.0);
    REQUIRE_THAT(lr[1], Catch::Matchers::WithinAbs(1.0, 1e-15));
}

TEST_CASE("log-return of a non-positive value reports the date", "[panel]") {
    std::vector<Date> dates = {Date{2020, 1, 1}, Date{2020, 1, 2}};
    const ObservationPanel panel(dates, {VariableCode::SHEA}, {{100.0, -1.0}});
    REQUIRE_THROWS_MATCHES(
        transform_series(panel, {TransformKind::LogReturn, VariableCode::SHEA}), DomainError,
        Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring("2020-01-02")));
}

TEST_CASE("panel invariants enforced at construction", "[panel]") {
    std::vector<Date> dates = {Date{2020, 1, 2}, Date{2020, 1, 1}};
    REQUIRE_THROWS_AS(ObservationPanel(dates, {VariableCode::SHEA}, {{1.0, 2.0}}), OrderingError);
    std::vector<Date> ok = {Date{2020, 1, 1}, Date{2020, 1, 2}};
    REQUIRE_THROWS_AS(ObservationPanel(ok, {VariableCode::SHEA}, {{1.0}}), SchemaError);
    REQUIRE_THROWS_AS(
        ObservationPanel(ok, {VariableCode::SHEA, VariableCode::SHEA}, {{1.0, 2.0}, {1.0, 2.0}}),
        SchemaError);
}

TEST_CASE("date parsing and arithmetic", "[panel]") {
    const Date d = Date::parse("2020-02-29");
    REQUIRE(d.to_string() == "2020-02-29");
    REQUIRE(Date::from_days(d.to_days()) == d);
    REQUIRE(d.plus_days(1).to_string() == "2020-03-01");
    REQUIRE_THROWS_AS(Date::parse("2019-02-29"), ParseError);
    REQUIRE_THROWS_AS(Date::parse("2019/01/01"), ParseError);
}
