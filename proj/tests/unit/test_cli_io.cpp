#include "support/networks.hpp"

#include "mcnet/io.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <sstream>

using namespace mcnet;
using namespace mcnet::io;
using json = nlohmann::json;

namespace {

std::string fixture(std::string_view name) { return std::string(fixture_text(name)); }

std::vector<std::vector<std::string>> split_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::vector<std::string> cells;
        std::string cell;
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            const char c = line[i];
            if (quoted) {
                if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                    cell += '"';
                    ++i;
                } else if (c == '"') {
                    quoted = false;
                } else {
                    cell += c;
                }
            } else if (c == '"') {
                quoted = true;
            } else if (c == ',') {
                cells.push_back(cell);
                cell.clear();
            } else {
                cell += c;
            }
        }
        cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

struct CmdRun {
    int code;
    std::string out, err;
};

CmdRun validate(const std::string& text) {
    std::ostringstream out, err;
    const int code = cmd_validate(text, out, err);
    return {code, out.str(), err.str()};
}

CmdRun solve(const std::string& text, SolveOptions opts = {}) {
    std::ostringstream out, err;
    const int code = cmd_solve(text, opts, out, err);
    return {code, out.str(), err.str()};
}

CmdRun sweep(const std::string& text, const SweepOptions& opts) {
    std::ostringstream out, err;
    const int code = cmd_sweep(text, opts, out, err);
    return {code, out.str(), err.str()};
}

json edit(std::string_view name) { return json::parse(fixture_text(name)); }

}  // namespace

TEST(Units, Factors) {
    EXPECT_DOUBLE_EQ(parse_quantity("2.5 MW", Dimension::Power), 2.5e6);
    EXPECT_DOUBLE_EQ(parse_quantity("-0.662 Mvar", Dimension::Power), -0.662e6);
    EXPECT_DOUBLE_EQ(parse_quantity("6 bar", Dimension::Pressure), 6e5);
    EXPECT_DOUBLE_EQ(parse_quantity("12 mbar", Dimension::Pressure), 1200.0);
    EXPECT_DOUBLE_EQ(parse_quantity("338.15 K", Dimension::Temperature), 338.15);
    EXPECT_DOUBLE_EQ(parse_quantity("500 m", Dimension::Length), 500.0);
    EXPECT_DOUBLE_EQ(parse_quantity("15 cm", Dimension::Length), 0.15);
    EXPECT_DOUBLE_EQ(parse_quantity("0.69 kV", Dimension::Voltage), 690.0);
    EXPECT_DOUBLE_EQ(parse_quantity("180 deg", Dimension::Angle), 3.14159265358979323846);
    EXPECT_DOUBLE_EQ(parse_quantity("141.8 MJ/kg", Dimension::SpecificEnergy), 1.418e8);
    EXPECT_DOUBLE_EQ(parse_quantity("42", Dimension::Power), 42.0);
    EXPECT_THROW(parse_quantity("2 bar", Dimension::Power), DocumentError);
    EXPECT_THROW(parse_quantity("2 furlong", Dimension::Length), DocumentError);
    EXPECT_THROW(parse_quantity("abc MW", Dimension::Power), DocumentError);
    EXPECT_EQ(display_unit(Symbol::ActivePower), "MW");
    EXPECT_EQ(display_unit(Symbol::ReactivePower), "Mvar");
    EXPECT_EQ(display_unit(Symbol::Pressure), "bar");
    EXPECT_EQ(display_factor(Symbol::Pressure), 1e5);
}

TEST(Units, FormatNumber) {
    EXPECT_EQ(format_number(0.1), "0.1");
    EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333333");
    EXPECT_EQ(format_number(-2.5e6), "-2500000");
}

TEST(Documents, EveryFixtureParsesAndIsSquare) {
    ASSERT_EQ(fixture_names().size(), 7u);
    for (const std::string& name : fixture_names()) {
        const Document doc = parse_document(fixture_text(name));
        EXPECT_EQ(doc.name, name);
        EXPECT_TRUE(check_square(doc.network, doc.bcs).square()) << name;
    }
    EXPECT_THROW(fixture_text("nope"), DocumentError);
}

TEST(Documents, ReferenceFixtureMatchesCodeBuiltNetwork) {
    const Document doc = parse_document(fixture_text("fig4_known_eff"));
    const Network net = mcnet::testing::fig4();
    ASSERT_EQ(doc.network.registry().size(), net.registry().size());
    for (SlotIndex s = 0; s < net.registry().size(); ++s) {
        EXPECT_EQ(doc.network.registry()[s].label, net.registry()[s].label);
    }
    EXPECT_EQ(doc.bcs.size(), 12u);
}

TEST(Documents, RoundTrip) {
    for (const std::string& name : fixture_names()) {
        const Document a = parse_document(fixture_text(name));
        const std::string text = serialize_document(a);
        const Document b = parse_document(text);
        EXPECT_TRUE(a.network == b.network) << name;
        EXPECT_EQ(a.bcs, b.bcs) << name;
        EXPECT_EQ(a.solver, b.solver) << name;
        EXPECT_EQ(serialize_document(b), text) << name;
    }
}

TEST(Documents, Errors) {
    auto expect_error = [](const json& j, std::string_view fragment) {
        try {
            parse_document(j.dump());
            ADD_FAILURE() << "accepted: " << fragment;
        } catch (const DocumentError& e) {
            EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
        }
    };
    EXPECT_THROW(parse_document("{"), DocumentError);

    json j = edit("fig4_known_eff");
    j["schema_version"] = 2;
    expect_error(j, "schema_version");

    j = edit("fig4_known_eff");
    for (auto& l : j["links"]) {
        if (l["type"] == "gas_pipe") l["pipe_constant"] = 1.0;
    }
    expect_error(j, "links[");

    j = edit("fig4_known_eff");
    j["boundary_conditions"]["template"] = "mystery";
    expect_error(j, "template");

    j = edit("fig4_known_eff");
    j["boundary_conditions"]["values"]["P_9z"] = 1.0;
    expect_error(j, "P_9z");

    j = edit("fig4_known_eff");
    j["nodes"][0]["colour"] = "red";
    expect_error(j, "colour");

    j = edit("fig2_p2g");
    j["links"][0]["to"] = "9x";
    expect_error(j, "9x");

    j = edit("fig2_p2g");
    j["boundary_conditions"]["values"]["P_0e"] = "2 bar";
    expect_error(j, "P_0e");
}

TEST(Documents, ExplicitSlots) {
    json j = edit("fig2_p2g");
    j["boundary_conditions"] = {{"slots", {{"P_{0e}", "-2 MW"}, {"Q_{0e,0c}", 0}}}};
    const Document doc = parse_document(j.dump());
    EXPECT_EQ(doc.bcs.size(), 2u);
    EXPECT_FALSE(doc.boundary.template_kind.has_value());
    const Document back = parse_document(serialize_document(doc));
    EXPECT_EQ(back.bcs, doc.bcs);
}

TEST(Guess, ParsesLabelsWithUnits) {
    const Document doc = parse_document(fixture_text("fig4_known_eff"));
    const auto g = parse_guess(R"({"V_{0e}": "398 V", "p_{0h}": "6.3 bar"})", doc.network);
    ASSERT_EQ(g.size(), 2u);
    EXPECT_EQ(g[1].second, 6.3e5);
    EXPECT_THROW(parse_guess(R"({"bogus": 1})", doc.network), DocumentError);
}

TEST(Validate, ReportsCountsAndVerdicts) {
    CmdRun r = validate(fixture("fig4_known_eff"));
    EXPECT_EQ(r.code, kExitOk);
    EXPECT_NE(r.out.find("18 equations, 18 unknowns after 12 fixed"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("square: Square"), std::string::npos);
    EXPECT_NE(r.out.find("nonsingular"), std::string::npos);

    r = validate(fixture("fig3_electrolyser_free"));
    EXPECT_EQ(r.code, kExitOk);
    EXPECT_NE(r.out.find("10 equations, 10 unknowns after 5 fixed"), std::string::npos) << r.out;

    json j = edit("fig4_known_eff");
    j["boundary_conditions"] = {{"slots", {{"P_{1e}", -2.5e6}}}};
    r = validate(j.dump());
    EXPECT_EQ(r.code, kExitValidation);
    EXPECT_NE(r.out.find("Underdetermined(11)"), std::string::npos) << r.out;

    r = validate("not json");
    EXPECT_EQ(r.code, kExitParse);
    EXPECT_NE(r.err.find("parse error"), std::string::npos);
}

TEST(Solve, P2GClosedForm) {
    const CmdRun r = solve(fixture("fig2_p2g"));
    EXPECT_EQ(r.code, kExitOk) << r.err;
    EXPECT_NE(r.out.find("0.0126939351199"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("Converged"), std::string::npos);
}

TEST(Solve, TableListsEverySlotOnceAndDerivedRows) {
    const CmdRun r = solve(fixture("fig4_known_eff"));
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const Document doc = parse_document(fixture_text("fig4_known_eff"));
    for (SlotIndex s = 0; s < doc.network.registry().size(); ++s) {
        const std::string& label = doc.network.registry()[s].label;
        const std::string line_start = "\n" + label + " ";
        std::size_t count = 0;
        for (auto pos = r.out.find(line_start); pos != std::string::npos; pos = r.out.find(line_start, pos + 1)) ++count;
        EXPECT_EQ(count, 1u) << label;
    }
    for (const char* name : {"line loss[0e1e]", "gas Δp[0g1g]", "heat Δp[0h1h]", "supply ΔT[0h1h]", "return ΔT[0h1h]"}) {
        EXPECT_NE(r.out.find(name), std::string::npos) << name;
    }
}

TEST(Solve, CsvAndJsonCarryTheSameNumbers) {
    SolveOptions csv_opts;
    csv_opts.format = Format::Csv;
    const CmdRun csv = solve(fixture("fig4_known_eff"), csv_opts);
    SolveOptions json_opts;
    json_opts.format = Format::Json;
    const CmdRun js = solve(fixture("fig4_known_eff"), json_opts);
    ASSERT_EQ(csv.code, kExitOk);
    ASSERT_EQ(js.code, kExitOk);
    EXPECT_NE(csv.out.find("\r\n"), std::string::npos);

    const auto rows = split_csv(csv.out);
    ASSERT_GT(rows.size(), 1u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"kind", "name", "location", "value", "unit", "boundary"}));
    const json doc = json::parse(js.out);
    const json& slots = doc["slots"];
    std::size_t k = 0;
    std::size_t boundary = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i][0] != "slot") continue;
        ASSERT_LT(k, slots.size());
        EXPECT_EQ(rows[i][1], slots[k]["label"].get<std::string>());
        const double a = std::stod(rows[i][3]);
        const double b = slots[k]["value"].get<double>();
        EXPECT_LE(std::abs(a - b), 1e-11 * std::max(1.0, std::abs(b))) << rows[i][1];
        EXPECT_EQ(rows[i][5] == "1", slots[k]["boundary"].get<bool>());
        boundary += rows[i][5] == "1";
        ++k;
    }
    EXPECT_EQ(k, slots.size());
    EXPECT_EQ(boundary, 12u);
    EXPECT_EQ(doc["diagnostics"]["status"], "Converged");
    EXPECT_EQ(doc["diagnostics"]["equations"], 18);
    EXPECT_LE(doc["diagnostics"]["final_residual"].get<double>(), 1e-6);
}

TEST(Solve, BoundaryValuesAreEchoed) {
    SolveOptions opts;
    opts.format = Format::Json;
    const json doc = json::parse(solve(fixture("fig4_known_eff"), opts).out);
    for (const json& s : doc["slots"]) {
        if (s["label"] == "p_{1h}") {
            EXPECT_TRUE(s["boundary"].get<bool>());
            EXPECT_DOUBLE_EQ(s["value"].get<double>(), 6.0);
            EXPECT_EQ(s["unit"], "bar");
        }
    }
}

TEST(Solve, FailureExitCodes) {
    SolveOptions opts;
    opts.guess_text = R"({"m_{0h,1h}": 0, "m_{0c,0h}": 0})";
    CmdRun r = solve(fixture("fig4_known_eff"), opts);
    EXPECT_EQ(r.code, kExitSolver);
    EXPECT_NE(r.err.find("SingularJacobian"), std::string::npos) << r.err;
    EXPECT_FALSE(r.out.empty());

    opts = {};
    opts.guess_text = "{";
    EXPECT_EQ(solve(fixture("fig4_known_eff"), opts).code, kExitParse);

    opts = {};
    opts.damping = 2.0;
    EXPECT_EQ(solve(fixture("fig4_known_eff"), opts).code, kExitParse);

    opts = {};
    opts.max_iter = 1;
    EXPECT_EQ(solve(fixture("fig4_known_eff"), opts).code, kExitSolver);

    json j = edit("fig2_p2g");
    j["boundary_conditions"] = {{"slots", json::object()}};
    EXPECT_EQ(solve(j.dump()).code, kExitValidation);
}

TEST(CsvField, Quoting) {
    EXPECT_EQ(csv_field("plain"), "plain");
    EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
    EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
    EXPECT_EQ(csv_field("two\nlines"), "\"two\nlines\"");
}

TEST(Sweep, Ranges) {
    EXPECT_EQ(parse_range("0:1:3"), (std::vector<double>{0.0, 0.5, 1.0}));
    EXPECT_EQ(parse_range("2:5:1"), (std::vector<double>{2.0}));
    EXPECT_TRUE(parse_range("0:1:0").empty());
    EXPECT_THROW(parse_range("0:1"), DocumentError);
    EXPECT_EQ(parse_value_list("0,0.5, 1"), (std::vector<double>{0.0, 0.5, 1.0}));
    EXPECT_TRUE(parse_value_list("").empty());
    EXPECT_THROW(parse_value_list("1,x"), DocumentError);
}

TEST(Sweep, HeatEfficiencySplitsTheInputLinearly) {
    SweepOptions opts;
    opts.parameter = "eta_h";
    opts.values = {0.0, 1.0 / 6.0, 1.0 / 3.0, 0.5, 1.0 - 1e-3};
    const CmdRun r = sweep(fixture("fig3_electrolyser_known"), opts);
    ASSERT_EQ(r.code, kExitOk) << r.err << r.out;
    const auto rows = split_csv(r.out);
    ASSERT_EQ(rows.size(), opts.values.size() + 1);
    const auto& h = rows[0];
    auto col = [&](std::string_view name) {
        return static_cast<std::size_t>(std::find(h.begin(), h.end(), name) - h.begin());
    };
    const std::size_t chem = col("HHV*q[0c] (MW)"), heat = col("dphi[0c] (MW)"), pin = col("P[0c] (MW)");
    ASSERT_LT(chem, h.size());
    ASSERT_LT(heat, h.size());
    for (std::size_t i = 0; i < opts.values.size(); ++i) {
        const auto& row = rows[i + 1];
        // eta_h = 0 puts no heat out, so the heat side cannot converge there.
        if (opts.values[i] == 0.0) continue;
        ASSERT_EQ(row[1], "Converged") << row[1];
        const double p = std::stod(row[pin]);
        EXPECT_NEAR(std::stod(row[chem]), 0.9 * p * (1.0 - opts.values[i]), 1e-9);
        EXPECT_NEAR(std::stod(row[heat]), 0.9 * p * opts.values[i], 1e-9);
    }
}

TEST(Sweep, PowerSweepAtFixedShare) {
    SweepOptions opts;
    opts.parameter = "P_0e";
    opts.unit = "MW";
    opts.values = {-1.0, -2.0, -3.0};
    const CmdRun r = sweep(fixture("fig3_electrolyser_known"), opts);
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const auto rows = split_csv(r.out);
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_EQ(rows[0][0], "P_0e (MW)");
    const auto& h = rows[0];
    const std::size_t heat = static_cast<std::size_t>(std::find(h.begin(), h.end(), "dphi[0c] (MW)") - h.begin());
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_NEAR(std::stod(rows[i + 1][heat]), 0.15 * -opts.values[i], 1e-9);
    }
}

TEST(Sweep, EmptyRangeAndJobs) {
    SweepOptions opts;
    opts.parameter = "P_0e";
    opts.unit = "MW";
    const CmdRun empty = sweep(fixture("fig3_electrolyser_known"), opts);
    EXPECT_EQ(empty.code, kExitOk);
    EXPECT_EQ(split_csv(empty.out).size(), 1u);

    opts.values = parse_range("-1:-3:9");
    const CmdRun serial = sweep(fixture("fig3_electrolyser_known"), opts);
    opts.jobs = 4;
    const CmdRun parallel = sweep(fixture("fig3_electrolyser_known"), opts);
    EXPECT_EQ(serial.out, parallel.out);

    opts.parameter = "nonsense";
    EXPECT_NE(sweep(fixture("fig3_electrolyser_known"), opts).code, kExitOk);
}
