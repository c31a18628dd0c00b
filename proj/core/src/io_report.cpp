#include "mcnet/carrier_equations.hpp"
#include "mcnet/io.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <iomanip>
#include <ostream>
#include <thread>

namespace mcnet::io {

using ordered_json = nlohmann::ordered_json;

// -----------------------------------------------------------------------------
// Report construction
// -----------------------------------------------------------------------------

std::vector<DerivedRow> derived_quantities(const Network& network, std::span<const double> state) {
    const VariableRegistry& reg = network.registry();
    auto value = [&](Symbol s, Location where) { return state[reg.index(SlotKey{s, std::move(where)})]; };
    const HeatParams& heat = network.params().heat;

    std::vector<DerivedRow> out;
    for (const Link& link : network.links()) {
        const std::string tag = "[" + link.id + "]";
        if (const auto* line = std::get_if<TransmissionLine>(&link.kind)) {
            const LineFlows f = line_power_flows(
                value(Symbol::VoltageMagnitude, Location::node(link.from)),
                value(Symbol::VoltageAngle, Location::node(link.from)),
                value(Symbol::VoltageMagnitude, Location::node(link.to)),
                value(Symbol::VoltageAngle, Location::node(link.to)), line->conductance, line->susceptance);
            out.push_back({"P_{" + link.from + "," + link.to + "}" + tag, f.p_send / 1e6, "MW"});
            out.push_back({"Q_{" + link.from + "," + link.to + "}" + tag, f.q_send / 1e6, "Mvar"});
            out.push_back({"P_{" + link.to + "," + link.from + "}" + tag, f.p_recv / 1e6, "MW"});
            out.push_back({"Q_{" + link.to + "," + link.from + "}" + tag, f.q_recv / 1e6, "Mvar"});
            out.push_back({"line loss" + tag, (f.p_send + f.p_recv) / 1e6, "MW"});
        } else if (std::holds_alternative<GasPipe>(link.kind)) {
            const double dp = value(Symbol::Pressure, Location::node(link.from)) -
                              value(Symbol::Pressure, Location::node(link.to));
            out.push_back({"gas Δp" + tag, dp / 1e5, "bar"});
        } else if (const auto* pipe = std::get_if<HeatPipe>(&link.kind)) {
            const double dp = value(Symbol::Pressure, Location::node(link.from)) -
                              value(Symbol::Pressure, Location::node(link.to));
            const double m = value(Symbol::MassFlow, Location::link(link.id));
            const double ts = value(Symbol::SupplyTemperature, Location::link(link.id));
            const double tr = value(Symbol::ReturnTemperature, Location::link(link.id));
            auto outlet = [&](double t_in) {
                return decayed_temperature(t_in, m, pipe->heat_transfer, pipe->length, heat.specific_heat,
                                           heat.ambient_temperature)
                    .value;
            };
            out.push_back({"heat Δp" + tag, dp / 1e5, "bar"});
            out.push_back({"supply ΔT" + tag, ts - outlet(ts), "K"});
            out.push_back({"return ΔT" + tag, tr - outlet(tr), "K"});
        }
    }
    return out;
}

SolutionReport build_report(const Network& network, const BoundaryConditionSet& bcs, const SolveResult& result) {
    SolutionReport report;
    report.result = result;
    const VariableRegistry& reg = network.registry();
    if (result.state.size() != reg.size()) throw ModelError("solve result does not match the registry");
    for (SlotIndex s = 0; s < reg.size(); ++s) {
        const Slot& slot = reg[s];
        ReportRow row;
        row.label = slot.label;
        row.symbol = slot.key.symbol;
        row.location = to_string(slot.key.location);
        row.si_value = result.state[s];
        row.value = row.si_value / display_factor(row.symbol);
        row.unit = display_unit(row.symbol);
        row.boundary = bcs.contains(s);
        report.slots.push_back(std::move(row));
    }
    report.derived = derived_quantities(network, result.state);
    return report;
}

std::optional<Format> parse_format(std::string_view name) {
    if (name == "table") return Format::Table;
    if (name == "csv") return Format::Csv;
    if (name == "json") return Format::Json;
    return std::nullopt;
}

std::string csv_field(std::string_view text) {
    if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

namespace {

void write_table(std::ostream& out, const SolutionReport& r) {
    std::size_t width = 8;
    for (const auto& row : r.slots) width = std::max(width, row.label.size());
    for (const auto& row : r.derived) width = std::max(width, row.name.size());
    const int w = static_cast<int>(width) + 2;

    out << std::left << std::setw(w) << "slot" << std::right << std::setw(20) << "value"
        << "  unit\n";
    for (const auto& row : r.slots) {
        out << std::left << std::setw(w) << row.label << std::right << std::setw(20) << format_number(row.value)
            << "  " << std::left << std::setw(5) << row.unit << (row.boundary ? " (fixed)" : "") << "\n";
    }
    if (!r.derived.empty()) {
        out << "\n" << std::left << std::setw(w) << "derived" << "\n";
        for (const auto& row : r.derived) {
            // setw counts bytes; pad by hand so multi-byte names line up.
            std::size_t glyphs = 0;
            for (unsigned char c : row.name) glyphs += (c & 0xC0) != 0x80;
            out << row.name << std::string(static_cast<std::size_t>(w) - glyphs, ' ') << std::right
                << std::setw(20) << format_number(row.value) << "  " << row.unit << "\n";
        }
    }
    const SolveResult& s = r.result;
    out << "\nstatus " << to_string(s.status) << ", " << s.iterations << " iterations, |F| = "
        << format_number(s.final_residual()) << "\n";
    if (!s.message.empty()) out << s.message << "\n";
}

void write_csv(std::ostream& out, const SolutionReport& r) {
    out << "kind,name,location,value,unit,boundary\r\n";
    for (const auto& row : r.slots) {
        out << "slot," << csv_field(row.label) << "," << csv_field(row.location) << ","
            << format_number(row.value) << "," << csv_field(row.unit) << "," << (row.boundary ? 1 : 0) << "\r\n";
    }
    for (const auto& row : r.derived) {
        out << "derived," << csv_field(row.name) << ",," << format_number(row.value) << ","
            << csv_field(row.unit) << ",0\r\n";
    }
}

void write_json(std::ostream& out, const SolutionReport& r) {
    ordered_json root;
    root["slots"] = ordered_json::array();
    for (const auto& row : r.slots) {
        root["slots"].push_back({
            {"label", row.label},
            {"symbol", symbol_tag(row.symbol)},
            {"location", row.location},
            {"value", row.value},
            {"unit", row.unit},
            {"si_value", row.si_value},
            {"boundary", row.boundary},
        });
    }
    root["derived"] = ordered_json::array();
    for (const auto& row : r.derived) {
        root["derived"].push_back({{"name", row.name}, {"value", row.value}, {"unit", row.unit}});
    }
    const SolveResult& s = r.result;
    ordered_json diag;
    diag["status"] = to_string(s.status);
    diag["iterations"] = s.iterations;
    diag["final_residual"] = s.final_residual();
    diag["message"] = s.message;
    if (s.dofs) {
        diag["equations"] = s.dofs->equations;
        diag["unknowns"] = s.dofs->unknowns;
    }
    if (s.square) diag["square"] = s.square->to_string();
    if (s.rank_at_guess) diag["rank_at_guess"] = s.rank_at_guess->to_string();
    root["diagnostics"] = diag;
    root["residual_history"] = s.residual_history;
    out << root.dump(2) << "\n";
}

}  // namespace

void write_report(std::ostream& out, const SolutionReport& report, Format format) {
    switch (format) {
        case Format::Table: write_table(out, report); break;
        case Format::Csv: write_csv(out, report); break;
        case Format::Json: write_json(out, report); break;
    }
}

// -----------------------------------------------------------------------------
// Commands
// -----------------------------------------------------------------------------

namespace {

// Parses, printing the error and returning nullopt on failure.
std::optional<Document> parse_or_report(std::string_view text, std::ostream& err) {
    try {
        return parse_document(text);
    } catch (const DocumentError& e) {
        err << "parse error: " << e.what() << "\n";
    } catch (const std::exception& e) {
        err << "parse error: " << e.what() << "\n";
    }
    return std::nullopt;
}

}  // namespace

int cmd_validate(std::string_view document_text, std::ostream& out, std::ostream& err) {
    const auto doc = parse_or_report(document_text, err);
    if (!doc) return kExitParse;

    const DofCount dofs = count_dofs(doc->network, doc->bcs);
    const SquareVerdict square = check_square(doc->network, doc->bcs);
    out << dofs.equations << " equations, " << dofs.unknowns << " unknowns after " << doc->bcs.size()
        << " fixed\n";
    out << "square: " << square.to_string() << "\n";
    if (!square.square()) return kExitValidation;

    try {
        const InitialGuess probe = initial_guess_from_labels(doc->network, doc->bcs, doc->initial_guess);
        const RankVerdict rank = jacobian_rank_probe(doc->network, doc->bcs, probe.values, doc->solver.min_pivot);
        out << "probe: " << (rank.nonsingular ? "nonsingular" : "singular") << " at probe ("
            << rank.to_string() << ", pivot ratio " << format_number(rank.pivot_ratio) << ")\n";
        return rank.nonsingular ? kExitOk : kExitValidation;
    } catch (const std::exception& e) {
        err << "probe failed: " << e.what() << "\n";
        return kExitValidation;
    }
}

int cmd_solve(std::string_view document_text, const SolveOptions& options, std::ostream& out, std::ostream& err) {
    auto doc = parse_or_report(document_text, err);
    if (!doc) return kExitParse;

    SolverConfig config = doc->solver;
    if (options.tol) config.tol = *options.tol;
    if (options.max_iter) config.max_iter = *options.max_iter;
    if (options.damping) config.damping = *options.damping;
    try {
        config.validate();
    } catch (const ModelError& e) {
        err << "invalid solver option: " << e.what() << "\n";
        return kExitParse;
    }

    const SquareVerdict square = check_square(doc->network, doc->bcs);
    if (!square.square()) {
        err << "validation failed: system is " << square.to_string() << "\n";
        return kExitValidation;
    }

    auto guess_values = doc->initial_guess;
    if (options.guess_text) {
        try {
            for (auto& kv : parse_guess(*options.guess_text, doc->network)) guess_values.push_back(kv);
        } catch (const DocumentError& e) {
            err << "parse error in guess: " << e.what() << "\n";
            return kExitParse;
        }
    }

    SolveResult result;
    try {
        std::optional<InitialGuess> guess;
        if (!guess_values.empty()) guess = initial_guess_from_labels(doc->network, doc->bcs, guess_values);
        result = solve_network(doc->network, doc->bcs, config, guess);
    } catch (const std::exception& e) {
        err << "solver error: " << e.what() << "\n";
        return kExitSolver;
    }

    write_report(out, build_report(doc->network, doc->bcs, result), options.format);
    if (!result.converged()) {
        err << "solver failed: " << to_string(result.status);
        if (!result.message.empty()) err << " (" << result.message << ")";
        err << "\n";
        return kExitSolver;
    }
    return kExitOk;
}

std::vector<double> parse_value_list(std::string_view text) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = std::min(text.find(',', pos), text.size());
        std::string_view item = text.substr(pos, comma - pos);
        while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
        while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
        if (!item.empty()) {
            double v = 0.0;
            const auto [end, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
            if (ec != std::errc{} || end != item.data() + item.size()) {
                throw DocumentError("values", "not a number: '" + std::string(item) + "'");
            }
            out.push_back(v);
        } else if (comma < text.size()) {
            throw DocumentError("values", "empty entry");
        }
        pos = comma + 1;
    }
    return out;
}

std::vector<double> parse_range(std::string_view text) {
    const auto parts = [&] {
        std::vector<std::string_view> p;
        std::size_t pos = 0;
        while (true) {
            const std::size_t c = text.find(':', pos);
            p.push_back(text.substr(pos, c == std::string_view::npos ? std::string_view::npos : c - pos));
            if (c == std::string_view::npos) break;
            pos = c + 1;
        }
        return p;
    }();
    if (parts.size() != 3) throw DocumentError("range", "expected start:stop:count");
    double a = 0.0, b = 0.0;
    long n = 0;
    auto num = [](std::string_view s, auto& v) {
        const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || end != s.data() + s.size()) {
            throw DocumentError("range", "not a number: '" + std::string(s) + "'");
        }
    };
    num(parts[0], a);
    num(parts[1], b);
    num(parts[2], n);
    if (n < 0) throw DocumentError("range", "count must be >= 0");
    std::vector<double> out;
    for (long k = 0; k < n; ++k) out.push_back(n == 1 ? a : a + (b - a) * static_cast<double>(k) / (n - 1));
    return out;
}

namespace {

struct SweepTarget {
    enum class Kind { Boundary, HeatEfficiency } kind = Kind::Boundary;
    SlotIndex slot = 0;
    std::string template_key;  // set when the parameter is a template key
    std::string coupling;      // for HeatEfficiency
    Dimension dim = Dimension::Dimensionless;
};

SweepTarget resolve_sweep_target(const Document& doc, const std::string& parameter) {
    SweepTarget target;
    const Network& net = doc.network;
    if (parameter == "eta_h" || parameter.starts_with("eta_h[")) {
        target.kind = SweepTarget::Kind::HeatEfficiency;
        std::vector<std::string> fixed;
        for (const Node& n : net.nodes()) {
            if (n.is_coupling() && !n.coupling->free_heat_efficiency()) fixed.push_back(n.id);
        }
        if (parameter == "eta_h") {
            if (fixed.size() != 1) throw DocumentError("param", "eta_h is ambiguous or absent; use eta_h[<id>]");
            target.coupling = fixed.front();
        } else {
            if (!parameter.ends_with("]")) throw DocumentError("param", "expected eta_h[<coupling id>]");
            target.coupling = parameter.substr(6, parameter.size() - 7);
            if (std::find(fixed.begin(), fixed.end(), target.coupling) == fixed.end()) {
                throw DocumentError("param", "no coupling with a fixed heat efficiency named " + target.coupling);
            }
        }
        return target;
    }

    if (doc.boundary.template_kind) {
        const auto slots = template_slots(net, *doc.boundary.template_kind, doc.boundary.template_options);
        if (auto it = slots.find(parameter); it != slots.end()) {
            target.slot = it->second;
            target.template_key = parameter;
            target.dim = dimension_of(net.registry()[target.slot].key.symbol);
            return target;
        }
    }
    const auto slot = net.registry().find(parameter);
    if (!slot || !doc.bcs.contains(*slot)) {
        throw DocumentError("param", "'" + parameter + "' is neither a boundary condition nor eta_h");
    }
    target.slot = *slot;
    target.dim = dimension_of(net.registry()[*slot].key.symbol);
    return target;
}

Network with_heat_efficiency(const Network& net, const std::string& coupling, double eta_h) {
    std::vector<Node> nodes = net.nodes();
    for (Node& n : nodes) {
        if (n.id == coupling) n.coupling->heat_efficiency = eta_h;
    }
    return build_network(std::move(nodes), net.links(), net.params());
}

struct SweepRow {
    double parameter = 0.0;
    std::string status;
    int iterations = 0;
    std::vector<std::optional<double>> outputs;
};

}  // namespace

int cmd_sweep(std::string_view document_text, const SweepOptions& options, std::ostream& out, std::ostream& err) {
    auto parsed = parse_or_report(document_text, err);
    if (!parsed) return kExitParse;
    const Document& doc = *parsed;

    SweepTarget target;
    double factor = 1.0;
    try {
        target = resolve_sweep_target(doc, options.parameter);
        factor = options.unit.empty() ? 1.0 : unit_factor(options.unit, target.dim, "unit");
    } catch (const std::exception& e) {
        err << "invalid sweep: " << e.what() << "\n";
        return kExitParse;
    }

    // Output columns per coupling node.
    struct Column {
        std::string header;
        std::string coupling;
        int what;  // 0 P, 1 q, 2 HHV q, 3 dphi, 4 eta_h
    };
    std::vector<Column> columns;
    for (const Node& n : doc.network.nodes()) {
        if (!n.is_coupling()) continue;
        const std::string c = "[" + n.id + "]";
        columns.push_back({"P" + c + " (MW)", n.id, 0});
        columns.push_back({"q" + c + " (kg/s)", n.id, 1});
        columns.push_back({"HHV*q" + c + " (MW)", n.id, 2});
        columns.push_back({"dphi" + c + " (MW)", n.id, 3});
        columns.push_back({"eta_h" + c, n.id, 4});
    }

    auto run_one = [&](double raw) {
        SweepRow row;
        row.parameter = raw;
        row.outputs.assign(columns.size(), std::nullopt);
        try {
            const double si = raw * factor;
            Network net = doc.network;
            BoundaryConditionSet bcs = doc.bcs;
            if (target.kind == SweepTarget::Kind::HeatEfficiency) {
                net = with_heat_efficiency(doc.network, target.coupling, si);
                bcs = build_boundary_set(net, doc.boundary);
            } else {
                bcs.set(target.slot, si);
            }
            std::optional<InitialGuess> guess;
            if (!doc.initial_guess.empty()) guess = initial_guess_from_labels(net, bcs, doc.initial_guess);
            const SolveResult result = solve_network(net, bcs, doc.solver, guess);
            row.status = to_string(result.status);
            row.iterations = result.iterations;
            if (!result.converged()) return row;

            const VariableRegistry& reg = net.registry();
            for (std::size_t k = 0; k < columns.size(); ++k) {
                const Node& node = net.node(columns[k].coupling);
                const CouplingUnit& unit = *node.coupling;
                auto link_value = [&](Carrier carrier, Symbol symbol) -> std::optional<double> {
                    for (std::size_t li : net.incident(node.id)) {
                        const Link& link = net.links()[li];
                        if (link.carrier() == carrier) {
                            return result.state[reg.index(SlotKey{symbol, Location::link(link.id)})];
                        }
                    }
                    return std::nullopt;
                };
                switch (columns[k].what) {
                    case 0:
                        if (auto v = link_value(Carrier::Electricity, Symbol::ActivePower)) row.outputs[k] = *v / 1e6;
                        break;
                    case 1: row.outputs[k] = link_value(Carrier::Gas, Symbol::GasFlow); break;
                    case 2:
                        if (auto v = link_value(Carrier::Gas, Symbol::GasFlow)) row.outputs[k] = unit.hhv * *v / 1e6;
                        break;
                    case 3:
                        if (auto v = link_value(Carrier::Heat, Symbol::HeatPower)) row.outputs[k] = *v / 1e6;
                        break;
                    case 4:
                        row.outputs[k] = unit.heat_efficiency
                                             ? *unit.heat_efficiency
                                             : result.state[reg.index(SlotKey{Symbol::HeatEfficiency,
                                                                               Location::coupling(node.id)})];
                        break;
                }
            }
        } catch (const std::exception& e) {
            row.status = std::string("error: ") + e.what();
        }
        return row;
    };

    std::vector<SweepRow> rows(options.values.size());
    const int jobs = std::max(1, std::min<int>(options.jobs, static_cast<int>(options.values.size())));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < rows.size(); i = next++) rows[i] = run_one(options.values[i]);
    };
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    }

    const std::string param_header = options.parameter + (options.unit.empty() ? "" : " (" + options.unit + ")");
    out << csv_field(param_header) << ",status,iterations";
    for (const auto& c : columns) out << "," << csv_field(c.header);
    out << "\r\n";
    bool all_ok = true;
    for (const SweepRow& row : rows) {
        all_ok = all_ok && row.status == "Converged";
        out << format_number(row.parameter) << "," << csv_field(row.status) << "," << row.iterations;
        for (const auto& v : row.outputs) out << "," << (v ? format_number(*v) : "");
        out << "\r\n";
    }
    return all_ok ? kExitOk : kExitSolver;
}

}  // namespace mcnet::io
