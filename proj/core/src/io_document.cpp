#include "mcnet/carrier_equations.hpp"
#include "mcnet/io.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace mcnet::io {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

// -----------------------------------------------------------------------------
// Units
// -----------------------------------------------------------------------------

Dimension dimension_of(Symbol symbol) {
    switch (symbol) {
        case Symbol::VoltageMagnitude: return Dimension::Voltage;
        case Symbol::VoltageAngle: return Dimension::Angle;
        case Symbol::ActivePower:
        case Symbol::ReactivePower:
        case Symbol::HeatPower: return Dimension::Power;
        case Symbol::Pressure: return Dimension::Pressure;
        case Symbol::GasFlow:
        case Symbol::MassFlow: return Dimension::MassFlow;
        case Symbol::SupplyTemperature:
        case Symbol::ReturnTemperature: return Dimension::Temperature;
        case Symbol::HeatEfficiency: return Dimension::Dimensionless;
    }
    return Dimension::Dimensionless;
}

namespace {

struct UnitDef {
    std::string_view name;
    Dimension dim;
    double factor;
};

constexpr UnitDef kUnits[] = {
    {"", Dimension::Dimensionless, 1.0},
    {"-", Dimension::Dimensionless, 1.0},
    {"W", Dimension::Power, 1.0},
    {"kW", Dimension::Power, 1e3},
    {"MW", Dimension::Power, 1e6},
    {"GW", Dimension::Power, 1e9},
    {"var", Dimension::Power, 1.0},
    {"kvar", Dimension::Power, 1e3},
    {"Mvar", Dimension::Power, 1e6},
    {"VA", Dimension::Power, 1.0},
    {"kVA", Dimension::Power, 1e3},
    {"MVA", Dimension::Power, 1e6},
    {"Pa", Dimension::Pressure, 1.0},
    {"kPa", Dimension::Pressure, 1e3},
    {"MPa", Dimension::Pressure, 1e6},
    {"mbar", Dimension::Pressure, 1e2},
    {"bar", Dimension::Pressure, 1e5},
    {"K", Dimension::Temperature, 1.0},
    {"kg/s", Dimension::MassFlow, 1.0},
    {"g/s", Dimension::MassFlow, 1e-3},
    {"V", Dimension::Voltage, 1.0},
    {"kV", Dimension::Voltage, 1e3},
    {"rad", Dimension::Angle, 1.0},
    {"deg", Dimension::Angle, std::numbers::pi / 180.0},
    {"m", Dimension::Length, 1.0},
    {"km", Dimension::Length, 1e3},
    {"cm", Dimension::Length, 1e-2},
    {"mm", Dimension::Length, 1e-3},
    {"J/kg", Dimension::SpecificEnergy, 1.0},
    {"kJ/kg", Dimension::SpecificEnergy, 1e3},
    {"MJ/kg", Dimension::SpecificEnergy, 1e6},
    {"S", Dimension::Conductance, 1.0},
    {"mS", Dimension::Conductance, 1e-3},
    {"W/(m K)", Dimension::HeatTransfer, 1.0},
    {"W/m/K", Dimension::HeatTransfer, 1.0},
};

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

}  // namespace

double unit_factor(std::string_view unit, Dimension dim, const std::string& path) {
    unit = trim(unit);
    if (unit.empty()) return 1.0;  // bare number: SI
    for (const UnitDef& u : kUnits) {
        if (u.name != unit) continue;
        if (u.dim != dim) throw DocumentError(path, "unit '" + std::string(unit) + "' has the wrong dimension");
        return u.factor;
    }
    throw DocumentError(path, "unknown unit '" + std::string(unit) + "'");
}

double parse_quantity(std::string_view text, Dimension dim, const std::string& path) {
    text = trim(text);
    double value = 0.0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{}) throw DocumentError(path, "expected a number, got '" + std::string(text) + "'");
    const double factor = unit_factor(std::string_view(end, text.data() + text.size() - end), dim, path);
    value *= factor;
    if (!std::isfinite(value)) throw DocumentError(path, "value is not finite");
    return value;
}

std::string_view display_unit(Symbol symbol) {
    switch (symbol) {
        case Symbol::ActivePower:
        case Symbol::HeatPower: return "MW";
        case Symbol::ReactivePower: return "Mvar";
        case Symbol::Pressure: return "bar";
        default: return si_unit(symbol);
    }
}

double display_factor(Symbol symbol) {
    switch (symbol) {
        case Symbol::ActivePower:
        case Symbol::ReactivePower:
        case Symbol::HeatPower: return 1e6;
        case Symbol::Pressure: return 1e5;
        default: return 1.0;
    }
}

std::string format_number(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", value == 0.0 ? 0.0 : value);  // no "-0"
    return buf;
}

// -----------------------------------------------------------------------------
// Reading helpers
// -----------------------------------------------------------------------------

namespace {

std::string join(const std::string& path, std::string_view key) {
    return path.empty() ? std::string(key) : path + "." + std::string(key);
}

std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

void expect_object(const json& j, const std::string& path) {
    if (!j.is_object()) throw DocumentError(path, "expected an object");
}

void only_keys(const json& j, const std::string& path, std::initializer_list<std::string_view> allowed) {
    expect_object(j, path);
    for (const auto& [key, value] : j.items()) {
        bool known = false;
        for (std::string_view a : allowed) known = known || a == key;
        if (!known) throw DocumentError(join(path, key), "unknown field");
    }
}

const json& require(const json& j, std::string_view key, const std::string& path) {
    auto it = j.find(key);
    if (it == j.end()) throw DocumentError(join(path, key), "missing field");
    return *it;
}

std::string get_string(const json& j, const std::string& path) {
    if (!j.is_string()) throw DocumentError(path, "expected a string");
    return j.get<std::string>();
}

double get_quantity(const json& j, Dimension dim, const std::string& path) {
    if (j.is_number()) {
        const double v = j.get<double>();
        if (!std::isfinite(v)) throw DocumentError(path, "value is not finite");
        return v;
    }
    if (j.is_string()) return parse_quantity(j.get<std::string>(), dim, path);
    throw DocumentError(path, "expected a number or a quantity string such as \"2.5 MW\"");
}

double field(const json& j, std::string_view key, Dimension dim, const std::string& path) {
    return get_quantity(require(j, key, path), dim, join(path, key));
}

void optional_field(const json& j, std::string_view key, Dimension dim, const std::string& path, double& out) {
    if (auto it = j.find(key); it != j.end()) out = get_quantity(*it, dim, join(path, key));
}

Carrier parse_carrier(const json& j, const std::string& path) {
    const std::string s = get_string(j, path);
    for (Carrier c : {Carrier::Electricity, Carrier::Gas, Carrier::Heat}) {
        if (to_string(c) == s) return c;
    }
    throw DocumentError(path, "unknown carrier '" + s + "'");
}

CouplingKind parse_coupling_kind(const json& j, const std::string& path) {
    const std::string s = get_string(j, path);
    for (CouplingKind k : {CouplingKind::Electrolyser, CouplingKind::P2G, CouplingKind::ElectricalBoiler}) {
        if (to_string(k) == s) return k;
    }
    throw DocumentError(path, "unknown coupling kind '" + s + "'");
}

CarrierParams parse_params(const json& j, const std::string& path) {
    CarrierParams params;
    only_keys(j, path, {"gas", "heat"});
    if (auto g = j.find("gas"); g != j.end()) {
        const std::string p = join(path, "gas");
        only_keys(*g, p,
                  {"hhv", "specific_gravity", "compressibility", "standard_pressure", "standard_temperature",
                   "gas_constant", "molar_mass_air"});
        optional_field(*g, "hhv", Dimension::SpecificEnergy, p, params.gas.hhv);
        optional_field(*g, "specific_gravity", Dimension::Dimensionless, p, params.gas.specific_gravity);
        optional_field(*g, "compressibility", Dimension::Dimensionless, p, params.gas.compressibility);
        optional_field(*g, "standard_pressure", Dimension::Pressure, p, params.gas.standard_pressure);
        optional_field(*g, "standard_temperature", Dimension::Temperature, p, params.gas.standard_temperature);
        optional_field(*g, "gas_constant", Dimension::Dimensionless, p, params.gas.gas_constant);
        optional_field(*g, "molar_mass_air", Dimension::Dimensionless, p, params.gas.molar_mass_air);
    }
    if (auto h = j.find("heat"); h != j.end()) {
        const std::string p = join(path, "heat");
        only_keys(*h, p, {"density", "specific_heat", "ambient_temperature", "gravity"});
        optional_field(*h, "density", Dimension::Dimensionless, p, params.heat.density);
        optional_field(*h, "specific_heat", Dimension::Dimensionless, p, params.heat.specific_heat);
        optional_field(*h, "ambient_temperature", Dimension::Temperature, p, params.heat.ambient_temperature);
        optional_field(*h, "gravity", Dimension::Dimensionless, p, params.heat.gravity);
    }
    try {
        params.validate();
    } catch (const ModelError& e) {
        throw DocumentError(path, e.what());
    }
    return params;
}

Node parse_node(const json& j, const std::string& path, const CarrierParams& params) {
    only_keys(j, path, {"id", "carrier", "terminal", "coupling"});
    const std::string id = get_string(require(j, "id", path), join(path, "id"));
    if (auto c = j.find("coupling"); c != j.end()) {
        if (j.contains("carrier") || j.contains("terminal")) {
            throw DocumentError(path, "a coupling node takes neither carrier nor terminal");
        }
        const std::string p = join(path, "coupling");
        only_keys(*c, p, {"kind", "efficiency", "heat_efficiency", "hhv"});
        CouplingUnit unit;
        unit.kind = parse_coupling_kind(require(*c, "kind", p), join(p, "kind"));
        unit.hhv = params.gas.hhv;
        optional_field(*c, "efficiency", Dimension::Dimensionless, p, unit.efficiency);
        optional_field(*c, "hhv", Dimension::SpecificEnergy, p, unit.hhv);
        if (auto h = c->find("heat_efficiency"); h != c->end()) {
            if (h->is_string() && h->get<std::string>() == "free") {
                unit.heat_efficiency.reset();
            } else {
                unit.heat_efficiency = get_quantity(*h, Dimension::Dimensionless, join(p, "heat_efficiency"));
            }
        } else if (unit.kind == CouplingKind::P2G) {
            unit.heat_efficiency = 0.0;
        } else if (unit.kind == CouplingKind::ElectricalBoiler) {
            unit.heat_efficiency = 1.0;
        } else {
            throw DocumentError(join(p, "heat_efficiency"), "missing field (a number or \"free\")");
        }
        return Node::coupling_node(id, unit);
    }
    const Carrier carrier = parse_carrier(require(j, "carrier", path), join(path, "carrier"));
    std::optional<TerminalKind> terminal = TerminalKind::Full;
    if (auto t = j.find("terminal"); t != j.end()) {
        const std::string s = get_string(*t, join(path, "terminal"));
        if (s == "full") {
            terminal = TerminalKind::Full;
        } else if (s == "junction") {
            terminal = TerminalKind::Junction;
        } else if (s == "none") {
            terminal.reset();
        } else {
            throw DocumentError(join(path, "terminal"), "expected \"full\", \"junction\" or \"none\"");
        }
    }
    return Node::carrier_node(id, carrier, terminal);
}

Link parse_link(const json& j, const std::string& path, const CarrierParams& params) {
    Link link;
    expect_object(j, path);
    link.id = get_string(require(j, "id", path), join(path, "id"));
    link.from = get_string(require(j, "from", path), join(path, "from"));
    link.to = get_string(require(j, "to", path), join(path, "to"));
    const std::string type = get_string(require(j, "type", path), join(path, "type"));

    if (type == "line") {
        only_keys(j, path, {"id", "from", "to", "type", "conductance", "susceptance", "per_unit"});
        TransmissionLine line;
        const bool pu = j.contains("per_unit");
        const Dimension dim = pu ? Dimension::Dimensionless : Dimension::Conductance;
        line.conductance = field(j, "conductance", dim, path);
        line.susceptance = field(j, "susceptance", dim, path);
        if (pu) {
            const std::string p = join(path, "per_unit");
            const json& base = j["per_unit"];
            only_keys(base, p, {"s_base", "v_base"});
            const double s_base = field(base, "s_base", Dimension::Power, p);
            const double v_base = field(base, "v_base", Dimension::Voltage, p);
            if (!(s_base > 0.0 && v_base > 0.0)) throw DocumentError(p, "bases must be > 0");
            const double y_base = s_base / (v_base * v_base);
            line.conductance *= y_base;
            line.susceptance *= y_base;
        }
        link.kind = line;
    } else if (type == "gas_pipe") {
        only_keys(j, path, {"id", "from", "to", "type", "pipe_constant", "geometry", "friction"});
        GasPipe pipe;
        pipe.friction = field(j, "friction", Dimension::Dimensionless, path);
        const bool explicit_constant = j.contains("pipe_constant");
        if (explicit_constant == j.contains("geometry")) {
            throw DocumentError(path, "give exactly one of pipe_constant and geometry");
        }
        if (explicit_constant) {
            pipe.pipe_constant = field(j, "pipe_constant", Dimension::Dimensionless, path);
        } else {
            const std::string p = join(path, "geometry");
            only_keys(j["geometry"], p, {"length", "diameter"});
            pipe.length = field(j["geometry"], "length", Dimension::Length, p);
            pipe.diameter = field(j["geometry"], "diameter", Dimension::Length, p);
            try {
                pipe.pipe_constant = gas_pipe_constant(params.gas, *pipe.length, *pipe.diameter);
            } catch (const std::exception& e) {
                throw DocumentError(p, e.what());
            }
        }
        link.kind = pipe;
    } else if (type == "heat_pipe") {
        only_keys(j, path,
                  {"id", "from", "to", "type", "pipe_constant", "geometry", "friction", "heat_transfer", "length"});
        HeatPipe pipe;
        pipe.friction = field(j, "friction", Dimension::Dimensionless, path);
        pipe.heat_transfer = field(j, "heat_transfer", Dimension::HeatTransfer, path);
        pipe.length = field(j, "length", Dimension::Length, path);
        const bool explicit_constant = j.contains("pipe_constant");
        if (explicit_constant == j.contains("geometry")) {
            throw DocumentError(path, "give exactly one of pipe_constant and geometry");
        }
        if (explicit_constant) {
            pipe.pipe_constant = field(j, "pipe_constant", Dimension::Dimensionless, path);
        } else {
            const std::string p = join(path, "geometry");
            only_keys(j["geometry"], p, {"diameter"});
            pipe.diameter = field(j["geometry"], "diameter", Dimension::Length, p);
            try {
                pipe.pipe_constant = heat_pipe_constant(params.heat, pipe.length, *pipe.diameter);
            } catch (const std::exception& e) {
                throw DocumentError(p, e.what());
            }
        }
        link.kind = pipe;
    } else if (type == "dummy") {
        only_keys(j, path, {"id", "from", "to", "type", "carrier"});
        link.kind = DummyLink{parse_carrier(require(j, "carrier", path), join(path, "carrier"))};
    } else {
        throw DocumentError(join(path, "type"), "unknown link type '" + type + "'");
    }
    return link;
}

Symbol symbol_of_template_key(BcTemplate t, const TemplateOptions& options, const std::string& key,
                              const std::string& path) {
    for (const TemplateEntry& e : template_entries(t, options)) {
        if (e.key == key) return e.symbol;
    }
    throw DocumentError(path, "template " + std::string(to_string(t)) + " has no value named " + key);
}

BoundarySpec parse_boundary(const json& j, const std::string& path, const Network& network) {
    BoundarySpec spec;
    only_keys(j, path, {"template", "reference_pressure", "values", "slots"});
    const bool has_template = j.contains("template");
    if (has_template == j.contains("slots")) throw DocumentError(path, "give exactly one of template and slots");

    if (has_template) {
        const std::string name = get_string(j["template"], join(path, "template"));
        spec.template_kind = parse_template(name);
        if (!spec.template_kind) throw DocumentError(join(path, "template"), "unknown template '" + name + "'");
        if (auto r = j.find("reference_pressure"); r != j.end()) {
            const std::string s = get_string(*r, join(path, "reference_pressure"));
            if (s == "load") {
                spec.template_options.reference_pressure = ReferencePressure::AtLoad;
            } else if (s == "junction") {
                spec.template_options.reference_pressure = ReferencePressure::AtJunction;
            } else {
                throw DocumentError(join(path, "reference_pressure"), "expected \"load\" or \"junction\"");
            }
        }
        if (auto v = j.find("values"); v != j.end()) {
            const std::string p = join(path, "values");
            expect_object(*v, p);
            for (const auto& [key, value] : v->items()) {
                const Symbol symbol =
                    symbol_of_template_key(*spec.template_kind, spec.template_options, key, join(p, key));
                spec.template_values[key] = get_quantity(value, dimension_of(symbol), join(p, key));
            }
        }
    } else {
        if (j.contains("reference_pressure") || j.contains("values")) {
            throw DocumentError(path, "reference_pressure and values belong to a template");
        }
        const std::string p = join(path, "slots");
        expect_object(j["slots"], p);
        for (const auto& [label, value] : j["slots"].items()) {
            const auto slot = network.registry().find(label);
            if (!slot) throw DocumentError(join(p, label), "no such slot");
            const Symbol symbol = network.registry()[*slot].key.symbol;
            spec.explicit_slots.emplace_back(label, get_quantity(value, dimension_of(symbol), join(p, label)));
        }
    }
    return spec;
}

SolverConfig parse_solver(const json& j, const std::string& path) {
    SolverConfig config;
    only_keys(j, path, {"tol", "max_iter", "damping", "min_pivot"});
    optional_field(j, "tol", Dimension::Dimensionless, path, config.tol);
    optional_field(j, "damping", Dimension::Dimensionless, path, config.damping);
    optional_field(j, "min_pivot", Dimension::Dimensionless, path, config.min_pivot);
    if (auto m = j.find("max_iter"); m != j.end()) {
        if (!m->is_number_integer()) throw DocumentError(join(path, "max_iter"), "expected an integer");
        config.max_iter = m->get<int>();
    }
    try {
        config.validate();
    } catch (const ModelError& e) {
        throw DocumentError(path, e.what());
    }
    return config;
}

std::vector<std::pair<std::string, double>> parse_guess_object(const json& j, const std::string& path,
                                                               const Network& network) {
    expect_object(j, path);
    std::vector<std::pair<std::string, double>> out;
    for (const auto& [label, value] : j.items()) {
        const auto slot = network.registry().find(label);
        if (!slot) throw DocumentError(join(path, label), "no such slot");
        const Symbol symbol = network.registry()[*slot].key.symbol;
        out.emplace_back(label, get_quantity(value, dimension_of(symbol), join(path, label)));
    }
    return out;
}

json parse_json(std::string_view text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw DocumentError("", std::string("malformed JSON: ") + e.what());
    }
}

}  // namespace

BoundaryConditionSet build_boundary_set(const Network& network, const BoundarySpec& spec) {
    if (spec.template_kind) {
        return apply_template(network, *spec.template_kind, spec.template_values, spec.template_options);
    }
    BoundaryConditionSet bcs;
    for (const auto& [label, value] : spec.explicit_slots) bcs.add(network.registry().index(label), value);
    return bcs;
}

Document parse_document(std::string_view text) {
    const json root = parse_json(text);
    only_keys(root, "",
              {"schema_version", "name", "params", "nodes", "links", "boundary_conditions", "solver",
               "initial_guess", "description"});
    const json& version = require(root, "schema_version", "");
    if (!version.is_number_integer() || version.get<int>() != kSchemaVersion) {
        throw DocumentError("schema_version", "expected " + std::to_string(kSchemaVersion));
    }

    Document doc;
    if (auto n = root.find("name"); n != root.end()) doc.name = get_string(*n, "name");

    CarrierParams params;
    if (auto p = root.find("params"); p != root.end()) params = parse_params(*p, "params");

    std::vector<Node> nodes;
    const json& jn = require(root, "nodes", "");
    if (!jn.is_array()) throw DocumentError("nodes", "expected an array");
    for (std::size_t i = 0; i < jn.size(); ++i) nodes.push_back(parse_node(jn[i], at("nodes", i), params));

    std::vector<Link> links;
    if (auto jl = root.find("links"); jl != root.end()) {
        if (!jl->is_array()) throw DocumentError("links", "expected an array");
        for (std::size_t i = 0; i < jl->size(); ++i) {
            links.push_back(parse_link((*jl)[i], at("links", i), params));
        }
    }

    try {
        doc.network = build_network(std::move(nodes), std::move(links), params);
    } catch (const ModelError& e) {
        throw DocumentError("nodes/links", e.what());
    }

    if (auto b = root.find("boundary_conditions"); b != root.end()) {
        doc.boundary = parse_boundary(*b, "boundary_conditions", doc.network);
    }
    try {
        doc.bcs = build_boundary_set(doc.network, doc.boundary);
    } catch (const ModelError& e) {
        throw DocumentError("boundary_conditions", e.what());
    }

    if (auto s = root.find("solver"); s != root.end()) doc.solver = parse_solver(*s, "solver");
    if (auto g = root.find("initial_guess"); g != root.end()) {
        doc.initial_guess = parse_guess_object(*g, "initial_guess", doc.network);
    }
    return doc;
}

std::vector<std::pair<std::string, double>> parse_guess(std::string_view text, const Network& network) {
    return parse_guess_object(parse_json(text), "", network);
}

// -----------------------------------------------------------------------------
// Writing
// -----------------------------------------------------------------------------

std::string serialize_document(const Document& doc) {
    const Network& net = doc.network;
    const CarrierParams& params = net.params();
    ordered_json root;
    root["schema_version"] = kSchemaVersion;
    if (!doc.name.empty()) root["name"] = doc.name;
    root["params"]["gas"] = {
        {"hhv", params.gas.hhv},
        {"specific_gravity", params.gas.specific_gravity},
        {"compressibility", params.gas.compressibility},
        {"standard_pressure", params.gas.standard_pressure},
        {"standard_temperature", params.gas.standard_temperature},
        {"gas_constant", params.gas.gas_constant},
        {"molar_mass_air", params.gas.molar_mass_air},
    };
    root["params"]["heat"] = {
        {"density", params.heat.density},
        {"specific_heat", params.heat.specific_heat},
        {"ambient_temperature", params.heat.ambient_temperature},
        {"gravity", params.heat.gravity},
    };

    ordered_json nodes = ordered_json::array();
    for (const Node& n : net.nodes()) {
        ordered_json jn;
        jn["id"] = n.id;
        if (n.is_coupling()) {
            const CouplingUnit& u = *n.coupling;
            jn["coupling"]["kind"] = to_string(u.kind);
            jn["coupling"]["efficiency"] = u.efficiency;
            if (u.heat_efficiency) {
                jn["coupling"]["heat_efficiency"] = *u.heat_efficiency;
            } else {
                jn["coupling"]["heat_efficiency"] = "free";
            }
            jn["coupling"]["hhv"] = u.hhv;
        } else {
            jn["carrier"] = to_string(n.carrier);
            jn["terminal"] = !n.terminal ? "none" : *n.terminal == TerminalKind::Full ? "full" : "junction";
        }
        nodes.push_back(jn);
    }
    root["nodes"] = nodes;

    ordered_json links = ordered_json::array();
    for (const Link& l : net.links()) {
        ordered_json jl;
        jl["id"] = l.id;
        jl["from"] = l.from;
        jl["to"] = l.to;
        if (const auto* line = std::get_if<TransmissionLine>(&l.kind)) {
            jl["type"] = "line";
            jl["conductance"] = line->conductance;
            jl["susceptance"] = line->susceptance;
        } else if (const auto* gp = std::get_if<GasPipe>(&l.kind)) {
            jl["type"] = "gas_pipe";
            jl["friction"] = gp->friction;
            if (gp->length && gp->diameter) {
                jl["geometry"] = {{"length", *gp->length}, {"diameter", *gp->diameter}};
            } else {
                jl["pipe_constant"] = gp->pipe_constant;
            }
        } else if (const auto* hp = std::get_if<HeatPipe>(&l.kind)) {
            jl["type"] = "heat_pipe";
            jl["friction"] = hp->friction;
            jl["heat_transfer"] = hp->heat_transfer;
            jl["length"] = hp->length;
            if (hp->diameter) {
                jl["geometry"] = {{"diameter", *hp->diameter}};
            } else {
                jl["pipe_constant"] = hp->pipe_constant;
            }
        } else {
            jl["type"] = "dummy";
            jl["carrier"] = to_string(std::get<DummyLink>(l.kind).carrier);
        }
        links.push_back(jl);
    }
    root["links"] = links;

    ordered_json bc;
    if (doc.boundary.template_kind) {
        bc["template"] = to_string(*doc.boundary.template_kind);
        bc["reference_pressure"] =
            doc.boundary.template_options.reference_pressure == ReferencePressure::AtLoad ? "load" : "junction";
        bc["values"] = ordered_json::object();
        for (const auto& [key, value] : doc.boundary.template_values) bc["values"][key] = value;
    } else {
        bc["slots"] = ordered_json::object();
        for (const auto& [label, value] : doc.boundary.explicit_slots) bc["slots"][label] = value;
    }
    root["boundary_conditions"] = bc;

    root["solver"] = {
        {"tol", doc.solver.tol},
        {"max_iter", doc.solver.max_iter},
        {"damping", doc.solver.damping},
        {"min_pivot", doc.solver.min_pivot},
    };
    if (!doc.initial_guess.empty()) {
        root["initial_guess"] = ordered_json::object();
        for (const auto& [label, value] : doc.initial_guess) root["initial_guess"][label] = value;
    }
    return root.dump(2) + "\n";
}

// -----------------------------------------------------------------------------
// Inputs
// -----------------------------------------------------------------------------

std::string load_input(const std::string& path_or_fixture) {
    std::ifstream in(path_or_fixture, std::ios::binary);
    if (in) {
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }
    for (const std::string& name : fixture_names()) {
        if (name == path_or_fixture) return std::string(fixture_text(name));
    }
    throw DocumentError("", "cannot open '" + path_or_fixture + "' and no fixture has that name");
}

}  // namespace mcnet::io
