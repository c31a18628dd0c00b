#include "mcnet/network.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace mcnet {

namespace {

bool positive(double value) { return std::isfinite(value) && value > 0.0; }

void require_positive(double value, const std::string& what) {
    if (!positive(value)) throw ModelError(what + " must be finite and > 0");
}

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

double GasParams::normal_density() const {
    const double molar_mass = specific_gravity * molar_mass_air;
    return standard_pressure * molar_mass / (gas_constant * standard_temperature * compressibility);
}

void CarrierParams::validate() const {
    require_positive(gas.hhv, "gas HHV");
    require_positive(gas.specific_gravity, "gas specific gravity");
    require_positive(gas.compressibility, "gas compressibility");
    require_positive(gas.standard_pressure, "gas standard pressure");
    require_positive(gas.standard_temperature, "gas standard temperature");
    require_positive(gas.gas_constant, "gas constant");
    require_positive(gas.molar_mass_air, "molar mass of air");
    require_positive(heat.density, "water density");
    require_positive(heat.specific_heat, "specific heat");
    require_positive(heat.ambient_temperature, "ambient temperature");
    require_positive(heat.gravity, "gravitational constant");
}

Node Node::carrier_node(std::string id, Carrier carrier, std::optional<TerminalKind> terminal) {
    Node node;
    node.id = std::move(id);
    node.carrier = carrier;
    node.terminal = terminal;
    return node;
}

Node Node::coupling_node(std::string id, CouplingUnit unit) {
    Node node;
    node.id = std::move(id);
    node.coupling = unit;
    return node;
}

Carrier Link::carrier() const {
    return std::visit(Overloaded{
                          [](const TransmissionLine&) { return Carrier::Electricity; },
                          [](const GasPipe&) { return Carrier::Gas; },
                          [](const HeatPipe&) { return Carrier::Heat; },
                          [](const DummyLink& d) { return d.carrier; },
                      },
                      kind);
}

const Node* Network::find_node(std::string_view id) const {
    auto it = node_index_.find(id);
    return it == node_index_.end() ? nullptr : &nodes_[it->second];
}

const Link* Network::find_link(std::string_view id) const {
    auto it = link_index_.find(id);
    return it == link_index_.end() ? nullptr : &links_[it->second];
}

const Node& Network::node(std::string_view id) const {
    if (const Node* n = find_node(id)) return *n;
    throw ModelError("unknown node " + std::string(id));
}

const Link& Network::link(std::string_view id) const {
    if (const Link* l = find_link(id)) return *l;
    throw ModelError("unknown link " + std::string(id));
}

std::span<const std::size_t> Network::incident(std::string_view node_id) const {
    auto it = incidence_.find(node_id);
    if (it == incidence_.end()) return {};
    return it->second;
}

const Node& Network::other_end(const Link& link, std::string_view node_id) const {
    return node(link.from == node_id ? link.to : link.from);
}

bool Network::operator==(const Network& other) const {
    return nodes_ == other.nodes_ && links_ == other.links_ && params_ == other.params_ &&
           registry_ == other.registry_;
}

namespace {

void validate_coupling(const Node& node) {
    const CouplingUnit& unit = *node.coupling;
    if (node.terminal) {
        throw ModelError("coupling node " + node.id + " cannot carry a terminal link");
    }
    if (!(unit.efficiency >= 0.0 && unit.efficiency <= 1.0)) {
        throw ModelError("coupling " + node.id + ": efficiency must lie in [0, 1]");
    }
    require_positive(unit.hhv, "coupling " + node.id + " HHV");
    if (unit.heat_efficiency) {
        const double eta_h = *unit.heat_efficiency;
        if (!(eta_h >= 0.0 && eta_h <= 1.0)) {
            throw ModelError("coupling " + node.id + ": heat efficiency must lie in [0, 1]");
        }
    } else if (unit.kind != CouplingKind::Electrolyser) {
        throw ModelError("coupling " + node.id +
                         ": a free heat efficiency is only defined for electrolysers");
    }
}

void validate_link(const Link& link, const std::map<std::string, std::size_t, std::less<>>& index,
                   const std::vector<Node>& nodes) {
    auto from_it = index.find(link.from);
    auto to_it = index.find(link.to);
    if (from_it == index.end()) throw ModelError("link " + link.id + " starts at unknown node " + link.from);
    if (to_it == index.end()) throw ModelError("link " + link.id + " ends at unknown node " + link.to);
    if (link.from == link.to) throw ModelError("link " + link.id + " is a self-loop");
    const Node& a = nodes[from_it->second];
    const Node& b = nodes[to_it->second];

    std::visit(Overloaded{
                   [&](const TransmissionLine& line) {
                       if (!std::isfinite(line.conductance) || !std::isfinite(line.susceptance)) {
                           throw ModelError("line " + link.id + " has non-finite admittance");
                       }
                   },
                   [&](const GasPipe& pipe) {
                       require_positive(pipe.pipe_constant, "gas pipe " + link.id + " constant");
                       require_positive(pipe.friction, "gas pipe " + link.id + " friction factor");
                       if (pipe.length) require_positive(*pipe.length, "gas pipe " + link.id + " length");
                       if (pipe.diameter) {
                           require_positive(*pipe.diameter, "gas pipe " + link.id + " diameter");
                       }
                   },
                   [&](const HeatPipe& pipe) {
                       require_positive(pipe.pipe_constant, "heat pipe " + link.id + " constant");
                       require_positive(pipe.friction, "heat pipe " + link.id + " friction factor");
                       require_positive(pipe.length, "heat pipe " + link.id + " length");
                       if (!(std::isfinite(pipe.heat_transfer) && pipe.heat_transfer >= 0.0)) {
                           throw ModelError("heat pipe " + link.id +
                                            " heat transfer coefficient must be >= 0");
                       }
                       if (pipe.diameter) {
                           require_positive(*pipe.diameter, "heat pipe " + link.id + " diameter");
                       }
                   },
                   [](const DummyLink&) {},
               },
               link.kind);

    if (link.is_dummy()) {
        const Carrier carrier = link.carrier();
        if (a.is_coupling() == b.is_coupling()) {
            throw ModelError("dummy link " + link.id +
                             " must join one coupling node and one single-carrier node");
        }
        const Node& other = a.is_coupling() ? b : a;
        if (other.carrier != carrier) {
            throw ModelError("dummy link " + link.id + " carrier does not match node " + other.id);
        }
        return;
    }
    if (a.is_coupling() || b.is_coupling()) {
        throw ModelError("physical link " + link.id + " cannot touch a coupling node");
    }
    if (a.carrier != link.carrier() || b.carrier != link.carrier()) {
        throw ModelError("carrier mismatch on link " + link.id);
    }
}

void validate_coupling_topology(const Node& node, const std::vector<Link>& links,
                                std::span<const std::size_t> incident) {
    int n_e = 0, n_g = 0, n_h = 0;
    for (std::size_t li : incident) {
        const Link& link = links[li];
        switch (link.carrier()) {
            case Carrier::Electricity: ++n_e; break;
            case Carrier::Gas: ++n_g; break;
            case Carrier::Heat: ++n_h; break;
        }
    }
    const CouplingUnit& unit = *node.coupling;
    auto fail = [&](const std::string& why) {
        throw ModelError("coupling " + node.id + " (" + std::string(to_string(unit.kind)) +
                         "): " + why);
    };
    if (n_e != 1) fail("needs exactly one electricity dummy link");
    if (n_g > 1 || n_h > 1) fail("at most one gas and one heat dummy link");
    switch (unit.kind) {
        case CouplingKind::P2G:
            if (n_g != 1 || n_h != 0) fail("needs a gas dummy link and no heat link");
            break;
        case CouplingKind::ElectricalBoiler:
            if (n_h != 1 || n_g != 0) fail("needs a heat dummy link and no gas link");
            break;
        case CouplingKind::Electrolyser:
            if (n_g + n_h == 0) fail("needs at least one output link");
            // With a single output the heat split is dictated by the topology.
            if (n_h == 0 && (!unit.heat_efficiency || *unit.heat_efficiency != 0.0)) {
                fail("without a heat link the heat efficiency must be fixed at 0");
            }
            if (n_g == 0 && (!unit.heat_efficiency || *unit.heat_efficiency != 1.0)) {
                fail("without a gas link the heat efficiency must be fixed at 1");
            }
            break;
    }
}

std::string pair_label(std::string_view tag, std::string_view a, std::string_view b) {
    return std::string(tag) + "_{" + std::string(a) + "," + std::string(b) + "}";
}

std::string single_label(std::string_view tag, std::string_view a) {
    return std::string(tag) + "_{" + std::string(a) + "}";
}

}  // namespace

Network build_network(std::vector<Node> nodes, std::vector<Link> links, CarrierParams params) {
    params.validate();

    std::sort(nodes.begin(), nodes.end(), [](const Node& a, const Node& b) { return a.id < b.id; });
    std::sort(links.begin(), links.end(), [](const Link& a, const Link& b) { return a.id < b.id; });

    Network net;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].id.empty()) throw ModelError("node with empty id");
        if (!net.node_index_.emplace(nodes[i].id, i).second) {
            throw ModelError("duplicate node id " + nodes[i].id);
        }
        if (nodes[i].is_coupling()) validate_coupling(nodes[i]);
    }
    for (std::size_t i = 0; i < links.size(); ++i) {
        if (links[i].id.empty()) throw ModelError("link with empty id");
        if (!net.link_index_.emplace(links[i].id, i).second) {
            throw ModelError("duplicate link id " + links[i].id);
        }
        validate_link(links[i], net.node_index_, nodes);
        net.incidence_[links[i].from].push_back(i);
        net.incidence_[links[i].to].push_back(i);
    }
    for (const Node& node : nodes) {
        if (node.is_coupling()) {
            auto it = net.incidence_.find(node.id);
            std::span<const std::size_t> inc;
            if (it != net.incidence_.end()) inc = it->second;
            validate_coupling_topology(node, links, inc);
        }
    }

    std::vector<Slot> slots;
    std::set<std::string> used_labels;
    auto add = [&](Symbol symbol, Location location, std::string label, const std::string& link_id) {
        if (used_labels.contains(label)) label += "#" + link_id;  // parallel links
        used_labels.insert(label);
        slots.push_back(Slot{SlotKey{symbol, std::move(location)}, std::move(label)});
    };

    auto has_link = [&](const std::string& node_id, auto predicate) {
        auto it = net.incidence_.find(node_id);
        if (it == net.incidence_.end()) return false;
        return std::any_of(it->second.begin(), it->second.end(),
                           [&](std::size_t li) { return predicate(links[li]); });
    };

    for (const Node& node : nodes) {
        if (node.is_coupling()) continue;
        const std::string& id = node.id;
        switch (node.carrier) {
            case Carrier::Electricity:
                if (has_link(id, [](const Link& l) { return std::holds_alternative<TransmissionLine>(l.kind); })) {
                    add(Symbol::VoltageMagnitude, Location::node(id), single_label("V", id), id);
                    add(Symbol::VoltageAngle, Location::node(id), single_label("delta", id), id);
                }
                if (node.terminal) {
                    add(Symbol::ActivePower, Location::terminal(id), single_label("P", id), id);
                    add(Symbol::ReactivePower, Location::terminal(id), single_label("Q", id), id);
                }
                break;
            case Carrier::Gas:
                if (has_link(id, [](const Link& l) { return std::holds_alternative<GasPipe>(l.kind); })) {
                    add(Symbol::Pressure, Location::node(id), single_label("p", id), id);
                }
                if (node.terminal) {
                    add(Symbol::GasFlow, Location::terminal(id), single_label("q", id), id);
                }
                break;
            case Carrier::Heat:
                if (has_link(id, [](const Link& l) { return std::holds_alternative<HeatPipe>(l.kind); })) {
                    add(Symbol::Pressure, Location::node(id), single_label("p", id), id);
                }
                if (node.terminal) {
                    add(Symbol::MassFlow, Location::terminal(id), single_label("m", id), id);
                    if (*node.terminal == TerminalKind::Full) {
                        add(Symbol::SupplyTemperature, Location::terminal(id), pair_label("T^s", id, "l"), id);
                        add(Symbol::ReturnTemperature, Location::terminal(id), pair_label("T^r", id, "l"), id);
                        add(Symbol::HeatPower, Location::terminal(id), pair_label("dphi", id, "l"), id);
                    }
                }
                break;
        }
    }

    for (const Link& link : links) {
        const Location loc = Location::link(link.id);
        std::visit(
            Overloaded{
                [](const TransmissionLine&) {},
                [&](const GasPipe&) {
                    add(Symbol::GasFlow, loc, pair_label("q", link.from, link.to), link.id);
                },
                [&](const HeatPipe&) {
                    add(Symbol::MassFlow, loc, pair_label("m", link.from, link.to), link.id);
                    // Supply enters at `from`, return enters at `to`.
                    add(Symbol::SupplyTemperature, loc, pair_label("T^s", link.from, link.to), link.id);
                    add(Symbol::ReturnTemperature, loc, pair_label("T^r", link.to, link.from), link.id);
                },
                [&](const DummyLink& dummy) {
                    const bool from_is_coupling = nodes[net.node_index_.at(link.from)].is_coupling();
                    const std::string& c = from_is_coupling ? link.from : link.to;
                    const std::string& n = from_is_coupling ? link.to : link.from;
                    switch (dummy.carrier) {
                        case Carrier::Electricity:
                            add(Symbol::ActivePower, loc, pair_label("P", n, c), link.id);
                            add(Symbol::ReactivePower, loc, pair_label("Q", n, c), link.id);
                            break;
                        case Carrier::Gas:
                            add(Symbol::GasFlow, loc, pair_label("q", c, n), link.id);
                            break;
                        case Carrier::Heat:
                            add(Symbol::MassFlow, loc, pair_label("m", c, n), link.id);
                            add(Symbol::SupplyTemperature, loc, pair_label("T^s", c, n), link.id);
                            add(Symbol::ReturnTemperature, loc, pair_label("T^r", c, n), link.id);
                            add(Symbol::HeatPower, loc, pair_label("dphi", c, n), link.id);
                            break;
                    }
                },
            },
            link.kind);
    }

    for (const Node& node : nodes) {
        if (node.is_coupling() && node.coupling->free_heat_efficiency()) {
            add(Symbol::HeatEfficiency, Location::coupling(node.id), single_label("eta_h", node.id),
                node.id);
        }
    }

    net.nodes_ = std::move(nodes);
    net.links_ = std::move(links);
    net.params_ = params;
    net.registry_ = VariableRegistry(std::move(slots));
    return net;
}

SlotIndex registry_lookup(const Network& network, Symbol symbol, const Location& location) {
    return network.registry().index(SlotKey{symbol, location});
}

}  // namespace mcnet
