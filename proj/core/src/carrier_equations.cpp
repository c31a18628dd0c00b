#include "mcnet/carrier_equations.hpp"

#include <cmath>
#include <numbers>

namespace mcnet {

// -----------------------------------------------------------------------------
// Scalar laws
// -----------------------------------------------------------------------------

LineFlows line_power_flows(double v_i, double delta_i, double v_j, double delta_j, double g, double b) {
    const double d = delta_i - delta_j;
    const double c = std::cos(d);
    const double s = std::sin(d);
    const double vv = v_i * v_j;
    LineFlows f;
    f.p_send = g * v_i * v_i - vv * (g * c + b * s);
    f.q_send = -b * v_i * v_i - vv * (g * s - b * c);
    f.p_recv = g * v_j * v_j - vv * (g * c - b * s);
    f.q_recv = -b * v_j * v_j + vv * (g * s + b * c);
    return f;
}

LineFlowPartials line_power_flow_partials(double v_i, double delta_i, double v_j, double delta_j,
                                          double g, double b) {
    const double d = delta_i - delta_j;
    const double c = std::cos(d);
    const double s = std::sin(d);
    const double vv = v_i * v_j;
    LineFlowPartials j;

    const double a1 = g * c + b * s;  // P_send coupling term
    const double a2 = g * s - b * c;  // Q_send
    const double a3 = g * c - b * s;  // P_recv
    const double a4 = g * s + b * c;  // Q_recv

    // d(a1)/d(delta) = -g s + b c = -a2, etc.
    j.p_send = {2.0 * g * v_i - v_j * a1, -vv * (-a2), -v_i * a1, vv * (-a2)};
    j.q_send = {-2.0 * b * v_i - v_j * a2, -vv * a1, -v_i * a2, vv * a1};
    j.p_recv = {-v_j * a3, vv * a4, 2.0 * g * v_j - v_i * a3, -vv * a4};
    j.q_recv = {v_j * a4, vv * a3, -2.0 * b * v_j + v_i * a4, -vv * a3};
    return j;
}

double quadratic_pressure_drop(double pipe_constant, double friction, double flow) {
    return friction * std::abs(flow) * flow / (pipe_constant * pipe_constant);
}

double quadratic_pressure_drop_slope(double pipe_constant, double friction, double flow) {
    return 2.0 * friction * std::abs(flow) / (pipe_constant * pipe_constant);
}

double gas_pipe_residual(double p_i, double p_j, double q_ij, double pipe_constant, double friction) {
    return p_i - p_j - quadratic_pressure_drop(pipe_constant, friction, q_ij);
}

double heat_pipe_hydraulic_residual(double p_i, double p_j, double m_ij, double pipe_constant,
                                    double friction) {
    return p_i - p_j - quadratic_pressure_drop(pipe_constant, friction, m_ij);
}

double heat_pipe_temperature_out(double t_in, double mass_flow, double heat_transfer, double length,
                                 double specific_heat, double ambient) {
    if (!(mass_flow > 0.0)) {
        throw DomainError("heat pipe temperature law requires a positive mass flow");
    }
    return decayed_temperature(t_in, mass_flow, heat_transfer, length, specific_heat, ambient).value;
}

DecayedTemperature decayed_temperature(double t_in, double mass_flow, double heat_transfer,
                                       double length, double specific_heat, double ambient) {
    DecayedTemperature out;
    if (!(mass_flow > 0.0)) {
        out.value = ambient;
        return out;
    }
    const double a = heat_transfer * length / specific_heat;
    const double e = std::exp(-a / mass_flow);
    out.value = (t_in - ambient) * e + ambient;
    out.d_inlet = e;
    out.d_mass = (t_in - ambient) * e * a / (mass_flow * mass_flow);
    return out;
}

double terminal_heat_power_residual(double mass_flow, double t_supply, double t_return,
                                    double heat_power, double specific_heat) {
    return specific_heat * mass_flow * (t_supply - t_return) - heat_power;
}

namespace {

double pipe_constant_from_density(double density, double length, double diameter) {
    if (!(length > 0.0) || !(diameter > 0.0) || !std::isfinite(length) || !std::isfinite(diameter)) {
        throw ModelError("pipe geometry must be positive");
    }
    const double area = std::numbers::pi * diameter * diameter / 4.0;
    const double inv_sq = 2.0 * length / (diameter * density * area * area);
    return 1.0 / std::sqrt(inv_sq);
}

}  // namespace

double gas_pipe_constant(const GasParams& params, double length, double diameter) {
    return pipe_constant_from_density(params.normal_density(), length, diameter);
}

double heat_pipe_constant(const HeatParams& params, double length, double diameter) {
    return pipe_constant_from_density(params.density, length, diameter);
}

// -----------------------------------------------------------------------------
// Residual builders
// -----------------------------------------------------------------------------

namespace {

struct LinearTerm {
    SlotIndex slot;
    std::size_t pos;
    double coefficient;
};

double eval_linear(const std::vector<LinearTerm>& terms, std::span<const double> x,
                   std::span<double> partials) {
    double value = 0.0;
    for (const auto& t : terms) {
        value += t.coefficient * x[t.slot];
        if (!partials.empty()) partials[t.pos] += t.coefficient;
    }
    return value;
}

Residual linear_residual(std::string label, SlotSet& set, std::vector<LinearTerm> terms) {
    Residual r;
    r.label = std::move(label);
    r.slots = set.take();
    r.evaluate = [terms = std::move(terms)](std::span<const double> x, std::span<double> partials) {
        if (!partials.empty()) std::fill(partials.begin(), partials.end(), 0.0);
        return eval_linear(terms, x, partials);
    };
    return r;
}

const VariableRegistry& reg(const Network& n) { return n.registry(); }

SlotIndex slot_of(const Network& n, Symbol s, Location loc) { return reg(n).index(SlotKey{s, std::move(loc)}); }

struct LineTerm {
    std::array<SlotIndex, 4> slots;  // V_from, delta_from, V_to, delta_to
    std::array<std::size_t, 4> pos;
    double g;
    double b;
    bool at_from;
};

}  // namespace

std::vector<Residual> electric_node_equations(const Network& network, const Node& node) {
    if (node.is_coupling() || node.carrier != Carrier::Electricity) {
        throw ModelError("node " + node.id + " is not an electricity node");
    }
    const auto incident = network.incident(node.id);
    if (!node.terminal && incident.empty()) return {};

    std::vector<Residual> out;
    for (Symbol power : {Symbol::ActivePower, Symbol::ReactivePower}) {
        const bool active = power == Symbol::ActivePower;
        SlotSet set;
        std::vector<LinearTerm> linear;
        std::vector<LineTerm> lines;
        if (node.terminal) {
            const SlotIndex s = slot_of(network, power, Location::terminal(node.id));
            linear.push_back({s, set.add(s), 1.0});
        }
        for (std::size_t li : incident) {
            const Link& link = network.links()[li];
            if (link.is_dummy()) {
                const SlotIndex s = slot_of(network, power, Location::link(link.id));
                linear.push_back({s, set.add(s), 1.0});
            } else if (const auto* line = std::get_if<TransmissionLine>(&link.kind)) {
                LineTerm t{};
                t.slots = {slot_of(network, Symbol::VoltageMagnitude, Location::node(link.from)),
                           slot_of(network, Symbol::VoltageAngle, Location::node(link.from)),
                           slot_of(network, Symbol::VoltageMagnitude, Location::node(link.to)),
                           slot_of(network, Symbol::VoltageAngle, Location::node(link.to))};
                for (int k = 0; k < 4; ++k) t.pos[k] = set.add(t.slots[k]);
                t.g = line->conductance;
                t.b = line->susceptance;
                t.at_from = link.from == node.id;
                lines.push_back(t);
            }
        }
        Residual r;
        r.label = std::string(active ? "P-balance[" : "Q-balance[") + node.id + "]";
        r.slots = set.take();
        r.evaluate = [linear = std::move(linear), lines = std::move(lines), active](
                         std::span<const double> x, std::span<double> partials) {
            if (!partials.empty()) std::fill(partials.begin(), partials.end(), 0.0);
            double value = eval_linear(linear, x, partials);
            for (const LineTerm& t : lines) {
                const double vi = x[t.slots[0]], di = x[t.slots[1]];
                const double vj = x[t.slots[2]], dj = x[t.slots[3]];
                const LineFlows f = line_power_flows(vi, di, vj, dj, t.g, t.b);
                if (active) {
                    value += t.at_from ? f.p_send : f.p_recv;
                } else {
                    value += t.at_from ? f.q_send : f.q_recv;
                }
                if (!partials.empty()) {
                    const LineFlowPartials d = line_power_flow_partials(vi, di, vj, dj, t.g, t.b);
                    const auto& grad = active ? (t.at_from ? d.p_send : d.p_recv)
                                              : (t.at_from ? d.q_send : d.q_recv);
                    for (int k = 0; k < 4; ++k) partials[t.pos[k]] += grad[k];
                }
            }
            return value;
        };
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<Residual> gas_node_equations(const Network& network, const Node& node) {
    if (node.is_coupling() || node.carrier != Carrier::Gas) {
        throw ModelError("node " + node.id + " is not a gas node");
    }
    const auto incident = network.incident(node.id);
    if (!node.terminal && incident.empty()) return {};

    SlotSet set;
    std::vector<LinearTerm> terms;
    for (std::size_t li : incident) {
        const Link& link = network.links()[li];
        const SlotIndex s = slot_of(network, Symbol::GasFlow, Location::link(link.id));
        double coefficient = 1.0;  // dummy links always deliver into the gas node
        if (!link.is_dummy()) coefficient = link.to == node.id ? 1.0 : -1.0;
        terms.push_back({s, set.add(s), coefficient});
    }
    if (node.terminal) {
        const SlotIndex s = slot_of(network, Symbol::GasFlow, Location::terminal(node.id));
        terms.push_back({s, set.add(s), -1.0});
    }
    std::vector<Residual> out;
    out.push_back(linear_residual("gas-mass[" + node.id + "]", set, std::move(terms)));
    return out;
}

namespace {

/// sign * m * T, where T is either a slot or the outlet temperature of a pipe
/// whose inlet temperature is a slot.
struct EnthalpyTerm {
    double sign;
    SlotIndex mass;
    std::size_t mass_pos;
    SlotIndex temperature;
    std::size_t temperature_pos;
    bool decayed;
    double heat_transfer;
    double length;
};

double eval_enthalpy(const std::vector<EnthalpyTerm>& terms, const HeatParams& heat,
                     std::span<const double> x, std::span<double> partials) {
    double value = 0.0;
    for (const auto& t : terms) {
        const double m = x[t.mass];
        double temp = x[t.temperature];
        double d_temp_d_in = 1.0;
        double d_temp_d_m = 0.0;
        if (t.decayed) {
            const DecayedTemperature d = decayed_temperature(temp, m, t.heat_transfer, t.length,
                                                             heat.specific_heat,
                                                             heat.ambient_temperature);
            temp = d.value;
            d_temp_d_in = d.d_inlet;
            d_temp_d_m = d.d_mass;
        }
        value += t.sign * m * temp;
        if (!partials.empty()) {
            partials[t.mass_pos] += t.sign * (temp + m * d_temp_d_m);
            partials[t.temperature_pos] += t.sign * m * d_temp_d_in;
        }
    }
    return value;
}

}  // namespace

std::vector<Residual> heat_node_equations(const Network& network, const Node& node) {
    if (node.is_coupling() || node.carrier != Carrier::Heat) {
        throw ModelError("node " + node.id + " is not a heat node");
    }
    const auto incident = network.incident(node.id);
    if (!node.terminal && incident.empty()) return {};

    std::vector<Residual> out;

    // Mass balance: flows in, minus flows out, minus terminal draw.
    {
        SlotSet set;
        std::vector<LinearTerm> terms;
        for (std::size_t li : incident) {
            const Link& link = network.links()[li];
            const SlotIndex s = slot_of(network, Symbol::MassFlow, Location::link(link.id));
            double coefficient = 1.0;
            if (!link.is_dummy()) coefficient = link.to == node.id ? 1.0 : -1.0;
            terms.push_back({s, set.add(s), coefficient});
        }
        if (node.terminal) {
            const SlotIndex s = slot_of(network, Symbol::MassFlow, Location::terminal(node.id));
            terms.push_back({s, set.add(s), -1.0});
        }
        out.push_back(linear_residual("heat-mass[" + node.id + "]", set, std::move(terms)));
    }

    // Energy balances. Supply water arrives from dummies and pipe outlets and
    // leaves through pipe inlets and the terminal; the return circuit mirrors it.
    for (Symbol circuit : {Symbol::SupplyTemperature, Symbol::ReturnTemperature}) {
        const bool supply = circuit == Symbol::SupplyTemperature;
        SlotSet set;
        std::vector<EnthalpyTerm> terms;
        for (std::size_t li : incident) {
            const Link& link = network.links()[li];
            const Location loc = Location::link(link.id);
            EnthalpyTerm t{};
            t.mass = slot_of(network, Symbol::MassFlow, loc);
            t.temperature = slot_of(network, circuit, loc);
            if (link.is_dummy()) {
                t.sign = supply ? 1.0 : -1.0;
                t.decayed = false;
            } else {
                const auto& pipe = std::get<HeatPipe>(link.kind);
                const bool inflow = link.to == node.id;
                // Supply inlet sits at `from`, return inlet at `to`.
                t.decayed = supply ? inflow : !inflow;
                if (supply) {
                    t.sign = inflow ? 1.0 : -1.0;
                } else {
                    t.sign = inflow ? -1.0 : 1.0;
                }
                t.heat_transfer = pipe.heat_transfer;
                t.length = pipe.length;
            }
            t.mass_pos = set.add(t.mass);
            t.temperature_pos = set.add(t.temperature);
            terms.push_back(t);
        }
        if (node.terminal && *node.terminal == TerminalKind::Full) {
            const Location loc = Location::terminal(node.id);
            EnthalpyTerm t{};
            t.mass = slot_of(network, Symbol::MassFlow, loc);
            t.temperature = slot_of(network, circuit, loc);
            t.sign = supply ? -1.0 : 1.0;
            t.decayed = false;
            t.mass_pos = set.add(t.mass);
            t.temperature_pos = set.add(t.temperature);
            terms.push_back(t);
        }
        if (terms.empty()) continue;

        Residual r;
        r.label = std::string(supply ? "heat-supply[" : "heat-return[") + node.id + "]";
        r.slots = set.take();
        r.evaluate = [terms = std::move(terms), heat = network.params().heat](
                         std::span<const double> x, std::span<double> partials) {
            if (!partials.empty()) std::fill(partials.begin(), partials.end(), 0.0);
            return eval_enthalpy(terms, heat, x, partials);
        };
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<Residual> heat_terminal_equations(const Network& network, const Node& node) {
    if (node.is_coupling() || node.carrier != Carrier::Heat || !node.terminal ||
        *node.terminal != TerminalKind::Full) {
        return {};
    }
    const Location loc = Location::terminal(node.id);
    SlotSet set;
    const SlotIndex m = slot_of(network, Symbol::MassFlow, loc);
    const SlotIndex ts = slot_of(network, Symbol::SupplyTemperature, loc);
    const SlotIndex tr = slot_of(network, Symbol::ReturnTemperature, loc);
    const SlotIndex dphi = slot_of(network, Symbol::HeatPower, loc);
    const std::size_t pm = set.add(m), pts = set.add(ts), ptr = set.add(tr), pd = set.add(dphi);
    Residual r;
    r.label = "heat-terminal[" + node.id + "]";
    r.slots = set.take();
    r.evaluate = [=, cp = network.params().heat.specific_heat](std::span<const double> x,
                                                                std::span<double> partials) {
        if (!partials.empty()) {
            partials[pm] = cp * (x[ts] - x[tr]);
            partials[pts] = cp * x[m];
            partials[ptr] = -cp * x[m];
            partials[pd] = -1.0;
        }
        return terminal_heat_power_residual(x[m], x[ts], x[tr], x[dphi], cp);
    };
    std::vector<Residual> out;
    out.push_back(std::move(r));
    return out;
}

namespace {

Residual pipe_equation(const Network& network, const Link& link, Symbol flow_symbol,
                       double pipe_constant, double friction, const char* tag) {
    SlotSet set;
    const SlotIndex pi = slot_of(network, Symbol::Pressure, Location::node(link.from));
    const SlotIndex pj = slot_of(network, Symbol::Pressure, Location::node(link.to));
    const SlotIndex flow = slot_of(network, flow_symbol, Location::link(link.id));
    const std::size_t a = set.add(pi), b = set.add(pj), c = set.add(flow);
    Residual r;
    r.label = std::string(tag) + "[" + link.id + "]";
    r.slots = set.take();
    r.evaluate = [=](std::span<const double> x, std::span<double> partials) {
        if (!partials.empty()) {
            partials[a] = 1.0;
            partials[b] = -1.0;
            partials[c] = -quadratic_pressure_drop_slope(pipe_constant, friction, x[flow]);
        }
        return x[pi] - x[pj] - quadratic_pressure_drop(pipe_constant, friction, x[flow]);
    };
    return r;
}

}  // namespace

Residual gas_pipe_equation(const Network& network, const Link& link) {
    const auto& pipe = std::get<GasPipe>(link.kind);
    return pipe_equation(network, link, Symbol::GasFlow, pipe.pipe_constant, pipe.friction, "gas-pipe");
}

Residual heat_pipe_equation(const Network& network, const Link& link) {
    const auto& pipe = std::get<HeatPipe>(link.kind);
    return pipe_equation(network, link, Symbol::MassFlow, pipe.pipe_constant, pipe.friction,
                         "heat-pipe");
}

std::pair<double, double> electric_node_residuals(const Network& network, std::string_view node_id,
                                                  std::span<const double> state) {
    const auto eqs = electric_node_equations(network, network.node(node_id));
    if (eqs.empty()) return {0.0, 0.0};
    return {eqs[0].value(state), eqs[1].value(state)};
}

double gas_node_residual(const Network& network, std::string_view node_id,
                         std::span<const double> state) {
    const auto eqs = gas_node_equations(network, network.node(node_id));
    return eqs.empty() ? 0.0 : eqs[0].value(state);
}

HeatNodeResiduals heat_node_residuals(const Network& network, std::string_view node_id,
                                      std::span<const double> state) {
    HeatNodeResiduals out;
    for (const Residual& r : heat_node_equations(network, network.node(node_id))) {
        if (r.label.starts_with("heat-mass")) out.mass = r.value(state);
        if (r.label.starts_with("heat-supply")) out.supply = r.value(state);
        if (r.label.starts_with("heat-return")) out.ret = r.value(state);
    }
    return out;
}

}  // namespace mcnet
