#include "mcnet/coupling.hpp"

#include "mcnet/carrier_equations.hpp"

#include <optional>

namespace mcnet {

double electrolyser_energy_balance_residual(double power, double gas_flow, double heat_power,
                                            const CouplingUnit& unit) {
    return unit.efficiency * power - unit.hhv * gas_flow - heat_power;
}

double electrolyser_residual_heat_residual(double power, double heat_power, double heat_efficiency,
                                           const CouplingUnit& unit) {
    return heat_efficiency * unit.efficiency * power - heat_power;
}

double p2g_residual(double power, double gas_flow, const CouplingUnit& unit) {
    return unit.efficiency * power - unit.hhv * gas_flow;
}

double eboiler_residual(double power, double heat_power, const CouplingUnit& unit) {
    return unit.efficiency * power - heat_power;
}

double coupling_heat_terminal_residual(double mass_flow, double t_supply, double t_return,
                                       double heat_power, double specific_heat) {
    return terminal_heat_power_residual(mass_flow, t_supply, t_return, heat_power, specific_heat);
}

std::vector<Residual> coupling_equations(const Network& network, const Node& node) {
    if (!node.is_coupling()) throw ModelError("node " + node.id + " is not a coupling node");
    const CouplingUnit unit = *node.coupling;
    const VariableRegistry& reg = network.registry();

    std::optional<std::string> e_link, g_link, h_link;
    for (std::size_t li : network.incident(node.id)) {
        const Link& link = network.links()[li];
        switch (link.carrier()) {
            case Carrier::Electricity: e_link = link.id; break;
            case Carrier::Gas: g_link = link.id; break;
            case Carrier::Heat: h_link = link.id; break;
        }
    }
    const SlotIndex power = reg.index(SlotKey{Symbol::ActivePower, Location::link(*e_link)});
    std::optional<SlotIndex> gas, mass, t_supply, t_return, heat;
    if (g_link) gas = reg.index(SlotKey{Symbol::GasFlow, Location::link(*g_link)});
    if (h_link) {
        const Location loc = Location::link(*h_link);
        mass = reg.index(SlotKey{Symbol::MassFlow, loc});
        t_supply = reg.index(SlotKey{Symbol::SupplyTemperature, loc});
        t_return = reg.index(SlotKey{Symbol::ReturnTemperature, loc});
        heat = reg.index(SlotKey{Symbol::HeatPower, loc});
    }

    std::vector<Residual> out;

    if (h_link) {
        SlotSet set;
        const std::size_t pm = set.add(*mass), ps = set.add(*t_supply), pr = set.add(*t_return),
                          pd = set.add(*heat);
        Residual r;
        r.label = "coupling-heat[" + node.id + "]";
        r.slots = set.take();
        r.evaluate = [=, m = *mass, ts = *t_supply, tr = *t_return, d = *heat,
                      cp = network.params().heat.specific_heat](std::span<const double> x,
                                                                 std::span<double> partials) {
            if (!partials.empty()) {
                partials[pm] = cp * (x[ts] - x[tr]);
                partials[ps] = cp * x[m];
                partials[pr] = -cp * x[m];
                partials[pd] = -1.0;
            }
            return coupling_heat_terminal_residual(x[m], x[ts], x[tr], x[d], cp);
        };
        out.push_back(std::move(r));
    }

    // Conversion law: eta P - HHV q - dphi with absent outputs dropped.
    {
        SlotSet set;
        const std::size_t pp = set.add(power);
        std::optional<std::size_t> pg, ph;
        if (gas) pg = set.add(*gas);
        if (heat) ph = set.add(*heat);
        std::string tag;
        switch (unit.kind) {
            case CouplingKind::Electrolyser: tag = "energy-balance"; break;
            case CouplingKind::P2G: tag = "p2g"; break;
            case CouplingKind::ElectricalBoiler: tag = "boiler"; break;
        }
        Residual r;
        r.label = tag + "[" + node.id + "]";
        r.slots = set.take();
        r.evaluate = [=](std::span<const double> x, std::span<double> partials) {
            const double q = gas ? x[*gas] : 0.0;
            const double dphi = heat ? x[*heat] : 0.0;
            if (!partials.empty()) {
                partials[pp] = unit.efficiency;
                if (pg) partials[*pg] = -unit.hhv;
                if (ph) partials[*ph] = -1.0;
            }
            switch (unit.kind) {
                case CouplingKind::P2G: return p2g_residual(x[power], q, unit);
                case CouplingKind::ElectricalBoiler: return eboiler_residual(x[power], dphi, unit);
                case CouplingKind::Electrolyser: break;
            }
            return electrolyser_energy_balance_residual(x[power], q, dphi, unit);
        };
        out.push_back(std::move(r));
    }

    // The heat split only adds information when both outputs exist; with a
    // single output the topology already fixes eta_h to 0 or 1.
    if (unit.kind == CouplingKind::Electrolyser && gas && heat) {
        std::optional<SlotIndex> eta_slot;
        if (unit.free_heat_efficiency()) {
            eta_slot = reg.index(SlotKey{Symbol::HeatEfficiency, Location::coupling(node.id)});
        }
        SlotSet set;
        const std::size_t pp = set.add(power), pd = set.add(*heat);
        std::optional<std::size_t> pe;
        if (eta_slot) pe = set.add(*eta_slot);
        Residual r;
        r.label = "residual-heat[" + node.id + "]";
        r.slots = set.take();
        r.evaluate = [=, d = *heat](std::span<const double> x, std::span<double> partials) {
            const double eta_h = eta_slot ? x[*eta_slot] : *unit.heat_efficiency;
            if (!partials.empty()) {
                partials[pp] = eta_h * unit.efficiency;
                partials[pd] = -1.0;
                if (pe) partials[*pe] = unit.efficiency * x[power];
            }
            return electrolyser_residual_heat_residual(x[power], x[d], eta_h, unit);
        };
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace mcnet
