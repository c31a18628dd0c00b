#include "mcnet/types.hpp"

namespace mcnet {

std::string_view to_string(Carrier carrier) {
    switch (carrier) {
        case Carrier::Electricity: return "electricity";
        case Carrier::Gas: return "gas";
        case Carrier::Heat: return "heat";
    }
    return "?";
}

std::string_view to_string(CouplingKind kind) {
    switch (kind) {
        case CouplingKind::Electrolyser: return "electrolyser";
        case CouplingKind::P2G: return "p2g";
        case CouplingKind::ElectricalBoiler: return "electrical_boiler";
    }
    return "?";
}

std::string_view to_string(Symbol symbol) {
    switch (symbol) {
        case Symbol::VoltageMagnitude: return "voltage_magnitude";
        case Symbol::VoltageAngle: return "voltage_angle";
        case Symbol::ActivePower: return "active_power";
        case Symbol::ReactivePower: return "reactive_power";
        case Symbol::Pressure: return "pressure";
        case Symbol::GasFlow: return "gas_flow";
        case Symbol::MassFlow: return "mass_flow";
        case Symbol::SupplyTemperature: return "supply_temperature";
        case Symbol::ReturnTemperature: return "return_temperature";
        case Symbol::HeatPower: return "heat_power";
        case Symbol::HeatEfficiency: return "heat_efficiency";
    }
    return "?";
}

std::string_view symbol_tag(Symbol symbol) {
    switch (symbol) {
        case Symbol::VoltageMagnitude: return "V";
        case Symbol::VoltageAngle: return "delta";
        case Symbol::ActivePower: return "P";
        case Symbol::ReactivePower: return "Q";
        case Symbol::Pressure: return "p";
        case Symbol::GasFlow: return "q";
        case Symbol::MassFlow: return "m";
        case Symbol::SupplyTemperature: return "T^s";
        case Symbol::ReturnTemperature: return "T^r";
        case Symbol::HeatPower: return "dphi";
        case Symbol::HeatEfficiency: return "eta_h";
    }
    return "?";
}

std::string_view si_unit(Symbol symbol) {
    switch (symbol) {
        case Symbol::VoltageMagnitude: return "V";
        case Symbol::VoltageAngle: return "rad";
        case Symbol::ActivePower: return "W";
        case Symbol::ReactivePower: return "var";
        case Symbol::Pressure: return "Pa";
        case Symbol::GasFlow: return "kg/s";
        case Symbol::MassFlow: return "kg/s";
        case Symbol::SupplyTemperature: return "K";
        case Symbol::ReturnTemperature: return "K";
        case Symbol::HeatPower: return "W";
        case Symbol::HeatEfficiency: return "-";
    }
    return "?";
}

}  // namespace mcnet
