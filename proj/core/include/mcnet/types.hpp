#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mcnet {

enum class Carrier { Electricity, Gas, Heat };

enum class CouplingKind { Electrolyser, P2G, ElectricalBoiler };

/// Kinds of quantities that occupy a registry slot. Order matters: it is the
/// secondary sort key of the registry.
enum class Symbol {
    VoltageMagnitude,   // |V|  [V]
    VoltageAngle,       // delta [rad]
    ActivePower,        // P [W]
    ReactivePower,      // Q [var]
    Pressure,           // p [Pa]
    GasFlow,            // q [kg/s]
    MassFlow,           // m [kg/s]
    SupplyTemperature,  // T^s [K]
    ReturnTemperature,  // T^r [K]
    HeatPower,          // dphi [W]
    HeatEfficiency      // eta_h [-], only for free-ratio electrolysers
};

std::string_view to_string(Carrier carrier);
std::string_view to_string(CouplingKind kind);
std::string_view to_string(Symbol symbol);

/// Short symbol used in slot labels, e.g. "P", "T^s", "dphi".
std::string_view symbol_tag(Symbol symbol);

/// SI unit of a symbol.
std::string_view si_unit(Symbol symbol);

/// Raised on invalid network construction or lookups.
class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when a state leaves the region where the heat equations are defined
/// (non-positive mass flow along a heat pipe).
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace mcnet
