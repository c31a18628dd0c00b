#pragma once

#include "mcnet/network.hpp"
#include "mcnet/residual.hpp"

#include <vector>

namespace mcnet {

/// eta P - HHV q - dphi
double electrolyser_energy_balance_residual(double power, double gas_flow, double heat_power,
                                            const CouplingUnit& unit);

/// eta_h eta P - dphi. `heat_efficiency` is the fixed value or the solved slot.
double electrolyser_residual_heat_residual(double power, double heat_power, double heat_efficiency,
                                           const CouplingUnit& unit);

/// eta P - HHV q
double p2g_residual(double power, double gas_flow, const CouplingUnit& unit);

/// eta P - dphi
double eboiler_residual(double power, double heat_power, const CouplingUnit& unit);

/// c_p m (T_s - T_r) - dphi on the coupling side of a heat dummy link.
double coupling_heat_terminal_residual(double mass_flow, double t_supply, double t_return,
                                       double heat_power, double specific_heat);

/// Every equation contributed by a coupling node, in the order: heat terminal
/// (if the unit feeds heat), conversion law(s).
std::vector<Residual> coupling_equations(const Network& network, const Node& node);

}  // namespace mcnet
