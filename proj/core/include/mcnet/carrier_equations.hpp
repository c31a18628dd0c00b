#pragma once

// Single-carrier physics: transmission lines, low-pressure gas pipes and
// closed-loop heat pipes, plus the nodal conservation laws that tie them
// together. Scalar functions are pure; the *_equations builders turn them
// into Residual objects over a network's registry.

#include "mcnet/network.hpp"
#include "mcnet/residual.hpp"

#include <array>
#include <span>
#include <utility>
#include <vector>

namespace mcnet {

// -----------------------------------------------------------------------------
// Transmission line
// -----------------------------------------------------------------------------

/// Powers injected into a short line at its sending end i and receiving end j.
struct LineFlows {
    double p_send = 0.0;
    double q_send = 0.0;
    double p_recv = 0.0;
    double q_recv = 0.0;
};

/// Partials of each line flow with respect to (|V_i|, delta_i, |V_j|, delta_j).
struct LineFlowPartials {
    std::array<double, 4> p_send{};
    std::array<double, 4> q_send{};
    std::array<double, 4> p_recv{};
    std::array<double, 4> q_recv{};
};

LineFlows line_power_flows(double v_i, double delta_i, double v_j, double delta_j, double g, double b);
LineFlowPartials line_power_flow_partials(double v_i, double delta_i, double v_j, double delta_j,
                                          double g, double b);

// -----------------------------------------------------------------------------
// Pipes
// -----------------------------------------------------------------------------

/// Quadratic pressure-drop law C^-2 f |x| x.
double quadratic_pressure_drop(double pipe_constant, double friction, double flow);

/// d/dx of C^-2 f |x| x, i.e. 2 f |x| / C^2 (zero at x = 0).
double quadratic_pressure_drop_slope(double pipe_constant, double friction, double flow);

/// p_i - p_j - C_g^-2 f |q| q
double gas_pipe_residual(double p_i, double p_j, double q_ij, double pipe_constant, double friction);

/// p_i - p_j - C_h^-2 f |m| m
double heat_pipe_hydraulic_residual(double p_i, double p_j, double m_ij, double pipe_constant,
                                    double friction);

/// Outlet temperature of a pipe carrying `mass_flow` > 0:
///   (T_in - T_a) exp(-lambda L / (c_p m)) + T_a.
/// Throws DomainError for mass_flow <= 0.
double heat_pipe_temperature_out(double t_in, double mass_flow, double heat_transfer, double length,
                                 double specific_heat, double ambient);

struct DecayedTemperature {
    double value = 0.0;
    double d_inlet = 0.0;
    double d_mass = 0.0;
};

/// Same law with partials. Total in m: for m <= 0 the m -> 0+ limit is
/// returned (outlet at ambient, zero partials), which is what a singularity
/// probe at zero flow needs. Solvers must keep m > 0 themselves.
DecayedTemperature decayed_temperature(double t_in, double mass_flow, double heat_transfer,
                                       double length, double specific_heat, double ambient);

/// c_p m (T_s - T_r) - dphi
double terminal_heat_power_residual(double mass_flow, double t_supply, double t_return,
                                    double heat_power, double specific_heat);

/// C_g such that C_g^-2 = 2 L / (D rho_n A^2), rho_n the standard-condition density.
double gas_pipe_constant(const GasParams& params, double length, double diameter);

/// C_h such that C_h^-2 = 2 L / (D rho A^2).
double heat_pipe_constant(const HeatParams& params, double length, double diameter);

// -----------------------------------------------------------------------------
// Network-level residuals
// -----------------------------------------------------------------------------

/// Active and reactive balance of an electricity node, in that order.
/// P_i + sum_j P_ij, with line powers expressed through voltages. Empty when the
/// node has neither a terminal nor incident links.
std::vector<Residual> electric_node_equations(const Network& network, const Node& node);

/// q_in - q_out - q_i for a gas node.
std::vector<Residual> gas_node_equations(const Network& network, const Node& node);

/// Mass balance, supply energy balance and return energy balance of a heat node.
/// Pipe-end temperatures are substituted through decayed_temperature.
std::vector<Residual> heat_node_equations(const Network& network, const Node& node);

/// Heat-power equation of a full heat terminal; empty for junction terminals.
std::vector<Residual> heat_terminal_equations(const Network& network, const Node& node);

Residual gas_pipe_equation(const Network& network, const Link& link);
Residual heat_pipe_equation(const Network& network, const Link& link);

std::pair<double, double> electric_node_residuals(const Network& network, std::string_view node_id,
                                                  std::span<const double> state);
double gas_node_residual(const Network& network, std::string_view node_id,
                         std::span<const double> state);

struct HeatNodeResiduals {
    double mass = 0.0;
    double supply = 0.0;
    double ret = 0.0;
};
HeatNodeResiduals heat_node_residuals(const Network& network, std::string_view node_id,
                                      std::span<const double> state);

}  // namespace mcnet
