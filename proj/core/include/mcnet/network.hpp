#pragma once

#include "mcnet/registry.hpp"
#include "mcnet/types.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace mcnet {

// -----------------------------------------------------------------------------
// Physical parameters
// -----------------------------------------------------------------------------

struct GasParams {
    double hhv = 1.418e8;                 // J/kg
    double specific_gravity = 0.589;      // relative to air
    double compressibility = 1.0;         // Z
    double standard_pressure = 1.0e5;     // Pa
    double standard_temperature = 288.0;  // K
    double gas_constant = 8.314413;       // J/(mol K)
    double molar_mass_air = 28.97e-3;     // kg/mol

    /// Density at standard conditions from the ideal-gas law.
    double normal_density() const;

    bool operator==(const GasParams&) const = default;
};

struct HeatParams {
    double density = 960.0;               // kg/m^3
    double specific_heat = 4182.0;        // J/(kg K)
    double ambient_temperature = 273.15;  // K
    double gravity = 9.81;                // m/s^2, carried but not used by any equation

    bool operator==(const HeatParams&) const = default;
};

/// Specific gravity of hydrogen relative to air (M_H2 / M_air).
inline constexpr double kHydrogenSpecificGravity = 0.0696;

struct CarrierParams {
    GasParams gas;
    HeatParams heat;

    /// Throws ModelError unless every parameter is finite and strictly positive.
    void validate() const;

    bool operator==(const CarrierParams&) const = default;
};

// -----------------------------------------------------------------------------
// Nodes
// -----------------------------------------------------------------------------

/// A heat terminal either exchanges heat with the outside (mass flow,
/// temperatures and heat power) or only carries the mass-balance term, which is
/// how a junction is represented. Electricity and gas terminals ignore the kind.
enum class TerminalKind { Full, Junction };

struct CouplingUnit {
    CouplingKind kind = CouplingKind::Electrolyser;
    double efficiency = 0.9;                 // eta
    std::optional<double> heat_efficiency;   // eta_h; nullopt means solved for
    double hhv = 1.418e8;                    // J/kg

    bool free_heat_efficiency() const { return !heat_efficiency.has_value(); }

    bool operator==(const CouplingUnit&) const = default;
};

struct Node {
    std::string id;
    Carrier carrier = Carrier::Electricity;  // ignored for coupling nodes
    std::optional<TerminalKind> terminal;
    std::optional<CouplingUnit> coupling;

    bool is_coupling() const { return coupling.has_value(); }
    bool has_terminal() const { return terminal.has_value(); }

    static Node carrier_node(std::string id, Carrier carrier,
                             std::optional<TerminalKind> terminal = TerminalKind::Full);
    static Node coupling_node(std::string id, CouplingUnit unit);

    bool operator==(const Node&) const = default;
};

// -----------------------------------------------------------------------------
// Links
// -----------------------------------------------------------------------------

struct TransmissionLine {
    double conductance = 0.0;  // g [S]
    double susceptance = 0.0;  // b [S]

    bool operator==(const TransmissionLine&) const = default;
};

struct GasPipe {
    double pipe_constant = 0.0;  // C^g
    double friction = 0.0;       // Fanning friction factor
    // Geometry the constant was derived from, when known.
    std::optional<double> length;
    std::optional<double> diameter;

    bool operator==(const GasPipe&) const = default;
};

struct HeatPipe {
    double pipe_constant = 0.0;  // C^h
    double friction = 0.0;
    double heat_transfer = 0.0;  // lambda, per unit length [W/(m K)]
    double length = 0.0;         // m
    std::optional<double> diameter;

    bool operator==(const HeatPipe&) const = default;
};

/// Lossless link between a coupling node and a single-carrier node.
struct DummyLink {
    Carrier carrier = Carrier::Electricity;

    bool operator==(const DummyLink&) const = default;
};

using LinkKind = std::variant<TransmissionLine, GasPipe, HeatPipe, DummyLink>;

struct Link {
    std::string id;
    std::string from;
    std::string to;
    LinkKind kind;

    bool is_dummy() const { return std::holds_alternative<DummyLink>(kind); }
    Carrier carrier() const;

    bool operator==(const Link&) const = default;
};

// -----------------------------------------------------------------------------
// Network
// -----------------------------------------------------------------------------

/// Validated multi-carrier graph together with its variable registry.
/// Immutable after construction.
class Network {
public:
    Network() = default;

    const std::vector<Node>& nodes() const { return nodes_; }
    const std::vector<Link>& links() const { return links_; }
    const CarrierParams& params() const { return params_; }
    const VariableRegistry& registry() const { return registry_; }

    const Node& node(std::string_view id) const;
    const Link& link(std::string_view id) const;
    const Node* find_node(std::string_view id) const;
    const Link* find_link(std::string_view id) const;

    /// Indices into links() of every link touching the node, in link-id order.
    std::span<const std::size_t> incident(std::string_view node_id) const;

    /// Node at the other end of a link.
    const Node& other_end(const Link& link, std::string_view node_id) const;

    bool operator==(const Network& other) const;

private:
    friend Network build_network(std::vector<Node>, std::vector<Link>, CarrierParams);

    std::vector<Node> nodes_;  // sorted by id
    std::vector<Link> links_;  // sorted by id
    CarrierParams params_;
    VariableRegistry registry_;
    std::map<std::string, std::size_t, std::less<>> node_index_;
    std::map<std::string, std::size_t, std::less<>> link_index_;
    std::map<std::string, std::vector<std::size_t>, std::less<>> incidence_;
};

/// Validates the graph and builds its registry. Throws ModelError on dangling
/// endpoints, duplicate ids, carrier mismatches and invalid parameters.
Network build_network(std::vector<Node> nodes, std::vector<Link> links, CarrierParams params);

/// Index of the slot holding `symbol` at `location`. Throws ModelError if the
/// network has no such slot (for instance eta_h of a fixed-ratio electrolyser).
SlotIndex registry_lookup(const Network& network, Symbol symbol, const Location& location);

}  // namespace mcnet
