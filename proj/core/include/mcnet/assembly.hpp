#pragma once

#include "mcnet/boundary.hpp"
#include "mcnet/network.hpp"
#include "mcnet/residual.hpp"

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mcnet {

/// Every residual of a network over its full registry, in a fixed order:
/// electricity balances, gas balances, gas pipes, heat mass balances, heat
/// pipes, heat energy balances, heat terminals, coupling laws.
std::vector<Residual> network_residuals(const Network& network);

/// Residuals of a network with boundary slots folded in as constants. Columns
/// of the Jacobian are the remaining (unknown) slots in registry order.
class EquationSystem {
public:
    EquationSystem() = default;

    /// Builds the system for any shape; see assemble_system for the square check.
    EquationSystem(const Network& network, const BoundaryConditionSet& bcs);

    std::size_t equation_count() const { return residuals_.size(); }
    std::size_t unknown_count() const { return unknowns_.size(); }
    bool square() const { return equation_count() == unknown_count(); }

    const std::vector<Residual>& residuals() const { return residuals_; }
    /// Registry slot of each Jacobian column.
    const std::vector<SlotIndex>& unknowns() const { return unknowns_; }
    std::optional<std::size_t> column_of(SlotIndex slot) const;
    const std::string& slot_label(SlotIndex slot) const { return labels_.at(slot); }
    Symbol slot_symbol(SlotIndex slot) const { return symbols_.at(slot); }
    std::size_t registry_size() const { return labels_.size(); }

    /// Heat-pipe mass-flow slots; the temperature substitution needs them > 0.
    const std::vector<SlotIndex>& guarded_mass_slots() const { return guarded_; }

    /// Full-registry state from unknown values, boundary slots set to their values.
    std::vector<double> expand(std::span<const double> unknowns) const;
    /// Unknown values picked out of a full-registry state.
    std::vector<double> reduce(std::span<const double> full) const;

    Eigen::VectorXd residual(std::span<const double> unknowns) const;
    void evaluate(std::span<const double> unknowns, Eigen::VectorXd& f, Eigen::MatrixXd* jacobian) const;
    Eigen::MatrixXd jacobian(std::span<const double> unknowns) const;

    /// Column indices of the structurally nonzero entries of each row.
    std::vector<std::vector<std::size_t>> sparsity() const;

private:
    std::vector<Residual> residuals_;
    std::vector<SlotIndex> unknowns_;
    std::vector<std::ptrdiff_t> column_;  // -1 for boundary slots
    std::vector<double> fixed_;           // boundary values, 0 elsewhere
    std::vector<std::string> labels_;
    std::vector<Symbol> symbols_;
    std::vector<SlotIndex> guarded_;
};

/// Builds the reduced system and rejects non-square problems and boundary
/// conditions on slots outside the registry (ModelError).
EquationSystem assemble_system(const Network& network, const BoundaryConditionSet& bcs);

}  // namespace mcnet
