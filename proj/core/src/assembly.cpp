#include "mcnet/assembly.hpp"

#include "mcnet/carrier_equations.hpp"
#include "mcnet/coupling.hpp"

#include <algorithm>

namespace mcnet {

std::vector<Residual> network_residuals(const Network& network) {
    std::vector<Residual> out;
    auto append = [&out](std::vector<Residual> rs) {
        for (auto& r : rs) out.push_back(std::move(r));
    };

    for (const Node& node : network.nodes()) {
        if (!node.is_coupling() && node.carrier == Carrier::Electricity) {
            append(electric_node_equations(network, node));
        }
    }
    for (const Node& node : network.nodes()) {
        if (!node.is_coupling() && node.carrier == Carrier::Gas) append(gas_node_equations(network, node));
    }
    for (const Link& link : network.links()) {
        if (std::holds_alternative<GasPipe>(link.kind)) out.push_back(gas_pipe_equation(network, link));
    }

    std::vector<Residual> heat_energy;
    for (const Node& node : network.nodes()) {
        if (node.is_coupling() || node.carrier != Carrier::Heat) continue;
        for (auto& r : heat_node_equations(network, node)) {
            if (r.label.starts_with("heat-mass")) {
                out.push_back(std::move(r));
            } else {
                heat_energy.push_back(std::move(r));
            }
        }
    }
    for (const Link& link : network.links()) {
        if (std::holds_alternative<HeatPipe>(link.kind)) out.push_back(heat_pipe_equation(network, link));
    }
    append(std::move(heat_energy));
    for (const Node& node : network.nodes()) {
        if (!node.is_coupling() && node.carrier == Carrier::Heat) {
            append(heat_terminal_equations(network, node));
        }
    }
    for (const Node& node : network.nodes()) {
        if (node.is_coupling()) append(coupling_equations(network, node));
    }
    return out;
}

EquationSystem::EquationSystem(const Network& network, const BoundaryConditionSet& bcs)
    : residuals_(network_residuals(network)) {
    const VariableRegistry& reg = network.registry();
    for (const auto& bc : bcs.entries()) {
        if (bc.slot >= reg.size()) {
            throw ModelError("boundary condition on slot " + std::to_string(bc.slot) +
                             " outside the registry");
        }
    }
    column_.assign(reg.size(), -1);
    fixed_.assign(reg.size(), 0.0);
    labels_.reserve(reg.size());
    for (SlotIndex s = 0; s < reg.size(); ++s) {
        labels_.push_back(reg[s].label);
        symbols_.push_back(reg[s].key.symbol);
        if (auto v = bcs.value(s)) {
            fixed_[s] = *v;
        } else {
            column_[s] = static_cast<std::ptrdiff_t>(unknowns_.size());
            unknowns_.push_back(s);
        }
    }
    for (const Link& link : network.links()) {
        if (std::holds_alternative<HeatPipe>(link.kind)) {
            guarded_.push_back(reg.index(SlotKey{Symbol::MassFlow, Location::link(link.id)}));
        }
    }
}

std::optional<std::size_t> EquationSystem::column_of(SlotIndex slot) const {
    if (slot >= column_.size() || column_[slot] < 0) return std::nullopt;
    return static_cast<std::size_t>(column_[slot]);
}

std::vector<double> EquationSystem::expand(std::span<const double> unknowns) const {
    if (unknowns.size() != unknowns_.size()) {
        throw ModelError("state has " + std::to_string(unknowns.size()) + " entries, system has " +
                         std::to_string(unknowns_.size()) + " unknowns");
    }
    std::vector<double> full = fixed_;
    for (std::size_t k = 0; k < unknowns_.size(); ++k) full[unknowns_[k]] = unknowns[k];
    return full;
}

std::vector<double> EquationSystem::reduce(std::span<const double> full) const {
    if (full.size() != fixed_.size()) throw ModelError("full state does not match the registry size");
    std::vector<double> out(unknowns_.size());
    for (std::size_t k = 0; k < unknowns_.size(); ++k) out[k] = full[unknowns_[k]];
    return out;
}

void EquationSystem::evaluate(std::span<const double> unknowns, Eigen::VectorXd& f,
                              Eigen::MatrixXd* jacobian) const {
    const std::vector<double> x = expand(unknowns);
    const auto rows = static_cast<Eigen::Index>(residuals_.size());
    f.resize(rows);
    if (jacobian) jacobian->setZero(rows, static_cast<Eigen::Index>(unknowns_.size()));

    std::vector<double> partials;
    for (Eigen::Index i = 0; i < rows; ++i) {
        const Residual& r = residuals_[static_cast<std::size_t>(i)];
        if (!jacobian) {
            f[i] = r.evaluate(x, {});
            continue;
        }
        partials.assign(r.slots.size(), 0.0);
        f[i] = r.evaluate(x, partials);
        for (std::size_t k = 0; k < r.slots.size(); ++k) {
            const std::ptrdiff_t col = column_[r.slots[k]];
            if (col >= 0) (*jacobian)(i, col) += partials[k];
        }
    }
}

Eigen::VectorXd EquationSystem::residual(std::span<const double> unknowns) const {
    Eigen::VectorXd f;
    evaluate(unknowns, f, nullptr);
    return f;
}

Eigen::MatrixXd EquationSystem::jacobian(std::span<const double> unknowns) const {
    Eigen::VectorXd f;
    Eigen::MatrixXd j;
    evaluate(unknowns, f, &j);
    return j;
}

std::vector<std::vector<std::size_t>> EquationSystem::sparsity() const {
    std::vector<std::vector<std::size_t>> out;
    out.reserve(residuals_.size());
    for (const Residual& r : residuals_) {
        std::vector<std::size_t> cols;
        for (SlotIndex s : r.slots) {
            if (column_[s] >= 0) cols.push_back(static_cast<std::size_t>(column_[s]));
        }
        std::sort(cols.begin(), cols.end());
        out.push_back(std::move(cols));
    }
    return out;
}

EquationSystem assemble_system(const Network& network, const BoundaryConditionSet& bcs) {
    EquationSystem system(network, bcs);
    if (!system.square()) {
        throw ModelError("system is not square: " + std::to_string(system.equation_count()) +
                         " equations, " + std::to_string(system.unknown_count()) + " unknowns");
    }
    return system;
}

}  // namespace mcnet
