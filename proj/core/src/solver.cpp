#include "mcnet/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mcnet {

void SolverConfig::validate() const {
    if (!(tol > 0.0) || !std::isfinite(tol)) throw ModelError("solver tol must be > 0");
    if (max_iter < 1) throw ModelError("solver max_iter must be >= 1");
    if (!(damping > 0.0 && damping <= 1.0)) throw ModelError("solver damping must lie in (0, 1]");
    if (!(min_pivot >= 0.0) || !std::isfinite(min_pivot)) throw ModelError("solver min_pivot must be >= 0");
}

std::string_view to_string(SolveStatus status) {
    switch (status) {
        case SolveStatus::Converged: return "Converged";
        case SolveStatus::MaxIterations: return "MaxIterations";
        case SolveStatus::SingularJacobian: return "SingularJacobian";
        case SolveStatus::DomainViolation: return "DomainViolation";
    }
    return "?";
}

namespace {

Carrier carrier_of(const Network& network, const Location& where) {
    if (where.kind == LocationKind::Link) return network.link(where.id).carrier();
    return network.node(where.id).carrier;
}

// First fixed value of `symbol` in `carrier`, in registry order.
std::optional<double> fixed_reference(const Network& network, const BoundaryConditionSet& bcs, Symbol symbol,
                                      std::optional<Carrier> carrier) {
    const VariableRegistry& reg = network.registry();
    for (const auto& bc : bcs.entries()) {
        const SlotKey& key = reg[bc.slot].key;
        if (key.symbol != symbol) continue;
        if (carrier && key.location.kind != LocationKind::Coupling &&
            carrier_of(network, key.location) != *carrier) {
            continue;
        }
        return bc.value;
    }
    return std::nullopt;
}

}  // namespace

InitialGuess default_initial_guess(const Network& network, const BoundaryConditionSet& bcs) {
    const VariableRegistry& reg = network.registry();
    InitialGuess guess;
    guess.values.assign(reg.size(), 0.0);

    const double v_ref = fixed_reference(network, bcs, Symbol::VoltageMagnitude, std::nullopt).value_or(1.0);
    const auto gas_ref = fixed_reference(network, bcs, Symbol::Pressure, Carrier::Gas);
    const auto heat_ref = fixed_reference(network, bcs, Symbol::Pressure, Carrier::Heat);
    const auto ts_ref = fixed_reference(network, bcs, Symbol::SupplyTemperature, std::nullopt);
    const auto tr_ref = fixed_reference(network, bcs, Symbol::ReturnTemperature, std::nullopt);
    const double t_supply = ts_ref ? *ts_ref + 15.0 : 353.15;
    const double t_return = tr_ref ? *tr_ref - 10.0 : 313.15;

    for (SlotIndex s = 0; s < reg.size(); ++s) {
        const SlotKey& key = reg[s].key;
        double& v = guess.values[s];
        switch (key.symbol) {
            case Symbol::VoltageMagnitude: v = v_ref; break;
            case Symbol::Pressure: {
                const auto ref = carrier_of(network, key.location) == Carrier::Gas ? gas_ref : heat_ref;
                v = ref ? *ref * 1.05 : 1.0e5;
                break;
            }
            case Symbol::MassFlow: v = 1.0; break;
            case Symbol::SupplyTemperature: v = t_supply; break;
            case Symbol::ReturnTemperature: v = t_return; break;
            case Symbol::HeatEfficiency: v = 0.5; break;
            default: v = 0.0; break;
        }
    }

    // With eta_h free, a zero converter power makes the eta_h column vanish.
    // Start from the power implied by the fixed outputs instead.
    for (const Node& node : network.nodes()) {
        if (!node.is_coupling() || !node.coupling->free_heat_efficiency()) continue;
        double demand = 0.0;
        for (const auto& bc : bcs.entries()) {
            const SlotKey& key = reg[bc.slot].key;
            if (key.location.kind != LocationKind::Terminal) continue;
            if (key.symbol == Symbol::GasFlow) demand += node.coupling->hhv * bc.value;
            if (key.symbol == Symbol::HeatPower) demand += bc.value;
        }
        const double power = demand != 0.0 ? demand / node.coupling->efficiency : 1.0e6;
        for (std::size_t li : network.incident(node.id)) {
            const Link& link = network.links()[li];
            if (link.carrier() != Carrier::Electricity) continue;
            guess.values[reg.index(SlotKey{Symbol::ActivePower, Location::link(link.id)})] = power;
        }
    }

    for (const auto& bc : bcs.entries()) guess.values[bc.slot] = bc.value;
    return guess;
}

InitialGuess initial_guess_from_labels(const Network& network, const BoundaryConditionSet& bcs,
                                       const std::vector<std::pair<std::string, double>>& values) {
    InitialGuess guess = default_initial_guess(network, bcs);
    guess.strategy = InitialGuess::Strategy::UserSupplied;
    for (const auto& [label, value] : values) {
        const SlotIndex s = network.registry().index(label);
        if (!std::isfinite(value)) throw ModelError("initial guess for " + label + " is not finite");
        if (!bcs.contains(s)) guess.values[s] = value;
    }
    return guess;
}

SolveResult newton_solve(const EquationSystem& system, const InitialGuess& guess, const SolverConfig& config) {
    config.validate();
    if (!system.square()) {
        throw ModelError("newton_solve needs a square system (" + std::to_string(system.equation_count()) +
                         " equations, " + std::to_string(system.unknown_count()) + " unknowns)");
    }
    if (guess.values.size() != system.registry_size()) {
        throw ModelError("initial guess has " + std::to_string(guess.values.size()) +
                         " values, registry has " + std::to_string(system.registry_size()));
    }

    SolveResult result;
    std::vector<double> x = system.reduce(guess.values);
    Eigen::VectorXd f;
    Eigen::MatrixXd jac;
    auto finish = [&](SolveStatus status, std::string message) {
        result.status = status;
        result.message = std::move(message);
        result.state = system.expand(x);
        return result;
    };

    for (int iter = 0;; ++iter) {
        system.evaluate(x, f, &jac);
        const double norm = f.norm();
        result.residual_history.push_back(norm);
        result.iterations = iter;
        if (!std::isfinite(norm)) return finish(SolveStatus::DomainViolation, "residual is not finite");
        if (norm <= config.tol) return finish(SolveStatus::Converged, "");
        if (iter >= config.max_iter) {
            return finish(SolveStatus::MaxIterations,
                          "no convergence after " + std::to_string(config.max_iter) + " iterations");
        }

        const Equilibration scale = equilibrate(jac);
        const Eigen::PartialPivLU<Eigen::MatrixXd> lu(scale.apply(jac));
        const Eigen::VectorXd pivots = lu.matrixLU().diagonal().cwiseAbs();
        const double largest = pivots.maxCoeff();
        Eigen::Index worst = 0;
        const double smallest = pivots.minCoeff(&worst);
        if (!(smallest > config.min_pivot * largest) || !(largest > 0.0)) {
            return finish(SolveStatus::SingularJacobian,
                          "LU pivot " + std::to_string(worst) + " is " + std::to_string(smallest) +
                              " against largest " + std::to_string(largest));
        }
        const Eigen::VectorXd step = scale.col.asDiagonal() * lu.solve(scale.row.asDiagonal() * f);
        for (std::size_t k = 0; k < x.size(); ++k) x[k] -= config.damping * step[static_cast<Eigen::Index>(k)];
        result.iterations = iter + 1;

        const std::vector<double> full = system.expand(x);
        for (SlotIndex s : system.guarded_mass_slots()) {
            if (full[s] <= 1e-9) {
                result.residual_history.push_back(system.residual(x).norm());
                return finish(SolveStatus::DomainViolation,
                              system.slot_label(s) + " = " + std::to_string(full[s]) + " kg/s");
            }
        }
    }
}

SolveResult solve_network(const Network& network, const BoundaryConditionSet& bcs, const SolverConfig& config,
                          const std::optional<InitialGuess>& guess) {
    const DofCount dofs = count_dofs(network, bcs);
    const SquareVerdict square = check_square(network, bcs);
    if (!square.square()) throw ModelError("system is " + square.to_string());

    const EquationSystem system = assemble_system(network, bcs);
    InitialGuess start = guess ? *guess : default_initial_guess(network, bcs);
    if (start.values.size() != network.registry().size()) {
        throw ModelError("initial guess does not match the registry size");
    }
    for (const auto& bc : bcs.entries()) start.values[bc.slot] = bc.value;

    SolveResult result = newton_solve(system, start, config);
    result.dofs = dofs;
    result.square = square;
    result.rank_at_guess = probe_matrix(system.jacobian(system.reduce(start.values)), config.min_pivot);
    return result;
}

double typical_magnitude(Symbol symbol) {
    switch (symbol) {
        case Symbol::ActivePower:
        case Symbol::ReactivePower:
        case Symbol::HeatPower: return 1e6;
        case Symbol::Pressure: return 1e5;
        case Symbol::VoltageMagnitude:
        case Symbol::SupplyTemperature:
        case Symbol::ReturnTemperature: return 1e2;
        default: return 1.0;
    }
}

Eigen::MatrixXd finite_difference_jacobian(const EquationSystem& system, std::span<const double> unknowns) {
    const auto rows = static_cast<Eigen::Index>(system.equation_count());
    const auto cols = static_cast<Eigen::Index>(unknowns.size());
    Eigen::MatrixXd jac(rows, cols);
    std::vector<double> x(unknowns.begin(), unknowns.end());
    for (Eigen::Index c = 0; c < cols; ++c) {
        const auto k = static_cast<std::size_t>(c);
        const double x0 = x[k];
        const double h = 1e-6 * std::max(std::abs(x0), typical_magnitude(system.slot_symbol(system.unknowns()[k])));
        x[k] = x0 + h;
        const Eigen::VectorXd plus = system.residual(x);
        x[k] = x0 - h;
        const Eigen::VectorXd minus = system.residual(x);
        x[k] = x0;
        jac.col(c) = (plus - minus) / (2.0 * h);
    }
    return jac;
}

std::vector<JacobianMismatch> compare_jacobians(const EquationSystem& system, const Eigen::MatrixXd& analytic,
                                                const Eigen::MatrixXd& numeric, double rel_tol,
                                                double row_floor) {
    if (analytic.rows() != numeric.rows() || analytic.cols() != numeric.cols()) {
        throw ModelError("Jacobians differ in shape");
    }
    std::vector<JacobianMismatch> out;
    for (Eigen::Index i = 0; i < analytic.rows(); ++i) {
        const double row_scale = analytic.row(i).cwiseAbs().maxCoeff();
        for (Eigen::Index j = 0; j < analytic.cols(); ++j) {
            const double a = analytic(i, j);
            const double n = numeric(i, j);
            const double denom = std::max({std::abs(a), std::abs(n), row_floor * row_scale,
                                           std::numeric_limits<double>::min()});
            const double err = std::abs(a - n) / denom;
            if (err > rel_tol) {
                const auto row = static_cast<std::size_t>(i);
                const auto col = static_cast<std::size_t>(j);
                out.push_back({row, col, system.residuals()[row].label,
                               system.slot_label(system.unknowns()[col]), a, n, err});
            }
        }
    }
    return out;
}

}  // namespace mcnet
