#pragma once

// Newton-Raphson on the reduced square system, dense LU inner solve.

#include "mcnet/assembly.hpp"
#include "mcnet/boundary.hpp"
#include "mcnet/network.hpp"
#include "mcnet/wellposedness.hpp"

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mcnet {

struct SolverConfig {
    double tol = 1e-6;         // on the residual 2-norm
    int max_iter = 50;
    double damping = 1.0;      // step scale in (0, 1]
    double min_pivot = 1e-12;  // relative LU pivot floor

    /// Throws ModelError on out-of-range values.
    void validate() const;

    bool operator==(const SolverConfig&) const = default;
};

enum class SolveStatus { Converged, MaxIterations, SingularJacobian, DomainViolation };

std::string_view to_string(SolveStatus status);

struct SolveResult {
    std::vector<double> state;  // one value per registry slot
    int iterations = 0;         // Newton updates taken
    std::vector<double> residual_history;
    SolveStatus status = SolveStatus::MaxIterations;
    std::string message;

    // Filled by solve_network.
    std::optional<DofCount> dofs;
    std::optional<SquareVerdict> square;
    std::optional<RankVerdict> rank_at_guess;

    bool converged() const { return status == SolveStatus::Converged; }
    double final_residual() const { return residual_history.empty() ? 0.0 : residual_history.back(); }
};

struct InitialGuess {
    enum class Strategy { FlatStart, UserSupplied };
    std::vector<double> values;  // one per registry slot; boundary slots hold their values
    Strategy strategy = Strategy::FlatStart;
};

/// Flat start: voltage magnitudes and pressures follow the fixed references,
/// mass flows are 1 kg/s, temperatures straddle the fixed supply and return
/// temperatures, everything else starts at 0.
InitialGuess default_initial_guess(const Network& network, const BoundaryConditionSet& bcs);

/// User-supplied values by slot label; slots not named fall back to the flat start.
InitialGuess initial_guess_from_labels(const Network& network, const BoundaryConditionSet& bcs,
                                       const std::vector<std::pair<std::string, double>>& values);

SolveResult newton_solve(const EquationSystem& system, const InitialGuess& guess, const SolverConfig& config);

/// Assembly, square check, guess construction and Newton in one call. Throws
/// ModelError when the boundary set does not make the system square.
SolveResult solve_network(const Network& network, const BoundaryConditionSet& bcs, const SolverConfig& config = {},
                          const std::optional<InitialGuess>& guess = std::nullopt);

// -----------------------------------------------------------------------------
// Jacobian checks
// -----------------------------------------------------------------------------

/// Rough magnitude of a quantity in SI (1e6 for powers, 1e5 for pressures, ...).
double typical_magnitude(Symbol symbol);

/// Central differences, step 1e-6 * max(|x_k|, typical magnitude of x_k).
/// A unit step on a 1 W scale would drown in the rounding of MW-sized rows.
Eigen::MatrixXd finite_difference_jacobian(const EquationSystem& system, std::span<const double> unknowns);

struct JacobianMismatch {
    std::size_t row = 0;
    std::size_t col = 0;
    std::string equation;
    std::string slot;
    double analytic = 0.0;
    double numeric = 0.0;
    double relative_error = 0.0;
};

/// Entries whose relative disagreement exceeds `rel_tol`. The denominator is
/// the larger magnitude of the two entries, floored at `row_floor` times the
/// largest analytic entry of the row so that entries which are pure rounding
/// noise relative to their equation do not count.
std::vector<JacobianMismatch> compare_jacobians(const EquationSystem& system, const Eigen::MatrixXd& analytic,
                                                const Eigen::MatrixXd& numeric, double rel_tol = 1e-5,
                                                double row_floor = 1e-6);

}  // namespace mcnet
