#pragma once

// Degree-of-freedom accounting, the boundary-condition templates for the
// reference electrolyser topologies, and a numerical singularity probe.
// "Well-posed" here means: square, and a nonsingular Jacobian at a probe state.
// That is evidence of local unique solvability, not a proof.

#include "mcnet/assembly.hpp"
#include "mcnet/boundary.hpp"
#include "mcnet/network.hpp"

#include <Eigen/Dense>

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mcnet {

struct DofCount {
    std::size_t equations = 0;
    std::size_t unknowns = 0;

    bool operator==(const DofCount&) const = default;
};

/// Equation count from the assembly rules; unknowns = registry size - |bcs|.
DofCount count_dofs(const Network& network, const BoundaryConditionSet& bcs);

// -----------------------------------------------------------------------------
// Templates
// -----------------------------------------------------------------------------

enum class BcTemplate {
    P2GKnownEff,                // coupling with electricity + gas links only
    BoilerKnownEff,             // coupling with electricity + heat links only
    ElectrolyserKnownEff,       // electrolyser, three dummy links, fixed eta_h
    ElectrolyserFreeEff,        // same topology, eta_h solved for
    ElectrolyserLinksKnownEff,  // plus one line, one gas pipe, one heat pipe
    ElectrolyserLinksFreeEff,
};

std::string_view to_string(BcTemplate t);
std::optional<BcTemplate> parse_template(std::string_view name);
const std::vector<BcTemplate>& all_templates();

enum class ReferencePressure { AtLoad, AtJunction };

struct TemplateOptions {
    /// Where the gas and heat reference pressures go on the physical-link
    /// topologies. Both placements give a square system.
    ReferencePressure reference_pressure = ReferencePressure::AtLoad;
};

/// One "known" quantity of a template. Keys name the role of the node in the
/// reference topology (0e, 1g, 0c0h, ...), independent of actual node ids.
struct TemplateEntry {
    std::string key;
    Symbol symbol = Symbol::ActivePower;
    std::optional<double> default_value;  // SI
};

std::vector<TemplateEntry> template_entries(BcTemplate t, const TemplateOptions& options = {});

using TemplateValues = std::map<std::string, double, std::less<>>;

/// Registry slot of every template key on `network`. Throws ModelError when the
/// topology does not match the template's reference shape.
std::map<std::string, SlotIndex, std::less<>> template_slots(const Network& network, BcTemplate t,
                                                            const TemplateOptions& options = {});

/// Boundary set holding exactly the template's known quantities. Keys missing
/// from `values` fall back to the template default; a missing key without a
/// default, or a key the template does not know, is an error.
BoundaryConditionSet apply_template(const Network& network, BcTemplate t, const TemplateValues& values,
                                    const TemplateOptions& options = {});

// -----------------------------------------------------------------------------
// Verdicts
// -----------------------------------------------------------------------------

struct SquareVerdict {
    enum class Kind { Square, Underdetermined, Overdetermined };
    Kind kind = Kind::Square;
    std::size_t excess = 0;  // missing or surplus conditions

    bool square() const { return kind == Kind::Square; }
    std::string to_string() const;  // "Square", "Underdetermined(1)", ...

    bool operator==(const SquareVerdict&) const = default;
};

SquareVerdict check_square(const Network& network, const BoundaryConditionSet& bcs);

struct RankVerdict {
    bool nonsingular = true;
    double condition_estimate = 1.0;  // 1 / rcond from the LU factors
    double pivot_ratio = 1.0;         // smallest / largest |U_ii|

    std::string to_string() const;  // "Nonsingular" or "Singular(cond~...)"
};

/// Row and column scale factors bringing every row and column of a matrix to
/// unit max-norm. Rows mix W, Pa and kg/s, so pivots of the raw matrix are not
/// comparable. Zero rows and columns keep scale 1.
struct Equilibration {
    Eigen::VectorXd row;
    Eigen::VectorXd col;

    Eigen::MatrixXd apply(const Eigen::MatrixXd& m) const { return row.asDiagonal() * m * col.asDiagonal(); }
};

Equilibration equilibrate(const Eigen::MatrixXd& matrix);

/// Partial-pivoting LU of the equilibrated `matrix`; singular when the
/// smallest pivot falls below `pivot_floor` times the largest.
RankVerdict probe_matrix(const Eigen::MatrixXd& matrix, double pivot_floor = 1e-12);

/// Probes the Jacobian of the reduced system at `probe_state` (a full-registry
/// vector; boundary slots are overridden by their values). Throws ModelError
/// for non-square systems and DomainError when a heat pipe carries reverse flow.
RankVerdict jacobian_rank_probe(const Network& network, const BoundaryConditionSet& bcs,
                                std::span<const double> probe_state, double pivot_floor = 1e-12);

}  // namespace mcnet
