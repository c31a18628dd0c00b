#pragma once

// Network documents (JSON), unit strings, solution reports and the
// validate / solve / sweep commands behind the mcnet tool.

#include "mcnet/boundary.hpp"
#include "mcnet/network.hpp"
#include "mcnet/solver.hpp"
#include "mcnet/wellposedness.hpp"

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcnet::io {

inline constexpr int kSchemaVersion = 1;

/// Malformed or invalid document. `path` points at the offending field,
/// e.g. "links[2].pipe_constant".
class DocumentError : public std::runtime_error {
public:
    DocumentError(std::string path, const std::string& message)
        : std::runtime_error(path.empty() ? message : path + ": " + message), path_(std::move(path)) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

// -----------------------------------------------------------------------------
// Units
// -----------------------------------------------------------------------------

enum class Dimension {
    Dimensionless,
    Power,  // W and var families are interchangeable
    Pressure,
    Temperature,
    MassFlow,
    Voltage,
    Angle,
    Length,
    SpecificEnergy,
    Conductance,
    HeatTransfer,
};

Dimension dimension_of(Symbol symbol);

/// Factor to SI for a unit name of the given dimension ("MW" -> 1e6).
/// Throws DocumentError for unknown or mismatched units.
double unit_factor(std::string_view unit, Dimension dim, const std::string& path = {});

/// "2.5 MW" -> 2.5e6. A bare number (or a string without unit) is taken as SI.
double parse_quantity(std::string_view text, Dimension dim, const std::string& path = {});

/// Unit the reports use for a symbol, and its factor to SI.
std::string_view display_unit(Symbol symbol);
double display_factor(Symbol symbol);

/// 12 significant digits, shortest form.
std::string format_number(double value);

// -----------------------------------------------------------------------------
// Documents
// -----------------------------------------------------------------------------

struct BoundarySpec {
    std::optional<BcTemplate> template_kind;
    TemplateOptions template_options;
    TemplateValues template_values;                        // SI, when template_kind is set
    std::vector<std::pair<std::string, double>> explicit_slots;  // label -> SI
};

struct Document {
    std::string name;
    Network network;
    BoundarySpec boundary;
    BoundaryConditionSet bcs;
    SolverConfig solver;
    std::vector<std::pair<std::string, double>> initial_guess;  // label -> SI
};

/// Parses and fully validates a document. Every failure is a DocumentError.
Document parse_document(std::string_view text);

/// Canonical JSON of a document. parse_document(serialize_document(d))
/// reproduces the same network, boundary set and solver settings.
std::string serialize_document(const Document& doc);

/// Label -> SI value pairs from a guess file: {"V_{0e}": "398 V", ...}.
std::vector<std::pair<std::string, double>> parse_guess(std::string_view text, const Network& network);

/// Boundary set for a spec on a network.
BoundaryConditionSet build_boundary_set(const Network& network, const BoundarySpec& spec);

// -----------------------------------------------------------------------------
// Fixtures
// -----------------------------------------------------------------------------

const std::vector<std::string>& fixture_names();
/// Throws DocumentError for unknown names.
std::string_view fixture_text(std::string_view name);

/// A file path, or the name of a shipped fixture when no such file exists.
std::string load_input(const std::string& path_or_fixture);

// -----------------------------------------------------------------------------
// Reports
// -----------------------------------------------------------------------------

struct ReportRow {
    std::string label;
    Symbol symbol = Symbol::ActivePower;
    std::string location;
    double si_value = 0.0;
    double value = 0.0;  // in `unit`
    std::string unit;
    bool boundary = false;
};

struct DerivedRow {
    std::string name;  // "line loss[0e1e]", "gas dp[0g1g]", ...
    double value = 0.0;
    std::string unit;
};

struct SolutionReport {
    std::vector<ReportRow> slots;  // registry order
    std::vector<DerivedRow> derived;
    SolveResult result;
};

SolutionReport build_report(const Network& network, const BoundaryConditionSet& bcs, const SolveResult& result);

/// Line flows and losses, pipe pressure drops and temperature drops at `state`.
std::vector<DerivedRow> derived_quantities(const Network& network, std::span<const double> state);

enum class Format { Table, Csv, Json };
std::optional<Format> parse_format(std::string_view name);

void write_report(std::ostream& out, const SolutionReport& report, Format format);

/// RFC-4180 field quoting.
std::string csv_field(std::string_view text);

// -----------------------------------------------------------------------------
// Commands. Exit codes: 0 ok, 1 validation failure, 2 solver failure, 3 parse error.
// -----------------------------------------------------------------------------

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitSolver = 2;
inline constexpr int kExitParse = 3;

int cmd_validate(std::string_view document_text, std::ostream& out, std::ostream& err);

struct SolveOptions {
    std::optional<double> tol;
    std::optional<int> max_iter;
    std::optional<double> damping;
    std::optional<std::string> guess_text;  // contents of a guess file
    Format format = Format::Table;
};

int cmd_solve(std::string_view document_text, const SolveOptions& options, std::ostream& out, std::ostream& err);

struct SweepOptions {
    std::string parameter;       // template key, boundary slot label, "eta_h" or "eta_h[<coupling>]"
    std::vector<double> values;  // in `unit`
    std::string unit;            // empty: SI
    int jobs = 1;
};

/// "a:b:n" -> n evenly spaced values from a to b; n = 0 gives none.
std::vector<double> parse_range(std::string_view text);
/// "0,0.5,1" -> values; empty text gives none.
std::vector<double> parse_value_list(std::string_view text);

int cmd_sweep(std::string_view document_text, const SweepOptions& options, std::ostream& out, std::ostream& err);

}  // namespace mcnet::io
