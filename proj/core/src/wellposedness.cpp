#include "mcnet/wellposedness.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

namespace mcnet {

DofCount count_dofs(const Network& network, const BoundaryConditionSet& bcs) {
    for (const auto& bc : bcs.entries()) {
        if (bc.slot >= network.registry().size()) {
            throw ModelError("boundary condition on slot outside the registry");
        }
    }
    return DofCount{network_residuals(network).size(), network.registry().size() - bcs.size()};
}

// -----------------------------------------------------------------------------
// Templates
// -----------------------------------------------------------------------------

std::string_view to_string(BcTemplate t) {
    switch (t) {
        case BcTemplate::P2GKnownEff: return "p2g_known_eff";
        case BcTemplate::BoilerKnownEff: return "boiler_known_eff";
        case BcTemplate::ElectrolyserKnownEff: return "electrolyser_known_eff";
        case BcTemplate::ElectrolyserFreeEff: return "electrolyser_free_eff";
        case BcTemplate::ElectrolyserLinksKnownEff: return "electrolyser_links_known_eff";
        case BcTemplate::ElectrolyserLinksFreeEff: return "electrolyser_links_free_eff";
    }
    return "?";
}

const std::vector<BcTemplate>& all_templates() {
    static const std::vector<BcTemplate> all = {
        BcTemplate::P2GKnownEff,          BcTemplate::BoilerKnownEff,
        BcTemplate::ElectrolyserKnownEff, BcTemplate::ElectrolyserFreeEff,
        BcTemplate::ElectrolyserLinksKnownEff, BcTemplate::ElectrolyserLinksFreeEff,
    };
    return all;
}

std::optional<BcTemplate> parse_template(std::string_view name) {
    for (BcTemplate t : all_templates()) {
        if (to_string(t) == name) return t;
    }
    return std::nullopt;
}

namespace {

enum class Role { E0, E1, G0, G1, H0, H1, LinkEC, LinkCH };

struct RoleEntry {
    std::string key;
    Symbol symbol;
    Role role;
    LocationKind where;
    std::optional<double> default_value;
};

bool with_links(BcTemplate t) {
    return t == BcTemplate::ElectrolyserLinksKnownEff || t == BcTemplate::ElectrolyserLinksFreeEff;
}

std::vector<RoleEntry> role_entries(BcTemplate t, const TemplateOptions& options) {
    using LK = LocationKind;
    const RoleEntry q_coupling{"Q_0e0c", Symbol::ReactivePower, Role::LinkEC, LK::Link, 0.0};
    const RoleEntry ts_coupling{"T_s_0c0h", Symbol::SupplyTemperature, Role::LinkCH, LK::Link, std::nullopt};
    switch (t) {
        case BcTemplate::P2GKnownEff:
            return {{"P_0e", Symbol::ActivePower, Role::E0, LK::Terminal, std::nullopt}, q_coupling};
        case BcTemplate::BoilerKnownEff:
        case BcTemplate::ElectrolyserKnownEff:
            return {{"P_0e", Symbol::ActivePower, Role::E0, LK::Terminal, std::nullopt},
                    {"T_r_0h", Symbol::ReturnTemperature, Role::H0, LK::Terminal, std::nullopt},
                    q_coupling,
                    ts_coupling};
        case BcTemplate::ElectrolyserFreeEff:
            return {{"q_0g", Symbol::GasFlow, Role::G0, LK::Terminal, std::nullopt},
                    {"dphi_0h", Symbol::HeatPower, Role::H0, LK::Terminal, std::nullopt},
                    {"T_r_0h", Symbol::ReturnTemperature, Role::H0, LK::Terminal, std::nullopt},
                    q_coupling,
                    ts_coupling};
        case BcTemplate::ElectrolyserLinksKnownEff:
        case BcTemplate::ElectrolyserLinksFreeEff: {
            const bool junction = options.reference_pressure == ReferencePressure::AtJunction;
            const RoleEntry p_gas = junction
                                        ? RoleEntry{"p_0g", Symbol::Pressure, Role::G0, LK::Node, std::nullopt}
                                        : RoleEntry{"p_1g", Symbol::Pressure, Role::G1, LK::Node, std::nullopt};
            const RoleEntry p_heat = junction
                                         ? RoleEntry{"p_0h", Symbol::Pressure, Role::H0, LK::Node, std::nullopt}
                                         : RoleEntry{"p_1h", Symbol::Pressure, Role::H1, LK::Node, std::nullopt};
            std::vector<RoleEntry> out = {
                {"P_0e", Symbol::ActivePower, Role::E0, LK::Terminal, 0.0},
                {"Q_0e", Symbol::ReactivePower, Role::E0, LK::Terminal, 0.0},
            };
            if (t == BcTemplate::ElectrolyserLinksKnownEff) {
                out.push_back({"P_1e", Symbol::ActivePower, Role::E1, LK::Terminal, std::nullopt});
            }
            out.push_back({"V_1e", Symbol::VoltageMagnitude, Role::E1, LK::Node, std::nullopt});
            out.push_back({"delta_1e", Symbol::VoltageAngle, Role::E1, LK::Node, 0.0});
            out.push_back({"q_0g", Symbol::GasFlow, Role::G0, LK::Terminal, 0.0});
            if (t == BcTemplate::ElectrolyserLinksFreeEff) {
                out.push_back({"q_1g", Symbol::GasFlow, Role::G1, LK::Terminal, std::nullopt});
            }
            out.push_back(p_gas);
            out.push_back({"m_0h", Symbol::MassFlow, Role::H0, LK::Terminal, 0.0});
            out.push_back(p_heat);
            if (t == BcTemplate::ElectrolyserLinksFreeEff) {
                out.push_back({"dphi_1h", Symbol::HeatPower, Role::H1, LK::Terminal, std::nullopt});
            }
            out.push_back({"T_r_1h", Symbol::ReturnTemperature, Role::H1, LK::Terminal, std::nullopt});
            out.push_back(q_coupling);
            out.push_back(ts_coupling);
            return out;
        }
    }
    return {};
}

struct Roles {
    std::map<Role, std::string> ids;  // node or link id per role
};

Roles resolve_roles(const Network& network, BcTemplate t) {
    auto fail = [t](const std::string& why) -> ModelError {
        return ModelError("topology does not match template " + std::string(to_string(t)) + ": " + why);
    };

    const Node* coupling = nullptr;
    for (const Node& n : network.nodes()) {
        if (n.is_coupling()) {
            if (coupling) throw fail("more than one coupling node");
            coupling = &n;
        }
    }
    if (!coupling) throw fail("no coupling node");

    Roles roles;
    std::map<Carrier, const Node*> dummy_neighbour;
    for (std::size_t li : network.incident(coupling->id)) {
        const Link& link = network.links()[li];
        const Node& other = network.other_end(link, coupling->id);
        dummy_neighbour[link.carrier()] = &other;
        switch (link.carrier()) {
            case Carrier::Electricity:
                roles.ids[Role::LinkEC] = link.id;
                roles.ids[Role::E0] = other.id;
                break;
            case Carrier::Gas: roles.ids[Role::G0] = other.id; break;
            case Carrier::Heat:
                roles.ids[Role::LinkCH] = link.id;
                roles.ids[Role::H0] = other.id;
                break;
        }
    }

    const CouplingUnit& unit = *coupling->coupling;
    const bool has_gas = dummy_neighbour.contains(Carrier::Gas);
    const bool has_heat = dummy_neighbour.contains(Carrier::Heat);
    switch (t) {
        case BcTemplate::P2GKnownEff:
            if (!has_gas || has_heat) throw fail("needs a gas output and no heat output");
            break;
        case BcTemplate::BoilerKnownEff:
            if (!has_heat || has_gas) throw fail("needs a heat output and no gas output");
            break;
        default:
            if (unit.kind != CouplingKind::Electrolyser || !has_gas || !has_heat) {
                throw fail("needs an electrolyser with gas and heat outputs");
            }
            if ((t == BcTemplate::ElectrolyserFreeEff || t == BcTemplate::ElectrolyserLinksFreeEff) !=
                unit.free_heat_efficiency()) {
                throw fail(unit.free_heat_efficiency() ? "heat efficiency is free, template expects it fixed"
                                                       : "heat efficiency is fixed, template expects it free");
            }
            break;
    }

    std::size_t physical = 0;
    for (const Link& link : network.links()) physical += link.is_dummy() ? 0 : 1;
    const std::size_t outputs = 1 + (has_gas ? 1 : 0) + (has_heat ? 1 : 0);

    if (!with_links(t)) {
        if (physical != 0) throw fail("unexpected physical links");
        if (network.nodes().size() != outputs + 1) throw fail("unexpected extra nodes");
        return roles;
    }

    if (physical != 3 || network.nodes().size() != 7) {
        throw fail("expects one line, one gas pipe and one heat pipe on seven nodes");
    }
    auto far_end = [&](Role near, Role far, auto is_kind, const char* what) {
        const std::string& near_id = roles.ids.at(near);
        const Link* found = nullptr;
        for (std::size_t li : network.incident(near_id)) {
            const Link& link = network.links()[li];
            if (is_kind(link)) {
                if (found) throw fail(std::string("more than one ") + what + " at " + near_id);
                found = &link;
            }
        }
        if (!found) throw fail(std::string("no ") + what + " at " + near_id);
        roles.ids[far] = network.other_end(*found, near_id).id;
        return found;
    };
    far_end(Role::E0, Role::E1, [](const Link& l) { return std::holds_alternative<TransmissionLine>(l.kind); },
            "transmission line");
    far_end(Role::G0, Role::G1, [](const Link& l) { return std::holds_alternative<GasPipe>(l.kind); },
            "gas pipe");
    const Link* heat_pipe = far_end(
        Role::H0, Role::H1, [](const Link& l) { return std::holds_alternative<HeatPipe>(l.kind); },
        "heat pipe");
    if (heat_pipe->from != roles.ids.at(Role::H0)) {
        throw fail("heat pipe " + heat_pipe->id + " must be oriented away from the coupling");
    }
    return roles;
}

}  // namespace

std::vector<TemplateEntry> template_entries(BcTemplate t, const TemplateOptions& options) {
    std::vector<TemplateEntry> out;
    for (const RoleEntry& e : role_entries(t, options)) {
        out.push_back({e.key, e.symbol, e.default_value});
    }
    return out;
}

std::map<std::string, SlotIndex, std::less<>> template_slots(const Network& network, BcTemplate t,
                                                            const TemplateOptions& options) {
    const Roles roles = resolve_roles(network, t);
    std::map<std::string, SlotIndex, std::less<>> out;
    for (const RoleEntry& e : role_entries(t, options)) {
        auto id = roles.ids.find(e.role);
        if (id == roles.ids.end()) {
            throw ModelError("topology does not match template " + std::string(to_string(t)) +
                             ": role of " + e.key + " is missing");
        }
        const SlotKey key{e.symbol, Location{e.where, id->second}};
        auto slot = network.registry().find(key);
        if (!slot) {
            throw ModelError("topology does not match template " + std::string(to_string(t)) +
                             ": no slot for " + e.key + " (" + to_string(key.location) + ")");
        }
        out.emplace(e.key, *slot);
    }
    return out;
}

BoundaryConditionSet apply_template(const Network& network, BcTemplate t, const TemplateValues& values,
                                    const TemplateOptions& options) {
    const auto slots = template_slots(network, t, options);
    const auto entries = role_entries(t, options);
    for (const auto& [key, value] : values) {
        if (!slots.contains(key)) {
            throw ModelError("template " + std::string(to_string(t)) + " has no value named " + key);
        }
    }
    BoundaryConditionSet bcs;
    for (const RoleEntry& e : entries) {
        auto given = values.find(e.key);
        double value = 0.0;
        if (given != values.end()) {
            value = given->second;
        } else if (e.default_value) {
            value = *e.default_value;
        } else {
            throw ModelError("template " + std::string(to_string(t)) + " needs a value for " + e.key);
        }
        bcs.add(slots.at(e.key), value);
    }
    return bcs;
}

// -----------------------------------------------------------------------------
// Verdicts
// -----------------------------------------------------------------------------

std::string SquareVerdict::to_string() const {
    switch (kind) {
        case Kind::Square: return "Square";
        case Kind::Underdetermined: return "Underdetermined(" + std::to_string(excess) + ")";
        case Kind::Overdetermined: return "Overdetermined(" + std::to_string(excess) + ")";
    }
    return "?";
}

SquareVerdict check_square(const Network& network, const BoundaryConditionSet& bcs) {
    // Surplus conditions can exceed the registry; compare without underflow.
    const std::size_t equations = network_residuals(network).size();
    const std::size_t slots = network.registry().size();
    const std::size_t fixed = bcs.size();
    if (fixed > slots) return {SquareVerdict::Kind::Overdetermined, equations + fixed - slots};
    const std::size_t unknowns = slots - fixed;
    if (unknowns == equations) return {SquareVerdict::Kind::Square, 0};
    if (unknowns > equations) return {SquareVerdict::Kind::Underdetermined, unknowns - equations};
    return {SquareVerdict::Kind::Overdetermined, equations - unknowns};
}

std::string RankVerdict::to_string() const {
    if (nonsingular) return "Nonsingular";
    char buf[64];
    std::snprintf(buf, sizeof buf, "Singular(cond~%.3g)", condition_estimate);
    return buf;
}

Equilibration equilibrate(const Eigen::MatrixXd& matrix) {
    Equilibration e;
    e.row = Eigen::VectorXd::Ones(matrix.rows());
    e.col = Eigen::VectorXd::Ones(matrix.cols());
    Eigen::MatrixXd m = matrix.cwiseAbs();
    // Two sweeps settle matrices whose entries span many decades.
    for (int sweep = 0; sweep < 2; ++sweep) {
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            const double r = m.row(i).maxCoeff();
            if (r > 0.0) {
                e.row[i] /= r;
                m.row(i) /= r;
            }
        }
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            const double c = m.col(j).maxCoeff();
            if (c > 0.0) {
                e.col[j] /= c;
                m.col(j) /= c;
            }
        }
    }
    return e;
}

RankVerdict probe_matrix(const Eigen::MatrixXd& matrix, double pivot_floor) {
    RankVerdict verdict;
    if (matrix.rows() != matrix.cols()) throw ModelError("rank probe needs a square matrix");
    if (matrix.rows() == 0) return verdict;

    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(equilibrate(matrix).apply(matrix));
    const Eigen::VectorXd pivots = lu.matrixLU().diagonal().cwiseAbs();
    const double largest = pivots.maxCoeff();
    const double smallest = pivots.minCoeff();
    verdict.pivot_ratio = largest > 0.0 ? smallest / largest : 0.0;
    verdict.nonsingular = std::isfinite(verdict.pivot_ratio) && verdict.pivot_ratio >= pivot_floor;
    if (verdict.nonsingular) {
        const double rcond = lu.rcond();
        verdict.condition_estimate = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
    } else {
        verdict.condition_estimate = std::numeric_limits<double>::infinity();
    }
    return verdict;
}

RankVerdict jacobian_rank_probe(const Network& network, const BoundaryConditionSet& bcs,
                                std::span<const double> probe_state, double pivot_floor) {
    const EquationSystem system = assemble_system(network, bcs);
    if (probe_state.size() != network.registry().size()) {
        throw ModelError("probe state does not match the registry size");
    }
    const std::vector<double> unknowns = system.reduce(probe_state);
    const std::vector<double> full = system.expand(unknowns);
    for (SlotIndex s : system.guarded_mass_slots()) {
        if (full[s] < -1e-9) {
            throw DomainError("probe state has reverse flow on " + system.slot_label(s));
        }
    }
    return probe_matrix(system.jacobian(unknowns), pivot_floor);
}

}  // namespace mcnet
