#include "support/networks.hpp"

#include "mcnet/solver.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace mcnet;
using namespace mcnet::testing;

namespace {

double at(const Network& net, const SolveResult& r, std::string_view label) { return slot_value(net, r.state, label); }

SolveResult solve_fig4_known() {
    const Network net = fig4();
    return solve_network(net, fig4_known_bcs(net));
}

}  // namespace

TEST(SolverConfig, Validation) {
    EXPECT_NO_THROW(SolverConfig{}.validate());
    EXPECT_THROW((SolverConfig{0.0}).validate(), ModelError);
    EXPECT_THROW((SolverConfig{1e-6, 0}).validate(), ModelError);
    EXPECT_THROW((SolverConfig{1e-6, 5, 1.5}).validate(), ModelError);
    EXPECT_THROW((SolverConfig{1e-6, 5, 0.0}).validate(), ModelError);
    EXPECT_THROW((SolverConfig{1e-6, 5, 1.0, -1.0}).validate(), ModelError);
}

TEST(DefaultGuess, MatchesTheFlatStartOfTheReferenceSolve) {
    const Network net = fig4();
    const BoundaryConditionSet bcs = fig4_known_bcs(net);
    const auto g = default_initial_guess(net, bcs).values;
    auto v = [&](std::string_view l) { return slot_value(net, g, l); };
    EXPECT_DOUBLE_EQ(v("V_{0e}"), kV1e);
    EXPECT_EQ(v("delta_{0e}"), 0.0);
    EXPECT_DOUBLE_EQ(v("p_{0g}"), 1.05e5);
    EXPECT_EQ(v("q_{0g,1g}"), 0.0);
    EXPECT_DOUBLE_EQ(v("T^s_{0h,1h}"), 353.15);
    EXPECT_DOUBLE_EQ(v("T^r_{1h,0h}"), 313.15);
    EXPECT_DOUBLE_EQ(v("p_{0h}"), 6.3e5);
    EXPECT_DOUBLE_EQ(v("T^s_{1h,l}"), 353.15);
    EXPECT_EQ(v("m_{0h,1h}"), 1.0);
    EXPECT_EQ(v("P_{0e,0c}"), 0.0);
    EXPECT_EQ(v("q_{0c,0g}"), 0.0);
    EXPECT_EQ(v("m_{0c,0h}"), 1.0);
    EXPECT_DOUBLE_EQ(v("T^r_{0c,0h}"), 313.15);
    EXPECT_EQ(v("dphi_{0c,0h}"), 0.0);
    for (const auto& bc : bcs.entries()) EXPECT_EQ(g[bc.slot], bc.value);
}

TEST(DefaultGuess, FreeEfficiencyStartsFromImpliedPower) {
    const Network net = fig3(std::nullopt);
    const auto bcs = apply_template(net, BcTemplate::ElectrolyserFreeEff, reference_values(BcTemplate::ElectrolyserFreeEff));
    const auto g = default_initial_guess(net, bcs).values;
    EXPECT_NEAR(slot_value(net, g, "P_{0e,0c}"), (kHhv * 0.0129 + 0.36e6) / kEta, 1e-6);
    EXPECT_EQ(slot_value(net, g, "eta_h_{0c}"), 0.5);
}

TEST(DefaultGuess, UserLabelsOverrideButBoundariesWin) {
    const Network net = fig4();
    const BoundaryConditionSet bcs = fig4_known_bcs(net);
    const auto g = initial_guess_from_labels(net, bcs, {{"m_{0h,1h}", 4.0}, {"p_{1h}", 1.0}});
    EXPECT_EQ(g.strategy, InitialGuess::Strategy::UserSupplied);
    EXPECT_EQ(slot_value(net, g.values, "m_{0h,1h}"), 4.0);
    EXPECT_EQ(slot_value(net, g.values, "p_{1h}"), 6e5);
    EXPECT_THROW(initial_guess_from_labels(net, bcs, {{"x_{9}", 1.0}}), ModelError);
}

TEST(Newton, ReferenceSolveConverges) {
    const Network net = fig4();
    const SolveResult r = solve_fig4_known();
    ASSERT_TRUE(r.converged()) << r.message;
    EXPECT_LE(r.iterations, 10);
    EXPECT_LE(r.final_residual(), 1e-6);
    EXPECT_LT(r.final_residual(), r.residual_history.front());
    EXPECT_EQ(r.residual_history.size(), static_cast<std::size_t>(r.iterations) + 1);
    ASSERT_TRUE(r.dofs && r.square && r.rank_at_guess);
    EXPECT_EQ(*r.dofs, (DofCount{18, 18}));
    EXPECT_TRUE(r.rank_at_guess->nonsingular);

    // Values reported for the known-efficiency case.
    EXPECT_NEAR(at(net, r, "V_{0e}"), 374.889, 0.01);
    EXPECT_NEAR(at(net, r, "delta_{0e}"), -0.258946, 1e-5);
    EXPECT_NEAR(at(net, r, "Q_{1e}"), -0.662e6, 0.001e6);
    EXPECT_NEAR(at(net, r, "p_{0g}") / 1e5, 1.003, 0.0005);
    EXPECT_NEAR(at(net, r, "p_{0h}") / 1e5, 6.048, 0.0005);
    EXPECT_NEAR(at(net, r, "m_{0h,1h}"), 5.74, 0.005);
    EXPECT_NEAR(at(net, r, "T^s_{1h,l}"), 337.88, 0.01);
    EXPECT_NEAR(at(net, r, "dphi_{1h,l}") / 1e6, 0.354, 0.0005);
    EXPECT_NEAR(at(net, r, "dphi_{0c,0h}") / 1e6, 0.365, 0.0005);
    EXPECT_NEAR(at(net, r, "P_{0e,0c}") / 1e6, 2.434, 0.0005);
    EXPECT_NEAR(at(net, r, "T^r_{0c,0h}"), 322.94, 0.01);
}

TEST(Newton, ConvergedStateSatisfiesEveryResidual) {
    const Network net = fig4();
    const BoundaryConditionSet bcs = fig4_known_bcs(net);
    const SolveResult r = solve_network(net, bcs);
    const EquationSystem sys = assemble_system(net, bcs);
    const Eigen::VectorXd f = sys.residual(sys.reduce(r.state));
    for (Eigen::Index i = 0; i < f.size(); ++i) {
        EXPECT_LE(std::abs(f[i]), 1e-6) << sys.residuals()[static_cast<std::size_t>(i)].label;
    }
}

TEST(Newton, Deterministic) {
    const SolveResult a = solve_fig4_known();
    const SolveResult b = solve_fig4_known();
    EXPECT_EQ(a.state, b.state);
    EXPECT_EQ(a.residual_history, b.residual_history);
}

TEST(Newton, FreeEfficiencyRecoversTheKnownState) {
    const Network known = fig4();
    const SolveResult rk = solve_network(known, fig4_known_bcs(known));
    ASSERT_TRUE(rk.converged());

    const Network free = fig4(std::nullopt);
    TemplateValues v = fig4_known_values();
    v.erase("P_1e");
    v["q_1g"] = at(known, rk, "q_{1g}");
    v["dphi_1h"] = at(known, rk, "dphi_{1h,l}");
    const SolveResult rf = solve_network(free, apply_template(free, BcTemplate::ElectrolyserLinksFreeEff, v));
    ASSERT_TRUE(rf.converged()) << rf.message;
    EXPECT_NEAR(at(free, rf, "eta_h_{0c}"), kEtaH, 1e-8);
    for (SlotIndex s = 0; s < known.registry().size(); ++s) {
        const std::string& label = known.registry()[s].label;
        const double a = rk.state[s], b = at(free, rf, label);
        EXPECT_LE(std::abs(a - b), 1e-6 * std::max(1.0, std::abs(a))) << label;
    }
}

TEST(Newton, FreeEfficiencyFromRoundedOutputs) {
    const Network net = fig3(std::nullopt);
    const auto bcs = apply_template(net, BcTemplate::ElectrolyserFreeEff,
                                    {{"q_0g", 0.0129}, {"dphi_0h", 0.365e6}, {"T_r_0h", 322.942}, {"T_s_0c0h", 338.15}});
    const SolveResult r = solve_network(net, bcs);
    ASSERT_TRUE(r.converged()) << r.message;
    EXPECT_NEAR(at(net, r, "eta_h_{0c}"), 1.0 / 6.0, 0.002);
}

TEST(Newton, AffineSystemTakesOneStepFromAnyGuess) {
    const Network net = fig2();
    const auto bcs = apply_template(net, BcTemplate::P2GKnownEff, {{"P_0e", -2e6}});
    const double q = kEta * 2e6 / kHhv;
    std::mt19937_64 rng(5);
    for (int k = 0; k < 100; ++k) {
        const SolveResult r = solve_network(net, bcs, {}, random_guess(net, rng));
        ASSERT_TRUE(r.converged());
        EXPECT_EQ(r.iterations, 1);
        EXPECT_NEAR(at(net, r, "q_{0c,0g}"), q, 1e-12 * q);
    }
}

TEST(Newton, AffineStepIsExactUpToCancellation) {
    // Guesses far off the physical scale: the single update lands on the
    // solution up to the rounding of x0 - dx. With |q0| ~ 1e3 kg/s that is
    // about 1e-13 kg/s, i.e. 1e-5 W in the conversion row, which the absolute
    // 1e-6 tolerance may need one more (null) step to see.
    const Network net = fig2();
    const auto bcs = apply_template(net, BcTemplate::P2GKnownEff, {{"P_0e", -2e6}});
    std::mt19937_64 rng(6);
    for (int k = 0; k < 50; ++k) {
        const SolveResult r = solve_network(net, bcs, {}, random_guess(net, rng, 1e3));
        ASSERT_TRUE(r.converged());
        EXPECT_LE(r.iterations, 2);
        EXPECT_LE(r.residual_history[1], 1e-14 * r.residual_history[0]);
    }
}

TEST(Newton, SingularAtZeroMassFlow) {
    const Network net = fig4();
    const BoundaryConditionSet bcs = fig4_known_bcs(net);
    InitialGuess g = default_initial_guess(net, bcs);
    for (SlotIndex s = 0; s < g.values.size(); ++s) {
        if (net.registry()[s].key.symbol == Symbol::MassFlow && !bcs.contains(s)) g.values[s] = 0.0;
    }
    const SolveResult r = solve_network(net, bcs, {}, g);
    EXPECT_EQ(r.status, SolveStatus::SingularJacobian);
    EXPECT_FALSE(r.rank_at_guess->nonsingular);
    EXPECT_FALSE(r.message.empty());
}

TEST(Newton, ReverseFlowIsADomainViolation) {
    // Heat drawn at the coupling instead of delivered pushes the pipe flow negative.
    const Network net = fig4();
    TemplateValues v = fig4_known_values();
    v["P_1e"] = 2.5e6;
    const auto bcs = apply_template(net, BcTemplate::ElectrolyserLinksKnownEff, v);
    const SolveResult r = solve_network(net, bcs);
    EXPECT_NE(r.status, SolveStatus::Converged);
    EXPECT_EQ(r.state.size(), net.registry().size());
}

TEST(Newton, MaxIterationsReported) {
    const Network net = fig4();
    SolverConfig cfg;
    cfg.max_iter = 2;
    const SolveResult r = solve_network(net, fig4_known_bcs(net), cfg);
    EXPECT_EQ(r.status, SolveStatus::MaxIterations);
    EXPECT_EQ(r.iterations, 2);
}

TEST(Newton, DampingStillConverges) {
    const Network net = fig4();
    SolverConfig cfg;
    cfg.damping = 0.7;
    cfg.max_iter = 200;
    const SolveResult r = solve_network(net, fig4_known_bcs(net), cfg);
    EXPECT_TRUE(r.converged());
    EXPECT_GT(r.iterations, 5);
}

TEST(Newton, NonSquareAndDuplicateConditions) {
    const Network net = fig4();
    BoundaryConditionSet bcs = fig4_known_bcs(net);
    bcs.remove(net.registry().index("P_{1e}"));
    EXPECT_THROW(solve_network(net, bcs), ModelError);

    // A duplicated condition: fixing Q_1e instead of the angle reference keeps
    // the count square but leaves the angle undetermined.
    BoundaryConditionSet dup = fig4_known_bcs(net);
    dup.remove(net.registry().index("delta_{1e}"));
    dup.add(net.registry().index("Q_{1e}"), -0.662e6);
    const SolveResult r = solve_network(net, dup);
    EXPECT_EQ(r.status, SolveStatus::SingularJacobian);
}

TEST(Jacobian, AnalyticMatchesFiniteDifferencesOnReferenceSystems) {
    for (BcTemplate t : all_templates()) {
        const Network net = reference_network(t);
        const auto bcs = apply_template(net, t, reference_values(t));
        const EquationSystem sys = assemble_system(net, bcs);
        for (const auto& state : jacobian_check_states(net, bcs)) {
            const auto x = sys.reduce(state);
            const auto bad = compare_jacobians(sys, sys.jacobian(x), finite_difference_jacobian(sys, x));
            for (const auto& m : bad) {
                ADD_FAILURE() << to_string(t) << ": d " << m.equation << " / d " << m.slot << " analytic "
                              << m.analytic << " numeric " << m.numeric;
            }
        }
    }
}

TEST(Jacobian, MismatchReportCarriesLabels) {
    const Network net = fig2();
    const auto bcs = apply_template(net, BcTemplate::P2GKnownEff, {{"P_0e", -2e6}});
    const EquationSystem sys = assemble_system(net, bcs);
    const auto x = sys.reduce(default_initial_guess(net, bcs).values);
    Eigen::MatrixXd j = sys.jacobian(x);
    Eigen::MatrixXd wrong = j;
    wrong(0, 0) += 1.0 + std::abs(j(0, 0));
    const auto bad = compare_jacobians(sys, wrong, j);
    ASSERT_EQ(bad.size(), 1u);
    EXPECT_EQ(bad[0].equation, sys.residuals()[0].label);
    EXPECT_EQ(bad[0].slot, sys.slot_label(sys.unknowns()[0]));
    EXPECT_THROW(compare_jacobians(sys, j, Eigen::MatrixXd::Zero(1, 1)), ModelError);
}

// -----------------------------------------------------------------------------
// Mode equivalence: the electrolyser with eta_h at its ends is a P2G unit or a boiler.
// -----------------------------------------------------------------------------

namespace {

void expect_same_slots(const Network& a, const SolveResult& ra, const Network& b, const SolveResult& rb) {
    std::size_t shared = 0;
    for (SlotIndex s = 0; s < a.registry().size(); ++s) {
        const std::string& label = a.registry()[s].label;
        const auto other = b.registry().find(label);
        if (!other) continue;
        ++shared;
        const double x = ra.state[s], y = rb.state[*other];
        EXPECT_LE(std::abs(x - y), 1e-9 * std::max(1.0, std::abs(x))) << label << ": " << x << " vs " << y;
    }
    EXPECT_GT(shared, 0u);
}

}  // namespace

TEST(ModeEquivalence, ZeroHeatShareIsPowerToGas) {
    const TemplateValues v{{"P_0e", -2e6}};
    const Network p2g = fig2();
    const Network ely = fig2(unit(CouplingKind::Electrolyser, 0.0));
    const auto ra = solve_network(p2g, apply_template(p2g, BcTemplate::P2GKnownEff, v));
    const auto rb = solve_network(ely, apply_template(ely, BcTemplate::P2GKnownEff, v));
    ASSERT_TRUE(ra.converged() && rb.converged());
    EXPECT_EQ(p2g.registry().size(), ely.registry().size());
    expect_same_slots(p2g, ra, ely, rb);
}

TEST(ModeEquivalence, FullHeatShareIsBoiler) {
    const TemplateValues v{{"P_0e", -1e6}, {"T_r_0h", 323.15}, {"T_s_0c0h", 338.15}};
    const Network b = boiler();
    const Network ely = boiler(unit(CouplingKind::Electrolyser, 1.0));
    const auto ra = solve_network(b, apply_template(b, BcTemplate::BoilerKnownEff, v));
    const auto rb = solve_network(ely, apply_template(ely, BcTemplate::BoilerKnownEff, v));
    ASSERT_TRUE(ra.converged() && rb.converged());
    expect_same_slots(b, ra, ely, rb);
}

TEST(ModeEquivalence, ThreePortElectrolyserAtFullHeatShare) {
    const TemplateValues v{{"P_0e", -1e6}, {"T_r_0h", 323.15}, {"T_s_0c0h", 338.15}};
    const Network b = boiler();
    const Network ely = fig3(1.0);
    const auto ra = solve_network(b, apply_template(b, BcTemplate::BoilerKnownEff, v));
    const auto rb = solve_network(ely, apply_template(ely, BcTemplate::ElectrolyserKnownEff, v));
    ASSERT_TRUE(ra.converged() && rb.converged());
    expect_same_slots(b, ra, ely, rb);
    EXPECT_NEAR(at(ely, rb, "q_{0c,0g}"), 0.0, 1e-15);
}

TEST(ModeEquivalence, ThreePortElectrolyserAtZeroHeatShare) {
    const Network p2g = fig2();
    const Network ely = fig3(0.0);
    const auto ra = solve_network(p2g, apply_template(p2g, BcTemplate::P2GKnownEff, {{"P_0e", -2e6}}));
    const auto rb = solve_network(
        ely, apply_template(ely, BcTemplate::ElectrolyserKnownEff, {{"P_0e", -2e6}, {"T_r_0h", 323.15}, {"T_s_0c0h", 338.15}}));
    ASSERT_TRUE(ra.converged() && rb.converged()) << rb.message;
    expect_same_slots(p2g, ra, ely, rb);
    EXPECT_NEAR(at(ely, rb, "dphi_{0c,0h}"), 0.0, 1e-6);
    EXPECT_NEAR(at(ely, rb, "m_{0c,0h}"), 0.0, 1e-9);
}
