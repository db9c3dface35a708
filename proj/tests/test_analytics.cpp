#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "ccds/analytics.hpp"

namespace ccds {
namespace {

PathSet constant_paths(double value, std::size_t n, TimeGrid grid = TimeGrid::uniform(2.0, 0.5)) {
    PathConfig c;
    c.grid = std::move(grid);
    c.initial_mtm = value;
    c.n_paths = n;
    c.seed = 1;
    return simulate_mtm_paths(c);
}

PathSet diffusing_paths(std::size_t n, std::uint64_t seed = 42) {
    PathConfig c;
    c.grid = TimeGrid::uniform(10.0, 0.25);
    c.volatility = 30e6;
    c.n_paths = n;
    c.seed = seed;
    return simulate_mtm_paths(c);
}

TEST(ExposureProfileTest, ConstantPositiveMtm) {
    const auto profile = exposure_profile(constant_paths(100e6, 20), StructureKind::Baseline);
    ASSERT_EQ(profile.times.size(), 5u);
    for (std::size_t k = 0; k < profile.times.size(); ++k) {
        EXPECT_EQ(profile.epe[k], 100e6);
        EXPECT_EQ(profile.std_error[k], 0.0);
    }
}

TEST(ExposureProfileTest, NegativeMtmCarriesNoExposure) {
    const auto profile = exposure_profile(constant_paths(-50e6, 20), StructureKind::Baseline);
    for (double e : profile.epe) EXPECT_EQ(e, 0.0);
}

TEST(ExposureProfileTest, ProtectedStructuresAreFlatZero) {
    const auto paths = diffusing_paths(500);
    for (auto kind : {StructureKind::Tpa, StructureKind::CcdsChain}) {
        const auto profile = exposure_profile(paths, kind);
        for (std::size_t k = 0; k < profile.epe.size(); ++k) {
            EXPECT_EQ(profile.epe[k], 0.0);
            EXPECT_EQ(profile.std_error[k], 0.0);
        }
    }
}

TEST(ExposureProfileTest, MatchesGaussianExpectedPositivePart) {
    // For X(t) = sigma W(t): E[max(X, 0)] = sigma sqrt(t / (2 pi)).
    const auto profile = exposure_profile(diffusing_paths(10'000, 8), StructureKind::Baseline);
    for (std::size_t k = 4; k < profile.times.size(); k += 4) {
        const double expected = 30e6 * std::sqrt(profile.times[k] / (2.0 * std::numbers::pi));
        EXPECT_LT(std::fabs(profile.epe[k] - expected), 3.0 * profile.std_error[k]) << profile.times[k];
    }
}

TEST(ExposureProfileTest, RejectsRaggedPaths) {
    auto paths = constant_paths(1.0, 3);
    paths.paths[1].values.pop_back();
    EXPECT_THROW(exposure_profile(paths, StructureKind::Baseline), ValidationError);
    EXPECT_THROW(exposure_profile(PathSet{}, StructureKind::Baseline), ValidationError);
}

TEST(CvaTest, CertainDefaultOnConstantPath) {
    // A hazard this large puts every default inside the first grid interval.
    const auto paths = constant_paths(100e6, 50, TimeGrid({0.0, 1.0}));
    const auto r = cva(paths, DefaultModel{1e6, 0.6}, 0.0, StructureKind::Baseline);
    EXPECT_DOUBLE_EQ(r.cva, 60e6);
    EXPECT_EQ(r.std_error, 0.0);
    EXPECT_EQ(r.n_paths, 50u);
}

TEST(CvaTest, ProtectedStructuresCarryNoCva) {
    const auto paths = diffusing_paths(5'000);
    for (auto kind : {StructureKind::Tpa, StructureKind::CcdsChain}) {
        const auto r = cva(paths, DefaultModel{0.1, 0.6}, 0.01, kind);
        EXPECT_EQ(r.cva, 0.0);
        EXPECT_EQ(r.std_error, 0.0);
    }
}

TEST(CvaTest, ZeroHazardMeansZeroCva) {
    const auto r = cva(diffusing_paths(2'000), DefaultModel{0.0, 0.6}, 0.01, StructureKind::Baseline);
    EXPECT_EQ(r.cva, 0.0);
    EXPECT_EQ(r.std_error, 0.0);
}

TEST(CvaTest, IncreasesWithLgdAndHazard) {
    const auto paths = diffusing_paths(5'000);
    const double low = cva(paths, DefaultModel{0.02, 0.3}, 0.01, StructureKind::Baseline).cva;
    const double high = cva(paths, DefaultModel{0.02, 0.6}, 0.01, StructureKind::Baseline).cva;
    const double riskier = cva(paths, DefaultModel{0.05, 0.6}, 0.01, StructureKind::Baseline).cva;
    EXPECT_GT(low, 0.0);
    EXPECT_GT(high, low);
    EXPECT_NEAR(high, 2.0 * low, 1e-6 * high);
    EXPECT_GT(riskier, high);
}

TEST(CvaTest, IndependentOfThreadCount) {
    const auto paths = diffusing_paths(3'001);
    const auto one = cva(paths, DefaultModel{0.05, 0.6}, 0.01, StructureKind::Baseline, 1);
    const auto four = cva(paths, DefaultModel{0.05, 0.6}, 0.01, StructureKind::Baseline, 4);
    EXPECT_EQ(one, four);
}

TEST(CvaTest, RejectsInvalidModel) {
    const auto paths = constant_paths(1.0, 2);
    EXPECT_THROW(cva(paths, DefaultModel{0.02, 1.3}, 0.0, StructureKind::Baseline), ValidationError);
    EXPECT_THROW(cva(PathSet{}, DefaultModel{0.02, 0.6}, 0.0, StructureKind::Baseline), ValidationError);
}

TEST(EquivalenceSweepTest, TenThousandScenariosAgreeExactly) {
    const auto r = equivalence_sweep(10'000, 7);
    EXPECT_TRUE(r.passed);
    EXPECT_EQ(r.max_deviation, Money{});
    EXPECT_EQ(r.n, 10'000u);
    EXPECT_EQ(r.n_positive + r.n_zero + r.n_negative, r.n);
    EXPECT_GT(r.n_positive, 0u);
    EXPECT_GT(r.n_zero, 0u);
    EXPECT_GT(r.n_negative, 0u);
}

TEST(EquivalenceSweepTest, DegenerateAndNegativeRanges) {
    SweepBounds zero;
    zero.mtm_min = zero.mtm_max = 0.0;
    const auto z = equivalence_sweep(200, 1, zero);
    EXPECT_TRUE(z.passed);
    EXPECT_EQ(z.n_zero, 200u);

    SweepBounds negative;
    negative.mtm_max = -1.0;
    const auto n = equivalence_sweep(500, 2, negative);
    EXPECT_TRUE(n.passed);
    EXPECT_EQ(n.n_positive, 0u);
    EXPECT_THROW(equivalence_sweep(0, 1), ValidationError);
}

TEST(SweepBoundsTest, Validation) {
    SweepBounds b;
    b.lgd_max = 1.5;
    EXPECT_THROW(b.validate(), ValidationError);
    b = {};
    b.tau_min = 5.0;
    b.tau_max = 1.0;
    EXPECT_THROW(b.validate(), ValidationError);
}

TEST(CompareStructuresTest, OneRowPerScenarioAndStructure) {
    const std::vector<DefaultScenario> scenarios{
        DefaultScenario::at(3.0, MarketState::direct(0.01, Money::from_major(100e6))),
        DefaultScenario::at(3.0, MarketState::direct(0.01, Money::from_major(-50e6))),
    };
    const auto rows = compare_structures(scenarios, DealTerms{{}, {}, 0.6, {}});
    ASSERT_EQ(rows.size(), 6u);
    EXPECT_EQ(rows[0].structure, StructureKind::Baseline);
    EXPECT_EQ(rows[0].loss_o, Money::from_major(60e6));
    EXPECT_EQ(rows[0].estate_net, Money::from_major(60e6));
    EXPECT_EQ(rows[1].loss_o, Money{});
    EXPECT_EQ(rows[2].structure, StructureKind::CcdsChain);
    EXPECT_EQ(rows[2].loss_o, Money{});
    for (std::size_t i = 3; i < 6; ++i) {
        EXPECT_EQ(rows[i].scenario_index, 1u);
        EXPECT_EQ(rows[i].loss_o, Money{});
        EXPECT_EQ(rows[i].liquidity_v, Money{});
    }
}

TEST(InvariantSuiteTest, CorrectResolversPass) {
    const auto result = run_invariant_suite(random_cases(2'000, 11, {}));
    EXPECT_TRUE(result.passed());
    ASSERT_EQ(result.counts.size(), invariant_names().size());
    for (const auto& [name, count] : result.counts) {
        EXPECT_EQ(count.passed, 2'000u) << name;
        EXPECT_EQ(count.failed, 0u) << name;
    }
}

ResolverSet leaky_chain() {
    // Whenever the chain pays out, one cent of the estate goes to C itself.
    ResolverSet r;
    r.ccds_chain = [](const DefaultScenario& s, const StructureConfig& cfg) {
        auto report = resolve_ccds_chain(s, cfg);
        const bool paid = std::any_of(report.flows.begin(), report.flows.end(),
                                      [](const CashFlow& f) { return f.label == FlowLabel::CcdsSettlement; });
        if (paid) {
            report.flows.push_back({PartyId::EstateOfC, PartyId::Counterparty, Money::from_minor(1),
                                    FlowLabel::CcdsSettlement, std::nullopt});
        }
        return report;
    };
    return r;
}

TEST(InvariantSuiteTest, BrokenResolverIsCaughtAndShrunk) {
    const auto cases = random_cases(500, 3, {});
    const auto resolvers = leaky_chain();
    const auto result = run_invariant_suite(cases, resolvers);
    ASSERT_FALSE(result.passed());
    EXPECT_GT(result.counts.at("conservation").failed, 0u);
    EXPECT_GT(result.counts.at("waiver_settlement_correspondence").failed, 0u);
    EXPECT_EQ(result.counts.at("baseline_loss_law").failed, 0u);

    const auto& failing = cases[*result.first_failure];
    const auto shrunk = shrink_failure(failing, resolvers);
    EXPECT_FALSE(violated_invariants(shrunk, resolvers).empty());
    const auto x = [](const SweepCase& c) { return *c.scenario.market_at_tau.back_swap_mtm_for_originator(); };
    EXPECT_LE(abs(x(shrunk)), abs(x(failing)));
    EXPECT_TRUE(x(shrunk).is_positive());
    EXPECT_LT(x(shrunk), Money::from_minor(4));
}

}  // namespace
}  // namespace ccds
