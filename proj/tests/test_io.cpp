#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "ccds/io.hpp"

namespace ccds {
namespace {

TEST(ScenarioIoTest, LoadsDirectMtmScenario) {
    const auto doc = parse_scenario(R"({"tau": 5, "back_swap_mtm_for_O": 10000000000,
                                        "lgd": 0.6, "discount_rate": 0.01})");
    ASSERT_TRUE(doc.scenario.defaulted());
    EXPECT_EQ(*doc.scenario.tau, 5.0);
    EXPECT_EQ(doc.scenario.market_at_tau.back_swap_mtm_for_originator(), Money::from_major(100e6));
    EXPECT_NEAR(doc.scenario.discount_to_tau, std::exp(-0.05), 1e-15);
    EXPECT_EQ(doc.currency, "EUR");
    EXPECT_EQ(doc.model.lgd, 0.6);
}

TEST(ScenarioIoTest, AbsentTauMeansNoDefault) {
    const auto doc = parse_scenario(R"({"back_swap_mtm_for_O": 1, "lgd": 0.6})");
    EXPECT_FALSE(doc.scenario.defaulted());
    const auto nulled = parse_scenario(R"({"tau": null, "back_swap_mtm_for_O": 1, "lgd": 0.6})");
    EXPECT_FALSE(nulled.scenario.defaulted());
}

TEST(ScenarioIoTest, CurveScenarioKeepsSchedule) {
    const auto doc = parse_scenario(R"({"tau": 1, "lgd": 0.5, "discount_rate": 0.01, "notional": 10000000000,
        "schedule": [{"time": 1, "asset_rate": 0.03, "note_rate": 0.02},
                     {"time": 2, "asset_rate": 0.03, "note_rate": 0.02}]})");
    EXPECT_EQ(doc.scenario.market_at_tau.mode(), ValuationMode::Curve);
    ASSERT_EQ(doc.schedule.size(), 2u);
    EXPECT_EQ(doc.deal().notional, Money::from_major(1e8));
}

void expect_field_error(const std::string& text, const std::string& field) {
    try {
        parse_scenario(text);
        FAIL() << "accepted: " << text;
    } catch (const ValidationError& e) {
        EXPECT_EQ(e.field(), field) << e.what();
    }
}

TEST(ScenarioIoTest, ValidationErrorsNameTheField) {
    expect_field_error(R"({"tau": 5, "back_swap_mtm_for_O": 1, "lgd": 1.3})", "lgd");
    expect_field_error(R"({"tau": -1, "back_swap_mtm_for_O": 1, "lgd": 0.3})", "tau");
    expect_field_error(R"({"tau": 1, "back_swap_mtm_for_O": 1.5, "lgd": 0.3})", "back_swap_mtm_for_O");
    expect_field_error(R"({"tau": 1, "back_swap_mtm_for_O": 1})", "lgd");
    expect_field_error(R"({"tau": 1, "lgd": 0.3})", "schedule");
    expect_field_error(R"({"tau": 1, "back_swap_mtm_for_O": 1, "lgd": 0.3, "colour": "red"})", "colour");
    expect_field_error(R"({"tau": 3, "lgd": 0.3, "notional": 1, "schedule": [{"time": 2, "asset_rate": 0, "note_rate": 0}]})",
                       "tau");
    expect_field_error(R"({"tau": 1, "back_swap_mtm_for_O": 1, "lgd": 0.3, "hazard_rate": -0.1})", "hazard_rate");
}

TEST(ScenarioIoTest, MalformedJsonReportsPosition) {
    try {
        parse_scenario("{\n  \"tau\": 5,\n  \"lgd\": ,\n}", "bad.json");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
        EXPECT_EQ(e.column(), 10u);
        EXPECT_NE(std::string(e.what()).find("bad.json"), std::string::npos);
    }
}

TEST(ScenarioIoTest, MissingFileIsIoError) {
    try {
        load_scenario("/nonexistent/dir/scenario.json");
        FAIL();
    } catch (const IoError& e) {
        EXPECT_NE(std::string(e.what()).find("/nonexistent/dir/scenario.json"), std::string::npos);
    }
}

TEST(ScenarioIoTest, SaveLoadRoundTrip) {
    const auto dir = std::filesystem::path(::testing::TempDir()) / "ccds_io_roundtrip";
    ScenarioDocument doc;
    doc.currency = "USD";
    doc.model = {0.03, 0.45};
    doc.scenario = DefaultScenario::at(2.5, MarketState::direct(0.02, Money::from_minor(-123456789)));
    save_scenario(dir / "s.json", doc);
    EXPECT_EQ(load_scenario(dir / "s.json"), doc);
}

StructureConfig direct(StructureKind kind, double lgd) { return make_structure(kind, DealTerms{{}, {}, lgd, {}}); }

TEST(ReportIoTest, RoundTripProperty) {
    std::mt19937_64 rng(21);
    std::uniform_int_distribution<std::int64_t> minor(-100'000'000'000, 100'000'000'000);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 300; ++i) {
        const auto scn = i % 17 == 0 ? DefaultScenario::no_default(MarketState::curve(0.02))
                                     : DefaultScenario::at(10.0 * unit(rng),
                                                           MarketState::direct(0.05 * unit(rng), Money::from_minor(minor(rng))));
        for (auto kind : all_structures) {
            if (!scn.defaulted() && kind != StructureKind::Baseline) continue;
            const auto report = scn.defaulted() ? resolve(scn, direct(kind, unit(rng)))
                                                : resolve(scn, make_structure(kind, {{}, {{1.0, 0.0, 0.0}}, 0.5, {}}));
            const auto text = report_to_json(report).dump(2);
            ASSERT_EQ(parse_report(text), report) << text;
            // Re-serialising the parsed report reproduces the same bytes.
            ASSERT_EQ(report_to_json(parse_report(text)).dump(2), text);
        }
    }
}

TEST(ReportIoTest, RejectsBadReports) {
    const auto report =
        resolve(DefaultScenario::at(1.0, MarketState::direct(0.0, Money::from_major(5.0))), direct(StructureKind::Baseline, 0.5));
    auto j = report_to_json(report);
    j["flows"][0]["amount"] = 0;
    EXPECT_THROW(report_from_json(j), ValidationError);
    j = report_to_json(report);
    j["structure"] = "bilateral";
    EXPECT_THROW(report_from_json(j), ValidationError);
    j = report_to_json(report);
    j["flows"][0]["from"] = "Nobody";
    EXPECT_THROW(report_from_json(j), ValidationError);
}

TEST(CsvTest, FlowsAndParties) {
    const auto report = resolve(DefaultScenario::at(3.0, MarketState::direct(0.01, Money::from_major(100e6))),
                                direct(StructureKind::Baseline, 0.6));
    EXPECT_EQ(flows_csv(report),
              "from,to,amount,label,netting_set\n"
              "Spv,EstateOfC,10000000000,TerminationPayment,isda_c_v\n"
              "EstateOfC,Originator,4000000000,RecoveryPayment,isda_c_o\n"
              "Originator,ReplacementCtpyO,10000000000,ReplacementUpfront,\n"
              "ReplacementCtpyV,Spv,10000000000,ReplacementUpfront,\n");
    EXPECT_EQ(parties_csv(report),
              "party,realized_loss,liquidity_delta,termination_amount\n"
              "Originator,6000000000,6000000000,10000000000\n"
              "Spv,0,0,-10000000000\n"
              "ReplacementCtpyO,0,-10000000000,0\n"
              "ReplacementCtpyV,0,10000000000,0\n"
              "EstateOfC,-6000000000,-6000000000,0\n"
              "estate_net,6000000000,,\n");
}

TEST(CsvTest, NumbersRoundTrip) {
    EXPECT_EQ(format_double(0.1), "0.1");
    EXPECT_EQ(format_double(2584211.875), "2584211.875");
    EXPECT_EQ(format_double(0.0), "0");
    const ExposureProfile p{{0.0, 0.25}, {0.0, 1.5}, {0.0, 0.125}, 2};
    EXPECT_EQ(exposure_csv(p), "time,epe,std_error\n0,0,0\n0.25,1.5,0.125\n");
    EXPECT_EQ(cva_csv({CvaResult{StructureKind::CcdsChain, 0.0, 0.0, 100000, 0.6, 0.02}}),
              "structure,cva,std_error,n_paths,lgd,hazard_rate\nccds_chain,0,0,100000,0.6,0.02\n");
}

}  // namespace
}  // namespace ccds
