#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ccds/closeout.hpp"
#include "ccds/market.hpp"
#include "ccds/parallel.hpp"

namespace ccds {

/// Expected positive exposure of O to C per grid point.
struct ExposureProfile {
    std::vector<double> times;
    std::vector<double> epe;
    std::vector<double> std_error;
    std::size_t n_paths = 0;

    friend bool operator==(const ExposureProfile&, const ExposureProfile&) = default;
};

struct CvaResult {
    StructureKind structure = StructureKind::Baseline;
    double cva = 0.0;
    double std_error = 0.0;
    std::size_t n_paths = 0;
    double lgd = 0.0;
    double hazard_rate = 0.0;

    friend bool operator==(const CvaResult&, const CvaResult&) = default;
};

namespace detail {

/// Sample mean and standard error, summed in index order.
struct MeanAndError {
    double mean = 0.0;
    double std_error = 0.0;
};

inline MeanAndError mean_and_error(const std::vector<double>& xs) {
    const auto n = static_cast<double>(xs.size());
    double sum = 0.0;
    for (double x : xs) sum += x;
    const double mean = sum / n;
    if (xs.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

/// Structure whose swaps are valued directly off the simulated MtM.
inline StructureConfig direct_structure(StructureKind kind, double lgd) {
    return make_structure(kind, DealTerms{{}, {}, lgd, {}});
}

}  // namespace detail

/// Unsecured exposure of O at each grid time: the loss O would realise with
/// zero recovery if C defaulted there, as produced by the structure's resolver.
inline ExposureProfile exposure_profile(const PathSet& paths, StructureKind structure, double discount_rate = 0.0,
                                        unsigned threads = 1) {
    if (paths.paths.empty()) throw ValidationError("paths", "need at least one path");
    const std::size_t n_times = paths.grid.size();
    for (const auto& p : paths.paths) {
        if (p.values.size() != n_times) throw ValidationError("paths", "paths do not share the time grid");
    }
    const StructureConfig cfg = detail::direct_structure(structure, 1.0);
    const std::size_t n = paths.paths.size();
    std::vector<double> exposure(n * n_times);
    detail::parallel_for(n, threads, [&](std::size_t i) {
        for (std::size_t k = 0; k < n_times; ++k) {
            const auto market = MarketState::direct(discount_rate, Money::from_major(paths.paths[i].values[k]));
            const auto report = resolve(DefaultScenario::at(paths.grid[k], market), cfg);
            exposure[k * n + i] = report.outcome(PartyId::Originator).realized_loss.major();
        }
    });

    ExposureProfile out{paths.grid.times(), std::vector<double>(n_times), std::vector<double>(n_times), n};
    std::vector<double> column(n);
    for (std::size_t k = 0; k < n_times; ++k) {
        std::copy(exposure.begin() + static_cast<std::ptrdiff_t>(k * n),
                  exposure.begin() + static_cast<std::ptrdiff_t>((k + 1) * n), column.begin());
        const auto stats = detail::mean_and_error(column);
        out.epe[k] = stats.mean;
        out.std_error[k] = stats.std_error;
    }
    return out;
}

/// Unilateral CVA of O against C: the mean over paths of the discounted loss O
/// realises under `structure` at C's default. Default times come from the
/// paths' own seeds and are independent of the MtM draws; at a default between
/// grid points the MtM of the next grid point is used, discounted from tau.
inline CvaResult cva(const PathSet& paths, const DefaultModel& model, double rate, StructureKind structure,
                     unsigned threads = 1) {
    if (paths.paths.empty()) throw ValidationError("n_paths", "need at least one path");
    model.validate();
    const StructureConfig cfg = detail::direct_structure(structure, model.lgd);
    const double horizon = paths.grid.horizon();
    const std::size_t n = paths.paths.size();
    std::vector<double> loss(n, 0.0);
    detail::parallel_for(n, threads, [&](std::size_t i) {
        const MtmPath& path = paths.paths[i];
        if (path.values.size() != paths.grid.size()) throw ValidationError("paths", "paths do not share the time grid");
        const auto tau = horizon > 0.0 ? simulate_default_time(model, horizon, path.seed, path.path_index)
                                       : std::optional<double>{};
        if (!tau) return;
        const double x = path.values[paths.grid.bucket_of(*tau)];
        const auto scn = DefaultScenario::at(*tau, MarketState::direct(rate, Money::from_major(x)));
        const auto report = resolve(scn, cfg);
        loss[i] = scn.discount_to_tau * report.outcome(PartyId::Originator).realized_loss.major();
    });
    const auto stats = detail::mean_and_error(loss);
    return {structure, stats.mean, stats.std_error, n, model.lgd, model.hazard_rate};
}

/// Ranges for randomised close-out scenarios (money in major units).
struct SweepBounds {
    double mtm_min = -1.0e9;
    double mtm_max = 1.0e9;
    double lgd_min = 0.0;
    double lgd_max = 1.0;
    double tau_min = 0.0;
    double tau_max = 10.0;
    double rate_min = 0.0;
    double rate_max = 0.05;
    double zero_mtm_fraction = 0.05;  // share of scenarios pinned at X = 0

    void validate() const {
        if (mtm_min > mtm_max || lgd_min > lgd_max || tau_min > tau_max || rate_min > rate_max) {
            throw ValidationError("sweep", "lower bounds must not exceed upper bounds");
        }
        if (lgd_min < 0.0 || lgd_max > 1.0) throw ValidationError("lgd", "bounds must lie in [0, 1]");
        if (tau_min < 0.0) throw ValidationError("tau", "bounds must be >= 0");
        if (zero_mtm_fraction < 0.0 || zero_mtm_fraction > 1.0) {
            throw ValidationError("zero_mtm_fraction", "must lie in [0, 1]");
        }
    }

    friend bool operator==(const SweepBounds&, const SweepBounds&) = default;
};

/// A default scenario plus the loss fraction it is resolved with.
struct SweepCase {
    DefaultScenario scenario;
    double lgd = 0.0;
};

inline std::vector<SweepCase> random_cases(std::size_t n, std::uint64_t seed, const SweepBounds& b) {
    b.validate();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const auto lerp = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
    std::vector<SweepCase> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const bool pin_zero = unit(rng) < b.zero_mtm_fraction && b.mtm_min <= 0.0 && b.mtm_max >= 0.0;
        const double x = lerp(b.mtm_min, b.mtm_max);
        const double lgd = lerp(b.lgd_min, b.lgd_max);
        const double tau = lerp(b.tau_min, b.tau_max);
        const double rate = lerp(b.rate_min, b.rate_max);
        const Money mtm = pin_zero ? Money{} : Money::from_major(x);
        out.push_back({DefaultScenario::at(tau, MarketState::direct(rate, mtm)), lgd});
    }
    return out;
}

/// Largest absolute difference over every per-party field and estate_net.
inline Money max_field_deviation(const CloseoutReport& a, const CloseoutReport& b) {
    Money worst = abs(a.estate_net - b.estate_net);
    for (PartyId p : ledger_parties) {
        const auto& x = a.outcome(p);
        const auto& y = b.outcome(p);
        worst = max(worst, abs(x.realized_loss - y.realized_loss));
        worst = max(worst, abs(x.liquidity_delta - y.liquidity_delta));
        worst = max(worst, abs(x.termination_amount - y.termination_amount));
    }
    return worst;
}

struct EquivalenceReport {
    std::size_t n = 0;
    std::size_t n_positive = 0;
    std::size_t n_zero = 0;
    std::size_t n_negative = 0;
    Money max_deviation;
    bool passed = false;
};

/// Resolves `n` random scenarios under TPA and under the CCDS chain and reports
/// the largest per-field deviation between the two.
inline EquivalenceReport equivalence_sweep(std::size_t n, std::uint64_t seed, const SweepBounds& bounds = {}) {
    if (n < 1) throw ValidationError("n", "must be >= 1");
    EquivalenceReport out;
    out.n = n;
    for (const auto& c : random_cases(n, seed, bounds)) {
        const Money x = *c.scenario.market_at_tau.back_swap_mtm_for_originator();
        if (x.is_positive()) ++out.n_positive;
        else if (x.is_zero()) ++out.n_zero;
        else ++out.n_negative;
        const auto tpa = resolve_tpa(c.scenario, detail::direct_structure(StructureKind::Tpa, c.lgd));
        const auto chain = resolve_ccds_chain(c.scenario, detail::direct_structure(StructureKind::CcdsChain, c.lgd));
        out.max_deviation = max(out.max_deviation, max_field_deviation(tpa, chain));
    }
    out.passed = out.max_deviation.is_zero();
    return out;
}

struct ComparisonRow {
    std::size_t scenario_index = 0;
    StructureKind structure = StructureKind::Baseline;
    Money loss_o;
    Money loss_v;
    Money liquidity_o;
    Money liquidity_v;
    Money estate_net;

    friend bool operator==(const ComparisonRow&, const ComparisonRow&) = default;
};

/// One row per (scenario, structure), scenarios outermost.
inline std::vector<ComparisonRow> compare_structures(const std::vector<DefaultScenario>& scenarios,
                                                     const DealTerms& deal) {
    std::vector<StructureConfig> cfgs;
    for (auto k : all_structures) cfgs.push_back(make_structure(k, deal));
    std::vector<ComparisonRow> rows;
    rows.reserve(scenarios.size() * cfgs.size());
    for (std::size_t i = 0; i < scenarios.size(); ++i) {
        for (const auto& cfg : cfgs) {
            const auto r = resolve(scenarios[i], cfg);
            rows.push_back({i, cfg.kind, r.outcome(PartyId::Originator).realized_loss,
                            r.outcome(PartyId::Spv).realized_loss, r.outcome(PartyId::Originator).liquidity_delta,
                            r.outcome(PartyId::Spv).liquidity_delta, r.estate_net});
        }
    }
    return rows;
}

/// The three resolvers, replaceable for fault-injection tests.
struct ResolverSet {
    std::function<CloseoutReport(const DefaultScenario&, const StructureConfig&)> baseline = resolve_baseline;
    std::function<CloseoutReport(const DefaultScenario&, const StructureConfig&)> tpa = resolve_tpa;
    std::function<CloseoutReport(const DefaultScenario&, const StructureConfig&)> ccds_chain = resolve_ccds_chain;
};

struct InvariantCount {
    std::size_t passed = 0;
    std::size_t failed = 0;
};

/// Names of the close-out invariants, in report order.
inline const std::vector<std::string>& invariant_names() {
    static const std::vector<std::string> names{"conservation",          "baseline_loss_law",
                                                "tpa_fairness",          "structural_equivalence",
                                                "conditional_identity",  "waiver_settlement_correspondence",
                                                "zero_premium"};
    return names;
}

/// Evaluates every close-out invariant on one case; returns the names violated.
inline std::vector<std::string> violated_invariants(const SweepCase& c, const ResolverSet& resolvers) {
    std::vector<std::string> bad;
    const auto base_cfg = detail::direct_structure(StructureKind::Baseline, c.lgd);
    const auto tpa_cfg = detail::direct_structure(StructureKind::Tpa, c.lgd);
    const auto chain_cfg = detail::direct_structure(StructureKind::CcdsChain, c.lgd);
    const auto base = resolvers.baseline(c.scenario, base_cfg);
    const auto tpa = resolvers.tpa(c.scenario, tpa_cfg);
    const auto chain = resolvers.ccds_chain(c.scenario, chain_cfg);
    const Money x = swap_mtm(base_cfg.back, c.scenario.market_at_tau, *c.scenario.tau, PartyId::Originator).value;

    const auto well_formed = [](const CloseoutReport& r) {
        for (const auto& f : r.flows) {
            if (!f.amount.is_positive()) return false;
        }
        for (PartyId p : ledger_parties) {
            if (!r.per_party.contains(p)) return false;
        }
        return flow_imbalance(r).is_zero();
    };
    if (!well_formed(base) || !well_formed(tpa) || !well_formed(chain)) bad.push_back("conservation");

    const auto& bo = base.outcome(PartyId::Originator);
    const auto& bv = base.outcome(PartyId::Spv);
    if (bo.realized_loss != positive_part(x).scaled(c.lgd) || !bv.realized_loss.is_zero() ||
        !bv.liquidity_delta.is_zero()) {
        bad.push_back("baseline_loss_law");
    }

    bool fair = tpa.estate_net.is_zero();
    for (PartyId p : {PartyId::Originator, PartyId::Spv, PartyId::EstateOfC}) {
        fair = fair && tpa.outcome(p).realized_loss.is_zero() && tpa.outcome(p).liquidity_delta.is_zero();
    }
    if (!fair) bad.push_back("tpa_fairness");

    if (tpa.per_party != chain.per_party || tpa.estate_net != chain.estate_net) bad.push_back("structural_equivalence");

    if (!x.is_positive() && (base.per_party != tpa.per_party || base.per_party != chain.per_party)) {
        bad.push_back("conditional_identity");
    }

    const auto clause_flows = [](const CloseoutReport& r, FlowLabel label) {
        std::vector<std::tuple<PartyId, PartyId, Money, std::optional<std::string>>> out;
        for (const auto& f : r.flows) {
            if (f.label == label) out.emplace_back(f.from, f.to, f.amount, f.netting_set);
        }
        std::sort(out.begin(), out.end());
        return out;
    };
    if (clause_flows(tpa, FlowLabel::TpaWaiver) != clause_flows(chain, FlowLabel::CcdsSettlement)) {
        bad.push_back("waiver_settlement_correspondence");
    }

    for (const auto& [party, premium] : net_premium_by_party(chain_cfg)) {
        if (!premium.is_zero()) {
            bad.push_back("zero_premium");
            break;
        }
    }
    return bad;
}

struct InvariantSuiteResult {
    std::map<std::string, InvariantCount> counts;
    std::optional<std::size_t> first_failure;

    bool passed() const { return !first_failure.has_value(); }
};

inline InvariantSuiteResult run_invariant_suite(const std::vector<SweepCase>& cases, const ResolverSet& resolvers = {}) {
    InvariantSuiteResult out;
    for (const auto& name : invariant_names()) out.counts[name] = {};
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const auto bad = violated_invariants(cases[i], resolvers);
        for (const auto& name : invariant_names()) {
            const bool failed = std::find(bad.begin(), bad.end(), name) != bad.end();
            failed ? ++out.counts[name].failed : ++out.counts[name].passed;
        }
        if (!bad.empty() && !out.first_failure) out.first_failure = i;
    }
    return out;
}

/// Shrinks a failing case towards X = 0 and a round LGD while it keeps failing.
inline SweepCase shrink_failure(SweepCase c, const ResolverSet& resolvers) {
    const auto fails = [&](const SweepCase& s) { return !violated_invariants(s, resolvers).empty(); };
    const double rate = c.scenario.market_at_tau.flat_discount_rate();
    const double tau = *c.scenario.tau;
    const auto with = [&](Money x, double lgd) {
        return SweepCase{DefaultScenario::at(tau, MarketState::direct(rate, x)), lgd};
    };
    Money x = *c.scenario.market_at_tau.back_swap_mtm_for_originator();
    for (const double lgd : {0.0, 1.0, 0.5}) {
        if (fails(with(x, lgd))) {
            c = with(x, lgd);
            break;
        }
    }
    while (!x.is_zero()) {
        const Money half = Money::from_minor(x.minor() / 2);
        if (!fails(with(half, c.lgd))) break;
        x = half;
        c = with(x, c.lgd);
    }
    return c;
}

}  // namespace ccds
