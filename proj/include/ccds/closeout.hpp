#pragma once

#include <algorithm>
#include <array>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "ccds/contracts.hpp"
#include "ccds/errors.hpp"
#include "ccds/market.hpp"
#include "ccds/money.hpp"

namespace ccds {

enum class StructureKind { Baseline, Tpa, CcdsChain };

inline constexpr std::array<StructureKind, 3> all_structures{StructureKind::Baseline, StructureKind::Tpa,
                                                             StructureKind::CcdsChain};

constexpr std::string_view to_string(StructureKind k) {
    switch (k) {
        case StructureKind::Baseline: return "baseline";
        case StructureKind::Tpa: return "tpa";
        case StructureKind::CcdsChain: return "ccds_chain";
    }
    return "?";
}

inline StructureKind structure_from_string(std::string_view s) {
    for (auto k : all_structures) {
        if (to_string(k) == s) return k;
    }
    throw ValidationError("structure", "unknown structure '" + std::string(s) + "'");
}

enum class FlowLabel {
    CollateralReturn,
    CollateralKept,
    TerminationPayment,
    RecoveryPayment,
    ReplacementUpfront,
    CcdsSettlement,
    TpaWaiver
};

inline constexpr std::array<FlowLabel, 7> all_flow_labels{
    FlowLabel::CollateralReturn, FlowLabel::CollateralKept,  FlowLabel::TerminationPayment, FlowLabel::RecoveryPayment,
    FlowLabel::ReplacementUpfront, FlowLabel::CcdsSettlement, FlowLabel::TpaWaiver};

constexpr std::string_view to_string(FlowLabel l) {
    switch (l) {
        case FlowLabel::CollateralReturn: return "CollateralReturn";
        case FlowLabel::CollateralKept: return "CollateralKept";
        case FlowLabel::TerminationPayment: return "TerminationPayment";
        case FlowLabel::RecoveryPayment: return "RecoveryPayment";
        case FlowLabel::ReplacementUpfront: return "ReplacementUpfront";
        case FlowLabel::CcdsSettlement: return "CcdsSettlement";
        case FlowLabel::TpaWaiver: return "TpaWaiver";
    }
    return "?";
}

inline FlowLabel flow_label_from_string(std::string_view s) {
    for (auto l : all_flow_labels) {
        if (to_string(l) == s) return l;
    }
    throw ValidationError("label", "unknown flow label '" + std::string(s) + "'");
}

/// A transfer of value at the default instant. `amount` is strictly positive;
/// the direction carries the sign. `netting_set` is the agreement the flow
/// settles under, absent for standalone transactions.
struct CashFlow {
    PartyId from = PartyId::Originator;
    PartyId to = PartyId::Originator;
    Money amount;
    FlowLabel label = FlowLabel::TerminationPayment;
    std::optional<std::string> netting_set;

    friend bool operator==(const CashFlow&, const CashFlow&) = default;
};

struct PartyOutcome {
    Money realized_loss;
    Money liquidity_delta;     // net cash paid out at the default instant
    Money termination_amount;  // net close-out value of the party's netting set, before collateral

    friend bool operator==(const PartyOutcome&, const PartyOutcome&) = default;
};

struct CloseoutReport {
    DefaultScenario scenario;
    StructureKind structure = StructureKind::Baseline;
    std::vector<CashFlow> flows;
    std::map<PartyId, PartyOutcome> per_party;
    Money estate_net;  // net cash received by C's estate

    const PartyOutcome& outcome(PartyId p) const { return per_party.at(p); }

    /// Net value received by `p` over all flows.
    Money net_cash(PartyId p) const {
        Money net;
        for (const auto& f : flows) {
            if (f.to == p) net += f.amount;
            if (f.from == p) net -= f.amount;
        }
        return net;
    }

    friend bool operator==(const CloseoutReport&, const CloseoutReport&) = default;
};

/// Parties listed in every report. C itself appears only through its estate.
inline constexpr std::array<PartyId, 5> ledger_parties{PartyId::Originator, PartyId::Spv, PartyId::EstateOfC,
                                                       PartyId::ReplacementCtpyO, PartyId::ReplacementCtpyV};

/// Trades, netting sets and CCDS of one of the three structures.
struct StructureConfig {
    StructureKind kind = StructureKind::Baseline;
    BasisSwap front;
    BasisSwap back;
    NettingSet back_set;   // C-O, one-way CSA: O posts to C
    NettingSet front_set;  // C-V, one-way CSA: C posts to V
    std::vector<Ccds> ccds;
    double lgd = 0.0;

    friend bool operator==(const StructureConfig&, const StructureConfig&) = default;
};

/// Economic terms shared by every structure built over the same deal.
struct DealTerms {
    Money notional;
    std::vector<SchedulePeriod> schedule;
    double lgd = 0.0;
    Money ccds_upfront;
};

inline StructureConfig make_structure(StructureKind kind, const DealTerms& deal) {
    StructureConfig cfg;
    cfg.kind = kind;
    cfg.front = make_front_swap(deal.notional, deal.schedule);
    cfg.back = make_back_swap(deal.notional, deal.schedule);
    cfg.lgd = deal.lgd;
    cfg.back_set = NettingSet{"isda_c_o", PartyId::Counterparty, PartyId::Originator, {cfg.back.id},
                              OneWayCsa{PartyId::Counterparty, PartyId::Originator}, {}};
    cfg.front_set = NettingSet{"isda_c_v", PartyId::Counterparty, PartyId::Spv, {cfg.front.id},
                               OneWayCsa{PartyId::Spv, PartyId::Counterparty}, {}};
    if (kind == StructureKind::CcdsChain) {
        auto leg = [&](std::string id, PartyId buyer, PartyId seller, std::optional<std::string> ns) {
            return Ccds{std::move(id), PartyId::Counterparty, cfg.back.id, PartyId::Originator, buyer, seller,
                        std::move(ns), deal.ccds_upfront};
        };
        cfg.ccds.push_back(leg("ccds_1", PartyId::Counterparty, PartyId::Originator, cfg.back_set.id));
        cfg.ccds.push_back(leg("ccds_2", PartyId::Spv, PartyId::Counterparty, cfg.front_set.id));
        cfg.ccds.push_back(leg("ccds_3", PartyId::Originator, PartyId::Spv, std::nullopt));
        cfg.back_set.trades.push_back("ccds_1");
        cfg.front_set.trades.push_back("ccds_2");
    }
    return cfg;
}

namespace detail {

inline const Ccds* find_ccds(const StructureConfig& cfg, PartyId buyer, PartyId seller) {
    for (const auto& c : cfg.ccds) {
        if (c.protection_buyer == buyer && c.protection_seller == seller) return &c;
    }
    return nullptr;
}

}  // namespace detail

/// Checks the wiring the resolvers rely on; throws StructureError otherwise.
inline void validate_structure(const StructureConfig& cfg) {
    cfg.front.validate();
    cfg.back.validate();
    cfg.back_set.validate();
    cfg.front_set.validate();
    if (!(cfg.lgd >= 0.0 && cfg.lgd <= 1.0)) throw ValidationError("lgd", "must lie in [0, 1]");
    if (cfg.front.kind != SwapKind::FrontSwap || cfg.back.kind != SwapKind::BackSwap) {
        throw StructureError("front/back swap kinds are swapped");
    }
    if (cfg.front.payer_of_asset_leg != PartyId::Spv || cfg.front.payer_of_note_leg != PartyId::Counterparty ||
        cfg.back.payer_of_asset_leg != PartyId::Counterparty || cfg.back.payer_of_note_leg != PartyId::Originator) {
        throw StructureError("front swap must be V->C asset leg, back swap C->O asset leg");
    }
    if (!same_terms(cfg.front, cfg.back)) throw StructureError("front and back swap are not back-to-back");
    if (cfg.back_set.id == cfg.front_set.id) throw StructureError("front and back swap need distinct ISDA agreements");
    if (!cfg.back_set.involves(PartyId::Counterparty) || !cfg.back_set.involves(PartyId::Originator)) {
        throw StructureError("back-swap netting set must be between C and O");
    }
    if (!cfg.front_set.involves(PartyId::Counterparty) || !cfg.front_set.involves(PartyId::Spv)) {
        throw StructureError("front-swap netting set must be between C and V");
    }
    if (!cfg.back_set.contains(cfg.back.id) || cfg.front_set.contains(cfg.back.id)) {
        throw StructureError("back swap must sit in the C-O netting set only");
    }
    if (!cfg.front_set.contains(cfg.front.id) || cfg.back_set.contains(cfg.front.id)) {
        throw StructureError("front swap must sit in the C-V netting set only");
    }

    for (const auto& c : cfg.ccds) {
        c.validate();
        const bool in_back = cfg.back_set.contains(c.id);
        const bool in_front = cfg.front_set.contains(c.id);
        if (in_back && in_front) throw StructureError("ccds " + c.id + " sits in two netting sets");
        const std::optional<std::string> actual =
            in_back ? std::optional(cfg.back_set.id) : in_front ? std::optional(cfg.front_set.id) : std::nullopt;
        if (actual != c.netting_set) throw StructureError("ccds " + c.id + " netting-set assignment is inconsistent");
        if (c.reference_swap != cfg.back.id && c.reference_swap != cfg.front.id) {
            throw StructureError("ccds " + c.id + " references an unknown swap");
        }
    }
    for (const auto* ns : {&cfg.back_set, &cfg.front_set}) {
        for (const auto& t : ns->trades) {
            const bool known = t == cfg.back.id || t == cfg.front.id ||
                               std::any_of(cfg.ccds.begin(), cfg.ccds.end(), [&](const Ccds& c) { return c.id == t; });
            if (!known) throw StructureError("netting set " + ns->id + " holds unknown trade " + t);
        }
    }

    if (cfg.kind != StructureKind::CcdsChain) {
        if (!cfg.ccds.empty()) throw StructureError("only the CCDS chain carries CCDS");
        return;
    }
    if (cfg.ccds.size() != 3) throw StructureError("the CCDS chain needs exactly three CCDS");
    const Ccds* c1 = detail::find_ccds(cfg, PartyId::Counterparty, PartyId::Originator);
    const Ccds* c2 = detail::find_ccds(cfg, PartyId::Spv, PartyId::Counterparty);
    const Ccds* c3 = detail::find_ccds(cfg, PartyId::Originator, PartyId::Spv);
    if (!c1 || !c2 || !c3) throw StructureError("CCDS chain legs must be C<-O, V<-C and O<-V");
    for (const Ccds* c : {c1, c2, c3}) {
        if (c->reference_entity != PartyId::Counterparty || c->reference_swap != cfg.back.id ||
            c->reference_perspective != PartyId::Originator) {
            throw StructureError("ccds " + c->id + " must reference C and the Back Swap seen by O");
        }
        if (c->upfront_premium != c1->upfront_premium) throw StructureError("CCDS chain legs need equal upfronts");
    }
    if (c1->netting_set != cfg.back_set.id) {
        throw StructureError("ccds " + c1->id + " must be negotiated under the Back Swap ISDA agreement");
    }
    if (c2->netting_set != cfg.front_set.id) {
        throw StructureError("ccds " + c2->id + " must be negotiated under the Front Swap ISDA agreement");
    }
    if (c3->netting_set) throw StructureError("ccds " + c3->id + " between O and V is standalone");
}

/// Net upfront premium paid (+) or received (-) by each party when the CCDS
/// are put in place.
inline std::map<PartyId, Money> net_premium_by_party(const StructureConfig& cfg) {
    std::map<PartyId, Money> net;
    for (const auto& c : cfg.ccds) {
        net[c.protection_buyer] += c.upfront_premium;
        net[c.protection_seller] -= c.upfront_premium;
    }
    return net;
}

/// Amount recovered on an unsecured claim against C's estate; the loss is
/// `claim - apply_recovery(claim, lgd)`, i.e. lgd * claim rounded to minor units.
inline Money apply_recovery(Money claim, double lgd) {
    if (!(lgd >= 0.0 && lgd <= 1.0)) throw ValidationError("lgd", "must lie in [0, 1]");
    if (claim.is_negative()) throw std::invalid_argument("apply_recovery: claim must be >= 0");
    return claim - claim.scaled(lgd);
}

/// One trade (or TPA adjustment) inside a netting set, valued from the
/// surviving party's side.
struct CloseoutComponent {
    FlowLabel label;
    Money value;
};

namespace detail {

inline const BasisSwap& swap_by_id(const StructureConfig& cfg, const std::string& id) {
    if (id == cfg.back.id) return cfg.back;
    if (id == cfg.front.id) return cfg.front;
    throw StructureError("unknown swap " + id);
}

inline PartyId survivor_of(const NettingSet& ns, PartyId defaulted) {
    if (!ns.involves(defaulted)) throw std::invalid_argument("defaulted party is not in netting set " + ns.id);
    return ns.other_party(defaulted);
}

}  // namespace detail

/// Close-out values of every trade in `ns` seen by the non-defaulted party. A
/// triggered CCDS enters as an Unpaid Amount next to the swap.
inline std::vector<CloseoutComponent> closeout_components(const NettingSet& ns, const StructureConfig& cfg,
                                                          const MarketState& market, double tau, PartyId defaulted) {
    const PartyId survivor = detail::survivor_of(ns, defaulted);
    std::vector<CloseoutComponent> out;
    for (const auto& id : ns.trades) {
        if (id == cfg.back.id || id == cfg.front.id) {
            out.push_back({FlowLabel::TerminationPayment, swap_mtm(detail::swap_by_id(cfg, id), market, tau, survivor).value});
            continue;
        }
        const auto it = std::find_if(cfg.ccds.begin(), cfg.ccds.end(), [&](const Ccds& c) { return c.id == id; });
        if (it == cfg.ccds.end()) throw StructureError("netting set " + ns.id + " holds unknown trade " + id);
        const auto& ref = detail::swap_by_id(cfg, it->reference_swap);
        out.push_back({FlowLabel::CcdsSettlement, ccds_payoff(*it, ref, market, tau, defaulted, survivor)});
    }
    return out;
}

/// Net close-out value of `ns` before collateral, seen by the non-defaulted party.
inline SignedMtm net_termination_amount(const NettingSet& ns, const StructureConfig& cfg, const MarketState& market,
                                        double tau, PartyId defaulted) {
    Money net;
    for (const auto& c : closeout_components(ns, cfg, market, tau, defaulted)) net += c.value;
    return {net, detail::survivor_of(ns, defaulted)};
}

/// Upfront of the at-market Replacement Transaction for a swap terminated by
/// C's default. Returns nothing for a zero-value position.
inline std::optional<CashFlow> replacement_upfront(const BasisSwap& swap, const MarketState& market, double tau,
                                                   PartyId surviving_party) {
    PartyId replacement;
    if (surviving_party == PartyId::Originator) replacement = PartyId::ReplacementCtpyO;
    else if (surviving_party == PartyId::Spv) replacement = PartyId::ReplacementCtpyV;
    else throw std::invalid_argument("replacement_upfront: only O or V replace their swap");
    const Money v = swap_mtm(swap, market, tau, surviving_party).value;
    if (v.is_zero()) return std::nullopt;
    if (v.is_positive()) return CashFlow{surviving_party, replacement, v, FlowLabel::ReplacementUpfront, std::nullopt};
    return CashFlow{replacement, surviving_party, -v, FlowLabel::ReplacementUpfront, std::nullopt};
}

/// `swap` with the defaulted Counterparty swapped out for the survivor's
/// replacement counterparty.
inline BasisSwap replacement_swap(const BasisSwap& swap, PartyId surviving_party) {
    const PartyId replacement =
        surviving_party == PartyId::Originator ? PartyId::ReplacementCtpyO : PartyId::ReplacementCtpyV;
    BasisSwap r = swap;
    r.id = swap.id + "_replacement";
    if (r.payer_of_asset_leg == PartyId::Counterparty) r.payer_of_asset_leg = replacement;
    if (r.payer_of_note_leg == PartyId::Counterparty) r.payer_of_note_leg = replacement;
    return r;
}

namespace detail {

class Ledger {
public:
    void add(PartyId from, PartyId to, Money amount, FlowLabel label, const std::optional<std::string>& ns) {
        if (amount.is_zero()) return;
        if (amount.is_negative()) {
            std::swap(from, to);
            amount = -amount;
        }
        flows_.push_back({from, to, amount, label, ns});
    }

    void add(const std::optional<CashFlow>& f) {
        if (f) add(f->from, f->to, f->amount, f->label, f->netting_set);
    }

    std::vector<CashFlow> take_sorted() {
        std::stable_sort(flows_.begin(), flows_.end(), [](const CashFlow& a, const CashFlow& b) {
            return std::tie(a.label, a.from, a.to) < std::tie(b.label, b.from, b.to);
        });
        return std::move(flows_);
    }

private:
    std::vector<CashFlow> flows_;
};

/// Settles one netting set of the defaulted Counterparty.
///
/// Offsetting components are set off gross against each other (one flow per
/// component, labelled by component). The residual is then met from collateral;
/// what is owed by the estate beyond that recovers 1 - lgd. Posted collateral
/// stays owned by the poster until close-out, so only collateral that changes
/// hands produces a flow.
inline void settle_netting_set(const NettingSet& ns, PartyId survivor, std::span<const CloseoutComponent> components,
                               double lgd, Ledger& ledger) {
    constexpr PartyId estate = PartyId::EstateOfC;
    Money owed_to_survivor, owed_by_survivor;
    for (const auto& c : components) {
        if (c.value.is_positive()) owed_to_survivor += c.value;
        else owed_by_survivor -= c.value;
    }
    Money setoff_in = min(owed_to_survivor, owed_by_survivor);
    Money setoff_out = setoff_in;
    for (const auto& c : components) {
        if (c.value.is_positive()) {
            const Money leg = min(c.value, setoff_in);
            setoff_in -= leg;
            ledger.add(estate, survivor, leg, c.label, ns.id);
        } else if (c.value.is_negative()) {
            const Money leg = min(-c.value, setoff_out);
            setoff_out -= leg;
            ledger.add(survivor, estate, leg, c.label, ns.id);
        }
    }

    const Money net = owed_to_survivor - owed_by_survivor;
    const Money balance = ns.csa ? ns.collateral_balance : Money{};
    const bool survivor_secured = ns.csa && ns.csa->secured_party == survivor;

    if (survivor_secured) {
        if (net.is_positive()) {
            const Money kept = min(balance, net);
            ledger.add(estate, survivor, kept, FlowLabel::CollateralKept, ns.id);
            ledger.add(estate, survivor, apply_recovery(net - kept, lgd), FlowLabel::RecoveryPayment, ns.id);
        } else {
            ledger.add(survivor, estate, -net, FlowLabel::TerminationPayment, ns.id);
        }
        return;
    }

    // Collateral, if any, was posted by the survivor and is held by C.
    if (net.is_negative()) {
        const Money kept = min(balance, -net);
        const Money excess = balance - kept;
        ledger.add(survivor, estate, balance, FlowLabel::CollateralKept, ns.id);
        ledger.add(survivor, estate, -net - kept, FlowLabel::TerminationPayment, ns.id);
        ledger.add(estate, survivor, apply_recovery(excess, lgd), FlowLabel::CollateralReturn, ns.id);
    } else {
        ledger.add(survivor, estate, balance, FlowLabel::CollateralKept, ns.id);
        ledger.add(estate, survivor, apply_recovery(balance, lgd), FlowLabel::CollateralReturn, ns.id);
        ledger.add(estate, survivor, apply_recovery(net, lgd), FlowLabel::RecoveryPayment, ns.id);
    }
}

/// Gross settlement of a standalone CCDS between any two parties.
inline void settle_standalone_ccds(const Ccds& c, const StructureConfig& cfg, const MarketState& market, double tau,
                                   PartyId defaulted, Ledger& ledger) {
    const Money payoff = ccds_payoff(c, swap_by_id(cfg, c.reference_swap), market, tau, defaulted, c.protection_buyer);
    const auto as_ledger = [](PartyId p) { return p == PartyId::Counterparty ? PartyId::EstateOfC : p; };
    Money paid = payoff;
    if (c.protection_seller == PartyId::Counterparty) paid = apply_recovery(payoff, cfg.lgd);
    ledger.add(as_ledger(c.protection_seller), as_ledger(c.protection_buyer), paid, FlowLabel::CcdsSettlement,
               std::nullopt);
}

inline NettingSet with_balance(NettingSet ns, Money balance) {
    ns.collateral_balance = balance;
    return ns;
}

inline CloseoutReport empty_report(const DefaultScenario& scn, StructureKind kind) {
    CloseoutReport r{scn, kind, {}, {}, {}};
    for (PartyId p : ledger_parties) r.per_party[p] = {};
    return r;
}

/// Shared close-out driver; `tpa_clauses` switches on the three-party agreement.
inline CloseoutReport resolve_structure(const DefaultScenario& scn, const StructureConfig& cfg, bool tpa_clauses) {
    validate_structure(cfg);
    if (!scn.tau) return empty_report(scn, cfg.kind);

    const double tau = *scn.tau;
    const MarketState& m = scn.market_at_tau;
    constexpr PartyId O = PartyId::Originator, C = PartyId::Counterparty, V = PartyId::Spv;

    if (!mirror_check(cfg.front, cfg.back, m, tau)) throw StructureError("front swap does not mirror the back swap");
    const Money x = swap_mtm(cfg.back, m, tau, O).value;
    const bool clauses_active = tpa_clauses && x.is_positive();

    // Perfect collateralisation: balances equal the requirement at tau.
    const auto collateralised = [&](const NettingSet& ns, const BasisSwap& swap) {
        if (!ns.csa) return ns;
        return with_balance(ns, required_collateral(ns, swap_mtm(swap, m, tau, ns.csa->secured_party).value));
    };
    const NettingSet back_set = collateralised(cfg.back_set, cfg.back);
    const NettingSet front_set = collateralised(cfg.front_set, cfg.front);

    auto back_components = closeout_components(back_set, cfg, m, tau, C);
    auto front_components = closeout_components(front_set, cfg, m, tau, C);
    if (clauses_active) {
        // Clause 1: O waives the Back Swap amount in favour of C.
        back_components.push_back({FlowLabel::TpaWaiver, -x});
        // Clause 2: C waives the Front Swap amount in favour of V.
        front_components.push_back({FlowLabel::TpaWaiver, x});
    }

    Ledger ledger;
    settle_netting_set(back_set, O, back_components, cfg.lgd, ledger);
    settle_netting_set(front_set, V, front_components, cfg.lgd, ledger);
    for (const auto& c : cfg.ccds) {
        if (!c.netting_set) settle_standalone_ccds(c, cfg, m, tau, C, ledger);
    }

    const auto upfront_o = replacement_upfront(cfg.back, m, tau, O);
    const auto upfront_v = replacement_upfront(cfg.front, m, tau, V);
    ledger.add(upfront_o);
    ledger.add(upfront_v);
    if (clauses_active && upfront_v && upfront_v->to == V) {
        // Clause 3: V hands its replacement upfront on to O.
        ledger.add(V, O, upfront_v->amount, FlowLabel::TpaWaiver, std::nullopt);
    }

    CloseoutReport report{scn, cfg.kind, ledger.take_sorted(), {}, {}};

    const BasisSwap back_repl = replacement_swap(cfg.back, O);
    const BasisSwap front_repl = replacement_swap(cfg.front, V);
    const auto value = [&](const BasisSwap& s, PartyId p) { return swap_mtm(s, m, tau, p).value; };
    std::map<PartyId, Money> before{{O, value(cfg.back, O)},
                                    {V, value(cfg.front, V)},
                                    {PartyId::EstateOfC, value(cfg.back, C) + value(cfg.front, C)},
                                    {PartyId::ReplacementCtpyO, {}},
                                    {PartyId::ReplacementCtpyV, {}}};
    std::map<PartyId, Money> after{{O, value(back_repl, O)},
                                   {V, value(front_repl, V)},
                                   {PartyId::EstateOfC, {}},
                                   {PartyId::ReplacementCtpyO, value(back_repl, PartyId::ReplacementCtpyO)},
                                   {PartyId::ReplacementCtpyV, value(front_repl, PartyId::ReplacementCtpyV)}};
    Money back_net, front_net;
    for (const auto& c : back_components) back_net += c.value;
    for (const auto& c : front_components) front_net += c.value;
    const std::map<PartyId, Money> termination{{O, back_net},
                                               {V, front_net},
                                               {PartyId::EstateOfC, -(back_net + front_net)},
                                               {PartyId::ReplacementCtpyO, {}},
                                               {PartyId::ReplacementCtpyV, {}}};

    for (PartyId p : ledger_parties) {
        const Money cash = report.net_cash(p);
        report.per_party[p] = {before.at(p) - (after.at(p) + cash), -cash, termination.at(p)};
    }
    report.estate_net = report.net_cash(PartyId::EstateOfC);
    return report;
}

inline void require_kind(const StructureConfig& cfg, StructureKind kind) {
    if (cfg.kind != kind) {
        throw StructureError("expected a " + std::string(to_string(kind)) + " structure, got " +
                             std::string(to_string(cfg.kind)));
    }
}

}  // namespace detail

/// Usual structure: two swaps, two one-way CSAs, no protection for O.
inline CloseoutReport resolve_baseline(const DefaultScenario& scn, const StructureConfig& cfg) {
    detail::require_kind(cfg, StructureKind::Baseline);
    return detail::resolve_structure(scn, cfg, false);
}

/// Usual structure plus the three waiver/pass-through clauses, active only when
/// the Back Swap is positive for O at C's default.
inline CloseoutReport resolve_tpa(const DefaultScenario& scn, const StructureConfig& cfg) {
    detail::require_kind(cfg, StructureKind::Tpa);
    return detail::resolve_structure(scn, cfg, true);
}

/// Usual structure plus the chain of identical CCDS on C and the Back Swap.
inline CloseoutReport resolve_ccds_chain(const DefaultScenario& scn, const StructureConfig& cfg) {
    detail::require_kind(cfg, StructureKind::CcdsChain);
    return detail::resolve_structure(scn, cfg, false);
}

inline CloseoutReport resolve(const DefaultScenario& scn, const StructureConfig& cfg) {
    switch (cfg.kind) {
        case StructureKind::Baseline: return resolve_baseline(scn, cfg);
        case StructureKind::Tpa: return resolve_tpa(scn, cfg);
        case StructureKind::CcdsChain: return resolve_ccds_chain(scn, cfg);
    }
    throw StructureError("unknown structure kind");
}

/// Net cash summed over the ledger parties. Non-zero if any flow is lost or
/// routed to a party outside the ledger (e.g. C instead of its estate).
inline Money flow_imbalance(const CloseoutReport& r) {
    Money total;
    for (PartyId p : ledger_parties) total += r.net_cash(p);
    return total;
}

}  // namespace ccds
