#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ccds/errors.hpp"
#include "ccds/market.hpp"
#include "ccds/money.hpp"

namespace ccds {

/// Originator, Counterparty and Spv contract with each other; the remaining
/// roles only appear in close-out ledgers.
enum class PartyId { Originator, Counterparty, Spv, ReplacementCtpyO, ReplacementCtpyV, EstateOfC };

inline constexpr std::array<PartyId, 6> all_parties{PartyId::Originator,       PartyId::Counterparty,
                                                    PartyId::Spv,              PartyId::ReplacementCtpyO,
                                                    PartyId::ReplacementCtpyV, PartyId::EstateOfC};

constexpr std::string_view to_string(PartyId p) {
    switch (p) {
        case PartyId::Originator: return "Originator";
        case PartyId::Counterparty: return "Counterparty";
        case PartyId::Spv: return "Spv";
        case PartyId::ReplacementCtpyO: return "ReplacementCtpyO";
        case PartyId::ReplacementCtpyV: return "ReplacementCtpyV";
        case PartyId::EstateOfC: return "EstateOfC";
    }
    return "?";
}

inline PartyId party_from_string(std::string_view s) {
    for (PartyId p : all_parties) {
        if (to_string(p) == s) return p;
    }
    throw ValidationError("party", "unknown party '" + std::string(s) + "'");
}

constexpr bool is_contracting_party(PartyId p) {
    return p == PartyId::Originator || p == PartyId::Counterparty || p == PartyId::Spv;
}

enum class SwapKind { FrontSwap, BackSwap };

struct SchedulePeriod {
    double payment_time = 0.0;  // years
    double asset_rate = 0.0;    // per year
    double note_rate = 0.0;     // per year

    friend bool operator==(const SchedulePeriod&, const SchedulePeriod&) = default;
};

/// Basis swap exchanging the securitised-asset proceeds against Note coupons.
/// Accrual of period i is payment_time[i] - payment_time[i-1], starting from 0.
struct BasisSwap {
    std::string id;
    PartyId payer_of_asset_leg = PartyId::Counterparty;
    PartyId payer_of_note_leg = PartyId::Originator;
    Money notional;
    std::vector<SchedulePeriod> schedule;
    SwapKind kind = SwapKind::BackSwap;

    /// The party receiving the asset leg pays the note leg.
    PartyId asset_receiver() const { return payer_of_note_leg; }

    bool involves(PartyId p) const { return p == payer_of_asset_leg || p == payer_of_note_leg; }

    PartyId other_party(PartyId p) const {
        if (p == payer_of_asset_leg) return payer_of_note_leg;
        if (p == payer_of_note_leg) return payer_of_asset_leg;
        throw std::invalid_argument("party " + std::string(to_string(p)) + " is not a party to swap " + id);
    }

    std::optional<double> maturity() const {
        if (schedule.empty()) return std::nullopt;
        return schedule.back().payment_time;
    }

    void validate() const {
        if (payer_of_asset_leg == payer_of_note_leg) throw ValidationError("swap." + id, "leg payers must differ");
        if (notional.is_negative()) throw ValidationError("notional", "must be >= 0");
        double prev = 0.0;
        for (const auto& p : schedule) {
            if (!(p.payment_time > prev) || !std::isfinite(p.payment_time)) {
                throw ValidationError("schedule", "payment times must be positive and strictly increasing");
            }
            if (!std::isfinite(p.asset_rate) || !std::isfinite(p.note_rate)) {
                throw ValidationError("schedule", "rates must be finite");
            }
            prev = p.payment_time;
        }
    }

    friend bool operator==(const BasisSwap&, const BasisSwap&) = default;
};

/// V pays the asset leg to C, C pays the Note coupons to V.
inline BasisSwap make_front_swap(Money notional, std::vector<SchedulePeriod> schedule) {
    BasisSwap s{"front_swap", PartyId::Spv, PartyId::Counterparty, notional, std::move(schedule), SwapKind::FrontSwap};
    s.validate();
    return s;
}

/// C passes the asset leg on to O, O pays the Note coupons to C.
inline BasisSwap make_back_swap(Money notional, std::vector<SchedulePeriod> schedule) {
    BasisSwap s{"back_swap", PartyId::Counterparty, PartyId::Originator, notional, std::move(schedule), SwapKind::BackSwap};
    s.validate();
    return s;
}

/// A swap value tagged with the party it is seen from.
struct SignedMtm {
    Money value;
    PartyId perspective = PartyId::Originator;

    SignedMtm seen_by(const BasisSwap& swap, PartyId other) const {
        if (other == perspective) return *this;
        if (swap.other_party(perspective) != other) {
            throw std::invalid_argument("cannot re-sign MtM for a party outside the swap");
        }
        return {-value, other};
    }

    friend bool operator==(const SignedMtm&, const SignedMtm&) = default;
};

/// Collateral only ever moves from `posting_party` to `secured_party`.
struct OneWayCsa {
    PartyId secured_party = PartyId::Counterparty;
    PartyId posting_party = PartyId::Originator;

    void validate() const {
        if (secured_party == posting_party) throw ValidationError("csa", "secured and posting party must differ");
    }

    friend bool operator==(const OneWayCsa&, const OneWayCsa&) = default;
};

/// Contingent CDS: pays the positive part of `reference_swap`'s MtM, seen by
/// `reference_perspective`, at the default of `reference_entity`.
struct Ccds {
    std::string id;
    PartyId reference_entity = PartyId::Counterparty;
    std::string reference_swap;
    PartyId reference_perspective = PartyId::Originator;
    PartyId protection_buyer = PartyId::Originator;
    PartyId protection_seller = PartyId::Spv;
    std::optional<std::string> netting_set;  // nullopt: standalone
    Money upfront_premium;

    void validate() const {
        if (protection_buyer == protection_seller) throw ValidationError("ccds." + id, "buyer and seller must differ");
        if (upfront_premium.is_negative()) throw ValidationError("ccds." + id, "upfront premium must be >= 0");
    }

    friend bool operator==(const Ccds&, const Ccds&) = default;
};

/// One ISDA agreement between two parties with an optional one-way CSA.
struct NettingSet {
    std::string id;
    PartyId party_a = PartyId::Counterparty;
    PartyId party_b = PartyId::Originator;
    std::vector<std::string> trades;
    std::optional<OneWayCsa> csa;
    Money collateral_balance;  // held by csa->secured_party

    bool contains(std::string_view trade) const { return std::find(trades.begin(), trades.end(), trade) != trades.end(); }
    bool involves(PartyId p) const { return p == party_a || p == party_b; }

    PartyId other_party(PartyId p) const {
        if (p == party_a) return party_b;
        if (p == party_b) return party_a;
        throw std::invalid_argument("party " + std::string(to_string(p)) + " is not in netting set " + id);
    }

    void validate() const {
        if (party_a == party_b) throw ValidationError("netting_set." + id, "parties must differ");
        if (collateral_balance.is_negative()) throw ValidationError("collateral_balance", "must be >= 0");
        if (csa) {
            csa->validate();
            if (!involves(csa->secured_party) || !involves(csa->posting_party)) {
                throw ValidationError("netting_set." + id, "CSA parties must be the netting-set parties");
            }
        }
    }

    friend bool operator==(const NettingSet&, const NettingSet&) = default;
};

/// MtM of `swap` at `t` from `perspective`.
///
/// Curve mode discounts the remaining net exchanges (asset minus note leg) at the
/// flat rate. DirectMtm mode uses the simulated Back Swap value: front and back
/// swaps have identical legs seen from their asset receivers, so that value is
/// taken as the asset receiver's MtM of either swap.
inline SignedMtm swap_mtm(const BasisSwap& swap, const MarketState& market, double t, PartyId perspective) {
    if (!swap.involves(perspective)) {
        throw std::invalid_argument("swap_mtm: " + std::string(to_string(perspective)) + " is not a party to " + swap.id);
    }
    if (const auto mat = swap.maturity(); mat && t > *mat) {
        throw std::out_of_range("swap_mtm: t=" + std::to_string(t) + " beyond maturity of " + swap.id);
    }

    Money for_receiver;
    if (market.mode() == ValuationMode::DirectMtm) {
        for_receiver = *market.back_swap_mtm_for_originator();
    } else {
        const double rate = market.flat_discount_rate();
        const double notional = swap.notional.major();
        double value = 0.0;
        double prev = 0.0;
        for (const auto& p : swap.schedule) {
            const double accrual = p.payment_time - prev;
            prev = p.payment_time;
            if (p.payment_time <= t) continue;
            value += std::exp(-rate * (p.payment_time - t)) * notional * (p.asset_rate - p.note_rate) * accrual;
        }
        for_receiver = Money::from_major(value);
    }
    return {perspective == swap.asset_receiver() ? for_receiver : -for_receiver, perspective};
}

inline bool same_terms(const BasisSwap& a, const BasisSwap& b) {
    if (a.notional != b.notional || a.schedule.size() != b.schedule.size()) return false;
    for (std::size_t i = 0; i < a.schedule.size(); ++i) {
        if (a.schedule[i].payment_time != b.schedule[i].payment_time) return false;
    }
    return true;
}

/// True iff the Front Swap seen by V is exactly the negated Back Swap seen by O.
/// Differing notional or payment dates is a structural error; differing rates
/// simply break the mirror.
inline bool mirror_check(const BasisSwap& front, const BasisSwap& back, const MarketState& market, double t) {
    if (front.kind != SwapKind::FrontSwap || back.kind != SwapKind::BackSwap) {
        throw StructureError("mirror_check: expected a FrontSwap and a BackSwap");
    }
    if (!same_terms(front, back)) throw StructureError("mirror_check: front and back swap schedules do not match");
    return swap_mtm(front, market, t, PartyId::Spv).value == -swap_mtm(back, market, t, PartyId::Originator).value;
}

/// Target balance under continuous zero-threshold, zero-MTA collateralisation.
inline Money required_collateral(const NettingSet& ns, Money mtm_for_secured) {
    if (!ns.csa) return {};
    return positive_part(mtm_for_secured);
}

/// Notional of `ccds` at the reference entity's default: the positive part of
/// the reference swap MtM. A matured reference swap gives zero.
inline Money ccds_notional(const Ccds& ccds, const BasisSwap& reference_swap, const MarketState& market,
                           double default_time) {
    if (reference_swap.id != ccds.reference_swap) {
        throw StructureError("ccds " + ccds.id + " references " + ccds.reference_swap + ", got " + reference_swap.id);
    }
    if (const auto mat = reference_swap.maturity(); mat && default_time >= *mat) return {};
    return positive_part(swap_mtm(reference_swap, market, default_time, ccds.reference_perspective).value);
}

/// Payoff of `ccds` to `party` when `defaulted` defaults: +notional to the
/// buyer, -notional to the seller, nothing unless the reference entity defaulted.
inline Money ccds_payoff(const Ccds& ccds, const BasisSwap& reference_swap, const MarketState& market,
                         double default_time, PartyId defaulted, PartyId party) {
    if (party != ccds.protection_buyer && party != ccds.protection_seller) {
        throw std::invalid_argument("party " + std::string(to_string(party)) + " is not a party to ccds " + ccds.id);
    }
    if (defaulted != ccds.reference_entity) return {};
    const Money n = ccds_notional(ccds, reference_swap, market, default_time);
    return party == ccds.protection_buyer ? n : -n;
}

}  // namespace ccds
