#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ccds/errors.hpp"
#include "ccds/money.hpp"
#include "ccds/parallel.hpp"
#include "ccds/philox.hpp"

namespace ccds {

enum class ValuationMode { Curve, DirectMtm };

/// Market state at one instant. In DirectMtm mode the Back Swap MtM seen by the
/// Originator is the state variable; in Curve mode swaps are valued off a flat
/// continuously compounded discount rate.
class MarketState {
public:
    static MarketState curve(double flat_discount_rate) { return MarketState(ValuationMode::Curve, flat_discount_rate, {}); }

    static MarketState direct(double flat_discount_rate, Money back_swap_mtm_for_originator) {
        return MarketState(ValuationMode::DirectMtm, flat_discount_rate, back_swap_mtm_for_originator);
    }

    ValuationMode mode() const { return mode_; }
    double flat_discount_rate() const { return rate_; }
    const std::optional<Money>& back_swap_mtm_for_originator() const { return mtm_; }

    friend bool operator==(const MarketState&, const MarketState&) = default;

private:
    MarketState(ValuationMode mode, double rate, std::optional<Money> mtm) : mode_(mode), rate_(rate), mtm_(mtm) {
        if (!std::isfinite(rate)) throw ValidationError("discount_rate", "must be finite");
    }

    ValuationMode mode_;
    double rate_;
    std::optional<Money> mtm_;
};

inline double discount_factor(double rate, double t) {
    if (!(t >= 0.0)) throw std::domain_error("discount_factor: negative time " + std::to_string(t));
    return std::exp(-rate * t);
}

/// Constant-intensity default of the Counterparty with a fixed loss fraction.
struct DefaultModel {
    double hazard_rate = 0.0;
    double lgd = 0.0;

    void validate() const {
        if (!(hazard_rate >= 0.0) || !std::isfinite(hazard_rate)) {
            throw ValidationError("hazard_rate", "must be finite and >= 0");
        }
        if (!(lgd >= 0.0 && lgd <= 1.0)) throw ValidationError("lgd", "must lie in [0, 1]");
    }

    double survival_probability(double horizon) const { return std::exp(-hazard_rate * horizon); }

    friend bool operator==(const DefaultModel&, const DefaultModel&) = default;
};

/// Default time of C (absent = survives the horizon) and the market seen at it.
struct DefaultScenario {
    std::optional<double> tau;
    MarketState market_at_tau = MarketState::curve(0.0);
    double discount_to_tau = 1.0;

    static DefaultScenario no_default(const MarketState& market) { return {std::nullopt, market, 1.0}; }

    static DefaultScenario at(double tau, const MarketState& market) {
        if (!(tau >= 0.0) || !std::isfinite(tau)) throw ValidationError("tau", "must be finite and >= 0");
        return {tau, market, discount_factor(market.flat_discount_rate(), tau)};
    }

    bool defaulted() const { return tau.has_value(); }

    friend bool operator==(const DefaultScenario&, const DefaultScenario&) = default;
};

/// Strictly increasing simulation times starting at 0.
class TimeGrid {
public:
    TimeGrid() = default;

    explicit TimeGrid(std::vector<double> times) : times_(std::move(times)) {
        if (times_.empty()) throw ValidationError("grid", "empty time grid");
        if (times_.front() != 0.0) throw ValidationError("grid", "must start at 0");
        for (std::size_t i = 1; i < times_.size(); ++i) {
            if (!(times_[i] > times_[i - 1]) || !std::isfinite(times_[i])) {
                throw ValidationError("grid", "times must be finite and strictly increasing");
            }
        }
    }

    static TimeGrid uniform(double horizon, double dt) {
        if (!(horizon > 0.0) || !(dt > 0.0)) throw ValidationError("grid", "horizon and dt must be positive");
        const auto steps = static_cast<std::size_t>(std::llround(horizon / dt));
        if (steps == 0 || std::fabs(static_cast<double>(steps) * dt - horizon) > 1e-9 * horizon) {
            throw ValidationError("grid", "horizon must be a whole number of dt steps");
        }
        std::vector<double> times(steps + 1);
        for (std::size_t k = 0; k <= steps; ++k) {
            times[k] = horizon * static_cast<double>(k) / static_cast<double>(steps);
        }
        return TimeGrid(std::move(times));
    }

    const std::vector<double>& times() const { return times_; }
    std::size_t size() const { return times_.size(); }
    double operator[](std::size_t k) const { return times_[k]; }
    double horizon() const { return times_.back(); }

    /// Index of the first grid time >= t; t must lie in [0, horizon].
    std::size_t bucket_of(double t) const {
        std::size_t lo = 0, hi = times_.size() - 1;
        if (t <= times_[0]) return 0;
        while (lo + 1 < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (times_[mid] >= t) hi = mid;
            else lo = mid;
        }
        return hi;
    }

    friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

private:
    std::vector<double> times_;
};

/// One simulated path of the Back Swap MtM seen by the Originator (major units).
struct MtmPath {
    std::vector<double> values;
    std::uint64_t path_index = 0;
    std::uint64_t seed = 0;

    friend bool operator==(const MtmPath&, const MtmPath&) = default;
};

/// Paths sharing one time grid.
struct PathSet {
    TimeGrid grid;
    std::vector<MtmPath> paths;

    friend bool operator==(const PathSet&, const PathSet&) = default;
};

struct PathConfig {
    double initial_mtm = 0.0;
    double volatility = 0.0;  // money per sqrt(year)
    double drift = 0.0;       // money per year
    TimeGrid grid;
    std::size_t n_paths = 1;
    std::uint64_t seed = 0;
    unsigned threads = 1;
};

/// Arithmetic Brownian motion for the Back Swap MtM. Draw k of path p comes
/// from the counter (seed, p, k), so results do not depend on `threads`.
inline PathSet simulate_mtm_paths(const PathConfig& cfg) {
    if (cfg.grid.size() == 0) throw ValidationError("grid", "empty time grid");
    if (cfg.n_paths < 1) throw ValidationError("n_paths", "must be >= 1");
    if (!(cfg.volatility >= 0.0)) throw ValidationError("volatility", "must be >= 0");
    if (!std::isfinite(cfg.initial_mtm) || !std::isfinite(cfg.drift) || !std::isfinite(cfg.volatility)) {
        throw ValidationError("mc", "path parameters must be finite");
    }

    const auto& t = cfg.grid.times();
    std::vector<double> dt(t.size(), 0.0), sqrt_dt(t.size(), 0.0);
    for (std::size_t k = 1; k < t.size(); ++k) {
        dt[k] = t[k] - t[k - 1];
        sqrt_dt[k] = std::sqrt(dt[k]);
    }

    PathSet out{cfg.grid, std::vector<MtmPath>(cfg.n_paths)};
    detail::parallel_for(cfg.n_paths, cfg.threads, [&](std::size_t p) {
        MtmPath& path = out.paths[p];
        path.path_index = p;
        path.seed = cfg.seed;
        path.values.resize(t.size());
        path.values[0] = cfg.initial_mtm;
        for (std::size_t k = 1; k < t.size(); ++k) {
            const double z = cfg.volatility == 0.0 ? 0.0 : standard_normal(cfg.seed, p, static_cast<std::uint32_t>(k));
            path.values[k] = path.values[k - 1] + cfg.drift * dt[k] + cfg.volatility * sqrt_dt[k] * z;
        }
    });
    return out;
}

/// Maps a uniform u in (0, 1] to a default time; u = 1 gives tau = 0.
inline std::optional<double> default_time_from_uniform(const DefaultModel& model, double horizon, double u) {
    if (model.hazard_rate == 0.0) return std::nullopt;
    const double tau = -std::log(u) / model.hazard_rate;
    if (tau > horizon) return std::nullopt;
    return tau == 0.0 ? 0.0 : tau;  // normalise -0.0
}

/// Default time of C on path `path_index`, independent of the MtM draws.
inline std::optional<double> simulate_default_time(const DefaultModel& model, double horizon, std::uint64_t seed,
                                                   std::uint64_t path_index) {
    if (!(horizon > 0.0)) throw ValidationError("horizon", "must be > 0");
    model.validate();
    if (model.hazard_rate == 0.0) return std::nullopt;
    const double u = uniform_pair(seed, path_index, 0, DrawStream::DefaultTime).open_closed;
    return default_time_from_uniform(model, horizon, u);
}

}  // namespace ccds
