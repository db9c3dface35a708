#pragma once

// Brute-force CVA reference for the baseline structure, used only by tests.
//
// The Back Swap MtM is an arithmetic Brownian motion, approximated here by a
// recombining trinomial lattice (up/down jumps of sigma*sqrt(3*dt) with
// probability 1/6 each, matching the first four moments of the Gaussian
// increment). Default is integrated exactly over each grid interval; a default
// in (t_{k-1}, t_k] is charged the lattice value of max(X(t_k), 0), discounted
// from the default time. Nothing here shares code with the Monte Carlo engine.

#include <cmath>
#include <cstddef>
#include <vector>

namespace ccds::oracle {

struct AbmLattice {
    double initial = 0.0;
    double drift = 0.0;
    double volatility = 0.0;
    double horizon = 10.0;
    std::size_t grid_steps = 40;      // observation dates
    std::size_t substeps = 64;        // lattice steps per observation interval
};

/// E[max(X(t_k), 0)] for k = 0..grid_steps on the lattice.
inline std::vector<double> expected_positive_part(const AbmLattice& a) {
    const double dt_grid = a.horizon / static_cast<double>(a.grid_steps);
    const double dt = dt_grid / static_cast<double>(a.substeps);
    const double h = a.volatility * std::sqrt(3.0 * dt);
    const std::size_t total = a.grid_steps * a.substeps;

    std::vector<double> prob(2 * total + 1, 0.0), next(prob.size());
    const std::size_t centre = total;
    prob[centre] = 1.0;

    std::vector<double> out(a.grid_steps + 1);
    out[0] = std::max(a.initial, 0.0);
    for (std::size_t step = 1; step <= total; ++step) {
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t j = centre - (step - 1); j <= centre + (step - 1); ++j) {
            const double p = prob[j];
            if (p == 0.0) continue;
            next[j - 1] += p / 6.0;
            next[j] += p * 2.0 / 3.0;
            next[j + 1] += p / 6.0;
        }
        prob.swap(next);
        if (step % a.substeps == 0) {
            const double t = dt * static_cast<double>(step);
            const double mean = a.initial + a.drift * t;
            double e = 0.0;
            for (std::size_t j = centre - step; j <= centre + step; ++j) {
                const double x = mean + (static_cast<double>(j) - static_cast<double>(centre)) * h;
                if (x > 0.0) e += prob[j] * x;
            }
            out[step / a.substeps] = e;
        }
    }
    return out;
}

/// Probability-weighted discount for a default in (t0, t1]:
/// integral of hazard * exp(-(hazard + rate) s) ds.
inline double discounted_default_weight(double hazard, double rate, double t0, double t1) {
    const double k = hazard + rate;
    if (k == 0.0) return 0.0;
    return hazard / k * (std::exp(-k * t0) - std::exp(-k * t1));
}

inline double baseline_cva(const AbmLattice& a, double hazard, double rate, double lgd) {
    const auto epe = expected_positive_part(a);
    const double dt_grid = a.horizon / static_cast<double>(a.grid_steps);
    double cva = 0.0;
    for (std::size_t k = 1; k <= a.grid_steps; ++k) {
        const double t0 = dt_grid * static_cast<double>(k - 1);
        const double t1 = dt_grid * static_cast<double>(k);
        cva += discounted_default_weight(hazard, rate, t0, t1) * epe[k];
    }
    return lgd * cva;
}

}  // namespace ccds::oracle
