#pragma once

#include <cstdint>
#include <vector>

#include "pppcov/coverage.hpp"
#include "pppcov/rng.hpp"

namespace pppcov::simulator {

struct SimConfig {
    long long realizations = 100000;
    double window_radius_factor = 15.0; // disk radius = factor/sqrt(pi*lambda)
    std::uint64_t seed = 1;
    int workers = 0; // 0 = one per hardware thread

    void validate() const;
};

struct CoverageEstimate {
    double p_hat = 0.0;
    double half_width_95 = 0.0; // normal-approximation 95% CI half-width
    long long realizations_used = 0;
};

// One SIR realization: Poisson number of base stations in the window disk,
// nearest one serving, double shadowed desired gain, i.i.d. interferer
// gains. Returns +infinity when the window holds a single station.
double sample_sir(const coverage::NetworkConfig& net,
                  const coverage::CoverageQuery& q, const SimConfig& sim,
                  Rng& rng);

// Monte Carlo estimate of P(SIR > theta). Deterministic for a fixed seed
// independent of worker count: realizations are processed in fixed blocks,
// each on its own RNG substream.
CoverageEstimate simulate_coverage(const coverage::NetworkConfig& net,
                                   const coverage::CoverageQuery& q,
                                   const SimConfig& sim);

namespace detail {

// Radii of one point-process draw inside a disk window: Poisson count with
// the given mean, each radius window_radius*sqrt(U). Empty draws are
// redrawn, so the result is nonempty.
void draw_radii(double window_radius, double mean_count, Rng& rng,
                std::vector<double>& radii);

// SIR for fixed radii and explicit fading gains: the nearest point serves
// with desired_gain, interferer_gains apply to the remaining points in
// radii order. Returns +infinity when there is no interferer.
double sir_from_draws(const std::vector<double>& radii, double desired_gain,
                      const std::vector<double>& interferer_gains,
                      double alpha);

} // namespace detail

} // namespace pppcov::simulator
