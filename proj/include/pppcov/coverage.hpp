#pragma once

#include <memory>

#include "pppcov/fading.hpp"
#include "pppcov/interference.hpp"

namespace pppcov::coverage {

// Poisson network parameters. density and tx_power are carried for the
// simulator's benefit; the analytic coverage probability is independent of
// both (they cancel out of the SIR).
struct NetworkConfig {
    double density = 1e-7;
    double path_loss_exponent = 4.0;
    double tx_power = 1.0;

    void validate() const;
};

struct CoverageQuery {
    double theta = 1.0; // linear SIR threshold
    fading::DoubleShadowedParams desired;
    std::shared_ptr<const interference::FadingModel> interferer;
    int ghq_order = 32;

    void validate() const;
};

// Closed-form downlink coverage probability: the quadruple sum over mixture
// components, CCDF series terms, quadrature nodes, and integer partitions.
// Clamped to [0,1]; pre-clamp excursions beyond 1e-6 raise ConsistencyError.
double coverage_closed_form(const NetworkConfig& net, const CoverageQuery& q);

// Slower cross-check: the same quantity with the final Gamma integral left
// as a numerical radial integral. Agrees with the closed form to
// max(tol, 1e-8).
double coverage_radial_integral(const NetworkConfig& net,
                                const CoverageQuery& q, double tol);

} // namespace pppcov::coverage
