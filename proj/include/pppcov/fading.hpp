#pragma once

#include <vector>

#include "pppcov/rng.hpp"

namespace pppcov::fading {

// Parameters of the kappa-mu shadowed power distribution with integer
// fading parameters: kappa is the dominant-to-scattered power ratio,
// mu the number of multipath clusters, m the shadowing severity of the
// dominant component.
struct KappaMuShadowedParams {
    double kappa = 1.0;
    int mu = 1;
    int m = 1;

    void validate() const;

    double omega1() const { return m / (kappa * mu + m); }
    double omega2() const { return kappa * mu / (kappa * mu + m); }
    double omega3() const { return 1.0 / (mu * (kappa + 1.0)); }
};

struct GammaComponent {
    double weight;  // C_i, may be negative when mu > m
    int shape;      // m_i >= 1
    double scale;   // Omega_i > 0
};

// Finite signed mixture of Gamma densities representing the kappa-mu
// shadowed power distribution. Satisfies sum(C_i) = 1 and
// sum(C_i * m_i * Omega_i) = 1 (unit mean power).
struct GammaMixture {
    std::vector<GammaComponent> components;
};

// Lognormal-times-kappa-mu-shadowed ("double shadowed") parameters.
// sigma_s_db is the lognormal SD in dB; sigma_s_db = 0 degenerates the
// lognormal factor to the constant 1.
struct DoubleShadowedParams {
    KappaMuShadowedParams base;
    double sigma_s_db = 0.0;

    void validate() const;
    double sigma_tilde() const {
        return sigma_s_db * 2.3025850929940456840179914546844 / 10.0;
    }
};

struct GhqTerm {
    double a; // normalized weight, sums to 1 over the rule
    double b; // exp(sqrt(2) * sigma_tilde * t_l) > 0
};

// Weighted-mixture representation of the double shadowed distribution:
// a finite sum of rescaled copies of the base Gamma mixture, one term per
// Gauss-Hermite node.
struct GhqMixture {
    std::vector<GhqTerm> terms;
    GammaMixture base;
    int ghq_order = 0;
};

// Coefficient construction with the mu>m / mu<=m branching. Rejects
// kappa = 0 together with mu > m (the omega2 powers diverge there).
GammaMixture build_gamma_mixture(const KappaMuShadowedParams& params);

// Mixture PDF at h >= 0. Signed components are summed with compensation;
// sub-rounding negatives clamp to 0, larger ones raise ConsistencyError.
double kms_pdf(const GammaMixture& mix, double h);

// Mixture CCDF at h >= 0, clamped to [0, 1].
double kms_ccdf(const GammaMixture& mix, double h);

// Exact double shadowed PDF (lognormal smoothing integral evaluated by
// adaptive quadrature per mixture component) at h > 0; requires
// sigma_s_db > 0. tol is the absolute error target.
double double_shadowed_pdf_exact(const DoubleShadowedParams& params, double h,
                                 double tol);

GhqMixture build_ghq_mixture(const DoubleShadowedParams& params, int ghq_order);

// Quadrature mixture PDF: sum_l (a_l / b_l) * kms_pdf(base, h / b_l).
// The 1/b_l factor is the scale-density Jacobian; without it the mixture
// does not integrate to 1.
double double_shadowed_pdf_ghq(const GhqMixture& mix, double h);

// Quadrature mixture CCDF: sum_l a_l * kms_ccdf(base, h / b_l).
double double_shadowed_ccdf(const GhqMixture& mix, double h);

// One draw of the kappa-mu shadowed power via the physical cluster model:
// a Nakagami-m distributed dominant amplitude spread over 2*mu Gaussian
// dimensions plus scattered power 1/(1+kappa). Unit mean.
double sample_kms(const KappaMuShadowedParams& params, Rng& rng);

// sample_kms times an independent median-1 lognormal factor exp(sigma_tilde * Z).
double sample_double_shadowed(const DoubleShadowedParams& params, Rng& rng);

} // namespace pppcov::fading
