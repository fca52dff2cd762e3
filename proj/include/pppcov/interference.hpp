#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "pppcov/fading.hpp"
#include "pppcov/rng.hpp"

namespace pppcov::interference {

// Interfering-link fading power distribution. Implementations are immutable
// after construction and safe to share across threads.
class FadingModel {
public:
    virtual ~FadingModel() = default;

    // Canonical name, round-trippable through parse_fading_model().
    virtual std::string name() const = 0;

    // Documented mean of the power distribution.
    virtual double mean() const = 0;

    // One power draw.
    virtual double sample(Rng& rng) const = 0;

    // E[g(H)] to absolute tolerance tol, with an order-refinement check.
    double expect(const std::function<double(double)>& g, double tol) const;

    // E[exp(-u H)] for u >= 0.
    virtual double laplace(double u) const;

    // 1 - E[exp(-u H)]; overridden where a cancellation-free form exists.
    virtual double laplace_complement(double u) const;

    // E[H^c * lower_incomplete_gamma(a, s*H)] for 0 < c < 1, a > 0, s > 0:
    // the kernel of the higher-order interference expectations. The default
    // routes through expect(); Gamma-structured models override it with a
    // closed form, because once s*H saturates the incomplete gamma the
    // integrand behaves like H^c near the origin and no fixed quadrature
    // order can refine through that kink.
    virtual double incgamma_expectation(double c, double a, double s,
                                        double tol) const;

protected:
    // Fixed-order quadrature evaluation of E[g(H)]; expect() drives the
    // refinement ladder on top of this.
    virtual double expect_at_order(const std::function<double(double)>& g,
                                   int order) const = 0;
};

// Unit-mean exponential power (Rayleigh amplitude).
class RayleighModel final : public FadingModel {
public:
    std::string name() const override { return "rayleigh"; }
    double mean() const override { return 1.0; }
    double sample(Rng& rng) const override { return rng.exponential(); }
    double laplace(double u) const override;
    double laplace_complement(double u) const override;
    double incgamma_expectation(double c, double a, double s,
                                double tol) const override;

protected:
    double expect_at_order(const std::function<double(double)>& g,
                           int order) const override;
};

// Unit-mean Gamma power with integer shape m.
class NakagamiModel final : public FadingModel {
public:
    explicit NakagamiModel(int m);
    std::string name() const override;
    double mean() const override { return 1.0; }
    double sample(Rng& rng) const override {
        return rng.gamma_integer(m_) / m_;
    }
    double laplace(double u) const override;
    double incgamma_expectation(double c, double a, double s,
                                double tol) const override;

protected:
    double expect_at_order(const std::function<double(double)>& g,
                           int order) const override;

private:
    int m_;
};

// Median-1 lognormal power, SD sigma_db in dB (mean exp(sigma_tilde^2/2)).
class LognormalModel final : public FadingModel {
public:
    explicit LognormalModel(double sigma_db);
    std::string name() const override;
    double mean() const override;
    double sample(Rng& rng) const override;
    double laplace(double u) const override;
    double incgamma_expectation(double c, double a, double s,
                                double tol) const override;
    double sigma_tilde() const { return sigma_tilde_; }

protected:
    double expect_at_order(const std::function<double(double)>& g,
                           int order) const override;

private:
    double sigma_db_;
    double sigma_tilde_;
    std::vector<double> a_lo_, b_lo_; // order-64 scale nodes
    std::vector<double> a_hi_, b_hi_; // order-128 refinement
};

// Product of an independent unit-mean exponential and a median-1 lognormal.
class RayleighLognormalModel final : public FadingModel {
public:
    explicit RayleighLognormalModel(double sigma_db);
    std::string name() const override;
    double mean() const override;
    double sample(Rng& rng) const override;
    double laplace(double u) const override;
    double laplace_complement(double u) const override;
    double incgamma_expectation(double c, double a, double s,
                                double tol) const override;

protected:
    double expect_at_order(const std::function<double(double)>& g,
                           int order) const override;

private:
    double sigma_db_;
    double sigma_tilde_;
    std::vector<double> a_lo_, b_lo_;
    std::vector<double> a_hi_, b_hi_;
};

// Kappa-mu shadowed interferer power, reusing the Gamma mixture.
class KappaMuShadowedModel final : public FadingModel {
public:
    explicit KappaMuShadowedModel(const fading::KappaMuShadowedParams& params);
    std::string name() const override;
    double mean() const override { return 1.0; }
    double sample(Rng& rng) const override {
        return fading::sample_kms(params_, rng);
    }
    double laplace(double u) const override;
    double incgamma_expectation(double c, double a, double s,
                                double tol) const override;

protected:
    double expect_at_order(const std::function<double(double)>& g,
                           int order) const override;

private:
    fading::KappaMuShadowedParams params_;
    fading::GammaMixture mix_;
};

// Parses the model grammar:
//   rayleigh
//   nakagami:m=<int>
//   lognormal:sigma_db=<real>
//   rayleigh*lognormal:sigma_db=<real>
//   kms:kappa=<real>,mu=<int>,m=<int>
// Throws std::invalid_argument on malformed input.
std::shared_ptr<const FadingModel> parse_fading_model(const std::string& text);

// Desired-link grammar: kms:kappa=<real>,mu=<int>,m=<int>[,sigma_db=<real>]
// (sigma_db defaults to 0, the pure kappa-mu shadowed case).
fading::DoubleShadowedParams parse_desired_model(const std::string& text);

// E[ integral_a^inf (1 - exp(-h t^(-alpha/2))) dt ] over the model's power
// distribution: the zeroth interference expectation. Requires a > 0,
// alpha > 2.
double e_h0(const FadingModel& model, double a, double alpha, double tol);

// E[ h^(2/alpha) * lower_incomplete_gamma(q - 2/alpha, s*h) ], q >= 1.
double e_hq(const FadingModel& model, int q, double s, double alpha,
            double tol);

} // namespace pppcov::interference
