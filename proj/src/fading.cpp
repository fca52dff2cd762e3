#include "pppcov/fading.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "pppcov/errors.hpp"
#include "pppcov/mathkit.hpp"

namespace pppcov::fading {

void KappaMuShadowedParams::validate() const {
    if (!(kappa >= 0.0) || !std::isfinite(kappa))
        throw std::domain_error("kappa must be finite and >= 0");
    if (mu < 1) throw std::domain_error("mu must be a positive integer");
    if (m < 1) throw std::domain_error("m must be a positive integer");
    if (kappa == 0.0 && mu > m)
        throw std::domain_error(
            "kappa = 0 with mu > m is outside the mixture's domain; "
            "use kappa > 0 or mu <= m");
}

void DoubleShadowedParams::validate() const {
    base.validate();
    if (!(sigma_s_db >= 0.0) || !std::isfinite(sigma_s_db))
        throw std::domain_error("sigma_s_db must be finite and >= 0");
}

GammaMixture build_gamma_mixture(const KappaMuShadowedParams& params) {
    params.validate();
    const double w1 = params.omega1();
    const double w2 = params.omega2();
    const double w3 = params.omega3();
    const int mu = params.mu;
    const int m = params.m;

    GammaMixture mix;
    if (mu > m) {
        mix.components.reserve(static_cast<size_t>(mu));
        // i = 1 .. mu-m: shapes mu-m-i+1, scale w3
        for (int i = 1; i <= mu - m; ++i) {
            GammaComponent c;
            c.shape = mu - m - i + 1;
            c.scale = w3;
            double coef = mathkit::binomial(m + i - 2, i - 1);
            c.weight = coef * std::pow(-w1, m) * std::pow(w2, 1.0 - m - i);
            mix.components.push_back(c);
        }
        // i = mu-m+1 .. mu: shapes mu-i+1, scale w3/w1
        for (int i = mu - m + 1; i <= mu; ++i) {
            GammaComponent c;
            c.shape = mu - i + 1;
            c.scale = w3 / w1;
            double coef = mathkit::binomial(i - 2, i - mu + m - 1);
            c.weight = coef * std::pow(-w1, i - mu + m - 1) *
                       std::pow(w2, 1.0 - i);
            mix.components.push_back(c);
        }
    } else {
        mix.components.reserve(static_cast<size_t>(m - mu + 1));
        // i = 0 .. m-mu: shapes m-i, scale w3/w1
        for (int i = 0; i <= m - mu; ++i) {
            GammaComponent c;
            c.shape = m - i;
            c.scale = w3 / w1;
            c.weight = mathkit::binomial(m - mu, i) * std::pow(w1, i) *
                       std::pow(w2, m - mu - i);
            mix.components.push_back(c);
        }
    }

    // The weights must sum to 1; catastrophic cancellation in extreme
    // parameter corners would show up here.
    mathkit::KahanSum sum;
    double abs_sum = 0.0;
    for (const auto& c : mix.components) {
        sum.add(c.weight);
        abs_sum += std::fabs(c.weight);
    }
    const double defect = std::fabs(sum.value() - 1.0);
    if (defect > 1e-9 * std::max(1.0, abs_sum))
        throw ConsistencyError(
            "gamma mixture weights sum to " + std::to_string(sum.value()) +
            " instead of 1 (cancellation too severe for these parameters)");
    return mix;
}

namespace {

// Gamma(shape, scale) pdf at h for integer shape, computed in log space
// to survive large shapes and small scales.
double gamma_pdf(int shape, double scale, double h) {
    if (h < 0.0) return 0.0;
    if (h == 0.0) return shape == 1 ? 1.0 / scale : 0.0;
    double lg = (shape - 1) * std::log(h) - h / scale -
                shape * std::log(scale) - std::lgamma(double(shape));
    return std::exp(lg);
}

// Regularized upper gamma Q(shape, h/scale) for integer shape via the
// finite Poisson sum: Q(k, x) = e^-x * sum_{j<k} x^j / j!.
double gamma_ccdf(int shape, double scale, double h) {
    if (h <= 0.0) return 1.0;
    const double x = h / scale;
    double term = std::exp(-x);
    if (term == 0.0) {
        // Recompute in log space; the largest term dominates.
        double lmax = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < shape; ++j) {
            double lt = -x + j * std::log(x) - std::lgamma(double(j) + 1.0);
            lmax = std::max(lmax, lt);
        }
        if (lmax < -745.0) return 0.0;
        double s = 0.0;
        for (int j = 0; j < shape; ++j) {
            double lt = -x + j * std::log(x) - std::lgamma(double(j) + 1.0);
            s += std::exp(lt - lmax);
        }
        return std::exp(lmax) * s;
    }
    double sum = term;
    for (int j = 1; j < shape; ++j) {
        term *= x / j;
        sum += term;
    }
    return std::min(sum, 1.0);
}

double signed_mixture(const GammaMixture& mix, double h,
                      double (*part)(int, double, double)) {
    mathkit::KahanSum acc;
    double max_abs = 0.0;
    for (const auto& c : mix.components) {
        double t = c.weight * part(c.shape, c.scale, h);
        acc.add(t);
        max_abs = std::max(max_abs, std::fabs(t));
    }
    double v = acc.value();
    if (v < 0.0) {
        if (-v <= 1e-12 * std::max(1.0, max_abs)) return 0.0;
        throw ConsistencyError(
            "signed gamma mixture produced a negative value (" +
            std::to_string(v) + ") beyond rounding tolerance");
    }
    return v;
}

} // namespace

double kms_pdf(const GammaMixture& mix, double h) {
    if (h < 0.0) throw std::domain_error("kms_pdf requires h >= 0");
    return signed_mixture(mix, h, &gamma_pdf);
}

double kms_ccdf(const GammaMixture& mix, double h) {
    if (h < 0.0) throw std::domain_error("kms_ccdf requires h >= 0");
    if (h == 0.0) return 1.0;
    return std::min(signed_mixture(mix, h, &gamma_ccdf), 1.0);
}

double double_shadowed_pdf_exact(const DoubleShadowedParams& params, double h,
                                 double tol) {
    params.validate();
    if (!(params.sigma_s_db > 0.0))
        throw std::domain_error(
            "exact double shadowed pdf requires sigma_s_db > 0");
    if (!(h > 0.0)) return 0.0;
    const double st = params.sigma_tilde();
    const GammaMixture mix = build_gamma_mixture(params.base);

    // For each Gamma component, integrate over the lognormal scale factor
    // in log space: with u = ln(h_s) the integrand is
    //   gamma_pdf(shape, scale, h * e^-u) * e^-u * N(u; 0, st),
    // whose log-derivative is strictly decreasing in u, so the peak is
    // found by bisection and the mass is confined to a window around it
    // plus tail pieces that die off within a few widths.
    mathkit::KahanSum total;
    for (const auto& c : mix.components) {
        const int k = c.shape;
        const double om = c.scale;
        // log integrand (up to constants):
        //   L(u) = -k*u + (k-1)*ln h - (h/om) e^-u - u^2/(2 st^2)
        // L'(u) = -k + (h/om) e^-u - u/st^2, strictly decreasing in u.
        auto dL = [&](double u) {
            return -double(k) + (h / om) * std::exp(-u) - u / (st * st);
        };
        double lo = -1.0, hi = 1.0;
        while (dL(lo) < 0.0) lo -= std::max(1.0, st);
        while (dL(hi) > 0.0) hi += std::max(1.0, st);
        for (int it = 0; it < 200 && hi - lo > 1e-12 * (1.0 + std::fabs(lo));
             ++it) {
            double mid = 0.5 * (lo + hi);
            (dL(mid) > 0.0 ? lo : hi) = mid;
        }
        const double ustar = 0.5 * (lo + hi);
        // Local curvature sets the Laplace width; the lognormal prior adds
        // the 1/st^2 term.
        const double curv = (h / om) * std::exp(-ustar) + 1.0 / (st * st);
        const double sd = 1.0 / std::sqrt(curv);
        const double w = 10.0 * st + 8.0 * sd + 2.0;

        auto f = [&](double u) {
            double val = gamma_pdf(k, om, h * std::exp(-u)) * std::exp(-u);
            double prior = std::exp(-0.5 * u * u / (st * st)) /
                           (st * std::sqrt(2.0 * 3.14159265358979323846));
            return val * prior;
        };
        double piece = mathkit::integrate_finite(f, ustar - w, ustar + w,
                                                 tol / 3.0);
        piece += mathkit::integrate_semi_infinite(f, ustar + w, tol / 3.0);
        piece += mathkit::integrate_semi_infinite(
            [&](double u) { return f(2.0 * ustar - u); }, ustar + w,
            tol / 3.0);
        total.add(c.weight * piece);
    }
    return std::max(total.value(), 0.0);
}

GhqMixture build_ghq_mixture(const DoubleShadowedParams& params,
                             int ghq_order) {
    params.validate();
    GhqMixture mix;
    mix.base = build_gamma_mixture(params.base);
    mix.ghq_order = ghq_order;
    if (params.sigma_s_db == 0.0) {
        mix.terms.push_back({1.0, 1.0});
        return mix;
    }
    const double st = params.sigma_tilde();
    const auto rule = mathkit::gauss_hermite_rule(ghq_order);
    double wsum = 0.0;
    for (double w : rule.weights) wsum += w;
    mix.terms.reserve(rule.nodes.size());
    for (size_t i = 0; i < rule.nodes.size(); ++i) {
        GhqTerm t;
        t.a = rule.weights[i] / wsum;
        t.b = std::exp(std::sqrt(2.0) * st * rule.nodes[i]);
        mix.terms.push_back(t);
    }
    return mix;
}

double double_shadowed_pdf_ghq(const GhqMixture& mix, double h) {
    if (h < 0.0)
        throw std::domain_error("double_shadowed_pdf_ghq requires h >= 0");
    mathkit::KahanSum acc;
    for (const auto& t : mix.terms)
        acc.add(t.a / t.b * kms_pdf(mix.base, h / t.b));
    return std::max(acc.value(), 0.0);
}

double double_shadowed_ccdf(const GhqMixture& mix, double h) {
    if (h < 0.0)
        throw std::domain_error("double_shadowed_ccdf requires h >= 0");
    if (h == 0.0) return 1.0;
    mathkit::KahanSum acc;
    for (const auto& t : mix.terms)
        acc.add(t.a * kms_ccdf(mix.base, h / t.b));
    return std::clamp(acc.value(), 0.0, 1.0);
}

double sample_kms(const KappaMuShadowedParams& params, Rng& rng) {
    const double kappa = params.kappa;
    const int mu = params.mu;
    const int m = params.m;
    // Dominant power xi^2 ~ Gamma(m, 1/m) (unit mean), split evenly across
    // the 2*mu in-phase/quadrature dimensions.
    const double xi2 = rng.gamma_integer(m) / m;
    const double d2 = kappa / (1.0 + kappa);            // total dominant power
    const double mean = std::sqrt(xi2 * d2 / (2.0 * mu)); // per-dimension mean
    const double sd = std::sqrt(1.0 / (2.0 * mu * (1.0 + kappa)));
    double power = 0.0;
    for (int i = 0; i < 2 * mu; ++i) {
        double x = mean + sd * rng.normal();
        power += x * x;
    }
    return power;
}

double sample_double_shadowed(const DoubleShadowedParams& params, Rng& rng) {
    double h = sample_kms(params.base, rng);
    if (params.sigma_s_db > 0.0)
        h *= std::exp(params.sigma_tilde() * rng.normal());
    return h;
}

} // namespace pppcov::fading
