#pragma once

#include <functional>
#include <vector>

#include "pppcov/errors.hpp"

namespace pppcov::mathkit {

// Nodes and weights of a Gaussian quadrature rule. Nodes are strictly
// increasing, weights strictly positive, both of length `order`.
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    int order = 0;
};

// Gauss-Hermite rule for the weight exp(-t^2) on (-inf, inf).
// order in [1, 128]. Sum of weights equals sqrt(pi).
QuadratureRule gauss_hermite_rule(int order);

// Gauss-Laguerre rule for the weight exp(-x) on [0, inf).
// order in [1, 128]. Sum of weights equals 1.
QuadratureRule gauss_laguerre_rule(int order);

// Gamma function, x > 0.
double gamma_fn(double x);

// Lower incomplete gamma  gamma(a, x) = int_0^x t^(a-1) e^(-t) dt,
// a > 0, x >= 0. Series for x < a+1, continued fraction otherwise.
double lower_incomplete_gamma(double a, double x);

// Binomial coefficient as a double; 0 when k < 0 or k > n. Computed in
// 64-bit integer arithmetic, exact for n <= 60.
double binomial(int n, int k);

// Adaptive Gauss-Kronrod (G7-K15) integral of f over [a, b] to absolute
// tolerance tol. Throws ConvergenceError when the evaluation budget is
// exhausted first.
double integrate_finite(const std::function<double(double)>& f, double a,
                        double b, double tol);

// Adaptive integral of f over [lower, inf), absolute tolerance tol.
// Uses the rational map t = lower + u/(1-u) onto [0, 1) followed by the
// same Gauss-Kronrod refinement as integrate_finite.
double integrate_semi_infinite(const std::function<double(double)>& f,
                               double lower, double tol);

// Compensated (Kahan) accumulator for signed sums with cancellation.
class KahanSum {
public:
    void add(double x) {
        const double y = x - comp_;
        const double t = sum_ + y;
        comp_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const { return sum_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

} // namespace pppcov::mathkit
