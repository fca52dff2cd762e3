#include "pppcov/mathkit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace pppcov::mathkit {

namespace {

constexpr int kMaxNewtonIter = 80;
constexpr double kNodeEps = 1e-14;

} // namespace

// Roots by Newton iteration on the orthonormal recurrence, marching inward
// from the largest root with the classical asymptotic initial guesses.
QuadratureRule gauss_hermite_rule(int order) {
    if (order < 1 || order > 128)
        throw std::invalid_argument("gauss_hermite_rule: order must be in [1, 128]");

    const int n = order;
    // descending positive half; mirrored at the end
    std::vector<double> root(n), weight(n);
    const int half = (n + 1) / 2;
    const double pim4 = 0.75112554446494248285870300477623; // pi^(-1/4)

    double z = 0.0;
    for (int i = 0; i < half; ++i) {
        if (i == 0) {
            z = std::sqrt(2.0 * n + 1.0) -
                1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
        } else if (i == 1) {
            z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
        } else if (i == 2) {
            z = 1.86 * z - 0.86 * root[0];
        } else if (i == 3) {
            z = 1.91 * z - 0.91 * root[1];
        } else {
            z = 2.0 * z - root[i - 2];
        }
        if (n % 2 == 1 && i == half - 1) z = 0.0; // odd order has a root at 0

        double pp = 0.0;
        bool converged = false;
        for (int it = 0; it < kMaxNewtonIter; ++it) {
            double p1 = pim4;
            double p2 = 0.0;
            for (int j = 1; j <= n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / j) * p2 -
                     std::sqrt((j - 1.0) / j) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            const double dz = p1 / pp;
            z -= dz;
            if (std::abs(dz) <= kNodeEps * (1.0 + std::abs(z))) {
                converged = true;
                break;
            }
        }
        if (!converged)
            throw ConvergenceError("gauss_hermite_rule: Newton iteration stalled", z, kNodeEps);
        // recompute pp at the converged node for the weight
        {
            double p1 = pim4, p2 = 0.0;
            for (int j = 1; j <= n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / j) * p2 -
                     std::sqrt((j - 1.0) / j) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
        }
        root[i] = z;
        weight[i] = 2.0 / (pp * pp);
        root[n - 1 - i] = -z;
        weight[n - 1 - i] = weight[i];
    }

    QuadratureRule rule;
    rule.order = n;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        rule.nodes[i] = root[n - 1 - i]; // ascending
        rule.weights[i] = weight[n - 1 - i];
    }
    return rule;
}

QuadratureRule gauss_laguerre_rule(int order) {
    if (order < 1 || order > 128)
        throw std::invalid_argument("gauss_laguerre_rule: order must be in [1, 128]");

    const int n = order;
    QuadratureRule rule;
    rule.order = n;
    rule.nodes.resize(n);
    rule.weights.resize(n);

    // The recurrence runs in extended precision: near the largest roots the
    // intermediate polynomial values are huge and the near-root cancellation
    // leaves double-precision Newton steps stuck above the tolerance.
    long double z = 0.0L;
    for (int i = 0; i < n; ++i) {
        if (i == 0) {
            z = 3.0L / (1.0L + 2.4L * n);
        } else if (i == 1) {
            z += 15.0L / (1.0L + 2.5L * n);
        } else {
            const long double ai = i - 1.0L;
            z += (1.0L + 2.55L * ai) / (1.9L * ai) *
                 (z - (long double)rule.nodes[i - 2]);
        }

        long double p1 = 0.0L, p2 = 0.0L, pp = 0.0L;
        bool converged = false;
        for (int it = 0; it < kMaxNewtonIter; ++it) {
            p1 = 1.0L;
            p2 = 0.0L;
            for (int j = 1; j <= n; ++j) {
                const long double p3 = p2;
                p2 = p1;
                p1 = ((2.0L * j - 1.0L - z) * p2 - (j - 1.0L) * p3) / j;
            }
            pp = n * (p1 - p2) / z;
            const long double dz = p1 / pp;
            z -= dz;
            if (std::abs((double)dz) <= kNodeEps * (1.0 + std::abs((double)z))) {
                converged = true;
                break;
            }
        }
        if (!converged)
            throw ConvergenceError("gauss_laguerre_rule: Newton iteration stalled", (double)z, kNodeEps);
        rule.nodes[i] = (double)z;
        rule.weights[i] = (double)(-1.0L / (pp * n * p2));
    }
    return rule;
}

double gamma_fn(double x) {
    if (!(x > 0.0))
        throw std::domain_error("gamma_fn: argument must be positive");
    return std::tgamma(x);
}

namespace {

// series expansion of gamma(a,x)*exp(x-a*ln x), valid for x < a+1
double lig_series(double a, double x) {
    double ap = a;
    double del = 1.0 / a;
    double sum = del;
    for (int i = 0; i < 500; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * std::numeric_limits<double>::epsilon())
            return sum * std::exp(-x + a * std::log(x));
    }
    throw ConvergenceError("lower_incomplete_gamma: series failed to converge",
                           sum * std::exp(-x + a * std::log(x)), 0.0);
}

// Lentz continued fraction for the upper tail Gamma(a,x), valid for x >= a+1
double uig_contfrac(double a, double x) {
    const double fpmin = std::numeric_limits<double>::min() /
                         std::numeric_limits<double>::epsilon();
    double b = x + 1.0 - a;
    double c = 1.0 / fpmin;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < fpmin) d = fpmin;
        c = b + an / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) <= std::numeric_limits<double>::epsilon())
            return std::exp(-x + a * std::log(x)) * h;
    }
    throw ConvergenceError(
        "lower_incomplete_gamma: continued fraction failed to converge",
        std::exp(-x + a * std::log(x)) * h, 0.0);
}

} // namespace

double lower_incomplete_gamma(double a, double x) {
    if (!(a > 0.0))
        throw std::domain_error("lower_incomplete_gamma: a must be positive");
    if (x < 0.0)
        throw std::domain_error("lower_incomplete_gamma: x must be nonnegative");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return lig_series(a, x);
    return gamma_fn(a) - uig_contfrac(a, x);
}

double binomial(int n, int k) {
    if (n < 0)
        throw std::invalid_argument("binomial: n must be nonnegative");
    if (k < 0 || k > n) return 0.0;
    k = std::min(k, n - k);
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i) {
        // r * (n-k+i) stays divisible by i at every step
        r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    }
    return static_cast<double>(r);
}

namespace {

// Gauss 7 / Kronrod 15 node-weight table on [-1, 1] (positive half).
constexpr double kKron[8][3] = {
    // node, Gauss-7 weight, Kronrod-15 weight
    {0.000000000000000000, 0.417959183673469388, 0.209482141084727828},
    {0.405845151377397167, 0.381830050505118945, 0.190350578064785410},
    {0.741531185599394440, 0.279705391489276668, 0.140653259715525919},
    {0.949107912342758525, 0.129484966168869693, 0.063092092629978554},
    {0.207784955007898468, 0.0, 0.204432940075298892},
    {0.586087235467691130, 0.0, 0.169004726639267903},
    {0.864864423359769073, 0.0, 0.104790010322250184},
    {0.991455371120812639, 0.0, 0.022935322010529225},
};

struct PanelResult {
    double integral;
    double error;
};

PanelResult g7k15(const std::function<double(double)>& f, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double halflen = 0.5 * (b - a);

    const double f0 = f(mid);
    double g7 = kKron[0][1] * f0;
    double k15 = kKron[0][2] * f0;
    for (int i = 1; i < 8; ++i) {
        const double dx = halflen * kKron[i][0];
        const double fs = f(mid + dx) + f(mid - dx);
        g7 += kKron[i][1] * fs;
        k15 += kKron[i][2] * fs;
    }
    g7 *= halflen;
    k15 *= halflen;

    double err = std::abs(g7 - k15);
    err = 200.0 * err * std::sqrt(200.0 * err > 1.0 ? 1.0 : 200.0 * err);
    err = std::max(err, std::abs(k15) * 1e-16);
    return {k15, err};
}

constexpr std::uint64_t kEvalBudget = 1'000'000;

double adaptive_gk(const std::function<double(double)>& f, double a, double b,
                   double tol) {
    struct Interval {
        double a, b, tol;
    };
    std::vector<Interval> stack;
    stack.push_back({a, b, tol});

    KahanSum total;
    double pending_error = 0.0;
    std::uint64_t evals = 0;

    while (!stack.empty()) {
        const Interval iv = stack.back();
        stack.pop_back();

        const PanelResult r = g7k15(f, iv.a, iv.b);
        evals += 15;
        if (r.error <= iv.tol ||
            (iv.b - iv.a) <= 1e-15 * (std::abs(iv.a) + std::abs(iv.b))) {
            total.add(r.integral);
            pending_error += r.error;
            continue;
        }
        if (evals > kEvalBudget) {
            // flush remaining intervals at their current estimates
            double best = total.value() + r.integral;
            double bound = pending_error + r.error;
            for (const Interval& rem : stack) {
                const PanelResult rr = g7k15(f, rem.a, rem.b);
                best += rr.integral;
                bound += rr.error;
            }
            throw ConvergenceError(
                "adaptive quadrature: evaluation budget exhausted (bound " +
                    std::to_string(bound) + ")",
                best, bound);
        }
        const double mid = 0.5 * (iv.a + iv.b);
        stack.push_back({iv.a, mid, 0.5 * iv.tol});
        stack.push_back({mid, iv.b, 0.5 * iv.tol});
    }
    return total.value();
}

} // namespace

double integrate_finite(const std::function<double(double)>& f, double a,
                        double b, double tol) {
    if (!(tol > 0.0))
        throw std::invalid_argument("integrate_finite: tol must be positive");
    if (a == b) return 0.0;
    if (a > b) return -integrate_finite(f, b, a, tol);
    return adaptive_gk(f, a, b, tol);
}

double integrate_semi_infinite(const std::function<double(double)>& f,
                               double lower, double tol) {
    if (!(lower >= 0.0))
        throw std::invalid_argument("integrate_semi_infinite: lower must be >= 0");
    if (!(tol > 0.0))
        throw std::invalid_argument("integrate_semi_infinite: tol must be positive");

    // t = lower + u/(1-u), dt = du/(1-u)^2
    auto transformed = [&f, lower](double u) {
        if (u >= 1.0) return 0.0;
        const double s = 1.0 - u;
        const double t = lower + u / s;
        if (!std::isfinite(t)) return 0.0;
        const double v = f(t);
        if (v == 0.0) return 0.0;
        return v / (s * s);
    };
    return adaptive_gk(transformed, 0.0, 1.0, tol);
}

} // namespace pppcov::mathkit
