#include "pppcov/coverage.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "pppcov/errors.hpp"
#include "pppcov/mathkit.hpp"
#include "pppcov/partitions.hpp"

namespace pppcov::coverage {

void NetworkConfig::validate() const {
    if (!(density > 0.0) || !std::isfinite(density))
        throw std::domain_error("density must be finite and > 0");
    if (!(path_loss_exponent > 2.0) || !std::isfinite(path_loss_exponent))
        throw std::domain_error(
            "path_loss_exponent must exceed 2 (interference diverges)");
    if (!(tx_power > 0.0) || !std::isfinite(tx_power))
        throw std::domain_error("tx_power must be finite and > 0");
}

void CoverageQuery::validate() const {
    if (!(theta > 0.0) || !std::isfinite(theta))
        throw std::domain_error("theta must be finite and > 0");
    desired.validate();
    if (!interferer) throw std::domain_error("interferer model is required");
    if (ghq_order < 1) throw std::domain_error("ghq_order must be >= 1");
}

namespace {

constexpr double kEh0Tol = 1e-10;
constexpr double kEhqTol = 1e-9;

// Interference expectations for one value of s = theta/(Omega_i*b_l).
// Different (i,l) pairs frequently share s, so they are cached per call.
struct Expectations {
    double e0 = 0.0;
    std::vector<double> eq; // eq[q-1] = E_hq
};

class ExpectationCache {
public:
    ExpectationCache(const interference::FadingModel& model, double alpha)
        : model_(model), alpha_(alpha) {}

    const Expectations& get(double s, int max_q) {
        auto [it, inserted] = cache_.try_emplace(s);
        Expectations& e = it->second;
        if (inserted)
            e.e0 = interference::e_h0(model_, std::pow(s, -2.0 / alpha_),
                                      alpha_, kEh0Tol);
        for (int q = int(e.eq.size()) + 1; q <= max_q; ++q)
            e.eq.push_back(interference::e_hq(model_, q, s, alpha_, kEhqTol));
        return e;
    }

private:
    const interference::FadingModel& model_;
    double alpha_;
    std::map<double, Expectations> cache_;
};

std::vector<std::vector<partitions::PartitionVector>> partition_table(
    int max_j) {
    std::vector<std::vector<partitions::PartitionVector>> table;
    table.reserve(size_t(max_j) + 1);
    for (int j = 0; j <= max_j; ++j)
        table.push_back(partitions::enumerate_tj(j));
    return table;
}

// Shared setup for both evaluation paths: iterates (component i, node l)
// pairs and hands each one s, G_i, scale, and the expectation block.
template <typename PairFn>
double accumulate_pairs(const NetworkConfig& net, const CoverageQuery& q,
                        PairFn&& fn) {
    net.validate();
    q.validate();
    const double alpha = net.path_loss_exponent;
    const auto mix = fading::build_ghq_mixture(q.desired, q.ghq_order);
    int max_shape = 0;
    for (const auto& c : mix.base.components)
        max_shape = std::max(max_shape, c.shape);
    const auto tj = partition_table(max_shape - 1);
    ExpectationCache cache(*q.interferer, alpha);

    mathkit::KahanSum pc;
    for (const auto& comp : mix.base.components) {
        for (const auto& node : mix.terms) {
            const double s = q.theta / (comp.scale * node.b);
            const auto& ex = cache.get(s, comp.shape - 1);
            const double s_pow = std::pow(s, 2.0 / alpha);
            const double g = 1.0 + s_pow * ex.e0;
            const double scale = (2.0 / alpha) * s_pow;
            pc.add(comp.weight * node.a *
                   fn(comp.shape, ex, g, scale, tj));
        }
    }
    return pc.value();
}

double finish(double raw) {
    if (raw < -1e-6 || raw > 1.0 + 1e-6)
        throw ConsistencyError(
            "coverage probability fell outside [0,1] by more than 1e-6 (" +
            std::to_string(raw) + ")");
    return std::clamp(raw, 0.0, 1.0);
}

} // namespace

double coverage_closed_form(const NetworkConfig& net, const CoverageQuery& q) {
    double raw = accumulate_pairs(
        net, q,
        [](int shape, const Expectations& ex, double g, double scale,
           const std::vector<std::vector<partitions::PartitionVector>>& tj) {
            mathkit::KahanSum sum;
            for (int j = 0; j < shape; ++j) {
                const double sign = (j % 2 == 0) ? 1.0 : -1.0;
                for (const auto& p : tj[size_t(j)]) {
                    const double a = partitions::a_coefficient(
                        p, std::span<const double>(ex.eq.data(), size_t(j)),
                        scale);
                    const int b = partitions::b_coefficient(p);
                    sum.add(sign * a * mathkit::gamma_fn(double(b)) /
                            std::pow(g, double(b)));
                }
            }
            return sum.value();
        });
    return finish(raw);
}

double coverage_radial_integral(const NetworkConfig& net,
                                const CoverageQuery& q, double tol) {
    if (!(tol > 0.0)) throw std::domain_error("tol must be > 0");
    // Per (i,l) pair the inner sum over j and partitions is a polynomial in
    // the (scaled) radial variable u; the coverage contribution is
    // int_0^inf exp(-u*G) * poly(u) du, evaluated numerically here instead
    // of through the Gamma-function identity the closed form uses.
    const auto mix0 = fading::build_ghq_mixture(q.desired, q.ghq_order);
    double weight_mass = 0.0;
    for (const auto& c : mix0.base.components)
        weight_mass += std::fabs(c.weight);
    const double tol_pair = tol / (2.0 * std::max(1.0, weight_mass));

    double raw = accumulate_pairs(
        net, q,
        [&](int shape, const Expectations& ex, double g, double scale,
            const std::vector<std::vector<partitions::PartitionVector>>& tj) {
            std::vector<double> poly(size_t(shape), 0.0);
            for (int j = 0; j < shape; ++j) {
                const double sign = (j % 2 == 0) ? 1.0 : -1.0;
                for (const auto& p : tj[size_t(j)]) {
                    const double a = partitions::a_coefficient(
                        p, std::span<const double>(ex.eq.data(), size_t(j)),
                        scale);
                    poly[size_t(partitions::b_coefficient(p)) - 1] += sign * a;
                }
            }
            auto f = [&](double u) {
                double pw = 1.0, acc = 0.0;
                for (double c : poly) {
                    acc += c * pw;
                    pw *= u;
                }
                return std::exp(-u * g) * acc;
            };
            return mathkit::integrate_semi_infinite(f, 0.0, tol_pair);
        });
    return finish(raw);
}

} // namespace pppcov::coverage
