#include "pppcov/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>
#include <vector>

namespace pppcov::simulator {

void SimConfig::validate() const {
    if (realizations < 1)
        throw std::domain_error("realizations must be >= 1");
    if (!(window_radius_factor >= 5.0) || !std::isfinite(window_radius_factor))
        throw std::domain_error(
            "window_radius_factor must be >= 5 (window truncation guard)");
    if (workers < 0) throw std::domain_error("workers must be >= 0");
}

namespace detail {

// Only distances enter the SIR, so points uniform in the disk are drawn as
// radii R*sqrt(U); the angles would cancel anyway.
void draw_radii(double window_radius, double mean_count, Rng& rng,
                std::vector<double>& radii) {
    for (;;) {
        const long long n = rng.poisson(mean_count);
        if (n == 0) continue; // empty window, redraw
        radii.clear();
        radii.reserve(size_t(n));
        for (long long k = 0; k < n; ++k)
            radii.push_back(window_radius * std::sqrt(rng.uniform()));
        return;
    }
}

double sir_from_draws(const std::vector<double>& radii, double desired_gain,
                      const std::vector<double>& interferer_gains,
                      double alpha) {
    if (radii.empty())
        throw std::invalid_argument("sir_from_draws needs at least one point");
    if (interferer_gains.size() + 1 != radii.size())
        throw std::invalid_argument(
            "sir_from_draws needs one interferer gain per non-serving point");
    const size_t serving = size_t(
        std::min_element(radii.begin(), radii.end()) - radii.begin());
    const double desired =
        desired_gain * std::pow(radii[serving], -alpha);
    double interf = 0.0;
    size_t g = 0;
    for (size_t k = 0; k < radii.size(); ++k) {
        if (k == serving) continue;
        interf += interferer_gains[g++] * std::pow(radii[k], -alpha);
    }
    if (interf == 0.0) return std::numeric_limits<double>::infinity();
    return desired / interf;
}

} // namespace detail

namespace {

constexpr long long kBlockSize = 4096;
constexpr double kPi = 3.14159265358979323846;

double one_sir(const coverage::CoverageQuery& q, double window_radius,
               double mean_count, Rng& rng, std::vector<double>& radii,
               std::vector<double>& gains, double alpha) {
    detail::draw_radii(window_radius, mean_count, rng, radii);
    const size_t serving = size_t(
        std::min_element(radii.begin(), radii.end()) - radii.begin());
    const double desired_gain = fading::sample_double_shadowed(q.desired, rng);
    gains.clear();
    gains.reserve(radii.size() - 1);
    for (size_t k = 0; k < radii.size(); ++k) {
        if (k == serving) continue;
        gains.push_back(q.interferer->sample(rng));
    }
    return detail::sir_from_draws(radii, desired_gain, gains, alpha);
}

} // namespace

double sample_sir(const coverage::NetworkConfig& net,
                  const coverage::CoverageQuery& q, const SimConfig& sim,
                  Rng& rng) {
    net.validate();
    q.validate();
    sim.validate();
    const double radius =
        sim.window_radius_factor / std::sqrt(kPi * net.density);
    const double mean_count =
        sim.window_radius_factor * sim.window_radius_factor;
    std::vector<double> radii, gains;
    return one_sir(q, radius, mean_count, rng, radii, gains,
                   net.path_loss_exponent);
}

CoverageEstimate simulate_coverage(const coverage::NetworkConfig& net,
                                   const coverage::CoverageQuery& q,
                                   const SimConfig& sim) {
    net.validate();
    q.validate();
    sim.validate();
    const double radius =
        sim.window_radius_factor / std::sqrt(kPi * net.density);
    const double mean_count =
        sim.window_radius_factor * sim.window_radius_factor;
    const long long total = sim.realizations;
    const long long n_blocks = (total + kBlockSize - 1) / kBlockSize;

    int workers = sim.workers;
    if (workers == 0)
        workers = int(std::max(1u, std::thread::hardware_concurrency()));
    workers = int(std::min<long long>(workers, n_blocks));

    std::vector<long long> block_hits(size_t(n_blocks), 0);
    std::atomic<long long> next_block{0};

    auto worker = [&] {
        std::vector<double> radii, gains;
        for (;;) {
            const long long b = next_block.fetch_add(1);
            if (b >= n_blocks) return;
            Rng rng = Rng::substream(sim.seed, std::uint64_t(b));
            const long long begin = b * kBlockSize;
            const long long end = std::min(begin + kBlockSize, total);
            long long hits = 0;
            for (long long r = begin; r < end; ++r) {
                const double sir = one_sir(q, radius, mean_count, rng, radii,
                                           gains, net.path_loss_exponent);
                if (sir > q.theta) ++hits;
            }
            block_hits[size_t(b)] = hits;
        }
    };

    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(size_t(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    long long hits = 0;
    for (long long h : block_hits) hits += h;

    CoverageEstimate est;
    est.realizations_used = total;
    est.p_hat = double(hits) / double(total);
    est.half_width_95 =
        1.96 * std::sqrt(est.p_hat * (1.0 - est.p_hat) / double(total));
    return est;
}

} // namespace pppcov::simulator
