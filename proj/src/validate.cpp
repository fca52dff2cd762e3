#include "pppcov/validate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "pppcov/coverage.hpp"
#include "pppcov/fading.hpp"
#include "pppcov/interference.hpp"
#include "pppcov/mathkit.hpp"
#include "pppcov/partitions.hpp"
#include "pppcov/simulator.hpp"

namespace pppcov::validate {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

fading::DoubleShadowedParams desired(double kappa, int mu, int m,
                                     double sigma_db) {
    fading::DoubleShadowedParams p;
    p.base.kappa = kappa;
    p.base.mu = mu;
    p.base.m = m;
    p.sigma_s_db = sigma_db;
    return p;
}

coverage::CoverageQuery query(const fading::DoubleShadowedParams& des,
                              const std::string& interferer, double theta_db) {
    coverage::CoverageQuery q;
    q.theta = db_to_linear(theta_db);
    q.desired = des;
    q.interferer = interference::parse_fading_model(interferer);
    q.ghq_order = 32;
    return q;
}

struct Check {
    bool pass = true;
    std::string detail;

    void note(bool ok, const std::string& what) {
        pass = pass && ok;
        if (!ok) {
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
    void info(const std::string& what) {
        if (!detail.empty()) detail += "; ";
        detail += what;
    }
};

// Parameter grid shared by the mixture-identity and distribution criteria.
std::vector<fading::KappaMuShadowedParams> identity_grid() {
    std::vector<fading::KappaMuShadowedParams> grid;
    for (double kappa : {0.5, 1.0, 2.0, 5.3})
        for (int mu = 1; mu <= 6; ++mu)
            for (int m = 1; m <= 6; ++m)
                grid.push_back({kappa, mu, m});
    return grid;
}

// theta_db x desired x sigma x interferer grid shared by the
// internal-equivalence and Monte Carlo criteria.
struct GridCase {
    double theta_db;
    double kappa;
    int mu;
    int m;
    double sigma_db;
    std::string interferer;
};

std::vector<GridCase> equivalence_grid() {
    std::vector<GridCase> grid;
    const std::pair<int, int> mus_ms[] = {{2, 1}, {1, 2}};
    for (double theta_db : {-5.0, 0.0, 5.0, 10.0})
        for (auto [mu, m] : mus_ms)
            for (double sigma : {0.0, 4.0})
                for (const char* intf :
                     {"rayleigh", "rayleigh*lognormal:sigma_db=4"})
                    grid.push_back({theta_db, 1.0, mu, m, sigma, intf});
    return grid;
}

Check check_mixture_identities() {
    Check c;
    double worst_w = 0.0, worst_m = 0.0;
    for (const auto& p : identity_grid()) {
        const auto mix = fading::build_gamma_mixture(p);
        mathkit::KahanSum wsum, msum;
        for (const auto& comp : mix.components) {
            wsum.add(comp.weight);
            msum.add(comp.weight * comp.shape * comp.scale);
        }
        worst_w = std::max(worst_w, std::fabs(wsum.value() - 1.0));
        worst_m = std::max(worst_m, std::fabs(msum.value() - 1.0));
    }
    c.note(worst_w <= 1e-10, fmt("weight-sum defect %.3g > 1e-10", worst_w));
    c.note(worst_m <= 1e-10, fmt("mean defect %.3g > 1e-10", worst_m));
    c.info(fmt("max |sum C - 1| = %.3g, max |sum C m Omega - 1| = %.3g",
               worst_w, worst_m));
    return c;
}

Check check_distribution_consistency() {
    Check c;
    double worst = 0.0;
    for (const auto& p : identity_grid()) {
        const auto mix = fading::build_gamma_mixture(p);
        for (double h : {0.5, 1.0, 2.0, 5.0}) {
            const double tail = mathkit::integrate_semi_infinite(
                [&](double x) { return fading::kms_pdf(mix, x); }, h, 1e-10);
            worst = std::max(worst,
                             std::fabs(tail - fading::kms_ccdf(mix, h)));
        }
    }
    c.note(worst <= 1e-8, fmt("|ccdf - tail integral| = %.3g > 1e-8", worst));
    c.info(fmt("max |ccdf - integral of pdf| = %.3g", worst));
    return c;
}

std::vector<double> fidelity_grid() {
    std::vector<double> h;
    for (int i = 0; i < 200; ++i)
        h.push_back(0.01 * std::pow(100.0, i / 199.0)); // 0.01 .. 1, log
    for (int i = 1; i <= 200; ++i)
        h.push_back(1.0 + 19.0 * i / 200.0); // 1 .. 20, linear
    return h;
}

Check check_ghq_fidelity() {
    Check c;
    const auto grid = fidelity_grid();
    struct Cell {
        double kappa;
        int mu, m;
        double sigma;
    };
    std::vector<Cell> cells;
    for (auto [k, mu, m] : {std::tuple{1.0, 2, 1}, std::tuple{2.0, 2, 4}})
        for (double s : {2.0, 4.0, 8.0}) cells.push_back({k, mu, m, s});
    for (const auto& cell : cells) {
        const auto p = desired(cell.kappa, cell.mu, cell.m, cell.sigma);
        const auto mix = fading::build_ghq_mixture(p, 32);
        double worst = 0.0;
        for (double h : grid) {
            const double exact = fading::double_shadowed_pdf_exact(p, h, 1e-7);
            const double approx = fading::double_shadowed_pdf_ghq(mix, h);
            worst = std::max(worst, std::fabs(approx - exact));
        }
        c.note(worst <= 1e-3,
               fmt("(k=%g,mu=%d,m=%d,sigma=%gdB): max|pdf_ghq-pdf_exact| = "
                   "%.3g > 1e-3",
                   cell.kappa, cell.mu, cell.m, cell.sigma, worst));
        c.info(fmt("(%g,%d,%d,s%g)=%.2e", cell.kappa, cell.mu, cell.m,
                   cell.sigma, worst));
    }
    return c;
}

// Two-sided KS distance between sorted samples and the CDF functor.
template <typename Cdf>
double ks_distance(std::vector<double>& samples, Cdf&& cdf) {
    std::sort(samples.begin(), samples.end());
    const double n = double(samples.size());
    double d = 0.0;
    for (size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max(d, std::fabs(f - double(i + 1) / n));
        d = std::max(d, std::fabs(f - double(i) / n));
    }
    return d;
}

Check check_sampler_ks(const Options& opt) {
    Check c;
    constexpr size_t kN = 1000000;
    std::vector<double> samples(kN);

    int cell = 0;
    for (auto [kappa, mu, m] : {std::tuple{1.0, 2, 1}, std::tuple{1.0, 1, 2}}) {
        fading::KappaMuShadowedParams p{kappa, mu, m};
        const auto mix = fading::build_gamma_mixture(p);
        Rng rng = Rng::substream(opt.seed, 1000 + cell++);
        for (auto& s : samples) s = fading::sample_kms(p, rng);
        const double d = ks_distance(
            samples, [&](double h) { return 1.0 - fading::kms_ccdf(mix, h); });
        c.note(d <= 0.002, fmt("kms(%g,%d,%d): KS = %.4g > 0.002", kappa, mu,
                               m, d));
        c.info(fmt("kms(%g,%d,%d)=%.2e", kappa, mu, m, d));
    }
    for (auto [kappa, mu, m] : {std::tuple{1.0, 2, 1}, std::tuple{1.0, 1, 2}}) {
        const auto p = desired(kappa, mu, m, 4.0);
        const auto mix = fading::build_ghq_mixture(p, 32);
        Rng rng = Rng::substream(opt.seed, 2000 + cell++);
        for (auto& s : samples) s = fading::sample_double_shadowed(p, rng);
        const double d = ks_distance(samples, [&](double h) {
            return 1.0 - fading::double_shadowed_ccdf(mix, h);
        });
        c.note(d <= 0.002, fmt("ds(%g,%d,%d,4dB): KS = %.4g > 0.002", kappa,
                               mu, m, d));
        c.info(fmt("ds(%g,%d,%d,s4)=%.2e", kappa, mu, m, d));
    }
    return c;
}

Check check_rayleigh_baseline() {
    Check c;
    coverage::NetworkConfig net;
    const auto q = query(desired(1.0, 1, 1, 0.0), "rayleigh", 0.0);
    const double pc = coverage::coverage_closed_form(net, q);
    const double ref = 1.0 / (1.0 + kPi / 4.0);
    c.note(std::fabs(pc - ref) <= 1e-6,
           fmt("closed form %.9f vs 1/(1+pi/4) %.9f", pc, ref));
    c.info(fmt("closed_form = %.9f, reference = %.9f, diff = %.3g", pc, ref,
               std::fabs(pc - ref)));
    return c;
}

Check check_internal_equivalence() {
    Check c;
    coverage::NetworkConfig net;
    double worst = 0.0;
    std::string worst_case;
    for (const auto& g : equivalence_grid()) {
        const auto q =
            query(desired(g.kappa, g.mu, g.m, g.sigma_db), g.interferer,
                  g.theta_db);
        const double closed = coverage::coverage_closed_form(net, q);
        const double radial = coverage::coverage_radial_integral(net, q, 1e-9);
        const double diff = std::fabs(closed - radial);
        if (diff > worst) {
            worst = diff;
            worst_case = fmt("theta=%gdB (%g,%d,%d,s%g) %s", g.theta_db,
                             g.kappa, g.mu, g.m, g.sigma_db,
                             g.interferer.c_str());
        }
    }
    c.note(worst <= 1e-8,
           fmt("max |closed - radial| = %.3g > 1e-8 at %s", worst,
               worst_case.c_str()));
    c.info(fmt("max |closed - radial| = %.3g (64 cases)", worst));
    return c;
}

Check check_closed_vs_mc(const Options& opt) {
    Check c;
    coverage::NetworkConfig net; // lambda = 1e-7, alpha = 4, P = 1
    simulator::SimConfig sim;
    sim.realizations = 100000;
    sim.seed = opt.seed;
    sim.workers = opt.workers;
    double worst_margin = -1e9;
    std::string worst_case;
    int idx = 0;
    for (const auto& g : equivalence_grid()) {
        const auto q =
            query(desired(g.kappa, g.mu, g.m, g.sigma_db), g.interferer,
                  g.theta_db);
        const double closed = coverage::coverage_closed_form(net, q);
        simulator::SimConfig case_sim = sim;
        case_sim.seed = sim.seed + std::uint64_t(idx++) * 0x10000;
        const auto est = simulator::simulate_coverage(net, q, case_sim);
        const double tol = std::max(0.01, 3.0 * est.half_width_95);
        const double diff = std::fabs(closed - est.p_hat);
        if (diff - tol > worst_margin) {
            worst_margin = diff - tol;
            worst_case =
                fmt("theta=%gdB (%g,%d,%d,s%g) %s: |%.5f - %.5f| = %.4g "
                    "(tol %.4g)",
                    g.theta_db, g.kappa, g.mu, g.m, g.sigma_db,
                    g.interferer.c_str(), closed, est.p_hat, diff, tol);
        }
        c.note(diff <= tol,
               fmt("theta=%gdB (%g,%d,%d,s%g) %s: |closed - mc| = %.4g > %.4g",
                   g.theta_db, g.kappa, g.mu, g.m, g.sigma_db,
                   g.interferer.c_str(), diff, tol));
    }
    c.info("tightest case: " + worst_case);
    return c;
}

// Independent single-scale evaluation of the coverage sum (no quadrature
// node loop at all), used as the sigma_S = 0 reference.
double coverage_kms_only(const fading::KappaMuShadowedParams& params,
                         const interference::FadingModel& model, double theta,
                         double alpha) {
    const auto mix = fading::build_gamma_mixture(params);
    mathkit::KahanSum pc;
    for (const auto& comp : mix.components) {
        const double s = theta / comp.scale;
        const double s_pow = std::pow(s, 2.0 / alpha);
        const double e0 =
            interference::e_h0(model, std::pow(s, -2.0 / alpha), alpha, 1e-10);
        const double g = 1.0 + s_pow * e0;
        const double scale = (2.0 / alpha) * s_pow;
        std::vector<double> eq;
        for (int q = 1; q < comp.shape; ++q)
            eq.push_back(interference::e_hq(model, q, s, alpha, 1e-9));
        mathkit::KahanSum sum;
        for (int j = 0; j < comp.shape; ++j) {
            const double sign = (j % 2 == 0) ? 1.0 : -1.0;
            for (const auto& p : partitions::enumerate_tj(j)) {
                const double a = partitions::a_coefficient(
                    p, std::span<const double>(eq.data(), size_t(j)), scale);
                const int b = partitions::b_coefficient(p);
                sum.add(sign * a * mathkit::gamma_fn(double(b)) /
                        std::pow(g, double(b)));
            }
        }
        pc.add(comp.weight * sum.value());
    }
    return pc.value();
}

Check check_sigma0_reduction() {
    Check c;
    coverage::NetworkConfig net;
    double worst = 0.0;
    for (auto [kappa, mu, m] : {std::tuple{1.0, 2, 1}, std::tuple{1.0, 1, 2},
                                std::tuple{2.0, 2, 4}}) {
        const auto q = query(desired(kappa, mu, m, 0.0), "rayleigh", 0.0);
        const double full = coverage::coverage_closed_form(net, q);
        const double reduced = coverage_kms_only(
            q.desired.base, *q.interferer, q.theta, net.path_loss_exponent);
        worst = std::max(worst, std::fabs(full - reduced));
    }
    c.note(worst <= 1e-12,
           fmt("sigma_S=0 coverage differs from kappa-mu shadowed evaluation "
               "by %.3g > 1e-12",
               worst));
    c.info(fmt("max |sigma0 - kms-only| = %.3g", worst));
    return c;
}

Check check_qualitative_trends() {
    Check c;
    coverage::NetworkConfig net;
    auto pc = [&](double kappa, int mu, int m, double sigma) {
        return coverage::coverage_closed_form(
            net, query(desired(kappa, mu, m, sigma), "rayleigh", 0.0));
    };
    const double m1 = pc(1.0, 2, 1, 0.0), m4 = pc(1.0, 2, 4, 0.0);
    c.note(m4 > m1, fmt("p_c(m=4)=%.6f not > p_c(m=1)=%.6f", m4, m1));
    const double mu1 = pc(1.0, 1, 2, 0.0), mu3 = pc(1.0, 3, 2, 0.0);
    c.note(mu3 > mu1, fmt("p_c(mu=3)=%.6f not > p_c(mu=1)=%.6f", mu3, mu1));
    const double s2 = pc(1.0, 2, 2, 2.0), s8 = pc(1.0, 2, 2, 8.0);
    c.note(s2 > s8, fmt("p_c(s=2dB)=%.6f not > p_c(s=8dB)=%.6f", s2, s8));
    c.info(fmt("m: %.6f -> %.6f; mu: %.6f -> %.6f; sigma: %.6f -> %.6f", m1,
               m4, mu1, mu3, s2, s8));
    return c;
}

Check check_lambda_p_invariance(const Options& opt) {
    Check c;
    const auto q = query(desired(1.0, 2, 1, 4.0), "rayleigh", 0.0);
    coverage::NetworkConfig base;
    double ref = coverage::coverage_closed_form(base, q);
    for (double lam : {1e-7, 1e-6})
        for (double p : {1.0, 10.0}) {
            coverage::NetworkConfig net;
            net.density = lam;
            net.tx_power = p;
            const double pc = coverage::coverage_closed_form(net, q);
            c.note(pc == ref,
                   fmt("closed form changed with lambda=%g P=%g: %.17g vs "
                       "%.17g",
                       lam, p, pc, ref));
        }
    c.info(fmt("closed form invariant at %.9f", ref));

    if (!opt.quick) {
        simulator::SimConfig sim;
        sim.realizations = 100000;
        sim.seed = opt.seed;
        sim.workers = opt.workers;
        auto run = [&](double lam, double p) {
            coverage::NetworkConfig net;
            net.density = lam;
            net.tx_power = p;
            return simulator::simulate_coverage(net, q, sim);
        };
        const auto a = run(1e-7, 1.0);
        const auto b = run(1e-6, 1.0);
        const auto d = run(1e-7, 10.0);
        c.note(std::fabs(a.p_hat - b.p_hat) <
                   a.half_width_95 + b.half_width_95,
               fmt("MC lambda shift: |%.5f - %.5f| >= CI sum %.5f", a.p_hat,
                   b.p_hat, a.half_width_95 + b.half_width_95));
        c.note(std::fabs(a.p_hat - d.p_hat) <
                   a.half_width_95 + d.half_width_95,
               fmt("MC power shift: |%.5f - %.5f| >= CI sum %.5f", a.p_hat,
                   d.p_hat, a.half_width_95 + d.half_width_95));
        c.info(fmt("mc: %.5f / %.5f / %.5f", a.p_hat, b.p_hat, d.p_hat));
    }
    return c;
}

const std::vector<std::string> kNames = {
    "mixture_identities", "distribution_consistency",
    "ghq_fidelity",       "sampler_ks",
    "rayleigh_baseline",  "internal_equivalence",
    "closed_vs_mc",       "sigma0_reduction",
    "qualitative_trends", "lambda_p_invariance",
};

} // namespace

const std::vector<std::string>& criterion_names() { return kNames; }

CriterionResult run_criterion(const std::string& name, const Options& opt) {
    CriterionResult r;
    r.name = name;
    const bool mc_criterion = name == "sampler_ks" || name == "closed_vs_mc";
    if (opt.quick && mc_criterion) {
        r.skipped = true;
        r.pass = true;
        r.detail = "skipped (Monte Carlo criterion, --quick)";
        return r;
    }
    const auto t0 = std::chrono::steady_clock::now();
    Check c;
    if (name == "mixture_identities")
        c = check_mixture_identities();
    else if (name == "distribution_consistency")
        c = check_distribution_consistency();
    else if (name == "ghq_fidelity")
        c = check_ghq_fidelity();
    else if (name == "sampler_ks")
        c = check_sampler_ks(opt);
    else if (name == "rayleigh_baseline")
        c = check_rayleigh_baseline();
    else if (name == "internal_equivalence")
        c = check_internal_equivalence();
    else if (name == "closed_vs_mc")
        c = check_closed_vs_mc(opt);
    else if (name == "sigma0_reduction")
        c = check_sigma0_reduction();
    else if (name == "qualitative_trends")
        c = check_qualitative_trends();
    else if (name == "lambda_p_invariance")
        c = check_lambda_p_invariance(opt);
    else
        throw std::invalid_argument("unknown criterion '" + name + "'");
    const auto t1 = std::chrono::steady_clock::now();
    r.pass = c.pass;
    r.detail = c.detail;
    r.seconds = std::chrono::duration<double>(t1 - t0).count();
    return r;
}

std::vector<CriterionResult> run_suite(const Options& opt, std::ostream& out) {
    std::vector<CriterionResult> results;
    for (const auto& name : criterion_names()) {
        auto r = run_criterion(name, opt);
        const char* tag = r.skipped ? "SKIP" : (r.pass ? "PASS" : "FAIL");
        out << tag << " " << r.name << ": " << r.detail;
        if (!r.skipped)
            out << fmt(" [%.1fs]", r.seconds);
        out << "\n" << std::flush;
        results.push_back(std::move(r));
    }
    return results;
}

} // namespace pppcov::validate
