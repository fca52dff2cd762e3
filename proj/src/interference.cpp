#include "pppcov/interference.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

#include "pppcov/errors.hpp"
#include "pppcov/mathkit.hpp"

namespace pppcov::interference {

namespace {

constexpr double kSqrtPi = 1.7724538509055160273;
constexpr double kLn10Over10 = 0.23025850929940456840;

// Builds the normalized lognormal scale nodes (a_l, b_l) for one GH order.
void scale_nodes(double sigma_tilde, int order, std::vector<double>& a,
                 std::vector<double>& b) {
    const auto rule = mathkit::gauss_hermite_rule(order);
    double wsum = 0.0;
    for (double w : rule.weights) wsum += w;
    a.resize(rule.nodes.size());
    b.resize(rule.nodes.size());
    for (size_t i = 0; i < rule.nodes.size(); ++i) {
        a[i] = rule.weights[i] / wsum;
        b[i] = std::exp(std::sqrt(2.0) * sigma_tilde * rule.nodes[i]);
    }
}

double refinement_guarded(double lo, double hi, const char* what) {
    if (std::fabs(hi - lo) > 1e-9 * std::max(1.0, std::fabs(hi)))
        throw ConvergenceError(std::string(what) +
                                   ": quadrature refinement did not settle",
                               hi, std::fabs(hi - lo));
    return hi;
}

// 2F1(1, b; c; w) by forward term recursion. Callers keep w <= 1/2, so the
// tail is geometric and all terms are positive.
double gauss_2f1_unit(double b, double c, double w) {
    double term = 1.0;
    double sum = 1.0;
    for (int k = 0; k < 4000; ++k) {
        term *= (b + k) / (c + k) * w;
        sum += term;
        if (term <= 1e-17 * sum) return sum;
    }
    throw ConvergenceError("hypergeometric series did not converge", sum, w);
}

// K(nu, a, T) = int_0^inf v^(nu-1) e^-v gamma(a, T v) dv, the Gamma-weighted
// lower-incomplete-gamma integral. Both closed forms keep the series
// argument at or below 1/2; the large-T side subtracts the complementary
// upper-tail integral from the saturated value Gamma(a) Gamma(nu).
double incgamma_kernel(double nu, double a, double T) {
    const double pre = std::exp(a * std::log(T) + std::lgamma(nu + a) -
                                (nu + a) * std::log1p(T));
    if (T <= 1.0)
        return pre / a * gauss_2f1_unit(nu + a, a + 1.0, T / (1.0 + T));
    return std::tgamma(a) * std::tgamma(nu) -
           pre / nu * gauss_2f1_unit(nu + a, nu + 1.0, 1.0 / (1.0 + T));
}

// E[h^c gamma(a, s h)] over a Gamma(shape, scale) power law.
double gamma_incgamma_expectation(double shape, double scale, double c,
                                  double a, double s) {
    return std::exp(c * std::log(scale) - std::lgamma(shape)) *
           incgamma_kernel(c + shape, a, s * scale);
}

std::string format_real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

} // namespace

double FadingModel::expect(const std::function<double(double)>& g,
                           double tol) const {
    if (!(tol > 0.0)) throw std::domain_error("expect tolerance must be > 0");
    // Refinement ladder: accept order n once it agrees with order n/2.
    double prev = expect_at_order(g, 32);
    for (int order : {64, 128}) {
        double cur = expect_at_order(g, order);
        if (std::fabs(cur - prev) <= tol) return cur;
        prev = cur;
    }
    throw ConvergenceError(
        "fading expectation did not converge at quadrature order 128", prev,
        tol);
}

double FadingModel::laplace(double u) const {
    if (!(u >= 0.0)) throw std::domain_error("laplace transform needs u >= 0");
    return expect([u](double h) { return std::exp(-u * h); }, 1e-11);
}

double FadingModel::laplace_complement(double u) const {
    return 1.0 - laplace(u);
}

double FadingModel::incgamma_expectation(double c, double a, double s,
                                         double tol) const {
    return expect(
        [&](double h) {
            if (h <= 0.0) return 0.0;
            return std::pow(h, c) * mathkit::lower_incomplete_gamma(a, s * h);
        },
        tol);
}

// ---- Rayleigh ----

double RayleighModel::laplace(double u) const {
    if (!(u >= 0.0)) throw std::domain_error("laplace transform needs u >= 0");
    return 1.0 / (1.0 + u);
}

double RayleighModel::laplace_complement(double u) const {
    if (!(u >= 0.0)) throw std::domain_error("laplace transform needs u >= 0");
    return u / (1.0 + u);
}

double RayleighModel::incgamma_expectation(double c, double a, double s,
                                           double /*tol*/) const {
    return gamma_incgamma_expectation(1.0, 1.0, c, a, s);
}

double RayleighModel::expect_at_order(const std::function<double(double)>& g,
                                      int order) const {
    const auto rule = mathkit::gauss_laguerre_rule(order);
    mathkit::KahanSum acc;
    for (size_t i = 0; i < rule.nodes.size(); ++i)
        acc.add(rule.weights[i] * g(rule.nodes[i]));
    return acc.value();
}

// ---- Nakagami ----

NakagamiModel::NakagamiModel(int m) : m_(m) {
    if (m < 1) throw std::domain_error("nakagami m must be a positive integer");
}

std::string NakagamiModel::name() const {
    return "nakagami:m=" + std::to_string(m_);
}

double NakagamiModel::laplace(double u) const {
    if (!(u >= 0.0)) throw std::domain_error("laplace transform needs u >= 0");
    return std::pow(1.0 + u / m_, -m_);
}

double NakagamiModel::incgamma_expectation(double c, double a, double s,
                                           double /*tol*/) const {
    return gamma_incgamma_expectation(double(m_), 1.0 / m_, c, a, s);
}

double NakagamiModel::expect_at_order(const std::function<double(double)>& g,
                                      int order) const {
    // E[g] = int g(x/m) x^(m-1) e^-x / (m-1)! dx over the unit-mean
    // Gamma(m, 1/m) law.
    const auto rule = mathkit::gauss_laguerre_rule(order);
    const double lgm = std::lgamma(double(m_));
    mathkit::KahanSum acc;
    for (size_t i = 0; i < rule.nodes.size(); ++i) {
        const double x = rule.nodes[i];
        const double dens = std::exp((m_ - 1) * std::log(x) - lgm);
        acc.add(rule.weights[i] * dens * g(x / m_));
    }
    return acc.value();
}

// ---- Lognormal ----

LognormalModel::LognormalModel(double sigma_db)
    : sigma_db_(sigma_db), sigma_tilde_(sigma_db * kLn10Over10) {
    if (!(sigma_db > 0.0) || !std::isfinite(sigma_db))
        throw std::domain_error("lognormal sigma_db must be finite and > 0");
    scale_nodes(sigma_tilde_, 64, a_lo_, b_lo_);
    scale_nodes(sigma_tilde_, 128, a_hi_, b_hi_);
}

std::string LognormalModel::name() const {
    return "lognormal:sigma_db=" + format_real(sigma_db_);
}

double LognormalModel::mean() const {
    return std::exp(0.5 * sigma_tilde_ * sigma_tilde_);
}

double LognormalModel::sample(Rng& rng) const {
    return std::exp(sigma_tilde_ * rng.normal());
}

double LognormalModel::laplace(double u) const {
    if (!(u >= 0.0)) throw std::domain_error("laplace transform needs u >= 0");
    auto sum = [u](const std::vector<double>& a, const std::vector<double>& b) {
        mathkit::KahanSum acc;
        for (size_t i = 0; i < a.size(); ++i)
            acc.add(a[i] * std::exp(-u * b[i]));
        return acc.value();
    };
    return refinement_guarded(sum(a_lo_, b_lo_), sum(a_hi_, b_hi_),
                              "lognormal laplace");
}

double LognormalModel::incgamma_expectation(double c, double a, double s,
                                            double tol) const {
    // Conditioned on the scale node the power is the node value itself, so
    // the kernel is evaluated pointwise; the node refinement supplies the
    // convergence check.
    auto sum = [&](const std::vector<double>& aw, const std::vector<double>& b) {
        mathkit::KahanSum acc;
        for (size_t i = 0; i < aw.size(); ++i)
            acc.add(aw[i] * std::pow(b[i], c) *
                    mathkit::lower_incomplete_gamma(a, s * b[i]));
        return acc.value();
    };
    const double lo = sum(a_lo_, b_lo_);
    const double hi = sum(a_hi_, b_hi_);
    if (std::fabs(hi - lo) > tol)
        throw ConvergenceError(
            "lognormal incomplete-gamma expectation did not settle", hi,
            std::fabs(hi - lo));
    return hi;
}

double LognormalModel::expect_at_order(const std::function<double(double)>& g,
                                       int order) const {
    const auto rule = mathkit::gauss_hermite_rule(order);
    mathkit::KahanSum acc;
    for (size_t i = 0; i < rule.nodes.size(); ++i)
        acc.add(rule.weights[i] / kSqrtPi *
                g(std::exp(std::sqrt(2.0) * sigma_tilde_ * rule.nodes[i])));
    return acc.value();
}

// ---- Rayleigh x Lognormal ----

RayleighLognormalModel::RayleighLognormalModel(double sigma_db)
    : sigma_db_(sigma_db), sigma_tilde_(sigma_db * kLn10Over10) {
    if (!(sigma_db > 0.0) || !std::isfinite(sigma_db))
        throw std::domain_error(
            "rayleigh*lognormal sigma_db must be finite and > 0");
    scale_nodes(sigma_tilde_, 64, a_lo_, b_lo_);
    scale_nodes(sigma_tilde_, 128, a_hi_, b_hi_);
}

std::string RayleighLognormalModel::name() const {
    return "rayleigh*lognormal:sigma_db=" + format_real(sigma_db_);
}

double RayleighLognormalModel::mean() const {
    return std::exp(0.5 * sigma_tilde_ * sigma_tilde_);
}

double RayleighLognormalModel::sample(Rng& rng) const {
    return rng.exponential() * std::exp(sigma_tilde_ * rng.normal());
}

double RayleighLognormalModel::laplace(double u) const {
    if (!(u >= 0.0)) throw std::domain_error("laplace transform needs u >= 0");
    // Conditioning on the lognormal scale leaves the exponential transform
    // 1/(1 + u*b) per node.
    auto sum = [u](const std::vector<double>& a, const std::vector<double>& b) {
        mathkit::KahanSum acc;
        for (size_t i = 0; i < a.size(); ++i)
            acc.add(a[i] / (1.0 + u * b[i]));
        return acc.value();
    };
    return refinement_guarded(sum(a_lo_, b_lo_), sum(a_hi_, b_hi_),
                              "rayleigh*lognormal laplace");
}

double RayleighLognormalModel::laplace_complement(double u) const {
    if (!(u >= 0.0)) throw std::domain_error("laplace transform needs u >= 0");
    auto sum = [u](const std::vector<double>& a, const std::vector<double>& b) {
        mathkit::KahanSum acc;
        for (size_t i = 0; i < a.size(); ++i)
            acc.add(a[i] * u * b[i] / (1.0 + u * b[i]));
        return acc.value();
    };
    return refinement_guarded(sum(a_lo_, b_lo_), sum(a_hi_, b_hi_),
                              "rayleigh*lognormal laplace complement");
}

double RayleighLognormalModel::incgamma_expectation(double c, double a,
                                                    double s,
                                                    double tol) const {
    // Conditioned on the scale node the power is exponential, so the inner
    // expectation has the Gamma closed form; the node refinement supplies
    // the convergence check.
    auto sum = [&](const std::vector<double>& aw, const std::vector<double>& b) {
        mathkit::KahanSum acc;
        for (size_t i = 0; i < aw.size(); ++i)
            acc.add(aw[i] * std::pow(b[i], c) *
                    gamma_incgamma_expectation(1.0, 1.0, c, a, s * b[i]));
        return acc.value();
    };
    const double lo = sum(a_lo_, b_lo_);
    const double hi = sum(a_hi_, b_hi_);
    if (std::fabs(hi - lo) > tol)
        throw ConvergenceError(
            "rayleigh*lognormal incomplete-gamma expectation did not settle",
            hi, std::fabs(hi - lo));
    return hi;
}

double RayleighLognormalModel::expect_at_order(
    const std::function<double(double)>& g, int order) const {
    const auto gh = mathkit::gauss_hermite_rule(order);
    const auto gl = mathkit::gauss_laguerre_rule(order);
    mathkit::KahanSum acc;
    for (size_t i = 0; i < gh.nodes.size(); ++i) {
        const double b =
            std::exp(std::sqrt(2.0) * sigma_tilde_ * gh.nodes[i]);
        const double wa = gh.weights[i] / kSqrtPi;
        for (size_t j = 0; j < gl.nodes.size(); ++j)
            acc.add(wa * gl.weights[j] * g(b * gl.nodes[j]));
    }
    return acc.value();
}

// ---- Kappa-mu shadowed ----

KappaMuShadowedModel::KappaMuShadowedModel(
    const fading::KappaMuShadowedParams& params)
    : params_(params), mix_(fading::build_gamma_mixture(params)) {}

std::string KappaMuShadowedModel::name() const {
    return "kms:kappa=" + format_real(params_.kappa) +
           ",mu=" + std::to_string(params_.mu) +
           ",m=" + std::to_string(params_.m);
}

double KappaMuShadowedModel::laplace(double u) const {
    if (!(u >= 0.0)) throw std::domain_error("laplace transform needs u >= 0");
    mathkit::KahanSum acc;
    for (const auto& c : mix_.components)
        acc.add(c.weight * std::pow(1.0 + u * c.scale, -c.shape));
    return acc.value();
}

double KappaMuShadowedModel::incgamma_expectation(double c, double a, double s,
                                                  double /*tol*/) const {
    mathkit::KahanSum acc;
    for (const auto& comp : mix_.components)
        acc.add(comp.weight * gamma_incgamma_expectation(double(comp.shape),
                                                         comp.scale, c, a, s));
    return acc.value();
}

double KappaMuShadowedModel::expect_at_order(
    const std::function<double(double)>& g, int order) const {
    const auto rule = mathkit::gauss_laguerre_rule(order);
    mathkit::KahanSum acc;
    for (const auto& c : mix_.components) {
        const double lgk = std::lgamma(double(c.shape));
        mathkit::KahanSum comp;
        for (size_t i = 0; i < rule.nodes.size(); ++i) {
            const double x = rule.nodes[i];
            const double dens = std::exp((c.shape - 1) * std::log(x) - lgk);
            comp.add(rule.weights[i] * dens * g(c.scale * x));
        }
        acc.add(c.weight * comp.value());
    }
    return acc.value();
}

// ---- model grammar ----

namespace {

double parse_real(const std::string& s, const std::string& ctx) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        throw std::invalid_argument(ctx + ": expected a real number, got '" +
                                    s + "'");
    return v;
}

int parse_int(const std::string& s, const std::string& ctx) {
    int v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        throw std::invalid_argument(ctx + ": expected an integer, got '" + s +
                                    "'");
    return v;
}

// Splits "k1=v1,k2=v2" into pairs; duplicate or malformed keys throw.
std::vector<std::pair<std::string, std::string>> parse_kv(
    const std::string& text, const std::string& ctx) {
    std::vector<std::pair<std::string, std::string>> out;
    size_t pos = 0;
    while (pos < text.size()) {
        size_t comma = text.find(',', pos);
        if (comma == std::string::npos) comma = text.size();
        std::string item = text.substr(pos, comma - pos);
        size_t eq = item.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 >= item.size())
            throw std::invalid_argument(ctx + ": expected key=value, got '" +
                                        item + "'");
        std::string key = item.substr(0, eq);
        for (const auto& kv : out)
            if (kv.first == key)
                throw std::invalid_argument(ctx + ": duplicate key '" + key +
                                            "'");
        out.emplace_back(key, item.substr(eq + 1));
        pos = comma + 1;
    }
    return out;
}

void reject_unknown(
    const std::vector<std::pair<std::string, std::string>>& kvs,
    std::initializer_list<const char*> allowed, const std::string& ctx) {
    for (const auto& kv : kvs) {
        bool ok = false;
        for (const char* k : allowed) ok = ok || kv.first == k;
        if (!ok)
            throw std::invalid_argument(ctx + ": unknown key '" + kv.first +
                                        "'");
    }
}

std::string find_required(
    const std::vector<std::pair<std::string, std::string>>& kvs,
    const char* key, const std::string& ctx) {
    for (const auto& kv : kvs)
        if (kv.first == key) return kv.second;
    throw std::invalid_argument(ctx + ": missing key '" + std::string(key) +
                                "'");
}

} // namespace

std::shared_ptr<const FadingModel> parse_fading_model(
    const std::string& text) {
    const std::string ctx = "fading model '" + text + "'";
    size_t colon = text.find(':');
    std::string head = text.substr(0, colon);
    std::string tail =
        colon == std::string::npos ? std::string() : text.substr(colon + 1);
    auto kvs = parse_kv(tail, ctx);

    if (head == "rayleigh") {
        reject_unknown(kvs, {}, ctx);
        return std::make_shared<RayleighModel>();
    }
    if (head == "nakagami") {
        reject_unknown(kvs, {"m"}, ctx);
        return std::make_shared<NakagamiModel>(
            parse_int(find_required(kvs, "m", ctx), ctx));
    }
    if (head == "lognormal") {
        reject_unknown(kvs, {"sigma_db"}, ctx);
        return std::make_shared<LognormalModel>(
            parse_real(find_required(kvs, "sigma_db", ctx), ctx));
    }
    if (head == "rayleigh*lognormal") {
        reject_unknown(kvs, {"sigma_db"}, ctx);
        return std::make_shared<RayleighLognormalModel>(
            parse_real(find_required(kvs, "sigma_db", ctx), ctx));
    }
    if (head == "kms") {
        reject_unknown(kvs, {"kappa", "mu", "m"}, ctx);
        fading::KappaMuShadowedParams p;
        p.kappa = parse_real(find_required(kvs, "kappa", ctx), ctx);
        p.mu = parse_int(find_required(kvs, "mu", ctx), ctx);
        p.m = parse_int(find_required(kvs, "m", ctx), ctx);
        return std::make_shared<KappaMuShadowedModel>(p);
    }
    throw std::invalid_argument(
        ctx +
        ": unknown model (expected rayleigh, nakagami, lognormal, "
        "rayleigh*lognormal, or kms)");
}

fading::DoubleShadowedParams parse_desired_model(const std::string& text) {
    const std::string ctx = "desired model '" + text + "'";
    size_t colon = text.find(':');
    if (text.substr(0, colon) != "kms")
        throw std::invalid_argument(
            ctx + ": the desired link must be kms:kappa=...,mu=...,m=..."
                  "[,sigma_db=...]");
    std::string tail =
        colon == std::string::npos ? std::string() : text.substr(colon + 1);
    auto kvs = parse_kv(tail, ctx);
    reject_unknown(kvs, {"kappa", "mu", "m", "sigma_db"}, ctx);
    fading::DoubleShadowedParams p;
    p.base.kappa = parse_real(find_required(kvs, "kappa", ctx), ctx);
    p.base.mu = parse_int(find_required(kvs, "mu", ctx), ctx);
    p.base.m = parse_int(find_required(kvs, "m", ctx), ctx);
    for (const auto& kv : kvs)
        if (kv.first == "sigma_db")
            p.sigma_s_db = parse_real(kv.second, ctx);
    p.validate();
    return p;
}

// ---- expectation functionals ----

double e_h0(const FadingModel& model, double a, double alpha, double tol) {
    if (!(a > 0.0)) throw std::domain_error("e_h0 requires a > 0");
    if (!(alpha > 2.0))
        throw std::domain_error(
            "path_loss_exponent must exceed 2 (interference diverges)");
    const double half = alpha / 2.0;
    return mathkit::integrate_semi_infinite(
        [&](double t) { return model.laplace_complement(std::pow(t, -half)); },
        a, tol);
}

double e_hq(const FadingModel& model, int q, double s, double alpha,
            double tol) {
    if (q < 1) throw std::domain_error("e_hq requires q >= 1");
    if (!(s > 0.0)) throw std::domain_error("e_hq requires s > 0");
    if (!(alpha > 2.0))
        throw std::domain_error(
            "path_loss_exponent must exceed 2 (interference diverges)");
    const double expo = 2.0 / alpha;
    return model.incgamma_expectation(expo, q - expo, s, tol);
}

} // namespace pppcov::interference
