#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pppcov/coverage.hpp"
#include "pppcov/fading.hpp"
#include "pppcov/interference.hpp"
#include "pppcov/simulator.hpp"

namespace py = pybind11;

namespace {

pppcov::fading::DoubleShadowedParams desired_params(double kappa, int mu,
                                                    int m, double sigma_db) {
    pppcov::fading::DoubleShadowedParams p;
    p.base.kappa = kappa;
    p.base.mu = mu;
    p.base.m = m;
    p.sigma_s_db = sigma_db;
    p.validate();
    return p;
}

pppcov::coverage::CoverageQuery make_query(double theta, double kappa, int mu,
                                           int m, double sigma_db,
                                           const std::string& interferer,
                                           int ghq_order) {
    pppcov::coverage::CoverageQuery q;
    q.theta = theta;
    q.desired = desired_params(kappa, mu, m, sigma_db);
    q.interferer = pppcov::interference::parse_fading_model(interferer);
    q.ghq_order = ghq_order;
    return q;
}

pppcov::coverage::NetworkConfig make_net(double alpha, double density,
                                         double tx_power) {
    pppcov::coverage::NetworkConfig net;
    net.density = density;
    net.path_loss_exponent = alpha;
    net.tx_power = tx_power;
    return net;
}

} // namespace

PYBIND11_MODULE(_pppcov, m) {
    m.doc() =
        "Downlink coverage probability of a Poisson cellular network with "
        "double shadowed (lognormal times kappa-mu shadowed) fading";

    m.def(
        "gamma_mixture",
        [](double kappa, int mu, int mshape) {
            const auto mix = pppcov::fading::build_gamma_mixture(
                {kappa, mu, mshape});
            std::vector<std::tuple<double, int, double>> out;
            for (const auto& c : mix.components)
                out.emplace_back(c.weight, c.shape, c.scale);
            return out;
        },
        py::arg("kappa"), py::arg("mu"), py::arg("m"),
        "Signed Gamma-mixture representation of the kappa-mu shadowed power "
        "distribution as (weight, shape, scale) triples.");

    m.def(
        "kms_pdf",
        [](double h, double kappa, int mu, int mshape) {
            return pppcov::fading::kms_pdf(
                pppcov::fading::build_gamma_mixture({kappa, mu, mshape}), h);
        },
        py::arg("h"), py::arg("kappa"), py::arg("mu"), py::arg("m"),
        "Kappa-mu shadowed power PDF at h.");

    m.def(
        "kms_ccdf",
        [](double h, double kappa, int mu, int mshape) {
            return pppcov::fading::kms_ccdf(
                pppcov::fading::build_gamma_mixture({kappa, mu, mshape}), h);
        },
        py::arg("h"), py::arg("kappa"), py::arg("mu"), py::arg("m"),
        "Kappa-mu shadowed power CCDF at h.");

    m.def(
        "pdf_ghq",
        [](double h, double kappa, int mu, int mshape, double sigma_db,
           int ghq_order) {
            const auto mix = pppcov::fading::build_ghq_mixture(
                desired_params(kappa, mu, mshape, sigma_db), ghq_order);
            return pppcov::fading::double_shadowed_pdf_ghq(mix, h);
        },
        py::arg("h"), py::arg("kappa"), py::arg("mu"), py::arg("m"),
        py::arg("sigma_db"), py::arg("ghq_order") = 32,
        "Double shadowed PDF at h via the Gauss-Hermite mixture.");

    m.def(
        "pdf_exact",
        [](double h, double kappa, int mu, int mshape, double sigma_db,
           double tol) {
            return pppcov::fading::double_shadowed_pdf_exact(
                desired_params(kappa, mu, mshape, sigma_db), h, tol);
        },
        py::arg("h"), py::arg("kappa"), py::arg("mu"), py::arg("m"),
        py::arg("sigma_db"), py::arg("tol") = 1e-8,
        "Double shadowed PDF at h by adaptive quadrature (sigma_db > 0).");

    m.def(
        "ccdf",
        [](double h, double kappa, int mu, int mshape, double sigma_db,
           int ghq_order) {
            const auto mix = pppcov::fading::build_ghq_mixture(
                desired_params(kappa, mu, mshape, sigma_db), ghq_order);
            return pppcov::fading::double_shadowed_ccdf(mix, h);
        },
        py::arg("h"), py::arg("kappa"), py::arg("mu"), py::arg("m"),
        py::arg("sigma_db") = 0.0, py::arg("ghq_order") = 32,
        "Double shadowed power CCDF at h.");

    m.def(
        "coverage_closed_form",
        [](double theta, double kappa, int mu, int mshape, double sigma_db,
           const std::string& interferer, double alpha, int ghq_order) {
            return pppcov::coverage::coverage_closed_form(
                make_net(alpha, 1e-7, 1.0),
                make_query(theta, kappa, mu, mshape, sigma_db, interferer,
                           ghq_order));
        },
        py::arg("theta"), py::arg("kappa") = 1.0, py::arg("mu") = 1,
        py::arg("m") = 1, py::arg("sigma_db") = 0.0,
        py::arg("interferer") = "rayleigh", py::arg("alpha") = 4.0,
        py::arg("ghq_order") = 32,
        "Closed-form coverage probability at linear SIR threshold theta.");

    m.def(
        "coverage_radial_integral",
        [](double theta, double kappa, int mu, int mshape, double sigma_db,
           const std::string& interferer, double alpha, int ghq_order,
           double tol) {
            return pppcov::coverage::coverage_radial_integral(
                make_net(alpha, 1e-7, 1.0),
                make_query(theta, kappa, mu, mshape, sigma_db, interferer,
                           ghq_order),
                tol);
        },
        py::arg("theta"), py::arg("kappa") = 1.0, py::arg("mu") = 1,
        py::arg("m") = 1, py::arg("sigma_db") = 0.0,
        py::arg("interferer") = "rayleigh", py::arg("alpha") = 4.0,
        py::arg("ghq_order") = 32, py::arg("tol") = 1e-9,
        "Radial-integral cross-check of coverage_closed_form.");

    m.def(
        "simulate_coverage",
        [](double theta, double kappa, int mu, int mshape, double sigma_db,
           const std::string& interferer, double alpha, double density,
           double tx_power, long long realizations, std::uint64_t seed,
           int workers, double window_radius_factor, int ghq_order) {
            pppcov::simulator::SimConfig sim;
            sim.realizations = realizations;
            sim.seed = seed;
            sim.workers = workers;
            sim.window_radius_factor = window_radius_factor;
            const auto est = pppcov::simulator::simulate_coverage(
                make_net(alpha, density, tx_power),
                make_query(theta, kappa, mu, mshape, sigma_db, interferer,
                           ghq_order),
                sim);
            return py::make_tuple(est.p_hat, est.half_width_95,
                                  est.realizations_used);
        },
        py::arg("theta"), py::arg("kappa") = 1.0, py::arg("mu") = 1,
        py::arg("m") = 1, py::arg("sigma_db") = 0.0,
        py::arg("interferer") = "rayleigh", py::arg("alpha") = 4.0,
        py::arg("density") = 1e-7, py::arg("tx_power") = 1.0,
        py::arg("realizations") = 100000, py::arg("seed") = 1,
        py::arg("workers") = 0, py::arg("window_radius_factor") = 15.0,
        py::arg("ghq_order") = 32,
        "Monte Carlo coverage estimate; returns (p_hat, ci_halfwidth, n).");

    m.def(
        "e_h0",
        [](const std::string& interferer, double a, double alpha,
           double tol) {
            const auto model =
                pppcov::interference::parse_fading_model(interferer);
            return pppcov::interference::e_h0(*model, a, alpha, tol);
        },
        py::arg("interferer"), py::arg("a"), py::arg("alpha") = 4.0,
        py::arg("tol") = 1e-10,
        "Zeroth interference expectation functional.");

    m.def(
        "e_hq",
        [](const std::string& interferer, int q, double s, double alpha,
           double tol) {
            const auto model =
                pppcov::interference::parse_fading_model(interferer);
            return pppcov::interference::e_hq(*model, q, s, alpha, tol);
        },
        py::arg("interferer"), py::arg("q"), py::arg("s"),
        py::arg("alpha") = 4.0, py::arg("tol") = 1e-9,
        "q-th interference expectation functional.");
}
