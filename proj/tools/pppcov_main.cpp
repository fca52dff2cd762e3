#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "pppcov/coverage.hpp"
#include "pppcov/errors.hpp"
#include "pppcov/fading.hpp"
#include "pppcov/interference.hpp"
#include "pppcov/simulator.hpp"
#include "pppcov/validate.hpp"

namespace {

using pppcov::ConsistencyError;
using pppcov::ConvergenceError;

// Exit codes: 0 ok, 1 config/validation, 2 numerical inconsistency, 3 I/O.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    double density = 1e-7;
    double path_loss_exponent = 4.0;
    double tx_power = 1.0;
    std::string desired = "kms:kappa=1,mu=1,m=1,sigma_db=0";
    std::string interferer = "rayleigh";
    int ghq_order = 32;
    std::optional<double> theta_db; // single point; overrides the sweep
    double theta_db_start = -10.0;
    double theta_db_stop = 20.0;
    double theta_db_step = 1.0;
    bool mc = false;
    bool check = false;
    long long realizations = 100000;
    double window_radius_factor = 15.0;
    std::uint64_t seed = 1;
    int workers = 0;
    double h_min = 0.01;
    double h_max = 20.0;
    int points = 200;
    bool exact = false;
    bool quick = false;
    std::string output = "-";
    std::string format = "csv";
};

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& v, const std::string& where,
               const char* kind) {
    std::istringstream in(v);
    in.imbue(std::locale::classic());
    T out;
    in >> out;
    if (in.fail() || !in.eof())
        throw ConfigError(where + ": expected " + kind + ", got '" + v + "'");
    return out;
}

bool parse_bool(const std::string& v, const std::string& where) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError(where + ": expected true/false, got '" + v + "'");
}

// Flat key = value file; '#' starts a comment; unknown keys are rejected
// with the offending line number.
void apply_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string where = path + ":" + std::to_string(line_no);
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(where + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw ConfigError(where + ": expected key = value");

        if (key == "density")
            cfg.density = parse_number<double>(val, where, "a real number");
        else if (key == "path_loss_exponent")
            cfg.path_loss_exponent =
                parse_number<double>(val, where, "a real number");
        else if (key == "tx_power")
            cfg.tx_power = parse_number<double>(val, where, "a real number");
        else if (key == "desired")
            cfg.desired = val;
        else if (key == "interferer")
            cfg.interferer = val;
        else if (key == "ghq_order")
            cfg.ghq_order = parse_number<int>(val, where, "an integer");
        else if (key == "theta_db")
            cfg.theta_db = parse_number<double>(val, where, "a real number");
        else if (key == "theta_db_start")
            cfg.theta_db_start =
                parse_number<double>(val, where, "a real number");
        else if (key == "theta_db_stop")
            cfg.theta_db_stop =
                parse_number<double>(val, where, "a real number");
        else if (key == "theta_db_step")
            cfg.theta_db_step =
                parse_number<double>(val, where, "a real number");
        else if (key == "mc")
            cfg.mc = parse_bool(val, where);
        else if (key == "check")
            cfg.check = parse_bool(val, where);
        else if (key == "realizations")
            cfg.realizations = parse_number<long long>(val, where,
                                                       "an integer");
        else if (key == "window_radius_factor")
            cfg.window_radius_factor =
                parse_number<double>(val, where, "a real number");
        else if (key == "seed")
            cfg.seed = parse_number<std::uint64_t>(val, where, "an integer");
        else if (key == "workers")
            cfg.workers = parse_number<int>(val, where, "an integer");
        else if (key == "h_min")
            cfg.h_min = parse_number<double>(val, where, "a real number");
        else if (key == "h_max")
            cfg.h_max = parse_number<double>(val, where, "a real number");
        else if (key == "points")
            cfg.points = parse_number<int>(val, where, "an integer");
        else if (key == "exact")
            cfg.exact = parse_bool(val, where);
        else if (key == "quick")
            cfg.quick = parse_bool(val, where);
        else if (key == "output")
            cfg.output = val;
        else if (key == "format")
            cfg.format = val;
        else
            throw ConfigError(where + ": unknown key '" + key + "'");
    }
}

int env_thread_cap() {
    const char* env = std::getenv("PPPCOV_THREADS");
    if (!env) return 0;
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1) return 0;
    return int(v);
}

int effective_workers(int requested) {
    const int cap = env_thread_cap();
    if (cap == 0) return requested;
    if (requested == 0) return cap;
    return std::min(requested, cap);
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

void write_table(const Table& t, const std::string& output,
                 const std::string& format, const std::string& command) {
    if (format != "csv" && format != "json")
        throw ConfigError("format must be 'csv' or 'json', got '" + format +
                          "'");
    std::ostringstream body;
    if (format == "csv") {
        for (size_t i = 0; i < t.columns.size(); ++i)
            body << (i ? "," : "") << t.columns[i];
        body << "\n";
        for (const auto& row : t.rows) {
            for (size_t i = 0; i < row.size(); ++i)
                body << (i ? "," : "") << format_number(row[i]);
            body << "\n";
        }
    } else {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& row : t.rows) {
            nlohmann::json obj;
            for (size_t i = 0; i < row.size(); ++i)
                obj[t.columns[i]] = row[i];
            rows.push_back(std::move(obj));
        }
        nlohmann::json doc;
        doc["command"] = command;
        doc["columns"] = t.columns;
        doc["rows"] = std::move(rows);
        body << doc.dump(2) << "\n";
    }
    if (output == "-") {
        std::cout << body.str();
        if (!std::cout) throw IoError("failed to write to standard output");
    } else {
        std::ofstream out(output);
        if (!out) throw IoError("cannot open output file '" + output + "'");
        out << body.str();
        out.flush();
        if (!out) throw IoError("failed to write output file '" + output +
                                "'");
    }
}

std::vector<double> theta_sweep(const RunConfig& cfg) {
    if (cfg.theta_db) return {*cfg.theta_db};
    if (!(cfg.theta_db_step > 0.0))
        throw ConfigError("theta_db_step must be > 0");
    if (cfg.theta_db_start > cfg.theta_db_stop)
        throw ConfigError("theta_db_start must not exceed theta_db_stop");
    std::vector<double> sweep;
    const long long n = (long long)std::floor(
        (cfg.theta_db_stop - cfg.theta_db_start) / cfg.theta_db_step + 1e-9);
    for (long long i = 0; i <= n; ++i)
        sweep.push_back(cfg.theta_db_start + double(i) * cfg.theta_db_step);
    return sweep;
}

int cmd_coverage(const RunConfig& cfg) {
    pppcov::coverage::NetworkConfig net;
    net.density = cfg.density;
    net.path_loss_exponent = cfg.path_loss_exponent;
    net.tx_power = cfg.tx_power;
    net.validate();

    pppcov::coverage::CoverageQuery q;
    q.desired = pppcov::interference::parse_desired_model(cfg.desired);
    q.interferer = pppcov::interference::parse_fading_model(cfg.interferer);
    q.ghq_order = cfg.ghq_order;

    pppcov::simulator::SimConfig sim;
    sim.realizations = cfg.realizations;
    sim.window_radius_factor = cfg.window_radius_factor;
    sim.workers = effective_workers(cfg.workers);

    Table t;
    t.columns = {"theta_db", "closed_form"};
    if (cfg.check) t.columns.push_back("radial_integral");
    if (cfg.mc) {
        t.columns.push_back("mc_estimate");
        t.columns.push_back("mc_ci_halfwidth");
    }

    const auto sweep = theta_sweep(cfg);
    double max_discrepancy = 0.0;
    for (size_t i = 0; i < sweep.size(); ++i) {
        q.theta = db_to_linear(sweep[i]);
        std::vector<double> row = {sweep[i]};
        const double closed = pppcov::coverage::coverage_closed_form(net, q);
        row.push_back(closed);
        if (cfg.check) {
            const double radial =
                pppcov::coverage::coverage_radial_integral(net, q, 1e-9);
            row.push_back(radial);
            max_discrepancy =
                std::max(max_discrepancy, std::fabs(closed - radial));
        }
        if (cfg.mc) {
            sim.seed = cfg.seed + std::uint64_t(i);
            const auto est =
                pppcov::simulator::simulate_coverage(net, q, sim);
            row.push_back(est.p_hat);
            row.push_back(est.half_width_95);
        }
        t.rows.push_back(std::move(row));
    }
    write_table(t, cfg.output, cfg.format, "coverage");
    if (cfg.check)
        std::fprintf(stderr,
                     "max |closed_form - radial_integral| = %.3g over %zu "
                     "sweep points\n",
                     max_discrepancy, sweep.size());
    return 0;
}

int cmd_pdf(const RunConfig& cfg) {
    const auto desired =
        pppcov::interference::parse_desired_model(cfg.desired);
    if (!(cfg.h_min > 0.0) || !(cfg.h_max > cfg.h_min))
        throw ConfigError("pdf grid requires 0 < h_min < h_max");
    if (cfg.points < 2) throw ConfigError("points must be >= 2");

    const auto mix = pppcov::fading::build_ghq_mixture(desired, cfg.ghq_order);
    Table t;
    t.columns = {"h", "pdf_ghq"};
    if (cfg.exact) {
        t.columns.push_back("pdf_exact");
        t.columns.push_back("abs_err");
    }
    double max_err = 0.0;
    for (int i = 0; i < cfg.points; ++i) {
        const double h =
            cfg.h_min + (cfg.h_max - cfg.h_min) * double(i) /
                            double(cfg.points - 1);
        const double ghq = pppcov::fading::double_shadowed_pdf_ghq(mix, h);
        std::vector<double> row = {h, ghq};
        if (cfg.exact) {
            const double exact =
                desired.sigma_s_db > 0.0
                    ? pppcov::fading::double_shadowed_pdf_exact(desired, h,
                                                                1e-7)
                    : pppcov::fading::kms_pdf(mix.base, h);
            row.push_back(exact);
            row.push_back(std::fabs(ghq - exact));
            max_err = std::max(max_err, std::fabs(ghq - exact));
        }
        t.rows.push_back(std::move(row));
    }
    write_table(t, cfg.output, cfg.format, "pdf");
    if (cfg.exact)
        std::fprintf(stderr, "max abs_err = %.3g over %d grid points\n",
                     max_err, cfg.points);
    return 0;
}

int cmd_validate(const RunConfig& cfg) {
    // Config sanity first, so a corrupt file fails with a clear message
    // instead of a half-run suite.
    pppcov::coverage::NetworkConfig net;
    net.density = cfg.density;
    net.path_loss_exponent = cfg.path_loss_exponent;
    net.tx_power = cfg.tx_power;
    net.validate();
    pppcov::interference::parse_desired_model(cfg.desired);
    pppcov::interference::parse_fading_model(cfg.interferer);

    pppcov::validate::Options opt;
    opt.quick = cfg.quick;
    opt.seed = cfg.seed;
    opt.workers = effective_workers(cfg.workers);
    const auto results = pppcov::validate::run_suite(opt, std::cout);
    bool all_pass = true;
    for (const auto& r : results) all_pass = all_pass && (r.pass || r.skipped);
    std::cout << (all_pass ? "all criteria passed" : "criteria FAILED")
              << "\n";
    return all_pass ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Downlink coverage probability of a Poisson cellular network with "
        "double shadowed fading"};
    app.require_subcommand(1);

    RunConfig fl; // flag destinations; merged over file values after parse
    std::string config_path;
    double theta_db_flag = 0.0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path,
                        "Flat key=value config file (flags override)");
        sub->add_option("--density", fl.density, "BS density (per unit area)");
        sub->add_option("--path-loss-exponent", fl.path_loss_exponent,
                        "Path loss exponent alpha (> 2)");
        sub->add_option("--tx-power", fl.tx_power, "BS transmit power");
        sub->add_option("--desired", fl.desired,
                        "Desired link: kms:kappa=..,mu=..,m=..[,sigma_db=..]");
        sub->add_option("--interferer", fl.interferer,
                        "Interferer fading model");
        sub->add_option("--ghq-order", fl.ghq_order,
                        "Gauss-Hermite order for the lognormal layer");
        sub->add_option("--seed", fl.seed, "Monte Carlo RNG seed");
        sub->add_option("--workers", fl.workers,
                        "Worker threads (0 = hardware)");
        sub->add_option("--output", fl.output, "Output path ('-' = stdout)");
        sub->add_option("--format", fl.format, "Output format: csv or json");
    };

    auto* cov = app.add_subcommand(
        "coverage", "Coverage probability over a theta sweep");
    add_common(cov);
    auto* o_theta = cov->add_option("--theta-db", theta_db_flag,
                                    "Single SIR threshold in dB");
    cov->add_option("--theta-db-start", fl.theta_db_start, "Sweep start (dB)");
    cov->add_option("--theta-db-stop", fl.theta_db_stop, "Sweep stop (dB)");
    cov->add_option("--theta-db-step", fl.theta_db_step, "Sweep step (dB)");
    cov->add_flag("--mc", fl.mc, "Add Monte Carlo columns");
    cov->add_flag("--check", fl.check, "Add the radial-integral column");
    cov->add_option("--realizations", fl.realizations,
                    "Monte Carlo realizations per point");
    cov->add_option("--window-radius-factor", fl.window_radius_factor,
                    "Window radius in units of 1/sqrt(pi*density)");

    auto* pdf = app.add_subcommand("pdf", "Double shadowed fading PDF curve");
    add_common(pdf);
    pdf->add_option("--h-min", fl.h_min, "Grid start (> 0)");
    pdf->add_option("--h-max", fl.h_max, "Grid stop");
    pdf->add_option("--points", fl.points, "Grid size");
    pdf->add_flag("--exact", fl.exact,
                  "Add the exact-PDF and abs-error columns");

    auto* val = app.add_subcommand("validate", "Run the acceptance suite");
    add_common(val);
    val->add_flag("--quick", fl.quick,
                  "Skip Monte Carlo criteria (analytic-only)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        RunConfig cfg;
        if (!config_path.empty()) apply_config_file(cfg, config_path);

        CLI::App* sub = app.get_subcommands().front();
        // Flags override file values.
        auto override_if = [&](const char* flag, auto member) {
            if (sub->count(flag)) cfg.*member = fl.*member;
        };
        override_if("--density", &RunConfig::density);
        override_if("--path-loss-exponent", &RunConfig::path_loss_exponent);
        override_if("--tx-power", &RunConfig::tx_power);
        override_if("--desired", &RunConfig::desired);
        override_if("--interferer", &RunConfig::interferer);
        override_if("--ghq-order", &RunConfig::ghq_order);
        override_if("--seed", &RunConfig::seed);
        override_if("--workers", &RunConfig::workers);
        override_if("--output", &RunConfig::output);
        override_if("--format", &RunConfig::format);
        if (sub == cov) {
            override_if("--theta-db-start", &RunConfig::theta_db_start);
            override_if("--theta-db-stop", &RunConfig::theta_db_stop);
            override_if("--theta-db-step", &RunConfig::theta_db_step);
            override_if("--mc", &RunConfig::mc);
            override_if("--check", &RunConfig::check);
            override_if("--realizations", &RunConfig::realizations);
            override_if("--window-radius-factor",
                        &RunConfig::window_radius_factor);
            if (o_theta->count()) cfg.theta_db = theta_db_flag;
            return cmd_coverage(cfg);
        }
        if (sub == pdf) {
            override_if("--h-min", &RunConfig::h_min);
            override_if("--h-max", &RunConfig::h_max);
            override_if("--points", &RunConfig::points);
            override_if("--exact", &RunConfig::exact);
            return cmd_pdf(cfg);
        }
        override_if("--quick", &RunConfig::quick);
        return cmd_validate(cfg);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const ConvergenceError& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return 2;
    } catch (const ConsistencyError& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return 2;
    } catch (const IoError& e) {
        std::fprintf(stderr, "i/o error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
