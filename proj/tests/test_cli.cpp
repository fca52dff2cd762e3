#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#ifdef __unix__
#include <sys/wait.h>
#endif

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

int run_counter = 0;

// Runs the CLI under test (path in PPPCOV_BIN) with stdout/stderr captured.
// extra_env is prepended verbatim, e.g. "PPPCOV_THREADS=1 ".
RunResult run_cli(const std::string& args, const std::string& extra_env = "") {
    const char* bin = std::getenv("PPPCOV_BIN");
    REQUIRE(bin != nullptr);
    const int id = run_counter++;
    const std::string out_path = "cli_out_" + std::to_string(id) + ".txt";
    const std::string err_path = "cli_err_" + std::to_string(id) + ".txt";
    const std::string cmd = extra_env + "\"" + std::string(bin) + "\" " +
                            args + " >" + out_path + " 2>" + err_path;
    const int rc = std::system(cmd.c_str());
    RunResult r;
#ifdef __unix__
    r.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
#else
    r.exit_code = rc;
#endif
    r.out = slurp(out_path);
    r.err = slurp(err_path);
    std::remove(out_path.c_str());
    std::remove(err_path.c_str());
    return r;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) lines.push_back(line);
    }
    return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::istringstream in(line);
    std::string cell;
    while (std::getline(in, cell, ',')) cells.push_back(cell);
    return cells;
}

struct Csv {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

Csv parse_csv(const std::string& text) {
    Csv csv;
    const auto lines = lines_of(text);
    REQUIRE(!lines.empty());
    csv.header = split_csv(lines[0]);
    for (size_t i = 1; i < lines.size(); ++i) {
        std::vector<double> row;
        for (const auto& cell : split_csv(lines[i]))
            row.push_back(std::stod(cell));
        REQUIRE(row.size() == csv.header.size());
        csv.rows.push_back(std::move(row));
    }
    return csv;
}

constexpr double kRayleighBaseline = 0.5600991535115574; // 1/(1 + pi/4)

} // namespace

TEST_CASE("missing subcommand fails with exit 1") {
    const auto r = run_cli("");
    CHECK(r.exit_code == 1);
}

TEST_CASE("single-point coverage") {
    const auto r = run_cli("coverage --theta-db 0");
    CHECK(r.exit_code == 0);
    const auto csv = parse_csv(r.out);
    REQUIRE(csv.header == std::vector<std::string>{"theta_db", "closed_form"});
    REQUIRE(csv.rows.size() == 1);
    CHECK(csv.rows[0][0] == 0.0);
    CHECK(csv.rows[0][1] ==
          doctest::Approx(kRayleighBaseline).epsilon(1e-9));
}

TEST_CASE("default sweep spans -10..20 dB in 31 rows") {
    const auto r = run_cli("coverage");
    CHECK(r.exit_code == 0);
    const auto csv = parse_csv(r.out);
    REQUIRE(csv.rows.size() == 31);
    CHECK(csv.rows.front()[0] == -10.0);
    CHECK(csv.rows.back()[0] == 20.0);
    double prev = 1.1;
    for (const auto& row : csv.rows) {
        CHECK(row[1] <= prev + 1e-12);
        prev = row[1];
    }
}

TEST_CASE("radial cross-check column") {
    const auto r = run_cli(
        "coverage --theta-db 3 --check "
        "--desired kms:kappa=1,mu=2,m=1,sigma_db=4");
    CHECK(r.exit_code == 0);
    const auto csv = parse_csv(r.out);
    REQUIRE(csv.header == std::vector<std::string>{"theta_db", "closed_form",
                                                   "radial_integral"});
    REQUIRE(csv.rows.size() == 1);
    CHECK(std::fabs(csv.rows[0][1] - csv.rows[0][2]) <= 1e-8);
    CHECK(r.err.find("max |closed_form - radial_integral|") !=
          std::string::npos);
}

TEST_CASE("monte carlo columns are reproducible") {
    const std::string args =
        "coverage --theta-db 0 --mc --realizations 20000 --seed 42 "
        "--workers 2";
    const auto a = run_cli(args);
    const auto b = run_cli(args);
    CHECK(a.exit_code == 0);
    CHECK(a.out == b.out);

    const auto csv = parse_csv(a.out);
    REQUIRE(csv.header ==
            std::vector<std::string>{"theta_db", "closed_form", "mc_estimate",
                                     "mc_ci_halfwidth"});
    CHECK(std::fabs(csv.rows[0][2] - csv.rows[0][1]) <= 0.02);
    CHECK(csv.rows[0][3] > 0.0);

    // the thread cap only changes scheduling, never the estimate
    const auto capped = run_cli(args, "PPPCOV_THREADS=1 ");
    CHECK(capped.out == a.out);
}

TEST_CASE("pdf without shadowing is the base mixture density") {
    const auto r = run_cli(
        "pdf --desired kms:kappa=1,mu=1,m=1 --h-min 0.5 --h-max 4 "
        "--points 8");
    CHECK(r.exit_code == 0);
    const auto csv = parse_csv(r.out);
    REQUIRE(csv.header == std::vector<std::string>{"h", "pdf_ghq"});
    REQUIRE(csv.rows.size() == 8);
    for (const auto& row : csv.rows)
        CHECK(row[1] == doctest::Approx(std::exp(-row[0])).epsilon(1e-10));
}

TEST_CASE("pdf column integrates to one") {
    const auto r = run_cli(
        "pdf --desired kms:kappa=1,mu=2,m=1,sigma_db=4 --h-min 0.001 "
        "--h-max 30 --points 2000");
    CHECK(r.exit_code == 0);
    const auto csv = parse_csv(r.out);
    double integral = 0.0;
    for (size_t i = 1; i < csv.rows.size(); ++i)
        integral += 0.5 * (csv.rows[i][1] + csv.rows[i - 1][1]) *
                    (csv.rows[i][0] - csv.rows[i - 1][0]);
    CHECK(integral >= 0.99);
    CHECK(integral <= 1.01);
}

TEST_CASE("pdf exact columns agree with the approximation") {
    const auto r = run_cli(
        "pdf --desired kms:kappa=1,mu=2,m=1,sigma_db=4 --exact "
        "--points 60");
    CHECK(r.exit_code == 0);
    const auto csv = parse_csv(r.out);
    REQUIRE(csv.header == std::vector<std::string>{"h", "pdf_ghq",
                                                   "pdf_exact", "abs_err"});
    double max_err = 0.0;
    for (const auto& row : csv.rows) {
        CHECK(row[3] == doctest::Approx(std::fabs(row[1] - row[2]))
                            .epsilon(1e-9));
        max_err = std::max(max_err, row[3]);
    }
    CHECK(max_err <= 1e-3);
    CHECK(r.err.find("max abs_err") != std::string::npos);
}

TEST_CASE("config file drives a run and flags win over it") {
    const std::string path = "cli_cfg_good.ini";
    {
        std::ofstream cfg(path);
        cfg << "# coverage point\n"
            << "theta_db = 10\n"
            << "desired = kms:kappa=1,mu=1,m=1\n"
            << "interferer = rayleigh\n";
    }
    const auto from_file = run_cli("coverage --config " + path);
    CHECK(from_file.exit_code == 0);
    const auto csv = parse_csv(from_file.out);
    REQUIRE(csv.rows.size() == 1);
    CHECK(csv.rows[0][0] == 10.0);

    const auto overridden =
        run_cli("coverage --config " + path + " --theta-db 0");
    const auto csv2 = parse_csv(overridden.out);
    REQUIRE(csv2.rows.size() == 1);
    CHECK(csv2.rows[0][0] == 0.0);
    CHECK(csv2.rows[0][1] ==
          doctest::Approx(kRayleighBaseline).epsilon(1e-9));
    std::remove(path.c_str());
}

TEST_CASE("config file errors carry the line number") {
    const std::string path = "cli_cfg_bad.ini";
    {
        std::ofstream cfg(path);
        cfg << "theta_db = 10\n"
            << "\n"
            << "bogus = 1\n";
    }
    const auto r = run_cli("coverage --config " + path);
    CHECK(r.exit_code == 1);
    CHECK(r.err.find(path + ":3") != std::string::npos);
    CHECK(r.err.find("unknown key 'bogus'") != std::string::npos);

    {
        std::ofstream cfg(path);
        cfg << "theta_db ten\n";
    }
    const auto bad_syntax = run_cli("coverage --config " + path);
    CHECK(bad_syntax.exit_code == 1);
    CHECK(bad_syntax.err.find(path + ":1") != std::string::npos);
    std::remove(path.c_str());
}

TEST_CASE("domain violations exit with code 1") {
    const auto r =
        run_cli("coverage --theta-db 0 --path-loss-exponent 1.5");
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("path_loss_exponent must exceed 2") !=
          std::string::npos);

    const auto bad_model = run_cli("coverage --interferer rice");
    CHECK(bad_model.exit_code == 1);

    const auto bad_format = run_cli("coverage --theta-db 0 --format xml");
    CHECK(bad_format.exit_code == 1);
}

TEST_CASE("unwritable output exits with code 3") {
    const auto r = run_cli(
        "coverage --theta-db 0 --output /nonexistent-dir-pppcov/out.csv");
    CHECK(r.exit_code == 3);
}

TEST_CASE("json output mirrors the csv fields") {
    const auto r = run_cli("coverage --theta-db 0 --format json");
    CHECK(r.exit_code == 0);
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(doc["command"] == "coverage");
    REQUIRE(doc["columns"].size() == 2);
    CHECK(doc["columns"][0] == "theta_db");
    REQUIRE(doc["rows"].size() == 1);
    CHECK(double(doc["rows"][0]["closed_form"]) ==
          doctest::Approx(kRayleighBaseline).epsilon(1e-9));
}

TEST_CASE("output lands in the requested file") {
    const std::string path = "cli_point.csv";
    const auto r =
        run_cli("coverage --theta-db 0 --output " + path);
    CHECK(r.exit_code == 0);
    CHECK(r.out.empty());
    const auto csv = parse_csv(slurp(path));
    REQUIRE(csv.rows.size() == 1);
    CHECK(csv.rows[0][1] ==
          doctest::Approx(kRayleighBaseline).epsilon(1e-9));
    std::remove(path.c_str());
}

TEST_CASE("validation suite reporting contract") {
    const auto r = run_cli("validate --quick --seed 1");
    const auto lines = lines_of(r.out);
    REQUIRE(lines.size() >= 2);
    bool any_fail = false;
    int criteria = 0;
    for (size_t i = 0; i + 1 < lines.size(); ++i) {
        const auto& line = lines[i];
        const bool tagged = line.rfind("PASS ", 0) == 0 ||
                            line.rfind("FAIL ", 0) == 0 ||
                            line.rfind("SKIP ", 0) == 0;
        CHECK(tagged);
        if (tagged) ++criteria;
        any_fail = any_fail || line.rfind("FAIL ", 0) == 0;
    }
    CHECK(criteria == 10);
    const auto& last = lines.back();
    if (any_fail) {
        CHECK(r.exit_code == 2);
        CHECK(last.find("criteria FAILED") != std::string::npos);
    } else {
        CHECK(r.exit_code == 0);
        CHECK(last.find("all criteria passed") != std::string::npos);
    }
    // quick mode must skip the Monte Carlo criteria
    CHECK(r.out.find("SKIP sampler_ks") != std::string::npos);
    CHECK(r.out.find("SKIP closed_vs_mc") != std::string::npos);

    const auto bad = run_cli("validate --quick --path-loss-exponent 1.5");
    CHECK(bad.exit_code == 1);
}
