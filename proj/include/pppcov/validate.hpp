#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace pppcov::validate {

struct Options {
    bool quick = false; // skip Monte Carlo criteria
    std::uint64_t seed = 1;
    int workers = 0;
};

struct CriterionResult {
    std::string name;
    bool pass = false;
    bool skipped = false;
    std::string detail;
    double seconds = 0.0;
};

// Fixed criterion order, as reported by run_suite.
const std::vector<std::string>& criterion_names();

// Runs one named criterion; throws std::invalid_argument on unknown names.
CriterionResult run_criterion(const std::string& name, const Options& opt);

// Runs the whole suite, streaming one PASS/FAIL/SKIP line per criterion.
std::vector<CriterionResult> run_suite(const Options& opt, std::ostream& out);

} // namespace pppcov::validate
