// Acceptance-criteria runner. With no arguments it runs the whole suite;
// with one argument it runs a single named criterion (one per ctest entry).
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <iostream>
#include <string>

#include "pppcov/validate.hpp"

namespace {

int env_thread_cap() {
    const char* env = std::getenv("PPPCOV_THREADS");
    if (!env) return 0;
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1) return 0;
    return int(v);
}

} // namespace

int main(int argc, char** argv) {
    pppcov::validate::Options opt;
    opt.workers = env_thread_cap();

    bool quick = false;
    std::string single;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--quick") == 0)
            quick = true;
        else if (std::strcmp(argv[i], "--list") == 0) {
            for (const auto& n : pppcov::validate::criterion_names())
                std::puts(n.c_str());
            return 0;
        } else
            single = argv[i];
    }
    opt.quick = quick;

    try {
        if (!single.empty()) {
            const auto r = pppcov::validate::run_criterion(single, opt);
            const char* tag = r.skipped ? "SKIP" : (r.pass ? "PASS" : "FAIL");
            std::printf("%s %s: %s [%.1fs]\n", tag, r.name.c_str(),
                        r.detail.c_str(), r.seconds);
            return (r.pass || r.skipped) ? 0 : 1;
        }
        const auto results = pppcov::validate::run_suite(opt, std::cout);
        bool all = true;
        for (const auto& r : results) all = all && (r.pass || r.skipped);
        std::printf("%s\n", all ? "all criteria passed" : "criteria FAILED");
        return all ? 0 : 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
