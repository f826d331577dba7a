#include "dualflow/errors.hpp"
#include "dualflow/execute.hpp"
#include "dualflow/simd/kernels.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

using namespace dualflow;

namespace {

int run_config(const std::string& path, std::optional<RunMode> force) {
    RunManifest man;
    try {
        man = load_config(path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    if (force) man.mode = *force;
    try {
        const int code = execute(man);
        if (code != kExitOk) std::cerr << "run failed (exit " << code << "), see " << OutputPaths{man.out}.failure() << "\n";
        return code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
}

// Closed-form spherical solution: T* and Theta at a few times.
int spherical(double r0, int samples) {
    if (!(r0 > 0.0)) {
        std::cerr << "error: --r0 must be positive\n";
        return kExitUsage;
    }
    const double T = spherical_Tstar(r0);
    std::printf("r0 = %.17g\nT_star = %.17g\n# t Theta\n", r0, T);
    for (int i = 0; i < samples; ++i) {
        const double t = T * i / samples;
        std::printf("%.17g %.17g\n", t, spherical_theta(t, r0));
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Curvature flows of convex graphs in hyperbolic space and their de Sitter duals"};
    app.require_subcommand(1);
    std::string simd;
    app.add_option("--simd", simd, "kernel table: scalar or avx2 (default: best available)");

    std::string cfg;
    auto* run = app.add_subcommand("run", "run the flow described by a config file");
    run->add_option("config", cfg, "config file")->required();

    auto* verify = app.add_subcommand("verify", "static checks of the initial datum and curvature function");
    verify->add_option("config", cfg, "config file")->required();

    double r0 = 1.0;
    int samples = 10;
    auto* sph = app.add_subcommand("spherical", "closed-form spherical solution");
    sph->add_option("--r0", r0, "initial radius")->required();
    sph->add_option("--samples", samples, "number of time samples")->check(CLI::PositiveNumber);

    std::string dir;
    auto* sw = app.add_subcommand("sweep", "run every config in a directory");
    sw->add_option("dir", dir, "directory")->required()->check(CLI::ExistingDirectory);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }
    if (!simd.empty()) {
        if (!simd::select_kernels(simd)) {
            std::cerr << "error: kernel table '" << simd << "' is not available\n";
            return kExitUsage;
        }
    }

    if (*run) return run_config(cfg, std::nullopt);
    if (*verify) return run_config(cfg, RunMode::Verify);
    if (*sph) return spherical(r0, samples);
    if (*sw) {
        try {
            return sweep(dir, std::cout);
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return kExitUsage;
        }
    }
    return kExitUsage;
}
