// Command-line front end. Links the C API only; exit codes: 0 success,
// 1 verification failure, 2 configuration or usage error.

#include <cstdio>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "origami.h"

namespace {

struct NetCloser {
    void operator()(ogmi_net* n) const { ogmi_net_close(n); }
};
using NetHandle = std::unique_ptr<ogmi_net, NetCloser>;

NetHandle open_net(const std::string& config) {
    ogmi_net* raw = nullptr;
    if (ogmi_net_open(config.c_str(), &raw) != OGMI_OK) {
        std::fprintf(stderr, "origami: %s\n", ogmi_last_error());
        return nullptr;
    }
    return NetHandle(raw);
}

int exit_code(ogmi_status s) {
    if (s == OGMI_OK) return 0;
    return s == OGMI_E_VERIFY ? 1 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"origami accelerator simulator and performance model"};
    app.require_subcommand(1);

    std::string config;
    std::string out_dir = ".";
    std::string input;
    std::string format;
    std::uint64_t seed = 1;
    std::uint64_t trials = 1000;
    bool trace = false;

    CLI::App* est = app.add_subcommand("estimate", "analytic throughput/bandwidth report");
    est->add_option("--config", config, "network configuration file")->required();
    est->add_option("--out", out_dir, "output directory");
    est->add_option("--format", format, "json|csv (default: both)")
        ->check(CLI::IsMember({"json", "csv"}));

    CLI::App* sim = app.add_subcommand("simulate", "cycle-level simulation of the network");
    sim->add_option("--config", config, "network configuration file")->required();
    sim->add_option("--input", input, "input tensor (.ogmi); omit for seeded random");
    sim->add_option("--out", out_dir, "output directory");
    sim->add_option("--seed", seed, "seed for random weights/input");
    sim->add_flag("--trace", trace, "write per-job bus traces");

    CLI::App* ver = app.add_subcommand("verify", "randomized simulator-vs-oracle check");
    ver->add_option("--config", config, "network configuration file")->required();
    ver->add_option("--trials", trials, "number of random tiles");
    ver->add_option("--seed", seed, "master seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    NetHandle net = open_net(config);
    if (!net) return 2;

    if (est->parsed()) {
        ogmi_perf_totals totals{};
        const ogmi_status s = ogmi_estimate(net.get(), out_dir.c_str(),
                                            format.empty() ? nullptr : format.c_str(), &totals);
        if (s != OGMI_OK) {
            std::fprintf(stderr, "origami estimate: %s: %s\n", ogmi_status_name(s),
                         ogmi_net_error(net.get()));
            return exit_code(s);
        }
        std::printf("estimate: %d stages, %lld ops, %.3f ms/frame\n", totals.stages,
                    static_cast<long long>(totals.total_ops), totals.runtime_ms);
        std::printf("estimate: %.1f GOp/s average, %.1f frame/s\n", totals.avg_throughput_gops,
                    totals.frame_rate_fps);
        std::printf("reports written to %s\n", out_dir.c_str());
        return 0;
    }

    if (sim->parsed()) {
        ogmi_sim_summary summary{};
        const ogmi_status s = ogmi_simulate(net.get(), input.empty() ? nullptr : input.c_str(),
                                            out_dir.c_str(), seed, trace ? 1 : 0, &summary);
        if (s != OGMI_OK) {
            std::fprintf(stderr, "origami simulate: %s: %s\n", ogmi_status_name(s),
                         ogmi_net_error(net.get()));
            return exit_code(s);
        }
        std::printf("simulate: %d stages, %lld cycles, %.3f ms at the configured clock (seed %llu)\n",
                    summary.stages, static_cast<long long>(summary.total_cycles),
                    summary.runtime_ms, static_cast<unsigned long long>(summary.seed));
        std::printf("outputs written to %s\n", out_dir.c_str());
        return 0;
    }

    ogmi_verify_summary summary{};
    const ogmi_status s = ogmi_verify(net.get(), trials, seed, &summary);
    if (s == OGMI_OK) {
        std::printf("verify: %llu/%llu tiles bit-exact\n",
                    static_cast<unsigned long long>(summary.trials - summary.failures),
                    static_cast<unsigned long long>(summary.trials));
        return 0;
    }
    if (s == OGMI_E_VERIFY) {
        std::printf("verify: %llu/%llu tiles bit-exact, %llu FAILED\n",
                    static_cast<unsigned long long>(summary.trials - summary.failures),
                    static_cast<unsigned long long>(summary.trials),
                    static_cast<unsigned long long>(summary.failures));
        std::printf("first failure: %s\n", summary.first_fail_detail);
        return 1;
    }
    std::fprintf(stderr, "origami verify: %s: %s\n", ogmi_status_name(s),
                 ogmi_net_error(net.get()));
    return exit_code(s);
}
