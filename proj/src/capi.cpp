#include "origami.h"

#include <cstring>
#include <sstream>
#include <string>

#include "origami/driver.hpp"
#include "origami/netconfig.hpp"

using namespace origami;

struct ogmi_net {
    NetworkConfig cfg;
    std::string error;
};

namespace {

thread_local std::string g_last_error;

ogmi_status classify(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e)) return OGMI_E_CONFIG;
    if (dynamic_cast<const std::invalid_argument*>(&e)) return OGMI_E_INVALID;
    return OGMI_E_RUN;
}

template <typename Fn>
ogmi_status guarded(ogmi_net* net, Fn&& fn) {
    net->error.clear();
    try {
        return fn();
    } catch (const std::ios_base::failure& e) {
        net->error = e.what();
        return OGMI_E_IO;
    } catch (const std::exception& e) {
        net->error = e.what();
        const std::string what = e.what();
        if (what.find("cannot open") != std::string::npos ||
            what.find("read_tensor") != std::string::npos ||
            what.find("write") != std::string::npos)
            return OGMI_E_IO;
        return classify(e);
    }
}

}  // namespace

extern "C" {

const char* ogmi_version(void) { return "1.0.0"; }

const char* ogmi_status_name(ogmi_status s) {
    switch (s) {
        case OGMI_OK: return "ok";
        case OGMI_E_INVALID: return "invalid argument";
        case OGMI_E_CONFIG: return "configuration error";
        case OGMI_E_IO: return "i/o error";
        case OGMI_E_VERIFY: return "verification failure";
        case OGMI_E_RUN: return "run failure";
    }
    return "unknown";
}

ogmi_status ogmi_net_open(const char* config_path, ogmi_net** out) {
    if (!out) return OGMI_E_INVALID;
    *out = nullptr;
    if (!config_path) {
        g_last_error = "config_path is null";
        return OGMI_E_INVALID;
    }
    try {
        auto net = new ogmi_net{load_network_config(config_path), {}};
        *out = net;
        return OGMI_OK;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return OGMI_E_CONFIG;
    }
}

ogmi_status ogmi_net_parse(const char* text, ogmi_net** out) {
    if (!out) return OGMI_E_INVALID;
    *out = nullptr;
    if (!text) {
        g_last_error = "text is null";
        return OGMI_E_INVALID;
    }
    try {
        std::istringstream is{std::string(text)};
        auto net = new ogmi_net{parse_network_config(is, "<string>"), {}};
        *out = net;
        return OGMI_OK;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return OGMI_E_CONFIG;
    }
}

void ogmi_net_close(ogmi_net* net) { delete net; }

const char* ogmi_net_error(const ogmi_net* net) { return net ? net->error.c_str() : ""; }

const char* ogmi_last_error(void) { return g_last_error.c_str(); }

int32_t ogmi_net_stage_count(const ogmi_net* net) {
    return net ? static_cast<int32_t>(net->cfg.layers.size()) : -1;
}

ogmi_status ogmi_estimate(ogmi_net* net, const char* out_dir, const char* formats,
                          ogmi_perf_totals* totals) {
    if (!net || !out_dir) return OGMI_E_INVALID;
    return guarded(net, [&]() {
        EstimateOptions opt;
        opt.out_dir = out_dir;
        if (formats) {
            const std::string f = formats;
            opt.json = f.find("json") != std::string::npos;
            opt.csv = f.find("csv") != std::string::npos;
            if (!opt.json && !opt.csv) {
                net->error = "formats must name json and/or csv, got `" + f + "`";
                return OGMI_E_INVALID;
            }
        }
        const NetworkReport rep = run_estimate(net->cfg, opt);
        if (totals) {
            totals->avg_throughput_gops = rep.avg_throughput_gops;
            totals->frame_rate_fps = rep.frame_rate;
            totals->runtime_ms = rep.total_runtime_ms;
            totals->total_ops = rep.total_ops;
            totals->total_cycles = rep.total_cycles;
            totals->stages = static_cast<int32_t>(rep.stages.size());
        }
        return OGMI_OK;
    });
}

ogmi_status ogmi_simulate(ogmi_net* net, const char* input_path, const char* out_dir,
                          uint64_t seed, int emit_traces, ogmi_sim_summary* summary) {
    if (!net || !out_dir) return OGMI_E_INVALID;
    return guarded(net, [&]() {
        SimulateOptions opt;
        if (input_path) opt.input = input_path;
        opt.out_dir = out_dir;
        opt.seed = seed;
        opt.trace = emit_traces != 0;
        const SimulateSummary s = run_simulate(net->cfg, opt);
        if (summary) {
            summary->stages = s.stages;
            summary->total_cycles = s.total_cycles;
            summary->runtime_ms = s.runtime_ms;
            summary->seed = s.seed;
        }
        return OGMI_OK;
    });
}

ogmi_status ogmi_verify(ogmi_net* net, uint64_t trials, uint64_t seed,
                        ogmi_verify_summary* summary) {
    if (!net) return OGMI_E_INVALID;
    return guarded(net, [&]() {
        const VerifyResult res = run_verify(net->cfg, VerifyOptions{trials, seed});
        if (summary) {
            summary->trials = res.trials;
            summary->failures = res.failures;
            summary->first_fail_seed = res.first_fail_seed;
            std::strncpy(summary->first_fail_detail, res.first_fail_detail.c_str(),
                         sizeof summary->first_fail_detail - 1);
            summary->first_fail_detail[sizeof summary->first_fail_detail - 1] = '\0';
        }
        if (!res.passed()) {
            net->error = res.first_fail_detail;
            return OGMI_E_VERIFY;
        }
        return OGMI_OK;
    });
}

}  // extern "C"
