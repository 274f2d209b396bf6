#include "origami/driver.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "origami/datapath.hpp"
#include "origami/golden.hpp"
#include "origami/mapper.hpp"
#include "origami/parallel.hpp"
#include "origami/rng.hpp"
#include "origami/tensor_io.hpp"
#include "origami/trace_io.hpp"

namespace origami {

namespace {

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    os << text;
    if (!os) throw std::runtime_error("write to " + path.string() + " failed");
}

}  // namespace

FilterSet random_filters(const LayerSpec& layer, const QFormat& fmt, std::uint64_t seed) {
    FilterSet f = FilterSet::zeros_fixed(layer.out_channels, layer.in_channels, layer.kernel_h,
                                         layer.kernel_w, fmt);
    Rng rng(seed);
    for (auto& w : f.weight_codes) w = rng.code(fmt);
    for (auto& b : f.bias_codes) b = rng.code(fmt);
    return f;
}

FeatureMap random_input(int channels, int h, int w, const QFormat& fmt, std::uint64_t seed) {
    FeatureMap m = FeatureMap::zeros_fixed(channels, h, w, fmt);
    Rng rng(seed);
    for (auto& c : m.codes) c = rng.code(fmt);
    return m;
}

NetworkReport run_estimate(const NetworkConfig& cfg, const EstimateOptions& opt) {
    const std::vector<LayerSpec> layers = cfg.layer_specs();
    const NetworkReport rep = network_report(layers, cfg.chip);
    std::optional<SystemBandwidth> sys;
    if (cfg.system && !layers.empty())
        sys = system_bandwidth(*cfg.system, layers.front(), cfg.chip);
    std::filesystem::create_directories(opt.out_dir);
    if (opt.json) write_text_file(opt.out_dir / "estimate.json", report_json(rep, sys, opt.seed));
    if (opt.csv) write_text_file(opt.out_dir / "estimate.csv", report_csv(rep));
    return rep;
}

SimulateSummary run_simulate(const NetworkConfig& cfg, const SimulateOptions& opt) {
    const std::vector<LayerSpec> layers = cfg.layer_specs();
    const QFormat fmt = cfg.chip.fmt;

    FeatureMap x;
    if (opt.input.empty()) {
        x = random_input(cfg.in_channels, cfg.input_h, cfg.input_w, fmt,
                         derive_seed(opt.seed, 0xface));
    } else {
        x = read_tensor(opt.input, fmt);
        if (x.kind == ElemKind::real) x = to_fixed(x, fmt);
        if (x.channels != cfg.in_channels || x.height != cfg.input_h || x.width != cfg.input_w)
            throw std::invalid_argument(
                "input tensor is " + std::to_string(x.channels) + "x" + std::to_string(x.height) +
                "x" + std::to_string(x.width) + " but the config expects " +
                std::to_string(cfg.in_channels) + "x" + std::to_string(cfg.input_h) + "x" +
                std::to_string(cfg.input_w));
    }

    std::filesystem::create_directories(opt.out_dir);
    SimulateSummary sum;
    sum.seed = opt.seed;
    nlohmann::json jstages = nlohmann::json::array();

    for (std::size_t l = 0; l < layers.size(); ++l) {
        const LayerSpec& spec = layers[l];
        const LayerConfig& lc = cfg.layers[l];
        FilterSet filters;
        if (lc.weights == "random") {
            filters = random_filters(spec, fmt, derive_seed(opt.seed, l + 1));
        } else {
            const FeatureMap wt = read_tensor(lc.weights, fmt);
            if (wt.channels != spec.out_channels * spec.in_channels ||
                wt.height != spec.kernel_h || wt.width != spec.kernel_w)
                throw std::invalid_argument("layer " + std::to_string(l + 1) + " weights `" +
                                            lc.weights + "`: expected dims " +
                                            std::to_string(spec.out_channels * spec.in_channels) +
                                            "x" + std::to_string(spec.kernel_h) + "x" +
                                            std::to_string(spec.kernel_w));
            filters = FilterSet::zeros_fixed(spec.out_channels, spec.in_channels, spec.kernel_h,
                                             spec.kernel_w, fmt);
            const FeatureMap wf = wt.kind == ElemKind::real ? to_fixed(wt, fmt) : wt;
            filters.weight_codes.assign(wf.codes.begin(), wf.codes.end());
        }
        if (lc.bias == "random") {
            if (lc.weights != "random") {
                Rng rng(derive_seed(opt.seed, 0xb1a5 + l));
                for (auto& b : filters.bias_codes) b = rng.code(fmt);
            }
        } else {
            const FeatureMap bt = read_tensor(lc.bias, fmt);
            if (int(bt.size()) != spec.out_channels)
                throw std::invalid_argument("layer " + std::to_string(l + 1) + " bias `" +
                                            lc.bias + "`: expected " +
                                            std::to_string(spec.out_channels) + " values");
            const FeatureMap bf = bt.kind == ElemKind::real ? to_fixed(bt, fmt) : bt;
            filters.bias_codes.assign(bf.codes.begin(), bf.codes.end());
        }

        LayerRunResult run = run_layer(x, spec, filters, cfg.chip, opt.trace);
        sum.total_cycles += run.total_cycles;
        if (opt.trace) {
            for (std::size_t j = 0; j < run.traces.size(); ++j) {
                const std::string base =
                    "trace_stage" + std::to_string(l + 1) + "_job" + std::to_string(j);
                write_trace_text(opt.out_dir / (base + ".txt"), run.traces[j],
                                 fmt.total_bits);
                write_trace_binary(opt.out_dir / (base + ".bin"), run.traces[j]);
            }
        }
        x = pool_and_activate(run.output, spec);
        write_tensor(opt.out_dir / ("stage" + std::to_string(l + 1) + "_output.ogmi"), x);
        jstages.push_back({{"stage", l + 1},
                           {"jobs", run.job_cycles.size()},
                           {"cycles", run.total_cycles},
                           {"out_channels", x.channels},
                           {"out_h", x.height},
                           {"out_w", x.width}});
    }

    sum.stages = static_cast<int>(layers.size());
    sum.runtime_ms = double(sum.total_cycles) / (cfg.chip.f_mhz * 1e6) * 1e3;
    nlohmann::json j{{"seed", opt.seed},
                     {"stages", jstages},
                     {"total_cycles", sum.total_cycles},
                     {"runtime_ms", sum.runtime_ms}};
    write_text_file(opt.out_dir / "simulate.json", j.dump(2) + "\n");
    return sum;
}

bool verify_tile_trial(std::uint64_t trial_seed, const QFormat& fmt, double f_mhz,
                       std::string* mismatch_detail, const QFormat* oracle_fmt_override) {
    Rng rng(trial_seed);
    static constexpr int kNch[] = {2, 4, 8};
    static constexpr int kKernel[] = {3, 5, 7};
    ChipParams chip;
    chip.n_ch = kNch[rng.uniform(0, 2)];
    chip.h_k = chip.w_k = kKernel[rng.uniform(0, 2)];
    chip.h_in_max = 64;
    chip.f_mhz = f_mhz;
    chip.fmt = fmt;
    const int h = static_cast<int>(rng.uniform(chip.h_k, 64));
    const int w = static_cast<int>(rng.uniform(chip.w_k, 64));

    // full-range codes: the bit-exact comparison must cover overflow and
    // wrap behavior of the chain
    FeatureMap stripe = FeatureMap::zeros_fixed(chip.n_ch, h, w, fmt);
    for (auto& c : stripe.codes) c = rng.code(fmt);
    FilterSet filters = FilterSet::zeros_fixed(chip.n_ch, chip.n_ch, chip.h_k, chip.w_k, fmt);
    for (auto& v : filters.weight_codes) v = rng.code(fmt);

    auto fail = [&](const std::string& msg) {
        if (mismatch_detail)
            *mismatch_detail = "seed " + std::to_string(trial_seed) + ": " + msg +
                               " (n_ch=" + std::to_string(chip.n_ch) +
                               " kernel=" + std::to_string(chip.h_k) +
                               " stripe=" + std::to_string(h) + "x" + std::to_string(w) + ")";
        return false;
    };

    ChipSim sim(chip);
    sim.load_filters(filters, 0, 0);
    const TileResult tile = sim.simulate_tile(stripe, /*record_trace=*/false);

    ChipParams oracle_chip = chip;
    FeatureMap oracle_stripe = stripe;
    FilterSet oracle_filters = filters;
    if (oracle_fmt_override) {
        // negative-control hook: run the oracle under different
        // truncation semantics on the same codes
        oracle_chip.fmt = *oracle_fmt_override;
        oracle_stripe.fmt = *oracle_fmt_override;
        oracle_filters.fmt = *oracle_fmt_override;
    }
    const FeatureMap want =
        conv_fixed_chain(oracle_stripe, oracle_filters, oracle_chip, oracle_chip.fmt);

    for (int o = 0; o < chip.n_ch; ++o)
        for (int j = 0; j < tile.out_rows; ++j)
            for (int i = 0; i < tile.out_cols; ++i)
                if (tile.at(o, j, i) != want.q(o, j, i))
                    return fail("output (" + std::to_string(o) + "," + std::to_string(j) + "," +
                                std::to_string(i) + ") simulator " +
                                std::to_string(tile.at(o, j, i)) + " != oracle " +
                                std::to_string(want.q(o, j, i)));

    const CyclesBreakdown expect = tile_cycles_closed_form(chip, h, w);
    if (tile.cycles.total != expect.total ||
        tile.cycles.total != std::int64_t(chip.n_ch) * h * w + chip.filter_words())
        return fail("cycle count " + std::to_string(tile.cycles.total) + " != closed form " +
                    std::to_string(expect.total));

    // utilization identity: ops/(peak*runtime) == eta_border*eta_filter_load
    const double ops = 2.0 * chip.n_ch * chip.n_ch * chip.h_k * chip.w_k *
                       double(tile.out_rows) * tile.out_cols;
    const double peak_ops_per_cycle = 2.0 * chip.n_ch * chip.h_k * chip.w_k;
    const double util = ops / (peak_ops_per_cycle * double(tile.cycles.total));
    const double eta = eta_border(h, w, chip.h_k, chip.w_k) * eta_filter_load(h, w, chip);
    if (std::abs(util - eta) > 1e-12 * std::max(std::abs(util), std::abs(eta)))
        return fail("utilization " + std::to_string(util) + " != eta product " +
                    std::to_string(eta));

    // structural check against the real-valued convolution on scaled-down
    // data that cannot overflow anywhere in the chain: the chain then
    // differs only by the per-channel SoP truncations, each in (-2^-f, 0]
    const double lim_f = std::sqrt(double(fmt.max_raw()) * std::ldexp(1.0, fmt.frac_bits) /
                                   (double(chip.h_k) * chip.w_k * chip.n_ch));
    const std::int64_t lim = std::min<std::int64_t>(fmt.max_raw(), std::int64_t(lim_f));
    if (lim >= 1) {
        FeatureMap small_x = stripe;
        for (auto& c : small_x.codes) c = static_cast<std::int32_t>(rng.uniform(-lim, lim));
        FilterSet small_f = filters;
        for (auto& v : small_f.weight_codes)
            v = static_cast<std::int32_t>(rng.uniform(-lim, lim));
        const FeatureMap chain = conv_fixed_chain(small_x, small_f, chip, fmt);
        FilterSet freal = FilterSet::zeros_real(chip.n_ch, chip.n_ch, chip.h_k, chip.w_k);
        for (std::size_t k = 0; k < small_f.weight_codes.size(); ++k)
            freal.weights[k] = dequantize_raw(small_f.weight_codes[k], fmt);
        const FeatureMap yreal = conv_real(to_real(small_x), freal);
        const double step = fmt.resolution();
        for (int o = 0; o < chip.n_ch; ++o)
            for (int j = 0; j < tile.out_rows; ++j)
                for (int i = 0; i < tile.out_cols; ++i) {
                    const double diff = dequantize_raw(chain.q(o, j, i), fmt) - yreal.r(o, j, i);
                    if (!(diff <= 0.0 && diff > -double(chip.n_ch) * step))
                        return fail("real-convolution bound violated at (" + std::to_string(o) +
                                    "," + std::to_string(j) + "," + std::to_string(i) +
                                    "): diff=" + std::to_string(diff));
                }
    }
    return true;
}

VerifyResult run_verify(const NetworkConfig& cfg, const VerifyOptions& opt) {
    VerifyResult res;
    res.trials = opt.trials;
    std::vector<std::string> fails(opt.trials);
    std::vector<char> ok(opt.trials, 1);
    parallel_for(opt.trials, [&](std::size_t t) {
        const std::uint64_t trial_seed = derive_seed(opt.seed, t);
        std::string detail;
        if (!verify_tile_trial(trial_seed, cfg.chip.fmt, cfg.chip.f_mhz, &detail)) {
            ok[t] = 0;
            fails[t] = detail;
        }
    });
    for (std::size_t t = 0; t < opt.trials; ++t) {
        if (!ok[t]) {
            ++res.failures;
            if (res.first_fail_detail.empty()) {
                res.first_fail_seed = derive_seed(opt.seed, t);
                res.first_fail_detail = fails[t];
            }
        }
    }
    return res;
}

}  // namespace origami
