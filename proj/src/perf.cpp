#include "origami/perf.hpp"

#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "origami/datapath.hpp"
#include "origami/mapper.hpp"

namespace origami {

std::int64_t op_count(const LayerSpec& layer) {
    layer.validate();
    return 2LL * layer.out_channels * layer.in_channels * layer.kernel_h * layer.kernel_w *
           layer.conv_out_h() * layer.conv_out_w();
}

double peak_throughput_gops(const ChipParams& chip) {
    return 2.0 * chip.n_ch * chip.h_k * chip.w_k * chip.f_mhz * 1e6 / 1e9;
}

double eta_border(int h_in, int w_in, int h_k, int w_k) {
    if (h_in < h_k || w_in < w_k)
        throw std::invalid_argument("eta_border: image smaller than kernel");
    return double(h_in - h_k + 1) * double(w_in - w_k + 1) / (double(h_in) * double(w_in));
}

double eta_filter_load(int h_in, int w_in, const ChipParams& chip) {
    const double image = double(chip.n_ch) * h_in * w_in;
    return image / (double(chip.n_ch) * chip.n_ch * chip.h_k * chip.w_k + image);
}

double eta_ch_idle(int n_in, int n_out, int n_ch) {
    if (n_in < 1 || n_out < 1) throw std::invalid_argument("eta_ch_idle: channels must be >= 1");
    const auto blocks = [n_ch](int n) { return (n + n_ch - 1) / n_ch; };
    return double(n_in) * n_out /
           (double(blocks(n_in)) * n_ch * double(blocks(n_out)) * n_ch);
}

StageReport layer_report(const LayerSpec& layer, const ChipParams& chip) {
    StageReport r;
    r.layer = layer;
    r.eta_ch_idle = eta_ch_idle(layer.in_channels, layer.out_channels, chip.n_ch);
    r.eta_filter_load = eta_filter_load(layer.input_h, layer.input_w, chip);
    r.eta_border = eta_border(layer.input_h, layer.input_w, layer.kernel_h, layer.kernel_w);
    r.eta_total = r.eta_ch_idle * r.eta_filter_load * r.eta_border;
    r.ops = op_count(layer);
    const LayerPlan plan = plan_layer(layer, chip);
    for (const TileJob& job : plan.jobs) {
        const StripeSpec& s = plan.stripes[std::size_t(job.stripe)];
        r.cycles += tile_cycles_closed_form(chip, s.h_in, plan.fed_width).total;
    }
    r.runtime_ms = double(r.cycles) / (chip.f_mhz * 1e6) * 1e3;
    r.throughput_gops = double(r.ops) / (r.runtime_ms * 1e-3) / 1e9;
    return r;
}

NetworkReport network_report(const std::vector<LayerSpec>& layers, const ChipParams& chip) {
    NetworkReport rep;
    for (std::size_t l = 0; l < layers.size(); ++l) {
        StageReport r = layer_report(layers[l], chip);
        r.stage = static_cast<int>(l + 1);
        rep.total_ops += r.ops;
        rep.total_cycles += r.cycles;
        rep.total_runtime_ms += r.runtime_ms;
        rep.stages.push_back(std::move(r));
    }
    if (rep.total_runtime_ms > 0.0) {
        rep.avg_throughput_gops = double(rep.total_ops) / (rep.total_runtime_ms * 1e-3) / 1e9;
        rep.frame_rate = 1e3 / rep.total_runtime_ms;
    }
    return rep;
}

double io_bandwidth_mb_s(const ChipParams& chip) {
    return chip.fmt.total_bits * chip.f_mhz * 1e6 / 8.0 / 1e6;
}

BandwidthEfficiency bandwidth_efficiency(const ChipParams& chip) {
    const double bw_gb = io_bandwidth_mb_s(chip) / 1e3;
    const double peak = peak_throughput_gops(chip);
    BandwidthEfficiency e;
    if (bw_gb > 0.0) e.gop_per_gb = peak / bw_gb;
    if (peak > 0.0) e.mb_per_gop = io_bandwidth_mb_s(chip) / peak;
    return e;
}

double mb_per_gop(double bandwidth_mb_s, double throughput_gops) {
    if (throughput_gops <= 0.0) throw std::invalid_argument("mb_per_gop: throughput must be > 0");
    return bandwidth_mb_s / throughput_gops;
}

SystemBandwidth system_bandwidth(const SystemConfig& sys, const LayerSpec& stage,
                                 const ChipParams& chip) {
    if (sys.n_chips < 1) throw std::invalid_argument("system_bandwidth: need at least one chip");
    if (sys.pairing && sys.n_chips % 2 != 0)
        throw std::invalid_argument("system_bandwidth: pairing requires an even chip count");
    stage.validate();
    SystemBandwidth b;
    const double per_dir = sys.bus_bits * sys.bus_mhz * 1e6 / 8.0 / 1e6;  // MB/s per chip
    const int streams = sys.pairing ? sys.n_chips / 2 : sys.n_chips;
    b.input_read = streams * per_dir;
    b.filter_reload = sys.n_chips * per_dir;
    const int in_blocks = (stage.in_channels + chip.n_ch - 1) / chip.n_ch;
    const int pool_area = sys.pool ? sys.pool->ph * sys.pool->pw : 1;
    if (in_blocks > 1) {
        // chip outputs are partial sums: written back, re-read for the
        // reduction, and the reduced (activated/pooled) result written
        b.partial_write = streams * per_dir;
        b.partial_reread = streams * per_dir;
        b.pooled_write = streams * per_dir / pool_area;
        b.total = b.input_read + b.partial_write + b.partial_reread + b.pooled_write;
    } else {
        // single input block: outputs are final and stream through
        // activation/pooling on the fly
        b.pooled_write = streams * per_dir / pool_area;
        b.total = b.input_read + b.pooled_write;
    }
    return b;
}

double scale_power_mw(double p_mw, double v_old, double v_new, double len_old_nm,
                      double len_new_nm) {
    if (p_mw < 0.0 || v_old <= 0.0 || v_new <= 0.0 || len_old_nm <= 0.0 || len_new_nm <= 0.0)
        throw std::invalid_argument("scale_power: arguments must be positive");
    const double vr = v_new / v_old;
    return p_mw * (len_new_nm / len_old_nm) * vr * vr;
}

double io_power_mw(double bandwidth_mb_s, double pj_per_bit) {
    if (bandwidth_mb_s < 0.0 || pj_per_bit < 0.0)
        throw std::invalid_argument("io_power: arguments must be non-negative");
    // MB/s * 8 = Mbit/s; Mbit/s * pJ/bit = uW; /1000 = mW
    return bandwidth_mb_s * 8.0 * pj_per_bit / 1000.0;
}

namespace {

nlohmann::json stage_json(const StageReport& r) {
    return nlohmann::json{{"stage", r.stage},
                          {"in_channels", r.layer.in_channels},
                          {"out_channels", r.layer.out_channels},
                          {"input_h", r.layer.input_h},
                          {"input_w", r.layer.input_w},
                          {"eta_ch_idle", r.eta_ch_idle},
                          {"eta_filter_load", r.eta_filter_load},
                          {"eta_border", r.eta_border},
                          {"eta_total", r.eta_total},
                          {"ops", r.ops},
                          {"cycles", r.cycles},
                          {"runtime_ms", r.runtime_ms},
                          {"throughput_gops", r.throughput_gops}};
}

}  // namespace

std::string report_json(const NetworkReport& rep, const std::optional<SystemBandwidth>& sys,
                        std::uint64_t seed) {
    nlohmann::json j;
    j["seed"] = seed;
    j["stages"] = nlohmann::json::array();
    for (const StageReport& r : rep.stages) j["stages"].push_back(stage_json(r));
    j["totals"] = {{"ops", rep.total_ops},
                   {"cycles", rep.total_cycles},
                   {"runtime_ms", rep.total_runtime_ms},
                   {"avg_throughput_gops", rep.avg_throughput_gops},
                   {"frame_rate", rep.frame_rate}};
    if (sys) {
        j["system_bandwidth"] = {{"input_read_mb_s", sys->input_read},
                                 {"partial_write_mb_s", sys->partial_write},
                                 {"partial_reread_mb_s", sys->partial_reread},
                                 {"pooled_write_mb_s", sys->pooled_write},
                                 {"total_mb_s", sys->total},
                                 {"filter_reload_mb_s", sys->filter_reload}};
    }
    return j.dump(2) + "\n";
}

std::string report_csv(const NetworkReport& rep) {
    std::ostringstream os;
    os.precision(12);
    os << "stage,eta_ch_idle,eta_filter_load,eta_border,eta_total,ops,cycles,runtime_ms,"
          "throughput_gops\n";
    for (const StageReport& r : rep.stages)
        os << r.stage << ',' << r.eta_ch_idle << ',' << r.eta_filter_load << ',' << r.eta_border
           << ',' << r.eta_total << ',' << r.ops << ',' << r.cycles << ',' << r.runtime_ms << ','
           << r.throughput_gops << '\n';
    os << "total,,,,," << rep.total_ops << ',' << rep.total_cycles << ',' << rep.total_runtime_ms
       << ',' << rep.avg_throughput_gops << '\n';
    return os.str();
}

}  // namespace origami
