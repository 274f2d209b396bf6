#ifndef ORIGAMI_PERF_HPP
#define ORIGAMI_PERF_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "origami/chip.hpp"
#include "origami/tensor.hpp"

// Analytic model of throughput, efficiency factors, cycle counts, I/O and
// system memory bandwidth, and technology-scaled power.

namespace origami {

// 2*n_out*n_in*h_k*w_k*(h_in-h_k+1)*(w_in-w_k+1), multiplies and adds
// counted separately.
std::int64_t op_count(const LayerSpec& layer);

// 2*n_ch*h_k*w_k*f in GOp/s.
double peak_throughput_gops(const ChipParams& chip);

double eta_border(int h_in, int w_in, int h_k, int w_k);
double eta_filter_load(int h_in, int w_in, const ChipParams& chip);
double eta_ch_idle(int n_in, int n_out, int n_ch);

struct StageReport {
    int stage = 0;  // 1-based
    LayerSpec layer;
    double eta_ch_idle = 0.0;
    double eta_filter_load = 0.0;
    double eta_border = 0.0;
    double eta_total = 0.0;
    std::int64_t ops = 0;
    std::int64_t cycles = 0;
    double runtime_ms = 0.0;
    double throughput_gops = 0.0;
};

// cycles summed over the layer plan's jobs; runtime = cycles/f;
// throughput = ops/runtime.
StageReport layer_report(const LayerSpec& layer, const ChipParams& chip);

struct NetworkReport {
    std::vector<StageReport> stages;
    std::int64_t total_ops = 0;
    std::int64_t total_cycles = 0;
    double total_runtime_ms = 0.0;
    double avg_throughput_gops = 0.0;
    double frame_rate = 0.0;
};
NetworkReport network_report(const std::vector<LayerSpec>& layers, const ChipParams& chip);

// Per-direction bus bandwidth in MB/s (10^6 bytes): word bits * f / 8.
double io_bandwidth_mb_s(const ChipParams& chip);

struct BandwidthEfficiency {
    double gop_per_gb = 0.0;
    double mb_per_gop = 0.0;
};
BandwidthEfficiency bandwidth_efficiency(const ChipParams& chip);
double mb_per_gop(double bandwidth_mb_s, double throughput_gops);

struct SystemConfig {
    int n_chips = 4;
    bool pairing = true;  // paired chips share inputs / sum outputs
    int bus_bits = 12;
    double bus_mhz = 250.0;
    std::optional<PoolSpec> pool;
};

// MB/s breakdown of the host memory traffic while a stage runs. Partial
// sums are written back, re-read and reduced whenever the stage spans
// more than one input-channel block; single-block stages stream straight
// through activation/pooling.
struct SystemBandwidth {
    double input_read = 0.0;
    double partial_write = 0.0;
    double partial_reread = 0.0;
    double pooled_write = 0.0;
    double total = 0.0;
    double filter_reload = 0.0;  // configuration phase, all chips at full speed
};
SystemBandwidth system_bandwidth(const SystemConfig& sys, const LayerSpec& stage,
                                 const ChipParams& chip);

// p * (len_new/len_old) * (v_new/v_old)^2.
double scale_power_mw(double p_mw, double v_old, double v_new, double len_old_nm,
                      double len_new_nm);

// bandwidth (MB/s) * 8 bit/byte * pJ/bit, in mW.
double io_power_mw(double bandwidth_mb_s, double pj_per_bit);

// Report emission. JSON uses nested per-stage objects; CSV has one row
// per stage plus a totals row. Field names are fixed: eta_ch_idle,
// eta_filter_load, eta_border, eta_total, ops, cycles, runtime_ms,
// throughput_gops.
std::string report_json(const NetworkReport& rep, const std::optional<SystemBandwidth>& sys,
                        std::uint64_t seed);
std::string report_csv(const NetworkReport& rep);

}  // namespace origami

#endif
