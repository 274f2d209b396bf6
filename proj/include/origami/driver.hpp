#ifndef ORIGAMI_DRIVER_HPP
#define ORIGAMI_DRIVER_HPP

#include <cstdint>
#include <filesystem>
#include <string>

#include "origami/netconfig.hpp"
#include "origami/perf.hpp"

// The estimate / simulate / verify flows behind the C API and the CLI.

namespace origami {

struct EstimateOptions {
    std::filesystem::path out_dir = ".";
    bool json = true;
    bool csv = true;
    std::uint64_t seed = 0;
};
NetworkReport run_estimate(const NetworkConfig& cfg, const EstimateOptions& opt);

struct SimulateOptions {
    std::filesystem::path input;  // empty: seeded random input
    std::filesystem::path out_dir = ".";
    std::uint64_t seed = 0;
    bool trace = false;
};
struct SimulateSummary {
    int stages = 0;
    std::int64_t total_cycles = 0;
    double runtime_ms = 0.0;
    std::uint64_t seed = 0;
};
SimulateSummary run_simulate(const NetworkConfig& cfg, const SimulateOptions& opt);

struct VerifyOptions {
    std::uint64_t trials = 1000;
    std::uint64_t seed = 1;
};
struct VerifyResult {
    std::uint64_t trials = 0;
    std::uint64_t failures = 0;
    std::uint64_t first_fail_seed = 0;
    std::string first_fail_detail;
    bool passed() const { return failures == 0; }
};
// Randomized tiles (n_ch in {2,4,8}, kernels {3,5,7}, stripes up to
// 64x64) compared bit-exactly between the cycle simulator and the
// behavioral chain, plus the cycle closed form, the utilization identity
// and a truncation-error bound against the real-valued convolution.
VerifyResult run_verify(const NetworkConfig& cfg, const VerifyOptions& opt);

// One verification trial on its own seed; used by run_verify and tests.
// mismatch_detail is filled on failure.
bool verify_tile_trial(std::uint64_t trial_seed, const QFormat& fmt, double f_mhz,
                       std::string* mismatch_detail,
                       const QFormat* oracle_fmt_override = nullptr);

// Seeded random network data (codes uniform over the format range).
FilterSet random_filters(const LayerSpec& layer, const QFormat& fmt, std::uint64_t seed);
FeatureMap random_input(int channels, int h, int w, const QFormat& fmt, std::uint64_t seed);

}  // namespace origami

#endif
