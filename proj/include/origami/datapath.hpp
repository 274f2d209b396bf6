#ifndef ORIGAMI_DATAPATH_HPP
#define ORIGAMI_DATAPATH_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "origami/chip.hpp"
#include "origami/tensor.hpp"

// Cycle-level, bit-exact simulator of one chip: image window SRAM, image
// bank, filter bank, SoP units and channel summers on the dual-clock
// schedule, and the 12-bit full-duplex bus streams. Granularity is the
// slow clock; each slow cycle the SoP units take two fast-clock substeps.

namespace origami {

enum class BusDir : std::uint8_t { in = 0, out = 1 };
enum class BusTag : std::uint8_t { filter = 0, pixel = 1, result = 2 };

struct BusRecord {
    std::uint64_t cycle = 0;
    BusDir dir = BusDir::in;
    BusTag tag = BusTag::pixel;
    std::uint16_t word = 0;  // low total_bits of the code
};
using BusTrace = std::vector<BusRecord>;

struct CyclesBreakdown {
    std::int64_t filter_load = 0;
    std::int64_t stripe_preload = 0;
    std::int64_t column_preload_total = 0;
    std::int64_t compute = 0;
    std::int64_t total = 0;
};

// n_ch*h_in*w_in + n_ch^2*h_k*w_k, split into the schedule phases.
CyclesBreakdown tile_cycles_closed_form(const ChipParams& p, int h_in, int w_in);

// Bookkeeping for the dual-clock (two inner products per SoP unit per
// slow cycle) schedule check.
struct DualClockStats {
    int n_units = 0;
    std::int64_t compute_cycles = 0;
    std::vector<std::int64_t> unit_results;  // per SoP unit
    bool selector_alternated = true;         // filter-bank set toggling per fast substep
};

struct DualClockReport {
    bool ok = false;
    int n_units = 0;
    int channels_covered = 0;
    std::string detail;
};

struct TileResult {
    // one tile's output stream: pixels in production order (column-major:
    // output column outer, row inner), n_ch codes per pixel in ascending
    // output-channel order
    std::vector<std::int32_t> outputs;
    int out_rows = 0;
    int out_cols = 0;
    CyclesBreakdown cycles;
    BusTrace trace;
    DualClockStats dual_clock;

    std::int32_t at(int o, int j, int i) const {
        return outputs[(std::size_t(i) * out_rows + j) * std::size_t(n_ch_) + o];
    }
    int n_ch_ = 0;
};

class ChipSim {
  public:
    explicit ChipSim(ChipParams p);

    // Shifts all n_ch^2 kernels into the filter bank ((o,c,r,s) word
    // order, one word per slow cycle on the input bus); returns the cycle
    // count. Only legal before a tile run consumes the loaded set.
    std::int64_t load_filters(const std::vector<std::int32_t>& weights);
    std::int64_t load_filters(const FilterSet& filters, int out_block, int in_block);

    // Streams one stripe through the chip. Requires a preceding
    // load_filters (each tile run consumes one configuration pass, which
    // is how the filter-load cycles are accounted per tile).
    TileResult simulate_tile(const FeatureMap& stripe, bool record_trace = true);

    const ChipParams& params() const { return params_; }

  private:
    ChipParams params_;
    std::vector<std::int32_t> filter_bank_;  // n_ch^2 * h_k * w_k, (o,c,r,s)
    bool filters_loaded_ = false;
    BusTrace pending_filter_trace_;
    std::int64_t filter_cycles_ = 0;
};

DualClockReport dual_clock_check(const ChipParams& p, const TileResult& tile);

}  // namespace origami

#endif
