#ifndef ORIGAMI_MAPPER_HPP
#define ORIGAMI_MAPPER_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "origami/datapath.hpp"
#include "origami/golden.hpp"

// Compiles a convolutional layer into chip-sized work units (channel
// blocks x stripes x kernel parts) and reassembles full-layer outputs
// from the per-job chip streams.

namespace origami {

struct StripeSpec {
    int out_row_start = 0;  // first layer output row owned by the stripe
    int out_rows = 0;       // owned output rows
    int in_row_start = 0;   // first padded-input row fed (== out_row_start)
    int h_in = 0;           // fed stripe height = out_rows + chip h_k - 1
};

struct TileJob {
    int job_id = 0;
    int out_block = 0;
    int in_block = 0;
    int stripe = 0;
    int kernel_part = 0;
};

struct LayerPlan {
    LayerSpec layer;
    ChipParams chip;
    KernelDecomp decomp;
    int in_blocks = 0;
    int out_blocks = 0;
    std::vector<StripeSpec> stripes;
    std::vector<TileJob> jobs;  // out_block-major, then in_block, stripe, kernel_part
    int fed_width = 0;          // padded stripe width handed to the chip

    int out_rows_total() const { return layer.conv_out_h(); }
    int out_cols_total() const { return layer.conv_out_w(); }
};

LayerPlan plan_layer(const LayerSpec& layer, const ChipParams& chip);

// One kernel decomposed into chip-sized parts with their spatial offsets
// (real weights; the offsets and zero padding follow decompose_kernel).
struct KernelPart {
    std::vector<double> taps;  // chip h_k x w_k
    int dy = 0;
    int dx = 0;
};
std::vector<KernelPart> prepare_kernel(std::span<const double> kernel, int kernel_h, int kernel_w,
                                       const ChipParams& chip);

// Filter-bank contents for one job: n_ch^2 chip kernels in (o,c,r,s)
// order, zero-filled outside the layer's true channel ranges and kernel
// support.
std::vector<std::int32_t> job_filters(const LayerPlan& plan, const TileJob& job,
                                      const FilterSet& filters);

// The stripe handed to the chip for one job: n_ch channels of the
// decomposition-padded input, shifted by the job's kernel part offset.
FeatureMap job_stripe(const LayerPlan& plan, const TileJob& job, const FeatureMap& x);

// Sums the already-narrowed chip outputs of all contributing jobs at full
// precision per output pixel, adds the bias, narrows once. job_outputs is
// indexed by job_id; an empty stream marks a missing job.
FeatureMap accumulate_offchip(const LayerPlan& plan,
                              const std::vector<std::vector<std::int32_t>>& job_outputs,
                              std::span<const std::int32_t> bias_codes);

// relu (if configured) followed by 2x2 max pooling, evaluated column by
// column with a vertical-max line buffer; identical to the batch ops.
FeatureMap pool_and_activate(const FeatureMap& x, const LayerSpec& layer);

// Text schedule: one `job_id,in_block,out_block,row_start,h_in,kernel_part`
// line per job.
void write_plan(std::ostream& os, const LayerPlan& plan);

// Runs every job of a layer through the cycle simulator and reassembles
// the layer output (before activation/pooling).
struct LayerRunResult {
    FeatureMap output;
    std::vector<CyclesBreakdown> job_cycles;
    std::int64_t total_cycles = 0;
    std::vector<BusTrace> traces;  // per job when record_trace
};
LayerRunResult run_layer(const FeatureMap& x, const LayerSpec& layer, const FilterSet& filters,
                         const ChipParams& chip, bool record_trace = false,
                         bool parallel = true);

}  // namespace origami

#endif
