#include "origami/datapath.hpp"

#include <algorithm>
#include <cstring>
#include <stdexcept>
#include <string>

namespace origami {

CyclesBreakdown tile_cycles_closed_form(const ChipParams& p, int h_in, int w_in) {
    if (h_in < p.h_k || w_in < p.w_k)
        throw std::invalid_argument("tile_cycles_closed_form: stripe smaller than the kernel");
    CyclesBreakdown c;
    const std::int64_t n = p.n_ch;
    const int out_cols = w_in - p.w_k + 1;
    c.filter_load = p.filter_words();
    c.stripe_preload = n * h_in * (p.w_k - 1);
    c.column_preload_total = std::int64_t(out_cols) * n * (p.h_k - 1);
    c.compute = std::int64_t(out_cols) * n * (h_in - p.h_k + 1);
    c.total = c.filter_load + c.stripe_preload + c.column_preload_total + c.compute;
    return c;
}

ChipSim::ChipSim(ChipParams p) : params_(p) {
    params_.validate();
    // bus words travel in 16-bit trace containers
    if (params_.fmt.total_bits > 16)
        throw std::invalid_argument("ChipSim: word width above 16 bits is not modeled");
    filter_bank_.assign(std::size_t(params_.filter_words()), 0);
}

std::int64_t ChipSim::load_filters(const std::vector<std::int32_t>& weights) {
    if (weights.size() != std::size_t(params_.filter_words()))
        throw std::invalid_argument("load_filters: expected " +
                                    std::to_string(params_.filter_words()) + " words, got " +
                                    std::to_string(weights.size()));
    if (filters_loaded_)
        throw std::logic_error("load_filters: previous configuration not yet consumed by a tile");
    filter_bank_ = weights;
    pending_filter_trace_.clear();
    pending_filter_trace_.reserve(weights.size());
    const std::uint16_t mask =
        static_cast<std::uint16_t>((1u << params_.fmt.total_bits) - 1u);
    for (std::size_t k = 0; k < weights.size(); ++k)
        pending_filter_trace_.push_back(
            {k, BusDir::in, BusTag::filter, static_cast<std::uint16_t>(weights[k] & mask)});
    filter_cycles_ = static_cast<std::int64_t>(weights.size());
    filters_loaded_ = true;
    return filter_cycles_;
}

std::int64_t ChipSim::load_filters(const FilterSet& filters, int out_block, int in_block) {
    filters.validate();
    if (filters.kind != ElemKind::fixed || filters.fmt != params_.fmt)
        throw std::invalid_argument("load_filters: filters must be fixed in the chip format");
    if (filters.h_k != params_.h_k || filters.w_k != params_.w_k)
        throw std::invalid_argument("load_filters: kernel size does not match the chip");
    const int n = params_.n_ch;
    std::vector<std::int32_t> block(std::size_t(params_.filter_words()), 0);
    for (int o = 0; o < n; ++o) {
        const int oo = out_block * n + o;
        if (oo >= filters.out_channels) continue;
        for (int c = 0; c < n; ++c) {
            const int cc = in_block * n + c;
            if (cc >= filters.in_channels) continue;
            for (int r = 0; r < params_.h_k; ++r)
                for (int s = 0; s < params_.w_k; ++s)
                    block[((std::size_t(o) * n + c) * params_.h_k + r) * params_.w_k + s] =
                        filters.wq(oo, cc, r, s);
        }
    }
    return load_filters(block);
}

TileResult ChipSim::simulate_tile(const FeatureMap& stripe, bool record_trace) {
    stripe.validate();
    if (!filters_loaded_)
        throw std::logic_error("simulate_tile: filters not loaded");
    if (stripe.kind != ElemKind::fixed || stripe.fmt != params_.fmt)
        throw std::invalid_argument("simulate_tile: stripe must be fixed in the chip format");
    if (stripe.channels != params_.n_ch)
        throw std::invalid_argument("simulate_tile: stripe must have exactly n_ch channels");
    if (stripe.height > params_.h_in_max)
        throw std::invalid_argument("simulate_tile: stripe height " +
                                    std::to_string(stripe.height) + " exceeds h_in_max " +
                                    std::to_string(params_.h_in_max) + " (split into stripes)");
    if (stripe.height < params_.h_k || stripe.width < params_.w_k)
        throw std::invalid_argument("simulate_tile: stripe smaller than the kernel");

    const int n = params_.n_ch;
    const int hk = params_.h_k;
    const int wk = params_.w_k;
    const int h = stripe.height;
    const int w = stripe.width;
    const int out_rows = h - hk + 1;
    const int out_cols = w - wk + 1;
    const QFormat fmt = params_.fmt;
    const std::uint16_t mask = static_cast<std::uint16_t>((1u << fmt.total_bits) - 1u);

    TileResult res;
    res.n_ch_ = n;
    res.out_rows = out_rows;
    res.out_cols = out_cols;
    res.cycles = tile_cycles_closed_form(params_, h, w);
    res.outputs.reserve(std::size_t(out_rows) * out_cols * n);
    res.dual_clock.n_units = params_.n_sop();
    res.dual_clock.unit_results.assign(params_.n_sop(), 0);
    if (record_trace) {
        res.trace = std::move(pending_filter_trace_);
        res.trace.reserve(res.trace.size() + std::size_t(n) * h * w +
                          std::size_t(out_rows) * out_cols * n);
    }
    pending_filter_trace_.clear();

    // image window SRAM: per channel a w_k-wide column ring over the
    // stripe height; each slot remembers which image column it holds so
    // reads can assert the word already arrived
    std::vector<std::int32_t> sram_val(std::size_t(n) * h * wk, 0);
    std::vector<std::int32_t> sram_col(std::size_t(n) * h * wk, -1);
    auto sram_at = [&](int c, int j, int col) -> std::size_t {
        return (std::size_t(c) * h + j) * wk + (col % wk);
    };

    // image bank: per channel an h_k x w_k register window
    std::vector<std::int32_t> bank(std::size_t(n) * hk * wk, 0);
    auto bank_row = [&](int c, int r) { return bank.data() + (std::size_t(c) * hk + r) * wk; };

    std::uint64_t cycle = static_cast<std::uint64_t>(filter_cycles_);
    std::int64_t in_pos = 0;
    const std::int64_t total_words = std::int64_t(n) * h * w;

    // one input word arrives per streaming cycle, column-major then
    // row then channel; written to the SRAM before any same-cycle read
    auto feed = [&]() {
        if (in_pos >= total_words)
            throw std::logic_error("simulate_tile: input stream exhausted (schedule bug)");
        const int i = static_cast<int>(in_pos / (std::int64_t(h) * n));
        const int rem = static_cast<int>(in_pos % (std::int64_t(h) * n));
        const int j = rem / n;
        const int c = rem % n;
        const std::int32_t v = stripe.q(c, j, i);
        const std::size_t slot = sram_at(c, j, i);
        sram_val[slot] = v;
        sram_col[slot] = i;
        if (record_trace)
            res.trace.push_back(
                {cycle, BusDir::in, BusTag::pixel, static_cast<std::uint16_t>(v & mask)});
        ++in_pos;
    };

    auto bank_load_row = [&](int c, int window_row, int image_row, int col0) {
        std::int32_t* dst = bank_row(c, window_row);
        for (int q = 0; q < wk; ++q) {
            const std::size_t slot = sram_at(c, image_row, col0 + q);
            if (sram_col[slot] != col0 + q)
                throw std::logic_error("simulate_tile: SRAM read before arrival (schedule bug)");
            dst[q] = sram_val[slot];
        }
    };

    // stripe preload: the first w_k-1 columns stream in while the
    // processing units idle
    for (std::int64_t k = 0; k < std::int64_t(wk - 1) * h * n; ++k) {
        feed();
        ++cycle;
    }

    std::vector<std::int64_t> chsum(n, 0);
    const int taps = hk * wk;

    for (int t = 0; t < out_cols; ++t) {
        // column change: the image bank refills rows 0..h_k-2 while the
        // next image column arrives
        for (int j = 0; j < hk - 1; ++j) {
            for (int c = 0; c < n; ++c) {
                feed();
                bank_load_row(c, j, j, t);
                ++cycle;
            }
        }
        for (int jr = 0; jr < out_rows; ++jr) {
            const std::uint64_t group_start = cycle;
            for (int c = 0; c < n; ++c) {
                feed();
                if (jr == 0) {
                    bank_load_row(c, hk - 1, hk - 1, t);
                } else {
                    std::memmove(bank_row(c, 0), bank_row(c, 1),
                                 sizeof(std::int32_t) * std::size_t(hk - 1) * wk);
                    bank_load_row(c, hk - 1, jr + hk - 1, t);
                }
                // each SoP unit computes two inner products per slow
                // cycle, one per fast substep / output channel
                const std::int32_t* win = bank_row(c, 0);
                for (int u = 0; u < params_.n_sop(); ++u) {
                    for (int sub = 0; sub < 2; ++sub) {
                        const int o = 2 * u + sub;
                        const std::int32_t* kern =
                            filter_bank_.data() + (std::size_t(o) * n + c) * taps;
                        std::int64_t wide = 0;
                        for (int x = 0; x < taps; ++x)
                            wide += std::int64_t(win[x]) * kern[x];
                        chsum[o] += truncate_raw(wide, fmt);
                        ++res.dual_clock.unit_results[u];
                        if ((o & 1) != sub) res.dual_clock.selector_alternated = false;
                    }
                }
                ++res.dual_clock.compute_cycles;
                ++cycle;
            }
            // group done: narrow the channel sums and stream them out,
            // one output channel per cycle of the group
            for (int o = 0; o < n; ++o) {
                const std::int32_t out = narrow_raw(chsum[o], fmt);
                chsum[o] = 0;
                res.outputs.push_back(out);
                if (record_trace)
                    res.trace.push_back({group_start + unsigned(o), BusDir::out, BusTag::result,
                                         static_cast<std::uint16_t>(out & mask)});
            }
        }
    }

    if (in_pos != total_words || cycle != std::uint64_t(res.cycles.total))
        throw std::logic_error("simulate_tile: cycle accounting mismatch (schedule bug)");
    if (record_trace)
        std::stable_sort(res.trace.begin(), res.trace.end(),
                         [](const BusRecord& a, const BusRecord& b) {
                             return a.cycle != b.cycle ? a.cycle < b.cycle : a.dir < b.dir;
                         });
    filters_loaded_ = false;  // each tile consumes one configuration pass
    return res;
}

DualClockReport dual_clock_check(const ChipParams& p, const TileResult& tile) {
    DualClockReport rep;
    rep.n_units = p.n_sop();
    rep.channels_covered = 2 * rep.n_units;
    rep.ok = tile.dual_clock.n_units == rep.n_units && tile.dual_clock.selector_alternated;
    for (std::int64_t cnt : tile.dual_clock.unit_results)
        if (cnt != 2 * tile.dual_clock.compute_cycles) rep.ok = false;
    rep.detail = std::to_string(rep.n_units) + " SoP units x 2 output channels = " +
                 std::to_string(rep.channels_covered) + " channels; " +
                 std::to_string(tile.dual_clock.compute_cycles) +
                 " compute cycles, 2 inner products per unit per cycle" +
                 (rep.ok ? "" : " -- MISMATCH");
    return rep;
}

}  // namespace origami
