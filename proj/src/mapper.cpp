#include "origami/mapper.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>
#include <string>

#include "origami/parallel.hpp"

namespace origami {

LayerPlan plan_layer(const LayerSpec& layer, const ChipParams& chip) {
    layer.validate();
    chip.validate();
    LayerPlan plan;
    plan.layer = layer;
    plan.chip = chip;
    plan.decomp = decompose_kernel(layer.kernel_h, layer.kernel_w, chip);
    plan.in_blocks = (layer.in_channels + chip.n_ch - 1) / chip.n_ch;
    plan.out_blocks = (layer.out_channels + chip.n_ch - 1) / chip.n_ch;
    plan.fed_width = layer.conv_out_w() + chip.w_k - 1;

    // split the output rows into maximal chunks; each stripe feeds its
    // owned rows plus the h_k-1 overlap below
    const int out_rows = layer.conv_out_h();
    const int chunk = chip.h_in_max - chip.h_k + 1;
    for (int r0 = 0; r0 < out_rows; r0 += chunk) {
        StripeSpec s;
        s.out_row_start = r0;
        s.out_rows = std::min(chunk, out_rows - r0);
        s.in_row_start = r0;
        s.h_in = s.out_rows + chip.h_k - 1;
        plan.stripes.push_back(s);
    }

    int id = 0;
    for (int ob = 0; ob < plan.out_blocks; ++ob)
        for (int ib = 0; ib < plan.in_blocks; ++ib)
            for (int st = 0; st < static_cast<int>(plan.stripes.size()); ++st)
                for (int kp = 0; kp < plan.decomp.part_count(); ++kp)
                    plan.jobs.push_back({id++, ob, ib, st, kp});
    return plan;
}

std::vector<KernelPart> prepare_kernel(std::span<const double> kernel, int kernel_h, int kernel_w,
                                       const ChipParams& chip) {
    if (kernel.size() != std::size_t(kernel_h) * kernel_w)
        throw std::invalid_argument("prepare_kernel: tap count does not match dims");
    const KernelDecomp d = decompose_kernel(kernel_h, kernel_w, chip);
    std::vector<KernelPart> parts;
    parts.reserve(d.parts.size());
    for (const auto& off : d.parts) {
        KernelPart part;
        part.dy = off.dy;
        part.dx = off.dx;
        part.taps.assign(std::size_t(chip.h_k) * chip.w_k, 0.0);
        for (int r = 0; r < chip.h_k; ++r) {
            for (int s = 0; s < chip.w_k; ++s) {
                const int kr = off.dy + r - d.pad_top;
                const int ks = off.dx + s - d.pad_left;
                if (kr >= 0 && kr < kernel_h && ks >= 0 && ks < kernel_w)
                    part.taps[std::size_t(r) * chip.w_k + s] =
                        kernel[std::size_t(kr) * kernel_w + ks];
            }
        }
        parts.push_back(std::move(part));
    }
    return parts;
}

std::vector<std::int32_t> job_filters(const LayerPlan& plan, const TileJob& job,
                                      const FilterSet& filters) {
    filters.validate();
    if (filters.kind != ElemKind::fixed)
        throw std::invalid_argument("job_filters: filters must be fixed");
    if (filters.out_channels != plan.layer.out_channels ||
        filters.in_channels != plan.layer.in_channels || filters.h_k != plan.layer.kernel_h ||
        filters.w_k != plan.layer.kernel_w)
        throw std::invalid_argument("job_filters: filter set does not match the layer");
    const ChipParams& chip = plan.chip;
    const KernelDecomp& d = plan.decomp;
    const KernelPartOffset off = d.parts[std::size_t(job.kernel_part)];
    const int n = chip.n_ch;
    std::vector<std::int32_t> bank(std::size_t(chip.filter_words()), 0);
    for (int o = 0; o < n; ++o) {
        const int oo = job.out_block * n + o;
        if (oo >= filters.out_channels) continue;  // padded output channel
        for (int c = 0; c < n; ++c) {
            const int cc = job.in_block * n + c;
            if (cc >= filters.in_channels) continue;  // padded input channel
            for (int r = 0; r < chip.h_k; ++r) {
                for (int s = 0; s < chip.w_k; ++s) {
                    const int kr = off.dy + r - d.pad_top;
                    const int ks = off.dx + s - d.pad_left;
                    if (kr >= 0 && kr < filters.h_k && ks >= 0 && ks < filters.w_k)
                        bank[((std::size_t(o) * n + c) * chip.h_k + r) * chip.w_k + s] =
                            filters.wq(oo, cc, kr, ks);
                }
            }
        }
    }
    return bank;
}

FeatureMap job_stripe(const LayerPlan& plan, const TileJob& job, const FeatureMap& x) {
    x.validate();
    if (x.kind != ElemKind::fixed)
        throw std::invalid_argument("job_stripe: input must be fixed");
    if (x.channels != plan.layer.in_channels || x.height != plan.layer.input_h ||
        x.width != plan.layer.input_w)
        throw std::invalid_argument("job_stripe: input does not match the layer");
    const ChipParams& chip = plan.chip;
    const KernelDecomp& d = plan.decomp;
    const StripeSpec& s = plan.stripes[std::size_t(job.stripe)];
    const KernelPartOffset off = d.parts[std::size_t(job.kernel_part)];
    FeatureMap fed = FeatureMap::zeros_fixed(chip.n_ch, s.h_in, plan.fed_width, x.fmt);
    for (int c = 0; c < chip.n_ch; ++c) {
        const int cc = job.in_block * chip.n_ch + c;
        if (cc >= x.channels) continue;  // padded channel stays zero
        for (int j = 0; j < s.h_in; ++j) {
            // padded-image row: stripe rows sit in decomposition-padded
            // coordinates, shifted by the kernel part offset
            const int row = s.in_row_start + off.dy + j - d.pad_top;
            if (row < 0 || row >= x.height) continue;
            for (int i = 0; i < plan.fed_width; ++i) {
                const int col = off.dx + i - d.pad_left;
                if (col < 0 || col >= x.width) continue;
                fed.q(c, j, i) = x.q(cc, row, col);
            }
        }
    }
    return fed;
}

FeatureMap accumulate_offchip(const LayerPlan& plan,
                              const std::vector<std::vector<std::int32_t>>& job_outputs,
                              std::span<const std::int32_t> bias_codes) {
    if (job_outputs.size() != plan.jobs.size())
        throw std::invalid_argument("accumulate_offchip: expected " +
                                    std::to_string(plan.jobs.size()) + " job streams, got " +
                                    std::to_string(job_outputs.size()));
    if (bias_codes.size() != std::size_t(plan.layer.out_channels))
        throw std::invalid_argument("accumulate_offchip: bias count mismatch");
    const int n = plan.chip.n_ch;
    const int out_rows = plan.out_rows_total();
    const int out_cols = plan.out_cols_total();
    const QFormat fmt = plan.chip.fmt;

    std::vector<std::int64_t> acc(std::size_t(plan.layer.out_channels) * out_rows * out_cols, 0);
    for (const TileJob& job : plan.jobs) {
        const std::vector<std::int32_t>& stream = job_outputs[std::size_t(job.job_id)];
        const StripeSpec& s = plan.stripes[std::size_t(job.stripe)];
        const std::size_t expect = std::size_t(s.out_rows) * out_cols * n;
        if (stream.empty())
            throw std::invalid_argument("accumulate_offchip: missing output of job " +
                                        std::to_string(job.job_id));
        if (stream.size() != expect)
            throw std::invalid_argument("accumulate_offchip: job " + std::to_string(job.job_id) +
                                        " produced " + std::to_string(stream.size()) +
                                        " words, expected " + std::to_string(expect));
        std::size_t pos = 0;
        for (int i = 0; i < out_cols; ++i) {
            for (int j = 0; j < s.out_rows; ++j) {
                for (int o = 0; o < n; ++o, ++pos) {
                    const int oo = job.out_block * n + o;
                    if (oo >= plan.layer.out_channels) continue;  // padded channel
                    acc[(std::size_t(oo) * out_rows + (s.out_row_start + j)) * out_cols + i] +=
                        stream[pos];
                }
            }
        }
    }

    FeatureMap y = FeatureMap::zeros_fixed(plan.layer.out_channels, out_rows, out_cols, fmt);
    for (int o = 0; o < plan.layer.out_channels; ++o) {
        const std::size_t base = std::size_t(o) * out_rows * out_cols;
        for (std::size_t k = 0; k < std::size_t(out_rows) * out_cols; ++k)
            y.codes[base + k] = narrow_raw(acc[base + k] + bias_codes[o], fmt);
    }
    return y;
}

FeatureMap pool_and_activate(const FeatureMap& x, const LayerSpec& layer) {
    x.validate();
    const bool act = layer.activation == Activation::relu;
    if (!layer.pool) return act ? relu(x) : x;
    if (layer.pool->ph != 2 || layer.pool->pw != 2)
        throw std::invalid_argument("pool_and_activate: only 2x2 pooling is modeled");
    const int oh = x.height / 2;
    const int ow = x.width / 2;
    FeatureMap y = x.kind == ElemKind::real ? FeatureMap::zeros_real(x.channels, oh, ow)
                                            : FeatureMap::zeros_fixed(x.channels, oh, ow, x.fmt);
    // scan-line evaluation: per input column keep only the vertical
    // pairwise maxes, combine column pairs on arrival of the odd column
    if (x.kind == ElemKind::real) {
        std::vector<double> vmax(static_cast<std::size_t>(oh));
        for (int c = 0; c < x.channels; ++c) {
            for (int i = 0; i < 2 * ow; ++i) {
                for (int j = 0; j < oh; ++j) {
                    double a = x.r(c, 2 * j, i);
                    double b = x.r(c, 2 * j + 1, i);
                    if (act) {
                        a = std::max(a, 0.0);
                        b = std::max(b, 0.0);
                    }
                    const double v = std::max(a, b);
                    if (i % 2 == 0)
                        vmax[std::size_t(j)] = v;
                    else
                        y.r(c, j, i / 2) = std::max(vmax[std::size_t(j)], v);
                }
            }
        }
    } else {
        std::vector<std::int32_t> vmax(static_cast<std::size_t>(oh));
        for (int c = 0; c < x.channels; ++c) {
            for (int i = 0; i < 2 * ow; ++i) {
                for (int j = 0; j < oh; ++j) {
                    std::int32_t a = x.q(c, 2 * j, i);
                    std::int32_t b = x.q(c, 2 * j + 1, i);
                    if (act) {
                        a = std::max(a, 0);
                        b = std::max(b, 0);
                    }
                    const std::int32_t v = std::max(a, b);
                    if (i % 2 == 0)
                        vmax[std::size_t(j)] = v;
                    else
                        y.q(c, j, i / 2) = std::max(vmax[std::size_t(j)], v);
                }
            }
        }
    }
    return y;
}

void write_plan(std::ostream& os, const LayerPlan& plan) {
    for (const TileJob& job : plan.jobs) {
        const StripeSpec& s = plan.stripes[std::size_t(job.stripe)];
        os << job.job_id << ',' << job.in_block << ',' << job.out_block << ',' << s.in_row_start
           << ',' << s.h_in << ',' << job.kernel_part << '\n';
    }
}

LayerRunResult run_layer(const FeatureMap& x, const LayerSpec& layer, const FilterSet& filters,
                         const ChipParams& chip, bool record_trace, bool parallel) {
    const LayerPlan plan = plan_layer(layer, chip);
    const FeatureMap xf = x.kind == ElemKind::fixed ? x : to_fixed(x, chip.fmt);
    const FilterSet ff = filters.kind == ElemKind::fixed ? filters : to_fixed(filters, chip.fmt);
    if (xf.fmt != chip.fmt || ff.fmt != chip.fmt)
        throw std::invalid_argument("run_layer: operand format does not match the chip");

    LayerRunResult res;
    res.job_cycles.resize(plan.jobs.size());
    if (record_trace) res.traces.resize(plan.jobs.size());
    std::vector<std::vector<std::int32_t>> streams(plan.jobs.size());

    auto run_job = [&](std::size_t k) {
        const TileJob& job = plan.jobs[k];
        ChipSim sim(chip);
        sim.load_filters(job_filters(plan, job, ff));
        TileResult tile = sim.simulate_tile(job_stripe(plan, job, xf), record_trace);
        streams[k] = std::move(tile.outputs);
        res.job_cycles[k] = tile.cycles;
        if (record_trace) res.traces[k] = std::move(tile.trace);
    };
    if (parallel)
        parallel_for(plan.jobs.size(), run_job);
    else
        for (std::size_t k = 0; k < plan.jobs.size(); ++k) run_job(k);

    res.output = accumulate_offchip(plan, streams, ff.bias_codes);
    for (const CyclesBreakdown& c : res.job_cycles) res.total_cycles += c.total;
    return res;
}

}  // namespace origami
