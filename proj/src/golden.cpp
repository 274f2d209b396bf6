#include "origami/golden.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace origami {

namespace {

void check_conv_geometry(const FeatureMap& x, const FilterSet& f) {
    x.validate();
    f.validate();
    if (x.channels != f.in_channels)
        throw std::invalid_argument("conv: input has " + std::to_string(x.channels) +
                                    " channels, filters expect " +
                                    std::to_string(f.in_channels));
    if (x.height < f.h_k || x.width < f.w_k)
        throw std::invalid_argument("conv: input " + std::to_string(x.height) + "x" +
                                    std::to_string(x.width) + " smaller than kernel " +
                                    std::to_string(f.h_k) + "x" + std::to_string(f.w_k));
}

}  // namespace

FeatureMap conv_real(const FeatureMap& x, const FilterSet& f) {
    check_conv_geometry(x, f);
    if (x.kind != ElemKind::real || f.kind != ElemKind::real)
        throw std::invalid_argument("conv_real: operands must be real");
    const int oh = x.height - f.h_k + 1;
    const int ow = x.width - f.w_k + 1;
    FeatureMap y = FeatureMap::zeros_real(f.out_channels, oh, ow);
    for (int o = 0; o < f.out_channels; ++o) {
        for (int j = 0; j < oh; ++j) {
            for (int i = 0; i < ow; ++i) {
                double acc = f.biases[o];
                for (int c = 0; c < f.in_channels; ++c)
                    for (int r = 0; r < f.h_k; ++r)
                        for (int s = 0; s < f.w_k; ++s)
                            acc += f.w(o, c, r, s) * x.r(c, j + r, i + s);
                y.r(o, j, i) = acc;
            }
        }
    }
    return y;
}

FeatureMap conv_fixed_chain(const FeatureMap& x, const FilterSet& f, const ChipParams& p,
                            const QFormat& fmt) {
    check_conv_geometry(x, f);
    p.validate();
    if (x.kind != ElemKind::fixed || f.kind != ElemKind::fixed)
        throw std::invalid_argument("conv_fixed_chain: operands must be fixed");
    if (x.fmt != fmt || f.fmt != fmt)
        throw std::invalid_argument("conv_fixed_chain: operand format mismatch");
    if (x.channels % p.n_ch != 0)
        throw std::invalid_argument("conv_fixed_chain: channels not a multiple of n_ch "
                                    "(caller must zero-pad)");
    const KernelDecomp dec = decompose_kernel(f.h_k, f.w_k, p);
    const int oh = x.height - f.h_k + 1;
    const int ow = x.width - f.w_k + 1;
    const int blocks = x.channels / p.n_ch;
    FeatureMap y = FeatureMap::zeros_fixed(f.out_channels, oh, ow, fmt);
    // Part (dy,dx) of the padded kernel holds original taps
    // (dy-pad_top .. ) so the taps actually summed per SoP are the
    // intersection of the part window with the true kernel support.
    for (int o = 0; o < f.out_channels; ++o) {
        for (int j = 0; j < oh; ++j) {
            for (int i = 0; i < ow; ++i) {
                std::int64_t host = 0;
                for (int b = 0; b < blocks; ++b) {
                    for (const auto& part : dec.parts) {
                        std::int64_t block_sum = 0;
                        const int r0 = std::max(part.dy, dec.pad_top);
                        const int r1 = std::min(part.dy + p.h_k, dec.pad_top + f.h_k);
                        const int s0 = std::max(part.dx, dec.pad_left);
                        const int s1 = std::min(part.dx + p.w_k, dec.pad_left + f.w_k);
                        for (int cc = 0; cc < p.n_ch; ++cc) {
                            const int c = b * p.n_ch + cc;
                            std::int64_t wide = 0;
                            for (int r = r0; r < r1; ++r)
                                for (int s = s0; s < s1; ++s)
                                    wide += std::int64_t(f.wq(o, c, r - dec.pad_top,
                                                              s - dec.pad_left)) *
                                            x.q(c, j + r - dec.pad_top, i + s - dec.pad_left);
                            block_sum += truncate_raw(wide, fmt);  // SoP output
                        }
                        host += narrow_raw(block_sum, fmt);  // chip output per block/part
                    }
                }
                host += f.bias_codes[o];
                y.q(o, j, i) = narrow_raw(host, fmt);
            }
        }
    }
    return y;
}

FeatureMap relu(const FeatureMap& x) {
    x.validate();
    FeatureMap y = x;
    if (x.kind == ElemKind::real)
        for (double& v : y.real) v = std::max(v, 0.0);
    else
        for (std::int32_t& v : y.codes) v = std::max(v, 0);
    return y;
}

FeatureMap maxpool2(const FeatureMap& x) {
    x.validate();
    const int oh = x.height / 2;
    const int ow = x.width / 2;
    FeatureMap y = x.kind == ElemKind::real
                       ? FeatureMap::zeros_real(x.channels, oh, ow)
                       : FeatureMap::zeros_fixed(x.channels, oh, ow, x.fmt);
    for (int c = 0; c < x.channels; ++c) {
        for (int j = 0; j < oh; ++j) {
            for (int i = 0; i < ow; ++i) {
                if (x.kind == ElemKind::real) {
                    y.r(c, j, i) = std::max(std::max(x.r(c, 2 * j, 2 * i), x.r(c, 2 * j, 2 * i + 1)),
                                            std::max(x.r(c, 2 * j + 1, 2 * i),
                                                     x.r(c, 2 * j + 1, 2 * i + 1)));
                } else {
                    y.q(c, j, i) = std::max(std::max(x.q(c, 2 * j, 2 * i), x.q(c, 2 * j, 2 * i + 1)),
                                            std::max(x.q(c, 2 * j + 1, 2 * i),
                                                     x.q(c, 2 * j + 1, 2 * i + 1)));
                }
            }
        }
    }
    return y;
}

FeatureMap classify_pixelwise(const FeatureMap& x, const std::vector<DenseLayer>& stack) {
    x.validate();
    if (x.kind != ElemKind::real)
        throw std::invalid_argument("classify_pixelwise: expects real samples");
    FeatureMap cur = x;
    for (std::size_t l = 0; l < stack.size(); ++l) {
        const DenseLayer& d = stack[l];
        if (d.in_dim != cur.channels)
            throw std::invalid_argument("classify_pixelwise: layer " + std::to_string(l) +
                                        " expects " + std::to_string(d.in_dim) +
                                        " inputs, got " + std::to_string(cur.channels));
        if (d.weights.size() != std::size_t(d.out_dim) * d.in_dim ||
            d.biases.size() != std::size_t(d.out_dim))
            throw std::invalid_argument("classify_pixelwise: layer " + std::to_string(l) +
                                        " weight/bias size mismatch");
        FeatureMap next = FeatureMap::zeros_real(d.out_dim, cur.height, cur.width);
        for (int j = 0; j < cur.height; ++j) {
            for (int i = 0; i < cur.width; ++i) {
                for (int o = 0; o < d.out_dim; ++o) {
                    double acc = d.biases[o];
                    for (int c = 0; c < d.in_dim; ++c)
                        acc += d.weights[std::size_t(o) * d.in_dim + c] * cur.r(c, j, i);
                    if (d.activation == Activation::relu) acc = std::max(acc, 0.0);
                    next.r(o, j, i) = acc;
                }
            }
        }
        cur = std::move(next);
    }
    return cur;
}

namespace {

FeatureMap run_stage(const FeatureMap& x, const NetworkStage& stage, RunMode mode,
                     const ChipParams& chip) {
    FeatureMap conv_out;
    if (mode == RunMode::real) {
        conv_out = conv_real(x, stage.filters);
    } else {
        FeatureMap xin = pad_channels(x, chip.n_ch);
        FilterSet f = stage.filters;
        if (f.in_channels != xin.channels) {
            // widen filters with zero columns for the padded channels
            FilterSet padded =
                FilterSet::zeros_fixed(f.out_channels, xin.channels, f.h_k, f.w_k, f.fmt);
            for (int o = 0; o < f.out_channels; ++o) {
                for (int c = 0; c < f.in_channels; ++c)
                    for (int r = 0; r < f.h_k; ++r)
                        for (int s = 0; s < f.w_k; ++s)
                            padded.wq(o, c, r, s) = f.wq(o, c, r, s);
                padded.bias_codes[o] = f.bias_codes[o];
            }
            f = std::move(padded);
        }
        conv_out = conv_fixed_chain(xin, f, chip, chip.fmt);
    }
    FeatureMap act = stage.spec.activation == Activation::relu ? relu(conv_out) : conv_out;
    if (stage.spec.pool) {
        if (stage.spec.pool->ph != 2 || stage.spec.pool->pw != 2)
            throw std::invalid_argument("run_network: only 2x2 pooling is modeled");
        return maxpool2(act);
    }
    return act;
}

}  // namespace

FeatureMap run_network(const FeatureMap& x, const std::vector<NetworkStage>& net, RunMode mode,
                       const ChipParams& chip, const std::vector<DenseLayer>* classifier) {
    FeatureMap cur = x;
    for (std::size_t l = 0; l < net.size(); ++l) {
        const NetworkStage& stage = net[l];
        if (cur.channels != stage.spec.in_channels || cur.height != stage.spec.input_h ||
            cur.width != stage.spec.input_w)
            throw std::invalid_argument(
                "run_network: stage " + std::to_string(l + 1) + " expects " +
                std::to_string(stage.spec.in_channels) + "x" + std::to_string(stage.spec.input_h) +
                "x" + std::to_string(stage.spec.input_w) + ", got " +
                std::to_string(cur.channels) + "x" + std::to_string(cur.height) + "x" +
                std::to_string(cur.width));
        cur = run_stage(cur, stage, mode, chip);
    }
    if (classifier && !classifier->empty())
        cur = classify_pixelwise(mode == RunMode::real ? cur : to_real(cur), *classifier);
    return cur;
}

std::vector<StageError> quantization_error(const std::vector<NetworkStage>& net,
                                           const FeatureMap& input, const ChipParams& chip,
                                           const QFormat& fmt) {
    ChipParams qchip = chip;
    qchip.fmt = fmt;
    FeatureMap cur_real = to_real(input);
    FeatureMap cur_fixed = to_fixed(cur_real, fmt);
    std::vector<NetworkStage> fixed_net = net;
    for (auto& st : fixed_net)
        if (st.filters.kind == ElemKind::real) st.filters = to_fixed(st.filters, fmt);
    std::vector<NetworkStage> real_net = net;
    for (auto& st : real_net)
        if (st.filters.kind == ElemKind::fixed) {
            FilterSet r = FilterSet::zeros_real(st.filters.out_channels, st.filters.in_channels,
                                                st.filters.h_k, st.filters.w_k);
            for (std::size_t i = 0; i < st.filters.weight_codes.size(); ++i)
                r.weights[i] = dequantize_raw(st.filters.weight_codes[i], st.filters.fmt);
            for (std::size_t i = 0; i < st.filters.bias_codes.size(); ++i)
                r.biases[i] = dequantize_raw(st.filters.bias_codes[i], st.filters.fmt);
            st.filters = std::move(r);
        }

    std::vector<StageError> errors;
    for (std::size_t l = 0; l < net.size(); ++l) {
        cur_real = run_stage(cur_real, real_net[l], RunMode::real, qchip);
        cur_fixed = run_stage(cur_fixed, fixed_net[l], RunMode::fixed_chain, qchip);
        StageError e;
        double sq = 0.0;
        std::size_t mismatches = 0;
        const std::size_t n = cur_real.size();
        for (int c = 0; c < cur_real.channels; ++c) {
            for (int j = 0; j < cur_real.height; ++j) {
                for (int i = 0; i < cur_real.width; ++i) {
                    const double a = cur_real.r(c, j, i);
                    const double b = dequantize_raw(cur_fixed.q(c, j, i), fmt);
                    const double d = std::abs(a - b);
                    e.max_abs = std::max(e.max_abs, d);
                    sq += d * d;
                    if ((a > 0.0) != (b > 0.0) && (a != 0.0 || b != 0.0)) ++mismatches;
                }
            }
        }
        e.rms = n ? std::sqrt(sq / double(n)) : 0.0;
        e.sign_mismatch_frac = n ? double(mismatches) / double(n) : 0.0;
        errors.push_back(e);
    }
    return errors;
}

std::vector<std::pair<int, int>> stage_input_dims(const std::vector<NetworkStage>& net, int h,
                                                  int w) {
    std::vector<std::pair<int, int>> dims{{h, w}};
    for (const auto& stage : net) {
        int ch = h - stage.spec.kernel_h + 1;
        int cw = w - stage.spec.kernel_w + 1;
        if (stage.spec.pool) {
            ch /= stage.spec.pool->ph;
            cw /= stage.spec.pool->pw;
        }
        h = ch;
        w = cw;
        dims.emplace_back(h, w);
    }
    return dims;
}

}  // namespace origami
