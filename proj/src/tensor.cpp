#include "origami/tensor.hpp"

#include <stdexcept>
#include <string>

namespace origami {

FeatureMap FeatureMap::zeros_real(int c, int h, int w) {
    FeatureMap m;
    m.channels = c;
    m.height = h;
    m.width = w;
    m.kind = ElemKind::real;
    m.real.assign(std::size_t(c) * h * w, 0.0);
    return m;
}

FeatureMap FeatureMap::zeros_fixed(int c, int h, int w, const QFormat& fmt) {
    FeatureMap m;
    m.channels = c;
    m.height = h;
    m.width = w;
    m.kind = ElemKind::fixed;
    m.fmt = fmt;
    m.codes.assign(std::size_t(c) * h * w, 0);
    return m;
}

void FeatureMap::validate() const {
    if (channels < 0 || height < 0 || width < 0)
        throw std::invalid_argument("FeatureMap: negative dimension");
    const std::size_t n = size();
    if (kind == ElemKind::real) {
        if (real.size() != n) throw std::invalid_argument("FeatureMap: real payload size mismatch");
    } else {
        if (codes.size() != n) throw std::invalid_argument("FeatureMap: code payload size mismatch");
        if (!fmt.valid()) throw std::invalid_argument("FeatureMap: invalid format");
    }
}

FilterSet FilterSet::zeros_real(int out, int in, int h_k, int w_k) {
    FilterSet f;
    f.out_channels = out;
    f.in_channels = in;
    f.h_k = h_k;
    f.w_k = w_k;
    f.kind = ElemKind::real;
    f.weights.assign(std::size_t(out) * in * h_k * w_k, 0.0);
    f.biases.assign(out, 0.0);
    return f;
}

FilterSet FilterSet::zeros_fixed(int out, int in, int h_k, int w_k, const QFormat& fmt) {
    FilterSet f;
    f.out_channels = out;
    f.in_channels = in;
    f.h_k = h_k;
    f.w_k = w_k;
    f.kind = ElemKind::fixed;
    f.fmt = fmt;
    f.weight_codes.assign(std::size_t(out) * in * h_k * w_k, 0);
    f.bias_codes.assign(out, 0);
    return f;
}

void FilterSet::validate() const {
    if (out_channels < 1 || in_channels < 1 || h_k < 1 || w_k < 1)
        throw std::invalid_argument("FilterSet: non-positive dimension");
    const std::size_t n = weight_count();
    if (kind == ElemKind::real) {
        if (weights.size() != n || biases.size() != std::size_t(out_channels))
            throw std::invalid_argument("FilterSet: real payload size mismatch");
    } else {
        if (weight_codes.size() != n || bias_codes.size() != std::size_t(out_channels))
            throw std::invalid_argument("FilterSet: code payload size mismatch");
        if (!fmt.valid()) throw std::invalid_argument("FilterSet: invalid format");
    }
}

void LayerSpec::validate() const {
    if (in_channels < 1 || out_channels < 1)
        throw std::invalid_argument("LayerSpec: channel counts must be >= 1");
    if (kernel_h < 1 || kernel_w < 1 || kernel_h % 2 == 0 || kernel_w % 2 == 0)
        throw std::invalid_argument("LayerSpec: kernel dims must be odd and >= 1");
    if (input_h < kernel_h || input_w < kernel_w)
        throw std::invalid_argument("LayerSpec: input smaller than kernel");
    if (pool && (pool->ph < 1 || pool->pw < 1))
        throw std::invalid_argument("LayerSpec: invalid pooling size");
}

FeatureMap to_fixed(const FeatureMap& x, const QFormat& fmt) {
    x.validate();
    if (x.kind == ElemKind::fixed) {
        if (x.fmt != fmt) throw std::invalid_argument("to_fixed: format mismatch");
        return x;
    }
    FeatureMap out = FeatureMap::zeros_fixed(x.channels, x.height, x.width, fmt);
    for (std::size_t i = 0; i < x.real.size(); ++i) out.codes[i] = quantize(x.real[i], fmt).raw;
    return out;
}

FeatureMap to_real(const FeatureMap& x) {
    x.validate();
    if (x.kind == ElemKind::real) return x;
    FeatureMap out = FeatureMap::zeros_real(x.channels, x.height, x.width);
    for (std::size_t i = 0; i < x.codes.size(); ++i)
        out.real[i] = dequantize_raw(x.codes[i], x.fmt);
    return out;
}

FilterSet to_fixed(const FilterSet& f, const QFormat& fmt) {
    f.validate();
    if (f.kind == ElemKind::fixed) {
        if (f.fmt != fmt) throw std::invalid_argument("to_fixed: format mismatch");
        return f;
    }
    FilterSet out = FilterSet::zeros_fixed(f.out_channels, f.in_channels, f.h_k, f.w_k, fmt);
    for (std::size_t i = 0; i < f.weights.size(); ++i)
        out.weight_codes[i] = quantize(f.weights[i], fmt).raw;
    for (std::size_t i = 0; i < f.biases.size(); ++i)
        out.bias_codes[i] = quantize(f.biases[i], fmt).raw;
    return out;
}

FeatureMap pad_channels(const FeatureMap& x, int block) {
    x.validate();
    if (block < 1) throw std::invalid_argument("pad_channels: block must be >= 1");
    const int padded = ((x.channels + block - 1) / block) * block;
    if (padded == x.channels) return x;
    FeatureMap out = x.kind == ElemKind::real
                         ? FeatureMap::zeros_real(padded, x.height, x.width)
                         : FeatureMap::zeros_fixed(padded, x.height, x.width, x.fmt);
    if (x.kind == ElemKind::real)
        std::copy(x.real.begin(), x.real.end(), out.real.begin());
    else
        std::copy(x.codes.begin(), x.codes.end(), out.codes.begin());
    return out;
}

}  // namespace origami
