#ifndef ORIGAMI_TENSOR_HPP
#define ORIGAMI_TENSOR_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "origami/qformat.hpp"

namespace origami {

enum class ElemKind { real, fixed };

// Channel-major row-major 3-D tensor of real or fixed-point samples.
// Fixed maps store raw codes; all samples share one QFormat.
struct FeatureMap {
    int channels = 0;
    int height = 0;
    int width = 0;
    ElemKind kind = ElemKind::real;
    QFormat fmt;
    std::vector<double> real;
    std::vector<std::int32_t> codes;

    static FeatureMap zeros_real(int c, int h, int w);
    static FeatureMap zeros_fixed(int c, int h, int w, const QFormat& fmt);

    std::size_t size() const {
        return std::size_t(channels) * height * width;
    }
    std::size_t index(int c, int j, int i) const {
        return (std::size_t(c) * height + j) * width + i;
    }
    double& r(int c, int j, int i) { return real[index(c, j, i)]; }
    double r(int c, int j, int i) const { return real[index(c, j, i)]; }
    std::int32_t& q(int c, int j, int i) { return codes[index(c, j, i)]; }
    std::int32_t q(int c, int j, int i) const { return codes[index(c, j, i)]; }

    void validate() const;
};

// Weights of one convolutional layer: 4-D (out, in, row, col) plus one
// bias per output channel.
struct FilterSet {
    int out_channels = 0;
    int in_channels = 0;
    int h_k = 0;
    int w_k = 0;
    ElemKind kind = ElemKind::real;
    QFormat fmt;
    std::vector<double> weights;
    std::vector<double> biases;
    std::vector<std::int32_t> weight_codes;
    std::vector<std::int32_t> bias_codes;

    static FilterSet zeros_real(int out, int in, int h_k, int w_k);
    static FilterSet zeros_fixed(int out, int in, int h_k, int w_k, const QFormat& fmt);

    std::size_t weight_count() const {
        return std::size_t(out_channels) * in_channels * h_k * w_k;
    }
    std::size_t index(int o, int c, int r, int s) const {
        return ((std::size_t(o) * in_channels + c) * h_k + r) * w_k + s;
    }
    double& w(int o, int c, int r, int s) { return weights[index(o, c, r, s)]; }
    double w(int o, int c, int r, int s) const { return weights[index(o, c, r, s)]; }
    std::int32_t& wq(int o, int c, int r, int s) { return weight_codes[index(o, c, r, s)]; }
    std::int32_t wq(int o, int c, int r, int s) const { return weight_codes[index(o, c, r, s)]; }

    void validate() const;
};

enum class Activation { none, relu };

struct PoolSpec {
    int ph = 2;
    int pw = 2;  // stride equals size
};

// Geometry and post-processing of one convolutional stage.
struct LayerSpec {
    int in_channels = 0;
    int out_channels = 0;
    int kernel_h = 0;
    int kernel_w = 0;
    int input_h = 0;
    int input_w = 0;
    Activation activation = Activation::none;
    std::optional<PoolSpec> pool;

    void validate() const;
    int conv_out_h() const { return input_h - kernel_h + 1; }
    int conv_out_w() const { return input_w - kernel_w + 1; }
    // dims after activation and pooling (odd trailing row/col dropped)
    int out_h() const { return pool ? conv_out_h() / pool->ph : conv_out_h(); }
    int out_w() const { return pool ? conv_out_w() / pool->pw : conv_out_w(); }
};

// Quantize a real map/filter set to codes (or pass fixed input through
// after a format check).
FeatureMap to_fixed(const FeatureMap& x, const QFormat& fmt);
FeatureMap to_real(const FeatureMap& x);
FilterSet to_fixed(const FilterSet& f, const QFormat& fmt);

// Zero-pad channels up to a multiple of block (appends zero channels).
FeatureMap pad_channels(const FeatureMap& x, int block);

}  // namespace origami

#endif
