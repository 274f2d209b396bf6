#ifndef ORIGAMI_GOLDEN_HPP
#define ORIGAMI_GOLDEN_HPP

#include <vector>

#include "origami/chip.hpp"
#include "origami/tensor.hpp"

// Reference implementations of the network math. conv_real is the plain
// double-precision valid convolution; conv_fixed_chain is the behavioral
// (non-cycle) model of the exact hardware arithmetic chain and is the
// bit-exact contract the cycle simulator and the off-chip accumulation
// are verified against.

namespace origami {

// Valid convolution: output pixel (0,0) depends on input rows
// 0..kernel_h-1 and cols 0..kernel_w-1. Output dims (out_channels,
// h-kernel_h+1, w-kernel_w+1).
FeatureMap conv_real(const FeatureMap& x, const FilterSet& f);

// Hardware arithmetic chain on codes: per input channel and kernel part,
// full-precision inner product truncated to the word format (SoP); per
// n_ch-channel block, exact sum of the truncated values narrowed to the
// word format (ChSum / chip output); block and part partials summed
// exactly off-chip, bias added, one final narrowing. Requires channels
// already zero-padded to a multiple of p.n_ch.
FeatureMap conv_fixed_chain(const FeatureMap& x, const FilterSet& f, const ChipParams& p,
                            const QFormat& fmt);

FeatureMap relu(const FeatureMap& x);

// 2x2 max pooling with stride 2; odd trailing row/column dropped.
FeatureMap maxpool2(const FeatureMap& x);

// One fully-connected layer of the pixel-wise classifier.
struct DenseLayer {
    int out_dim = 0;
    int in_dim = 0;
    std::vector<double> weights;  // row-major out x in
    std::vector<double> biases;   // per output
    Activation activation = Activation::none;
};

// Applies the fully-connected stack independently per pixel; equivalent
// to a chain of 1x1 convolutions.
FeatureMap classify_pixelwise(const FeatureMap& x, const std::vector<DenseLayer>& stack);

struct NetworkStage {
    LayerSpec spec;
    FilterSet filters;
};

enum class RunMode { real, fixed_chain };

// x^(l+1) = pool(act(conv(x^(l)) + b)) per stage, then the classifier if
// present. In fixed_chain mode the classifier runs on dequantized values.
FeatureMap run_network(const FeatureMap& x, const std::vector<NetworkStage>& net, RunMode mode,
                       const ChipParams& chip,
                       const std::vector<DenseLayer>* classifier = nullptr);

struct StageError {
    double max_abs = 0.0;
    double rms = 0.0;
    double sign_mismatch_frac = 0.0;
};

// Per-stage error between the real and fixed_chain runs of the same
// network at the given format.
std::vector<StageError> quantization_error(const std::vector<NetworkStage>& net,
                                           const FeatureMap& input, const ChipParams& chip,
                                           const QFormat& fmt);

// Input dims of each stage given the first stage's input, following the
// conv/pool geometry recurrence. Returns net.size()+1 entries (last =
// output dims of the final stage).
std::vector<std::pair<int, int>> stage_input_dims(const std::vector<NetworkStage>& net, int h,
                                                  int w);

}  // namespace origami

#endif
