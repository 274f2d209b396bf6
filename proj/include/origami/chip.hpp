#ifndef ORIGAMI_CHIP_HPP
#define ORIGAMI_CHIP_HPP

#include <cstdint>
#include <vector>

#include "origami/qformat.hpp"

namespace origami {

// Architectural constants of one accelerator chip. f_mhz is the slow
// (I/O and SRAM) clock; the arithmetic units run at twice that rate.
struct ChipParams {
    int n_ch = 8;
    int h_k = 7;
    int w_k = 7;
    int h_in_max = 512;
    double f_mhz = 250.0;
    QFormat fmt;

    void validate() const;
    int n_sop() const { return n_ch / 2; }
    std::int64_t filter_words() const {
        return std::int64_t(n_ch) * n_ch * h_k * w_k;
    }
};

// On-chip image-window SRAM organization, for capacity accounting.
struct SramSpec {
    int banks = 0;
    int rows_per_bank = 0;
    int row_bits = 0;
    std::int64_t total_bits = 0;
};
SramSpec sram_spec(const ChipParams& p);

// How a layer kernel maps onto chip-sized kernel parts. Kernels no larger
// than the chip kernel become a single centered part; larger kernels are
// split on a top-left-anchored grid in steps of the chip kernel size.
// Padding extends the input so every part job produces the full valid
// output grid of the original kernel.
struct KernelPartOffset {
    int dy = 0;  // row offset of the part within the padded kernel
    int dx = 0;
};

struct KernelDecomp {
    int kernel_h = 0, kernel_w = 0;  // original kernel dims
    int padded_h = 0, padded_w = 0;  // zero-padded dims (multiple of chip kernel)
    int pad_top = 0, pad_left = 0, pad_bottom = 0, pad_right = 0;  // input padding
    std::vector<KernelPartOffset> parts;
    int part_count() const { return static_cast<int>(parts.size()); }
};

KernelDecomp decompose_kernel(int kernel_h, int kernel_w, const ChipParams& p);

}  // namespace origami

#endif
