#include "origami/chip.hpp"

#include <stdexcept>
#include <string>

namespace origami {

void ChipParams::validate() const {
    if (n_ch < 2 || n_ch % 2 != 0)
        throw std::invalid_argument("ChipParams: n_ch must be even and >= 2, got " +
                                    std::to_string(n_ch));
    if (h_k < 1 || w_k < 1 || h_k % 2 == 0 || w_k % 2 == 0)
        throw std::invalid_argument("ChipParams: kernel dims must be odd and >= 1");
    if (h_in_max < h_k)
        throw std::invalid_argument("ChipParams: h_in_max smaller than kernel height");
    if (f_mhz <= 0.0) throw std::invalid_argument("ChipParams: f_mhz must be positive");
    if (!fmt.valid())
        throw std::invalid_argument("ChipParams: invalid fixed-point format");
}

SramSpec sram_spec(const ChipParams& p) {
    SramSpec s;
    const std::int64_t rows = std::int64_t(p.n_ch) * p.h_in_max;
    s.rows_per_bank = 1024;
    s.banks = static_cast<int>((rows + s.rows_per_bank - 1) / s.rows_per_bank);
    s.row_bits = p.w_k * p.fmt.total_bits;
    s.total_bits = rows * s.row_bits;
    return s;
}

KernelDecomp decompose_kernel(int kernel_h, int kernel_w, const ChipParams& p) {
    if (kernel_h < 1 || kernel_w < 1)
        throw std::invalid_argument("decompose_kernel: kernel dims must be >= 1");
    KernelDecomp d;
    d.kernel_h = kernel_h;
    d.kernel_w = kernel_w;
    if (kernel_h <= p.h_k && kernel_w <= p.w_k) {
        d.padded_h = p.h_k;
        d.padded_w = p.w_k;
        d.pad_top = (p.h_k - kernel_h) / 2;
        d.pad_left = (p.w_k - kernel_w) / 2;
        d.pad_bottom = (p.h_k - kernel_h) - d.pad_top;
        d.pad_right = (p.w_k - kernel_w) - d.pad_left;
        d.parts.push_back({0, 0});
        return d;
    }
    const int parts_y = (kernel_h + p.h_k - 1) / p.h_k;
    const int parts_x = (kernel_w + p.w_k - 1) / p.w_k;
    d.padded_h = parts_y * p.h_k;
    d.padded_w = parts_x * p.w_k;
    d.pad_bottom = d.padded_h - kernel_h;
    d.pad_right = d.padded_w - kernel_w;
    for (int a = 0; a < parts_y; ++a)
        for (int b = 0; b < parts_x; ++b) d.parts.push_back({a * p.h_k, b * p.w_k});
    return d;
}

}  // namespace origami
