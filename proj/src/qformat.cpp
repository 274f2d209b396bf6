#include "origami/qformat.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace origami {

namespace {

void require_valid(const QFormat& fmt) {
    if (!fmt.valid())
        throw std::invalid_argument("QFormat: need 1 <= frac_bits < total_bits <= 32, got " +
                                    std::to_string(fmt.total_bits) + "/" +
                                    std::to_string(fmt.frac_bits));
}

int ceil_log2(std::size_t n) {
    int b = 0;
    while ((std::size_t(1) << b) < n) ++b;
    return b;
}

}  // namespace

double QFormat::resolution() const { return std::ldexp(1.0, -frac_bits); }

std::int32_t narrow_raw(std::int64_t v, const QFormat& fmt) {
    if (fmt.overflow == Overflow::saturate) {
        if (v < fmt.min_raw()) return static_cast<std::int32_t>(fmt.min_raw());
        if (v > fmt.max_raw()) return static_cast<std::int32_t>(fmt.max_raw());
        return static_cast<std::int32_t>(v);
    }
    // wrap: keep the low total_bits bits, sign-extend
    const int shift = 64 - fmt.total_bits;
    return static_cast<std::int32_t>((static_cast<std::int64_t>(static_cast<std::uint64_t>(v) << shift)) >> shift);
}

QWord quantize(double x, const QFormat& fmt) {
    require_valid(fmt);
    if (!std::isfinite(x)) throw std::invalid_argument("quantize: non-finite input");
    double scaled = std::floor(std::ldexp(x, fmt.frac_bits));
    std::int64_t code;
    if (scaled >= static_cast<double>(std::numeric_limits<std::int64_t>::max()))
        code = std::numeric_limits<std::int64_t>::max();
    else if (scaled <= static_cast<double>(std::numeric_limits<std::int64_t>::min()))
        code = std::numeric_limits<std::int64_t>::min();
    else
        code = static_cast<std::int64_t>(scaled);
    return QWord{narrow_raw(code, fmt), fmt};
}

double dequantize(const QWord& q) { return dequantize_raw(q.raw, q.fmt); }

double dequantize_raw(std::int64_t raw, const QFormat& fmt) {
    return std::ldexp(static_cast<double>(raw), -fmt.frac_bits);
}

std::int64_t inner_product_raw(std::span<const std::int32_t> window,
                               std::span<const std::int32_t> kernel, const QFormat& fmt) {
    if (window.size() != kernel.size())
        throw std::invalid_argument("inner_product_full: operand lengths differ");
    // guard: n products of total_bits-wide codes must fit the 64-bit result
    if (2 * fmt.total_bits + ceil_log2(window.size() | 1) > 63)
        throw std::overflow_error("inner_product_full: format too wide for exact 64-bit sum");
    std::int64_t acc = 0;
    for (std::size_t i = 0; i < window.size(); ++i)
        acc += static_cast<std::int64_t>(window[i]) * kernel[i];
    return acc;
}

WideWord inner_product_full(std::span<const QWord> window, std::span<const QWord> kernel) {
    if (window.size() != kernel.size())
        throw std::invalid_argument("inner_product_full: operand lengths differ");
    QFormat fmt = window.empty() ? QFormat{} : window[0].fmt;
    if (2 * fmt.total_bits + ceil_log2(window.size() | 1) > 63)
        throw std::overflow_error("inner_product_full: format too wide for exact 64-bit sum");
    std::int64_t acc = 0;
    for (std::size_t i = 0; i < window.size(); ++i) {
        if (window[i].fmt != fmt || kernel[i].fmt != fmt)
            throw std::invalid_argument("inner_product_full: mixed operand formats");
        acc += static_cast<std::int64_t>(window[i].raw) * kernel[i].raw;
    }
    return WideWord{acc, fmt};
}

std::int32_t truncate_raw(std::int64_t wide_raw, const QFormat& fmt) {
    require_valid(fmt);
    return narrow_raw(wide_raw >> fmt.frac_bits, fmt);
}

QWord truncate(const WideWord& w, const QFormat& fmt) {
    return QWord{truncate_raw(w.raw, fmt), fmt};
}

}  // namespace origami
