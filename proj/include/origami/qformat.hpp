#ifndef ORIGAMI_QFORMAT_HPP
#define ORIGAMI_QFORMAT_HPP

#include <cstdint>
#include <span>

// Two's-complement fixed-point number system used by every arithmetic
// element of the modeled datapath. A QWord is a narrow code (12 bit by
// default), a WideWord is the full-precision result of a sum of products
// before it is truncated back to the narrow width.

namespace origami {

enum class Overflow { wrap, saturate };

struct QFormat {
    int total_bits = 12;
    int frac_bits = 9;
    Overflow overflow = Overflow::wrap;

    bool valid() const {
        return frac_bits >= 1 && frac_bits < total_bits && total_bits <= 32;
    }
    std::int64_t min_raw() const { return -(std::int64_t(1) << (total_bits - 1)); }
    std::int64_t max_raw() const { return (std::int64_t(1) << (total_bits - 1)) - 1; }
    double resolution() const;  // 2^-frac_bits

    bool operator==(const QFormat&) const = default;
};

struct QWord {
    std::int32_t raw = 0;
    QFormat fmt;
};

// Result of an inner product of QWords: integer code with an implied
// fractional length of 2*fmt.frac_bits. Exact for any sum of up to
// h_k*w_k products as long as 2*total_bits + ceil(log2(n)) <= 63;
// inner_product_full rejects formats wide enough to break that.
struct WideWord {
    std::int64_t raw = 0;
    QFormat fmt;
};

// floor(x * 2^frac_bits), out-of-range handled per fmt.overflow.
QWord quantize(double x, const QFormat& fmt);

// raw * 2^-frac_bits, exact.
double dequantize(const QWord& q);
double dequantize_raw(std::int64_t raw, const QFormat& fmt);

// Exact sum of elementwise products at doubled fractional precision.
WideWord inner_product_full(std::span<const QWord> window, std::span<const QWord> kernel);
std::int64_t inner_product_raw(std::span<const std::int32_t> window,
                               std::span<const std::int32_t> kernel, const QFormat& fmt);

// Reduce an integer code to fmt.total_bits: wrap keeps the low bits,
// saturate clamps to the format extremes.
std::int32_t narrow_raw(std::int64_t v, const QFormat& fmt);

// Drop the lowest frac_bits bits (floor toward -inf), then narrow.
QWord truncate(const WideWord& w, const QFormat& fmt);
std::int32_t truncate_raw(std::int64_t wide_raw, const QFormat& fmt);

}  // namespace origami

#endif
