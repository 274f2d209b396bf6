#ifndef ORIGAMI_TENSOR_IO_HPP
#define ORIGAMI_TENSOR_IO_HPP

#include <filesystem>
#include <iosfwd>

#include "origami/tensor.hpp"

// OGMI tensor container:
//   0  "OGMI"             magic
//   4  u8                 version (1)
//   5  u8                 dtype: 0 = int16 LE sign-extended fixed codes,
//                                1 = f64 LE real samples
//   6  u32 LE x3          channels, height, width
//   18 payload            channel-major row-major
// dtype-0 codes must fit the word width of the consuming context after
// sign extension; the reader checks 12 bits by default.

namespace origami {

inline constexpr char kTensorMagic[4] = {'O', 'G', 'M', 'I'};
inline constexpr std::uint8_t kTensorVersion = 1;

void write_tensor(std::ostream& os, const FeatureMap& m);
void write_tensor(const std::filesystem::path& path, const FeatureMap& m);

// code_bits bounds dtype-0 codes (they are stored sign-extended in 16-bit
// containers); pass the consuming format's total_bits.
FeatureMap read_tensor(std::istream& is, const QFormat& fixed_fmt = QFormat{});
FeatureMap read_tensor(const std::filesystem::path& path, const QFormat& fixed_fmt = QFormat{});

}  // namespace origami

#endif
