#include "origami/tensor_io.hpp"

#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace origami {

namespace {

void put_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 24)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    return std::uint32_t(b[0]) | std::uint32_t(b[1]) << 8 | std::uint32_t(b[2]) << 16 |
           std::uint32_t(b[3]) << 24;
}

}  // namespace

void write_tensor(std::ostream& os, const FeatureMap& m) {
    m.validate();
    os.write(kTensorMagic, 4);
    os.put(static_cast<char>(kTensorVersion));
    os.put(m.kind == ElemKind::fixed ? '\x00' : '\x01');
    put_u32(os, static_cast<std::uint32_t>(m.channels));
    put_u32(os, static_cast<std::uint32_t>(m.height));
    put_u32(os, static_cast<std::uint32_t>(m.width));
    if (m.kind == ElemKind::fixed) {
        for (std::int32_t c : m.codes) {
            const std::uint16_t v = static_cast<std::uint16_t>(static_cast<std::int16_t>(c));
            const unsigned char b[2] = {static_cast<unsigned char>(v),
                                        static_cast<unsigned char>(v >> 8)};
            os.write(reinterpret_cast<const char*>(b), 2);
        }
    } else {
        for (double d : m.real) {
            std::uint64_t bits;
            std::memcpy(&bits, &d, 8);
            unsigned char b[8];
            for (int k = 0; k < 8; ++k) b[k] = static_cast<unsigned char>(bits >> (8 * k));
            os.write(reinterpret_cast<const char*>(b), 8);
        }
    }
    if (!os) throw std::runtime_error("write_tensor: write failed");
}

void write_tensor(const std::filesystem::path& path, const FeatureMap& m) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("write_tensor: cannot open " + path.string());
    write_tensor(os, m);
}

FeatureMap read_tensor(std::istream& is, const QFormat& fixed_fmt) {
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kTensorMagic, 4) != 0)
        throw std::runtime_error("read_tensor: bad magic (not an OGMI tensor)");
    const int version = is.get();
    if (version != kTensorVersion)
        throw std::runtime_error("read_tensor: unsupported version " + std::to_string(version));
    const int dtype = is.get();
    if (dtype != 0 && dtype != 1)
        throw std::runtime_error("read_tensor: unknown dtype " + std::to_string(dtype));
    const std::uint32_t c = get_u32(is);
    const std::uint32_t h = get_u32(is);
    const std::uint32_t w = get_u32(is);
    if (!is) throw std::runtime_error("read_tensor: truncated header");
    const std::uint64_t n = std::uint64_t(c) * h * w;
    if (n > (std::uint64_t(1) << 31))
        throw std::runtime_error("read_tensor: unreasonable tensor size");

    FeatureMap m;
    if (dtype == 0) {
        m = FeatureMap::zeros_fixed(int(c), int(h), int(w), fixed_fmt);
        for (std::uint64_t k = 0; k < n; ++k) {
            unsigned char b[2];
            is.read(reinterpret_cast<char*>(b), 2);
            const std::int16_t v =
                static_cast<std::int16_t>(std::uint16_t(b[0]) | std::uint16_t(b[1]) << 8);
            if (v < fixed_fmt.min_raw() || v > fixed_fmt.max_raw())
                throw std::runtime_error("read_tensor: code " + std::to_string(v) +
                                         " does not fit " + std::to_string(fixed_fmt.total_bits) +
                                         " bits");
            m.codes[k] = v;
        }
    } else {
        m = FeatureMap::zeros_real(int(c), int(h), int(w));
        for (std::uint64_t k = 0; k < n; ++k) {
            unsigned char b[8];
            is.read(reinterpret_cast<char*>(b), 8);
            std::uint64_t bits = 0;
            for (int j = 0; j < 8; ++j) bits |= std::uint64_t(b[j]) << (8 * j);
            double d;
            std::memcpy(&d, &bits, 8);
            m.real[k] = d;
        }
    }
    if (!is) throw std::runtime_error("read_tensor: truncated payload");
    is.peek();
    if (!is.eof()) throw std::runtime_error("read_tensor: payload length does not match dims");
    return m;
}

FeatureMap read_tensor(const std::filesystem::path& path, const QFormat& fixed_fmt) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("read_tensor: cannot open " + path.string());
    return read_tensor(is, fixed_fmt);
}

}  // namespace origami
