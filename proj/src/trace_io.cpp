#include "origami/trace_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace origami {

namespace {

const char* dir_name(BusDir d) { return d == BusDir::in ? "in" : "out"; }

const char* tag_name(BusTag t) {
    switch (t) {
        case BusTag::filter: return "filter";
        case BusTag::pixel: return "pixel";
        default: return "result";
    }
}

}  // namespace

void write_trace_text(std::ostream& os, const BusTrace& trace, int word_bits) {
    const int digits = std::clamp((word_bits + 3) / 4, 1, 4);
    char buf[64];
    for (const BusRecord& r : trace) {
        std::snprintf(buf, sizeof buf, "%llu,%s,%s,0x%0*X\n",
                      static_cast<unsigned long long>(r.cycle), dir_name(r.dir), tag_name(r.tag),
                      digits, unsigned(r.word));
        os << buf;
    }
    if (!os) throw std::runtime_error("write_trace_text: write failed");
}

void write_trace_text(const std::filesystem::path& path, const BusTrace& trace, int word_bits) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_trace_text: cannot open " + path.string());
    write_trace_text(os, trace, word_bits);
}

void write_trace_binary(std::ostream& os, const BusTrace& trace) {
    for (const BusRecord& r : trace) {
        unsigned char rec[12];
        for (int k = 0; k < 8; ++k) rec[k] = static_cast<unsigned char>(r.cycle >> (8 * k));
        rec[8] = static_cast<unsigned char>(r.dir);
        rec[9] = static_cast<unsigned char>(r.tag);
        rec[10] = static_cast<unsigned char>(r.word);
        rec[11] = static_cast<unsigned char>(r.word >> 8);
        os.write(reinterpret_cast<const char*>(rec), sizeof rec);
    }
    if (!os) throw std::runtime_error("write_trace_binary: write failed");
}

void write_trace_binary(const std::filesystem::path& path, const BusTrace& trace) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("write_trace_binary: cannot open " + path.string());
    write_trace_binary(os, trace);
}

BusTrace read_trace_binary(std::istream& is) {
    BusTrace trace;
    unsigned char rec[12];
    while (is.read(reinterpret_cast<char*>(rec), sizeof rec)) {
        BusRecord r;
        r.cycle = 0;
        for (int k = 0; k < 8; ++k) r.cycle |= std::uint64_t(rec[k]) << (8 * k);
        if (rec[8] > 1 || rec[9] > 2)
            throw std::runtime_error("read_trace_binary: corrupt record");
        r.dir = static_cast<BusDir>(rec[8]);
        r.tag = static_cast<BusTag>(rec[9]);
        r.word = static_cast<std::uint16_t>(rec[10] | (std::uint16_t(rec[11]) << 8));
        trace.push_back(r);
    }
    if (is.gcount() != 0) throw std::runtime_error("read_trace_binary: truncated record");
    return trace;
}

}  // namespace origami
