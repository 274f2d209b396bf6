#ifndef ORIGAMI_TRACE_IO_HPP
#define ORIGAMI_TRACE_IO_HPP

#include <filesystem>
#include <iosfwd>

#include "origami/datapath.hpp"

// Bus trace export. Text: one `cycle,direction,tag,0xHHH` record per
// line, word zero-padded to the word width. Binary: per record u64 cycle
// LE, u8 direction (0 in / 1 out), u8 tag (0 filter / 1 pixel / 2
// result), u16 word LE.

namespace origami {

void write_trace_text(std::ostream& os, const BusTrace& trace, int word_bits = 12);
void write_trace_text(const std::filesystem::path& path, const BusTrace& trace,
                      int word_bits = 12);

void write_trace_binary(std::ostream& os, const BusTrace& trace);
void write_trace_binary(const std::filesystem::path& path, const BusTrace& trace);

BusTrace read_trace_binary(std::istream& is);

}  // namespace origami

#endif
