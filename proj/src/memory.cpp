#include "fusemap/memory.hpp"

#include <bit>
#include <bitset>
#include <cctype>
#include <cstdio>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

namespace fusemap {
namespace {

void check_row(int row) {
    if (row < 0 || row >= ArrayGeometry::word_count)
        throw RangeError("row " + std::to_string(row) + " out of range 0..4095");
}

// Parses one hex field, optionally 0x-prefixed, returning false on garbage.
bool parse_hex_field(const std::string& s, unsigned long& out) {
    std::size_t pos = 0;
    std::string body = s;
    if (body.size() > 2 && body[0] == '0' && (body[1] == 'x' || body[1] == 'X'))
        body = body.substr(2);
    if (body.empty()) return false;
    for (char c : body)
        if (!std::isxdigit(static_cast<unsigned char>(c))) return false;
    out = std::stoul(body, &pos, 16);
    return pos == body.size();
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

std::uint32_t FuseMemory::word(int row) const {
    check_row(row);
    return words_[static_cast<std::size_t>(row)];
}

bool FuseMemory::bit(BitAddress addr) const {
    check_bit_address(addr);
    return (words_[static_cast<std::size_t>(addr.row)] >> addr.bit) & 1u;
}

void FuseMemory::set_bit(BitAddress addr) {
    check_bit_address(addr);
    words_[static_cast<std::size_t>(addr.row)] |= 1u << addr.bit;
}

void FuseMemory::merge_word(int row, std::uint32_t value) {
    check_row(row);
    if (value > ArrayGeometry::word_mask)
        throw RangeError("value exceeds 24 bits");
    words_[static_cast<std::size_t>(row)] |= value;
}

std::size_t FuseMemory::popcount() const {
    std::size_t n = 0;
    for (std::uint32_t w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
}

FuseMemory parse_dump(std::istream& in) {
    FuseMemory mem;
    std::bitset<ArrayGeometry::word_count> seen;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const std::size_t colon = t.find(':');
        if (colon == std::string::npos)
            throw ParseError("expected 'RRR: VVVVVV'", lineno);
        unsigned long row = 0, value = 0;
        if (!parse_hex_field(trim(t.substr(0, colon)), row))
            throw ParseError("bad row field", lineno);
        if (!parse_hex_field(trim(t.substr(colon + 1)), value))
            throw ParseError("bad value field", lineno);
        if (row >= ArrayGeometry::word_count)
            throw RangeError("line " + std::to_string(lineno) + ": row out of range");
        if (value > ArrayGeometry::word_mask)
            throw RangeError("line " + std::to_string(lineno) + ": value exceeds 24 bits");
        if (seen[row])
            throw ConflictError("line " + std::to_string(lineno) + ": duplicate row " +
                                std::to_string(row));
        seen[row] = true;
        mem.merge_word(static_cast<int>(row), static_cast<std::uint32_t>(value));
    }
    return mem;
}

FuseMemory parse_dump(const std::string& text) {
    std::istringstream in(text);
    return parse_dump(in);
}

void serialize_dump(const FuseMemory& mem, std::ostream& out, bool omit_zero) {
    char buf[16];
    for (int row = 0; row < ArrayGeometry::word_count; ++row) {
        const std::uint32_t w = mem.word(row);
        if (omit_zero && w == 0) continue;
        std::snprintf(buf, sizeof buf, "%03X: %06X\n", row, w);
        out << buf;
    }
}

std::string serialize_dump(const FuseMemory& mem, bool omit_zero) {
    std::ostringstream out;
    serialize_dump(mem, out, omit_zero);
    return out.str();
}

namespace {

FuseMemory alternating(int period, int phase) {
    FuseMemory mem;
    for (int row = 0; row < ArrayGeometry::word_count; ++row) {
        for (int bit = 0; bit < ArrayGeometry::bits_per_word; ++bit) {
            const long k = static_cast<long>(row) * 24 + bit + phase;
            if (((k % period) + period) % period < period / 2) mem.set_bit({row, bit});
        }
    }
    return mem;
}

// Per-plane identity: page p carries bit_of_plane(p), its 5-bit index
// repeated down the page.
FuseMemory plane_id_pattern() {
    FuseMemory mem;
    for (int plane = 0; plane < ArrayGeometry::plane_count; ++plane) {
        const int bit = bit_of_plane(plane);
        for (int w = 0; w < ArrayGeometry::words_per_page; ++w) {
            if ((bit >> (w % 5)) & 1)
                mem.set_bit({plane * ArrayGeometry::words_per_page + w, bit});
        }
    }
    return mem;
}

// A glyph with no horizontal or vertical mirror symmetry, drawn in physical
// cell space on every plane: a west-anchored triangle near the north edge
// plus one lone cell further south. Only the A half of each pair is set so
// the shape survives the OR readout unchanged.
FuseMemory asymmetric_marker_pattern() {
    FuseMemory mem;
    auto set_cell = [&mem](int grid_row, int col) {
        const bool north = grid_row < 32;
        CellLocation loc;
        loc.tile_row = north ? TileRow::north : TileRow::south;
        loc.unit_row = north ? grid_row : 63 - grid_row;
        loc.phys_col = col;
        loc.pair_half = PairHalf::A;
        for (int plane = 0; plane < ArrayGeometry::plane_count; ++plane) {
            loc.plane = plane;
            mem.set_bit(physical_to_logical(loc));
        }
    };
    for (int r = 2; r <= 6; ++r)
        for (int c = 2; c <= r; ++c) set_cell(r, c);
    set_cell(40, 25);
    return mem;
}

FuseMemory random_fill(std::uint64_t seed, double density) {
    if (density < 0.0 || density > 1.0)
        throw ParameterError("density must be in [0, 1]");
    FuseMemory mem;
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(density);
    for (int row = 0; row < ArrayGeometry::word_count; ++row)
        for (int bit = 0; bit < ArrayGeometry::bits_per_word; ++bit)
            if (coin(rng)) mem.set_bit({row, bit});
    return mem;
}

}  // namespace

FuseMemory gen_pattern(PatternKind kind, const PatternParams& params) {
    switch (kind) {
        case PatternKind::alt_10: return alternating(2, params.phase);
        case PatternKind::alt_1100: return alternating(4, params.phase);
        case PatternKind::alt_11110000: return alternating(8, params.phase);
        case PatternKind::plane_id: return plane_id_pattern();
        case PatternKind::asymmetric_marker: return asymmetric_marker_pattern();
        case PatternKind::custom: return random_fill(params.seed, params.density);
    }
    throw ParameterError("unknown pattern kind");
}

}  // namespace fusemap
