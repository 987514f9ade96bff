#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>

#include "fusemap/geometry.hpp"

namespace fusemap {

// 4096 words x 24 bits of fuse state. Antifuses are one-time-programmable:
// the mutation API can set bits but never clear them.
class FuseMemory {
public:
    FuseMemory() = default;

    std::uint32_t word(int row) const;
    bool bit(BitAddress addr) const;

    // Sets one bit. Idempotent; there is deliberately no clear operation.
    void set_bit(BitAddress addr);

    // ORs a value into a word (the only word-level write an OTP part allows).
    void merge_word(int row, std::uint32_t value);

    std::size_t popcount() const;

    friend bool operator==(const FuseMemory&, const FuseMemory&) = default;

private:
    std::array<std::uint32_t, ArrayGeometry::word_count> words_{};
};

// Dump file format: '#' comment lines, body lines "RRR: VVVVVV" with 3+6
// uppercase hex digits. The parser also accepts lowercase and 0x prefixes.
FuseMemory parse_dump(std::istream& in);
FuseMemory parse_dump(const std::string& text);
void serialize_dump(const FuseMemory& mem, std::ostream& out, bool omit_zero = true);
std::string serialize_dump(const FuseMemory& mem, bool omit_zero = true);

enum class PatternKind {
    alt_10,
    alt_1100,
    alt_11110000,
    plane_id,
    asymmetric_marker,
    custom,
};

struct PatternParams {
    std::uint64_t seed = 0;
    int phase = 0;          // bit-stream offset for the alternating kinds
    double density = 0.5;   // fill probability for `custom`
};

FuseMemory gen_pattern(PatternKind kind, const PatternParams& params = {});

}  // namespace fusemap
