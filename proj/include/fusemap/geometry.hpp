#pragma once

#include <array>
#include <cstdint>

#include "fusemap/errors.hpp"

namespace fusemap {

// Fixed dimensions of the fuse array: 24 bit planes, each made of 2x2 tiles
// of 18x34 unit cells, of which 16x32 per tile are active data cells.
struct ArrayGeometry {
    static constexpr int plane_count = 24;
    static constexpr int tile_cols_per_plane = 2;
    static constexpr int tile_rows_per_plane = 2;
    static constexpr int raw_cols_per_tile = 18;
    static constexpr int raw_rows_per_tile = 34;
    static constexpr int active_cols_per_tile = 16;
    static constexpr int active_rows_per_tile = 32;
    static constexpr int dummy_cols_per_tile = 2;   // outermost column on each side
    static constexpr int test_rows_per_tile = 2;    // north and south edge rows
    static constexpr int bits_per_unit_cell = 2;

    // Derived counts.
    static constexpr int unit_cols_per_plane =
        tile_cols_per_plane * active_cols_per_tile;                       // 32
    static constexpr int unit_rows_per_plane =
        tile_rows_per_plane * active_rows_per_tile;                       // 64
    static constexpr int unit_cells_per_tile =
        active_cols_per_tile * active_rows_per_tile;                      // 512
    static constexpr int unit_cells_per_plane =
        unit_cells_per_tile * tile_cols_per_plane * tile_rows_per_plane;  // 2048
    static constexpr int bits_per_plane =
        unit_cells_per_plane * bits_per_unit_cell;                        // 4096

    static constexpr int word_count = 4096;
    static constexpr int bits_per_word = 24;
    static constexpr int words_per_page = 64;
    static constexpr int page_count = word_count / words_per_page;        // 64
    static constexpr int total_bits = word_count * bits_per_word;         // 98304
    static constexpr std::uint32_t word_mask = 0xFFFFFF;

    static_assert(active_cols_per_tile == raw_cols_per_tile - dummy_cols_per_tile);
    static_assert(active_rows_per_tile == raw_rows_per_tile - test_rows_per_tile);
    static_assert(unit_cells_per_plane == 2048);
    static_assert(bits_per_plane == 4096);
    static_assert(total_bits == plane_count * bits_per_plane);
};

enum class PairHalf : std::uint8_t { A, B };
enum class TileRow : std::uint8_t { south, north };

// One logical fuse bit: word address and bit position within the word.
struct BitAddress {
    int row = 0;  // 0..4095
    int bit = 0;  // 0..23

    friend bool operator==(const BitAddress&, const BitAddress&) = default;
};

struct RowDecomposition {
    int page = 0;              // 0..63
    int word_in_page = 0;      // 0..63
    PairHalf pair_half = PairHalf::A;  // A = words 0..31 of the page
    int unit_col_logical = 0;  // 0..31, word_in_page mod 32

    friend bool operator==(const RowDecomposition&, const RowDecomposition&) = default;
};

// One physical bitcell. phys_col spans both tile columns west to east;
// unit_row counts from the tile's outer edge inward.
struct CellLocation {
    int plane = 0;
    TileRow tile_row = TileRow::south;
    int phys_col = 0;  // 0..31
    int unit_row = 0;  // 0..31
    PairHalf pair_half = PairHalf::A;

    friend bool operator==(const CellLocation&, const CellLocation&) = default;
};

struct PlanePlacement {
    int plane = 0;
    bool mirrored = false;

    friend bool operator==(const PlanePlacement&, const PlanePlacement&) = default;
};

// West-to-east plane order: ECC bits 16..23, data bits 0..3, [address spine],
// data bits 4..15. The east half (planes 12..23) is laid out mirrored.
PlanePlacement plane_of_bit(int bit);
int bit_of_plane(int plane);

RowDecomposition decompose_row(int row);
int pair_partner(int row);

// Column scrambling within a plane: 8 groups of 4 placed east to west in
// increasing group number; even groups count east-to-west internally, odd
// groups west-to-east. Mirroring reflects the final position.
int column_to_physical(int unit_col_logical, bool mirrored);
int column_to_logical(int phys_col, bool mirrored);

CellLocation logical_to_physical(BitAddress addr);
BitAddress physical_to_logical(const CellLocation& loc);

// Orientation of the two bitcells within a unit cell: half A sits nearer the
// tile's row-0 (outer) edge. Only rendering depends on this convention.
constexpr bool half_a_nearer_outer_edge() { return true; }

// Plane index just west of the central address spine.
constexpr int spine_west_plane() { return 11; }

void check_bit_address(BitAddress addr);
void check_cell_location(const CellLocation& loc);

}  // namespace fusemap
