#include "fusemap/geometry.hpp"

#include <string>

namespace fusemap {
namespace {

// Single swappable table for the group placement convention. Entry i is the
// physical column of logical column i in an unmirrored (west-half) plane.
constexpr std::array<int, 32> make_column_table() {
    std::array<int, 32> table{};
    for (int logical = 0; logical < 32; ++logical) {
        const int group = logical / 4;
        const int in_group = logical % 4;
        const int east_edge = 31 - 4 * group;  // group 0 easternmost
        if (group % 2 == 0) {
            table[logical] = east_edge - in_group;  // east to west
        } else {
            table[logical] = east_edge - 3 + in_group;  // west to east
        }
    }
    return table;
}

constexpr std::array<int, 32> kColumnTable = make_column_table();

constexpr std::array<int, 32> invert(const std::array<int, 32>& table) {
    std::array<int, 32> inv{};
    for (int i = 0; i < 32; ++i) inv[table[i]] = i;
    return inv;
}

constexpr std::array<int, 32> kColumnTableInv = invert(kColumnTable);

void check_row(int row) {
    if (row < 0 || row >= ArrayGeometry::word_count)
        throw RangeError("row " + std::to_string(row) + " out of range 0..4095");
}

void check_bit(int bit) {
    if (bit < 0 || bit >= ArrayGeometry::bits_per_word)
        throw RangeError("bit " + std::to_string(bit) + " out of range 0..23");
}

}  // namespace

PlanePlacement plane_of_bit(int bit) {
    check_bit(bit);
    if (bit >= 16) return {bit - 16, false};  // ECC bits on the west edge
    if (bit < 4) return {8 + bit, false};     // data 0..3 west of the spine
    return {8 + bit, true};                   // data 4..15, mirrored east half
}

int bit_of_plane(int plane) {
    if (plane < 0 || plane >= ArrayGeometry::plane_count)
        throw RangeError("plane " + std::to_string(plane) + " out of range 0..23");
    return plane < 8 ? plane + 16 : plane - 8;
}

RowDecomposition decompose_row(int row) {
    check_row(row);
    RowDecomposition d;
    d.page = row / ArrayGeometry::words_per_page;
    d.word_in_page = row % ArrayGeometry::words_per_page;
    d.pair_half = d.word_in_page < 32 ? PairHalf::A : PairHalf::B;
    d.unit_col_logical = d.word_in_page % 32;
    return d;
}

int pair_partner(int row) {
    check_row(row);
    return row ^ 32;
}

int column_to_physical(int unit_col_logical, bool mirrored) {
    if (unit_col_logical < 0 || unit_col_logical >= 32)
        throw RangeError("logical column " + std::to_string(unit_col_logical) +
                         " out of range 0..31");
    const int col = kColumnTable[static_cast<std::size_t>(unit_col_logical)];
    return mirrored ? 31 - col : col;
}

int column_to_logical(int phys_col, bool mirrored) {
    if (phys_col < 0 || phys_col >= 32)
        throw RangeError("physical column " + std::to_string(phys_col) +
                         " out of range 0..31");
    const int col = mirrored ? 31 - phys_col : phys_col;
    return kColumnTableInv[static_cast<std::size_t>(col)];
}

void check_bit_address(BitAddress addr) {
    check_row(addr.row);
    check_bit(addr.bit);
}

void check_cell_location(const CellLocation& loc) {
    if (loc.plane < 0 || loc.plane >= ArrayGeometry::plane_count)
        throw RangeError("plane " + std::to_string(loc.plane) + " out of range 0..23");
    if (loc.phys_col < 0 || loc.phys_col >= ArrayGeometry::unit_cols_per_plane)
        throw RangeError("phys_col " + std::to_string(loc.phys_col) + " out of range 0..31");
    if (loc.unit_row < 0 || loc.unit_row >= ArrayGeometry::active_rows_per_tile)
        throw RangeError("unit_row " + std::to_string(loc.unit_row) + " out of range 0..31");
}

CellLocation logical_to_physical(BitAddress addr) {
    check_bit_address(addr);
    const RowDecomposition d = decompose_row(addr.row);
    const PlanePlacement p = plane_of_bit(addr.bit);
    CellLocation loc;
    loc.plane = p.plane;
    loc.tile_row = d.page < 32 ? TileRow::south : TileRow::north;
    loc.unit_row = d.page < 32 ? d.page : d.page - 32;
    loc.phys_col = column_to_physical(d.unit_col_logical, p.mirrored);
    loc.pair_half = d.pair_half;
    return loc;
}

BitAddress physical_to_logical(const CellLocation& loc) {
    check_cell_location(loc);
    const int bit = bit_of_plane(loc.plane);
    const bool mirrored = plane_of_bit(bit).mirrored;
    const int logical_col = column_to_logical(loc.phys_col, mirrored);
    const int page = loc.tile_row == TileRow::south ? loc.unit_row : loc.unit_row + 32;
    const int word = logical_col + (loc.pair_half == PairHalf::B ? 32 : 0);
    return {page * ArrayGeometry::words_per_page + word, bit};
}

}  // namespace fusemap
