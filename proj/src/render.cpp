#include "fusemap/render.hpp"

#include <sstream>
#include <vector>

namespace fusemap {
namespace {

constexpr int kRawCols = ArrayGeometry::raw_cols_per_tile * ArrayGeometry::tile_cols_per_plane;  // 36
constexpr int kPlanes = ArrayGeometry::plane_count;
constexpr int kFrameWidth = kPlanes * (kRawCols + 1) - 1;

// -1 for a dummy lithography column, else the physical unit-cell column.
int phys_col_of_raw(int raw_col) {
    if (raw_col == 0 || raw_col == 17 || raw_col == 18 || raw_col == 35) return -1;
    return raw_col < 17 ? raw_col - 1 : raw_col - 3;
}

char sep_char(int plane) { return plane == spine_west_plane() ? '|' : ' '; }

// One character row of a physical view: test/calibration furniture or a row
// of cells at (tile, unit_row), optionally a specific pair half.
struct RowDesc {
    char furniture = 0;  // 'T' or 'c'; 0 for a data row
    TileRow tile = TileRow::north;
    int unit_row = 0;
    PairHalf half = PairHalf::A;
};

// Top-down row layout. The outer bitcell of each unit cell is half A, so in
// the north tile A renders above B and in the south tile below it.
std::vector<RowDesc> bits_rows() {
    std::vector<RowDesc> rows;
    rows.push_back({.furniture = 'T'});
    for (int u = 0; u < 32; ++u) {
        rows.push_back({0, TileRow::north, u, PairHalf::A});
        rows.push_back({0, TileRow::north, u, PairHalf::B});
    }
    rows.push_back({.furniture = 'T'});
    rows.push_back({.furniture = 'T'});
    for (int u = 31; u >= 0; --u) {
        rows.push_back({0, TileRow::south, u, PairHalf::B});
        rows.push_back({0, TileRow::south, u, PairHalf::A});
    }
    rows.push_back({.furniture = 'T'});
    rows.push_back({.furniture = 'c'});
    return rows;
}

std::vector<RowDesc> pvc_rows() {
    std::vector<RowDesc> rows;
    rows.push_back({.furniture = 'T'});
    for (int u = 0; u < 32; ++u) rows.push_back({0, TileRow::north, u, PairHalf::A});
    rows.push_back({.furniture = 'T'});
    rows.push_back({.furniture = 'T'});
    for (int u = 31; u >= 0; --u) rows.push_back({0, TileRow::south, u, PairHalf::A});
    rows.push_back({.furniture = 'T'});
    rows.push_back({.furniture = 'c'});
    return rows;
}

std::string render_physical(const FuseMemory& mem, bool pvc) {
    const std::vector<RowDesc> rows = pvc ? pvc_rows() : bits_rows();
    std::ostringstream out;
    for (const RowDesc& rd : rows) {
        std::string line;
        line.reserve(static_cast<std::size_t>(kFrameWidth));
        for (int plane = 0; plane < kPlanes; ++plane) {
            for (int raw = 0; raw < kRawCols; ++raw) {
                if (rd.furniture) {
                    line.push_back(rd.furniture);
                    continue;
                }
                const int col = phys_col_of_raw(raw);
                if (col < 0) {
                    line.push_back('x');
                    continue;
                }
                CellLocation loc{plane, rd.tile, col, rd.unit_row, rd.half};
                bool set;
                if (pvc) {
                    const BitAddress a = physical_to_logical(loc);
                    set = mem.bit(a) || mem.bit({pair_partner(a.row), a.bit});
                } else {
                    set = mem.bit(physical_to_logical(loc));
                }
                line.push_back(set ? '#' : '.');
            }
            if (plane + 1 < kPlanes) line.push_back(sep_char(plane));
        }
        out << line << '\n';
    }
    return out.str();
}

std::string render_logical(const FuseMemory& mem) {
    std::ostringstream out;
    for (int row = 0; row < ArrayGeometry::word_count; ++row) {
        std::string line(24, '.');
        for (int bit = 0; bit < 24; ++bit)
            if (mem.bit({row, bit})) line[static_cast<std::size_t>(23 - bit)] = '#';
        out << line << '\n';
    }
    return out.str();
}

}  // namespace

int physical_bits_frame_height() { return static_cast<int>(bits_rows().size()); }
int physical_frame_width() { return kFrameWidth; }

std::string render(const FuseMemory& mem, RenderView view) {
    switch (view) {
        case RenderView::logical_bits: return render_logical(mem);
        case RenderView::physical_bits: return render_physical(mem, false);
        case RenderView::physical_pvc: return render_physical(mem, true);
    }
    throw ParameterError("unknown render view");
}

FuseMemory parse_art(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    while (!lines.empty() && lines.back().empty()) lines.pop_back();

    const std::vector<RowDesc> rows = bits_rows();
    if (lines.size() != rows.size())
        throw LayoutError("expected " + std::to_string(rows.size()) + " art rows, got " +
                          std::to_string(lines.size()));

    FuseMemory mem;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const std::string& l = lines[r];
        if (static_cast<int>(l.size()) != kFrameWidth)
            throw LayoutError("art row " + std::to_string(r + 1) + " has width " +
                              std::to_string(l.size()) + ", expected " +
                              std::to_string(kFrameWidth));
        const RowDesc& rd = rows[r];
        std::size_t pos = 0;
        for (int plane = 0; plane < kPlanes; ++plane) {
            for (int raw = 0; raw < kRawCols; ++raw, ++pos) {
                const char ch = l[pos];
                if (rd.furniture) {
                    if (ch == '#')
                        throw PlacementError("art row " + std::to_string(r + 1) +
                                             ": cannot program a test/calibration cell");
                    if (ch != rd.furniture)
                        throw ParseError("art row " + std::to_string(r + 1) +
                                         ": expected '" + rd.furniture + "' furniture");
                    continue;
                }
                const int col = phys_col_of_raw(raw);
                if (col < 0) {
                    if (ch == '#')
                        throw PlacementError("art row " + std::to_string(r + 1) +
                                             ": cannot program a dummy column");
                    if (ch != 'x')
                        throw ParseError("art row " + std::to_string(r + 1) +
                                         ": expected 'x' dummy column");
                    continue;
                }
                if (ch == '#') {
                    mem.set_bit(physical_to_logical(
                        CellLocation{plane, rd.tile, col, rd.unit_row, rd.half}));
                } else if (ch != '.') {
                    throw ParseError("art row " + std::to_string(r + 1) +
                                     ": glyph '" + std::string(1, ch) +
                                     "' outside alphabet");
                }
            }
            if (plane + 1 < kPlanes) {
                if (l[pos] != sep_char(plane))
                    throw ParseError("art row " + std::to_string(r + 1) +
                                     ": bad plane separator");
                ++pos;
            }
        }
    }
    return mem;
}

FuseMemory demo_pattern() {
    static const std::vector<std::string> art = {
        "..##......##....",
        "..#.#....#.#....",
        "..#..####..#....",
        "..#........#....",
        ".#..#....#..#...",
        ".#..........#...",
        ".#...#..#...#...",
        "..#...##...#....",
        "...########.....",
        "................",
        ".......#........",
        "......###.......",
        ".....#.#.#......",
        ".......#........",
        ".......#........",
        ".......#........",
    };
    FuseMemory mem;
    auto set_cell = [&mem](int plane, int g, int c) {
        CellLocation loc;
        loc.plane = plane;
        loc.tile_row = tile_of_grid_row(g);
        loc.unit_row = unit_row_of_grid_row(g);
        loc.phys_col = c;
        loc.pair_half = PairHalf::A;
        mem.set_bit(physical_to_logical(loc));
    };
    const int row0 = 4, col0 = 8;
    for (int plane = 0; plane < kPlanes; ++plane) {
        // registration border so every lattice end is visible under PVC
        for (int c = 0; c < ArrayGeometry::unit_cols_per_plane; ++c) {
            set_cell(plane, 0, c);
            set_cell(plane, ArrayGeometry::unit_rows_per_plane - 1, c);
        }
        for (int g = 0; g < ArrayGeometry::unit_rows_per_plane; ++g) {
            set_cell(plane, g, 0);
            set_cell(plane, g, ArrayGeometry::unit_cols_per_plane - 1);
        }
        for (std::size_t r = 0; r < art.size(); ++r)
            for (std::size_t c = 0; c < art[r].size(); ++c)
                if (art[r][c] == '#')
                    set_cell(plane, row0 + static_cast<int>(r), col0 + static_cast<int>(c));
    }
    return mem;
}

}  // namespace fusemap
