#include "fusemap/leak.hpp"

#include <cmath>
#include <string>

#include <json.hpp>

namespace fusemap {
namespace {

using nlohmann::json;

void check_grid_index(int grid_row, int col) {
    if (grid_row < 0 || grid_row >= ArrayGeometry::unit_rows_per_plane)
        throw RangeError("grid row " + std::to_string(grid_row) + " out of range 0..63");
    if (col < 0 || col >= ArrayGeometry::unit_cols_per_plane)
        throw RangeError("grid col " + std::to_string(col) + " out of range 0..31");
}

char state_char(CellState s) {
    switch (s) {
        case CellState::zero: return '0';
        case CellState::one: return '1';
        case CellState::unknown: return '?';
    }
    return '?';
}

CellState state_of_char(char c) {
    switch (c) {
        case '0': return CellState::zero;
        case '1': return CellState::one;
        case '?': return CellState::unknown;
    }
    throw ParseError(std::string("bad cell state character '") + c + "'");
}

// The two logical bits sharing the unit cell at (plane, grid_row, col).
// .first is the lower (half A) word, .second its pair partner.
std::pair<BitAddress, BitAddress> pair_of_cell(int plane, int grid_row, int col) {
    CellLocation loc;
    loc.plane = plane;
    loc.tile_row = tile_of_grid_row(grid_row);
    loc.unit_row = unit_row_of_grid_row(grid_row);
    loc.phys_col = col;
    loc.pair_half = PairHalf::A;
    const BitAddress lower = physical_to_logical(loc);
    return {lower, {pair_partner(lower.row), lower.bit}};
}

}  // namespace

CellState PlaneObservation::at(int grid_row, int col) const {
    check_grid_index(grid_row, col);
    return cells_[static_cast<std::size_t>(grid_row * ArrayGeometry::unit_cols_per_plane + col)];
}

void PlaneObservation::set(int grid_row, int col, CellState s) {
    check_grid_index(grid_row, col);
    cells_[static_cast<std::size_t>(grid_row * ArrayGeometry::unit_cols_per_plane + col)] = s;
}

int grid_row_of(TileRow tile, int unit_row) {
    if (unit_row < 0 || unit_row >= ArrayGeometry::active_rows_per_tile)
        throw RangeError("unit_row out of range 0..31");
    return tile == TileRow::north ? unit_row : 63 - unit_row;
}

TileRow tile_of_grid_row(int grid_row) {
    check_grid_index(grid_row, 0);
    return grid_row < 32 ? TileRow::north : TileRow::south;
}

int unit_row_of_grid_row(int grid_row) {
    check_grid_index(grid_row, 0);
    return grid_row < 32 ? grid_row : 63 - grid_row;
}

std::string observation_to_json(const PvcObservation& obs) {
    json doc;
    doc["provenance"] = obs.provenance == Provenance::simulated ? "simulated" : "extracted";
    json planes = json::array();
    for (int p = 0; p < ArrayGeometry::plane_count; ++p) {
        json grid = json::array();
        for (int g = 0; g < ArrayGeometry::unit_rows_per_plane; ++g) {
            std::string row;
            row.reserve(ArrayGeometry::unit_cols_per_plane);
            for (int c = 0; c < ArrayGeometry::unit_cols_per_plane; ++c)
                row.push_back(state_char(obs.planes[p].at(g, c)));
            grid.push_back(row);
        }
        planes.push_back({{"plane", p}, {"grid", grid}});
    }
    doc["planes"] = planes;
    return doc.dump(1);
}

PvcObservation observation_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("observation JSON: ") + e.what());
    }
    PvcObservation obs;
    const std::string prov = doc.at("provenance").get<std::string>();
    if (prov == "simulated") obs.provenance = Provenance::simulated;
    else if (prov == "extracted") obs.provenance = Provenance::extracted;
    else throw ParseError("bad provenance '" + prov + "'");
    const json& planes = doc.at("planes");
    if (!planes.is_array() || planes.size() != ArrayGeometry::plane_count)
        throw ParseError("expected 24 planes");
    for (const json& entry : planes) {
        const int p = entry.at("plane").get<int>();
        if (p < 0 || p >= ArrayGeometry::plane_count)
            throw RangeError("plane index out of range");
        const json& grid = entry.at("grid");
        if (!grid.is_array() || grid.size() != ArrayGeometry::unit_rows_per_plane)
            throw ParseError("plane " + std::to_string(p) + ": expected 64 grid rows");
        for (int g = 0; g < ArrayGeometry::unit_rows_per_plane; ++g) {
            const std::string row = grid[static_cast<std::size_t>(g)].get<std::string>();
            if (row.size() != ArrayGeometry::unit_cols_per_plane)
                throw ParseError("plane " + std::to_string(p) + ": row length != 32");
            for (int c = 0; c < ArrayGeometry::unit_cols_per_plane; ++c)
                obs.planes[p].set(g, c, state_of_char(row[static_cast<std::size_t>(c)]));
        }
    }
    if (obs.provenance == Provenance::simulated) {
        for (int p = 0; p < ArrayGeometry::plane_count; ++p)
            for (int g = 0; g < ArrayGeometry::unit_rows_per_plane; ++g)
                for (int c = 0; c < ArrayGeometry::unit_cols_per_plane; ++c)
                    if (obs.planes[p].at(g, c) == CellState::unknown)
                        throw ParseError("simulated observation contains unknown cells");
    }
    return obs;
}

PvcObservation simulate_pvc(const FuseMemory& mem) {
    PvcObservation obs;
    obs.provenance = Provenance::simulated;
    for (int p = 0; p < ArrayGeometry::plane_count; ++p) {
        for (int g = 0; g < ArrayGeometry::unit_rows_per_plane; ++g) {
            for (int c = 0; c < ArrayGeometry::unit_cols_per_plane; ++c) {
                const auto [lower, upper] = pair_of_cell(p, g, c);
                const bool leaked = mem.bit(lower) || mem.bit(upper);
                obs.planes[p].set(g, c, leaked ? CellState::one : CellState::zero);
            }
        }
    }
    return obs;
}

std::array<std::uint32_t, ArrayGeometry::word_count> or_view(const FuseMemory& mem) {
    std::array<std::uint32_t, ArrayGeometry::word_count> out{};
    for (int r = 0; r < ArrayGeometry::word_count; ++r)
        out[static_cast<std::size_t>(r)] = mem.word(r) | mem.word(r ^ 32);
    return out;
}

FuseMemory mitigate(const FuseMemory& mem, DataHalf data_half, MitigationMode mode) {
    FuseMemory out = mem;
    for (int page = 0; page < ArrayGeometry::page_count; ++page) {
        for (int w = 0; w < 32; ++w) {
            const int base = page * ArrayGeometry::words_per_page + w;
            const int data_row = data_half == DataHalf::A_is_data ? base : base + 32;
            const int comp_row = pair_partner(data_row);
            const std::uint32_t data = mem.word(data_row);
            const std::uint32_t comp = mem.word(comp_row);
            if (mode == MitigationMode::strict) {
                if (comp != 0) {
                    const std::uint32_t bad = (comp & data) ? (comp & data) : comp;
                    throw MitigationConflictError(data_row, comp_row,
                                                  std::countr_zero(bad));
                }
                out.merge_word(comp_row, ~data & ArrayGeometry::word_mask);
            } else {
                out.merge_word(comp_row, ~(data | comp) & ArrayGeometry::word_mask);
            }
        }
    }
    return out;
}

bool verify_mitigated(const FuseMemory& mem, MitigationMode mode) {
    for (int r = 0; r < ArrayGeometry::word_count; ++r) {
        const int partner = r ^ 32;
        if (partner < r) continue;
        const std::uint32_t a = mem.word(r);
        const std::uint32_t b = mem.word(partner);
        if (mode == MitigationMode::strict) {
            if ((a ^ b) != ArrayGeometry::word_mask) return false;
        } else {
            if ((a | b) != ArrayGeometry::word_mask) return false;
        }
    }
    return true;
}

BitStatus RecoveryReport::status(BitAddress addr) const {
    check_bit_address(addr);
    return status_[static_cast<std::size_t>(addr.row * ArrayGeometry::bits_per_word + addr.bit)];
}

void RecoveryReport::set_status(BitAddress addr, BitStatus s) {
    check_bit_address(addr);
    status_[static_cast<std::size_t>(addr.row * ArrayGeometry::bits_per_word + addr.bit)] = s;
}

void RecoveryReport::add_entropy(int page, double bits) {
    if (page < 0 || page >= ArrayGeometry::page_count)
        throw RangeError("page out of range");
    page_entropy_[static_cast<std::size_t>(page)] += bits;
    entropy_bits_ += bits;
}

int RecoveryReport::determined_count() const {
    int n = 0;
    for (BitStatus s : status_)
        if (s != BitStatus::ambiguous) ++n;
    return n;
}

int RecoveryReport::ambiguous_count() const {
    return ArrayGeometry::total_bits - determined_count();
}

std::vector<PageSummary> RecoveryReport::page_summaries() const {
    std::vector<PageSummary> pages(ArrayGeometry::page_count);
    for (int r = 0; r < ArrayGeometry::word_count; ++r) {
        PageSummary& ps = pages[static_cast<std::size_t>(r / ArrayGeometry::words_per_page)];
        ps.page = r / ArrayGeometry::words_per_page;
        for (int b = 0; b < ArrayGeometry::bits_per_word; ++b) {
            if (status({r, b}) == BitStatus::ambiguous) ++ps.ambiguous;
            else ++ps.determined;
        }
    }
    for (int page = 0; page < ArrayGeometry::page_count; ++page)
        pages[static_cast<std::size_t>(page)].entropy_bits =
            page_entropy_[static_cast<std::size_t>(page)];
    return pages;
}

FuseMemory RecoveryReport::recovered_memory() const {
    FuseMemory mem;
    for (int r = 0; r < ArrayGeometry::word_count; ++r)
        for (int b = 0; b < ArrayGeometry::bits_per_word; ++b)
            if (status({r, b}) == BitStatus::known1) mem.set_bit({r, b});
    return mem;
}

std::string RecoveryReport::to_json() const {
    json doc;
    doc["determined_count"] = determined_count();
    doc["ambiguous_count"] = ambiguous_count();
    doc["residual_entropy_bits"] = residual_entropy_bits();
    json pages = json::array();
    for (const PageSummary& ps : page_summaries()) {
        pages.push_back({{"page", ps.page},
                         {"determined", ps.determined},
                         {"ambiguous", ps.ambiguous},
                         {"entropy_bits", ps.entropy_bits}});
    }
    doc["pages"] = pages;
    return doc.dump(1);
}

RecoveryReport analyze(const PvcObservation& obs, const Assumptions& assumptions) {
    RecoveryReport report;
    const double log2_3 = std::log2(3.0);
    for (int p = 0; p < ArrayGeometry::plane_count; ++p) {
        for (int g = 0; g < ArrayGeometry::unit_rows_per_plane; ++g) {
            for (int c = 0; c < ArrayGeometry::unit_cols_per_plane; ++c) {
                const auto [lower, upper] = pair_of_cell(p, g, c);
                const int page = lower.row / ArrayGeometry::words_per_page;
                const bool ue = assumptions.upper_half_empty &&
                                assumptions.upper_half_empty->count(page) > 0;
                const bool eo = assumptions.exactly_one_per_pair;
                const CellState s = obs.planes[p].at(g, c);
                double entropy = 0.0;
                switch (s) {
                    case CellState::zero:
                        if (eo)
                            throw InconsistencyError(
                                "pair (" + std::to_string(lower.row) + ", " +
                                std::to_string(upper.row) + ") bit " +
                                std::to_string(lower.bit) +
                                " observed zero but exactly-one-per-pair assumed");
                        report.set_status(lower, BitStatus::known0);
                        report.set_status(upper, BitStatus::known0);
                        break;
                    case CellState::one:
                        if (ue) {
                            // OR is one and the upper half holds no data, so
                            // the lower bit must be the programmed one.
                            report.set_status(lower, BitStatus::known1);
                            report.set_status(upper, BitStatus::known0);
                        } else if (eo) {
                            report.set_status(lower, BitStatus::ambiguous);
                            report.set_status(upper, BitStatus::ambiguous);
                            entropy = 1.0;  // {01, 10}
                        } else {
                            report.set_status(lower, BitStatus::ambiguous);
                            report.set_status(upper, BitStatus::ambiguous);
                            entropy = log2_3;  // {01, 10, 11}
                        }
                        break;
                    case CellState::unknown:
                        if (ue && eo) {
                            report.set_status(lower, BitStatus::known1);
                            report.set_status(upper, BitStatus::known0);
                        } else if (ue) {
                            report.set_status(lower, BitStatus::ambiguous);
                            report.set_status(upper, BitStatus::known0);
                            entropy = 1.0;
                        } else if (eo) {
                            report.set_status(lower, BitStatus::ambiguous);
                            report.set_status(upper, BitStatus::ambiguous);
                            entropy = 1.0;
                        } else {
                            report.set_status(lower, BitStatus::ambiguous);
                            report.set_status(upper, BitStatus::ambiguous);
                            entropy = 2.0;
                        }
                        break;
                }
                if (entropy > 0.0) report.add_entropy(page, entropy);
            }
        }
    }
    return report;
}

}  // namespace fusemap
