#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fusemap/geometry.hpp"
#include "fusemap/memory.hpp"

namespace fusemap {

enum class CellState : std::uint8_t { zero, one, unknown };
enum class Provenance : std::uint8_t { simulated, extracted };

// 64x32 grid of pair states for one plane. Grid row 0 is the north edge of
// the array; rows 0..31 are the north tile, 32..63 the south tile. Columns
// run west to east in physical order.
class PlaneObservation {
public:
    CellState at(int grid_row, int col) const;
    void set(int grid_row, int col, CellState s);

    friend bool operator==(const PlaneObservation&, const PlaneObservation&) = default;

private:
    std::array<CellState, ArrayGeometry::unit_cells_per_plane> cells_{};
};

// Converts between grid rows and (tile, unit_row). unit_row counts from the
// tile's outer edge, so the grid row order matches a top-down image.
int grid_row_of(TileRow tile, int unit_row);
TileRow tile_of_grid_row(int grid_row);
int unit_row_of_grid_row(int grid_row);

struct PvcObservation {
    std::array<PlaneObservation, ArrayGeometry::plane_count> planes;
    Provenance provenance = Provenance::simulated;

    friend bool operator==(const PvcObservation&, const PvcObservation&) = default;
};

// JSON interchange: {"provenance": ..., "planes": [{"plane": N, "grid":
// [64 strings of 32 chars from {'0','1','?'}]}, ...]}.
std::string observation_to_json(const PvcObservation& obs);
PvcObservation observation_from_json(const std::string& text);

// The attack model: each unit cell reads as the OR of the two bits of the
// pair (word M, word M xor 32) at that bit position.
PvcObservation simulate_pvc(const FuseMemory& mem);

// Same leak in logical coordinates: out[r] = word[r] | word[r ^ 32].
std::array<std::uint32_t, ArrayGeometry::word_count> or_view(const FuseMemory& mem);

enum class DataHalf : std::uint8_t { A_is_data, B_is_data };
enum class MitigationMode : std::uint8_t { strict, lax };

// Complement programming: ensures every pair ORs to one so PVC reads the
// array as all 1s. strict requires exactly one bit set per pair and refuses
// if the complement half already carries data; lax only tops pairs up.
FuseMemory mitigate(const FuseMemory& mem, DataHalf data_half, MitigationMode mode);
bool verify_mitigated(const FuseMemory& mem, MitigationMode mode);

struct Assumptions {
    // Pages whose upper half (words 32..63) is known to be unprogrammed.
    std::optional<std::set<int>> upper_half_empty;
    bool exactly_one_per_pair = false;
};

enum class BitStatus : std::uint8_t { known0, known1, ambiguous };

struct PageSummary {
    int page = 0;
    int determined = 0;
    int ambiguous = 0;
    double entropy_bits = 0.0;
};

class RecoveryReport {
public:
    BitStatus status(BitAddress addr) const;
    void set_status(BitAddress addr, BitStatus s);

    int determined_count() const;
    int ambiguous_count() const;
    double residual_entropy_bits() const { return entropy_bits_; }
    void add_entropy(int page, double bits);

    std::vector<PageSummary> page_summaries() const;

    // Memory with every known1 bit set; exact when nothing is ambiguous.
    FuseMemory recovered_memory() const;

    std::string to_json() const;

private:
    std::array<BitStatus, ArrayGeometry::total_bits> status_{};
    std::array<double, ArrayGeometry::page_count> page_entropy_{};
    double entropy_bits_ = 0.0;
};

// What the attacker learns from an observation under a set of assumptions.
RecoveryReport analyze(const PvcObservation& obs, const Assumptions& assumptions = {});

}  // namespace fusemap
