#include <doctest.h>

#include <cmath>

#include "fusemap/leak.hpp"

using namespace fusemap;

namespace {

FuseMemory random_memory(std::uint64_t seed, double density = 0.02) {
    return gen_pattern(PatternKind::custom, {seed, 0, density});
}

// Memory with data only in the lower (A) half of every page.
FuseMemory random_lower_half_memory(std::uint64_t seed) {
    const FuseMemory src = random_memory(seed);
    FuseMemory m;
    for (int r = 0; r < 4096; ++r)
        if (r % 64 < 32) m.merge_word(r, src.word(r));
    return m;
}

bool all_ones_observation(const PvcObservation& obs) {
    for (const auto& plane : obs.planes)
        for (int g = 0; g < 64; ++g)
            for (int c = 0; c < 32; ++c)
                if (plane.at(g, c) != CellState::one) return false;
    return true;
}

}  // namespace

TEST_CASE("or_view basics") {
    FuseMemory zero;
    for (std::uint32_t w : or_view(zero)) CHECK(w == 0);

    FuseMemory m;
    m.merge_word(0, 0x000001);
    m.merge_word(32, 0x000002);
    const auto v = or_view(m);
    CHECK(v[0] == 0x3);
    CHECK(v[32] == 0x3);
}

TEST_CASE("simulate_pvc agrees with the or_view oracle") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const FuseMemory m = random_memory(seed, 0.05);
        const PvcObservation obs = simulate_pvc(m);
        const auto oracle = or_view(m);
        for (int p = 0; p < 24; ++p) {
            const int bit = bit_of_plane(p);
            for (int g = 0; g < 64; ++g) {
                for (int c = 0; c < 32; ++c) {
                    CellLocation loc;
                    loc.plane = p;
                    loc.tile_row = tile_of_grid_row(g);
                    loc.unit_row = unit_row_of_grid_row(g);
                    loc.phys_col = c;
                    loc.pair_half = PairHalf::A;
                    const BitAddress a = physical_to_logical(loc);
                    const bool leaked = (oracle[static_cast<std::size_t>(a.row)] >> bit) & 1;
                    CHECK(obs.planes[p].at(g, c) == (leaked ? CellState::one : CellState::zero));
                }
            }
        }
    }
}

TEST_CASE("leak cannot distinguish pair halves") {
    const FuseMemory m = random_memory(3);
    FuseMemory swapped;
    for (int r = 0; r < 4096; ++r) swapped.merge_word(r, m.word(r ^ 32));
    CHECK(simulate_pvc(m) == simulate_pvc(swapped));
}

TEST_CASE("observation JSON round trip") {
    const PvcObservation obs = simulate_pvc(random_memory(11));
    const std::string doc = observation_to_json(obs);
    CHECK(observation_from_json(doc) == obs);
    CHECK_THROWS_AS(observation_from_json("not json"), ParseError);
    CHECK_THROWS_AS(observation_from_json("{\"provenance\":\"simulated\",\"planes\":[]}"),
                    ParseError);
}

TEST_CASE("strict mitigation") {
    const FuseMemory m = random_lower_half_memory(5);
    const FuseMemory fixed = mitigate(m, DataHalf::A_is_data, MitigationMode::strict);
    CHECK(verify_mitigated(fixed, MitigationMode::strict));
    CHECK(verify_mitigated(fixed, MitigationMode::lax));
    CHECK(all_ones_observation(simulate_pvc(fixed)));
    // original data bits survive
    for (int r = 0; r < 4096; ++r) CHECK((fixed.word(r) & m.word(r)) == m.word(r));

    // data bit 1 -> complement stays 0; data bit 0 -> complement set
    FuseMemory one_bit;
    one_bit.set_bit({0, 1});
    const FuseMemory f2 = mitigate(one_bit, DataHalf::A_is_data, MitigationMode::strict);
    CHECK(f2.word(32) == (0xFFFFFF & ~0x2u));
    CHECK(f2.word(0) == 0x2);
}

TEST_CASE("strict mitigation conflicts") {
    FuseMemory both;
    both.set_bit({0, 3});
    both.set_bit({32, 3});
    CHECK_THROWS_AS(mitigate(both, DataHalf::A_is_data, MitigationMode::strict),
                    MitigationConflictError);
    try {
        mitigate(both, DataHalf::A_is_data, MitigationMode::strict);
        FAIL("expected conflict");
    } catch (const MitigationConflictError& e) {
        CHECK(e.row_a() == 0);
        CHECK(e.row_b() == 32);
        CHECK(e.bit() == 3);
    }
}

TEST_CASE("lax mitigation tolerates populated pairs") {
    FuseMemory both;
    both.set_bit({0, 3});
    both.set_bit({32, 3});
    const FuseMemory fixed = mitigate(both, DataHalf::A_is_data, MitigationMode::lax);
    CHECK(verify_mitigated(fixed, MitigationMode::lax));
    CHECK_FALSE(verify_mitigated(fixed, MitigationMode::strict));
    // idempotent
    CHECK(mitigate(fixed, DataHalf::A_is_data, MitigationMode::lax) == fixed);
}

TEST_CASE("verify_mitigated spot checks") {
    FuseMemory zero;
    CHECK_FALSE(verify_mitigated(zero, MitigationMode::strict));
    CHECK_FALSE(verify_mitigated(zero, MitigationMode::lax));
}

TEST_CASE("analyze: all-zero observation determines everything") {
    const RecoveryReport report = analyze(simulate_pvc(FuseMemory{}));
    CHECK(report.determined_count() == 98304);
    CHECK(report.residual_entropy_bits() == 0.0);
    CHECK(report.status({100, 5}) == BitStatus::known0);
}

TEST_CASE("analyze: observed one without assumptions leaves log2(3) bits") {
    FuseMemory m;
    m.set_bit({0, 0});
    const RecoveryReport report = analyze(simulate_pvc(m));
    CHECK(report.status({0, 0}) == BitStatus::ambiguous);
    CHECK(report.status({32, 0}) == BitStatus::ambiguous);
    CHECK(report.determined_count() == 98304 - 2);
    CHECK(report.residual_entropy_bits() == doctest::Approx(std::log2(3.0)).epsilon(1e-12));
}

TEST_CASE("analyze: upper-half-empty pins the pair") {
    FuseMemory m;
    m.set_bit({0, 0});
    Assumptions a;
    a.upper_half_empty = std::set<int>{0};
    const RecoveryReport report = analyze(simulate_pvc(m), a);
    CHECK(report.status({0, 0}) == BitStatus::known1);
    CHECK(report.status({32, 0}) == BitStatus::known0);
    CHECK(report.residual_entropy_bits() == 0.0);
    CHECK(report.recovered_memory() == m);
}

TEST_CASE("analyze: exactly-one assumption") {
    FuseMemory m;
    m.set_bit({0, 0});
    Assumptions a;
    a.exactly_one_per_pair = true;
    // a zero pair contradicts the assumption
    CHECK_THROWS_AS(analyze(simulate_pvc(m), a), InconsistencyError);

    const FuseMemory mitigated =
        mitigate(random_lower_half_memory(9), DataHalf::A_is_data, MitigationMode::strict);
    const RecoveryReport report = analyze(simulate_pvc(mitigated), a);
    CHECK(report.determined_count() == 0);
    CHECK(report.residual_entropy_bits() == doctest::Approx(49152.0));
}

TEST_CASE("analyze soundness on random memories") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const FuseMemory m = random_memory(seed, 0.1);
        const RecoveryReport report = analyze(simulate_pvc(m));
        for (int r = 0; r < 4096; r += 7) {
            for (int b = 0; b < 24; ++b) {
                const BitStatus s = report.status({r, b});
                if (s == BitStatus::known1) CHECK(m.bit({r, b}));
                if (s == BitStatus::known0) CHECK_FALSE(m.bit({r, b}));
            }
        }
    }
}

TEST_CASE("analyze recovers an upper-half-empty memory exactly") {
    Assumptions a;
    a.upper_half_empty = std::set<int>{};
    for (int p = 0; p < 64; ++p) a.upper_half_empty->insert(p);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const FuseMemory m = random_lower_half_memory(seed);
        const RecoveryReport report = analyze(simulate_pvc(m), a);
        CHECK(report.determined_count() == 98304);
        CHECK(report.recovered_memory() == m);
    }
}

TEST_CASE("analyze handles unknown cells") {
    PvcObservation obs = simulate_pvc(FuseMemory{});
    obs.provenance = Provenance::extracted;
    obs.planes[0].set(0, 0, CellState::unknown);
    const RecoveryReport report = analyze(obs);
    CHECK(report.residual_entropy_bits() == doctest::Approx(2.0));
    CHECK(report.ambiguous_count() == 2);
}
