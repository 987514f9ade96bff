#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "fusemap/leak.hpp"
#include "fusemap/memory.hpp"
#include "fusemap/render.hpp"
#include "fusemap/vision.hpp"

namespace py = pybind11;
using namespace fusemap;

namespace {

PatternKind kind_from_name(const std::string& name) {
    if (name == "alt_10") return PatternKind::alt_10;
    if (name == "alt_1100") return PatternKind::alt_1100;
    if (name == "alt_11110000") return PatternKind::alt_11110000;
    if (name == "plane_id") return PatternKind::plane_id;
    if (name == "asymmetric_marker") return PatternKind::asymmetric_marker;
    if (name == "custom") return PatternKind::custom;
    throw ParameterError("unknown pattern kind '" + name + "'");
}

}  // namespace

PYBIND11_MODULE(_fusemap, m) {
    m.doc() = "Antifuse PVC leak toolkit";

    py::register_exception<Error>(m, "FusemapError");

    py::class_<BitAddress>(m, "BitAddress")
        .def(py::init<int, int>(), py::arg("row"), py::arg("bit"))
        .def_readwrite("row", &BitAddress::row)
        .def_readwrite("bit", &BitAddress::bit)
        .def("__eq__", [](const BitAddress& a, const BitAddress& b) { return a == b; })
        .def("__repr__", [](const BitAddress& a) {
            return "BitAddress(row=" + std::to_string(a.row) +
                   ", bit=" + std::to_string(a.bit) + ")";
        });

    py::enum_<TileRow>(m, "TileRow").value("south", TileRow::south).value("north", TileRow::north);
    py::enum_<PairHalf>(m, "PairHalf").value("A", PairHalf::A).value("B", PairHalf::B);

    py::class_<CellLocation>(m, "CellLocation")
        .def(py::init<>())
        .def_readwrite("plane", &CellLocation::plane)
        .def_readwrite("tile_row", &CellLocation::tile_row)
        .def_readwrite("phys_col", &CellLocation::phys_col)
        .def_readwrite("unit_row", &CellLocation::unit_row)
        .def_readwrite("pair_half", &CellLocation::pair_half);

    m.def("plane_of_bit", [](int bit) {
        const PlanePlacement p = plane_of_bit(bit);
        return py::make_tuple(p.plane, p.mirrored);
    });
    m.def("bit_of_plane", &bit_of_plane);
    m.def("pair_partner", &pair_partner);
    m.def("column_to_physical", &column_to_physical);
    m.def("logical_to_physical", &logical_to_physical);
    m.def("physical_to_logical", &physical_to_logical);

    py::class_<FuseMemory>(m, "FuseMemory")
        .def(py::init<>())
        .def("word", &FuseMemory::word)
        .def("bit", &FuseMemory::bit)
        .def("set_bit", &FuseMemory::set_bit)
        .def("merge_word", &FuseMemory::merge_word)
        .def("popcount", &FuseMemory::popcount)
        .def("__eq__", [](const FuseMemory& a, const FuseMemory& b) { return a == b; });

    m.def("parse_dump", [](const std::string& text) { return parse_dump(text); });
    m.def("serialize_dump",
          [](const FuseMemory& mem, bool omit_zero) { return serialize_dump(mem, omit_zero); },
          py::arg("mem"), py::arg("omit_zero") = true);
    m.def("gen_pattern", [](const std::string& kind, std::uint64_t seed, int phase, double density) {
        return gen_pattern(kind_from_name(kind), {seed, phase, density});
    }, py::arg("kind"), py::arg("seed") = 0, py::arg("phase") = 0, py::arg("density") = 0.5);
    m.def("demo_pattern", &demo_pattern);

    m.def("or_view", [](const FuseMemory& mem) {
        const auto v = or_view(mem);
        return std::vector<std::uint32_t>(v.begin(), v.end());
    });
    m.def("simulate_pvc_json",
          [](const FuseMemory& mem) { return observation_to_json(simulate_pvc(mem)); });
    m.def("mitigate", [](const FuseMemory& mem, const std::string& half, const std::string& mode) {
        return mitigate(mem, half == "b" ? DataHalf::B_is_data : DataHalf::A_is_data,
                        mode == "lax" ? MitigationMode::lax : MitigationMode::strict);
    }, py::arg("mem"), py::arg("data_half") = "a", py::arg("mode") = "strict");
    m.def("verify_mitigated", [](const FuseMemory& mem, const std::string& mode) {
        return verify_mitigated(mem, mode == "lax" ? MitigationMode::lax : MitigationMode::strict);
    }, py::arg("mem"), py::arg("mode") = "strict");
    m.def("analyze_json",
          [](const std::string& obs_json, std::optional<std::set<int>> upper_half_empty,
             bool exactly_one) {
              Assumptions a;
              a.upper_half_empty = std::move(upper_half_empty);
              a.exactly_one_per_pair = exactly_one;
              return analyze(observation_from_json(obs_json), a).to_json();
          },
          py::arg("obs_json"), py::arg("upper_half_empty") = py::none(),
          py::arg("exactly_one_per_pair") = false);
    m.def("recovered_dump",
          [](const std::string& obs_json, std::optional<std::set<int>> upper_half_empty,
             bool exactly_one) {
              Assumptions a;
              a.upper_half_empty = std::move(upper_half_empty);
              a.exactly_one_per_pair = exactly_one;
              return serialize_dump(
                  analyze(observation_from_json(obs_json), a).recovered_memory());
          },
          py::arg("obs_json"), py::arg("upper_half_empty") = py::none(),
          py::arg("exactly_one_per_pair") = false);

    m.def("render", [](const FuseMemory& mem, const std::string& view) {
        RenderView v = RenderView::physical_bits;
        if (view == "logical") v = RenderView::logical_bits;
        else if (view == "pvc") v = RenderView::physical_pvc;
        else if (view != "physical") throw ParameterError("unknown view '" + view + "'");
        return render(mem, v);
    }, py::arg("mem"), py::arg("view") = "physical");
    m.def("parse_art", &parse_art);

    m.def("synth_plane_pgm",
          [](const FuseMemory& mem, int plane, double noise_sigma, double charge_gradient,
             std::uint64_t seed) {
              SynthParams params;
              params.noise_sigma = noise_sigma;
              params.charge_gradient = charge_gradient;
              params.seed = seed;
              const PvcObservation obs = simulate_pvc(mem);
              std::ostringstream ss;
              write_pgm(synth_plane_image(obs.planes[plane], params), ss);
              return py::bytes(ss.str());
          },
          py::arg("mem"), py::arg("plane"), py::arg("noise_sigma") = 6.0,
          py::arg("charge_gradient") = 0.0, py::arg("seed") = 1);
    m.def("extract_plane_pgm",
          [](const py::bytes& pgm, int plane, bool flatten, bool flip180) {
              std::istringstream ss(static_cast<std::string>(pgm));
              const GrayImage img = read_pgm(ss);
              ExtractOptions opts;
              opts.flatten = flatten;
              opts.flip180 = flip180;
              const PlaneObservation po = extract_plane(img, plane, opts);
              std::vector<std::string> grid;
              for (int g = 0; g < ArrayGeometry::unit_rows_per_plane; ++g) {
                  std::string row;
                  for (int c = 0; c < ArrayGeometry::unit_cols_per_plane; ++c) {
                      const CellState s = po.at(g, c);
                      row.push_back(s == CellState::one ? '1'
                                    : s == CellState::zero ? '0' : '?');
                  }
                  grid.push_back(row);
              }
              return grid;
          },
          py::arg("pgm"), py::arg("plane"), py::arg("flatten") = true,
          py::arg("flip180") = false);
}
