#include "fusemap/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "fusemap/leak.hpp"
#include "fusemap/memory.hpp"
#include "fusemap/render.hpp"
#include "fusemap/vision.hpp"

namespace fusemap {
namespace {

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path);
    out << text;
}

FuseMemory load_dump(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    try {
        return parse_dump(in);
    } catch (const Error& e) {
        throw ParseError(path + ": " + e.what());
    }
}

void emit(const std::string& text, const std::string& out_path, std::ostream& out) {
    if (out_path.empty()) out << text;
    else write_text_file(out_path, text);
}

// "all", single pages, and ranges: "0,3,10-20".
std::set<int> parse_page_set(const std::string& spec) {
    std::set<int> pages;
    if (spec == "all") {
        for (int p = 0; p < ArrayGeometry::page_count; ++p) pages.insert(p);
        return pages;
    }
    std::istringstream in(spec);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item.empty()) throw ParameterError("empty page entry in '" + spec + "'");
        int lo, hi;
        const std::size_t dash = item.find('-');
        try {
            if (dash == std::string::npos) {
                lo = hi = std::stoi(item);
            } else {
                lo = std::stoi(item.substr(0, dash));
                hi = std::stoi(item.substr(dash + 1));
            }
        } catch (const std::exception&) {
            throw ParameterError("bad page entry '" + item + "'");
        }
        if (lo < 0 || hi >= ArrayGeometry::page_count || lo > hi)
            throw ParameterError("page range '" + item + "' out of 0..63");
        for (int p = lo; p <= hi; ++p) pages.insert(p);
    }
    return pages;
}

PatternKind kind_of_name(const std::string& name) {
    if (name == "alt10") return PatternKind::alt_10;
    if (name == "alt1100") return PatternKind::alt_1100;
    if (name == "alt11110000") return PatternKind::alt_11110000;
    if (name == "plane-id") return PatternKind::plane_id;
    if (name == "asym") return PatternKind::asymmetric_marker;
    if (name == "random") return PatternKind::custom;
    throw ParameterError("unknown pattern kind '" + name +
                         "' (alt10, alt1100, alt11110000, plane-id, asym, random, demo)");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Antifuse PVC leak toolkit"};
    app.require_subcommand(1);

    // render
    auto* render_cmd = app.add_subcommand("render", "Render a fuse dump as ASCII art");
    std::string render_dump, render_view = "physical", render_out;
    render_cmd->add_option("--dump", render_dump, "Fuse dump file")->required();
    render_cmd->add_option("--view", render_view, "View: logical, physical, or pvc")
        ->check(CLI::IsMember({"logical", "physical", "pvc"}));
    render_cmd->add_option("-o,--output", render_out, "Output file (default stdout)");

    // pattern
    auto* pattern_cmd = app.add_subcommand("pattern", "Generate a fuse dump from art or a built-in pattern");
    std::string pattern_art, pattern_kind, pattern_out;
    std::uint64_t pattern_seed = 0;
    int pattern_phase = 0;
    double pattern_density = 0.5;
    pattern_cmd->add_option("--art", pattern_art, "ASCII art file in the physical frame");
    pattern_cmd->add_option("--kind", pattern_kind,
                            "Built-in kind: alt10, alt1100, alt11110000, plane-id, asym, random, demo");
    pattern_cmd->add_option("--seed", pattern_seed, "Seed for the random kind");
    pattern_cmd->add_option("--phase", pattern_phase, "Bit-stream phase for alternating kinds");
    pattern_cmd->add_option("--density", pattern_density, "Fill density for the random kind");
    pattern_cmd->add_option("-o,--output", pattern_out, "Output dump file")->required();

    // burnlist
    auto* burn_cmd = app.add_subcommand("burnlist", "List the fuse writes needed to reach a dump");
    std::string burn_dump, burn_baseline, burn_out;
    burn_cmd->add_option("--dump", burn_dump, "Target fuse dump")->required();
    burn_cmd->add_option("--baseline", burn_baseline, "Already-programmed state to diff against");
    burn_cmd->add_option("-o,--output", burn_out, "Output file (default stdout)");

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "Simulate the PVC-observable OR leak");
    std::string sim_dump, sim_out;
    sim_cmd->add_option("--dump", sim_dump, "Fuse dump file")->required();
    sim_cmd->add_option("-o,--output", sim_out, "Observation JSON output")->required();

    // synth
    auto* synth_cmd = app.add_subcommand("synth", "Render a synthetic PVC micrograph of one plane");
    std::string synth_obs, synth_out;
    int synth_plane = 0;
    SynthParams synth_params;
    int synth_contrast = synth_params.bright_mean - synth_params.dark_mean;
    synth_cmd->add_option("--obs", synth_obs, "Observation JSON file")->required();
    synth_cmd->add_option("--plane", synth_plane, "Plane index 0..23")->required();
    synth_cmd->add_option("--noise", synth_params.noise_sigma, "Noise sigma (gray levels)");
    synth_cmd->add_option("--contrast", synth_contrast, "Bright/dark class separation");
    synth_cmd->add_option("--gradient", synth_params.charge_gradient, "Charging ramp amplitude");
    synth_cmd->add_option("--seed", synth_params.seed, "Noise seed");
    synth_cmd->add_option("--pitch", synth_params.pitch, "Lattice pitch in pixels");
    synth_cmd->add_option("-o,--output", synth_out, "Output PGM file")->required();

    // extract
    auto* ext_cmd = app.add_subcommand("extract", "Extract one plane's observation from a PGM image");
    std::string ext_image, ext_out;
    int ext_plane = 0;
    ExtractOptions ext_opts;
    bool ext_no_flatten = false;
    ext_cmd->add_option("--image", ext_image, "Input PGM image")->required();
    ext_cmd->add_option("--plane", ext_plane, "Plane index 0..23")->required();
    ext_cmd->add_option("--min-contrast", ext_opts.min_contrast, "Minimum class separation");
    ext_cmd->add_option("--margin", ext_opts.margin_floor, "Unknown-cell margin floor");
    ext_cmd->add_flag("--flip", ext_opts.flip180, "Image is rotated 180 degrees");
    ext_cmd->add_flag("--no-flatten", ext_no_flatten, "Skip charging-ramp removal");
    ext_cmd->add_flag("--assume-uniform", ext_opts.assume_uniform,
                      "Accept a single-class plane as uniformly 0 or 1");
    ext_cmd->add_option("-o,--output", ext_out,
                        "Observation JSON output; an existing file is updated in place")
        ->required();

    // mitigate
    auto* mit_cmd = app.add_subcommand("mitigate", "Complement-program a dump so PVC reads all 1s");
    std::string mit_dump, mit_mode = "strict", mit_half = "a", mit_out;
    mit_cmd->add_option("--dump", mit_dump, "Fuse dump file")->required();
    mit_cmd->add_option("--mode", mit_mode, "strict or lax")
        ->check(CLI::IsMember({"strict", "lax"}));
    mit_cmd->add_option("--data-half", mit_half, "Which pair half holds the data: a or b")
        ->check(CLI::IsMember({"a", "b"}));
    mit_cmd->add_option("-o,--output", mit_out, "Output dump file")->required();

    // analyze
    auto* an_cmd = app.add_subcommand("analyze", "Quantify what an observation reveals");
    std::string an_obs, an_pages, an_out, an_recovered;
    bool an_exactly_one = false;
    an_cmd->add_option("--obs", an_obs, "Observation JSON file")->required();
    an_cmd->add_option("--assume-upper-empty", an_pages,
                       "Pages whose upper half is unprogrammed ('all' or e.g. '0,4-7')");
    an_cmd->add_flag("--assume-exactly-one", an_exactly_one,
                     "Assume exactly one bit set per pair (mitigated memory)");
    an_cmd->add_option("--recovered-dump", an_recovered,
                       "Also write a dump of every known-1 bit");
    an_cmd->add_option("-o,--output", an_out, "Report JSON output (default stdout)");

    std::vector<std::string> argv(args);
    try {
        app.parse(std::vector<std::string>(argv.rbegin(), argv.rend()));
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        err << "error: usage: " << e.what() << "\n";
        return 2;
    }

    try {
        if (render_cmd->parsed()) {
            const FuseMemory mem = load_dump(render_dump);
            RenderView view = RenderView::physical_bits;
            if (render_view == "logical") view = RenderView::logical_bits;
            else if (render_view == "pvc") view = RenderView::physical_pvc;
            emit(render(mem, view), render_out, out);
        } else if (pattern_cmd->parsed()) {
            if (pattern_art.empty() == pattern_kind.empty())
                throw ParameterError("exactly one of --art or --kind is required");
            FuseMemory mem;
            if (!pattern_art.empty()) {
                mem = parse_art(read_text_file(pattern_art));
            } else if (pattern_kind == "demo") {
                mem = demo_pattern();
            } else {
                mem = gen_pattern(kind_of_name(pattern_kind),
                                  {pattern_seed, pattern_phase, pattern_density});
            }
            write_text_file(pattern_out, serialize_dump(mem));
        } else if (burn_cmd->parsed()) {
            const FuseMemory target = load_dump(burn_dump);
            FuseMemory baseline;
            if (!burn_baseline.empty()) baseline = load_dump(burn_baseline);
            std::ostringstream list;
            char buf[16];
            for (int row = 0; row < ArrayGeometry::word_count; ++row) {
                const std::uint32_t want = target.word(row);
                const std::uint32_t have = baseline.word(row);
                if (have & ~want)
                    throw OtpViolationError("row " + std::to_string(row) +
                                            ": target clears bits already programmed");
                if ((want & ~have) == 0) continue;
                std::snprintf(buf, sizeof buf, "%03X: %06X\n", row, want);
                list << buf;
            }
            emit(list.str(), burn_out, out);
        } else if (sim_cmd->parsed()) {
            const FuseMemory mem = load_dump(sim_dump);
            write_text_file(sim_out, observation_to_json(simulate_pvc(mem)));
        } else if (synth_cmd->parsed()) {
            const PvcObservation obs = observation_from_json(read_text_file(synth_obs));
            if (synth_plane < 0 || synth_plane >= ArrayGeometry::plane_count)
                throw RangeError("plane out of range 0..23");
            synth_params.bright_mean = synth_params.dark_mean + synth_contrast;
            const GrayImage img = synth_plane_image(obs.planes[synth_plane], synth_params);
            write_pgm_file(img, synth_out);
        } else if (ext_cmd->parsed()) {
            ext_opts.flatten = !ext_no_flatten;
            const GrayImage img = read_pgm_file(ext_image);
            if (ext_plane < 0 || ext_plane >= ArrayGeometry::plane_count)
                throw RangeError("plane out of range 0..23");
            PvcObservation obs;
            std::ifstream existing(ext_out);
            if (existing) {
                std::ostringstream ss;
                ss << existing.rdbuf();
                obs = observation_from_json(ss.str());
            } else {
                for (auto& plane : obs.planes)
                    for (int g = 0; g < ArrayGeometry::unit_rows_per_plane; ++g)
                        for (int c = 0; c < ArrayGeometry::unit_cols_per_plane; ++c)
                            plane.set(g, c, CellState::unknown);
            }
            obs.provenance = Provenance::extracted;
            obs.planes[ext_plane] = extract_plane(img, ext_plane, ext_opts);
            write_text_file(ext_out, observation_to_json(obs));
        } else if (mit_cmd->parsed()) {
            const FuseMemory mem = load_dump(mit_dump);
            const FuseMemory result = mitigate(
                mem, mit_half == "a" ? DataHalf::A_is_data : DataHalf::B_is_data,
                mit_mode == "strict" ? MitigationMode::strict : MitigationMode::lax);
            write_text_file(mit_out, serialize_dump(result));
        } else if (an_cmd->parsed()) {
            const PvcObservation obs = observation_from_json(read_text_file(an_obs));
            Assumptions assumptions;
            if (!an_pages.empty()) assumptions.upper_half_empty = parse_page_set(an_pages);
            assumptions.exactly_one_per_pair = an_exactly_one;
            const RecoveryReport report = analyze(obs, assumptions);
            emit(report.to_json() + "\n", an_out, out);
            if (!an_recovered.empty())
                write_text_file(an_recovered, serialize_dump(report.recovered_memory()));
        }
    } catch (const Error& e) {
        err << "error: " << e.kind() << ": " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: internal: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace fusemap
