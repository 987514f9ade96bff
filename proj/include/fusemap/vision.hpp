#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "fusemap/leak.hpp"

namespace fusemap {

// Single-channel 8-bit image, row major.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    GrayImage() = default;
    GrayImage(int w, int h, std::uint8_t fill = 0);

    std::uint8_t at(int x, int y) const {
        return pixels[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                      static_cast<std::size_t>(x)];
    }
    std::uint8_t& at(int x, int y) {
        return pixels[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                      static_cast<std::size_t>(x)];
    }
};

// Binary PGM (P5, maxval 255).
GrayImage read_pgm(std::istream& in);
GrayImage read_pgm_file(const std::string& path);
void write_pgm(const GrayImage& img, std::ostream& out);
void write_pgm_file(const GrayImage& img, const std::string& path);

// Fitted contact lattice: site (r, c) is centered at
// (origin_x + c * pitch_x, origin_y + r * pitch_y).
struct GridModel {
    double origin_x = 0.0;
    double origin_y = 0.0;
    double pitch_x = 0.0;
    double pitch_y = 0.0;
    int rows = 0;
    int cols = 0;
};

struct SynthParams {
    int bright_mean = 190;
    int dark_mean = 60;
    double noise_sigma = 6.0;
    double psf_sigma = 1.5;
    double charge_gradient = 0.0;  // linear ramp amplitude over the image
    std::uint64_t seed = 1;
    double pitch = 14.0;           // lattice pitch in pixels
    double margin = 10.0;          // border around the lattice
};

struct ClassifiedGrid {
    std::vector<CellState> values;  // rows x cols, row major
    std::vector<double> margins;    // distance from threshold, gray levels
    int rows = 0;
    int cols = 0;
    double threshold = 0.0;
    double contrast = 0.0;          // bright-class mean minus dark-class mean

    CellState value(int r, int c) const {
        return values[static_cast<std::size_t>(r * cols + c)];
    }
};

struct ExtractOptions {
    bool flatten = true;
    bool flip180 = false;
    double margin_floor = 20.0;
    double min_contrast = 30.0;
    // Degenerate single-class images raise no-contrast unless the caller
    // opts into a uniform verdict based on overall brightness.
    bool assume_uniform = false;
    double uniform_threshold = 125.0;
};

// Renders one bit plane as a synthetic PVC micrograph: a bright or dark blob
// per unit cell, Gaussian PSF blur, additive noise, and a linear charge ramp.
GrayImage synth_plane_image(const PlaneObservation& plane_obs, const SynthParams& params);

// Recovers the contact lattice from row/column projection profiles.
GridModel fit_grid(const GrayImage& img, int expected_rows, int expected_cols);

// Per-site disc sampling plus a global between-class-variance threshold.
ClassifiedGrid classify(const GrayImage& img, const GridModel& grid,
                        double margin_floor, double min_contrast = 30.0);

// Removes a fitted linear intensity ramp (sample charging), recentering the
// image at mid-gray.
GrayImage flatten_background(const GrayImage& img);

PlaneObservation extract_plane(const GrayImage& img, int plane,
                               const ExtractOptions& options = {});

}  // namespace fusemap
