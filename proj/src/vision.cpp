#include "fusemap/vision.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

namespace fusemap {
namespace {

std::uint8_t clamp_u8(double v) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
}

void gaussian_blur(std::vector<double>& buf, int w, int h, double sigma) {
    if (sigma <= 0.0) return;
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        const double v = std::exp(-0.5 * (i * i) / (sigma * sigma));
        kernel[static_cast<std::size_t>(i + radius)] = v;
        sum += v;
    }
    for (double& v : kernel) v /= sum;

    std::vector<double> tmp(buf.size());
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) {
                const int xx = std::clamp(x + i, 0, w - 1);
                acc += kernel[static_cast<std::size_t>(i + radius)] *
                       buf[static_cast<std::size_t>(y) * w + xx];
            }
            tmp[static_cast<std::size_t>(y) * w + x] = acc;
        }
    }
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) {
                const int yy = std::clamp(y + i, 0, h - 1);
                acc += kernel[static_cast<std::size_t>(i + radius)] *
                       tmp[static_cast<std::size_t>(yy) * w + x];
            }
            buf[static_cast<std::size_t>(y) * w + x] = acc;
        }
    }
}

struct Profile {
    std::vector<double> values;
};

Profile column_profile(const GrayImage& img) {
    Profile p;
    p.values.assign(static_cast<std::size_t>(img.width), 0.0);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            p.values[static_cast<std::size_t>(x)] += img.at(x, y);
    for (double& v : p.values) v /= img.height;
    return p;
}

Profile row_profile(const GrayImage& img) {
    Profile p;
    p.values.assign(static_cast<std::size_t>(img.height), 0.0);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            p.values[static_cast<std::size_t>(y)] += img.at(x, y);
    for (double& v : p.values) v /= img.width;
    return p;
}

std::vector<double> smooth3(const std::vector<double>& v) {
    std::vector<double> out(v.size());
    const int n = static_cast<int>(v.size());
    for (int i = 0; i < n; ++i) {
        const int a = std::max(0, i - 1), b = std::min(n - 1, i + 1);
        out[static_cast<std::size_t>(i)] =
            (v[static_cast<std::size_t>(a)] + v[static_cast<std::size_t>(i)] +
             v[static_cast<std::size_t>(b)]) / 3.0;
    }
    return out;
}

// Peak positions with parabolic sub-pixel refinement.
std::vector<double> find_peaks(const std::vector<double>& raw, const char* axis) {
    const std::vector<double> v = smooth3(raw);
    const auto [mn_it, mx_it] = std::minmax_element(v.begin(), v.end());
    const double mn = *mn_it, mx = *mx_it;
    if (mx - mn < 4.0)
        throw GridNotFoundError(std::string("no lattice contrast along ") + axis);
    const double floor = mn + 0.2 * (mx - mn);
    std::vector<double> peaks;
    const int n = static_cast<int>(v.size());
    for (int i = 1; i + 1 < n; ++i) {
        const double y0 = v[static_cast<std::size_t>(i - 1)];
        const double y1 = v[static_cast<std::size_t>(i)];
        const double y2 = v[static_cast<std::size_t>(i + 1)];
        if (y1 < floor || y1 < y0 || y1 <= y2) continue;
        const double denom = y0 - 2.0 * y1 + y2;
        const double delta = denom != 0.0 ? 0.5 * (y0 - y2) / denom : 0.0;
        peaks.push_back(i + std::clamp(delta, -0.5, 0.5));
    }
    return peaks;
}

struct AxisFit {
    double origin = 0.0;
    double pitch = 0.0;
};

AxisFit sparse_fit(const std::vector<double>& peaks, int expected, const char* axis);

AxisFit fit_axis(const std::vector<double>& profile, int expected, const char* axis) {
    std::vector<double> peaks = find_peaks(profile, axis);
    if (static_cast<int>(peaks.size()) < 2)
        throw GridNotFoundError(std::string("found ") + std::to_string(peaks.size()) +
                                " peaks along " + axis + ", expected " +
                                std::to_string(expected));
    if (static_cast<int>(peaks.size()) < expected)
        return sparse_fit(peaks, expected, axis);
    if (static_cast<int>(peaks.size()) > expected) {
        // Keep the run with the most regular spacing: slide a window and
        // take the one minimizing spacing spread.
        double best_spread = 1e18;
        std::size_t best_start = 0;
        for (std::size_t s = 0; s + expected <= peaks.size(); ++s) {
            std::vector<double> d;
            for (int i = 1; i < expected; ++i)
                d.push_back(peaks[s + static_cast<std::size_t>(i)] -
                            peaks[s + static_cast<std::size_t>(i) - 1]);
            const auto [a, b] = std::minmax_element(d.begin(), d.end());
            if (*b - *a < best_spread) {
                best_spread = *b - *a;
                best_start = s;
            }
        }
        peaks = std::vector<double>(peaks.begin() + static_cast<long>(best_start),
                                    peaks.begin() + static_cast<long>(best_start) + expected);
    }
    std::vector<double> spacings;
    for (std::size_t i = 1; i < peaks.size(); ++i)
        spacings.push_back(peaks[i] - peaks[i - 1]);
    std::vector<double> sorted = spacings;
    std::sort(sorted.begin(), sorted.end());
    const double median = sorted[sorted.size() / 2];
    for (double d : spacings)
        if (std::abs(d - median) > 0.3 * median)
            throw GridNotFoundError(std::string("irregular lattice spacing along ") + axis);
    // Least-squares line through (index, position).
    const int n = expected;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        sx += i;
        sy += peaks[static_cast<std::size_t>(i)];
        sxx += static_cast<double>(i) * i;
        sxy += i * peaks[static_cast<std::size_t>(i)];
    }
    AxisFit fit;
    fit.pitch = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    fit.origin = (sy - fit.pitch * sx) / n;
    if (fit.pitch <= 2.0)
        throw GridNotFoundError(std::string("lattice pitch too small along ") + axis);
    return fit;
}

// Sparse patterns light only part of the lattice. When the dense peak scan
// comes up short the outermost detected peaks are taken to be the lattice
// ends (registration marks), indices are snapped to the implied pitch, and
// the model is fit from whatever lines are visible.
AxisFit sparse_fit(const std::vector<double>& peaks, int expected, const char* axis) {
    const double span = peaks.back() - peaks.front();
    const double pitch0 = span / (expected - 1);
    if (pitch0 <= 2.0)
        throw GridNotFoundError(std::string("lattice pitch too small along ") + axis);
    std::vector<std::pair<int, double>> sites;
    int last_index = -1;
    for (double pos : peaks) {
        const double rel = (pos - peaks.front()) / pitch0;
        const int index = static_cast<int>(std::lround(rel));
        if (std::abs(rel - index) > 0.3 || index <= last_index || index >= expected)
            throw GridNotFoundError(std::string("irregular lattice spacing along ") + axis);
        sites.emplace_back(index, pos);
        last_index = index;
    }
    const int n = static_cast<int>(sites.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [i, pos] : sites) {
        sx += i;
        sy += pos;
        sxx += static_cast<double>(i) * i;
        sxy += i * pos;
    }
    AxisFit fit;
    fit.pitch = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    fit.origin = (sy - fit.pitch * sx) / n;
    if (fit.pitch <= 2.0)
        throw GridNotFoundError(std::string("lattice pitch too small along ") + axis);
    return fit;
}

double site_mean(const GrayImage& img, double cx, double cy, double radius) {
    const int x0 = std::max(0, static_cast<int>(std::floor(cx - radius)));
    const int x1 = std::min(img.width - 1, static_cast<int>(std::ceil(cx + radius)));
    const int y0 = std::max(0, static_cast<int>(std::floor(cy - radius)));
    const int y1 = std::min(img.height - 1, static_cast<int>(std::ceil(cy + radius)));
    double sum = 0.0;
    int count = 0;
    const double r2 = radius * radius;
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            const double dx = x - cx, dy = y - cy;
            if (dx * dx + dy * dy > r2) continue;
            sum += img.at(x, y);
            ++count;
        }
    }
    if (count == 0) throw RangeError("grid site outside the image");
    return sum / count;
}

}  // namespace

GrayImage::GrayImage(int w, int h, std::uint8_t fill) : width(w), height(h) {
    if (w < 1 || h < 1) throw ParameterError("image dimensions must be >= 1");
    pixels.assign(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill);
}

GrayImage read_pgm(std::istream& in) {
    auto next_token = [&in]() -> std::string {
        std::string tok;
        while (in >> tok) {
            if (tok[0] == '#') {
                std::string rest;
                std::getline(in, rest);
                continue;
            }
            return tok;
        }
        throw ImageFormatError("truncated PGM header");
    };
    if (next_token() != "P5") throw ImageFormatError("not a binary PGM (P5) file");
    int w = 0, h = 0, maxval = 0;
    try {
        w = std::stoi(next_token());
        h = std::stoi(next_token());
        maxval = std::stoi(next_token());
    } catch (const std::exception&) {
        throw ImageFormatError("bad PGM header field");
    }
    if (w < 1 || h < 1) throw ImageFormatError("bad PGM dimensions");
    if (maxval != 255) throw ImageFormatError("PGM maxval must be 255");
    in.get();  // single whitespace after maxval
    GrayImage img(w, h);
    in.read(reinterpret_cast<char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.pixels.size()));
    if (in.gcount() != static_cast<std::streamsize>(img.pixels.size()))
        throw ImageFormatError("truncated PGM pixel data");
    return img;
}

GrayImage read_pgm_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    return read_pgm(in);
}

void write_pgm(const GrayImage& img, std::ostream& out) {
    out << "P5\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.pixels.data()),
              static_cast<std::streamsize>(img.pixels.size()));
}

void write_pgm_file(const GrayImage& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path);
    write_pgm(img, out);
}

GrayImage synth_plane_image(const PlaneObservation& plane_obs, const SynthParams& params) {
    if (params.bright_mean <= params.dark_mean)
        throw ParameterError("bright_mean must exceed dark_mean");
    if (params.pitch <= 2.0) throw ParameterError("pitch must exceed 2 px");
    if (params.noise_sigma < 0.0 || params.psf_sigma < 0.0)
        throw ParameterError("sigmas must be non-negative");

    const int rows = ArrayGeometry::unit_rows_per_plane;
    const int cols = ArrayGeometry::unit_cols_per_plane;
    const int w = static_cast<int>(std::lround(2.0 * params.margin + cols * params.pitch));
    const int h = static_cast<int>(std::lround(2.0 * params.margin + rows * params.pitch));

    // Unprogrammed cells sit at background level; programmed cells leak
    // charge and show a bright blob.
    std::vector<double> buf(static_cast<std::size_t>(w) * h,
                            static_cast<double>(params.dark_mean));
    const double blob_r = params.pitch / 3.0;
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const CellState s = plane_obs.at(r, c);
            if (s == CellState::unknown)
                throw ParameterError("cannot synthesize an unknown cell state");
            if (s != CellState::one) continue;
            const double cx = params.margin + (c + 0.5) * params.pitch;
            const double cy = params.margin + (r + 0.5) * params.pitch;
            const int x0 = std::max(0, static_cast<int>(cx - blob_r - 1));
            const int x1 = std::min(w - 1, static_cast<int>(cx + blob_r + 1));
            const int y0 = std::max(0, static_cast<int>(cy - blob_r - 1));
            const int y1 = std::min(h - 1, static_cast<int>(cy + blob_r + 1));
            for (int y = y0; y <= y1; ++y)
                for (int x = x0; x <= x1; ++x) {
                    const double dx = x - cx, dy = y - cy;
                    if (dx * dx + dy * dy <= blob_r * blob_r)
                        buf[static_cast<std::size_t>(y) * w + x] = params.bright_mean;
                }
        }
    }

    gaussian_blur(buf, w, h, params.psf_sigma);

    // Charging ramp plus noise. Unit noise is drawn regardless of sigma so
    // runs at different noise levels share the same realization.
    std::mt19937_64 rng(params.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double ramp =
                params.charge_gradient *
                0.5 * (static_cast<double>(x) / (w - 1) + static_cast<double>(y) / (h - 1));
            buf[static_cast<std::size_t>(y) * w + x] +=
                ramp + params.noise_sigma * gauss(rng);
        }
    }

    GrayImage img(w, h);
    for (std::size_t i = 0; i < buf.size(); ++i) img.pixels[i] = clamp_u8(buf[i]);
    return img;
}

GridModel fit_grid(const GrayImage& img, int expected_rows, int expected_cols) {
    if (expected_rows < 1 || expected_cols < 1)
        throw ParameterError("expected grid dimensions must be positive");
    const AxisFit fx = fit_axis(column_profile(img).values, expected_cols, "x");
    const AxisFit fy = fit_axis(row_profile(img).values, expected_rows, "y");
    GridModel grid;
    grid.origin_x = fx.origin;
    grid.origin_y = fy.origin;
    grid.pitch_x = fx.pitch;
    grid.pitch_y = fy.pitch;
    grid.rows = expected_rows;
    grid.cols = expected_cols;
    return grid;
}

ClassifiedGrid classify(const GrayImage& img, const GridModel& grid,
                        double margin_floor, double min_contrast) {
    if (grid.rows < 1 || grid.cols < 1 || grid.pitch_x <= 2.0 || grid.pitch_y <= 2.0)
        throw ParameterError("invalid grid model");
    const double radius = std::min(grid.pitch_x, grid.pitch_y) / 4.0;
    const int n = grid.rows * grid.cols;
    std::vector<double> means(static_cast<std::size_t>(n));
    for (int r = 0; r < grid.rows; ++r)
        for (int c = 0; c < grid.cols; ++c)
            means[static_cast<std::size_t>(r * grid.cols + c)] =
                site_mean(img, grid.origin_x + c * grid.pitch_x,
                          grid.origin_y + r * grid.pitch_y, radius);

    // Otsu threshold over the site means.
    std::array<int, 256> hist{};
    for (double m : means) ++hist[static_cast<std::size_t>(std::clamp(m, 0.0, 255.0))];
    double total_sum = 0.0;
    for (int i = 0; i < 256; ++i) total_sum += static_cast<double>(i) * hist[static_cast<std::size_t>(i)];
    double best_var = -1.0;
    int best_t = -1;
    double w0 = 0.0, sum0 = 0.0;
    for (int t = 0; t < 255; ++t) {
        w0 += hist[static_cast<std::size_t>(t)];
        sum0 += static_cast<double>(t) * hist[static_cast<std::size_t>(t)];
        const double w1 = n - w0;
        if (w0 == 0.0 || w1 == 0.0) continue;
        const double mu0 = sum0 / w0;
        const double mu1 = (total_sum - sum0) / w1;
        const double var = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
        if (var > best_var) {
            best_var = var;
            best_t = t;
        }
    }
    if (best_t < 0) throw NoContrastError("all sites share one intensity class");

    // Otsu lands on a bin edge that can hug one cluster; split by bin, then
    // recenter the reported threshold midway between the class means so the
    // margins are symmetric.
    double bright_sum = 0.0, dark_sum = 0.0;
    int bright_n = 0, dark_n = 0;
    for (double m : means) {
        if (static_cast<int>(std::clamp(m, 0.0, 255.0)) > best_t) {
            bright_sum += m;
            ++bright_n;
        } else {
            dark_sum += m;
            ++dark_n;
        }
    }
    if (bright_n == 0 || dark_n == 0)
        throw NoContrastError("all sites share one intensity class");
    const double contrast = bright_sum / bright_n - dark_sum / dark_n;
    const double threshold = 0.5 * (bright_sum / bright_n + dark_sum / dark_n);
    if (contrast < min_contrast)
        throw NoContrastError("class separation " + std::to_string(contrast) +
                              " below minimum " + std::to_string(min_contrast));

    ClassifiedGrid out;
    out.rows = grid.rows;
    out.cols = grid.cols;
    out.threshold = threshold;
    out.contrast = contrast;
    out.values.resize(static_cast<std::size_t>(n));
    out.margins.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double m = means[static_cast<std::size_t>(i)];
        const double margin = std::abs(m - threshold);
        out.margins[static_cast<std::size_t>(i)] = margin;
        if (margin < margin_floor)
            out.values[static_cast<std::size_t>(i)] = CellState::unknown;
        else
            out.values[static_cast<std::size_t>(i)] =
                m > threshold ? CellState::one : CellState::zero;
    }
    return out;
}

GrayImage flatten_background(const GrayImage& img) {
    const int w = img.width, h = img.height;
    const double xc = (w - 1) / 2.0, yc = (h - 1) / 2.0;
    double sz = 0.0, sxz = 0.0, syz = 0.0, sxx = 0.0, syy = 0.0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double z = img.at(x, y);
            sz += z;
            sxz += (x - xc) * z;
            syz += (y - yc) * z;
        }
    }
    for (int x = 0; x < w; ++x) sxx += (x - xc) * (x - xc);
    for (int y = 0; y < h; ++y) syy += (y - yc) * (y - yc);
    sxx *= h;
    syy *= w;
    const double b = sxx > 0.0 ? sxz / sxx : 0.0;
    const double c = syy > 0.0 ? syz / syy : 0.0;
    const double mean = sz / (static_cast<double>(w) * h);
    GrayImage out(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            out.at(x, y) = clamp_u8(img.at(x, y) - b * (x - xc) - c * (y - yc) - mean + 128.0);
    return out;
}

PlaneObservation extract_plane(const GrayImage& img, int plane,
                               const ExtractOptions& options) {
    if (plane < 0 || plane >= ArrayGeometry::plane_count)
        throw RangeError("plane out of range 0..23");
    // Site blobs cover a minority of the area, so a high percentile of the
    // raw intensities separates a uniformly-bright plane from an empty one.
    std::vector<std::uint8_t> sorted_pixels(img.pixels);
    std::nth_element(sorted_pixels.begin(),
                     sorted_pixels.begin() + static_cast<long>(sorted_pixels.size() * 9 / 10),
                     sorted_pixels.end());
    const double raw_p90 =
        sorted_pixels[sorted_pixels.size() * 9 / 10];

    const GrayImage work = options.flatten ? flatten_background(img) : img;
    PlaneObservation obs;
    const int rows = ArrayGeometry::unit_rows_per_plane;
    const int cols = ArrayGeometry::unit_cols_per_plane;
    try {
        const GridModel grid = fit_grid(work, rows, cols);
        const ClassifiedGrid cg =
            classify(work, grid, options.margin_floor, options.min_contrast);
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) {
                const int gr = options.flip180 ? rows - 1 - r : r;
                const int gc = options.flip180 ? cols - 1 - c : c;
                obs.set(gr, gc, cg.value(r, c));
            }
    } catch (const Error&) {
        if (!options.assume_uniform) throw;
        const CellState uniform =
            raw_p90 > options.uniform_threshold ? CellState::one : CellState::zero;
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) obs.set(r, c, uniform);
    }
    return obs;
}

}  // namespace fusemap
