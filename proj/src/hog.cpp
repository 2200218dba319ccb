#include "servotrack/hog.hpp"

#include <cmath>

namespace servotrack {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

GradientField compute_gradients(const Image& image, bool signed_orientation) {
    if (image.width < 3 || image.height < 3)
        throw ImageTooSmall("compute_gradients: image must be at least 3x3");

    GradientField g;
    g.width = image.width;
    g.height = image.height;
    g.magnitude.resize(image.pixels.size());
    g.orientation.resize(image.pixels.size());

    const double period = signed_orientation ? 2.0 * kPi : kPi;
    for (int y = 0; y < image.height; ++y) {
        for (int x = 0; x < image.width; ++x) {
            const int xl = std::max(0, x - 1), xr = std::min(image.width - 1, x + 1);
            const int yu = std::max(0, y - 1), yd = std::min(image.height - 1, y + 1);
            const double gx = image.at(xr, y) - image.at(xl, y);
            const double gy = image.at(x, yd) - image.at(x, yu);
            const std::size_t idx = static_cast<std::size_t>(y) * image.width + x;
            if (gx == 0.0 && gy == 0.0) {  // flat region; never votes
                g.magnitude[idx] = 0.0;
                g.orientation[idx] = 0.0;
                continue;
            }
            g.magnitude[idx] = std::hypot(gx, gy);
            double ori = std::atan2(gy, gx);
            ori = std::fmod(ori + 2.0 * kPi, period);  // fold into [0, period)
            if (ori >= period) ori -= period;
            g.orientation[idx] = ori;
        }
    }
    return g;
}

Descriptor compute_hog(const Image& image, const HOGParams& params) {
    const int cells_x = image.width / params.cell_size;
    const int cells_y = image.height / params.cell_size;
    if (cells_x < params.block_size || cells_y < params.block_size)
        throw ImageTooSmall("compute_hog: image smaller than one block");

    const GradientField g = compute_gradients(image, params.signed_orientation);
    const double period = params.signed_orientation ? 2.0 * kPi : kPi;
    const double bin_width = period / params.n_bins;

    // Cell histograms, magnitude-weighted votes split bilinearly between the
    // two nearest orientation bins (circular).
    std::vector<double> hist(static_cast<std::size_t>(cells_x) * cells_y * params.n_bins, 0.0);
    for (int cy = 0; cy < cells_y; ++cy) {
        for (int cx = 0; cx < cells_x; ++cx) {
            double* cell = &hist[(static_cast<std::size_t>(cy) * cells_x + cx) * params.n_bins];
            for (int py = cy * params.cell_size; py < (cy + 1) * params.cell_size; ++py) {
                for (int px = cx * params.cell_size; px < (cx + 1) * params.cell_size; ++px) {
                    const std::size_t idx = static_cast<std::size_t>(py) * g.width + px;
                    const double mag = g.magnitude[idx];
                    if (mag == 0.0) continue;
                    const double pos = g.orientation[idx] / bin_width - 0.5;  // bin centers at (i+0.5)*w
                    const double lower = std::floor(pos);
                    const double frac = pos - lower;
                    const int b0 = (static_cast<int>(lower) % params.n_bins + params.n_bins) % params.n_bins;
                    const int b1 = (b0 + 1) % params.n_bins;
                    cell[b0] += mag * (1.0 - frac);
                    cell[b1] += mag * frac;
                }
            }
        }
    }

    const int blocks_x = (cells_x - params.block_size) / params.block_stride + 1;
    const int blocks_y = (cells_y - params.block_size) / params.block_stride + 1;
    const int block_len = params.block_size * params.block_size * params.n_bins;

    Descriptor d;
    d.values.resize(static_cast<std::size_t>(blocks_y) * blocks_x * block_len);
    std::size_t out = 0;
    std::vector<double> block(static_cast<std::size_t>(block_len));
    for (int by = 0; by < blocks_y; ++by) {
        for (int bx = 0; bx < blocks_x; ++bx) {
            int k = 0;
            for (int icy = 0; icy < params.block_size; ++icy) {
                for (int icx = 0; icx < params.block_size; ++icx) {
                    const int cy = by * params.block_stride + icy;
                    const int cx = bx * params.block_stride + icx;
                    const double* cell = &hist[(static_cast<std::size_t>(cy) * cells_x + cx) * params.n_bins];
                    for (int b = 0; b < params.n_bins; ++b) block[k++] = cell[b];
                }
            }
            // L2-Hys: normalize, clip, renormalize.
            double norm_sq = 0.0;
            for (double v : block) norm_sq += v * v;
            double inv = 1.0 / std::sqrt(norm_sq + params.epsilon * params.epsilon);
            for (double& v : block) v = std::min(v * inv, params.clip);
            norm_sq = 0.0;
            for (double v : block) norm_sq += v * v;
            inv = 1.0 / std::sqrt(norm_sq + params.epsilon * params.epsilon);
            for (double v : block) d.values[out++] = v * inv;
        }
    }
    return d;
}

double descriptor_distance(const Descriptor& a, const Descriptor& b) {
    if (a.values.size() != b.values.size())
        throw DescriptorLengthMismatch("descriptor_distance: length mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) sum += std::abs(a.values[i] - b.values[i]);
    return sum;
}

}  // namespace servotrack
