#ifndef SERVOTRACK_HOG_HPP
#define SERVOTRACK_HOG_HPP

#include <stdexcept>
#include <vector>

#include "servotrack/image.hpp"

namespace servotrack {

/// Dense-grid descriptor parameters, Dalal-Triggs defaults.
struct HOGParams {
    int cell_size = 8;       // px
    int block_size = 2;      // cells per block side
    int block_stride = 1;    // cells
    int n_bins = 9;
    bool signed_orientation = false;  // default: unsigned, [0, 180) deg
    double clip = 0.2;                // L2-Hys threshold
    double epsilon = 1e-6;            // normalization guard
};

/// Flat block-major descriptor: (blocks_y, blocks_x, block_cells, n_bins).
struct Descriptor {
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
};

struct GradientField {
    std::vector<double> magnitude;    // per pixel
    std::vector<double> orientation;  // per pixel [rad], folded to [0,pi) when unsigned
    int width = 0;
    int height = 0;
};

struct ImageTooSmall : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct DescriptorLengthMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Centered [-1,0,1] differences, one-sided at the borders.
GradientField compute_gradients(const Image& image, bool signed_orientation = false);

/// Cell histograms with bilinear orientation-bin voting, overlapping blocks
/// with L2-Hys normalization. Images are cropped (bottom/right) to a whole
/// number of cells.
Descriptor compute_hog(const Image& image, const HOGParams& params);

/// L1 norm of the elementwise difference.
double descriptor_distance(const Descriptor& a, const Descriptor& b);

}  // namespace servotrack

#endif
