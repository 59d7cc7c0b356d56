#pragma once

#include <vector>

#include "depthalloc/accommodation.hpp"
#include "depthalloc/grid.hpp"

namespace depthalloc {

// One DoF sharpness profile: a Gaussian in the diopter coordinate, sampled on
// the grid, zeroed for ages whose accommodation amplitude is below the center
// (such planes are unreachable for those eyes).
struct Knoll {
    double center = 0.0;  // diopters
    double sigma = 0.0;   // diopters
    // Row-major [age_row * depth_cols + col], each value in [0, 1].
    std::vector<double> values;

    double value(const Grid& g, int age_row, int col) const {
        return values[static_cast<size_t>(age_row) * g.depth_cols + col];
    }
};

struct KnollTrain {
    std::vector<Knoll> knolls;
    double d_min = 0.0;
    double d_max = 0.0;
    double spacing = 0.0;

    int size() const { return static_cast<int>(knolls.size()); }
};

// Number of uniformly spaced centers in [d_min, d_max]:
// floor((d_max - d_min)/spacing) + 1, with a small slack so that spans that
// are an exact multiple of the spacing (up to rounding) include the endpoint.
int train_count(double d_min, double d_max, double spacing);

// Build the train on the grid. Centers at d_min + i*spacing; Gaussian shape
// with sigma = fwhm/2.3548; age mask per the amplitude model.
KnollTrain build_train(double d_min, double d_max, double spacing,
                       double fwhm, const AccommodationModel& model,
                       const Grid& grid);

// Train with explicit per-knoll sigmas (synthetic setups such as the
// 30-knoll demonstration box); spacing still uniform.
KnollTrain build_train_sigmas(double d_min, double d_max, double spacing,
                              const std::vector<double>& sigmas,
                              const AccommodationModel& model,
                              const Grid& grid);

}  // namespace depthalloc
