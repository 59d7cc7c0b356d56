#pragma once

#include <string>
#include <vector>

#include "depthalloc/grid.hpp"

namespace depthalloc {

// Age importance: uniform, Gamma(k, theta) pdf, or a piecewise-constant table
// (e.g. census population bins).
struct AgeDistribution {
    enum class Kind { kUniform, kGamma, kTable };
    Kind kind = Kind::kUniform;
    double k = 3.0;
    double theta = 10.0;
    struct Bin {
        double age_low;
        double age_high;
        double count;
    };
    std::vector<Bin> table;

    double weight(double age) const;
};

// Depth importance along the x axis: none, Gaussian in diopters, or Gaussian
// in depth (meters).
struct DepthEmphasis {
    enum class Kind { kNone, kGaussianDiopter, kGaussianDepth };
    Kind kind = Kind::kNone;
    double mean = 0.0;  // diopters or meters depending on kind
    double sd = 1.0;

    double weight(double diopter) const;
};

// Separable nonnegative importance field over (age row x depth column),
// peak-normalized to 1.
struct WeightField {
    int age_rows = 0;
    int depth_cols = 0;
    std::vector<double> values;  // row-major, size age_rows * depth_cols

    double at(int r, int c) const {
        return values[static_cast<size_t>(r) * depth_cols + c];
    }
};

// Gamma pdf value at `age`.
double gamma_weight(double age, double k, double theta);

// Parse a population CSV with header `age_low,age_high,count`. Rows outside
// [10, 70] are clipped; overlapping bins, negative counts, or empty coverage
// raise ConfigError with the offending row number.
AgeDistribution load_population_table(const std::string& path);

// Built-in US census population counts (millions) in 5-year bins over
// [10, 70); used when a table distribution is requested without a path.
AgeDistribution us_census_distribution();

// cell weight = age_weight(row) * depth_weight(col), then peak-normalized.
WeightField build_weight_field(const AgeDistribution& ages,
                               const DepthEmphasis& depth, const Grid& grid);

}  // namespace depthalloc
