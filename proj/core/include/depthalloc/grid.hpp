#pragma once

#include <cmath>
#include <vector>

#include "depthalloc/errors.hpp"

namespace depthalloc {

// Discretization of the (domain x age x [0,1]) box. The x axis is sampled
// uniformly in its native coordinate (diopters for eye scenarios); the
// integration measure per column is either the column width itself
// (Measure::kUniform) or the depth interval |1/d_hi - 1/d_lo| spanned by the
// column (Measure::kDepth), which expresses box areas in distance space.
enum class Measure { kUniform, kDepth };

struct Grid {
    int depth_cols = 0;
    int age_rows = 0;
    int height_bins = 0;
    double x_min = 0.0;
    double x_max = 0.0;
    Measure measure = Measure::kDepth;
    std::vector<double> x_centers;   // size depth_cols
    std::vector<double> col_measure; // size depth_cols
    std::vector<double> ages;        // size age_rows

    static Grid make(double x_min, double x_max, int depth_cols, int age_rows,
                     int height_bins, Measure measure,
                     double age_min = 10.0, double age_max = 70.0) {
        if (!(x_min < x_max)) throw DomainError("Grid: x_min must be < x_max");
        if (depth_cols < 1 || age_rows < 1 || height_bins < 1)
            throw DomainError("Grid: all counts must be >= 1");
        if (measure == Measure::kDepth && !(x_min > 0.0))
            throw DomainError("Grid: depth measure needs positive diopters");
        Grid g;
        g.depth_cols = depth_cols;
        g.age_rows = age_rows;
        g.height_bins = height_bins;
        g.x_min = x_min;
        g.x_max = x_max;
        g.measure = measure;
        g.x_centers.resize(depth_cols);
        g.col_measure.resize(depth_cols);
        const double w = (x_max - x_min) / depth_cols;
        for (int c = 0; c < depth_cols; ++c) {
            const double lo = x_min + w * c;
            const double hi = x_min + w * (c + 1);
            g.x_centers[c] = 0.5 * (lo + hi);
            g.col_measure[c] =
                measure == Measure::kDepth ? (1.0 / lo - 1.0 / hi) : w;
        }
        g.ages.resize(age_rows);
        for (int r = 0; r < age_rows; ++r) {
            g.ages[r] = age_rows == 1
                            ? 0.5 * (age_min + age_max)
                            : age_min + (age_max - age_min) * r / (age_rows - 1);
        }
        return g;
    }

    long long pixel_count() const {
        return 1LL * depth_cols * age_rows * height_bins;
    }

    double total_measure() const {
        double s = 0.0;
        for (double m : col_measure) s += m;
        return s * age_rows;
    }
};

}  // namespace depthalloc
