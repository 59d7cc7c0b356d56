#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "depthalloc/knoll.hpp"
#include "depthalloc/weighting.hpp"

namespace depthalloc {

// Fixed-capacity bitset over knoll indices (n <= 256 covers every train in
// the paper; the widest is 159).
struct Pattern {
    static constexpr int kWords = 4;
    static constexpr int kMaxBits = 64 * kWords;
    std::array<std::uint64_t, kWords> w{};

    void set(int i) { w[i >> 6] |= std::uint64_t{1} << (i & 63); }
    bool test(int i) const { return (w[i >> 6] >> (i & 63)) & 1; }
    bool intersects(const Pattern& o) const {
        for (int k = 0; k < kWords; ++k)
            if (w[k] & o.w[k]) return true;
        return false;
    }
    bool empty() const {
        for (auto x : w)
            if (x) return false;
        return true;
    }
    int count() const;
    bool operator==(const Pattern& o) const { return w == o.w; }
    std::uint64_t hash() const;
    std::vector<int> indices(int n) const;
};

// Sparse binary p x n indicator matrix: row per pixel, bit i set iff the
// pixel lies in hyp(f_i). All-zero rows are not materialized; their weight is
// tracked in zero_weight so that weight conservation still holds.
struct HypographMatrix {
    int n = 0;
    std::vector<Pattern> rows;
    std::vector<double> pixel_weights;  // parallel to rows
    double zero_weight = 0.0;           // total weight of all-zero pixels
    long long pixel_total = 0;          // p, including zero pixels

    double total_weight() const {
        double s = zero_weight;
        for (double v : pixel_weights) s += v;
        return s;
    }
};

// Super-pixel condensation: one row per distinct binary pattern, in first-
// occurrence order. entry(j, i) = mult[j] * pattern[j](i); u[j] accumulates
// pixel weights (equal to mult[j] under unit weights).
struct CondensedMatrix {
    int n = 0;
    std::vector<Pattern> patterns;
    std::vector<long long> mult;  // pixel multiplicity per super-pixel
    std::vector<double> u;        // summed pixel weights per super-pixel
    double zero_weight = 0.0;
    long long zero_mult = 0;

    int rows() const { return static_cast<int>(patterns.size()); }
    long long entry(int j, int i) const {
        return patterns[j].test(i) ? mult[j] : 0;
    }
    double total_weight() const {
        double s = zero_weight;
        for (double v : u) s += v;
        return s;
    }
    // Column index lists: for each knoll i, the super-pixels containing it.
    std::vector<std::vector<int>> column_supports() const;
};

// Rasterize a train against the grid. Pixel (age r, col c, height h) is in
// hyp(f_i) iff the height-bin midpoint (h + 0.5)/H <= f_i(r, c). Pixel weight
// is col_measure * field(r, c) / H (field omitted -> 1).
HypographMatrix rasterize(const KnollTrain& train, const Grid& grid,
                          const WeightField* field = nullptr);

// Group identical rows; first-occurrence order.
CondensedMatrix condense(const HypographMatrix& m);

// Fused rasterize+condense for paper-scale grids. Produces the solver matrix
// (u from the full-box measure x weight field) plus a parallel evaluation
// weight vector u_eval restricted to the achievable box (cells with
// column diopter <= amplitude(age)); total_eval is its box total.
struct CondensedProblem {
    CondensedMatrix m;
    std::vector<double> u_eval;
    double total_eval = 0.0;
};

CondensedProblem rasterize_condensed(const KnollTrain& train, const Grid& grid,
                                     const AccommodationModel& model,
                                     const WeightField* field = nullptr);

// Weighted covered mass of a selection: sum of u over super-pixels whose
// pattern intersects the selection.
double covered_weight(const CondensedMatrix& m, const Pattern& selection,
                      const std::vector<double>& u);

// 1 - covered/total (the fraction of the box left uncovered).
double coverage_error(const Pattern& selection, const CondensedMatrix& m,
                      double total_weight);
double coverage_error(const Pattern& selection, const CondensedMatrix& m,
                      const std::vector<double>& u, double total_weight);

// Coverage error of the eye's own iterative quantization at the reference
// age: planes from iterate_focal_planes(ref_age, pupil), Gaussian profiles of
// the same FWHM, evaluated on a 1-row grid over [d_min, d_max] with the
// unweighted depth measure.
double intrinsic_error(const AccommodationModel& model, const DofTable& dof,
                       double pupil_mm, double d_min, double d_max,
                       double ref_age = 10.0, int depth_cols = 512,
                       int height_bins = 128);

}  // namespace depthalloc
