#include "depthalloc/hypograph.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <unordered_map>

#include "depthalloc/accommodation.hpp"
#include "depthalloc/units.hpp"

namespace depthalloc {

int Pattern::count() const {
    int c = 0;
    for (auto x : w) c += std::popcount(x);
    return c;
}

std::uint64_t Pattern::hash() const {
    // FNV-1a over the four words.
    std::uint64_t h = 1469598103934665603ULL;
    for (auto x : w) {
        for (int b = 0; b < 8; ++b) {
            h ^= (x >> (8 * b)) & 0xff;
            h *= 1099511628211ULL;
        }
    }
    return h;
}

std::vector<int> Pattern::indices(int n) const {
    std::vector<int> out;
    for (int i = 0; i < n; ++i)
        if (test(i)) out.push_back(i);
    return out;
}

namespace {

struct PatternHash {
    std::size_t operator()(const Pattern& p) const { return p.hash(); }
};

// Number of height bins whose midpoint lies under a profile value v, for H
// bins: #{h : (h + 0.5)/H <= v}.
inline int bins_under(double v, int height_bins) {
    if (v <= 0.0) return 0;
    const int m = static_cast<int>(std::floor(v * height_bins + 0.5));
    return std::min(m, height_bins);
}

void check_capacity(const KnollTrain& train) {
    if (train.size() > Pattern::kMaxBits)
        throw DomainError("rasterize: train exceeds " +
                          std::to_string(Pattern::kMaxBits) + " knolls");
}

}  // namespace

HypographMatrix rasterize(const KnollTrain& train, const Grid& grid,
                          const WeightField* field) {
    check_capacity(train);
    const int n = train.size();
    const int H = grid.height_bins;
    HypographMatrix m;
    m.n = n;
    m.pixel_total = grid.pixel_count();
    m.rows.reserve(static_cast<size_t>(grid.age_rows) * grid.depth_cols * H);

    std::vector<int> bins(n);
    for (int r = 0; r < grid.age_rows; ++r) {
        for (int c = 0; c < grid.depth_cols; ++c) {
            for (int i = 0; i < n; ++i)
                bins[i] = bins_under(train.knolls[i].value(grid, r, c), H);
            const double w =
                grid.col_measure[c] * (field ? field->at(r, c) : 1.0) / H;
            for (int h = 0; h < H; ++h) {
                Pattern p;
                for (int i = 0; i < n; ++i)
                    if (h < bins[i]) p.set(i);
                if (p.empty()) {
                    m.zero_weight += w;
                } else {
                    m.rows.push_back(p);
                    m.pixel_weights.push_back(w);
                }
            }
        }
    }
    return m;
}

CondensedMatrix condense(const HypographMatrix& m) {
    CondensedMatrix cm;
    cm.n = m.n;
    cm.zero_weight = m.zero_weight;
    cm.zero_mult = m.pixel_total - static_cast<long long>(m.rows.size());
    std::unordered_map<Pattern, int, PatternHash> index;
    index.reserve(m.rows.size());
    for (size_t r = 0; r < m.rows.size(); ++r) {
        auto [it, inserted] = index.try_emplace(m.rows[r], cm.rows());
        if (inserted) {
            cm.patterns.push_back(m.rows[r]);
            cm.mult.push_back(0);
            cm.u.push_back(0.0);
        }
        cm.mult[it->second] += 1;
        cm.u[it->second] += m.pixel_weights[r];
    }
    return cm;
}

std::vector<std::vector<int>> CondensedMatrix::column_supports() const {
    std::vector<std::vector<int>> sup(n);
    for (int j = 0; j < rows(); ++j)
        for (int i = 0; i < n; ++i)
            if (patterns[j].test(i)) sup[i].push_back(j);
    return sup;
}

CondensedProblem rasterize_condensed(const KnollTrain& train, const Grid& grid,
                                     const AccommodationModel& model,
                                     const WeightField* field) {
    check_capacity(train);
    const int n = train.size();
    const int H = grid.height_bins;

    CondensedProblem out;
    CondensedMatrix& cm = out.m;
    cm.n = n;

    std::unordered_map<Pattern, int, PatternHash> index;
    std::vector<double> amplitude(grid.age_rows);
    for (int r = 0; r < grid.age_rows; ++r)
        amplitude[r] = model.max_accommodation(grid.ages[r]);

    // Bucket knolls by the height bin at which they drop out of the pattern.
    std::vector<std::vector<int>> drop_at(H + 1);
    for (int r = 0; r < grid.age_rows; ++r) {
        for (int c = 0; c < grid.depth_cols; ++c) {
            const double w =
                grid.col_measure[c] * (field ? field->at(r, c) : 1.0);
            const bool achievable = grid.x_centers[c] <= amplitude[r] + 1e-12;
            if (achievable) out.total_eval += w;
            const double wp = w / H;
            const double wp_eval = achievable ? wp : 0.0;

            for (auto& v : drop_at) v.clear();
            Pattern p;
            for (int i = 0; i < n; ++i) {
                const int m = bins_under(train.knolls[i].value(grid, r, c), H);
                if (m > 0) {
                    p.set(i);
                    drop_at[m].push_back(i);
                }
            }
            for (int h = 0; h < H;) {
                // The pattern stays constant until the next drop-out height.
                int h_next = h + 1;
                while (h_next < H && drop_at[h_next].empty()) ++h_next;
                const long long run = h_next - h;
                if (p.empty()) {
                    cm.zero_weight += wp * run;
                    cm.zero_mult += run;
                } else {
                    auto [it, inserted] = index.try_emplace(p, cm.rows());
                    if (inserted) {
                        cm.patterns.push_back(p);
                        cm.mult.push_back(0);
                        cm.u.push_back(0.0);
                        out.u_eval.push_back(0.0);
                    }
                    cm.mult[it->second] += run;
                    cm.u[it->second] += wp * run;
                    out.u_eval[it->second] += wp_eval * run;
                }
                for (int i : drop_at[h_next]) p.w[i >> 6] &= ~(1ULL << (i & 63));
                h = h_next;
            }
        }
    }
    return out;
}

double covered_weight(const CondensedMatrix& m, const Pattern& selection,
                      const std::vector<double>& u) {
    double s = 0.0;
    for (int j = 0; j < m.rows(); ++j)
        if (m.patterns[j].intersects(selection)) s += u[j];
    return s;
}

double coverage_error(const Pattern& selection, const CondensedMatrix& m,
                      double total_weight) {
    return coverage_error(selection, m, m.u, total_weight);
}

double coverage_error(const Pattern& selection, const CondensedMatrix& m,
                      const std::vector<double>& u, double total_weight) {
    if (!(total_weight > 0.0))
        throw DomainError("coverage_error: nonpositive total weight");
    return 1.0 - covered_weight(m, selection, u) / total_weight;
}

double intrinsic_error(const AccommodationModel& model, const DofTable& dof,
                       double pupil_mm, double d_min, double d_max,
                       double ref_age, int depth_cols, int height_bins) {
    const double z_stop = std::max(10.0, diopter_to_depth(d_min));
    const std::vector<double> centers =
        iterate_focal_planes_diopter(model, dof, ref_age, pupil_mm, z_stop);
    if (centers.empty())
        throw DomainError("intrinsic_error: reference age yields no planes");
    const double sigma = fwhm_to_sigma(dof.dof_fwhm(pupil_mm));
    const Grid grid = Grid::make(d_min, d_max, depth_cols, 1, height_bins,
                                 Measure::kDepth);

    double covered = 0.0;
    for (int c = 0; c < grid.depth_cols; ++c) {
        double v = 0.0;
        for (double center : centers) {
            const double dx = grid.x_centers[c] - center;
            v = std::max(v, std::exp(-dx * dx / (2.0 * sigma * sigma)));
        }
        covered += grid.col_measure[c] *
                   (static_cast<double>(bins_under(v, height_bins)) /
                    height_bins);
    }
    return 1.0 - covered / grid.total_measure();
}

}  // namespace depthalloc
