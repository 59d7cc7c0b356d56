#include "depthalloc/weighting.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "depthalloc/errors.hpp"
#include "depthalloc/units.hpp"

namespace depthalloc {

double gamma_weight(double age, double k, double theta) {
    if (!(k > 0.0) || !(theta > 0.0))
        throw DomainError("gamma_weight: k and theta must be positive");
    if (age <= 0.0) return 0.0;
    return std::pow(age, k - 1.0) * std::exp(-age / theta) /
           (std::tgamma(k) * std::pow(theta, k));
}

double AgeDistribution::weight(double age) const {
    switch (kind) {
        case Kind::kUniform:
            return 1.0;
        case Kind::kGamma:
            return gamma_weight(age, k, theta);
        case Kind::kTable:
            for (const Bin& b : table)
                if (age >= b.age_low && age < b.age_high) return b.count;
            // A query exactly on the last bin's upper edge belongs to it.
            if (!table.empty() && age == table.back().age_high)
                return table.back().count;
            return 0.0;
    }
    return 0.0;
}

double DepthEmphasis::weight(double diopter) const {
    switch (kind) {
        case Kind::kNone:
            return 1.0;
        case Kind::kGaussianDiopter: {
            const double dx = diopter - mean;
            return std::exp(-dx * dx / (2.0 * sd * sd));
        }
        case Kind::kGaussianDepth: {
            const double dz = diopter_to_depth(diopter) - mean;
            return std::exp(-dz * dz / (2.0 * sd * sd));
        }
    }
    return 1.0;
}

AgeDistribution load_population_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("load_population_table: cannot open " + path);

    AgeDistribution dist;
    dist.kind = AgeDistribution::Kind::kTable;

    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        if (line_no == 1 && line.find("age_low") != std::string::npos) continue;
        std::istringstream row(line);
        AgeDistribution::Bin b{};
        char c1 = 0, c2 = 0;
        if (!(row >> b.age_low >> c1 >> b.age_high >> c2 >> b.count) ||
            c1 != ',' || c2 != ',') {
            throw ConfigError("load_population_table: malformed row " +
                              std::to_string(line_no) + " in " + path);
        }
        if (b.age_low >= b.age_high || b.count < 0.0)
            throw ConfigError("load_population_table: invalid bin at row " +
                              std::to_string(line_no) + " in " + path);
        // Clip to the modeled age span.
        b.age_low = std::max(b.age_low, 10.0);
        b.age_high = std::min(b.age_high, 70.0);
        if (b.age_low >= b.age_high) continue;
        for (const AgeDistribution::Bin& prev : dist.table)
            if (b.age_low < prev.age_high && prev.age_low < b.age_high)
                throw ConfigError(
                    "load_population_table: overlapping bin at row " +
                    std::to_string(line_no) + " in " + path);
        dist.table.push_back(b);
    }
    if (dist.table.empty())
        throw ConfigError("load_population_table: no usable bins in " + path);
    std::sort(dist.table.begin(), dist.table.end(),
              [](const auto& a, const auto& b) { return a.age_low < b.age_low; });
    return dist;
}

AgeDistribution us_census_distribution() {
    static const double counts[] = {20.8, 21.0, 21.5, 23.4, 22.3, 21.7,
                                    20.0, 20.3, 20.4, 21.9, 20.5, 17.5};
    AgeDistribution dist;
    dist.kind = AgeDistribution::Kind::kTable;
    for (int b = 0; b < 12; ++b)
        dist.table.push_back({10.0 + 5.0 * b, 15.0 + 5.0 * b, counts[b]});
    return dist;
}

WeightField build_weight_field(const AgeDistribution& ages,
                               const DepthEmphasis& depth, const Grid& grid) {
    WeightField f;
    f.age_rows = grid.age_rows;
    f.depth_cols = grid.depth_cols;
    f.values.resize(static_cast<size_t>(grid.age_rows) * grid.depth_cols);

    std::vector<double> aw(grid.age_rows), dw(grid.depth_cols);
    for (int r = 0; r < grid.age_rows; ++r) aw[r] = ages.weight(grid.ages[r]);
    for (int c = 0; c < grid.depth_cols; ++c)
        dw[c] = depth.weight(grid.x_centers[c]);

    double peak = 0.0;
    for (int r = 0; r < grid.age_rows; ++r)
        for (int c = 0; c < grid.depth_cols; ++c) {
            const double v = aw[r] * dw[c];
            f.values[static_cast<size_t>(r) * grid.depth_cols + c] = v;
            peak = std::max(peak, v);
        }
    if (!(peak > 0.0))
        throw ConfigError("build_weight_field: field is identically zero");
    for (double& v : f.values) v /= peak;
    return f;
}

}  // namespace depthalloc
