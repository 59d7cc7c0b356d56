#include "depthalloc/knoll.hpp"

#include <cmath>

#include "depthalloc/units.hpp"

namespace depthalloc {

int train_count(double d_min, double d_max, double spacing) {
    if (!(d_min < d_max)) throw DomainError("train_count: need d_min < d_max");
    if (!(spacing > 0.0)) throw DomainError("train_count: need spacing > 0");
    return static_cast<int>(std::floor((d_max - d_min) / spacing + 1e-9)) + 1;
}

namespace {

KnollTrain build_impl(double d_min, double d_max, double spacing,
                      const std::vector<double>& sigmas,
                      const AccommodationModel& model, const Grid& grid) {
    const int n = static_cast<int>(sigmas.size());
    KnollTrain train;
    train.d_min = d_min;
    train.d_max = d_max;
    train.spacing = spacing;
    train.knolls.resize(n);

    std::vector<double> amplitude(grid.age_rows);
    for (int r = 0; r < grid.age_rows; ++r)
        amplitude[r] = model.max_accommodation(grid.ages[r]);

    for (int i = 0; i < n; ++i) {
        Knoll& k = train.knolls[i];
        k.center = d_min + i * spacing;
        k.sigma = sigmas[i];
        if (!(k.sigma > 0.0))
            throw DomainError("build_train: sigma must be positive");
        k.values.assign(static_cast<size_t>(grid.age_rows) * grid.depth_cols,
                        0.0);
        const double inv2s2 = 1.0 / (2.0 * k.sigma * k.sigma);
        for (int r = 0; r < grid.age_rows; ++r) {
            // An eye that cannot accommodate to the plane never sees it sharp.
            if (amplitude[r] < k.center - 1e-12) continue;
            double* row = &k.values[static_cast<size_t>(r) * grid.depth_cols];
            for (int c = 0; c < grid.depth_cols; ++c) {
                const double dx = grid.x_centers[c] - k.center;
                row[c] = std::exp(-dx * dx * inv2s2);
            }
        }
    }
    return train;
}

}  // namespace

KnollTrain build_train(double d_min, double d_max, double spacing, double fwhm,
                       const AccommodationModel& model, const Grid& grid) {
    if (!(fwhm > 0.0)) throw DomainError("build_train: fwhm must be positive");
    const int n = train_count(d_min, d_max, spacing);
    std::vector<double> sigmas(n, fwhm_to_sigma(fwhm));
    return build_impl(d_min, d_max, spacing, sigmas, model, grid);
}

KnollTrain build_train_sigmas(double d_min, double d_max, double spacing,
                              const std::vector<double>& sigmas,
                              const AccommodationModel& model,
                              const Grid& grid) {
    if (static_cast<int>(sigmas.size()) != train_count(d_min, d_max, spacing))
        throw DomainError("build_train_sigmas: sigma count does not match the "
                          "center count for this span and spacing");
    return build_impl(d_min, d_max, spacing, sigmas, model, grid);
}

}  // namespace depthalloc
