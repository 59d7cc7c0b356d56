#pragma once

#include <utility>
#include <vector>

#include "depthalloc/errors.hpp"

namespace depthalloc {

struct StereoParams {
    double ipd_m = 0.064;            // I = 2a
    double acuity_rad = 0.5 * 2.908882086657216e-4;  // 0.5 arcmin
    double z_start_m = 0.25;
    double z_stop_m = 15.0;
    double vernier_floor_m = 100e-6;

    static double arcmin_to_rad(double arcmin) {
        return arcmin * 2.908882086657216e-4;
    }
    // Beyond z = I/delta the disparity geometry degenerates.
    double geometric_limit_m() const { return ipd_m / acuity_rad; }
};

struct HoropterLevels {
    std::vector<double> distances_m;  // strictly increasing
    int count() const { return static_cast<int>(distances_m.size()); }
};

struct HoropterTrace {
    double fixation_z_m = 0.0;
    double hh_deviation = 0.0;  // Hering-Hillebrand H
    std::vector<std::pair<double, double>> points;  // (x, y) meters
    int omitted = 0;  // samples dropped for negative discriminant
};

// Closed-form inversion of delta = dz*I/(z^2 + z*dz):
// dz = delta*z^2/(I - delta*z). Throws DomainError past the geometric limit.
double disparity_step(double z_m, const StereoParams& params);

// Levels from z_start, stepping by disparity_step (clamped below by the
// vernier floor when apply_floor), until the next level would pass z_stop.
HoropterLevels iterate_horopters(const StereoParams& params, bool apply_floor);

// (max count - min count) / mean count over the supplied IPD values.
double ipd_sensitivity(const StereoParams& base,
                       const std::vector<double>& ipds_m, bool apply_floor);

// Least-squares line H = slope*(1/z) + intercept over (z_m, H) pairs.
struct HFit {
    double slope = 0.0;
    double intercept = 0.0;
    double rms_residual = 0.0;
    double predict(double z_m) const { return slope / z_m + intercept; }
};
HFit fit_H(const std::vector<std::pair<double, double>>& z_h_pairs);

// The five Hering-Hillebrand deviations tabulated in the literature.
const std::vector<std::pair<double, double>>& default_h_table();

// Ogle conic trace at a fixation distance: solve the quadratic in y per
// sampled x and keep the far root; b = z (the H = 0 degenerate case is then
// exactly the Vieth-Mueller circle). Samples span x in [-x_max, x_max].
HoropterTrace horopter_trace(double fixation_z_m, double ipd_m, double H,
                             int x_samples, double x_max_m = 0.0);

// Vertical horopter helper: sphere of radius fixation_z about the IPD
// midpoint, sampled in a vertical plane; returns (elevation angle, radius).
std::vector<std::pair<double, double>> vertical_horopter(double fixation_z_m,
                                                         int samples);

}  // namespace depthalloc
