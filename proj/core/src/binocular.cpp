#include "depthalloc/binocular.hpp"

#include <algorithm>
#include <cmath>

namespace depthalloc {

double disparity_step(double z_m, const StereoParams& params) {
    if (!(z_m > 0.0)) throw DomainError("disparity_step: z must be positive");
    const double denom = params.ipd_m - params.acuity_rad * z_m;
    if (!(denom > 0.0))
        throw DomainError("disparity_step: beyond the geometric limit I/delta");
    return params.acuity_rad * z_m * z_m / denom;
}

HoropterLevels iterate_horopters(const StereoParams& params, bool apply_floor) {
    if (!(params.z_start_m > 0.0) || !(params.z_stop_m > params.z_start_m))
        throw DomainError("iterate_horopters: need 0 < z_start < z_stop");
    HoropterLevels levels;
    double z = params.z_start_m;
    while (z <= params.z_stop_m) {
        levels.distances_m.push_back(z);
        if (z >= params.geometric_limit_m()) break;
        double step = disparity_step(z, params);
        if (apply_floor) step = std::max(step, params.vernier_floor_m);
        z += step;
    }
    return levels;
}

double ipd_sensitivity(const StereoParams& base,
                       const std::vector<double>& ipds_m, bool apply_floor) {
    if (ipds_m.size() < 2)
        throw DomainError("ipd_sensitivity: need at least two IPD values");
    double lo = 0.0, hi = 0.0, sum = 0.0;
    bool first = true;
    for (double ipd : ipds_m) {
        StereoParams p = base;
        p.ipd_m = ipd;
        const double c =
            static_cast<double>(iterate_horopters(p, apply_floor).count());
        if (first) {
            lo = hi = c;
            first = false;
        }
        lo = std::min(lo, c);
        hi = std::max(hi, c);
        sum += c;
    }
    return (hi - lo) / (sum / static_cast<double>(ipds_m.size()));
}

HFit fit_H(const std::vector<std::pair<double, double>>& z_h_pairs) {
    if (z_h_pairs.size() < 2)
        throw DomainError("fit_H: need at least two (z, H) pairs");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double n = static_cast<double>(z_h_pairs.size());
    for (const auto& [z, h] : z_h_pairs) {
        if (!(z > 0.0)) throw DomainError("fit_H: fixation must be positive");
        const double x = 1.0 / z;
        sx += x;
        sy += h;
        sxx += x * x;
        sxy += x * h;
    }
    const double det = n * sxx - sx * sx;
    if (std::abs(det) < 1e-15)
        throw DomainError("fit_H: degenerate input (single dioptric distance)");
    HFit fit;
    fit.slope = (n * sxy - sx * sy) / det;
    fit.intercept = (sy * sxx - sx * sxy) / det;
    double ss = 0.0;
    for (const auto& [z, h] : z_h_pairs) {
        const double r = fit.predict(z) - h;
        ss += r * r;
    }
    fit.rms_residual = std::sqrt(ss / n);
    return fit;
}

const std::vector<std::pair<double, double>>& default_h_table() {
    static const std::vector<std::pair<double, double>> table = {
        {4.5, 0.108}, {7.3, 0.068}, {2.37, 0.203}, {1.29, 0.366}, {5.5, 0.086}};
    return table;
}

HoropterTrace horopter_trace(double fixation_z_m, double ipd_m, double H,
                             int x_samples, double x_max_m) {
    if (!(fixation_z_m > 0.0) || !(ipd_m > 0.0))
        throw DomainError("horopter_trace: fixation and IPD must be positive");
    if (x_samples < 2) throw DomainError("horopter_trace: need >= 2 samples");
    const double z = fixation_z_m;
    const double a = 0.5 * ipd_m;
    if (x_max_m <= 0.0) x_max_m = z;

    // Conic in (x, y) with the shape parameter b tied to the fixation
    // distance (b = z):
    //   x^2 (1 - Hz/2a) + y^2 (1 + Hz/2a) - y ((z^2 - a^2)/z + Ha)
    //     - a^2 + Haz/2 = 0.
    const double A = 1.0 + H * z / (2.0 * a);
    const double B = -((z * z - a * a) / z + H * a);

    HoropterTrace trace;
    trace.fixation_z_m = z;
    trace.hh_deviation = H;
    for (int s = 0; s < x_samples; ++s) {
        const double x = -x_max_m + 2.0 * x_max_m * s / (x_samples - 1);
        const double C =
            x * x * (1.0 - H * z / (2.0 * a)) - a * a + H * a * z / 2.0;
        const double disc = B * B - 4.0 * A * C;
        if (disc < 0.0) {
            ++trace.omitted;
            continue;
        }
        const double y = (-B + std::sqrt(disc)) / (2.0 * A);  // far branch
        trace.points.emplace_back(x, y);
    }
    return trace;
}

std::vector<std::pair<double, double>> vertical_horopter(double fixation_z_m,
                                                         int samples) {
    if (!(fixation_z_m > 0.0))
        throw DomainError("vertical_horopter: fixation must be positive");
    if (samples < 2) throw DomainError("vertical_horopter: need >= 2 samples");
    // A sphere about the IPD midpoint: constant radius at every elevation.
    std::vector<std::pair<double, double>> out;
    out.reserve(samples);
    const double pi = 3.14159265358979323846;
    for (int s = 0; s < samples; ++s) {
        const double angle = -0.5 * pi + pi * s / (samples - 1);
        out.emplace_back(angle, fixation_z_m);
    }
    return out;
}

}  // namespace depthalloc
