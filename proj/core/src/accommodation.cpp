#include "depthalloc/accommodation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "depthalloc/units.hpp"

namespace depthalloc {

double AccommodationModel::max_accommodation(double age) const {
    if (!(age >= 0.0) || !(age <= 130.0))
        throw DomainError("max_accommodation: age out of range");
    return amplitude_max / (1.0 + std::exp(slope * (age - midpoint_age))) +
           rest_offset_d;
}

DofTable::DofTable() {
    fwhm_[2.0] = 0.76;
    fwhm_[3.0] = 0.70;
    fwhm_[6.0] = 0.15;
}

void DofTable::set(double pupil_mm, double fwhm_d) {
    if (!(pupil_mm > 0.0)) throw ConfigError("DofTable: pupil must be positive");
    if (!(fwhm_d > 0.0)) throw ConfigError("DofTable: DoF FWHM must be positive");
    fwhm_[pupil_mm] = fwhm_d;
}

double DofTable::dof_fwhm(double pupil_mm) const {
    for (const auto& [p, f] : fwhm_)
        if (std::abs(p - pupil_mm) < 1e-9) return f;
    std::ostringstream os;
    os << "DofTable: no DoF entry for pupil " << pupil_mm << " mm (known:";
    for (const auto& [p, f] : fwhm_) os << ' ' << p;
    os << ")";
    throw ConfigError(os.str());
}

PupilSetting DofTable::setting(double pupil_mm) const {
    return PupilSetting{pupil_mm, dof_fwhm(pupil_mm)};
}

std::vector<double> iterate_focal_planes_diopter(const AccommodationModel& model,
                                                 const DofTable& dof, double age,
                                                 double pupil_mm,
                                                 double z_stop_m) {
    if (!(z_stop_m > 0.0))
        throw DomainError("iterate_focal_planes: z_stop must be positive");
    const double step = dof.dof_fwhm(pupil_mm);
    const double d_stop = depth_to_diopter(z_stop_m);
    std::vector<double> planes;
    // Small slack so that an amplitude landing exactly on d_stop (up to
    // floating-point rounding) still yields that final plane.
    for (double d = model.max_accommodation(age); d >= d_stop - 1e-9; d -= step)
        planes.push_back(d);
    return planes;
}

std::vector<double> iterate_focal_planes(const AccommodationModel& model,
                                         const DofTable& dof, double age,
                                         double pupil_mm, double z_stop_m) {
    std::vector<double> planes =
        iterate_focal_planes_diopter(model, dof, age, pupil_mm, z_stop_m);
    std::vector<double> cm;
    cm.reserve(planes.size());
    // Diopter planes descend from the amplitude, so the distances ascend.
    for (double d : planes) cm.push_back(100.0 * diopter_to_depth(d));
    return cm;
}

}  // namespace depthalloc
