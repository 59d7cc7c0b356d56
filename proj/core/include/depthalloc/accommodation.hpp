#pragma once

#include <map>
#include <vector>

#include "depthalloc/errors.hpp"

namespace depthalloc {

// Sigmoidal accommodation-amplitude decay with age. The literature anchors
// only behaviors (plane counts at two ages, headline plane positions); the
// coefficients below are calibrated against those anchors and frozen.
struct AccommodationModel {
    double amplitude_max = 10.780222746031445;  // diopters
    double midpoint_age = 30.089521485948524;   // years
    double slope = 0.1043359799014345;          // 1/years
    double rest_offset_d = 0.0;                 // added to every amplitude

    // Maximum accommodative amplitude at the given age, in diopters.
    double max_accommodation(double age) const;
};

// Depth-of-field FWHM per pupil diameter, in diopters. 6 mm is the measured
// 0.15 D anchor; 3 mm and 2 mm are calibration-frozen defaults, overridable.
struct PupilSetting {
    double diameter_mm = 3.0;
    double dof_fwhm_d = 0.70;
};

class DofTable {
  public:
    DofTable();  // installs the frozen defaults {2: 0.76, 3: 0.70, 6: 0.15}
    // Override or add an entry (config hook).
    void set(double pupil_mm, double fwhm_d);
    // FWHM for a supported diameter; throws ConfigError otherwise.
    double dof_fwhm(double pupil_mm) const;
    PupilSetting setting(double pupil_mm) const;

  private:
    std::map<double, double> fwhm_;
};

// Iterative monocular quantization: the first focal plane sits at the
// accommodation amplitude; each next plane is one DoF step farther (in
// diopters); iteration stops once the plane distance exceeds z_stop.
// Returns plane distances in cm, strictly increasing.
std::vector<double> iterate_focal_planes(const AccommodationModel& model,
                                         const DofTable& dof, double age,
                                         double pupil_mm, double z_stop_m);

// Same planes expressed in diopters, descending (construction order).
std::vector<double> iterate_focal_planes_diopter(const AccommodationModel& model,
                                                 const DofTable& dof, double age,
                                                 double pupil_mm, double z_stop_m);

}  // namespace depthalloc
