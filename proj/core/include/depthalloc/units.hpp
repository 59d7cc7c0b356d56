#pragma once

#include "depthalloc/errors.hpp"

namespace depthalloc {

// z = 1/D. Diopters are reciprocal meters of optical distance.
inline double diopter_to_depth(double d) {
    if (!(d > 0.0)) throw DomainError("diopter_to_depth: diopter must be positive");
    return 1.0 / d;
}

inline double depth_to_diopter(double z) {
    if (!(z > 0.0)) throw DomainError("depth_to_diopter: depth must be positive");
    return 1.0 / z;
}

// FWHM of a Gaussian = 2*sqrt(2*ln 2) * sigma.
inline constexpr double kFwhmPerSigma = 2.3548200450309493;

inline double fwhm_to_sigma(double fwhm) { return fwhm / kFwhmPerSigma; }

}  // namespace depthalloc
