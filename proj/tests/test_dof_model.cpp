#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "depthalloc/accommodation.hpp"
#include "depthalloc/knoll.hpp"
#include "depthalloc/units.hpp"

using namespace depthalloc;

TEST_CASE("accommodation sigmoid hits its calibration anchors") {
    AccommodationModel m;
    // The frozen coefficients were fitted to these amplitude anchors.
    CHECK(m.max_accommodation(10.0) == doctest::Approx(9.6).epsilon(1e-6));
    CHECK(m.max_accommodation(50.0) == doctest::Approx(1.2).epsilon(1e-6));
    CHECK(m.max_accommodation(70.0) == doctest::Approx(0.165).epsilon(1e-6));
}

TEST_CASE("accommodation amplitude decreases with age and stays positive") {
    AccommodationModel m;
    double prev = m.max_accommodation(0.0);
    for (double age = 1.0; age <= 120.0; age += 1.0) {
        const double a = m.max_accommodation(age);
        CHECK(a > 0.0);
        CHECK(a < prev);
        prev = a;
    }
    CHECK_THROWS_AS(m.max_accommodation(-1.0), DomainError);
    CHECK_THROWS_AS(m.max_accommodation(200.0), DomainError);
}

TEST_CASE("rest offset shifts every amplitude uniformly") {
    AccommodationModel m;
    AccommodationModel shifted = m;
    shifted.rest_offset_d = 0.25;
    for (double age : {10.0, 40.0, 70.0})
        CHECK(shifted.max_accommodation(age) ==
              doctest::Approx(m.max_accommodation(age) + 0.25));
}

TEST_CASE("DoF table defaults, overrides, and unknown-pupil rejection") {
    DofTable t;
    CHECK(t.dof_fwhm(2.0) == doctest::Approx(0.76));
    CHECK(t.dof_fwhm(3.0) == doctest::Approx(0.70));
    CHECK(t.dof_fwhm(6.0) == doctest::Approx(0.15));
    CHECK_THROWS_AS(t.dof_fwhm(4.0), ConfigError);

    t.set(3.0, 0.5);
    CHECK(t.dof_fwhm(3.0) == doctest::Approx(0.5));
    t.set(4.5, 0.3);
    CHECK(t.setting(4.5).dof_fwhm_d == doctest::Approx(0.3));
    CHECK_THROWS_AS(t.set(0.0, 0.5), ConfigError);
    CHECK_THROWS_AS(t.set(3.0, -0.1), ConfigError);
}

TEST_CASE("focal-plane iteration starts at the amplitude and steps by FWHM") {
    AccommodationModel m;
    DofTable dof;
    const auto planes = iterate_focal_planes_diopter(m, dof, 25.0, 3.0, 10.0);
    REQUIRE(planes.size() >= 2);
    CHECK(planes.front() == doctest::Approx(m.max_accommodation(25.0)));
    for (size_t i = 1; i < planes.size(); ++i)
        CHECK(planes[i - 1] - planes[i] == doctest::Approx(0.70));
    for (double d : planes) CHECK(d >= 0.1 - 1e-9);
    // One more step would cross the stop distance.
    CHECK(planes.back() - 0.70 < 0.1);
}

TEST_CASE("focal-plane counts at the published anchor ages (2 mm, 10 m)") {
    AccommodationModel m;
    DofTable dof;
    CHECK(iterate_focal_planes(m, dof, 10.0, 2.0, 10.0).size() == 13);
    CHECK(iterate_focal_planes(m, dof, 50.0, 2.0, 10.0).size() == 2);
}

TEST_CASE("cm planes are ascending and consistent with the diopter planes") {
    AccommodationModel m;
    DofTable dof;
    const auto d = iterate_focal_planes_diopter(m, dof, 30.0, 2.0, 10.0);
    const auto cm = iterate_focal_planes(m, dof, 30.0, 2.0, 10.0);
    REQUIRE(cm.size() == d.size());
    for (size_t i = 0; i < cm.size(); ++i)
        CHECK(cm[i] == doctest::Approx(100.0 / d[i]).epsilon(1e-12));
    for (size_t i = 1; i < cm.size(); ++i) CHECK(cm[i] > cm[i - 1]);
}

TEST_CASE("focal-plane iteration rejects invalid stop distances") {
    AccommodationModel m;
    DofTable dof;
    CHECK_THROWS_AS(iterate_focal_planes(m, dof, 30.0, 2.0, 0.0), DomainError);
    CHECK_THROWS_AS(iterate_focal_planes(m, dof, 30.0, 4.0, 10.0), ConfigError);
}

TEST_CASE("train_count covers the paper spans and exact multiples") {
    CHECK(train_count(0.5, 7.08, (7.08 - 0.5) / 150.0) == 151);
    CHECK(train_count(0.09, 7.08, 0.044) == 159);
    CHECK(train_count(0.0 + 1.0, 2.0, 0.1) == 11);  // exact multiple span
    CHECK(train_count(0.0 + 1.0, 2.05, 0.1) == 11); // partial last step
    CHECK_THROWS_AS(train_count(1.0, 1.0, 0.1), DomainError);
    CHECK_THROWS_AS(train_count(1.0, 2.0, 0.0), DomainError);
}

TEST_CASE("train profiles are Gaussians masked by unreachable amplitudes") {
    AccommodationModel m;
    const Grid g = Grid::make(0.5, 7.08, 64, 7, 8, Measure::kDepth);
    const KnollTrain train = build_train(0.5, 7.08, 0.5, 0.70, m, g);
    REQUIRE(train.size() == train_count(0.5, 7.08, 0.5));
    const double sigma = fwhm_to_sigma(0.70);

    for (int i = 0; i < train.size(); ++i) {
        const Knoll& k = train.knolls[i];
        CHECK(k.center == doctest::Approx(0.5 + 0.5 * i));
        CHECK(k.sigma == doctest::Approx(sigma));
        for (int r = 0; r < g.age_rows; ++r) {
            const bool reachable =
                m.max_accommodation(g.ages[r]) >= k.center - 1e-12;
            for (int c = 0; c < g.depth_cols; ++c) {
                const double v = k.value(g, r, c);
                if (!reachable) {
                    CHECK(v == 0.0);
                } else {
                    const double dx = g.x_centers[c] - k.center;
                    CHECK(v == doctest::Approx(std::exp(
                                   -dx * dx / (2.0 * sigma * sigma))));
                }
            }
        }
    }
}

TEST_CASE("explicit-sigma trains validate the sigma count") {
    AccommodationModel m;
    const Grid g = Grid::make(0.5, 7.08, 16, 1, 8, Measure::kDepth);
    CHECK_THROWS_AS(build_train_sigmas(0.5, 7.08, 0.5, {0.3, 0.3}, m, g),
                    DomainError);
    const int n = train_count(0.5, 7.08, 0.5);
    std::vector<double> sigmas(n, 0.3);
    CHECK(build_train_sigmas(0.5, 7.08, 0.5, sigmas, m, g).size() == n);
    sigmas[0] = 0.0;
    CHECK_THROWS_AS(build_train_sigmas(0.5, 7.08, 0.5, sigmas, m, g),
                    DomainError);
}

TEST_CASE("unit helpers") {
    CHECK(diopter_to_depth(2.0) == doctest::Approx(0.5));
    CHECK(depth_to_diopter(0.25) == doctest::Approx(4.0));
    CHECK_THROWS_AS(diopter_to_depth(0.0), DomainError);
    CHECK_THROWS_AS(depth_to_diopter(-1.0), DomainError);
    CHECK(fwhm_to_sigma(kFwhmPerSigma) == doctest::Approx(1.0));
}
