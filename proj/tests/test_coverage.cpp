#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "depthalloc/hypograph.hpp"

using namespace depthalloc;

namespace {

// Build a unit-weight pixel matrix from explicit 0/1 rows.
HypographMatrix from_rows(const std::vector<std::vector<int>>& rows, int n) {
    HypographMatrix m;
    m.n = n;
    for (const auto& row : rows) {
        Pattern p;
        for (int i = 0; i < n; ++i)
            if (row[i]) p.set(i);
        if (p.empty()) {
            m.zero_weight += 1.0;
        } else {
            m.rows.push_back(p);
            m.pixel_weights.push_back(1.0);
        }
        ++m.pixel_total;
    }
    return m;
}

}  // namespace

TEST_CASE("pattern bit operations") {
    Pattern p;
    CHECK(p.empty());
    p.set(0);
    p.set(63);
    p.set(64);
    p.set(200);
    CHECK(p.count() == 4);
    CHECK(p.test(64));
    CHECK_FALSE(p.test(1));
    CHECK(p.indices(256) == std::vector<int>{0, 63, 64, 200});

    Pattern q;
    q.set(64);
    CHECK(p.intersects(q));
    q = Pattern{};
    q.set(65);
    CHECK_FALSE(p.intersects(q));
    CHECK(p.hash() != q.hash());
    Pattern p2 = p;
    CHECK(p == p2);
    CHECK(p.hash() == p2.hash());
}

TEST_CASE("condensing the worked 6x3 example") {
    // Six pixel rows over three planes condense to three distinct patterns
    // with multiplicities 3, 2, 1 in first-occurrence order.
    const HypographMatrix m = from_rows({{1, 1, 0},
                                         {0, 1, 0},
                                         {0, 1, 0},
                                         {1, 1, 0},
                                         {1, 1, 0},
                                         {1, 1, 1}},
                                        3);
    const CondensedMatrix c = condense(m);
    REQUIRE(c.rows() == 3);
    CHECK(c.mult == std::vector<long long>{3, 2, 1});
    CHECK(c.u == std::vector<double>{3.0, 2.0, 1.0});

    const std::vector<std::vector<long long>> expected = {
        {3, 3, 0}, {0, 2, 0}, {1, 1, 1}};
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i) CHECK(c.entry(j, i) == expected[j][i]);

    CHECK(c.total_weight() == 6.0);
    CHECK(c.zero_mult == 0);

    const auto sup = c.column_supports();
    REQUIRE(sup.size() == 3);
    CHECK(sup[0] == std::vector<int>{0, 2});
    CHECK(sup[1] == std::vector<int>{0, 1, 2});
    CHECK(sup[2] == std::vector<int>{2});
}

TEST_CASE("covered weight and coverage error on the worked example") {
    const HypographMatrix m = from_rows({{1, 1, 0},
                                         {0, 1, 0},
                                         {0, 1, 0},
                                         {1, 1, 0},
                                         {1, 1, 0},
                                         {1, 1, 1}},
                                        3);
    const CondensedMatrix c = condense(m);

    Pattern sel0;
    sel0.set(0);
    CHECK(covered_weight(c, sel0, c.u) == 4.0);
    CHECK(coverage_error(sel0, c, c.total_weight()) ==
          doctest::Approx(1.0 / 3.0));

    Pattern sel1;
    sel1.set(1);
    CHECK(covered_weight(c, sel1, c.u) == 6.0);
    CHECK(coverage_error(sel1, c, c.total_weight()) == doctest::Approx(0.0));

    Pattern sel2;
    sel2.set(2);
    CHECK(covered_weight(c, sel2, c.u) == 1.0);

    CHECK(coverage_error(Pattern{}, c, c.total_weight()) ==
          doctest::Approx(1.0));
}

TEST_CASE("zero-weight pixels are conserved, not materialized") {
    const HypographMatrix m =
        from_rows({{0, 0}, {1, 0}, {0, 0}, {0, 1}}, 2);
    CHECK(m.rows.size() == 2);
    CHECK(m.zero_weight == 2.0);
    CHECK(m.pixel_total == 4);
    CHECK(m.total_weight() == 4.0);

    const CondensedMatrix c = condense(m);
    CHECK(c.rows() == 2);
    CHECK(c.zero_weight == 2.0);
    CHECK(c.total_weight() == 4.0);
}

TEST_CASE("rasterization height rule: half-up rounding of v*H") {
    // One handcrafted knoll on a 1-row, 4-column, 10-bin grid with uniform
    // column measure: the covered bin count per column is floor(v*H + 0.5),
    // clamped to H.
    const Grid g = Grid::make(0.0 + 1.0, 2.0, 4, 1, 10, Measure::kUniform);
    KnollTrain train;
    train.d_min = 1.0;
    train.d_max = 2.0;
    train.spacing = 1.0;
    Knoll k;
    k.center = 1.5;
    k.sigma = 1.0;
    k.values = {0.0, 0.3, 0.55, 1.0};
    train.knolls.push_back(k);

    const HypographMatrix m = rasterize(train, g);
    // Expected covered bins: 0, 3, 6, 10 -> 19 nonzero pixels.
    CHECK(m.rows.size() == 19);
    CHECK(m.pixel_total == 40);
    // Every pixel weight is col_measure / H = 0.25 / 10.
    for (double w : m.pixel_weights) CHECK(w == doctest::Approx(0.025));
    CHECK(m.total_weight() == doctest::Approx(g.total_measure()));
    CHECK(m.zero_weight == doctest::Approx(0.025 * 21));
}

TEST_CASE("fused rasterize+condense matches the two-stage pipeline") {
    AccommodationModel model;
    const Grid g = Grid::make(0.5, 7.08, 96, 9, 16, Measure::kDepth);
    const KnollTrain train = build_train(0.5, 7.08, 0.47, 0.70, model, g);

    AgeDistribution age;
    age.kind = AgeDistribution::Kind::kGamma;
    DepthEmphasis depth{DepthEmphasis::Kind::kGaussianDiopter, 1.5, 0.5};
    const WeightField field = build_weight_field(age, depth, g);

    const CondensedMatrix two_stage = condense(rasterize(train, g, &field));
    const CondensedProblem fused = rasterize_condensed(train, g, model, &field);

    REQUIRE(fused.m.rows() == two_stage.rows());
    for (int j = 0; j < fused.m.rows(); ++j) {
        CHECK(fused.m.patterns[j] == two_stage.patterns[j]);
        CHECK(fused.m.mult[j] == two_stage.mult[j]);
        CHECK(fused.m.u[j] == doctest::Approx(two_stage.u[j]).epsilon(1e-12));
    }
    CHECK(fused.m.zero_mult == two_stage.zero_mult);
    CHECK(fused.m.zero_weight ==
          doctest::Approx(two_stage.zero_weight).epsilon(1e-12));

    // The evaluation weights are the solver weights restricted to the
    // achievable region, so they can never exceed them.
    REQUIRE(fused.u_eval.size() == fused.m.u.size());
    double eval_sum = 0.0;
    for (size_t j = 0; j < fused.u_eval.size(); ++j) {
        CHECK(fused.u_eval[j] >= 0.0);
        CHECK(fused.u_eval[j] <= fused.m.u[j] + 1e-12);
        eval_sum += fused.u_eval[j];
    }
    CHECK(eval_sum <= fused.total_eval + 1e-9);
    CHECK(fused.total_eval <= two_stage.total_weight() + 1e-9);
}

TEST_CASE("fused path without a weight field uses the raw box measure") {
    AccommodationModel model;
    const Grid g = Grid::make(0.5, 7.08, 64, 1, 8, Measure::kDepth);
    const KnollTrain train = build_train(0.5, 7.08, 1.0, 0.70, model, g);
    const CondensedMatrix two_stage = condense(rasterize(train, g));
    const CondensedProblem fused = rasterize_condensed(train, g, model);
    REQUIRE(fused.m.rows() == two_stage.rows());
    for (int j = 0; j < fused.m.rows(); ++j) {
        CHECK(fused.m.patterns[j] == two_stage.patterns[j]);
        CHECK(fused.m.u[j] == doctest::Approx(two_stage.u[j]).epsilon(1e-12));
    }
}

TEST_CASE("intrinsic quantization error at the reference anchors") {
    AccommodationModel model;
    DofTable dof;
    CHECK(intrinsic_error(model, dof, 3.0, 0.5, 7.08) ==
          doctest::Approx(0.174090).epsilon(1e-4));
    CHECK(intrinsic_error(model, dof, 2.0, 0.5, 7.08) ==
          doctest::Approx(0.179193).epsilon(1e-4));
    CHECK(intrinsic_error(model, dof, 3.0, 0.09, 7.08) ==
          doctest::Approx(0.386546).epsilon(1e-4));
}

TEST_CASE("trains wider than the pattern capacity are rejected") {
    AccommodationModel model;
    const Grid g = Grid::make(0.5, 7.08, 8, 1, 4, Measure::kDepth);
    const KnollTrain train =
        build_train(0.5, 7.08, (7.08 - 0.5) / 300.0, 0.70, model, g);
    REQUIRE(train.size() == 301);
    CHECK_THROWS_AS(rasterize(train, g), DomainError);
    CHECK_THROWS_AS(rasterize_condensed(train, g, model), DomainError);
}
