#include <doctest.h>

#include <dyadic/dimensions.hpp>
#include <dyadic/errors.hpp>
#include <dyadic/generators.hpp>

#include <cmath>
#include <numeric>

using namespace dyadic;

namespace {

IdList all_of(const MetricSpace& s) {
    IdList ids(s.size());
    std::iota(ids.begin(), ids.end(), 0);
    return ids;
}

AdjacentFamily family_of(const MetricSpace& s, std::uint64_t seed = 1) {
    FamilyOptions fo;
    fo.seed = seed;
    return build_adjacent_family(s, CubeParams{}, fo);
}

}  // namespace

TEST_CASE("line fit") {
    const std::vector<double> x{0, 1, 2, 3}, y{1, 3, 5, 7};
    const LineFit f = fit_line(x, y);
    CHECK(f.slope == doctest::Approx(2.0));
    CHECK(f.intercept == doctest::Approx(1.0));
    CHECK(f.residual == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(f.points == 4);
    CHECK_THROWS_AS(fit_line(std::vector<double>{1}, std::vector<double>{2}), InsufficientScales);
}

TEST_CASE("cubic measure of a singleton") {
    const CubeSystem sys = build_system(cantor(1.0 / 3.0, 5), CubeParams{}, 1);
    const MeasureValue v = cubic_measure(sys, IdList{4}, 0.0, measure_radius(sys, 0));
    CHECK(v.value == 1.0);
}

TEST_CASE("cubic measure on the ultrametric space") {
    const CubeSystem sys = build_system(ultrametric_cantor(2, 1.0 / 16.0, 8), CubeParams{}, 1);
    const IdList E = all_of(sys.space());
    CHECK(deepest_informative_level(sys, E) == 7);
    // 2^m cylinders of diameter 16^-m: every level sums to one.
    for (int j = 0; j <= 7; ++j) CHECK(cubic_measure(sys, E, 0.25, measure_radius(sys, j)).value == doctest::Approx(1.0));
    // At s = 1/2 the level sum is 2^-m, so the infimum sits on the deepest
    // level allowed.
    const MeasureValue half = cubic_measure(sys, E, 0.5, measure_radius(sys, 0), MeasureOptions{6});
    CHECK(half.value == doctest::Approx(1.0 / 64.0));
    CHECK(half.m_star == 6);
    CHECK(half.saturated);
    CHECK_THROWS_AS(cubic_measure(sys, E, 0.5, measure_radius(sys, 20)), ScaleExhausted);
}

TEST_CASE("hausdorff estimates") {
    const MetricSpace one = MetricSpace::euclidean(Eigen::MatrixXd::Zero(1, 1));
    CHECK(hausdorff_dim_estimate(build_system(one, CubeParams{}, 1), IdList{0}).value == 0.0);

    const CubeSystem u = build_system(ultrametric_cantor(2, 1.0 / 16.0, 8), CubeParams{}, 1);
    const DimensionEstimate hu = hausdorff_dim_estimate(u, all_of(u.space()));
    CHECK(hu.value == doctest::Approx(0.25).epsilon(0.02 / 0.25));
    CHECK(hu.window_unit == "r");
    CHECK_FALSE(hu.diagnostics.empty());

    const CubeSystem c = build_system(cantor(1.0 / 3.0, 12), CubeParams{}, 1);
    const DimensionEstimate hc = hausdorff_dim_estimate(c, all_of(c.space()));
    CHECK(std::abs(hc.value - std::log(2.0) / std::log(3.0)) <= 0.05);
}

TEST_CASE("box estimates") {
    const MetricSpace u = ultrametric_cantor(2, 1.0 / 16.0, 8);
    const DimensionEstimate bu = box_dim_estimate(family_of(u), all_of(u));
    CHECK(std::abs(bu.value - 0.25) <= 0.01);
    CHECK(bu.window_unit == "m");
    CHECK(bu.window_hi - bu.window_lo >= 2);

    const MetricSpace one = MetricSpace::euclidean(Eigen::MatrixXd::Zero(1, 1));
    CHECK(box_dim_estimate(family_of(one), IdList{0}).value == 0.0);

    const MetricSpace f1 = sequence(1.0, 10000);
    CHECK(std::abs(box_dim_estimate(family_of(f1), all_of(f1)).value - 0.5) <= 0.07);
}

TEST_CASE("box estimate errors") {
    const MetricSpace c = cantor(1.0 / 3.0, 8);
    const AdjacentFamily fam = family_of(c);
    // Points near 1 are outside a small ball around 0.
    CHECK_THROWS_AS(box_dim_estimate(fam, all_of(c), 0, 0.1), InvalidArgument);
    BoxOptions narrow;
    narrow.m_lo = 1;
    narrow.m_hi = 2;
    CHECK_THROWS_AS(box_dim_estimate(fam, all_of(c), narrow), InsufficientScales);

    // Two levels only: too shallow for a three-scale window.
    const MetricSpace g = grid(2, 1.0 / 64.0);
    CHECK_THROWS_AS(box_dim_estimate(family_of(g), all_of(g)), InsufficientScales);
}

TEST_CASE("spectrum on the homogeneous ultrametric space is flat") {
    const MetricSpace u = ultrametric_cantor(2, 1.0 / 16.0, 8);
    const LocalSweep sw = local_sweep(family_of(u), all_of(u));
    for (int i = 1; i <= 9; ++i) {
        const DimensionEstimate e = spectrum_from_sweep(sw, 0.1 * i);
        CHECK(e.value >= 0.23);
        CHECK(e.value <= 0.27);
        REQUIRE(e.theta.has_value());
        CHECK(*e.theta == doctest::Approx(0.1 * i));
    }
    CHECK(assouad_from_sweep(sw).value == doctest::Approx(0.25).epsilon(0.02 / 0.25));
    CHECK_THROWS_AS(spectrum_from_sweep(sw, 1.0), InvalidArgument);
    CHECK_THROWS_AS(spectrum_from_sweep(sw, 0.0), InvalidArgument);
}

TEST_CASE("spectrum is monotone and bounded by the assouad estimate") {
    const MetricSpace f1 = sequence(1.0, 3000);
    const LocalSweep sw = local_sweep(family_of(f1), all_of(f1));
    double prev = 0.0;
    for (double theta : {0.2, 0.4, 0.6, 0.8}) {
        const double v = spectrum_from_sweep(sw, theta).value;
        CHECK(v >= prev - 0.02);
        prev = v;
    }
    CHECK(assouad_from_sweep(sw).value >= prev - 1e-12);
}

TEST_CASE("spectrum reports the binding constraint") {
    const MetricSpace g = grid(1, 1.0 / 1024.0);
    const LocalSweep sw = local_sweep(family_of(g), all_of(g));
    try {
        (void)assouad_from_sweep(sw);
    } catch (const InsufficientScales& e) {
        const std::string what = e.what();
        CHECK(what.find("C_tilde") != std::string::npos);
        CHECK(what.find("deepest available m") != std::string::npos);
    }
}

TEST_CASE("sweep centers and CSV") {
    const MetricSpace s = sequence(1.0, 2000);
    const IdList centers = sweep_centers(s, all_of(s), 100, 5);
    CHECK(centers.size() >= 100);
    CHECK(centers.size() <= 102);
    CHECK(std::find(centers.begin(), centers.end(), 0) != centers.end());  // the point 0
    CHECK(std::find(centers.begin(), centers.end(), 1) != centers.end());  // the point 1

    const MetricSpace u = ultrametric_cantor(2, 1.0 / 16.0, 4);
    const LocalSweep sw = local_sweep(family_of(u), all_of(u));
    const std::string csv = sweep_csv(sw);
    CHECK(csv.rfind("x_id,R,system_id,L_R,m,D\n", 0) == 0);
}

TEST_CASE("threaded sweeps match the serial sweep") {
    const MetricSpace s = cantor(1.0 / 3.0, 8);
    const AdjacentFamily fam = family_of(s);
    SweepOptions serial, threaded;
    threaded.threads = 3;
    CHECK(sweep_csv(local_sweep(fam, all_of(s), serial)) == sweep_csv(local_sweep(fam, all_of(s), threaded)));
}

TEST_CASE("cubic and greedy sums agree on the ultrametric space") {
    const CubeSystem sys = build_system(ultrametric_cantor(2, 1.0 / 16.0, 6), CubeParams{}, 1);
    const Comparability c = compare_with_greedy(sys, all_of(sys.space()), 0.25);
    CHECK(c.lower_bound_holds);
    CHECK(c.C == doctest::Approx(1.0));
    CHECK(c.spread == doctest::Approx(1.0));
    CHECK(c.rows.size() == 6);
}
