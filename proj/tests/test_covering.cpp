#include <doctest.h>

#include <dyadic/covering.hpp>
#include <dyadic/errors.hpp>
#include <dyadic/generators.hpp>

#include <cmath>
#include <numeric>

using namespace dyadic;

namespace {

MetricSpace line(std::vector<double> xs) {
    Eigen::MatrixXd c(static_cast<Eigen::Index>(xs.size()), 1);
    for (std::size_t i = 0; i < xs.size(); ++i) c(static_cast<Eigen::Index>(i), 0) = xs[i];
    return MetricSpace::euclidean(std::move(c));
}

IdList all_of(const MetricSpace& s) {
    IdList ids(s.size());
    std::iota(ids.begin(), ids.end(), 0);
    return ids;
}

AdjacentFamily family_of(const MetricSpace& s) {
    FamilyOptions fo;
    fo.query_budget = 200;
    return build_adjacent_family(s, CubeParams{}, fo);
}

}  // namespace

TEST_CASE("greedy cover counts") {
    const MetricSpace s = line({0.0, 0.25, 0.5, 0.75, 1.0});
    const IdList E = all_of(s);
    CHECK(greedy_cover_count(s, IdList{3}, 0.1) == 1);
    CHECK(greedy_cover_count(s, E, 1.0) == 1);
    // Sets of diameter <= 0.3 hold at most two neighbours: {0, 1/4},
    // {1/2, 3/4}, {1}.
    const GreedyCover g = greedy_cover(s, E, 0.3);
    CHECK(g.clusters.size() == 3);
    CHECK(g.anchors == IdList{0, 2, 4});
    CHECK(exact_cover_count(s, E, 0.3) == 3);
    CHECK_THROWS_AS(greedy_cover_count(s, IdList{}, 0.3), InvalidArgument);
}

TEST_CASE("greedy clusters respect the diameter bound in the plane") {
    const MetricSpace s = grid(2, 1.0 / 16.0);
    const GreedyCover g = greedy_cover(s, all_of(s), 0.2);
    std::size_t total = 0;
    for (const IdList& c : g.clusters) {
        CHECK(s.diameter(c) <= 0.2 + 1e-12);
        total += c.size();
    }
    CHECK(total == s.size());
}

TEST_CASE("exact cover oracle") {
    CHECK(exact_cover_count(line({0.3}), IdList{0}, 0.1) == 1);
    const MetricSpace three = line({0.0, 0.5, 1.0});
    CHECK(exact_cover_count(three, all_of(three), 0.6) == 2);

    const MetricSpace c4 = cantor(1.0 / 3.0, 4);
    CHECK(exact_cover_count(c4, all_of(c4), 1.0 / 9.0) == 4);

    const MetricSpace big = grid(1, 1.0 / 40.0);
    CHECK_FALSE(exact_cover_count(big, all_of(big), 0.11).has_value());
    ExactOptions wide;
    wide.size_cap = 64;
    // Five consecutive points per set: ceil(41 / 5) = 9.
    CHECK(exact_cover_count(big, all_of(big), 0.11, wide) == 9);
}

TEST_CASE("exact never exceeds greedy") {
    const MetricSpace s = cantor(1.0 / 3.0, 4);
    const IdList E = all_of(s);
    for (double r : {0.01, 0.05, 0.12, 0.3, 0.7})
        CHECK(*exact_cover_count(s, E, r) <= greedy_cover_count(s, E, r));
}

TEST_CASE("dyadic counts on the ultrametric whole space") {
    const MetricSpace s = ultrametric_cantor(2, 1.0 / 16.0, 6);
    const AdjacentFamily fam = family_of(s);
    const IdList E = all_of(s);
    for (int m = 0; m <= 6; ++m) CHECK(dyadic_cover_count(fam, E, 0, 2.0, m).D == (1L << m));
    CHECK(dyadic_cover_count(fam, IdList{5}, 0, 2.0, 3).D == 1);
}

TEST_CASE("dyadic counts on the Cantor set grow like the similarity dimension") {
    const MetricSpace s = cantor(1.0 / 3.0, 12);
    const AdjacentFamily fam = family_of(s);
    const double dim = std::log(2.0) / std::log(3.0);
    const auto mask = membership_mask(s, all_of(s));
    const LocalCounts lc = local_counts(fam, mask, 0, 2.0);
    REQUIRE(lc.counts.size() >= 4);
    for (std::size_t m = 1; m + 1 < lc.counts.size(); ++m) {
        const double model = std::pow(16.0, static_cast<double>(m) * dim);
        CHECK(lc.counts[m] >= model / 4.0);
        CHECK(lc.counts[m] <= model * 4.0);
    }
}

TEST_CASE("sandwich check examples") {
    const MetricSpace s = ultrametric_cantor(2, 1.0 / 16.0, 4);
    const AdjacentFamily fam = family_of(s);
    const CoverReport one = sandwich_check(fam, IdList{3}, 3, 2.0, 1);
    CHECK(one.D == 1);
    CHECK(one.N_exact == 1);
    CHECK(one.ratio == 1.0);

    const CoverReport r = sandwich_check(fam, all_of(s), 0, 2.0, 2);
    CHECK(r.D == 4);
    REQUIRE(r.N_exact.has_value());
    CHECK(*r.N_exact <= 4);
    CHECK_FALSE(r.violation());
}

TEST_CASE("no covering inequality violations on the Cantor set") {
    const MetricSpace s = cantor(1.0 / 3.0, 8);
    const AdjacentFamily fam = family_of(s);
    const SandwichSweep sw = sandwich_sweep(fam, all_of(s), 100, 11);
    CHECK(sw.reports.size() == 100);
    CHECK(sw.violations == 0);
    CHECK(std::isfinite(sw.M0_hat));
    CHECK(sw.M0_hat >= 1.0);
}

TEST_CASE("cover report CSV") {
    const MetricSpace s = ultrametric_cantor(2, 1.0 / 16.0, 3);
    const AdjacentFamily fam = family_of(s);
    const CoverReport r = sandwich_check(fam, all_of(s), 0, 2.0, 1);
    CHECK(cover_csv_header() == "x_id,R,m,D,N_greedy,N_exact,r_effective,ratio");
    const std::string row = to_csv_row(r);
    CHECK(std::count(row.begin(), row.end(), ',') == 7);
}
