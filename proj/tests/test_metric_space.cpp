#include <doctest.h>

#include <dyadic/errors.hpp>
#include <dyadic/generators.hpp>
#include <dyadic/metric_space.hpp>

#include <cmath>
#include <numeric>

using namespace dyadic;

namespace {

MetricSpace line(std::vector<double> xs) {
    Eigen::MatrixXd c(static_cast<Eigen::Index>(xs.size()), 1);
    for (std::size_t i = 0; i < xs.size(); ++i) c(static_cast<Eigen::Index>(i), 0) = xs[i];
    return MetricSpace::euclidean(std::move(c));
}

}  // namespace

TEST_CASE("euclidean distance") {
    Eigen::MatrixXd c(2, 2);
    c << 0, 0, 3, 4;
    const MetricSpace s = MetricSpace::euclidean(c);
    CHECK(s.distance(0, 1) == doctest::Approx(5.0));
    CHECK(s.distance(1, 1) == 0.0);
    CHECK_THROWS_AS(s.distance(0, 2), InvalidArgument);
    CHECK_THROWS_AS(s.distance(-1, 0), InvalidArgument);
}

TEST_CASE("ultrametric distance is base^lcp") {
    const MetricSpace s = MetricSpace::ultrametric({"0110", "0101", "1000"}, 2, 1.0 / 16.0);
    CHECK(MetricSpace::common_prefix("0110", "0101") == 2);
    CHECK(s.distance(0, 1) == doctest::Approx(0.00390625));
    CHECK(s.distance(0, 2) == doctest::Approx(1.0));
    CHECK(s.distance(2, 2) == 0.0);
}

TEST_CASE("ultrametric rejects bad symbols") {
    CHECK_THROWS(MetricSpace::ultrametric({"012"}, 2, 0.5));
    CHECK_THROWS(MetricSpace::ultrametric({"01", "01"}, 2, 0.5));
}

TEST_CASE("matrix metric") {
    Eigen::MatrixXd d(3, 3);
    d << 0, 1, 2, 1, 0, 1.5, 2, 1.5, 0;
    const MetricSpace s = MetricSpace::from_matrix(d);
    CHECK(s.distance(0, 2) == 2.0);
    CHECK(s.diameter() == 2.0);

    Eigen::MatrixXd asym = d;
    asym(0, 1) = 0.5;
    CHECK_THROWS(MetricSpace::from_matrix(asym));
    Eigen::MatrixXd tri = d;
    tri(0, 2) = tri(2, 0) = 5.0;
    CHECK_THROWS(MetricSpace::from_matrix(tri));
}

TEST_CASE("snowflake raises distances to epsilon") {
    const MetricSpace s = line({0.0, 0.25, 1.0}).snowflake(0.5);
    CHECK(s.distance(0, 1) == doctest::Approx(0.5));
    CHECK(s.distance(0, 2) == doctest::Approx(1.0));
    CHECK(s.descriptor().kind == MetricKind::Snowflake);
    CHECK(s.descriptor().base_kind == MetricKind::Euclidean);
}

TEST_CASE("ball members are open balls in id order") {
    const MetricSpace s = line({0.0, 0.25, 0.5, 0.75, 1.0});
    CHECK(s.ball_members(2, 0.3) == IdList{1, 2, 3});
    CHECK(s.ball_members(2, 0.25) == IdList{2});
    CHECK(s.ball_members(0, 10.0) == IdList{0, 1, 2, 3, 4});

    const MetricSpace one = line({3.0});
    CHECK(one.ball_members(0, 0.1) == IdList{0});
}

TEST_CASE("ball members agree with brute force on a planar grid") {
    const MetricSpace s = grid(2, 1.0 / 16.0);
    for (PointId x : {0, 40, 144, 288}) {
        for (double r : {0.05, 0.13, 0.4}) {
            IdList brute;
            for (PointId q = 0; q < static_cast<PointId>(s.size()); ++q)
                if (s.distance(x, q) < r) brute.push_back(q);
            CHECK(s.ball_members(x, r) == brute);
        }
    }
}

TEST_CASE("diameter") {
    const MetricSpace s = line({0.0, 1.0});
    const IdList single{0};
    CHECK(s.diameter(single) == 0.0);
    CHECK(s.diameter() == 1.0);
    CHECK_THROWS_AS(s.diameter(IdList{}), InvalidArgument);

    const MetricSpace u = ultrametric_cantor(2, 1.0 / 16.0, 3);
    CHECK(u.diameter() == doctest::Approx(1.0));
}

TEST_CASE("planar diameter matches brute force") {
    const MetricSpace s = grid(2, 1.0 / 16.0);
    IdList ids;
    for (PointId p = 0; p < static_cast<PointId>(s.size()); p += 3) ids.push_back(p);
    double brute = 0.0;
    for (PointId a : ids)
        for (PointId b : ids) brute = std::max(brute, s.distance(a, b));
    CHECK(s.diameter(ids) == doctest::Approx(brute));
}

TEST_CASE("duplicate points are rejected") {
    CHECK_THROWS(line({0.0, 0.0, 0.5}));
    CHECK(line({0.0, 0.5, 0.75}).min_positive_distance() == doctest::Approx(0.25));
}

TEST_CASE("fingerprint separates point sets") {
    CHECK(line({0.0, 1.0}).fingerprint() == line({0.0, 1.0}).fingerprint());
    CHECK(line({0.0, 1.0}).fingerprint() != line({0.0, 0.5}).fingerprint());
    CHECK(line({0.0, 1.0}).fingerprint() != line({0.0, 1.0}).snowflake(0.5).fingerprint());
}

TEST_CASE("doubling estimates") {
    CHECK(estimate_doubling(line({2.0}), 50, 1).C_d_hat == 1);
    CHECK(estimate_doubling(grid(1, 1.0 / 1023.0), 200, 3).C_d_hat <= 5);
    CHECK(estimate_doubling(ultrametric_cantor(2, 1.0 / 16.0, 4), 200, 3).C_d_hat <= 16);
}
