#include <doctest.h>

#include <dyadic/errors.hpp>
#include <dyadic/generators.hpp>

#include <set>

using namespace dyadic;

TEST_CASE("cantor endpoints") {
    const MetricSpace s = cantor(1.0 / 3.0, 2);
    REQUIRE(s.size() == 4);
    const double expect[] = {0.0, 2.0 / 9.0, 2.0 / 3.0, 8.0 / 9.0};
    for (int i = 0; i < 4; ++i) CHECK(s.coords()(i, 0) == doctest::Approx(expect[i]));
    CHECK_THROWS_AS(cantor(0.5, 3), InvalidArgument);
    CHECK(cantor(0.25, 0).size() == 1);
}

TEST_CASE("sequence points") {
    const MetricSpace s = sequence(1.0, 4);
    REQUIRE(s.size() == 5);
    const double expect[] = {0.0, 1.0, 0.5, 1.0 / 3.0, 0.25};
    for (int i = 0; i < 5; ++i) CHECK(s.coords()(i, 0) == doctest::Approx(expect[i]));
    CHECK(sequence(2.0, 3).coords()(2, 0) == doctest::Approx(0.25));
}

TEST_CASE("grid lattice") {
    const MetricSpace g = grid(2, 0.5);
    REQUIRE(g.size() == 9);
    CHECK(g.coords()(0, 0) == 0.0);
    CHECK(g.coords()(1, 1) == 0.5);
    CHECK(g.coords()(8, 0) == 1.0);
    CHECK_THROWS_AS(grid(1, 0.3), InvalidArgument);
    CHECK_THROWS_AS(grid(0, 0.5), InvalidArgument);
}

TEST_CASE("ultrametric cantor strings") {
    const MetricSpace s = ultrametric_cantor(2, 1.0 / 16.0, 3);
    REQUIRE(s.size() == 8);
    CHECK(s.symbols().front() == "000");
    CHECK(s.symbols().back() == "111");
    std::set<double> dists;
    for (PointId p = 0; p < 8; ++p)
        for (PointId q = p + 1; q < 8; ++q) dists.insert(s.distance(p, q));
    CHECK(dists == std::set<double>{1.0 / 256.0, 1.0 / 16.0, 1.0});
    CHECK_THROWS_AS(ultrametric_cantor(11, 0.5, 2), InvalidArgument);
}

TEST_CASE("ifs orbit reproduces the cantor set") {
    SimilarityMap left, right;
    left.ratio = right.ratio = 1.0 / 3.0;
    left.translation = Eigen::VectorXd::Zero(1);
    right.translation = Eigen::VectorXd::Constant(1, 2.0 / 3.0);
    const MetricSpace s = ifs({left, right}, 5);
    const MetricSpace c = cantor(1.0 / 3.0, 5);
    REQUIRE(s.size() == c.size());
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(s.size()); ++i)
        CHECK(s.coords()(i, 0) == doctest::Approx(c.coords()(i, 0)));
}

TEST_CASE("ifs merges duplicate images") {
    SimilarityMap a, b;
    a.ratio = b.ratio = 0.5;
    a.translation = b.translation = Eigen::VectorXd::Zero(2);
    CHECK(ifs({a, b}, 4).size() == 1);

    SimilarityMap bad = a;
    bad.ratio = 1.5;
    CHECK_THROWS_AS(ifs({bad}, 2), InvalidArgument);
    SimilarityMap skew = a;
    skew.rotation = Eigen::MatrixXd::Identity(2, 2) * 2.0;
    CHECK_THROWS_AS(ifs({skew}, 2), InvalidArgument);
}

TEST_CASE("size cap is enforced before allocation") {
    CHECK_THROWS_AS(cantor(1.0 / 3.0, 30), SizeError);
    CHECK_THROWS_AS(grid(3, 1.0 / 128.0), SizeError);
    CHECK_THROWS_AS(ultrametric_cantor(10, 0.05, 7), SizeError);
}

TEST_CASE("generate dispatches on kind") {
    GeneratorSpec spec;
    spec.kind = generator_kind_from_string("sequence");
    spec.p = 0.5;
    spec.n_max = 9;
    const MetricSpace s = generate(spec);
    CHECK(s.size() == 10);
    CHECK(s.coords()(4, 0) == doctest::Approx(0.5));
    CHECK(to_string(GeneratorKind::UltrametricCantor) == "ultrametric_cantor");
    CHECK_THROWS_AS(generator_kind_from_string("fern"), InvalidArgument);
}

TEST_CASE("snowflake wrap") {
    const MetricSpace g = grid(1, 0.25);
    const MetricSpace same = snowflake_wrap(g, 1.0);
    for (PointId p = 0; p < 5; ++p)
        for (PointId q = 0; q < 5; ++q) CHECK(same.distance(p, q) == doctest::Approx(g.distance(p, q)));
    CHECK(snowflake_wrap(g, 0.5).distance(0, 1) == doctest::Approx(0.5));
    CHECK_THROWS_AS(snowflake_wrap(g, 0.0), InvalidArgument);
    CHECK_THROWS_AS(snowflake_wrap(g, 1.5), InvalidArgument);
}

TEST_CASE("generated spaces are doubling with modest constants") {
    for (const MetricSpace& s : {cantor(1.0 / 3.0, 8), grid(2, 1.0 / 16.0), sequence(1.0, 500),
                                 ultrametric_cantor(2, 1.0 / 16.0, 6)})
        CHECK(estimate_doubling(s, 200, 1).C_d_hat <= 64);
}
