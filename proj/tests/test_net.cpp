#include <doctest.h>

#include <dyadic/errors.hpp>
#include <dyadic/generators.hpp>
#include <dyadic/net.hpp>

#include <algorithm>

using namespace dyadic;

TEST_CASE("parameter constraint") {
    CHECK_NOTHROW(CubeParams{}.validate());
    CHECK_THROWS_AS((CubeParams{0.2, 1.0, 1.0}.validate()), ConfigError);
    try {
        CubeParams{0.2, 1.0, 1.0}.validate();
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("2.4") != std::string::npos);
    }
    CHECK_THROWS_AS((CubeParams{1.0 / 16.0, 2.0, 1.0}.validate()), ConfigError);
    CHECK_THROWS_AS((CubeParams{0.0, 1.0, 1.0}.validate()), ConfigError);
}

TEST_CASE("single point is its own net") {
    const MetricSpace one = MetricSpace::euclidean(Eigen::MatrixXd::Zero(1, 1));
    for (int k : {0, 3}) CHECK(build_net(one, k, CubeParams{}, 5).centers == IdList{0});
}

TEST_CASE("unit interval grid at level 1") {
    // A maximal 1/16-separated subset of [0, 1] leaves gaps below 1/8, so
    // it has between 9 and 17 points whatever the visiting order.
    const MetricSpace s = grid(1, 1.0 / 256.0);
    REQUIRE(s.size() == 257);
    for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
        const NetLevel net = build_net(s, 1, CubeParams{}, seed);
        CHECK(net.centers.size() >= 9);
        CHECK(net.centers.size() <= 17);
        CHECK(std::is_sorted(net.centers.begin(), net.centers.end()));
        const NetVerification v = verify_net(s, net);
        CHECK(v.separation_ok);
        CHECK(v.covering_ok);
        CHECK(v.worst_covering_ratio <= 1.0);
        CHECK(v.worst_separation_ratio >= 1.0);
    }
}

TEST_CASE("ultrametric net at level 2 under the root normalisation") {
    // Raw thresholds are c0 delta^k / scale with scale 1/2: strings sharing a
    // length-2 prefix are within 16^-2 < 2 * 16^-2, distinct prefixes are
    // at least 16^-1 apart.
    const MetricSpace s = ultrametric_cantor(2, 1.0 / 16.0, 4);
    const NetLevel net = build_net(s, 2, CubeParams{}, 9, 0.5);
    REQUIRE(net.centers.size() == 4);
    std::vector<std::string> prefixes;
    for (PointId c : net.centers) prefixes.push_back(s.symbols()[static_cast<std::size_t>(c)].substr(0, 2));
    std::sort(prefixes.begin(), prefixes.end());
    CHECK(prefixes == std::vector<std::string>{"00", "01", "10", "11"});
}

TEST_CASE("handcrafted net violating separation") {
    const MetricSpace s = grid(1, 1.0 / 256.0);
    NetLevel net = build_net(s, 1, CubeParams{}, 1);
    net.centers = {0, 8};  // 8/256 = delta / 2 apart
    const NetVerification v = verify_net(s, net);
    CHECK_FALSE(v.separation_ok);
    CHECK(v.worst_separation_ratio == doctest::Approx(0.5));
    CHECK_FALSE(v.covering_ok);
}

TEST_CASE("nets are reproducible from the seed") {
    const MetricSpace s = cantor(1.0 / 3.0, 8);
    CHECK(build_net(s, 2, CubeParams{}, 17).centers == build_net(s, 2, CubeParams{}, 17).centers);
    CHECK(shuffled_order(50, 3) == shuffled_order(50, 3));
    CHECK(shuffled_order(50, 3) != shuffled_order(50, 4));
}

TEST_CASE("verify_net rejects a net from another space") {
    const NetLevel net = build_net(grid(1, 1.0 / 8.0), 0, CubeParams{}, 1);
    CHECK_THROWS_AS(verify_net(grid(1, 1.0 / 4.0), net), InvalidArgument);
}
