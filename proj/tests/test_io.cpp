#include <doctest.h>

#include <dyadic/errors.hpp>
#include <dyadic/generators.hpp>
#include <dyadic/io.hpp>

#include <cmath>

using namespace dyadic;
using nlohmann::json;

namespace {

AdjacentFamily family_of(const MetricSpace& s) {
    FamilyOptions fo;
    fo.query_budget = 100;
    return build_adjacent_family(s, CubeParams{}, fo);
}

}  // namespace

TEST_CASE("euclidean points round trip") {
    const MetricSpace s = grid(2, 0.25);
    const MetricSpace back = parse_points(points_to_json(s).dump());
    CHECK(back.size() == s.size());
    CHECK(back.fingerprint() == s.fingerprint());
}

TEST_CASE("ultrametric, matrix and snowflake documents") {
    const MetricSpace u = parse_points(R"({"metric": {"kind": "ultrametric", "arity": 2, "base": 0.0625},
                                           "points": ["0110", "0101"]})");
    CHECK(u.distance(0, 1) == doctest::Approx(0.00390625));
    CHECK(parse_points(points_to_json(u).dump()).fingerprint() == u.fingerprint());

    const MetricSpace m = parse_points(R"({"metric": {"kind": "matrix"}, "matrix": [1, 2, 1.5]})");
    REQUIRE(m.size() == 3);
    CHECK(m.distance(2, 0) == 2.0);
    CHECK(m.distance(1, 2) == 1.5);

    const MetricSpace f = parse_points(
        R"({"metric": {"kind": "snowflake", "epsilon": 0.5, "base_metric": {"kind": "euclidean"}},
            "points": [[0], [0.25]]})");
    CHECK(f.distance(0, 1) == doctest::Approx(0.5));
    CHECK(parse_points(points_to_json(f).dump()).fingerprint() == f.fingerprint());
}

TEST_CASE("parse errors name the line or field") {
    CHECK_THROWS_AS(parse_points(""), ParseError);
    CHECK_THROWS_AS(parse_points("  \n"), ParseError);
    try {
        parse_points("{\n\"metric\": {\"kind\": \"euclidean\"},\n\"points\": [[0], [1,]]\n}");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.where() == "line 3");
    }
    try {
        parse_points(R"({"metric": {"kind": "euclidean"}, "points": [[0, 1], [2, 3], [4]]})");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.where() == "points[2]");
    }
    try {
        parse_points(R"({"metric": {"kind": "euclidean"}, "points": [[0, 1], [2, "x"]]})");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.where() == "points[1][1]");
    }
    CHECK_THROWS_AS(parse_points(R"({"metric": {"kind": "hyperbolic"}, "points": [[0]]})"), ParseError);
    CHECK_THROWS_AS(parse_points(R"({"metric": {"kind": "matrix"}, "matrix": [1, 2]})"), ParseError);
}

TEST_CASE("cube files round trip") {
    const MetricSpace s = cantor(1.0 / 3.0, 7);
    const AdjacentFamily fam = family_of(s);
    const json doc = family_to_json(fam);
    CHECK(doc["format"] == "dyadic-cubes");
    CHECK(doc["points_fingerprint"] == fingerprint_hex(s));

    const AdjacentFamily back = parse_cubes(doc.dump(), s);
    REQUIRE(back.K() == fam.K());
    CHECK(back.C_delta_hat() == fam.C_delta_hat());
    CHECK(back.C_tilde() == fam.C_tilde());
    for (int t = 0; t < fam.K(); ++t) {
        REQUIRE(back.system(t).max_level() == fam.system(t).max_level());
        for (int k = 0; k <= fam.system(t).max_level(); ++k)
            for (PointId p = 0; p < static_cast<PointId>(s.size()); ++p)
                CHECK(back.system(t).cube_index(k, p) == fam.system(t).cube_index(k, p));
    }
    CHECK(family_to_json(back).dump() == doc.dump());
}

TEST_CASE("cube files are tied to their point set") {
    const AdjacentFamily fam = family_of(cantor(1.0 / 3.0, 6));
    const std::string text = family_to_json(fam).dump();
    CHECK_THROWS_AS(parse_cubes(text, cantor(1.0 / 3.0, 5)), StaleCubes);
    CHECK_THROWS_AS(parse_cubes(text, cantor(0.25, 6)), StaleCubes);
    CHECK_THROWS_AS(parse_cubes("{}", cantor(1.0 / 3.0, 6)), ParseError);
}

TEST_CASE("a corrupted parent link fails the sandwich check") {
    const MetricSpace s = grid(1, 1.0 / 256.0);
    const AdjacentFamily fam = family_of(s);
    json doc = family_to_json(fam);
    json& lv2 = doc["systems"][0]["levels"][2];
    const auto& up = doc["systems"][0]["levels"][1]["centers"];
    // Hang the level-2 center nearest 0 under the level-1 center nearest 1.
    lv2["parents"][0][1] = up.back();

    CHECK_THROWS_AS(parse_cubes(doc.dump(), s), InvariantFailure);
    const AdjacentFamily broken = parse_cubes(doc.dump(), s, false);
    const SystemReport r = verify_system(broken.system(0));
    CHECK(r.sandwich.status == CheckStatus::Fail);
    CHECK_FALSE(r.sandwich.witness.empty());
}

TEST_CASE("estimate JSON fields") {
    DimensionEstimate e;
    e.kind = EstimateKind::AssouadTheta;
    e.theta = 0.5;
    e.value = 0.25;
    e.window_lo = 2;
    e.window_hi = 6;
    e.flags = {"depth-limited"};
    const json j = estimate_to_json(e);
    CHECK(j["kind"] == "assouad_theta");
    CHECK(j["theta"] == 0.5);
    CHECK(j["window"] == json::array({2.0, 6.0}));
    CHECK(j["flags"][0] == "depth-limited");
    for (const char* key : {"slope", "intercept", "residual", "system_id", "seed"}) CHECK(j.contains(key));

    DimensionEstimate b;
    CHECK_FALSE(estimate_to_json(b).contains("theta"));
}
