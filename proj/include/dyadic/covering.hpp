#pragma once

#include <dyadic/adjacent_family.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dyadic {

struct CoverReport {
    PointId x = -1;
    double R = 0.0;          // after the two-point convention
    int m = 0;
    int system_id = -1;
    int level = -1;          // L_R
    long D = 0;
    long N_greedy = 0;
    std::optional<long> N_exact;
    double r_effective = 0.0;  // C_tilde delta^m R
    double ratio = 0.0;        // D / N (exact when present, greedy otherwise)
    double M0_hat = 0.0;
    IdList witness_cubes;      // level L_R+m indices meeting E ∩ B
    IdList witness_centers;    // greedy anchors

    /// N_exact > D: a counterexample to the covering inequality.
    bool violation() const { return N_exact && *N_exact > D; }
};

/// mask[p] != 0 iff p is in E. Throws on unknown ids.
std::vector<char> membership_mask(const MetricSpace& space, std::span<const PointId> E);

/// Circumscribed cube of B(x, R) plus D(E ∩ B, m) for every m the system
/// still resolves (counts[m], m = 0..max_level - L_R).
struct LocalCounts {
    CircumscribedCube cube;
    std::vector<long> counts;
    long ball_points = 0;  // |E ∩ B|
};
LocalCounts local_counts(const AdjacentFamily& family, const std::vector<char>& in_E, PointId x, double R);

CoverReport dyadic_cover_count(const AdjacentFamily& family, std::span<const PointId> E, PointId x, double R, int m);

struct GreedyCover {
    IdList anchors;
    std::vector<IdList> clusters;  // each of diameter <= r
};

/// Takes the smallest uncovered id of E and grows a cluster around it in
/// ascending distance order while its diameter stays <= r. Every cluster
/// contains the r/2-ball around its anchor.
GreedyCover greedy_cover(const MetricSpace& space, std::span<const PointId> E, double r);
long greedy_cover_count(const MetricSpace& space, std::span<const PointId> E, double r);

struct ExactOptions {
    int size_cap = 25;
    long clique_guard = 100000;
};

/// Minimum number of diameter-<=r sets covering E, or none when |E| exceeds
/// size_cap or the maximal-clique count exceeds clique_guard.
std::optional<long> exact_cover_count(const MetricSpace& space, std::span<const PointId> E, double r,
                                      const ExactOptions& opts = {});

CoverReport sandwich_check(const AdjacentFamily& family, std::span<const PointId> E, PointId x, double R, int m,
                           const ExactOptions& opts = {});

struct SandwichSweep {
    std::vector<CoverReport> reports;
    long violations = 0;
    double M0_hat = 0.0;
    std::map<int, double> M0_by_m;  // max D / N_exact per m
    int attempts = 0;
};

/// Samples configurations whose restriction E ∩ B fits the exact oracle
/// until `configs` reports exist (or 50 x configs attempts were spent).
SandwichSweep sandwich_sweep(const AdjacentFamily& family, std::span<const PointId> E, int configs,
                             std::uint64_t seed, const ExactOptions& opts = {});

std::string cover_csv_header();
std::string to_csv_row(const CoverReport& r);

}  // namespace dyadic
