#pragma once

#include <dyadic/metric_space.hpp>

#include <cstdint>

namespace dyadic {

/// Scale ratio delta and the separation / covering constants c0 <= C0.
struct CubeParams {
    double delta = 1.0 / 16.0;
    double c0 = 1.0;
    double C0 = 1.0;

    /// Throws ConfigError naming the violated inequality.
    void validate() const;

    bool operator==(const CubeParams&) const = default;
};

/// Centers z_i^k of one level. `scale` multiplies raw distances before they
/// are compared with c0 delta^k, so thresholds in raw units are
/// c0 delta^k / scale.
struct NetLevel {
    int level = 0;
    IdList centers;  // ascending; position is the index i
    CubeParams params;
    std::uint64_t seed = 0;
    double scale = 1.0;
    std::uint64_t space_fingerprint = 0;
    std::size_t space_size = 0;

    double separation_radius() const;  // c0 delta^k / scale
    double covering_radius() const;    // C0 delta^k / scale
};

/// Greedy maximal separated set over a seed-shuffled order: a point joins
/// iff it is at least separation_radius() from every admitted center.
NetLevel build_net(const MetricSpace& space, int k, const CubeParams& params, std::uint64_t seed,
                   double scale = 1.0);

struct NetVerification {
    bool separation_ok = true;
    bool covering_ok = true;
    /// min pairwise center distance / (c0 delta^k); +inf for one center.
    double worst_separation_ratio = 0.0;
    /// max point-to-net distance / (C0 delta^k).
    double worst_covering_ratio = 0.0;
    PointId separation_witness_a = -1;
    PointId separation_witness_b = -1;
    PointId covering_witness = -1;
};

NetVerification verify_net(const MetricSpace& space, const NetLevel& net);

/// The seed-shuffled visiting order used by build_net.
IdList shuffled_order(std::size_t n, std::uint64_t seed);

}  // namespace dyadic
