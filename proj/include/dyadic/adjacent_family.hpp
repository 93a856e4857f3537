#pragma once

#include <dyadic/cube_system.hpp>

#include <cstdint>
#include <vector>

namespace dyadic {

struct FamilyOptions {
    int K_max = 8;
    int query_budget = 500;
    /// Stop adding systems once every sampled certificate is at most this.
    double target_ratio = 64.0;
    std::uint64_t seed = 1;
    BuildOptions build;
};

/// Smallest cube, across the family, containing B(x, R).
struct CircumscribedCube {
    int system_id = 0;
    DyadicCube cube;
    int level = 0;          // L_R
    double requested_R = 0.0;
    double R = 0.0;         // min(requested_R, 2 |B|)
    double ratio = 0.0;     // |Q| / R
    /// max(|Q|/R, R/|Q|, c0 delta^L / (3 scale R)); the two-sided constant
    /// this query needs.
    double certificate = 0.0;
    bool flagged = false;   // certificate above the family's C_delta_hat
};

struct QueryRecord {
    PointId x = -1;
    double R = 0.0;
    bool degenerate = false;
    int system_id = -1;
    int level = -1;
    double certificate = 0.0;
};

class AdjacentFamily {
public:
    AdjacentFamily() = default;

    /// Wraps already-built systems (all over the same space and params).
    static AdjacentFamily assemble(std::vector<CubeSystem> systems, double C_delta_hat, double target_ratio,
                                   bool best_effort);

    int K() const { return static_cast<int>(systems_.size()); }
    const CubeSystem& system(int t) const { return systems_.at(static_cast<std::size_t>(t)); }
    const std::vector<CubeSystem>& systems() const { return systems_; }
    const MetricSpace& space() const { return systems_.front().space(); }
    const CubeParams& params() const { return systems_.front().params(); }
    double scale() const { return systems_.front().scale(); }
    /// Deepest level shared by every system.
    int max_level() const;

    double C_delta_hat() const { return C_delta_hat_; }
    /// 12 C0 C_delta_hat / c0.
    double C_tilde() const;
    double target_ratio() const { return target_ratio_; }
    bool best_effort() const { return best_effort_; }
    const std::vector<QueryRecord>& queries() const { return queries_; }

    /// Throws DegenerateBall when B(x, R) has fewer than two points.
    CircumscribedCube circumscribed(PointId x, double R) const;

private:
    friend AdjacentFamily build_adjacent_family(const MetricSpace&, const CubeParams&, const FamilyOptions&);
    CircumscribedCube search(PointId x, double R, std::size_t system_count) const;

    std::vector<CubeSystem> systems_;
    double C_delta_hat_ = 1.0;
    double target_ratio_ = 0.0;
    bool best_effort_ = false;
    std::vector<QueryRecord> queries_;
};

/// Adds systems with seeds seed, seed+1, ... until the sampled certificates
/// meet target_ratio or K_max systems exist.
AdjacentFamily build_adjacent_family(const MetricSpace& space, const CubeParams& params, const FamilyOptions& opts);

CircumscribedCube circumscribed_cube(const AdjacentFamily& family, PointId x, double R);

/// The fixed query sample used by build_adjacent_family: query i is the same
/// for every budget.
std::vector<std::pair<PointId, double>> family_query_sample(const MetricSpace& space, int budget,
                                                             std::uint64_t seed);

}  // namespace dyadic
