#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace dyadic {

using PointId = int;
using IdList = std::vector<PointId>;

enum class MetricKind { Euclidean, Matrix, Snowflake, Ultrametric };

std::string to_string(MetricKind kind);
MetricKind metric_kind_from_string(const std::string& name);

/// How distances are evaluated. A snowflake wraps a base kind and raises its
/// distances to `epsilon`; an ultrametric uses base^lcp on symbol strings.
struct MetricDescriptor {
    MetricKind kind = MetricKind::Euclidean;
    MetricKind base_kind = MetricKind::Euclidean;  // snowflake only
    double epsilon = 1.0;                           // snowflake only
    int arity = 2;                                  // ultrametric (or snowflake of one)
    double base = 0.5;                              // ultrametric (or snowflake of one)

    /// The kind that actually owns the payload (the snowflake's base).
    MetricKind payload_kind() const { return kind == MetricKind::Snowflake ? base_kind : kind; }
};

struct SpaceOptions {
    /// Dense distance cache when size() <= cache_cap.
    std::size_t cache_cap = 4096;
    /// Random triples checked for the triangle inequality on matrix input.
    int triangle_samples = 10000;
};

class KdTree;

/// Finite metric space on points 0..n-1. Immutable after construction and
/// cheap to copy; payloads and caches are shared.
class MetricSpace {
public:
    MetricSpace() = default;

    /// Rows of `coords` are points.
    static MetricSpace euclidean(Eigen::MatrixXd coords, const SpaceOptions& opts = {});
    static MetricSpace ultrametric(std::vector<std::string> symbols, int arity, double base,
                                   const SpaceOptions& opts = {});
    static MetricSpace from_matrix(Eigen::MatrixXd distances, const SpaceOptions& opts = {});

    /// Same points, metric d^epsilon. epsilon in (0, 1].
    MetricSpace snowflake(double epsilon) const;

    std::size_t size() const { return n_; }
    const MetricDescriptor& descriptor() const { return desc_; }
    const Eigen::MatrixXd& coords() const;
    const std::vector<std::string>& symbols() const;
    const Eigen::MatrixXd& base_matrix() const;
    const SpaceOptions& options() const { return opts_; }

    bool valid_id(PointId p) const { return p >= 0 && static_cast<std::size_t>(p) < n_; }

    /// Throws InvalidArgument on unknown ids.
    double distance(PointId p, PointId q) const;
    /// No id validation.
    double dist(PointId p, PointId q) const;

    /// Ids q with d(x, q) < r, ascending.
    IdList ball_members(PointId x, double r) const;
    /// Same set, unsorted, appended to `out` after clearing it.
    void ball_members_into(PointId x, double r, IdList& out) const;

    /// Max pairwise distance; 0 for singletons. Throws on empty input.
    double diameter(std::span<const PointId> subset) const;
    double diameter() const;
    /// Smallest non-zero pairwise distance (0 for a single point).
    double min_positive_distance() const;

    /// Longest common prefix of two symbol strings.
    static int common_prefix(const std::string& a, const std::string& b);

    /// 64-bit digest of the descriptor and payload; stamps cube files.
    std::uint64_t fingerprint() const;

private:
    struct Payload;

    double base_dist(PointId p, PointId q) const;
    double base_diameter(std::span<const PointId> subset) const;
    double planar_hull_diameter(std::span<const PointId> subset) const;
    void finish_construction();

    std::size_t n_ = 0;
    MetricDescriptor desc_;
    SpaceOptions opts_;
    std::shared_ptr<const Payload> payload_;
    std::shared_ptr<const Eigen::MatrixXd> cache_;
    double diameter_ = 0.0;
    double min_positive_ = 0.0;
};

struct DoublingEstimate {
    int C_d_hat = 1;
    int samples_used = 0;
    std::vector<double> radii_probed;
};

/// Greedy covering count of B(x, 2r) by radius-r balls, maximised over
/// seeded (x, r) probes. Sample i is the same for every sample_count.
DoublingEstimate estimate_doubling(const MetricSpace& space, int sample_count, std::uint64_t rng_seed);

}  // namespace dyadic
