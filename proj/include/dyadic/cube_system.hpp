#pragma once

#include <dyadic/metric_space.hpp>
#include <dyadic/net.hpp>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace dyadic {

struct BuildOptions {
    /// Deepest level; negative picks the first level whose net is the whole
    /// point set (c0 delta^k <= scale * min positive distance).
    int max_level = -1;
    /// Raw distances are multiplied by scale = root_diameter / diameter(X).
    /// Must stay below c0 so that level 0 is a single root cube.
    double root_diameter = 0.5;
};

/// Read-only view of Q_i^k. `members` points into the owning system.
struct DyadicCube {
    int system_id = 0;
    int level = 0;
    int index = 0;
    PointId center = -1;
    int parent = -1;  // index at level - 1; -1 at level 0
    std::span<const PointId> members;
    double diameter = 0.0;
};

/// One delta-dyadic hierarchy: per-level nets, parent links between
/// consecutive levels, and the induced partition of the points.
class CubeSystem {
public:
    CubeSystem() = default;

    /// Reassembles a system from nets and parent links. parents[k][i] is the
    /// level-(k-1) index of level-k cube i (parents[0] is ignored). Each point
    /// joins its nearest deepest-level center unless `deepest_assignment`
    /// gives the cube index explicitly. No property is assumed; run
    /// verify_system() on the result.
    static CubeSystem assemble(const MetricSpace& space, const CubeParams& params, std::uint64_t seed,
                               double scale, int system_id, std::vector<NetLevel> nets,
                               std::vector<std::vector<int>> parents, IdList deepest_assignment = {});

    int system_id() const { return system_id_; }
    const CubeParams& params() const { return params_; }
    std::uint64_t seed() const { return seed_; }
    double scale() const { return scale_; }
    int max_level() const { return static_cast<int>(nets_.size()) - 1; }
    const MetricSpace& space() const { return space_; }

    const NetLevel& net(int k) const { return nets_.at(static_cast<std::size_t>(k)); }
    int cube_count(int k) const { return static_cast<int>(nets_.at(static_cast<std::size_t>(k)).centers.size()); }
    DyadicCube cube(int k, int i) const;
    int parent(int k, int i) const;
    /// Level-(k+1) indices of the children of cube (k, i).
    std::span<const int> children(int k, int i) const;
    /// Index of the level-k cube holding p.
    int cube_index(int k, PointId p) const { return assign_[static_cast<std::size_t>(k)][static_cast<std::size_t>(p)]; }
    std::span<const int> level_assignment(int k) const { return assign_.at(static_cast<std::size_t>(k)); }
    /// Distance from p to the nearest point outside its level-k cube
    /// (+inf when the cube is the whole space). B(p, R) lies in the cube iff R <= this.
    double exit_distance(int k, PointId p) const { return exit_[static_cast<std::size_t>(k)][static_cast<std::size_t>(p)]; }

    /// Raw-unit radii of the Theorem-A balls at level k.
    double inner_radius(int k) const;  // c0 delta^k / 3
    double outer_radius(int k) const;  // 2 C0 delta^k

    const std::vector<std::string>& warnings() const { return warnings_; }
    std::vector<std::vector<int>> parent_links() const { return parents_; }

private:
    friend CubeSystem build_system(const MetricSpace&, const CubeParams&, std::uint64_t, const BuildOptions&,
                                   int);
    void index_members();
    void compute_exit_distances();

    MetricSpace space_;
    CubeParams params_;
    std::uint64_t seed_ = 0;
    double scale_ = 1.0;
    int system_id_ = 0;
    std::vector<NetLevel> nets_;
    std::vector<std::vector<int>> parents_;
    std::vector<std::vector<int>> assign_;           // [k][point] -> cube index
    std::vector<std::vector<int>> member_offsets_;   // [k][i..i+1] into member_ids_[k]
    std::vector<std::vector<PointId>> member_ids_;
    std::vector<std::vector<int>> child_offsets_;
    std::vector<std::vector<int>> child_ids_;
    std::vector<std::vector<double>> diameters_;
    std::vector<std::vector<double>> exit_;
    std::vector<std::string> warnings_;
};

/// Normalisation factor applied by build_system.
double normalisation_scale(const MetricSpace& space, const BuildOptions& opts);

/// Levels needed before the net becomes the whole point set.
int auto_max_level(const MetricSpace& space, const CubeParams& params, double scale);

CubeSystem build_system(const MetricSpace& space, const CubeParams& params, std::uint64_t seed,
                        const BuildOptions& opts = {}, int system_id = 0);

enum class CheckStatus { Pass, Fail, NotApplicable };
std::string to_string(CheckStatus s);

struct PropertyCheck {
    std::string name;
    CheckStatus status = CheckStatus::Pass;
    long violations = 0;
    long checks = 0;
    /// Worst observed ratio against the property's bound (<= 1 passes).
    double worst_ratio = 0.0;
    std::string witness;  // first violation, human readable
    /// Level-pair properties only: entry k covers levels (k, k+1), with one
    /// trailing entry past max_level that is always NotApplicable.
    std::vector<CheckStatus> per_level;
};

struct SystemReport {
    int system_id = 0;
    PropertyCheck nesting;        // (i)
    PropertyCheck partition;      // (ii)
    PropertyCheck sandwich;       // (iii)
    PropertyCheck monotonicity;   // (iv)
    bool all_pass() const;
};

/// Exhaustive check of the four cube properties.
SystemReport verify_system(const CubeSystem& system);

DyadicCube cube_of(const CubeSystem& system, PointId x, int k);

/// Level (Q.level + m) cubes inside Q, ascending by index.
std::vector<DyadicCube> descendants_at(const CubeSystem& system, const DyadicCube& q, int m);

}  // namespace dyadic
