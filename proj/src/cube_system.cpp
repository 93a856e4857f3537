#include <dyadic/cube_system.hpp>

#include <dyadic/errors.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace dyadic {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kLevelCap = 60;

// Nearest center to p (ties by ascending id). position[q] is q's index in
// the center list or -1. Probes widen from `start` until a center appears.
int nearest_center(const MetricSpace& space, PointId p, const std::vector<int>& position, double start,
                   IdList& scratch) {
    if (position[p] >= 0) return position[p];
    const double limit = 4.0 * space.diameter() + start;
    for (double probe = start; ; probe *= 2.0) {
        space.ball_members_into(p, probe, scratch);
        int best = -1;
        PointId best_id = -1;
        double best_d = kInf;
        for (PointId q : scratch) {
            if (position[q] < 0) continue;
            const double d = space.dist(p, q);
            if (d < best_d || (d == best_d && q < best_id)) {
                best_d = d;
                best_id = q;
                best = position[q];
            }
        }
        if (best >= 0) return best;
        if (probe > limit) break;
    }
    throw InvalidArgument("no center reachable from point " + std::to_string(p));
}

std::vector<int> positions(std::size_t n, const IdList& centers) {
    std::vector<int> pos(n, -1);
    for (std::size_t i = 0; i < centers.size(); ++i) pos[centers[i]] = static_cast<int>(i);
    return pos;
}

bool is_line(const MetricSpace& space) {
    return space.descriptor().payload_kind() == MetricKind::Euclidean && space.coords().cols() == 1;
}

std::string cube_name(int k, int i) { return "Q(" + std::to_string(k) + "," + std::to_string(i) + ")"; }

}  // namespace

double normalisation_scale(const MetricSpace& space, const BuildOptions& opts) {
    const double diam = space.diameter();
    return diam > 0.0 ? opts.root_diameter / diam : 1.0;
}

int auto_max_level(const MetricSpace& space, const CubeParams& params, double scale) {
    const double mp = space.min_positive_distance();
    if (space.size() <= 1 || mp <= 0.0) return 0;
    int k = 0;
    while (k < kLevelCap && params.c0 * std::pow(params.delta, k) > scale * mp) ++k;
    return k;
}

double CubeSystem::inner_radius(int k) const { return params_.c0 * std::pow(params_.delta, k) / (3.0 * scale_); }

double CubeSystem::outer_radius(int k) const { return 2.0 * params_.C0 * std::pow(params_.delta, k) / scale_; }

DyadicCube CubeSystem::cube(int k, int i) const {
    if (k < 0 || k > max_level()) throw InvalidArgument("level " + std::to_string(k) + " out of range");
    if (i < 0 || i >= cube_count(k)) throw InvalidArgument("cube index " + std::to_string(i) + " out of range");
    const auto kk = static_cast<std::size_t>(k);
    const int lo = member_offsets_[kk][i];
    const int hi = member_offsets_[kk][i + 1];
    DyadicCube q;
    q.system_id = system_id_;
    q.level = k;
    q.index = i;
    q.center = nets_[kk].centers[i];
    q.parent = k == 0 ? -1 : parents_[kk][i];
    q.members = std::span<const PointId>(member_ids_[kk]).subspan(lo, hi - lo);
    q.diameter = diameters_[kk][i];
    return q;
}

int CubeSystem::parent(int k, int i) const { return k == 0 ? -1 : parents_.at(k).at(i); }

std::span<const int> CubeSystem::children(int k, int i) const {
    if (k >= max_level()) return {};
    const auto kk = static_cast<std::size_t>(k);
    const int lo = child_offsets_[kk][i];
    const int hi = child_offsets_[kk][i + 1];
    return std::span<const int>(child_ids_[kk]).subspan(lo, hi - lo);
}

CubeSystem CubeSystem::assemble(const MetricSpace& space, const CubeParams& params, std::uint64_t seed,
                                double scale, int system_id, std::vector<NetLevel> nets,
                                std::vector<std::vector<int>> parents, IdList deepest_assignment) {
    params.validate();
    if (nets.empty()) throw InvalidArgument("a cube system needs at least one level");
    if (parents.size() != nets.size()) throw InvalidArgument("parent table must have one row per level");
    const std::size_t n = space.size();
    if (n == 0) throw InvalidArgument("empty space");
    for (std::size_t k = 0; k < nets.size(); ++k) {
        const NetLevel& net = nets[k];
        if (net.level != static_cast<int>(k)) throw InvalidArgument("net levels must be 0, 1, 2, ...");
        if (net.centers.empty()) throw InvalidArgument("empty net at level " + std::to_string(k));
        if (!std::is_sorted(net.centers.begin(), net.centers.end()) ||
            std::adjacent_find(net.centers.begin(), net.centers.end()) != net.centers.end())
            throw InvalidArgument("net centers must be strictly ascending");
        for (PointId z : net.centers)
            if (!space.valid_id(z)) throw InvalidArgument("net center out of range");
        if (k > 0) {
            if (parents[k].size() != net.centers.size())
                throw InvalidArgument("parent row " + std::to_string(k) + " has the wrong length");
            for (int p : parents[k])
                if (p < 0 || p >= static_cast<int>(nets[k - 1].centers.size()))
                    throw InvalidArgument("parent index out of range at level " + std::to_string(k));
        }
    }
    if (nets[0].centers.size() != 1) throw InvalidArgument("level 0 must hold a single root");

    CubeSystem s;
    s.space_ = space;
    s.params_ = params;
    s.seed_ = seed;
    s.scale_ = scale;
    s.system_id_ = system_id;
    s.nets_ = std::move(nets);
    s.parents_ = std::move(parents);
    s.parents_[0].clear();

    const int L = s.max_level();
    const auto Ls = static_cast<std::size_t>(L);
    s.assign_.assign(Ls + 1, std::vector<int>(n, 0));
    const int deepest_count = s.cube_count(L);
    if (deepest_assignment.empty()) {
        const auto pos = positions(n, s.nets_[Ls].centers);
        const double start = s.nets_[Ls].separation_radius();
        IdList scratch;
        for (std::size_t p = 0; p < n; ++p)
            s.assign_[Ls][p] = nearest_center(space, static_cast<PointId>(p), pos, start, scratch);
    } else {
        if (deepest_assignment.size() != n) throw InvalidArgument("deepest assignment must cover every point");
        for (std::size_t p = 0; p < n; ++p) {
            if (deepest_assignment[p] < 0 || deepest_assignment[p] >= deepest_count)
                throw InvalidArgument("deepest assignment out of range");
            s.assign_[Ls][p] = deepest_assignment[p];
        }
    }
    for (int k = L - 1; k >= 0; --k)
        for (std::size_t p = 0; p < n; ++p) s.assign_[k][p] = s.parents_[k + 1][s.assign_[k + 1][p]];

    s.index_members();
    s.compute_exit_distances();
    return s;
}

void CubeSystem::index_members() {
    const std::size_t n = space_.size();
    const std::size_t levels = nets_.size();
    member_offsets_.assign(levels, {});
    member_ids_.assign(levels, {});
    diameters_.assign(levels, {});
    child_offsets_.assign(levels, {});
    child_ids_.assign(levels, {});

    for (std::size_t k = 0; k < levels; ++k) {
        const int count = cube_count(static_cast<int>(k));
        auto& off = member_offsets_[k];
        off.assign(static_cast<std::size_t>(count) + 1, 0);
        for (std::size_t p = 0; p < n; ++p) ++off[assign_[k][p] + 1];
        std::partial_sum(off.begin(), off.end(), off.begin());
        auto& ids = member_ids_[k];
        ids.assign(n, 0);
        std::vector<int> fill(off.begin(), off.end() - 1);
        for (std::size_t p = 0; p < n; ++p) ids[fill[assign_[k][p]]++] = static_cast<PointId>(p);

        diameters_[k].assign(static_cast<std::size_t>(count), 0.0);
        for (int i = 0; i < count; ++i) {
            const int lo = off[i], hi = off[i + 1];
            if (hi - lo > 1)
                diameters_[k][i] = space_.diameter(std::span<const PointId>(ids).subspan(lo, hi - lo));
        }

        if (k + 1 < levels) {
            auto& coff = child_offsets_[k];
            coff.assign(static_cast<std::size_t>(count) + 1, 0);
            const auto& up = parents_[k + 1];
            for (int par : up) ++coff[par + 1];
            std::partial_sum(coff.begin(), coff.end(), coff.begin());
            child_ids_[k].assign(up.size(), 0);
            std::vector<int> cfill(coff.begin(), coff.end() - 1);
            for (std::size_t j = 0; j < up.size(); ++j) child_ids_[k][cfill[up[j]]++] = static_cast<int>(j);
        }
    }
}

void CubeSystem::compute_exit_distances() {
    const std::size_t n = space_.size();
    exit_.assign(nets_.size(), std::vector<double>(n, kInf));

    if (is_line(space_)) {
        // On a line the nearest outsider is the first point of another cube
        // on either side in sorted order.
        IdList order(n);
        std::iota(order.begin(), order.end(), 0);
        const auto& c = space_.coords();
        std::sort(order.begin(), order.end(), [&](PointId a, PointId b) { return c(a, 0) < c(b, 0); });
        std::vector<int> left(n), right(n);
        for (std::size_t k = 0; k < nets_.size(); ++k) {
            if (cube_count(static_cast<int>(k)) == 1) continue;
            const auto& a = assign_[k];
            for (std::size_t t = 0; t < n; ++t) {
                if (t == 0) left[t] = -1;
                else left[t] = a[order[t - 1]] != a[order[t]] ? static_cast<int>(t - 1) : left[t - 1];
            }
            for (std::size_t t = n; t-- > 0;) {
                if (t + 1 == n) right[t] = -1;
                else right[t] = a[order[t + 1]] != a[order[t]] ? static_cast<int>(t + 1) : right[t + 1];
            }
            for (std::size_t t = 0; t < n; ++t) {
                double e = kInf;
                if (left[t] >= 0) e = std::min(e, space_.dist(order[t], order[left[t]]));
                if (right[t] >= 0) e = std::min(e, space_.dist(order[t], order[right[t]]));
                exit_[k][order[t]] = e;
            }
        }
        return;
    }

    const double start = std::max(space_.min_positive_distance(), 1e-300) * 1.5;
    const double limit = 4.0 * space_.diameter() + start;
    IdList ball;
    for (std::size_t k = 0; k < nets_.size(); ++k) {
        if (cube_count(static_cast<int>(k)) == 1) continue;
        const auto& a = assign_[k];
        for (std::size_t p = 0; p < n; ++p) {
            double e = kInf;
            for (double probe = start; probe <= limit; probe *= 2.0) {
                space_.ball_members_into(static_cast<PointId>(p), probe, ball);
                for (PointId q : ball)
                    if (a[q] != a[p]) e = std::min(e, space_.dist(static_cast<PointId>(p), q));
                if (e < kInf) break;
            }
            exit_[k][p] = e;
        }
    }
}

CubeSystem build_system(const MetricSpace& space, const CubeParams& params, std::uint64_t seed,
                        const BuildOptions& opts, int system_id) {
    params.validate();
    if (space.size() == 0) throw InvalidArgument("empty space");
    if (!(opts.root_diameter > 0.0 && opts.root_diameter < params.c0))
        throw ConfigError("root diameter must lie in (0, c0) for a single root cube");
    if (opts.max_level > kLevelCap) throw ConfigError("max_level above " + std::to_string(kLevelCap));

    const double scale = normalisation_scale(space, opts);
    const int L = opts.max_level >= 0 ? opts.max_level : auto_max_level(space, params, scale);
    const std::size_t n = space.size();

    std::vector<NetLevel> nets;
    nets.reserve(static_cast<std::size_t>(L) + 1);
    for (int k = 0; k <= L; ++k) nets.push_back(build_net(space, k, params, seed, scale));

    std::vector<std::vector<int>> parents(nets.size());
    IdList scratch;
    for (int k = 1; k <= L; ++k) {
        const auto pos = positions(n, nets[k - 1].centers);
        const double start = nets[k - 1].separation_radius();
        auto& row = parents[k];
        row.reserve(nets[k].centers.size());
        for (PointId z : nets[k].centers) row.push_back(nearest_center(space, z, pos, start, scratch));
    }

    CubeSystem s = CubeSystem::assemble(space, params, seed, scale, system_id, std::move(nets), std::move(parents));

    int full = -1;
    for (int k = 0; k <= L; ++k)
        if (s.cube_count(k) == static_cast<int>(n)) {
            full = k;
            break;
        }
    if (full >= 0 && full < L) {
        std::ostringstream w;
        w << "max_level " << L << " is deeper than needed: levels " << full << ".." << L
          << " all repeat the full point set";
        s.warnings_.push_back(w.str());
    }
    return s;
}

std::string to_string(CheckStatus s) {
    switch (s) {
        case CheckStatus::Pass: return "pass";
        case CheckStatus::Fail: return "fail";
        case CheckStatus::NotApplicable: return "not applicable";
    }
    return "?";
}

bool SystemReport::all_pass() const {
    for (const PropertyCheck* c : {&nesting, &partition, &sandwich, &monotonicity})
        if (c->status == CheckStatus::Fail) return false;
    return true;
}

namespace {

void record(PropertyCheck& c, const std::string& witness) {
    if (c.violations++ == 0) c.witness = witness;
    c.status = CheckStatus::Fail;
}

void finish_pairs(PropertyCheck& c, int L, const std::vector<long>& fails) {
    c.per_level.clear();
    for (int k = 0; k < L; ++k) c.per_level.push_back(fails[k] ? CheckStatus::Fail : CheckStatus::Pass);
    c.per_level.push_back(CheckStatus::NotApplicable);
    if (L == 0) c.status = CheckStatus::NotApplicable;
}

}  // namespace

SystemReport verify_system(const CubeSystem& sys) {
    const MetricSpace& space = sys.space();
    const std::size_t n = space.size();
    const int L = sys.max_level();
    SystemReport r;
    r.system_id = sys.system_id();
    r.nesting.name = "nesting";
    r.partition.name = "partition";
    r.sandwich.name = "sandwich";
    r.monotonicity.name = "monotonicity";

    // (ii) every point in exactly one cube, no empty cube.
    for (int k = 0; k <= L; ++k) {
        const int count = sys.cube_count(k);
        std::vector<int> hits(static_cast<std::size_t>(count), 0);
        for (std::size_t p = 0; p < n; ++p) {
            ++r.partition.checks;
            const int i = sys.cube_index(k, static_cast<PointId>(p));
            if (i < 0 || i >= count) {
                record(r.partition, "point " + std::to_string(p) + " has no cube at level " + std::to_string(k));
                continue;
            }
            ++hits[i];
        }
        for (int i = 0; i < count; ++i) {
            const DyadicCube q = sys.cube(k, i);
            if (hits[i] == 0 || q.members.empty()) record(r.partition, cube_name(k, i) + " is empty");
            if (static_cast<int>(q.members.size()) != hits[i])
                record(r.partition, cube_name(k, i) + " member list disagrees with the assignment");
        }
    }

    // (i) consecutive levels: a finer cube sits inside one coarser cube.
    std::vector<long> nest_fail(static_cast<std::size_t>(L) + 1, 0);
    for (int k = 0; k < L; ++k) {
        for (int j = 0; j < sys.cube_count(k + 1); ++j) {
            const DyadicCube q = sys.cube(k + 1, j);
            ++r.nesting.checks;
            bool ok = true;
            for (PointId p : q.members)
                if (sys.cube_index(k, p) != q.parent) {
                    ok = false;
                    std::ostringstream w;
                    w << cube_name(k + 1, j) << " point " << p << " lies in " << cube_name(k, sys.cube_index(k, p))
                      << " but the parent is " << cube_name(k, q.parent);
                    record(r.nesting, w.str());
                    break;
                }
            if (!ok) ++nest_fail[k];
        }
    }
    finish_pairs(r.nesting, L, nest_fail);

    // (iii) inner ball inside, members inside the outer ball.
    IdList ball;
    for (int k = 0; k <= L; ++k) {
        const double inner = sys.inner_radius(k);
        const double outer = sys.outer_radius(k);
        for (int i = 0; i < sys.cube_count(k); ++i) {
            const DyadicCube q = sys.cube(k, i);
            ++r.sandwich.checks;
            space.ball_members_into(q.center, inner, ball);
            std::sort(ball.begin(), ball.end());
            for (PointId p : ball)
                if (sys.cube_index(k, p) != i) {
                    std::ostringstream w;
                    w << cube_name(k, i) << " misses point " << p << " of its inner ball (center " << q.center << ")";
                    record(r.sandwich, w.str());
                    break;
                }
            for (PointId p : q.members) {
                const double d = space.dist(q.center, p);
                r.sandwich.worst_ratio = std::max(r.sandwich.worst_ratio, d / outer);
                if (!(d < outer)) {
                    std::ostringstream w;
                    w << cube_name(k, i) << " member " << p << " is outside the outer ball (ratio " << d / outer << ")";
                    record(r.sandwich, w.str());
                    break;
                }
            }
        }
    }

    // (iv) d(child center, parent center) + 2 C0 delta^(k+1) <= 2 C0 delta^k.
    std::vector<long> mono_fail(static_cast<std::size_t>(L) + 1, 0);
    for (int k = 0; k < L; ++k) {
        const double outer_parent = sys.outer_radius(k);
        const double outer_child = sys.outer_radius(k + 1);
        for (int j = 0; j < sys.cube_count(k + 1); ++j) {
            ++r.monotonicity.checks;
            const PointId zc = sys.net(k + 1).centers[j];
            const PointId zp = sys.net(k).centers[sys.parent(k + 1, j)];
            const double lhs = space.dist(zc, zp) + outer_child;
            r.monotonicity.worst_ratio = std::max(r.monotonicity.worst_ratio, lhs / outer_parent);
            if (lhs > outer_parent * (1.0 + 1e-12)) {
                ++mono_fail[k];
                std::ostringstream w;
                w << cube_name(k + 1, j) << " outer ball leaves the parent's (ratio " << lhs / outer_parent << ")";
                record(r.monotonicity, w.str());
            }
        }
    }
    finish_pairs(r.monotonicity, L, mono_fail);
    return r;
}

DyadicCube cube_of(const CubeSystem& system, PointId x, int k) {
    if (!system.space().valid_id(x)) throw InvalidArgument("unknown point id " + std::to_string(x));
    if (k < 0 || k > system.max_level())
        throw InvalidArgument("level " + std::to_string(k) + " outside 0.." + std::to_string(system.max_level()));
    return system.cube(k, system.cube_index(k, x));
}

std::vector<DyadicCube> descendants_at(const CubeSystem& system, const DyadicCube& q, int m) {
    if (m < 0) throw InvalidArgument("descendant depth must be non-negative");
    if (q.system_id != system.system_id()) throw InvalidArgument("cube belongs to another system");
    if (q.level + m > system.max_level()) {
        const int deepest = system.max_level() - q.level;
        throw ScaleExhausted("level " + std::to_string(q.level + m) + " requested, deepest m available is " +
                                 std::to_string(deepest),
                             deepest);
    }
    std::vector<int> frontier{q.index};
    for (int step = 0; step < m; ++step) {
        std::vector<int> next;
        for (int i : frontier)
            for (int c : system.children(q.level + step, i)) next.push_back(c);
        frontier = std::move(next);
    }
    std::sort(frontier.begin(), frontier.end());
    std::vector<DyadicCube> out;
    out.reserve(frontier.size());
    for (int i : frontier) out.push_back(system.cube(q.level + m, i));
    return out;
}

}  // namespace dyadic
