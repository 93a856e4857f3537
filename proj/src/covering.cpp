#include <dyadic/covering.hpp>

#include <dyadic/errors.hpp>
#include <dyadic/random.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

namespace dyadic {

namespace {

IdList sorted_unique(const MetricSpace& space, std::span<const PointId> E) {
    IdList ids(E.begin(), E.end());
    for (PointId p : ids)
        if (!space.valid_id(p)) throw InvalidArgument("unknown point id " + std::to_string(p));
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
}

double closed(double r) { return std::nextafter(r, std::numeric_limits<double>::infinity()); }

// Incremental diameter of a growing cluster.
class ClusterDiameter {
public:
    ClusterDiameter(const MetricSpace& space, PointId anchor) : space_(space) {
        const MetricDescriptor& d = space.descriptor();
        line_ = d.payload_kind() == MetricKind::Euclidean && space.coords().cols() == 1;
        ultra_ = d.payload_kind() == MetricKind::Ultrametric;
        lo_ = hi_ = anchor;
        members_.push_back(anchor);
    }

    // Candidates arrive with d(anchor, q) <= r already.
    bool fits(PointId q, double r) const {
        if (ultra_) return true;
        if (line_) {
            const auto& c = space_.coords();
            const PointId lo = c(q, 0) < c(lo_, 0) ? q : lo_;
            const PointId hi = c(q, 0) > c(hi_, 0) ? q : hi_;
            return space_.dist(lo, hi) <= r;
        }
        for (PointId m : members_)
            if (space_.dist(m, q) > r) return false;
        return true;
    }

    void add(PointId q) {
        if (line_) {
            const auto& c = space_.coords();
            if (c(q, 0) < c(lo_, 0)) lo_ = q;
            if (c(q, 0) > c(hi_, 0)) hi_ = q;
        } else if (!ultra_) {
            members_.push_back(q);
        }
    }

private:
    const MetricSpace& space_;
    bool line_ = false;
    bool ultra_ = false;
    PointId lo_ = -1, hi_ = -1;
    IdList members_;
};

using Mask = std::uint64_t;

struct CliqueSearch {
    const std::vector<Mask>& adj;
    long guard;
    std::vector<Mask> cliques;
    bool aborted = false;

    void run(Mask R, Mask P, Mask X) {
        if (aborted) return;
        if (P == 0 && X == 0) {
            cliques.push_back(R);
            if (static_cast<long>(cliques.size()) > guard) aborted = true;
            return;
        }
        // Pivot maximising |P ∩ N(u)|.
        int pivot = -1, best = -1;
        for (Mask rest = P | X; rest; rest &= rest - 1) {
            const int u = std::countr_zero(rest);
            const int c = std::popcount(P & adj[u]);
            if (c > best) {
                best = c;
                pivot = u;
            }
        }
        for (Mask cand = P & ~adj[pivot]; cand; cand &= cand - 1) {
            const int v = std::countr_zero(cand);
            const Mask bit = Mask{1} << v;
            run(R | bit, P & adj[v], X & adj[v]);
            if (aborted) return;
            P &= ~bit;
            X |= bit;
        }
    }
};

struct SetCover {
    const std::vector<Mask>& sets;
    std::vector<std::vector<int>> holders;  // element -> sets containing it
    int largest = 1;
    long best;

    void solve(Mask uncovered, long used) {
        if (uncovered == 0) {
            best = std::min(best, used);
            return;
        }
        const long need = (std::popcount(uncovered) + largest - 1) / largest;
        if (used + need >= best) return;
        // Branch on the element with the fewest options.
        int pick = -1;
        std::size_t fewest = std::numeric_limits<std::size_t>::max();
        for (Mask rest = uncovered; rest; rest &= rest - 1) {
            const int e = std::countr_zero(rest);
            if (holders[e].size() < fewest) {
                fewest = holders[e].size();
                pick = e;
            }
        }
        std::vector<int> options = holders[pick];
        std::sort(options.begin(), options.end(), [&](int a, int b) {
            const int ca = std::popcount(sets[a] & uncovered), cb = std::popcount(sets[b] & uncovered);
            return ca != cb ? ca > cb : a < b;
        });
        for (int s : options) solve(uncovered & ~sets[s], used + 1);
    }
};

}  // namespace

std::vector<char> membership_mask(const MetricSpace& space, std::span<const PointId> E) {
    std::vector<char> mask(space.size(), 0);
    for (PointId p : E) {
        if (!space.valid_id(p)) throw InvalidArgument("unknown point id " + std::to_string(p));
        mask[p] = 1;
    }
    return mask;
}

LocalCounts local_counts(const AdjacentFamily& family, const std::vector<char>& in_E, PointId x, double R) {
    LocalCounts out;
    out.cube = family.circumscribed(x, R);
    const CubeSystem& sys = family.system(out.cube.system_id);
    const int L = out.cube.level;
    const int depth = sys.max_level() - L;

    IdList ball;
    family.space().ball_members_into(x, R, ball);
    IdList inter;
    for (PointId p : ball)
        if (in_E[p]) inter.push_back(p);
    out.ball_points = static_cast<long>(inter.size());

    out.counts.assign(static_cast<std::size_t>(depth) + 1, 0);
    thread_local std::vector<unsigned> marks;
    thread_local unsigned stamp = 0;
    for (int m = 0; m <= depth; ++m) {
        const auto level = sys.level_assignment(L + m);
        const auto need = static_cast<std::size_t>(sys.cube_count(L + m));
        if (marks.size() < need) marks.resize(need, 0);
        if (++stamp == 0) {
            std::fill(marks.begin(), marks.end(), 0u);
            stamp = 1;
        }
        long count = 0;
        for (PointId p : inter) {
            unsigned& mk = marks[static_cast<std::size_t>(level[p])];
            if (mk != stamp) {
                mk = stamp;
                ++count;
            }
        }
        out.counts[static_cast<std::size_t>(m)] = count;
    }
    return out;
}

CoverReport dyadic_cover_count(const AdjacentFamily& family, std::span<const PointId> E, PointId x, double R, int m) {
    if (m < 0) throw InvalidArgument("m must be non-negative");
    const MetricSpace& space = family.space();
    const auto in_E = membership_mask(space, E);
    const CircumscribedCube cc = family.circumscribed(x, R);
    const CubeSystem& sys = family.system(cc.system_id);
    if (cc.level + m > sys.max_level()) {
        const int deepest = sys.max_level() - cc.level;
        throw ScaleExhausted("m = " + std::to_string(m) + " exceeds the deepest available m = " +
                                 std::to_string(deepest),
                             deepest);
    }

    CoverReport rep;
    rep.x = x;
    rep.R = cc.R;
    rep.m = m;
    rep.system_id = cc.system_id;
    rep.level = cc.level;
    rep.r_effective = family.C_tilde() * std::pow(family.params().delta, m) * cc.R;
    for (PointId p : space.ball_members(x, R))
        if (in_E[p]) rep.witness_cubes.push_back(sys.cube_index(cc.level + m, p));
    std::sort(rep.witness_cubes.begin(), rep.witness_cubes.end());
    rep.witness_cubes.erase(std::unique(rep.witness_cubes.begin(), rep.witness_cubes.end()), rep.witness_cubes.end());
    rep.D = static_cast<long>(rep.witness_cubes.size());
    return rep;
}

GreedyCover greedy_cover(const MetricSpace& space, std::span<const PointId> E, double r) {
    if (E.empty()) throw InvalidArgument("cannot cover an empty set");
    if (!(r >= 0.0)) throw InvalidArgument("cover diameter must be non-negative");
    const IdList ids = sorted_unique(space, E);
    std::vector<char> in_E(space.size(), 0), covered(space.size(), 0);
    for (PointId p : ids) in_E[p] = 1;

    GreedyCover out;
    IdList cand;
    std::vector<std::pair<double, PointId>> order;
    for (PointId a : ids) {
        if (covered[a]) continue;
        covered[a] = 1;
        out.anchors.push_back(a);
        IdList cluster{a};
        space.ball_members_into(a, closed(r), cand);
        order.clear();
        for (PointId q : cand)
            if (in_E[q] && !covered[q]) order.emplace_back(space.dist(a, q), q);
        std::sort(order.begin(), order.end());
        ClusterDiameter diam(space, a);
        for (const auto& [d, q] : order) {
            if (!diam.fits(q, r)) continue;
            diam.add(q);
            covered[q] = 1;
            cluster.push_back(q);
        }
        std::sort(cluster.begin(), cluster.end());
        out.clusters.push_back(std::move(cluster));
    }
    return out;
}

long greedy_cover_count(const MetricSpace& space, std::span<const PointId> E, double r) {
    return static_cast<long>(greedy_cover(space, E, r).anchors.size());
}

std::optional<long> exact_cover_count(const MetricSpace& space, std::span<const PointId> E, double r,
                                      const ExactOptions& opts) {
    if (E.empty()) throw InvalidArgument("cannot cover an empty set");
    const IdList ids = sorted_unique(space, E);
    const int k = static_cast<int>(ids.size());
    if (k > opts.size_cap || k > 64) return std::nullopt;
    if (k == 1) return 1;

    std::vector<Mask> adj(static_cast<std::size_t>(k), 0);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < i; ++j)
            if (space.dist(ids[i], ids[j]) <= r) {
                adj[i] |= Mask{1} << j;
                adj[j] |= Mask{1} << i;
            }

    const Mask all = k == 64 ? ~Mask{0} : (Mask{1} << k) - 1;
    CliqueSearch cs{adj, opts.clique_guard, {}, false};
    cs.run(0, all, 0);
    if (cs.aborted) return std::nullopt;

    SetCover sc{cs.cliques, std::vector<std::vector<int>>(static_cast<std::size_t>(k)), 1,
                greedy_cover_count(space, ids, r)};
    for (std::size_t s = 0; s < cs.cliques.size(); ++s) {
        sc.largest = std::max(sc.largest, std::popcount(cs.cliques[s]));
        for (Mask rest = cs.cliques[s]; rest; rest &= rest - 1)
            sc.holders[std::countr_zero(rest)].push_back(static_cast<int>(s));
    }
    sc.solve(all, 0);
    return sc.best;
}

CoverReport sandwich_check(const AdjacentFamily& family, std::span<const PointId> E, PointId x, double R, int m,
                           const ExactOptions& opts) {
    CoverReport rep = dyadic_cover_count(family, E, x, R, m);
    const MetricSpace& space = family.space();
    const auto in_E = membership_mask(space, E);
    IdList inter;
    for (PointId p : space.ball_members(x, R))
        if (in_E[p]) inter.push_back(p);
    if (inter.empty()) {
        rep.ratio = 0.0;
        return rep;
    }
    const GreedyCover g = greedy_cover(space, inter, rep.r_effective);
    rep.N_greedy = static_cast<long>(g.anchors.size());
    rep.witness_centers = g.anchors;
    rep.N_exact = exact_cover_count(space, inter, rep.r_effective, opts);
    const long N = rep.N_exact ? *rep.N_exact : rep.N_greedy;
    rep.ratio = static_cast<double>(rep.D) / static_cast<double>(N);
    rep.M0_hat = rep.ratio;
    return rep;
}

SandwichSweep sandwich_sweep(const AdjacentFamily& family, std::span<const PointId> E, int configs,
                             std::uint64_t seed, const ExactOptions& opts) {
    const MetricSpace& space = family.space();
    const IdList ids = sorted_unique(space, E);
    SandwichSweep out;
    if (ids.size() < 2 || configs <= 0) return out;

    Rng rng(seed);
    std::vector<double> dists(ids.size());
    const int cap = std::max(2, std::min<int>(opts.size_cap, static_cast<int>(ids.size())));
    while (static_cast<int>(out.reports.size()) < configs && out.attempts < 50 * configs) {
        ++out.attempts;
        const PointId x = ids[rng.below(ids.size())];
        const auto c = 2 + static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(cap - 1)));
        for (std::size_t i = 0; i < ids.size(); ++i) dists[i] = space.dist(x, ids[i]);
        std::nth_element(dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(c - 1), dists.end());
        const double R = closed(dists[c - 1]);
        CircumscribedCube cc;
        try {
            cc = family.circumscribed(x, R);
        } catch (const DegenerateBall&) {
            continue;
        }
        const int depth = family.system(cc.system_id).max_level() - cc.level;
        const int m = static_cast<int>(rng.below(static_cast<std::uint64_t>(depth) + 1));
        CoverReport rep = sandwich_check(family, ids, x, R, m, opts);
        if (!rep.N_exact) continue;
        if (rep.violation()) ++out.violations;
        out.M0_hat = std::max(out.M0_hat, rep.ratio);
        double& slot = out.M0_by_m[m];
        slot = std::max(slot, rep.ratio);
        out.reports.push_back(std::move(rep));
    }
    return out;
}

std::string cover_csv_header() { return "x_id,R,m,D,N_greedy,N_exact,r_effective,ratio"; }

std::string to_csv_row(const CoverReport& r) {
    std::ostringstream os;
    os << std::setprecision(17) << r.x << ',' << r.R << ',' << r.m << ',' << r.D << ',' << r.N_greedy << ',';
    if (r.N_exact) os << *r.N_exact;
    os << ',' << r.r_effective << ',' << r.ratio;
    return os.str();
}

}  // namespace dyadic
