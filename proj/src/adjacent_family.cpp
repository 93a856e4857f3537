#include <dyadic/adjacent_family.hpp>

#include <dyadic/errors.hpp>
#include <dyadic/random.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace dyadic {

AdjacentFamily AdjacentFamily::assemble(std::vector<CubeSystem> systems, double C_delta_hat, double target_ratio,
                                        bool best_effort) {
    if (systems.empty()) throw InvalidArgument("a family needs at least one system");
    for (const CubeSystem& s : systems) {
        if (!(s.params() == systems.front().params())) throw InvalidArgument("systems disagree on parameters");
        if (s.space().fingerprint() != systems.front().space().fingerprint())
            throw InvalidArgument("systems were built over different spaces");
        if (s.scale() != systems.front().scale()) throw InvalidArgument("systems disagree on normalisation");
    }
    if (!(C_delta_hat >= 1.0)) throw InvalidArgument("C_delta_hat must be at least 1");
    AdjacentFamily f;
    f.systems_ = std::move(systems);
    f.C_delta_hat_ = C_delta_hat;
    f.target_ratio_ = target_ratio;
    f.best_effort_ = best_effort;
    return f;
}

int AdjacentFamily::max_level() const {
    int L = std::numeric_limits<int>::max();
    for (const CubeSystem& s : systems_) L = std::min(L, s.max_level());
    return L;
}

double AdjacentFamily::C_tilde() const { return 12.0 * params().C0 * C_delta_hat_ / params().c0; }

CircumscribedCube AdjacentFamily::search(PointId x, double R, std::size_t system_count) const {
    const MetricSpace& sp = space();
    if (!sp.valid_id(x)) throw InvalidArgument("unknown point id " + std::to_string(x));
    if (!(R > 0.0)) throw InvalidArgument("ball radius must be positive");
    const IdList ball = sp.ball_members(x, R);
    if (ball.size() < 2) throw DegenerateBall("ball around point " + std::to_string(x) + " holds a single point");

    CircumscribedCube out;
    out.requested_R = R;
    out.R = std::min(R, 2.0 * sp.diameter(ball));

    bool found = false;
    for (std::size_t t = 0; t < system_count; ++t) {
        const CubeSystem& s = systems_[t];
        // Exit distances shrink with depth; take the deepest cube still holding the ball.
        int k = s.max_level();
        while (k > 0 && s.exit_distance(k, x) < R) --k;
        const DyadicCube q = cube_of(s, x, k);
        const bool better = !found || q.diameter < out.cube.diameter ||
                            (q.diameter == out.cube.diameter && q.level > out.level);
        if (better) {
            found = true;
            out.system_id = s.system_id();
            out.cube = q;
            out.level = k;
        }
    }

    const CubeParams& p = params();
    const double qd = out.cube.diameter;
    out.ratio = qd / out.R;
    const double inner = p.c0 * std::pow(p.delta, out.level) / (3.0 * scale() * out.R);
    out.certificate = std::max({out.ratio, out.R / qd, inner});
    out.flagged = out.certificate > C_delta_hat_ * (1.0 + 1e-12);
    return out;
}

CircumscribedCube AdjacentFamily::circumscribed(PointId x, double R) const { return search(x, R, systems_.size()); }

CircumscribedCube circumscribed_cube(const AdjacentFamily& family, PointId x, double R) {
    return family.circumscribed(x, R);
}

std::vector<std::pair<PointId, double>> family_query_sample(const MetricSpace& space, int budget,
                                                             std::uint64_t seed) {
    std::vector<std::pair<PointId, double>> out;
    if (space.size() < 2 || budget <= 0) return out;
    const double lo = std::log(space.min_positive_distance());
    const double hi = std::log(space.diameter());
    Rng rng(seed ^ 0x5eed0f5a11c0ffeeULL);
    out.reserve(static_cast<std::size_t>(budget));
    for (int i = 0; i < budget; ++i) {
        const auto x = static_cast<PointId>(rng.below(space.size()));
        // Slightly above the smallest gap so most sampled balls hold two points.
        const double R = std::exp(rng.uniform(lo, hi)) * 1.000001;
        out.emplace_back(x, R);
    }
    return out;
}

AdjacentFamily build_adjacent_family(const MetricSpace& space, const CubeParams& params, const FamilyOptions& opts) {
    params.validate();
    if (opts.K_max < 1) throw ConfigError("K_max must be at least 1");
    if (opts.query_budget < 0) throw ConfigError("query budget must be non-negative");
    if (!(opts.target_ratio >= 1.0)) throw ConfigError("target ratio must be at least 1");

    const auto sample = family_query_sample(space, opts.query_budget, opts.seed);
    AdjacentFamily f;
    f.target_ratio_ = opts.target_ratio;
    f.C_delta_hat_ = std::numeric_limits<double>::infinity();  // nothing is flagged while searching

    double worst = 1.0;
    for (int t = 0; t < opts.K_max; ++t) {
        f.systems_.push_back(build_system(space, params, opts.seed + static_cast<std::uint64_t>(t), opts.build, t));
        worst = 1.0;
        f.queries_.clear();
        for (const auto& [x, R] : sample) {
            QueryRecord rec{x, R};
            try {
                const CircumscribedCube c = f.search(x, R, f.systems_.size());
                rec.system_id = c.system_id;
                rec.level = c.level;
                rec.certificate = c.certificate;
                worst = std::max(worst, c.certificate);
            } catch (const DegenerateBall&) {
                rec.degenerate = true;
            }
            f.queries_.push_back(rec);
        }
        if (worst <= opts.target_ratio) break;
    }
    f.C_delta_hat_ = worst;
    f.best_effort_ = worst > opts.target_ratio;
    return f;
}

}  // namespace dyadic
