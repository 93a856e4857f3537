#include <dyadic/net.hpp>

#include <dyadic/errors.hpp>
#include <dyadic/random.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace dyadic {

void CubeParams::validate() const {
    if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0,1)");
    if (!(c0 > 0.0)) throw ConfigError("c0 must be positive");
    if (!(c0 <= C0)) throw ConfigError("c0 <= C0 required");
    const double lhs = 12.0 * C0 * delta;
    if (lhs > c0) {
        std::ostringstream msg;
        msg << "12·C0·delta = " << lhs << " > c0 = " << c0 << " (need 12·C0·delta <= c0)";
        throw ConfigError(msg.str());
    }
}

double NetLevel::separation_radius() const { return params.c0 * std::pow(params.delta, level) / scale; }

double NetLevel::covering_radius() const { return params.C0 * std::pow(params.delta, level) / scale; }

IdList shuffled_order(std::size_t n, std::uint64_t seed) {
    IdList order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    rng.shuffle(std::span<PointId>(order));
    return order;
}

NetLevel build_net(const MetricSpace& space, int k, const CubeParams& params, std::uint64_t seed, double scale) {
    params.validate();
    if (k < 0) throw InvalidArgument("net level must be non-negative");
    if (!(scale > 0.0)) throw InvalidArgument("scale must be positive");

    NetLevel net;
    net.level = k;
    net.params = params;
    net.seed = seed;
    net.scale = scale;
    net.space_fingerprint = space.fingerprint();
    net.space_size = space.size();

    // "covered" means strictly closer than the separation radius to an
    // admitted center, which is exactly the rejection condition.
    const double t = net.separation_radius();
    std::vector<char> covered(space.size(), 0);
    IdList ball;
    for (PointId p : shuffled_order(space.size(), seed)) {
        if (covered[p]) continue;
        net.centers.push_back(p);
        space.ball_members_into(p, t, ball);
        for (PointId q : ball) covered[q] = 1;
    }
    std::sort(net.centers.begin(), net.centers.end());
    return net;
}

NetVerification verify_net(const MetricSpace& space, const NetLevel& net) {
    if (net.space_size != space.size() || net.space_fingerprint != space.fingerprint())
        throw InvalidArgument("net was built over a different space");

    NetVerification v;
    const double sep = net.separation_radius();
    const double cov = net.covering_radius();
    std::vector<char> is_center(space.size(), 0);
    for (PointId z : net.centers) is_center[z] = 1;

    // Closest center pair: widen the probe until some pair shows up.
    double best = std::numeric_limits<double>::infinity();
    if (net.centers.size() > 1) {
        IdList ball;
        for (double probe = 2.0 * sep; !std::isfinite(best); probe *= 4.0) {
            for (PointId z : net.centers) {
                space.ball_members_into(z, probe, ball);
                for (PointId q : ball) {
                    if (q == z || !is_center[q]) continue;
                    const double d = space.dist(z, q);
                    if (d < best || (d == best && std::min(z, q) < v.separation_witness_a)) {
                        best = d;
                        v.separation_witness_a = std::min(z, q);
                        v.separation_witness_b = std::max(z, q);
                    }
                }
            }
            if (probe > 4.0 * space.diameter() + sep) break;
        }
    }
    v.worst_separation_ratio = best / sep;
    v.separation_ok = !(best < sep);

    // Farthest point from the net.
    double worst = 0.0;
    IdList ball;
    for (std::size_t x = 0; x < space.size(); ++x) {
        const auto p = static_cast<PointId>(x);
        double nearest = std::numeric_limits<double>::infinity();
        for (double probe = 2.0 * cov; !std::isfinite(nearest); probe *= 4.0) {
            space.ball_members_into(p, probe, ball);
            for (PointId q : ball)
                if (is_center[q]) nearest = std::min(nearest, space.dist(p, q));
            if (probe > 4.0 * space.diameter() + cov) break;
        }
        if (nearest > worst) {
            worst = nearest;
            v.covering_witness = p;
        }
    }
    v.worst_covering_ratio = worst / cov;
    v.covering_ok = worst < cov;
    return v;
}

}  // namespace dyadic
