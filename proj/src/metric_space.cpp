#include <dyadic/metric_space.hpp>

#include <dyadic/errors.hpp>
#include <dyadic/random.hpp>
#include <dyadic/spatial_index.hpp>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <set>

namespace dyadic {

namespace {

// Radius slack for index candidate queries; the exact metric filters after.
constexpr double kCandidateSlack = 1.0 + 1e-9;

void fnv_mix(std::uint64_t& h, const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
}

}  // namespace

std::string to_string(MetricKind kind) {
    switch (kind) {
        case MetricKind::Euclidean: return "euclidean";
        case MetricKind::Matrix: return "matrix";
        case MetricKind::Snowflake: return "snowflake";
        case MetricKind::Ultrametric: return "ultrametric";
    }
    return "unknown";
}

MetricKind metric_kind_from_string(const std::string& name) {
    if (name == "euclidean") return MetricKind::Euclidean;
    if (name == "matrix") return MetricKind::Matrix;
    if (name == "snowflake") return MetricKind::Snowflake;
    if (name == "ultrametric") return MetricKind::Ultrametric;
    throw InvalidArgument("unknown metric kind '" + name + "'");
}

struct MetricSpace::Payload {
    Eigen::MatrixXd coords;
    std::vector<std::string> symbols;
    std::vector<PointId> symbol_order;  // ids sorted by symbol
    std::vector<int> symbol_rank;       // inverse of symbol_order
    Eigen::MatrixXd matrix;
    std::unique_ptr<KdTree> kd;
};

MetricSpace MetricSpace::euclidean(Eigen::MatrixXd coords, const SpaceOptions& opts) {
    if (coords.rows() == 0) throw InvalidArgument("euclidean space needs at least one point");
    if (coords.cols() == 0) throw InvalidArgument("euclidean points need at least one coordinate");
    if (!coords.allFinite()) throw InvalidArgument("euclidean coordinates must be finite");
    {
        std::set<std::vector<double>> seen;
        for (Eigen::Index i = 0; i < coords.rows(); ++i) {
            std::vector<double> row(coords.cols());
            for (Eigen::Index d = 0; d < coords.cols(); ++d) row[d] = coords(i, d);
            if (!seen.insert(std::move(row)).second)
                throw InvalidArgument("duplicate point at id " + std::to_string(i));
        }
    }
    auto payload = std::make_shared<Payload>();
    payload->kd = std::make_unique<KdTree>(coords);
    payload->coords = std::move(coords);

    MetricSpace s;
    s.n_ = static_cast<std::size_t>(payload->coords.rows());
    s.desc_.kind = MetricKind::Euclidean;
    s.opts_ = opts;
    s.payload_ = std::move(payload);
    s.finish_construction();
    return s;
}

MetricSpace MetricSpace::ultrametric(std::vector<std::string> symbols, int arity, double base,
                                     const SpaceOptions& opts) {
    if (symbols.empty()) throw InvalidArgument("ultrametric space needs at least one point");
    if (arity < 2) throw InvalidArgument("ultrametric arity must be >= 2");
    if (!(base > 0.0 && base < 1.0)) throw InvalidArgument("ultrametric base must lie in (0,1)");
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        for (char c : symbols[i]) {
            const int digit = c - '0';
            if (digit < 0 || digit >= arity)
                throw InvalidArgument("symbol '" + symbols[i] + "' uses a digit outside the arity");
        }
    }
    auto payload = std::make_shared<Payload>();
    payload->symbols = std::move(symbols);
    const auto n = payload->symbols.size();
    payload->symbol_order.resize(n);
    std::iota(payload->symbol_order.begin(), payload->symbol_order.end(), 0);
    std::sort(payload->symbol_order.begin(), payload->symbol_order.end(),
              [&](PointId a, PointId b) { return payload->symbols[a] < payload->symbols[b]; });
    payload->symbol_rank.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        payload->symbol_rank[payload->symbol_order[k]] = static_cast<int>(k);
        if (k > 0 && payload->symbols[payload->symbol_order[k]] == payload->symbols[payload->symbol_order[k - 1]])
            throw InvalidArgument("duplicate symbol '" + payload->symbols[payload->symbol_order[k]] + "'");
    }

    MetricSpace s;
    s.n_ = n;
    s.desc_.kind = MetricKind::Ultrametric;
    s.desc_.arity = arity;
    s.desc_.base = base;
    s.opts_ = opts;
    s.payload_ = std::move(payload);
    s.finish_construction();
    return s;
}

MetricSpace MetricSpace::from_matrix(Eigen::MatrixXd distances, const SpaceOptions& opts) {
    const auto n = distances.rows();
    if (n == 0) throw InvalidArgument("matrix space needs at least one point");
    if (distances.cols() != n) throw InvalidArgument("distance matrix must be square");
    for (Eigen::Index i = 0; i < n; ++i) {
        if (distances(i, i) != 0.0) throw InvalidArgument("distance matrix diagonal must be zero");
        for (Eigen::Index j = 0; j < i; ++j) {
            const double d = distances(i, j);
            if (!std::isfinite(d) || d <= 0.0)
                throw InvalidArgument("distance between distinct points " + std::to_string(i) + "," +
                                      std::to_string(j) + " must be positive and finite");
            if (distances(j, i) != d) throw InvalidArgument("distance matrix must be symmetric");
        }
    }
    if (n >= 3) {
        Rng rng(0x7269616eULL);
        for (int t = 0; t < opts.triangle_samples; ++t) {
            const auto p = static_cast<Eigen::Index>(rng.below(n));
            const auto q = static_cast<Eigen::Index>(rng.below(n));
            const auto m = static_cast<Eigen::Index>(rng.below(n));
            const double lhs = distances(p, q);
            const double rhs = distances(p, m) + distances(m, q);
            if (lhs > rhs * (1.0 + 1e-12))
                throw InvalidArgument("triangle inequality fails for (" + std::to_string(p) + "," +
                                      std::to_string(q) + ") via " + std::to_string(m));
        }
    }
    auto payload = std::make_shared<Payload>();
    payload->matrix = std::move(distances);

    MetricSpace s;
    s.n_ = static_cast<std::size_t>(n);
    s.desc_.kind = MetricKind::Matrix;
    s.opts_ = opts;
    s.payload_ = std::move(payload);
    s.finish_construction();
    return s;
}

MetricSpace MetricSpace::snowflake(double epsilon) const {
    if (!(epsilon > 0.0 && epsilon <= 1.0)) throw InvalidArgument("snowflake epsilon must lie in (0,1]");
    MetricSpace s;
    s.n_ = n_;
    s.opts_ = opts_;
    s.payload_ = payload_;
    s.desc_ = desc_;
    if (desc_.kind == MetricKind::Snowflake) {
        s.desc_.epsilon = desc_.epsilon * epsilon;
    } else {
        s.desc_.base_kind = desc_.kind;
        s.desc_.kind = MetricKind::Snowflake;
        s.desc_.epsilon = epsilon;
    }
    s.finish_construction();
    return s;
}

void MetricSpace::finish_construction() {
    cache_.reset();
    if (n_ <= opts_.cache_cap && n_ > 1) {
        auto m = std::make_shared<Eigen::MatrixXd>(n_, n_);
        for (std::size_t i = 0; i < n_; ++i) {
            (*m)(i, i) = 0.0;
            for (std::size_t j = 0; j < i; ++j) {
                const double d = dist(static_cast<PointId>(i), static_cast<PointId>(j));
                (*m)(i, j) = d;
                (*m)(j, i) = d;
            }
        }
        cache_ = std::move(m);
    }
    IdList all(n_);
    std::iota(all.begin(), all.end(), 0);
    diameter_ = diameter(all);

    // Smallest positive distance, by kind.
    const double eps = desc_.kind == MetricKind::Snowflake ? desc_.epsilon : 1.0;
    double base_min = 0.0;
    if (n_ > 1) {
        switch (desc_.payload_kind()) {
            case MetricKind::Ultrametric: {
                int best = 0;
                const auto& sym = payload_->symbols;
                const auto& ord = payload_->symbol_order;
                for (std::size_t k = 1; k < n_; ++k)
                    best = std::max(best, common_prefix(sym[ord[k - 1]], sym[ord[k]]));
                base_min = std::pow(desc_.base, best);
                break;
            }
            case MetricKind::Euclidean:
                if (payload_->coords.cols() == 1) {
                    std::vector<double> xs(payload_->coords.col(0).data(), payload_->coords.col(0).data() + n_);
                    std::sort(xs.begin(), xs.end());
                    base_min = std::numeric_limits<double>::infinity();
                    for (std::size_t k = 1; k < n_; ++k) base_min = std::min(base_min, xs[k] - xs[k - 1]);
                    break;
                }
                [[fallthrough]];
            default: {
                base_min = std::numeric_limits<double>::infinity();
                for (std::size_t i = 0; i < n_; ++i)
                    for (std::size_t j = 0; j < i; ++j)
                        base_min = std::min(base_min, base_dist(static_cast<PointId>(i), static_cast<PointId>(j)));
                break;
            }
        }
    }
    min_positive_ = (eps == 1.0 || n_ <= 1) ? base_min : std::pow(base_min, eps);
}

const Eigen::MatrixXd& MetricSpace::coords() const {
    if (desc_.payload_kind() != MetricKind::Euclidean) throw InvalidArgument("space has no coordinates");
    return payload_->coords;
}

const std::vector<std::string>& MetricSpace::symbols() const {
    if (desc_.payload_kind() != MetricKind::Ultrametric) throw InvalidArgument("space has no symbols");
    return payload_->symbols;
}

const Eigen::MatrixXd& MetricSpace::base_matrix() const {
    if (desc_.payload_kind() != MetricKind::Matrix) throw InvalidArgument("space has no distance matrix");
    return payload_->matrix;
}

int MetricSpace::common_prefix(const std::string& a, const std::string& b) {
    const std::size_t n = std::min(a.size(), b.size());
    std::size_t k = 0;
    while (k < n && a[k] == b[k]) ++k;
    return static_cast<int>(k);
}

double MetricSpace::base_dist(PointId p, PointId q) const {
    if (p == q) return 0.0;
    switch (desc_.payload_kind()) {
        case MetricKind::Euclidean: {
            const auto& c = payload_->coords;
            double s = 0.0;
            for (Eigen::Index d = 0; d < c.cols(); ++d) {
                const double t = c(p, d) - c(q, d);
                s += t * t;
            }
            return std::sqrt(s);
        }
        case MetricKind::Ultrametric:
            return std::pow(desc_.base, common_prefix(payload_->symbols[p], payload_->symbols[q]));
        case MetricKind::Matrix:
            return payload_->matrix(p, q);
        case MetricKind::Snowflake:
            break;
    }
    return 0.0;
}

double MetricSpace::dist(PointId p, PointId q) const {
    if (cache_) return (*cache_)(p, q);
    const double b = base_dist(p, q);
    if (desc_.kind != MetricKind::Snowflake || desc_.epsilon == 1.0) return b;
    return std::pow(b, desc_.epsilon);
}

double MetricSpace::distance(PointId p, PointId q) const {
    if (!valid_id(p) || !valid_id(q))
        throw InvalidArgument("unknown point id " + std::to_string(valid_id(p) ? q : p));
    return dist(p, q);
}

void MetricSpace::ball_members_into(PointId x, double r, IdList& out) const {
    out.clear();
    if (!valid_id(x)) throw InvalidArgument("unknown point id " + std::to_string(x));
    if (!(r > 0.0)) throw InvalidArgument("ball radius must be positive");

    const bool snow = desc_.kind == MetricKind::Snowflake && desc_.epsilon != 1.0;
    const double base_r = (snow ? std::pow(r, 1.0 / desc_.epsilon) : r) * kCandidateSlack;

    switch (desc_.payload_kind()) {
        case MetricKind::Euclidean: {
            const auto& c = payload_->coords;
            std::vector<double> q(c.cols());
            for (Eigen::Index d = 0; d < c.cols(); ++d) q[d] = c(x, d);
            payload_->kd->radius_candidates(q.data(), base_r * base_r, out);
            break;
        }
        case MetricKind::Ultrametric: {
            // Candidates share a prefix of length ell with x, ell the first
            // level whose distance drops below the radius.
            const auto& sym = payload_->symbols;
            const auto& ord = payload_->symbol_order;
            const std::string& sx = sym[x];
            int ell = 0;
            while (ell <= static_cast<int>(sx.size()) && !(std::pow(desc_.base, ell) < base_r)) ++ell;
            if (ell > static_cast<int>(sx.size())) {
                out.push_back(x);
                break;
            }
            const std::string prefix = sx.substr(0, static_cast<std::size_t>(ell));
            const int rank = payload_->symbol_rank[x];
            int lo = rank, hi = rank;
            while (lo > 0 && sym[ord[lo - 1]].compare(0, prefix.size(), prefix) == 0) --lo;
            while (hi + 1 < static_cast<int>(n_) && sym[ord[hi + 1]].compare(0, prefix.size(), prefix) == 0) ++hi;
            for (int k = lo; k <= hi; ++k) out.push_back(ord[k]);
            break;
        }
        default:
            for (std::size_t q = 0; q < n_; ++q) out.push_back(static_cast<PointId>(q));
            break;
    }
    std::erase_if(out, [&](PointId q) { return !(dist(x, q) < r); });
}

IdList MetricSpace::ball_members(PointId x, double r) const {
    IdList out;
    ball_members_into(x, r, out);
    std::sort(out.begin(), out.end());
    return out;
}

// Farthest pair lies on the convex hull (Andrew's monotone chain).
double MetricSpace::planar_hull_diameter(std::span<const PointId> subset) const {
    const Eigen::MatrixXd& c = payload_->coords;
    IdList pts(subset.begin(), subset.end());
    std::sort(pts.begin(), pts.end(), [&](PointId a, PointId b) {
        return c(a, 0) < c(b, 0) || (c(a, 0) == c(b, 0) && c(a, 1) < c(b, 1));
    });
    auto cross = [&](PointId o, PointId a, PointId b) {
        return (c(a, 0) - c(o, 0)) * (c(b, 1) - c(o, 1)) - (c(a, 1) - c(o, 1)) * (c(b, 0) - c(o, 0));
    };
    IdList hull(2 * pts.size());
    std::size_t h = 0;
    for (PointId p : pts) {
        while (h >= 2 && cross(hull[h - 2], hull[h - 1], p) <= 0) --h;
        hull[h++] = p;
    }
    for (std::size_t i = pts.size() - 1, lower = h + 1; i-- > 0;) {
        while (h >= lower && cross(hull[h - 2], hull[h - 1], pts[i]) <= 0) --h;
        hull[h++] = pts[i];
    }
    hull.resize(h > 1 ? h - 1 : h);
    double best = 0.0;
    for (std::size_t i = 0; i < hull.size(); ++i)
        for (std::size_t j = 0; j < i; ++j) best = std::max(best, base_dist(hull[i], hull[j]));
    return best;
}

double MetricSpace::base_diameter(std::span<const PointId> subset) const {
    if (subset.size() <= 1) return 0.0;
    switch (desc_.payload_kind()) {
        case MetricKind::Euclidean:
            if (payload_->coords.cols() == 1) {
                double lo = std::numeric_limits<double>::infinity(), hi = -lo;
                for (PointId p : subset) {
                    lo = std::min(lo, payload_->coords(p, 0));
                    hi = std::max(hi, payload_->coords(p, 0));
                }
                return hi - lo;
            }
            if (payload_->coords.cols() == 2 && subset.size() > 64) return planar_hull_diameter(subset);
            break;
        case MetricKind::Ultrametric: {
            // Strong triangle inequality: the diameter is attained from any member.
            double best = 0.0;
            for (PointId q : subset) best = std::max(best, base_dist(subset.front(), q));
            return best;
        }
        default:
            break;
    }
    double best = 0.0;
    for (std::size_t i = 0; i < subset.size(); ++i)
        for (std::size_t j = 0; j < i; ++j) best = std::max(best, base_dist(subset[i], subset[j]));
    return best;
}

double MetricSpace::diameter(std::span<const PointId> subset) const {
    if (subset.empty()) throw InvalidArgument("diameter of an empty subset");
    for (PointId p : subset)
        if (!valid_id(p)) throw InvalidArgument("unknown point id " + std::to_string(p));
    const double b = base_diameter(subset);
    if (desc_.kind != MetricKind::Snowflake || desc_.epsilon == 1.0) return b;
    return std::pow(b, desc_.epsilon);
}

double MetricSpace::diameter() const { return diameter_; }

double MetricSpace::min_positive_distance() const { return min_positive_; }

std::uint64_t MetricSpace::fingerprint() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    const int kind = static_cast<int>(desc_.kind), base_kind = static_cast<int>(desc_.base_kind);
    fnv_mix(h, &kind, sizeof kind);
    if (desc_.kind == MetricKind::Snowflake) {
        fnv_mix(h, &base_kind, sizeof base_kind);
        fnv_mix(h, &desc_.epsilon, sizeof desc_.epsilon);
    }
    const std::uint64_t n = n_;
    fnv_mix(h, &n, sizeof n);
    switch (desc_.payload_kind()) {
        case MetricKind::Euclidean: {
            const auto& c = payload_->coords;
            const std::uint64_t dim = static_cast<std::uint64_t>(c.cols());
            fnv_mix(h, &dim, sizeof dim);
            for (Eigen::Index i = 0; i < c.rows(); ++i)
                for (Eigen::Index d = 0; d < c.cols(); ++d) {
                    const double v = c(i, d);
                    fnv_mix(h, &v, sizeof v);
                }
            break;
        }
        case MetricKind::Ultrametric:
            fnv_mix(h, &desc_.arity, sizeof desc_.arity);
            fnv_mix(h, &desc_.base, sizeof desc_.base);
            for (const auto& s : payload_->symbols) {
                fnv_mix(h, s.data(), s.size());
                fnv_mix(h, "|", 1);
            }
            break;
        default: {
            const auto& m = payload_->matrix;
            for (Eigen::Index i = 0; i < m.rows(); ++i)
                for (Eigen::Index j = 0; j < i; ++j) {
                    const double v = m(i, j);
                    fnv_mix(h, &v, sizeof v);
                }
            break;
        }
    }
    return h;
}

DoublingEstimate estimate_doubling(const MetricSpace& space, int sample_count, std::uint64_t rng_seed) {
    if (sample_count < 1) throw InvalidArgument("sample_count must be >= 1");
    DoublingEstimate est;
    est.samples_used = sample_count;
    const auto n = space.size();
    if (n <= 1) {
        est.radii_probed.assign(static_cast<std::size_t>(sample_count), 1.0);
        return est;
    }
    const double lo = std::log(space.min_positive_distance());
    const double hi = std::log(space.diameter());
    Rng rng(rng_seed);
    IdList big, small;
    std::vector<char> covered(n, 0);
    for (int s = 0; s < sample_count; ++s) {
        const auto x = static_cast<PointId>(rng.below(n));
        const double r = std::exp(rng.uniform(lo, hi));
        est.radii_probed.push_back(r);

        space.ball_members_into(x, 2.0 * r, big);
        std::sort(big.begin(), big.end());
        for (PointId q : big) covered[q] = 0;
        int count = 0;
        for (PointId c : big) {
            if (covered[c]) continue;
            ++count;
            space.ball_members_into(c, r, small);
            for (PointId q : small) covered[q] = 1;
        }
        est.C_d_hat = std::max(est.C_d_hat, count);
    }
    return est;
}

}  // namespace dyadic
