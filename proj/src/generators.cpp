#include <dyadic/generators.hpp>

#include <dyadic/errors.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dyadic {

namespace {

void check_cap(double count, const std::string& what) {
    if (!(count <= kMaxGeneratedPoints)) {
        std::ostringstream msg;
        msg << what << " would produce " << count << " points (cap " << kMaxGeneratedPoints << ")";
        throw SizeError(msg.str());
    }
}

}  // namespace

std::string to_string(GeneratorKind kind) {
    switch (kind) {
        case GeneratorKind::Cantor: return "cantor";
        case GeneratorKind::Ifs: return "ifs";
        case GeneratorKind::Sequence: return "sequence";
        case GeneratorKind::Grid: return "grid";
        case GeneratorKind::UltrametricCantor: return "ultrametric_cantor";
    }
    return "?";
}

GeneratorKind generator_kind_from_string(const std::string& name) {
    for (GeneratorKind k : {GeneratorKind::Cantor, GeneratorKind::Ifs, GeneratorKind::Sequence, GeneratorKind::Grid,
                            GeneratorKind::UltrametricCantor})
        if (to_string(k) == name) return k;
    throw InvalidArgument("unknown generator '" + name + "'");
}

MetricSpace cantor(double ratio, int depth) {
    if (!(ratio > 0.0 && ratio < 0.5)) throw InvalidArgument("cantor ratio must lie in (0, 1/2)");
    if (depth < 0) throw InvalidArgument("cantor depth must be non-negative");
    check_cap(std::pow(2.0, depth), "cantor");
    const long n = 1L << depth;
    Eigen::MatrixXd pts(n, 1);
    // Bit i (from the top) picks the right child at stage i + 1, which
    // shifts the left endpoint by (1 - ratio) ratio^i.
    for (long code = 0; code < n; ++code) {
        double x = 0.0;
        double len = 1.0;
        for (int i = depth - 1; i >= 0; --i) {
            if ((code >> i) & 1L) x += len * (1.0 - ratio);
            len *= ratio;
        }
        pts(code, 0) = x;
    }
    return MetricSpace::euclidean(std::move(pts));
}

MetricSpace sequence(double p, long n_max) {
    if (!(p > 0.0)) throw InvalidArgument("sequence exponent must be positive");
    if (n_max < 1) throw InvalidArgument("sequence needs n_max >= 1");
    check_cap(static_cast<double>(n_max) + 1.0, "sequence");
    Eigen::MatrixXd pts(n_max + 1, 1);
    pts(0, 0) = 0.0;
    for (long k = 1; k <= n_max; ++k) pts(k, 0) = std::pow(static_cast<double>(k), -p);
    return MetricSpace::euclidean(std::move(pts));
}

MetricSpace grid(int dim, double resolution) {
    if (dim < 1) throw InvalidArgument("grid dimension must be at least 1");
    if (!(resolution > 0.0 && resolution <= 1.0)) throw InvalidArgument("grid resolution must lie in (0, 1]");
    const long steps = std::lround(1.0 / resolution);
    if (steps < 1 || std::abs(static_cast<double>(steps) * resolution - 1.0) > 1e-9)
        throw InvalidArgument("grid resolution must divide 1");
    const double per_axis = static_cast<double>(steps + 1);
    check_cap(std::pow(per_axis, dim), "grid");
    long n = 1;
    for (int d = 0; d < dim; ++d) n *= steps + 1;
    Eigen::MatrixXd pts(n, dim);
    for (long i = 0; i < n; ++i) {
        long rest = i;
        for (int d = dim - 1; d >= 0; --d) {
            pts(i, d) = static_cast<double>(rest % (steps + 1)) / static_cast<double>(steps);
            rest /= steps + 1;
        }
    }
    return MetricSpace::euclidean(std::move(pts));
}

MetricSpace ultrametric_cantor(int arity, double base, int depth) {
    if (arity < 2 || arity > 10) throw InvalidArgument("ultrametric arity must lie in 2..10");
    if (depth < 0) throw InvalidArgument("ultrametric depth must be non-negative");
    check_cap(std::pow(static_cast<double>(arity), depth), "ultrametric_cantor");
    long n = 1;
    for (int i = 0; i < depth; ++i) n *= arity;
    std::vector<std::string> symbols;
    symbols.reserve(static_cast<std::size_t>(n));
    for (long code = 0; code < n; ++code) {
        std::string s(static_cast<std::size_t>(depth), '0');
        long rest = code;
        for (int i = depth - 1; i >= 0; --i) {
            s[static_cast<std::size_t>(i)] = static_cast<char>('0' + rest % arity);
            rest /= arity;
        }
        symbols.push_back(std::move(s));
    }
    return MetricSpace::ultrametric(std::move(symbols), arity, base);
}

MetricSpace ifs(const std::vector<SimilarityMap>& maps, int depth) {
    if (maps.empty()) throw InvalidArgument("ifs needs at least one map");
    if (depth < 0) throw InvalidArgument("ifs depth must be non-negative");
    const auto dim = maps.front().translation.size();
    if (dim < 1) throw InvalidArgument("ifs maps need a translation vector");
    for (const SimilarityMap& f : maps) {
        if (!(f.ratio > 0.0 && f.ratio < 1.0)) throw InvalidArgument("ifs maps must be contractions (0 < ratio < 1)");
        if (f.translation.size() != dim) throw InvalidArgument("ifs maps disagree on dimension");
        if (f.rotation.size() != 0) {
            if (f.rotation.rows() != dim || f.rotation.cols() != dim)
                throw InvalidArgument("ifs rotation has the wrong shape");
            const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(dim, dim);
            if (!(f.rotation.transpose() * f.rotation).isApprox(I, 1e-9))
                throw InvalidArgument("ifs rotation must be orthogonal");
        }
    }
    check_cap(std::pow(static_cast<double>(maps.size()), depth), "ifs");

    std::vector<Eigen::VectorXd> pts{Eigen::VectorXd::Zero(dim)};
    for (int level = 0; level < depth; ++level) {
        std::vector<Eigen::VectorXd> next;
        next.reserve(pts.size() * maps.size());
        for (const SimilarityMap& f : maps)
            for (const Eigen::VectorXd& x : pts) {
                Eigen::VectorXd y = f.rotation.size() ? Eigen::VectorXd(f.rotation * x) : x;
                next.push_back(f.ratio * y + f.translation);
            }
        pts = std::move(next);
    }
    std::sort(pts.begin(), pts.end(), [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
        return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
    });
    pts.erase(std::unique(pts.begin(), pts.end(), [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
                  return a == b;
              }),
              pts.end());
    Eigen::MatrixXd out(static_cast<Eigen::Index>(pts.size()), dim);
    for (std::size_t i = 0; i < pts.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = pts[i].transpose();
    return MetricSpace::euclidean(std::move(out));
}

MetricSpace generate(const GeneratorSpec& spec) {
    switch (spec.kind) {
        case GeneratorKind::Cantor: return cantor(spec.ratio, spec.depth);
        case GeneratorKind::Ifs: return ifs(spec.maps, spec.depth);
        case GeneratorKind::Sequence: return sequence(spec.p, spec.n_max);
        case GeneratorKind::Grid: return grid(spec.dim, spec.resolution);
        case GeneratorKind::UltrametricCantor: return ultrametric_cantor(spec.arity, spec.base, spec.depth);
    }
    throw InvalidArgument("unknown generator kind");
}

MetricSpace snowflake_wrap(const MetricSpace& space, double epsilon) {
    if (!(epsilon > 0.0 && epsilon <= 1.0)) throw InvalidArgument("snowflake epsilon must lie in (0, 1]");
    return space.snowflake(epsilon);
}

}  // namespace dyadic
