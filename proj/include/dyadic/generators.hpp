#pragma once

#include <dyadic/metric_space.hpp>

#include <Eigen/Core>

#include <string>
#include <vector>

namespace dyadic {

/// Hard cap on generated point counts, checked before allocation.
inline constexpr double kMaxGeneratedPoints = 1e6;

/// x -> ratio * rotation * x + translation. An empty rotation is the identity.
struct SimilarityMap {
    double ratio = 0.5;
    Eigen::VectorXd translation;
    Eigen::MatrixXd rotation;
};

enum class GeneratorKind { Cantor, Ifs, Sequence, Grid, UltrametricCantor };
std::string to_string(GeneratorKind kind);
GeneratorKind generator_kind_from_string(const std::string& name);

struct GeneratorSpec {
    GeneratorKind kind = GeneratorKind::Cantor;
    double ratio = 1.0 / 3.0;  // cantor
    int depth = 8;             // cantor, ifs, ultrametric_cantor
    double p = 1.0;            // sequence
    long n_max = 1000;         // sequence
    int dim = 1;               // grid
    double resolution = 1.0 / 64.0;  // grid step
    int arity = 2;             // ultrametric_cantor
    double base = 1.0 / 16.0;  // ultrametric_cantor
    std::vector<SimilarityMap> maps;  // ifs
};

/// Left endpoints of the depth-n intervals, ascending.
MetricSpace cantor(double ratio, int depth);
/// The point 0 as id 0, then k^-p for k = 1..n_max.
MetricSpace sequence(double p, long n_max);
/// Lattice {0, h, 2h, ..., 1}^dim in lexicographic order.
MetricSpace grid(int dim, double resolution);
/// All arity^depth strings of length depth, lexicographic, metric base^lcp.
MetricSpace ultrametric_cantor(int arity, double base, int depth);
/// Images of the origin under every depth-fold composition; exact
/// duplicates are merged and rows are sorted.
MetricSpace ifs(const std::vector<SimilarityMap>& maps, int depth);

MetricSpace generate(const GeneratorSpec& spec);

MetricSpace snowflake_wrap(const MetricSpace& space, double epsilon);

}  // namespace dyadic
