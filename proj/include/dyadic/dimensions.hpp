#pragma once

#include <dyadic/adjacent_family.hpp>
#include <dyadic/covering.hpp>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dyadic {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;  // root mean square
    int points = 0;
};

/// Ordinary least squares y = slope * x + intercept. Needs two points.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

struct MeasureValue {
    double s = 0.0;
    double r = 0.0;
    double value = 0.0;
    int m_star = -1;
    bool saturated = false;  // the infimum sits on the deepest usable level
};

struct MeasureOptions {
    /// Extra upper bound on m; negative means none.
    int m_cap = -1;
};

/// Deepest level at which some cube meeting E still has positive diameter
/// (0 when E is a single point). Beyond it every level sum degenerates.
int deepest_informative_level(const CubeSystem& system, std::span<const PointId> E);

/// min over admissible m (4 C0 delta^m <= scale * r) of sum |Q|^s over the
/// level-m cubes meeting E, with 0^0 = 1. Throws ScaleExhausted when no
/// admissible level is available.
MeasureValue cubic_measure(const CubeSystem& system, std::span<const PointId> E, double s, double r,
                           const MeasureOptions& opts = {});

/// Raw radius whose first admissible level is m: 4 C0 delta^m / scale.
double measure_radius(const CubeSystem& system, int m);

/// Sum of diam^s over the greedy diameter-<=r clusters of E.
double greedy_hausdorff_sum(const MetricSpace& space, std::span<const PointId> E, double s, double r);

enum class EstimateKind { Hausdorff, Box, AssouadTheta, Assouad };
std::string to_string(EstimateKind kind);

struct DimensionEstimate {
    EstimateKind kind = EstimateKind::Box;
    std::optional<double> theta;
    double value = 0.0;
    double window_lo = 0.0;
    double window_hi = 0.0;
    std::string window_unit = "m";  // "m" (levels) or "r" (radii)
    LineFit fit;
    int system_id = 0;
    std::uint64_t seed = 0;
    std::vector<std::string> flags;
    /// Hausdorff: (s, slope) pairs. Box: (m, D) pairs.
    std::vector<std::pair<double, double>> diagnostics;

    bool has_flag(const std::string& f) const;
};

struct HausdorffOptions {
    /// Schedule levels j (radius 4 C0 delta^j / scale); empty picks
    /// 0..deepest informative level.
    std::vector<int> levels;
    /// Points at which slopes are reported and monotonicity is checked;
    /// empty uses 11 evenly spaced values over the bisection interval.
    std::vector<double> s_grid;
    /// Upper end of the bisection interval; negative uses log2 of the
    /// sampled doubling constant.
    double s_max = -1.0;
    int doubling_samples = 200;
    int iterations = 20;
    double tolerance = 1e-3;
    std::uint64_t seed = 1;
};

DimensionEstimate hausdorff_dim_estimate(const CubeSystem& system, std::span<const PointId> E,
                                         const HausdorffOptions& opts = {});

struct BoxOptions {
    /// Use delta^(L_R + m_E) <= |E| for the lower end instead of delta^m_E <= |E|.
    bool sharp_m_E = false;
    /// Explicit window; negative ends are picked automatically.
    int m_lo = -1;
    int m_hi = -1;
};

/// Slope of log D(E, m) against m log(1/delta) inside Q(x, R).
DimensionEstimate box_dim_estimate(const AdjacentFamily& family, std::span<const PointId> E, PointId x, double R,
                                   const BoxOptions& opts = {});
/// Same with the smallest E-point as x and a ball holding all of E.
DimensionEstimate box_dim_estimate(const AdjacentFamily& family, std::span<const PointId> E,
                                   const BoxOptions& opts = {});

struct SweepOptions {
    int sample_budget = 512;
    std::uint64_t seed = 1;
    int threads = 1;
};

/// One (x, R) ball of the Assouad sweeps with its local counts.
struct SweepRow {
    PointId x = -1;
    int j = 0;          // R = delta^((j + 1/2) / 4) / scale
    double R = 0.0;     // raw radius after the two-point convention
    double R_norm = 0.0;
    int system_id = 0;
    int level = 0;      // L_R
    int depth = 0;      // deepest m available
    std::vector<long> counts;  // D(E ∩ B, m), m = 0..depth
};

struct LocalSweep {
    std::vector<PointId> centers;
    std::vector<SweepRow> rows;
    double C_tilde = 0.0;
    double delta = 0.0;
    std::uint64_t seed = 0;
    bool best_effort = false;
};

/// The x-sample: all of E up to sample_budget points, otherwise a seeded
/// sample plus the extremal points.
IdList sweep_centers(const MetricSpace& space, std::span<const PointId> E, int budget, std::uint64_t seed);

LocalSweep local_sweep(const AdjacentFamily& family, std::span<const PointId> E, const SweepOptions& opts = {});

/// theta in (0, 1); theta = 1 is the Assouad restriction C_tilde delta^m R <= R.
DimensionEstimate spectrum_from_sweep(const LocalSweep& sweep, double theta);
DimensionEstimate assouad_from_sweep(const LocalSweep& sweep);

DimensionEstimate assouad_spectrum_estimate(const AdjacentFamily& family, std::span<const PointId> E, double theta,
                                            const SweepOptions& opts = {});
DimensionEstimate assouad_dim_estimate(const AdjacentFamily& family, std::span<const PointId> E,
                                       const SweepOptions& opts = {});

/// Long-form CSV of a sweep: x_id,R,system_id,L_R,m,D.
std::string sweep_csv(const LocalSweep& sweep);

/// M^s_r against the greedy sum along the measure schedule.
struct ComparabilityRow {
    int level = 0;
    double r = 0.0;
    double M = 0.0;
    double H_greedy = 0.0;  // best greedy sum over schedule radii <= r
    double ratio = 0.0;  // M / H_greedy
};
struct Comparability {
    double s = 0.0;
    std::vector<ComparabilityRow> rows;
    bool lower_bound_holds = true;  // M >= H_greedy on every row
    double C = 0.0;                 // max ratio
    double spread = 0.0;            // max ratio / min ratio
};
Comparability compare_with_greedy(const CubeSystem& system, std::span<const PointId> E, double s,
                                  std::vector<int> levels = {});

}  // namespace dyadic
