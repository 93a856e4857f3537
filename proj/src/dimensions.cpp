#include <dyadic/dimensions.hpp>

#include <dyadic/errors.hpp>
#include <dyadic/random.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <thread>

namespace dyadic {

namespace {

constexpr double kRel = 1e-12;
constexpr int kRSteps = 4;

// Normalized sweep radius delta^((j + 1/2) / 4).
double sweep_radius(double delta, int j) { return std::pow(delta, (j + 0.5) / kRSteps); }

IdList sorted_ids(const MetricSpace& space, std::span<const PointId> E) {
    if (E.empty()) throw InvalidArgument("E must be non-empty");
    IdList ids(E.begin(), E.end());
    for (PointId p : ids)
        if (!space.valid_id(p)) throw InvalidArgument("unknown point id " + std::to_string(p));
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
}

// Diameters of the level-k cubes meeting E, one entry per cube.
std::vector<double> meeting_diameters(const CubeSystem& sys, const IdList& ids, int k) {
    std::vector<char> seen(static_cast<std::size_t>(sys.cube_count(k)), 0);
    std::vector<double> out;
    for (PointId p : ids) {
        const int i = sys.cube_index(k, p);
        if (seen[i]) continue;
        seen[i] = 1;
        out.push_back(sys.cube(k, i).diameter);
    }
    return out;
}

double power_sum(const std::vector<double>& diams, double s) {
    double total = 0.0;
    for (double d : diams) {
        if (d > 0.0) total += std::pow(d, s);
        else if (s == 0.0) total += 1.0;
    }
    return total;
}

int first_admissible_measure_level(const CubeSystem& sys, double r) {
    const CubeParams& p = sys.params();
    int m = 0;
    while (m <= 200 && 4.0 * p.C0 * std::pow(p.delta, m) > sys.scale() * r * (1.0 + kRel)) ++m;
    return m;
}

DimensionEstimate zero_estimate(EstimateKind kind) {
    DimensionEstimate est;
    est.kind = kind;
    est.value = 0.0;
    est.flags.push_back("singleton");
    return est;
}

}  // namespace

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw InsufficientScales("a line fit needs at least two points");
    const auto n = static_cast<Eigen::Index>(x.size());
    Eigen::MatrixXd A(n, 2);
    Eigen::VectorXd b(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        A(i, 0) = x[static_cast<std::size_t>(i)];
        A(i, 1) = 1.0;
        b(i) = y[static_cast<std::size_t>(i)];
    }
    const Eigen::Vector2d c = A.colPivHouseholderQr().solve(b);
    LineFit f;
    f.slope = c(0);
    f.intercept = c(1);
    f.residual = std::sqrt((A * c - b).squaredNorm() / static_cast<double>(n));
    f.points = static_cast<int>(n);
    return f;
}

int deepest_informative_level(const CubeSystem& system, std::span<const PointId> E) {
    const IdList ids = sorted_ids(system.space(), E);
    int best = 0;
    for (int k = 0; k <= system.max_level(); ++k) {
        const auto d = meeting_diameters(system, ids, k);
        if (std::any_of(d.begin(), d.end(), [](double v) { return v > 0.0; })) best = k;
    }
    return best;
}

double measure_radius(const CubeSystem& system, int m) {
    return 4.0 * system.params().C0 * std::pow(system.params().delta, m) / system.scale();
}

MeasureValue cubic_measure(const CubeSystem& system, std::span<const PointId> E, double s, double r,
                           const MeasureOptions& opts) {
    if (!(s >= 0.0)) throw InvalidArgument("s must be non-negative");
    if (!(r > 0.0)) throw InvalidArgument("r must be positive");
    const IdList ids = sorted_ids(system.space(), E);
    const int lo = first_admissible_measure_level(system, r);
    int hi = s == 0.0 ? system.max_level() : deepest_informative_level(system, ids);
    if (opts.m_cap >= 0) hi = std::min(hi, opts.m_cap);
    if (lo > hi)
        throw ScaleExhausted("no admissible level: r needs m >= " + std::to_string(lo) + " but the deepest usable m is " +
                                 std::to_string(hi),
                             hi);
    MeasureValue v;
    v.s = s;
    v.r = r;
    v.value = std::numeric_limits<double>::infinity();
    for (int m = lo; m <= hi; ++m) {
        const double sum = power_sum(meeting_diameters(system, ids, m), s);
        if (sum < v.value) {
            v.value = sum;
            v.m_star = m;
        }
    }
    v.saturated = v.m_star == hi;
    return v;
}

double greedy_hausdorff_sum(const MetricSpace& space, std::span<const PointId> E, double s, double r) {
    const GreedyCover g = greedy_cover(space, E, r);
    std::vector<double> diams;
    diams.reserve(g.clusters.size());
    for (const IdList& c : g.clusters) diams.push_back(space.diameter(c));
    return power_sum(diams, s);
}

std::string to_string(EstimateKind kind) {
    switch (kind) {
        case EstimateKind::Hausdorff: return "hausdorff";
        case EstimateKind::Box: return "box";
        case EstimateKind::AssouadTheta: return "assouad_theta";
        case EstimateKind::Assouad: return "assouad";
    }
    return "?";
}

bool DimensionEstimate::has_flag(const std::string& f) const {
    return std::find(flags.begin(), flags.end(), f) != flags.end();
}

DimensionEstimate hausdorff_dim_estimate(const CubeSystem& system, std::span<const PointId> E,
                                         const HausdorffOptions& opts) {
    const MetricSpace& space = system.space();
    const IdList ids = sorted_ids(space, E);
    if (ids.size() == 1) {
        DimensionEstimate est = zero_estimate(EstimateKind::Hausdorff);
        est.system_id = system.system_id();
        est.seed = system.seed();
        return est;
    }

    std::vector<int> levels = opts.levels;
    const int informative = deepest_informative_level(system, ids);
    if (levels.empty())
        for (int j = 0; j <= informative; ++j) levels.push_back(j);
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    if (levels.size() < 3)
        throw InsufficientScales("hausdorff estimate needs 3 schedule levels, only " + std::to_string(levels.size()) +
                                 " resolvable (deepest informative level " + std::to_string(informative) + ")");
    if (levels.front() < 0 || levels.back() > informative)
        throw ScaleExhausted("schedule level outside 0.." + std::to_string(informative), informative);

    // Level sums are reused for every s.
    std::vector<std::vector<double>> diams;
    for (int m = 0; m <= informative; ++m) diams.push_back(meeting_diameters(system, ids, m));
    std::vector<double> xs;
    for (int j : levels) xs.push_back(std::log(1.0 / measure_radius(system, j)));

    auto slope_at = [&](double s) {
        std::vector<double> sums;
        for (int m = 0; m <= informative; ++m) sums.push_back(power_sum(diams[static_cast<std::size_t>(m)], s));
        std::vector<double> ys;
        for (int j : levels) {
            // Admissible levels for r_j are j..informative.
            const double M = *std::min_element(sums.begin() + j, sums.end());
            ys.push_back(std::log(M));
        }
        return fit_line(xs, ys);
    };

    double s_hi = opts.s_max;
    if (s_hi < 0.0) {
        const DoublingEstimate dbl = estimate_doubling(space, opts.doubling_samples, opts.seed);
        s_hi = std::log(static_cast<double>(dbl.C_d_hat)) / std::log(2.0);
    }
    const double growth = 1e-9;

    DimensionEstimate est;
    est.kind = EstimateKind::Hausdorff;
    est.window_unit = "r";
    est.window_lo = measure_radius(system, levels.back());
    est.window_hi = measure_radius(system, levels.front());
    est.system_id = system.system_id();
    est.seed = system.seed();

    std::vector<double> grid = opts.s_grid;
    if (grid.empty())
        for (int i = 0; i <= 10; ++i) grid.push_back(s_hi * i / 10.0);
    double prev = std::numeric_limits<double>::infinity();
    bool monotone = true;
    for (double s : grid) {
        const double sl = slope_at(s).slope;
        est.diagnostics.emplace_back(s, sl);
        if (sl > prev + 1e-9) monotone = false;
        prev = sl;
    }

    double lo = 0.0, hi = s_hi;
    if (slope_at(hi).slope > growth) {
        lo = hi;
        est.flags.push_back("clamped");
    } else if (!(slope_at(lo).slope > growth)) {
        hi = lo;
    } else {
        for (int it = 0; it < opts.iterations && hi - lo > opts.tolerance; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (slope_at(mid).slope > growth) lo = mid;
            else hi = mid;
        }
    }
    est.value = 0.5 * (lo + hi);
    est.fit = slope_at(est.value);
    if (!monotone) est.flags.push_back("unstable");
    return est;
}

DimensionEstimate box_dim_estimate(const AdjacentFamily& family, std::span<const PointId> E, PointId x, double R,
                                   const BoxOptions& opts) {
    const MetricSpace& space = family.space();
    const IdList ids = sorted_ids(space, E);
    for (PointId p : ids)
        if (!(space.dist(x, p) < R))
            throw InvalidArgument("point " + std::to_string(p) + " of E lies outside B(x, R)");
    if (ids.size() == 1) {
        DimensionEstimate est = zero_estimate(EstimateKind::Box);
        est.diagnostics.emplace_back(0.0, 1.0);
        return est;
    }

    const auto mask = membership_mask(space, ids);
    const LocalCounts lc = local_counts(family, mask, x, R);
    const int L = lc.cube.level;
    const int depth = static_cast<int>(lc.counts.size()) - 1;
    const double delta = family.params().delta;
    const double diamE = family.scale() * space.diameter(ids);

    int m_E = 0;
    if (opts.sharp_m_E) {
        while (std::pow(delta, L + m_E) > diamE * (1.0 + kRel)) ++m_E;
    } else {
        while (std::pow(delta, m_E) > diamE * (1.0 + kRel)) ++m_E;
    }
    int m_top = depth;
    for (int m = 0; m <= depth; ++m)
        if (lc.counts[static_cast<std::size_t>(m)] == static_cast<long>(ids.size())) {
            m_top = m;
            break;
        }
    const int lo = opts.m_lo >= 0 ? opts.m_lo : m_E;
    const int hi = std::min(opts.m_hi >= 0 ? opts.m_hi : m_top, depth);
    if (hi - lo + 1 < 3)
        throw InsufficientScales("box window [" + std::to_string(lo) + ", " + std::to_string(hi) +
                                 "] has fewer than 3 levels (m_E = " + std::to_string(m_E) + ", depth " +
                                 std::to_string(depth) + ")");

    std::vector<double> xs, ys;
    const double step = std::log(1.0 / delta);
    for (int m = lo; m <= hi; ++m) {
        xs.push_back(m * step);
        ys.push_back(std::log(static_cast<double>(lc.counts[static_cast<std::size_t>(m)])));
    }
    DimensionEstimate est;
    est.kind = EstimateKind::Box;
    est.fit = fit_line(xs, ys);
    est.value = std::max(0.0, est.fit.slope);
    est.window_lo = lo;
    est.window_hi = hi;
    est.system_id = lc.cube.system_id;
    est.seed = family.system(lc.cube.system_id).seed();
    for (int m = 0; m <= depth; ++m)
        est.diagnostics.emplace_back(m, static_cast<double>(lc.counts[static_cast<std::size_t>(m)]));
    if (hi == depth && lc.counts[static_cast<std::size_t>(depth)] < static_cast<long>(ids.size()))
        est.flags.push_back("depth-limited");
    if (family.best_effort()) est.flags.push_back("best-effort");
    return est;
}

DimensionEstimate box_dim_estimate(const AdjacentFamily& family, std::span<const PointId> E, const BoxOptions& opts) {
    const MetricSpace& space = family.space();
    const IdList ids = sorted_ids(space, E);
    const PointId x = ids.front();
    double reach = 0.0;
    for (PointId p : ids) reach = std::max(reach, space.dist(x, p));
    const double R = reach > 0.0 ? 2.0 * reach : std::max(space.diameter(), 1.0);
    return box_dim_estimate(family, ids, x, R, opts);
}

IdList sweep_centers(const MetricSpace& space, std::span<const PointId> E, int budget, std::uint64_t seed) {
    IdList ids = sorted_ids(space, E);
    if (budget <= 0 || static_cast<int>(ids.size()) <= budget) return ids;

    IdList out;
    IdList pool = ids;
    Rng rng(seed);
    rng.shuffle(std::span<PointId>(pool));
    out.assign(pool.begin(), pool.begin() + budget);

    // Extremal points: coordinate minima and maxima, or the first and last
    // symbol strings of an ultrametric.
    const MetricDescriptor& d = space.descriptor();
    if (d.payload_kind() == MetricKind::Euclidean) {
        const auto& c = space.coords();
        for (Eigen::Index col = 0; col < c.cols(); ++col) {
            auto by = [&](PointId a, PointId b) { return c(a, col) < c(b, col) || (c(a, col) == c(b, col) && a < b); };
            out.push_back(*std::min_element(ids.begin(), ids.end(), by));
            out.push_back(*std::max_element(ids.begin(), ids.end(), by));
        }
    } else if (d.payload_kind() == MetricKind::Ultrametric) {
        const auto& sym = space.symbols();
        auto by = [&](PointId a, PointId b) { return sym[a] < sym[b]; };
        out.push_back(*std::min_element(ids.begin(), ids.end(), by));
        out.push_back(*std::max_element(ids.begin(), ids.end(), by));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

LocalSweep local_sweep(const AdjacentFamily& family, std::span<const PointId> E, const SweepOptions& opts) {
    const MetricSpace& space = family.space();
    const IdList ids = sorted_ids(space, E);
    LocalSweep sw;
    sw.centers = sweep_centers(space, ids, opts.sample_budget, opts.seed);
    sw.C_tilde = family.C_tilde();
    sw.delta = family.params().delta;
    sw.seed = opts.seed;
    sw.best_effort = family.best_effort();
    if (ids.size() < 2) return sw;

    const double scale = family.scale();
    const double floor_raw = space.min_positive_distance();
    // Quarter powers of delta shifted by half a step. Whole-set balls only
    // exist for R_norm in (1/2, 1), the range small theta depends on, and the
    // shift keeps radii off the power-of-delta distances where open balls
    // jump.
    std::vector<int> js;
    for (int j = 0;; ++j) {
        const double R = sweep_radius(sw.delta, j) / scale;
        if (R <= floor_raw || j > kRSteps * (family.max_level() + 1)) break;
        js.push_back(j);
    }

    const auto mask = membership_mask(space, ids);
    const std::size_t tasks = sw.centers.size() * js.size();
    std::vector<std::optional<SweepRow>> slots(tasks);
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t t = begin; t < end; ++t) {
            const PointId x = sw.centers[t / js.size()];
            const int j = js[t % js.size()];
            const double R = sweep_radius(sw.delta, j) / scale;
            try {
                const LocalCounts lc = local_counts(family, mask, x, R);
                SweepRow row;
                row.x = x;
                row.j = j;
                row.R = lc.cube.R;
                row.R_norm = lc.cube.R * scale;
                row.system_id = lc.cube.system_id;
                row.level = lc.cube.level;
                row.depth = static_cast<int>(lc.counts.size()) - 1;
                row.counts = lc.counts;
                slots[t] = std::move(row);
            } catch (const DegenerateBall&) {
            }
        }
    };
    const std::size_t threads = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(1, opts.threads)), 1,
                                                        std::max<std::size_t>(tasks, 1));
    if (threads == 1) {
        work(0, tasks);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (tasks + threads - 1) / threads;
        for (std::size_t t = 0; t < threads; ++t)
            pool.emplace_back(work, std::min(tasks, t * chunk), std::min(tasks, (t + 1) * chunk));
        for (auto& th : pool) th.join();
    }
    for (auto& s : slots)
        if (s) sw.rows.push_back(std::move(*s));
    return sw;
}

namespace {

DimensionEstimate sweep_estimate(const LocalSweep& sw, double theta, EstimateKind kind) {
    DimensionEstimate est;
    est.kind = kind;
    if (kind == EstimateKind::AssouadTheta) est.theta = theta;
    est.seed = sw.seed;
    if (sw.centers.size() <= 1) {
        DimensionEstimate z = zero_estimate(kind);
        z.theta = est.theta;
        z.seed = sw.seed;
        return z;
    }

    const double step = std::log(1.0 / sw.delta);
    double best = -std::numeric_limits<double>::infinity();
    const SweepRow* best_row = nullptr;
    int best_lo = 0;
    LineFit best_fit;
    int deepest_needed = 0;
    int deepest_have = 0;
    for (const SweepRow& row : sw.rows) {
        // Admissible m: C_tilde delta^m R <= R^(1/theta), i.e.
        // delta^m <= R^(1/theta - 1) / C_tilde.
        const double bound = std::pow(row.R_norm, 1.0 / theta - 1.0) / sw.C_tilde;
        int a = 0;
        while (a <= row.depth + 1 && std::pow(sw.delta, a) > bound * (1.0 + kRel)) ++a;
        deepest_needed = std::max(deepest_needed, a + 1);
        deepest_have = std::max(deepest_have, row.depth);
        if (row.depth - a + 1 < 2) continue;
        // Every suffix window of the admissible range is itself admissible.
        for (int lo = a; lo + 1 <= row.depth; ++lo) {
            std::vector<double> xs, ys;
            for (int m = lo; m <= row.depth; ++m) {
                xs.push_back(m * step);
                ys.push_back(std::log(static_cast<double>(row.counts[static_cast<std::size_t>(m)])));
            }
            const LineFit f = fit_line(xs, ys);
            if (f.slope > best) {
                best = f.slope;
                best_row = &row;
                best_lo = lo;
                best_fit = f;
            }
        }
    }
    if (!best_row) {
        std::ostringstream msg;
        msg << "no admissible (x, R, m) at theta = " << theta << ": C_tilde = " << sw.C_tilde
            << " pushes the first admissible m to " << deepest_needed - 1
            << " while the deepest available m is " << deepest_have;
        throw InsufficientScales(msg.str());
    }
    est.value = std::max(0.0, best);
    est.fit = best_fit;
    est.window_lo = best_lo;
    est.window_hi = best_row->depth;
    est.system_id = best_row->system_id;
    if (best_lo + 1 == best_row->depth) est.flags.push_back("depth-limited");
    if (sw.best_effort) est.flags.push_back("best-effort");
    return est;
}

}  // namespace

DimensionEstimate spectrum_from_sweep(const LocalSweep& sweep, double theta) {
    if (!(theta > 0.0 && theta < 1.0)) throw InvalidArgument("theta must lie in (0, 1)");
    return sweep_estimate(sweep, theta, EstimateKind::AssouadTheta);
}

DimensionEstimate assouad_from_sweep(const LocalSweep& sweep) {
    return sweep_estimate(sweep, 1.0, EstimateKind::Assouad);
}

DimensionEstimate assouad_spectrum_estimate(const AdjacentFamily& family, std::span<const PointId> E, double theta,
                                            const SweepOptions& opts) {
    if (!(theta > 0.0 && theta < 1.0)) throw InvalidArgument("theta must lie in (0, 1)");
    return spectrum_from_sweep(local_sweep(family, E, opts), theta);
}

DimensionEstimate assouad_dim_estimate(const AdjacentFamily& family, std::span<const PointId> E,
                                       const SweepOptions& opts) {
    return assouad_from_sweep(local_sweep(family, E, opts));
}

std::string sweep_csv(const LocalSweep& sweep) {
    std::ostringstream os;
    os << std::setprecision(17) << "x_id,R,system_id,L_R,m,D\n";
    for (const SweepRow& row : sweep.rows)
        for (int m = 0; m <= row.depth; ++m)
            os << row.x << ',' << row.R << ',' << row.system_id << ',' << row.level << ',' << m << ','
               << row.counts[static_cast<std::size_t>(m)] << '\n';
    return os.str();
}

Comparability compare_with_greedy(const CubeSystem& system, std::span<const PointId> E, double s,
                                  std::vector<int> levels) {
    const IdList ids = sorted_ids(system.space(), E);
    if (levels.empty())
        for (int j = 0; j <= deepest_informative_level(system, ids); ++j) levels.push_back(j);
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

    Comparability c;
    c.s = s;
    for (int j : levels) {
        ComparabilityRow row;
        row.level = j;
        row.r = measure_radius(system, j);
        row.M = cubic_measure(system, ids, s, row.r).value;
        row.H_greedy = greedy_hausdorff_sum(system.space(), ids, s, row.r);
        c.rows.push_back(row);
    }
    // A cover admissible at radius r' <= r is admissible at r, so H at r is
    // the best greedy sum over the schedule radii at or below r.
    for (std::size_t i = c.rows.size(); i-- > 1;)
        c.rows[i - 1].H_greedy = std::min(c.rows[i - 1].H_greedy, c.rows[i].H_greedy);

    double lo = std::numeric_limits<double>::infinity();
    for (ComparabilityRow& row : c.rows) {
        row.ratio = row.H_greedy > 0.0 ? row.M / row.H_greedy : std::numeric_limits<double>::infinity();
        if (row.M < row.H_greedy * (1.0 - 1e-12)) c.lower_bound_holds = false;
        c.C = std::max(c.C, row.ratio);
        lo = std::min(lo, row.ratio);
    }
    c.spread = lo > 0.0 ? c.C / lo : std::numeric_limits<double>::infinity();
    return c;
}

}  // namespace dyadic
