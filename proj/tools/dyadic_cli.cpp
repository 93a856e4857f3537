// dyadic: generate point sets, build cube families, estimate dimensions.
#include <dyadic/adjacent_family.hpp>
#include <dyadic/covering.hpp>
#include <dyadic/cube_system.hpp>
#include <dyadic/dimensions.hpp>
#include <dyadic/errors.hpp>
#include <dyadic/generators.hpp>
#include <dyadic/io.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <iostream>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

using namespace dyadic;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kInvariant = 1;
constexpr int kConfig = 2;

int default_threads() {
    if (const char* env = std::getenv("DYADIC_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    return 1;
}

struct Common {
    double delta = 1.0 / 16.0;
    double c0 = 1.0;
    double C0 = 1.0;
    int levels = -1;
    int systems = 8;
    std::uint64_t seed = 1;
    double target_ratio = 64.0;
    int budget = 500;
    int threads = default_threads();

    CubeParams params() const { return CubeParams{delta, c0, C0}; }
};

void add_params(CLI::App* app, Common& c) {
    app->add_option("--delta", c.delta, "scale ratio delta");
    app->add_option("--c0", c.c0, "net separation constant");
    app->add_option("--C0", c.C0, "net covering constant");
    app->add_option("--levels", c.levels, "deepest level (default: until every point is a center)");
}

IdList all_ids(const MetricSpace& space) {
    IdList ids(space.size());
    std::iota(ids.begin(), ids.end(), 0);
    return ids;
}

std::vector<double> expand_thetas(const std::vector<std::string>& raw) {
    std::vector<double> out;
    for (const std::string& s : raw) {
        const auto a = s.find(':');
        if (a == std::string::npos) {
            out.push_back(std::stod(s));
            continue;
        }
        // lo:hi:step
        const auto b = s.find(':', a + 1);
        if (b == std::string::npos) throw ConfigError("theta sweep must look like lo:hi:step");
        const double lo = std::stod(s.substr(0, a)), hi = std::stod(s.substr(a + 1, b - a - 1)),
                     step = std::stod(s.substr(b + 1));
        if (!(step > 0.0)) throw ConfigError("theta step must be positive");
        for (int i = 0; lo + i * step <= hi + 1e-9; ++i) out.push_back(lo + i * step);
    }
    return out;
}

void emit(const json& doc, const std::string& out) {
    const std::string text = doc.dump(2) + "\n";
    if (out.empty()) std::cout << text;
    else write_text_file(out, text);
}

int run_gen(const std::string& kind, const GeneratorSpec& base, double epsilon, const std::string& maps,
            const std::string& out) {
    GeneratorSpec spec = base;
    spec.kind = generator_kind_from_string(kind);
    if (spec.kind == GeneratorKind::Ifs) {
        if (maps.empty()) throw ConfigError("ifs needs --maps '[{\"ratio\":r,\"translation\":[...]}]'");
        const json jm = json::parse(maps);
        for (const json& m : jm) {
            SimilarityMap f;
            f.ratio = m.at("ratio").get<double>();
            const auto t = m.at("translation").get<std::vector<double>>();
            f.translation = Eigen::Map<const Eigen::VectorXd>(t.data(), static_cast<Eigen::Index>(t.size()));
            spec.maps.push_back(std::move(f));
        }
    }
    MetricSpace space = generate(spec);
    if (epsilon != 1.0) space = snowflake_wrap(space, epsilon);
    emit(points_to_json(space), out);
    std::cerr << "generated " << space.size() << " points\n";
    return kOk;
}

int run_build(const Common& c, const std::string& points, const std::string& out) {
    const MetricSpace space = load_points(points);
    FamilyOptions fo;
    fo.K_max = c.systems;
    fo.query_budget = c.budget;
    fo.target_ratio = c.target_ratio;
    fo.seed = c.seed;
    fo.build.max_level = c.levels;
    const AdjacentFamily family = build_adjacent_family(space, c.params(), fo);
    write_text_file(out, family_to_json(family).dump(1) + "\n");

    json report;
    report["K"] = family.K();
    report["C_delta_hat"] = family.C_delta_hat();
    report["C_tilde"] = family.C_tilde();
    report["best_effort"] = family.best_effort();
    report["max_level"] = family.max_level();
    bool ok = true;
    json checks = json::array();
    json warnings = json::array();
    for (const CubeSystem& s : family.systems()) {
        const SystemReport r = verify_system(s);
        ok = ok && r.all_pass();
        checks.push_back(report_to_json(r));
        for (const std::string& w : s.warnings()) warnings.push_back(w);
    }
    report["systems"] = std::move(checks);
    if (family.best_effort()) warnings.push_back("target ratio not met at K_max; family is best-effort");
    report["warnings"] = std::move(warnings);
    std::cout << report.dump(2) << "\n";
    return ok ? kOk : kInvariant;
}

int run_estimate(const Common& c, const std::string& kind, const std::vector<std::string>& theta_raw,
                 const std::string& window, const std::string& dump, const std::string& points,
                 const std::string& cubes, int system, const std::string& out) {
    const MetricSpace space = load_points(points);
    const AdjacentFamily family = parse_cubes(read_text_file(cubes), space);
    const IdList E = all_ids(space);

    SweepOptions so;
    so.sample_budget = c.budget;
    so.seed = c.seed;
    so.threads = c.threads;

    json doc;
    if (kind == "hausdorff") {
        HausdorffOptions ho;
        ho.seed = c.seed;
        doc = estimate_to_json(hausdorff_dim_estimate(family.system(system), E, ho));
    } else if (kind == "box") {
        BoxOptions bo;
        if (!window.empty()) {
            const auto colon = window.find(':');
            if (colon == std::string::npos) throw ConfigError("--window must look like lo:hi");
            bo.m_lo = std::stoi(window.substr(0, colon));
            bo.m_hi = std::stoi(window.substr(colon + 1));
        }
        doc = estimate_to_json(box_dim_estimate(family, E, bo));
    } else if (kind == "spectrum" || kind == "assouad") {
        const LocalSweep sweep = local_sweep(family, E, so);
        if (!dump.empty()) write_text_file(dump, sweep_csv(sweep));
        if (kind == "assouad") {
            doc = estimate_to_json(assouad_from_sweep(sweep));
        } else {
            const auto thetas = expand_thetas(theta_raw.empty() ? std::vector<std::string>{"0.5"} : theta_raw);
            if (thetas.size() == 1) {
                doc = estimate_to_json(spectrum_from_sweep(sweep, thetas.front()));
            } else {
                doc = json::array();
                for (double t : thetas) doc.push_back(estimate_to_json(spectrum_from_sweep(sweep, t)));
            }
        }
    } else {
        throw ConfigError("unknown estimate kind '" + kind + "' (hausdorff, box, spectrum, assouad)");
    }
    emit(doc, out);
    return kOk;
}

int run_verify(const Common& c, const std::string& points, const std::string& cubes) {
    const MetricSpace space = load_points(points);
    const AdjacentFamily family = parse_cubes(read_text_file(cubes), space, false);
    bool ok = true;
    json report;
    json systems = json::array();
    for (const CubeSystem& s : family.systems()) {
        const SystemReport r = verify_system(s);
        ok = ok && r.all_pass();
        systems.push_back(report_to_json(r));
        std::cerr << "system " << s.system_id() << ":";
        for (const PropertyCheck* pc : {&r.nesting, &r.partition, &r.sandwich, &r.monotonicity}) {
            std::cerr << "  " << pc->name << "=" << to_string(pc->status);
            if (!pc->witness.empty()) std::cerr << " [" << pc->witness << "]";
        }
        std::cerr << "\n";
    }
    report["systems"] = std::move(systems);

    // Covering inequality only makes sense on a structurally sound family.
    if (ok) {
        const SandwichSweep sw = sandwich_sweep(family, all_ids(space), std::max(1, c.budget), c.seed);
        report["sandwich"] = {{"configs", sw.reports.size()},
                              {"violations", sw.violations},
                              {"M0_hat", sw.M0_hat}};
        std::cerr << "sandwich: " << sw.reports.size() << " configs, " << sw.violations << " violations, M0_hat "
                  << sw.M0_hat << "\n";
        if (sw.violations > 0) ok = false;
    }
    report["best_effort"] = family.best_effort();
    if (family.best_effort()) std::cerr << "warning: family is best-effort (target ratio unmet)\n";
    report["pass"] = ok;
    std::cout << report.dump(2) << "\n";
    return ok ? kOk : kInvariant;
}

int run_doubling(const Common& c, const std::string& points) {
    const MetricSpace space = load_points(points);
    const DoublingEstimate d = estimate_doubling(space, std::max(1, c.budget), c.seed);
    json doc;
    doc["C_d_hat"] = d.C_d_hat;
    doc["samples_used"] = d.samples_used;
    std::cout << doc.dump(2) << "\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dyadic cube systems and dimension estimates on finite metric samples"};
    app.require_subcommand(1);
    Common c;

    std::string gen_kind, out, maps;
    GeneratorSpec gs;
    double epsilon = 1.0;
    auto* gen = app.add_subcommand("gen", "write a generated point set");
    gen->add_option("kind", gen_kind, "cantor, sequence, grid, ultrametric_cantor, ifs")->required();
    gen->add_option("--ratio", gs.ratio);
    gen->add_option("--depth", gs.depth);
    gen->add_option("--p", gs.p);
    gen->add_option("--nmax", gs.n_max);
    gen->add_option("--dim", gs.dim);
    gen->add_option("--res", gs.resolution);
    gen->add_option("--arity", gs.arity);
    gen->add_option("--base", gs.base);
    gen->add_option("--epsilon", epsilon, "snowflake exponent applied to the result");
    gen->add_option("--maps", maps, "ifs maps as JSON");
    gen->add_option("--out", out, "output file (default stdout)");

    std::string points, cubes;
    auto* build = app.add_subcommand("build", "build an adjacent family of cube systems");
    add_params(build, c);
    build->add_option("--points", points)->required();
    build->add_option("--out", out, "cube file")->required();
    build->add_option("--systems", c.systems, "K_max");
    build->add_option("--seed", c.seed);
    build->add_option("--target-ratio", c.target_ratio);
    build->add_option("--budget", c.budget, "circumscribed-cube queries per system");
    build->add_option("--threads", c.threads);

    std::string est_kind, window, dump;
    std::vector<std::string> thetas;
    int system = 0;
    auto* estimate = app.add_subcommand("estimate", "estimate a dimension");
    estimate->add_option("kind", est_kind, "hausdorff, box, spectrum, assouad")->required();
    estimate->add_option("--points", points)->required();
    estimate->add_option("--cubes", cubes)->required();
    estimate->add_option("--theta", thetas, "theta values or lo:hi:step sweeps");
    estimate->add_option("--window", window, "box window lo:hi in levels");
    estimate->add_option("--dump", dump, "CSV of per-(x,R,m) counts");
    estimate->add_option("--system", system, "system used by the hausdorff estimate");
    estimate->add_option("--seed", c.seed);
    estimate->add_option("--budget", c.budget, "x-sample budget")->default_val(512);
    estimate->add_option("--threads", c.threads);
    estimate->add_option("--out", out, "output file (default stdout)");

    auto* verify = app.add_subcommand("verify", "re-check cube properties and covering inequalities");
    verify->add_option("--points", points)->required();
    verify->add_option("--cubes", cubes)->required();
    verify->add_option("--seed", c.seed);
    verify->add_option("--budget", c.budget, "sandwich configurations")->default_val(100);

    auto* doubling = app.add_subcommand("doubling", "sample the doubling constant");
    doubling->add_option("--points", points)->required();
    doubling->add_option("--seed", c.seed);
    doubling->add_option("--budget", c.budget, "probes")->default_val(200);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        if (*gen) return run_gen(gen_kind, gs, epsilon, maps, out);
        if (*build) return run_build(c, points, out);
        if (*estimate) return run_estimate(c, est_kind, thetas, window, dump, points, cubes, system, out);
        if (*verify) return run_verify(c, points, cubes);
        if (*doubling) return run_doubling(c, points);
    } catch (const InvariantFailure& e) {
        std::cerr << "invariant failure: " << e.what() << "\n";
        return kInvariant;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kConfig;
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kConfig;
    } catch (const StaleCubes& e) {
        std::cerr << "stale cubes: " << e.what() << "\n";
        return kConfig;
    } catch (const InsufficientScales& e) {
        std::cerr << "insufficient scales: " << e.what() << "\n";
        return kConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfig;
    }
    return kConfig;
}
