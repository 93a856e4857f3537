#include <dyadic/io.hpp>

#include <dyadic/errors.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <unordered_map>

namespace dyadic {

using nlohmann::json;

namespace {

int line_of(const std::string& text, std::size_t byte) {
    byte = std::min(byte, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

json parse_document(const std::string& text) {
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) throw ParseError("document", "file is empty");
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError("line " + std::to_string(line_of(text, e.byte)), e.what());
    }
}

const json& field(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.is_object()) throw ParseError(where, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(where + "." + key, "missing field");
    return *it;
}

double number(const json& v, const std::string& where) {
    if (!v.is_number()) throw ParseError(where, "expected a number");
    return v.get<double>();
}

long integer(const json& v, const std::string& where) {
    if (!v.is_number_integer()) throw ParseError(where, "expected an integer");
    return v.get<long>();
}

MetricDescriptor read_descriptor(const json& m, const std::string& where) {
    MetricDescriptor d;
    const json& kind = field(m, "kind", where);
    if (!kind.is_string()) throw ParseError(where + ".kind", "expected a string");
    try {
        d.kind = metric_kind_from_string(kind.get<std::string>());
    } catch (const InvalidArgument& e) {
        throw ParseError(where + ".kind", e.what());
    }
    if (d.kind == MetricKind::Ultrametric) {
        d.arity = static_cast<int>(integer(field(m, "arity", where), where + ".arity"));
        d.base = number(field(m, "base", where), where + ".base");
    } else if (d.kind == MetricKind::Snowflake) {
        d.epsilon = number(field(m, "epsilon", where), where + ".epsilon");
        const MetricDescriptor inner = read_descriptor(field(m, "base_metric", where), where + ".base_metric");
        if (inner.kind == MetricKind::Snowflake) throw ParseError(where + ".base_metric", "nested snowflakes");
        d.base_kind = inner.kind;
        d.arity = inner.arity;
        d.base = inner.base;
    }
    return d;
}

MetricSpace read_payload(const json& doc, const MetricDescriptor& d) {
    const MetricKind kind = d.payload_kind();
    if (kind == MetricKind::Matrix) {
        const json& tri = field(doc, "matrix", "document");
        if (!tri.is_array()) throw ParseError("matrix", "expected an array");
        // Lower triangle without the diagonal: k(k-1)/2 entries.
        const std::size_t len = tri.size();
        std::size_t n = 1;
        while (n * (n - 1) / 2 < len) ++n;
        if (n * (n - 1) / 2 != len) throw ParseError("matrix", "length is not a triangular number");
        Eigen::MatrixXd D = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        std::size_t t = 0;
        for (std::size_t i = 1; i < n; ++i)
            for (std::size_t j = 0; j < i; ++j, ++t) {
                const double v = number(tri[t], "matrix[" + std::to_string(t) + "]");
                D(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
                D(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
            }
        return MetricSpace::from_matrix(std::move(D));
    }

    const json& pts = field(doc, "points", "document");
    if (!pts.is_array()) throw ParseError("points", "expected an array");
    if (pts.empty()) throw ParseError("points", "no points");
    if (kind == MetricKind::Ultrametric) {
        std::vector<std::string> symbols;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (!pts[i].is_string()) throw ParseError("points[" + std::to_string(i) + "]", "expected a symbol string");
            symbols.push_back(pts[i].get<std::string>());
        }
        return MetricSpace::ultrametric(std::move(symbols), d.arity, d.base);
    }
    if (!pts[0].is_array() || pts[0].empty()) throw ParseError("points[0]", "expected a coordinate array");
    const std::size_t dim = pts[0].size();
    Eigen::MatrixXd coords(static_cast<Eigen::Index>(pts.size()), static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const std::string where = "points[" + std::to_string(i) + "]";
        if (!pts[i].is_array()) throw ParseError(where, "expected a coordinate array");
        if (pts[i].size() != dim)
            throw ParseError(where, "has " + std::to_string(pts[i].size()) + " coordinates, expected " +
                                        std::to_string(dim));
        for (std::size_t c = 0; c < dim; ++c)
            coords(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
                number(pts[i][c], where + "[" + std::to_string(c) + "]");
    }
    return MetricSpace::euclidean(std::move(coords));
}

json descriptor_json(const MetricDescriptor& d, bool outer = true) {
    json m;
    const MetricKind kind = outer ? d.kind : d.base_kind;
    m["kind"] = to_string(kind);
    if (kind == MetricKind::Ultrametric) {
        m["arity"] = d.arity;
        m["base"] = d.base;
    } else if (kind == MetricKind::Snowflake) {
        m["epsilon"] = d.epsilon;
        m["base_metric"] = descriptor_json(d, false);
    }
    return m;
}

json check_json(const PropertyCheck& c) {
    json j;
    j["status"] = to_string(c.status);
    j["violations"] = c.violations;
    j["checks"] = c.checks;
    j["worst_ratio"] = c.worst_ratio;
    if (!c.witness.empty()) j["witness"] = c.witness;
    return j;
}

}  // namespace

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path, "cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    out << text;
    if (!out) throw ConfigError("write failed for " + path);
}

MetricSpace parse_points(const std::string& text) {
    const json doc = parse_document(text);
    if (!doc.is_object()) throw ParseError("document", "expected a JSON object");
    const MetricDescriptor d = read_descriptor(field(doc, "metric", "document"), "metric");
    MetricSpace base;
    try {
        base = read_payload(doc, d);
    } catch (const InvalidArgument& e) {
        throw ParseError("points", e.what());
    }
    if (d.kind != MetricKind::Snowflake) return base;
    try {
        return base.snowflake(d.epsilon);
    } catch (const InvalidArgument& e) {
        throw ParseError("metric.epsilon", e.what());
    }
}

MetricSpace load_points(const std::string& path) { return parse_points(read_text_file(path)); }

json points_to_json(const MetricSpace& space) {
    json doc;
    const MetricDescriptor& d = space.descriptor();
    doc["metric"] = descriptor_json(d);
    switch (d.payload_kind()) {
        case MetricKind::Euclidean: {
            json pts = json::array();
            const auto& c = space.coords();
            for (Eigen::Index i = 0; i < c.rows(); ++i) {
                json row = json::array();
                for (Eigen::Index k = 0; k < c.cols(); ++k) row.push_back(c(i, k));
                pts.push_back(std::move(row));
            }
            doc["points"] = std::move(pts);
            break;
        }
        case MetricKind::Ultrametric:
            doc["points"] = space.symbols();
            break;
        default: {
            json tri = json::array();
            const auto& D = space.base_matrix();
            for (Eigen::Index i = 1; i < D.rows(); ++i)
                for (Eigen::Index j = 0; j < i; ++j) tri.push_back(D(i, j));
            doc["matrix"] = std::move(tri);
        }
    }
    return doc;
}

std::string fingerprint_hex(const MetricSpace& space) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(space.fingerprint()));
    return buf;
}

json family_to_json(const AdjacentFamily& family) {
    json doc;
    doc["format"] = "dyadic-cubes";
    doc["version"] = 1;
    const CubeParams& p = family.params();
    doc["params"] = {{"delta", p.delta}, {"c0", p.c0}, {"C0", p.C0}};
    doc["scale"] = family.scale();
    doc["points_fingerprint"] = fingerprint_hex(family.space());
    doc["points_count"] = family.space().size();
    doc["C_delta_hat"] = family.C_delta_hat();
    doc["C_tilde"] = family.C_tilde();
    doc["target_ratio"] = family.target_ratio();
    doc["best_effort"] = family.best_effort();
    json systems = json::array();
    for (const CubeSystem& s : family.systems()) {
        json js;
        js["system_id"] = s.system_id();
        js["seed"] = s.seed();
        json levels = json::array();
        for (int k = 0; k <= s.max_level(); ++k) {
            json lv;
            lv["k"] = k;
            lv["centers"] = s.net(k).centers;
            if (k > 0) {
                // [child_center, parent_center] pairs.
                json links = json::array();
                for (int i = 0; i < s.cube_count(k); ++i)
                    links.push_back({s.net(k).centers[i], s.net(k - 1).centers[s.parent(k, i)]});
                lv["parents"] = std::move(links);
            }
            levels.push_back(std::move(lv));
        }
        js["levels"] = std::move(levels);
        systems.push_back(std::move(js));
    }
    doc["systems"] = std::move(systems);
    return doc;
}

AdjacentFamily parse_cubes(const std::string& text, const MetricSpace& space, bool require_valid) {
    const json doc = parse_document(text);
    if (!doc.is_object()) throw ParseError("document", "expected a JSON object");
    const json& fp = field(doc, "points_fingerprint", "document");
    if (!fp.is_string()) throw ParseError("points_fingerprint", "expected a string");
    if (fp.get<std::string>() != fingerprint_hex(space) ||
        static_cast<std::size_t>(integer(field(doc, "points_count", "document"), "points_count")) != space.size())
        throw StaleCubes("cube file was built from a different point set (fingerprint " + fp.get<std::string>() +
                         ", points file " + fingerprint_hex(space) + ")");

    const json& jp = field(doc, "params", "document");
    CubeParams params;
    params.delta = number(field(jp, "delta", "params"), "params.delta");
    params.c0 = number(field(jp, "c0", "params"), "params.c0");
    params.C0 = number(field(jp, "C0", "params"), "params.C0");
    params.validate();
    const double scale = number(field(doc, "scale", "document"), "scale");
    if (!(scale > 0.0)) throw ParseError("scale", "must be positive");
    const double C_delta_hat = number(field(doc, "C_delta_hat", "document"), "C_delta_hat");
    if (!(C_delta_hat >= 1.0)) throw ParseError("C_delta_hat", "must be at least 1");
    const double target = number(field(doc, "target_ratio", "document"), "target_ratio");
    const json& be = field(doc, "best_effort", "document");
    if (!be.is_boolean()) throw ParseError("best_effort", "expected a boolean");

    const json& js = field(doc, "systems", "document");
    if (!js.is_array() || js.empty()) throw ParseError("systems", "expected a non-empty array");
    std::vector<CubeSystem> systems;
    for (std::size_t t = 0; t < js.size(); ++t) {
        const std::string where = "systems[" + std::to_string(t) + "]";
        const json& sj = js[t];
        const auto seed = static_cast<std::uint64_t>(integer(field(sj, "seed", where), where + ".seed"));
        const int sid = static_cast<int>(integer(field(sj, "system_id", where), where + ".system_id"));
        const json& lv = field(sj, "levels", where);
        if (!lv.is_array() || lv.empty()) throw ParseError(where + ".levels", "expected a non-empty array");

        std::vector<NetLevel> nets;
        std::vector<std::vector<int>> parents(lv.size());
        for (std::size_t k = 0; k < lv.size(); ++k) {
            const std::string lw = where + ".levels[" + std::to_string(k) + "]";
            if (integer(field(lv[k], "k", lw), lw + ".k") != static_cast<long>(k))
                throw ParseError(lw + ".k", "levels must be listed as 0, 1, 2, ...");
            NetLevel net;
            net.level = static_cast<int>(k);
            net.params = params;
            net.seed = seed;
            net.scale = scale;
            net.space_fingerprint = space.fingerprint();
            net.space_size = space.size();
            const json& cs = field(lv[k], "centers", lw);
            if (!cs.is_array()) throw ParseError(lw + ".centers", "expected an array");
            for (std::size_t i = 0; i < cs.size(); ++i) {
                const long z = integer(cs[i], lw + ".centers[" + std::to_string(i) + "]");
                if (!space.valid_id(static_cast<PointId>(z)))
                    throw ParseError(lw + ".centers[" + std::to_string(i) + "]", "unknown point id");
                net.centers.push_back(static_cast<PointId>(z));
            }
            if (k > 0) {
                std::unordered_map<PointId, int> up;
                for (std::size_t i = 0; i < nets[k - 1].centers.size(); ++i)
                    up[nets[k - 1].centers[i]] = static_cast<int>(i);
                std::unordered_map<PointId, int> here;
                for (std::size_t i = 0; i < net.centers.size(); ++i) here[net.centers[i]] = static_cast<int>(i);
                parents[k].assign(net.centers.size(), -1);
                const json& links = field(lv[k], "parents", lw);
                if (!links.is_array()) throw ParseError(lw + ".parents", "expected an array");
                for (std::size_t e = 0; e < links.size(); ++e) {
                    const std::string ew = lw + ".parents[" + std::to_string(e) + "]";
                    if (!links[e].is_array() || links[e].size() != 2)
                        throw ParseError(ew, "expected [child_center, parent_center]");
                    const auto c = static_cast<PointId>(integer(links[e][0], ew + "[0]"));
                    const auto p = static_cast<PointId>(integer(links[e][1], ew + "[1]"));
                    if (!here.count(c)) throw ParseError(ew, "child is not a center of this level");
                    if (!up.count(p)) throw ParseError(ew, "parent is not a center of the previous level");
                    parents[k][here[c]] = up[p];
                }
                if (std::count(parents[k].begin(), parents[k].end(), -1))
                    throw ParseError(lw + ".parents", "some center has no parent");
            }
            nets.push_back(std::move(net));
        }
        try {
            systems.push_back(CubeSystem::assemble(space, params, seed, scale, sid, std::move(nets), std::move(parents)));
        } catch (const InvalidArgument& e) {
            throw ParseError(where, e.what());
        }
        if (require_valid) {
            const SystemReport r = verify_system(systems.back());
            for (const PropertyCheck* c : {&r.partition, &r.sandwich})
                if (c->status == CheckStatus::Fail)
                    throw InvariantFailure(where + " fails the " + c->name + " check: " + c->witness);
        }
    }
    return AdjacentFamily::assemble(std::move(systems), C_delta_hat, target, be.get<bool>());
}

json estimate_to_json(const DimensionEstimate& est) {
    json j;
    j["kind"] = to_string(est.kind);
    if (est.theta) j["theta"] = *est.theta;
    j["value"] = est.value;
    j["window"] = {est.window_lo, est.window_hi};
    j["window_unit"] = est.window_unit;
    j["slope"] = est.fit.slope;
    j["intercept"] = est.fit.intercept;
    j["residual"] = est.fit.residual;
    j["fit_points"] = est.fit.points;
    j["flags"] = est.flags;
    j["system_id"] = est.system_id;
    j["seed"] = est.seed;
    return j;
}

json report_to_json(const SystemReport& report) {
    json j;
    j["system_id"] = report.system_id;
    j["nesting"] = check_json(report.nesting);
    j["partition"] = check_json(report.partition);
    j["sandwich"] = check_json(report.sandwich);
    j["monotonicity"] = check_json(report.monotonicity);
    j["all_pass"] = report.all_pass();
    return j;
}

}  // namespace dyadic
