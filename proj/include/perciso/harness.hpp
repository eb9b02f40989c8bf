#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "perciso/boundary_norm.hpp"
#include "perciso/cheeger.hpp"
#include "perciso/continuum.hpp"
#include "perciso/error.hpp"
#include "perciso/lattice.hpp"
#include "perciso/rightmost.hpp"

namespace perciso {

using WarningSink = std::function<void(const std::string&)>;

inline void warn_stderr(const std::string& msg) { std::cerr << "warning: " << msg << '\n'; }

inline constexpr const char* cache_env = "PERCISO_CACHE_DIR";

inline std::filesystem::path default_cache_dir() {
    if (const char* d = std::getenv(cache_env); d && *d) return d;
    return ".perciso-cache";
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << v;
    return os.str();
}

// ---------------------------------------------------------------------------
// Norm-table cache

struct NormTableKey {
    double p = 0.85;
    int resolution = 9;
    std::vector<int> scales{16, 32, 64};
    int replicas = 16;
    std::uint64_t seed = 1;

    [[nodiscard]] std::string canonical() const {
        std::ostringstream os;
        os << "p=" << detail::shortest(p) << ";res=" << resolution << ";scales=";
        for (std::size_t i = 0; i < scales.size(); ++i) os << (i ? "," : "") << scales[i];
        os << ";replicas=" << replicas << ";seed=" << seed;
        return os.str();
    }

    [[nodiscard]] bool matches(const NormTable& t) const {
        return t.p() == p && t.resolution() == resolution && t.scales() == scales && t.replicas() == replicas && t.seed() == seed;
    }
};

class NormTableCache {
public:
    explicit NormTableCache(std::filesystem::path dir = default_cache_dir(), WarningSink warn = warn_stderr)
        : dir_(std::move(dir)), warn_(std::move(warn)) {}

    [[nodiscard]] std::filesystem::path path_for(const NormTableKey& key) const {
        return dir_ / ("normtable-" + hex64(fnv1a(key.canonical())) + ".txt");
    }

    /// Content-addressed lookup; builds and stores the table on a miss or
    /// when the stored file fails its checksum or metadata check.
    NormTable get(const NormTableKey& key) {
        const auto path = path_for(key);
        if (std::filesystem::exists(path)) {
            if (auto t = load(path, key)) return *t;
        }
        NormTable t = build_norm_table(key.p, key.resolution, key.scales, key.replicas, key.seed);
        store(path, t);
        return t;
    }

    [[nodiscard]] bool contains(const NormTableKey& key) const { return std::filesystem::exists(path_for(key)); }

    static std::string encode(const NormTable& t) {
        std::ostringstream body;
        write_norm_table(body, t);
        std::string s = body.str();
        return s + "checksum " + hex64(fnv1a(s)) + "\n";
    }

private:
    std::optional<NormTable> load(const std::filesystem::path& path, const NormTableKey& key) {
        std::ifstream in(path, std::ios::binary);
        std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        const auto pos = all.rfind("checksum ");
        if (pos == std::string::npos || all.substr(pos) != "checksum " + hex64(fnv1a(all.substr(0, pos))) + "\n") {
            warn_("norm table cache entry " + path.string() + " failed its checksum; rebuilding");
            return std::nullopt;
        }
        try {
            std::istringstream body(all.substr(0, pos));
            NormTable t = read_norm_table(body);
            if (!key.matches(t)) {
                warn_("norm table cache entry " + path.string() + " does not match its key; rebuilding");
                return std::nullopt;
            }
            return t;
        } catch (const Error& e) {
            warn_("norm table cache entry " + path.string() + " is unreadable (" + e.what() + "); rebuilding");
            return std::nullopt;
        }
    }

    void store(const std::filesystem::path& path, const NormTable& t) {
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        const auto tmp = path.string() + ".tmp";
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out) throw DataError("cannot write cache file " + tmp);
            out << encode(t);
        }
        std::filesystem::rename(tmp, path);
    }

    std::filesystem::path dir_;
    WarningSink warn_;
};

// ---------------------------------------------------------------------------
// Experiment specification

struct ExperimentSpec {
    double p = 0.85;
    std::vector<int> ns;
    std::vector<std::uint64_t> seeds;
    int pad = -1;  // negative: pad equal to n
    NormTableKey norm_table;
    std::string norm_override;  // builtin norm used instead of the table when set
    int density_radius = 32;
    int density_replicas = 20;
    SearchOptions cheeger;
    SolverOptions solver;
    double alpha = 0.0;
    double shape_resolution = 0.02;
    std::filesystem::path cache_dir = default_cache_dir();
    unsigned workers = default_workers();

    void validate() const {
        if (!(p >= 0.0 && p <= 1.0)) throw ArgumentError("p must lie in [0, 1]");
        if (ns.empty()) throw ArgumentError("n grid is empty");
        for (std::size_t i = 0; i < ns.size(); ++i) {
            if (ns[i] < 1) throw ArgumentError("n must be positive");
            if (i && ns[i] <= ns[i - 1]) throw ArgumentError("n grid must be strictly increasing");
        }
        if (seeds.empty()) throw ArgumentError("no seeds given");
        if (!(shape_resolution > 0)) throw ArgumentError("shape resolution must be positive");
    }

    [[nodiscard]] int pad_for(int n) const { return pad < 0 ? n : pad; }
    [[nodiscard]] std::uint64_t search_seed(int n, std::uint64_t seed) const {
        return hash_key(cheeger.seed, Stream::restart, static_cast<std::uint64_t>(n), seed);
    }

    /// Key for cached optimizers of one row.
    [[nodiscard]] std::string row_key(int n, std::uint64_t seed) const {
        std::ostringstream os;
        os << "p=" << detail::shortest(p) << ";n=" << n << ";seed=" << seed << ";pad=" << pad_for(n) << ";budget=" << cheeger.budget
           << ";restarts=" << cheeger.restarts << ";cseed=" << cheeger.seed;
        return os.str();
    }
};

struct ScalingRecord {
    int n = 0;
    std::uint64_t seed = 0;
    std::size_t giant_size = 0;
    Fraction phi_upper{0};
    Fraction phi_lower{0};
    double n_phi_upper = std::nan("");
    double n_phi_lower = std::nan("");
    std::string upper_method;
    std::string lower_method;
    std::size_t optimizer_count = 0;
    double runtime_s = 0.0;
    std::string status = "ok";
};

struct ScalingTable {
    double p = 0.0;
    double theta_hat = std::nan("");
    double theta_stderr = std::nan("");
    double phi_hat = std::nan("");
    std::string phi_family;
    double predicted = std::nan("");
    std::vector<ScalingRecord> rows;

    /// Mean and sample standard deviation of n*Phi over the successful rows at n.
    [[nodiscard]] std::pair<double, double> stats_at(int n) const {
        std::vector<double> xs;
        for (const auto& r : rows)
            if (r.n == n && r.status == "ok") xs.push_back(r.n_phi_upper);
        if (xs.empty()) return {std::nan(""), std::nan("")};
        double m = 0;
        for (double x : xs) m += x;
        m /= static_cast<double>(xs.size());
        double v = 0;
        for (double x : xs) v += (x - m) * (x - m);
        return {m, xs.size() > 1 ? std::sqrt(v / static_cast<double>(xs.size() - 1)) : 0.0};
    }
};

inline constexpr int scaling_csv_version = 1;

inline std::string fmt12(double v) {
    std::ostringstream os;
    os << std::setprecision(12) << v;
    return os.str();
}

/// Writes the table as CSV. Timings are excluded unless requested so that
/// identical specs give byte-identical files.
inline void write_scaling_csv(std::ostream& os, const ScalingTable& t, bool with_timing = false) {
    os << "# perciso-scaling v" << scaling_csv_version
       << " columns: n,seed,giant_size,phi_upper,phi_lower,n_phi_upper,n_phi_lower,upper_method,lower_method,optimizers,theta_hat,phi_cont,"
          "predicted,status"
       << (with_timing ? ",runtime_s" : "") << '\n';
    os << "n,seed,giant_size,phi_upper,phi_lower,n_phi_upper,n_phi_lower,upper_method,lower_method,optimizers,theta_hat,phi_cont,predicted,status"
       << (with_timing ? ",runtime_s" : "") << '\n';
    for (const auto& r : t.rows) {
        os << r.n << ',' << r.seed << ',' << r.giant_size << ',' << r.phi_upper << ',' << r.phi_lower << ',' << fmt12(r.n_phi_upper) << ','
           << fmt12(r.n_phi_lower) << ',' << r.upper_method << ',' << r.lower_method << ',' << r.optimizer_count << ',' << fmt12(t.theta_hat)
           << ',' << fmt12(t.phi_hat) << ',' << fmt12(t.predicted) << ',' << '"' << r.status << '"';
        if (with_timing) os << ',' << fmt12(r.runtime_s);
        os << '\n';
    }
    if (!t.rows.empty()) {
        int largest = t.rows.front().n;
        for (const auto& r : t.rows) largest = std::max(largest, r.n);
        const auto [mean, sd] = t.stats_at(largest);
        os << "# summary largest_n=" << largest << " mean_n_phi=" << fmt12(mean) << " sd_n_phi=" << fmt12(sd) << " predicted=" << fmt12(t.predicted)
           << " phi_family=" << t.phi_family << " theta_hat=" << fmt12(t.theta_hat) << '\n';
    }
}

inline Norm spec_norm(const ExperimentSpec& spec, NormTableCache& cache) {
    if (!spec.norm_override.empty()) return builtin_norm(spec.norm_override);
    NormTableKey key = spec.norm_table;
    key.p = spec.p;
    return Norm::from_table(cache.get(key));
}

namespace detail {

inline std::filesystem::path optimizer_path(const ExperimentSpec& spec, int n, std::uint64_t seed) {
    return spec.cache_dir / ("optimizers-" + hex64(fnv1a(spec.row_key(n, seed))) + ".json");
}

inline void store_optimizers(const ExperimentSpec& spec, const ScalingRecord& rec, const HostGraph& host, const CheegerResult& res) {
    nlohmann::json j;
    j["key"] = spec.row_key(rec.n, rec.seed);
    j["phi_upper"] = res.phi_upper.str();
    auto& list = j["optimizers"] = nlohmann::json::array();
    for (const auto& h : res.optimizers) {
        nlohmann::json verts = nlohmann::json::array();
        for (int i : h) verts.push_back({host.vertices[static_cast<std::size_t>(i)].x, host.vertices[static_cast<std::size_t>(i)].y});
        list.push_back(std::move(verts));
    }
    std::error_code ec;
    std::filesystem::create_directories(spec.cache_dir, ec);
    const auto path = optimizer_path(spec, rec.n, rec.seed);
    std::ofstream out(path.string() + ".tmp", std::ios::trunc);
    if (!out) throw DataError("cannot write optimizer cache in " + spec.cache_dir.string());
    out << j.dump() << '\n';
    out.close();
    std::filesystem::rename(path.string() + ".tmp", path);
}

}  // namespace detail

/// Loads cached optimizers of one (n, seed) row.
inline std::vector<std::vector<Vertex>> load_optimizers(const ExperimentSpec& spec, int n, std::uint64_t seed) {
    const auto path = detail::optimizer_path(spec, n, seed);
    std::ifstream in(path);
    if (!in) throw DataError("no cached optimizers for n=" + std::to_string(n) + " seed=" + std::to_string(seed) + "; run scaling first");
    try {
        const auto j = nlohmann::json::parse(in);
        if (j.at("key").get<std::string>() != spec.row_key(n, seed)) throw DataError("optimizer cache key mismatch");
        std::vector<std::vector<Vertex>> out;
        for (const auto& h : j.at("optimizers")) {
            auto& vs = out.emplace_back();
            for (const auto& v : h) vs.push_back({v.at(0).get<int>(), v.at(1).get<int>()});
        }
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("corrupt optimizer cache: ") + e.what());
    }
}

/// Continuum side of a run: density and the restricted variational problem.
inline void fill_continuum(ScalingTable& t, const ExperimentSpec& spec, NormTableCache& cache, std::optional<VariationalResult>* solved = nullptr) {
    const auto d = density_estimate(spec.p, spec.density_radius, spec.density_replicas, hash_key(spec.norm_table.seed, Stream::replica, 0xD5));
    t.theta_hat = d.theta_hat;
    t.theta_stderr = d.stderr_;
    const Norm norm = spec_norm(spec, cache);
    auto opt = spec.solver;
    opt.workers = spec.workers;
    auto res = solve_restricted(norm, spec.alpha, opt);
    t.phi_hat = res.phi_hat;
    t.phi_family = res.optimizer_family;
    t.predicted = t.phi_hat / t.theta_hat;
    if (solved) *solved = std::move(res);
}

/// Cheeger scaling experiment: one row per (n, seed), plus the continuum
/// prediction. Stage failures are recorded in the row's status.
inline ScalingTable run_scaling(const ExperimentSpec& spec, WarningSink warn = warn_stderr) {
    spec.validate();
    ScalingTable t;
    t.p = spec.p;
    NormTableCache cache(spec.cache_dir, warn);
    try {
        fill_continuum(t, spec, cache);
    } catch (const Error& e) {
        warn(std::string("continuum stage failed: ") + e.what());
    }

    struct Job {
        int n;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (int n : spec.ns)
        for (auto s : spec.seeds) jobs.push_back({n, s});
    t.rows.resize(jobs.size());
    std::mutex io;
    parallel_for(
        jobs.size(),
        [&](std::size_t i) {
            const auto [n, seed] = jobs[i];
            ScalingRecord rec;
            rec.n = n;
            rec.seed = seed;
            const auto start = std::chrono::steady_clock::now();
            try {
                auto cfg = std::make_shared<const Config>(sample_config(n, spec.p, seed, spec.pad_for(n)));
                const Subgraph giant = giant_component(cfg);
                rec.giant_size = giant.size();
                const HostGraph host = host_graph(giant);
                auto opt = spec.cheeger;
                opt.seed = spec.search_seed(n, seed);
                opt.workers = 1;
                const auto res = cheeger_search(host.graph, opt);
                rec.phi_upper = res.phi_upper;
                rec.phi_lower = res.phi_lower;
                rec.n_phi_upper = (res.phi_upper * n).value();
                rec.n_phi_lower = (res.phi_lower * n).value();
                rec.upper_method = res.upper_method;
                rec.lower_method = res.lower_method;
                rec.optimizer_count = res.optimizers.size();
                std::lock_guard lock(io);
                detail::store_optimizers(spec, rec, host, res);
            } catch (const std::exception& e) {
                rec.status = std::string("error: ") + e.what();
            }
            rec.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            t.rows[i] = std::move(rec);
        },
        spec.workers);
    return t;
}

// ---------------------------------------------------------------------------
// Shape comparison

struct ShapeRow {
    int n = 0;
    std::uint64_t seed = 0;
    std::size_t optimizer = 0;
    std::size_t size = 0;
    std::vector<std::pair<std::string, double>> distances;  // per continuum family
    double best = std::nan("");
    std::string best_family;
    std::string status = "ok";
};

struct ShapeReport {
    double phi_hat = std::nan("");
    std::vector<ShapeRow> rows;
};

namespace detail {

/// The eight symmetries of the square applied to a polygon.
inline std::vector<Polygon> square_images(const Polygon& p) {
    std::vector<Polygon> out;
    for (int k = 0; k < 8; ++k) {
        std::vector<Point> v;
        for (auto q : p.vertices) {
            Point r = q;
            if (k & 4) r = {r.y, r.x};
            if (k & 1) r.x = -r.x;
            if (k & 2) r.y = -r.y;
            v.push_back(r);
        }
        out.push_back(Polygon::make(std::move(v)));
    }
    return out;
}

/// Rescaled continuum picture of a discrete optimizer: the decomposition of
/// its largest component, curves simplified and scaled by 1/n.
inline Region rescaled_region(const Subgraph& h, int n, const Norm& norm) {
    HostGraph host = host_graph(h);
    auto comps = components(host.graph, {});
    std::sort(comps.begin(), comps.end(), [](const auto& a, const auto& b) { return a.size() > b.size(); });
    const Subgraph piece = host.subgraph(comps.front());
    const auto dec = circuit_decomposition(piece);
    Region r;
    auto add = [&](const PlanarCurve& c) {
        const auto simple = polygonal_approximation(c, norm, 0.5);
        r.rings.push_back(simple.points);
    };
    add(dec.outer.curve);
    for (const auto& c : dec.inner) add(c.curve);
    return r.transformed(1.0 / n);
}

}  // namespace detail

inline ShapeReport run_shape(const ExperimentSpec& spec, std::size_t max_optimizers = 4, WarningSink warn = warn_stderr) {
    spec.validate();
    NormTableCache cache(spec.cache_dir, warn);
    // Fail early, before the continuum solve, when the scaling cache is absent.
    for (int n : spec.ns)
        for (auto s : spec.seeds)
            if (!std::filesystem::exists(detail::optimizer_path(spec, n, s)))
                throw DataError("no cached optimizers for n=" + std::to_string(n) + " seed=" + std::to_string(s) + "; run scaling first");
    ScalingTable t;
    std::optional<VariationalResult> solved;
    fill_continuum(t, spec, cache, &solved);
    const Norm norm = spec_norm(spec, cache);
    ShapeReport rep;
    rep.phi_hat = t.phi_hat;
    std::vector<std::pair<std::string, std::vector<Polygon>>> targets;
    for (const auto& f : solved->families)
        if (std::isfinite(f.value) && f.polygon.vertices.size() >= 3) targets.push_back({f.family, detail::square_images(f.polygon)});

    struct Job {
        int n;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (int n : spec.ns)
        for (auto s : spec.seeds) jobs.push_back({n, s});
    std::vector<std::vector<ShapeRow>> per(jobs.size());
    parallel_for(
        jobs.size(),
        [&](std::size_t i) {
            const auto [n, seed] = jobs[i];
            try {
                const auto opts = load_optimizers(spec, n, seed);
                auto cfg = std::make_shared<const Config>(sample_config(n, spec.p, seed, spec.pad_for(n)));
                const Subgraph giant = giant_component(cfg);
                for (std::size_t k = 0; k < opts.size() && k < max_optimizers; ++k) {
                    ShapeRow row;
                    row.n = n;
                    row.seed = seed;
                    row.optimizer = k;
                    row.size = opts[k].size();
                    try {
                        const Region r = detail::rescaled_region(giant.subset(opts[k]), n, norm);
                        for (const auto& [family, images] : targets) {
                            double d = std::numeric_limits<double>::infinity();
                            for (const auto& img : images) d = std::min(d, hausdorff_distance(r, img.region(), spec.shape_resolution));
                            row.distances.push_back({family, d});
                            if (!(d >= row.best)) {
                                row.best = d;
                                row.best_family = family;
                            }
                        }
                    } catch (const std::exception& e) {
                        row.status = std::string("error: ") + e.what();
                    }
                    per[i].push_back(std::move(row));
                }
            } catch (const std::exception& e) {
                ShapeRow row;
                row.n = n;
                row.seed = seed;
                row.status = std::string("error: ") + e.what();
                per[i].push_back(std::move(row));
            }
        },
        spec.workers);
    for (auto& v : per)
        for (auto& r : v) rep.rows.push_back(std::move(r));
    return rep;
}

inline void write_shape_csv(std::ostream& os, const ShapeReport& rep) {
    std::vector<std::string> families;
    for (const auto& r : rep.rows)
        for (const auto& [f, d] : r.distances)
            if (std::find(families.begin(), families.end(), f) == families.end()) families.push_back(f);
    os << "# perciso-shape v1 columns: n,seed,optimizer,size,d_H per continuum family (l-infinity, rescaled by 1/n),best,best_family,status\n";
    os << "n,seed,optimizer,size";
    for (const auto& f : families) os << ",dH_" << f;
    os << ",best,best_family,status\n";
    for (const auto& r : rep.rows) {
        os << r.n << ',' << r.seed << ',' << r.optimizer << ',' << r.size;
        for (const auto& f : families) {
            double d = std::nan("");
            for (const auto& [g, v] : r.distances)
                if (g == f) d = v;
            os << ',' << fmt12(d);
        }
        os << ',' << fmt12(r.best) << ',' << r.best_family << ",\"" << r.status << "\"\n";
    }
    os << "# summary phi_hat=" << fmt12(rep.phi_hat) << '\n';
}

}  // namespace perciso
