#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "perciso/harness.hpp"

using namespace perciso;

namespace {

constexpr int exit_argument = 2;
constexpr int exit_data = 3;

/// Writes to --out when given, else stdout.
class Output {
public:
    explicit Output(const std::string& path, bool binary = false) {
        if (path.empty() || path == "-") return;
        file_ = std::make_unique<std::ofstream>(path, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
        if (!*file_) throw DataError("cannot open output file " + path);
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
    std::vector<std::uint64_t> out;
    std::stringstream ss(text);
    std::string item;
    try {
        while (std::getline(ss, item, ',')) {
            const auto dash = item.find('-');
            if (dash == std::string::npos) {
                out.push_back(std::stoull(item));
                continue;
            }
            const auto lo = std::stoull(item.substr(0, dash));
            const auto hi = std::stoull(item.substr(dash + 1));
            if (hi < lo) throw ArgumentError("bad seed range " + item);
            for (auto s = lo; s <= hi; ++s) out.push_back(s);
        }
    } catch (const std::logic_error&) {
        throw ArgumentError("cannot parse seeds '" + text + "'");
    }
    return out;
}

Norm load_norm(const std::string& spec) {
    std::ifstream in(spec);
    if (in) return Norm::from_table(read_norm_table(in));
    return builtin_norm(spec);
}

struct ExperimentArgs {
    double p = 0.85;
    std::vector<int> ns;
    std::string seeds = "0";
    int pad = -1;
    std::string norm;
    int resolution = 9;
    std::vector<int> scales{16, 32, 64};
    int replicas = 16;
    std::uint64_t budget = 20000;
    int restarts = 8;
    std::uint64_t seed = 0;
    int solver_restarts = 8;
    int solver_iterations = 3000;
    int control_points = 8;
    double alpha = 0.0;
    std::string cache;
    std::string out;
    bool timing = false;

    void add(CLI::App* app) {
        app->add_option("--p", p, "edge probability")->required();
        app->add_option("--n", ns, "increasing list of box radii")->required()->delimiter(',');
        app->add_option("--seeds", seeds, "seed list or ranges, e.g. 0-9,12");
        app->add_option("--pad", pad, "padding around the box (default: n)");
        app->add_option("--norm", norm, "builtin norm or norm-table file used instead of the estimated table");
        app->add_option("--resolution", resolution, "norm-table angles");
        app->add_option("--scales", scales, "norm-table scales")->delimiter(',');
        app->add_option("--replicas", replicas, "norm-table replicas");
        app->add_option("--budget", budget, "annealing iterations per restart");
        app->add_option("--restarts", restarts, "annealing restarts");
        app->add_option("--seed", seed, "search and estimation seed");
        app->add_option("--solver-restarts", solver_restarts);
        app->add_option("--solver-iterations", solver_iterations);
        app->add_option("--control-points", control_points);
        app->add_option("--alpha", alpha);
        app->add_option("--cache", cache, "cache directory (default: $PERCISO_CACHE_DIR)");
        app->add_option("--out", out, "CSV output (default stdout)");
        app->add_flag("--timing", timing, "append per-row runtimes");
    }

    [[nodiscard]] ExperimentSpec spec() const {
        ExperimentSpec s;
        s.p = p;
        s.ns = ns;
        s.seeds = parse_seeds(seeds);
        s.pad = pad;
        s.norm_override = norm;
        s.norm_table.resolution = resolution;
        s.norm_table.scales = scales;
        s.norm_table.replicas = replicas;
        s.norm_table.seed = seed + 1;
        s.cheeger.budget = budget;
        s.cheeger.restarts = restarts;
        s.cheeger.seed = seed;
        s.solver.restarts = solver_restarts;
        s.solver.iterations = solver_iterations;
        s.solver.control_points = control_points;
        s.solver.seed = seed;
        s.alpha = alpha;
        if (!cache.empty()) s.cache_dir = cache;
        return s;
    }
};

int run(int argc, char** argv) {
    CLI::App app{"percolation isoperimetry toolkit"};
    app.require_subcommand(1);

    // sample
    auto* sample = app.add_subcommand("sample", "sample a configuration and write a snapshot");
    int s_n = 0;
    double s_p = 0;
    std::uint64_t s_seed = 0;
    int s_pad = 0;
    std::string s_out;
    sample->add_option("--n", s_n, "box radius")->required();
    sample->add_option("--p", s_p, "edge probability")->required();
    sample->add_option("--seed", s_seed);
    sample->add_option("--pad", s_pad);
    sample->add_option("--out", s_out, "snapshot file")->required();

    // beta
    auto* beta = app.add_subcommand("beta", "estimate the boundary norm in one direction or as a table");
    double b_p = 0;
    std::vector<double> b_dir{1, 0};
    std::vector<int> b_scales{16, 32};
    int b_replicas = 10;
    std::uint64_t b_seed = 0;
    int b_table = 0;
    std::string b_out;
    beta->add_option("--p", b_p)->required();
    beta->add_option("--dir", b_dir, "direction x,y")->delimiter(',')->expected(2);
    beta->add_option("--scales", b_scales)->delimiter(',');
    beta->add_option("--replicas", b_replicas);
    beta->add_option("--seed", b_seed);
    beta->add_option("--table", b_table, "build a norm table with this many angles instead");
    beta->add_option("--out", b_out);

    // cheeger
    auto* cheeger = app.add_subcommand("cheeger", "Cheeger bounds of the giant component of a snapshot");
    std::string c_config;
    std::uint64_t c_budget = 20000;
    std::uint64_t c_seed = 0;
    int c_restarts = 8;
    bool c_exact = false;
    std::string c_out;
    cheeger->add_option("--config", c_config, "snapshot file")->required();
    cheeger->add_option("--budget", c_budget);
    cheeger->add_option("--seed", c_seed);
    cheeger->add_option("--restarts", c_restarts);
    cheeger->add_flag("--exact", c_exact, "exhaustive search (small hosts only)");
    cheeger->add_option("--out", c_out);

    // solve
    auto* solve = app.add_subcommand("solve", "solve the restricted isoperimetric problem");
    std::string v_norm = "euclidean";
    double v_alpha = 0;
    int v_cp = 8;
    int v_restarts = 8;
    int v_iter = 3000;
    std::uint64_t v_seed = 0;
    std::string v_out;
    solve->add_option("--norm", v_norm, "euclidean, l1, linf (optionally *c) or a norm-table file");
    solve->add_option("--alpha", v_alpha);
    solve->add_option("--control-points", v_cp);
    solve->add_option("--restarts", v_restarts);
    solve->add_option("--iterations", v_iter);
    solve->add_option("--seed", v_seed);
    solve->add_option("--out", v_out);

    auto* scale = app.add_subcommand("scale", "Cheeger scaling experiment");
    ExperimentArgs scale_args;
    scale_args.add(scale);
    auto* shape = app.add_subcommand("shape", "compare cached optimizers with continuum shapes");
    ExperimentArgs shape_args;
    shape_args.add(shape);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_argument;
    }

    try {
        if (*sample) {
            const Config cfg = sample_config(s_n, s_p, s_seed, s_pad);
            Output out(s_out, true);
            write_snapshot(out.stream(), cfg);
            const auto ctx = ClusterContext::build(std::make_shared<const Config>(cfg));
            std::cout << "n " << s_n << " p " << s_p << " seed " << s_seed << " pad " << s_pad << " open_edges " << cfg.open_count()
                      << " giant " << ctx->giant_size << '\n';
        } else if (*beta) {
            Output out(b_out);
            if (b_table > 0) {
                write_norm_table(out.stream(), build_norm_table(b_p, b_table, b_scales, b_replicas, b_seed));
            } else {
                const auto est = estimate_beta(b_p, {b_dir[0], b_dir[1]}, b_scales, b_replicas, b_seed);
                auto& os = out.stream();
                os << std::setprecision(12);
                os << "beta " << est.beta_hat << "\nstderr " << est.stderr_ << "\ncensored " << est.censored << "\nvalidation_failures "
                   << est.validation_failures << '\n';
                for (std::size_t i = 0; i < est.scales.size(); ++i)
                    os << "scale " << est.scales[i] << ' ' << est.scale_means[i] << ' ' << est.scale_stderrs[i] << '\n';
            }
        } else if (*cheeger) {
            std::ifstream in(c_config, std::ios::binary);
            if (!in) throw DataError("cannot open snapshot " + c_config);
            auto cfg = std::make_shared<const Config>(read_snapshot(in));
            const HostGraph host = host_graph(giant_component(cfg));
            CheegerResult res;
            if (c_exact) {
                res = cheeger_exact(host.graph);
                res.lower_method = "exhaustive";
            } else {
                SearchOptions opt;
                opt.budget = c_budget;
                opt.seed = c_seed;
                opt.restarts = c_restarts;
                res = cheeger_search(host.graph, opt);
            }
            Output out(c_out);
            out.stream() << "host_vertices " << host.graph.size() << '\n';
            write_cheeger_result(out.stream(), res, host.vertices);
        } else if (*solve) {
            const Norm norm = load_norm(v_norm);
            SolverOptions opt;
            opt.control_points = v_cp;
            opt.restarts = v_restarts;
            opt.iterations = v_iter;
            opt.seed = v_seed;
            const auto res = solve_restricted(norm, v_alpha, opt);
            Output out(v_out);
            write_variational_result(out.stream(), res, norm.name());
        } else if (*scale) {
            const auto spec = scale_args.spec();
            const auto table = run_scaling(spec);
            Output out(scale_args.out);
            write_scaling_csv(out.stream(), table, scale_args.timing);
        } else if (*shape) {
            const auto spec = shape_args.spec();
            const auto rep = run_shape(spec);
            Output out(shape_args.out);
            write_shape_csv(out.stream(), rep);
        }
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_data;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_argument;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "fatal: " << e.what() << '\n';
        return 1;
    }
}
