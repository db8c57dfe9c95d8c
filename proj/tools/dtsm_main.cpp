// Command-line front end: pmf / sample / moments / solve / residual /
// autocorr / converge, with CSV or JSON artifacts written atomically.
// Exit codes: 0 success, 2 validation error, 3 numeric range error.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "dtsm/errors.hpp"
#include "dtsm/frac_ops.hpp"
#include "dtsm/limits.hpp"
#include "dtsm/markov.hpp"
#include "dtsm/power_series.hpp"
#include "dtsm/semi_markov.hpp"
#include "dtsm/sibuya.hpp"
#include "dtsm/spec_io.hpp"

namespace {

using dtsm::format_double;
using nlohmann::json;

// Row-oriented result table rendered to CSV (fixed column order, schema
// comment first) or JSON (objects keyed by column).
struct Table {
    std::string schema;
    std::vector<std::string> columns;
    std::vector<std::vector<json>> rows;

    void add(std::vector<json> row) { rows.push_back(std::move(row)); }
};

std::string csv_cell(const json& v) {
    if (v.is_string()) {
        std::string s = v.get<std::string>();
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string quoted = "\"";
        for (char c : s) {
            if (c == '"') quoted += '"';
            quoted += c;
        }
        quoted += '"';
        return quoted;
    }
    if (v.is_number_float()) return format_double(v.get<double>());
    return v.dump();
}

std::string render_csv(const Table& t) {
    std::string out = "# schema: " + t.schema + " v1\n";
    for (size_t c = 0; c < t.columns.size(); ++c) {
        if (c) out += ',';
        out += t.columns[c];
    }
    out += '\n';
    for (const auto& row : t.rows) {
        for (size_t c = 0; c < row.size(); ++c) {
            if (c) out += ',';
            out += csv_cell(row[c]);
        }
        out += '\n';
    }
    return out;
}

std::string render_json(const Table& t, const std::string& command, std::uint64_t seed) {
    json doc;
    doc["command"] = command;
    doc["schema"] = t.schema;
    doc["seed"] = seed;
    json results = json::array();
    for (const auto& row : t.rows) {
        json obj;
        for (size_t c = 0; c < row.size(); ++c) obj[t.columns[c]] = row[c];
        results.push_back(std::move(obj));
    }
    doc["results"] = std::move(results);
    return doc.dump(2) + "\n";
}

struct Emit {
    std::string output = "-";
    std::string format = "csv";
};

void emit(const Table& t, const Emit& e, const std::string& command, std::uint64_t seed) {
    const std::string content =
        e.format == "json" ? render_json(t, command, seed) : render_csv(t);
    if (e.output == "-") {
        std::cout << content;
        std::cerr << command << ": " << t.rows.size() << " rows to stdout, seed=" << seed
                  << "\n";
    } else {
        dtsm::write_file_atomic(e.output, content);
        std::cout << command << ": wrote " << e.output << " (" << t.rows.size()
                  << " rows), seed=" << seed << "\n";
    }
}

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    try {
        return json::parse(dtsm::read_file(path));
    } catch (const json::exception& ex) {
        throw dtsm::usage_error(std::string("config: invalid JSON: ") + ex.what());
    }
}

// Flags override the config file: only unset options take config values.
template <typename T>
void merge_cfg(CLI::App* cmd, const json& cfg, const std::string& name, T& value) {
    if (cmd->count("--" + name) > 0) return;
    if (!cfg.contains(name)) return;
    try {
        value = cfg.at(name).get<T>();
    } catch (const json::exception& ex) {
        throw dtsm::usage_error("config: bad value for '" + name + "': " + ex.what());
    }
}

dtsm::DmlKind parse_kind(const std::string& s) {
    if (s == "A" || s == "a") return dtsm::DmlKind::type_a;
    if (s == "B" || s == "b") return dtsm::DmlKind::type_b;
    throw dtsm::usage_error("kind must be A or B");
}

void apply_threads(long threads) {
#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(static_cast<int>(threads));
#else
    (void)threads;
#endif
}

double geometric_p(CLI::App* cmd, double p, double lambda) {
    const bool has_p = cmd->count("--p") > 0;
    const bool has_l = cmd->count("--lambda") > 0;
    if (has_p && has_l) throw dtsm::usage_error("give either --p or --lambda, not both");
    if (has_l) {
        if (!(lambda > 0.0)) throw dtsm::usage_error("--lambda must be > 0");
        return lambda / (1.0 + lambda);
    }
    if (!has_p) throw dtsm::usage_error("missing --p (or --lambda)");
    return p;
}

dtsm::FracKernel kernel_from_spec(const dtsm::ModelSpec& spec) {
    if (spec.has_alpha) return dtsm::FracKernel::sibuya(spec.alpha);
    return dtsm::FracKernel::general(spec.step_pmf);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"discrete-time semi-Markov and fractional-process toolkit"};
    app.require_subcommand(1);

    // shared option storage
    std::string config_path, output = "-", format = "csv", process, spec_path, target,
                kind_str = "A";
    double alpha = 0.5, p = 0.5, lambda = 1.0, t_real = 1.0, mean_x = 1.0, var_x = 0.0;
    long t = 10, t1 = 1, t2 = 10, s_time = 10, horizon = 10, k_max = -1, m_max = -1,
         n_count = 10, initial = 0, replicas = 100000, threads = 0;
    std::uint64_t seed = 0;
    std::vector<long> n_grid, t_grid;
    bool backward = false, forward = false;

    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON file with default option values");
        cmd->add_option("--output", output, "output path, or - for stdout");
        cmd->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));
        cmd->add_option("--threads", threads, "worker thread cap (0 = library default)");
        return cmd;
    };

    CLI::App* pmf = add_common(app.add_subcommand("pmf", "exact pmf tables"));
    pmf->add_option("--process", process, "sibuya | sibuya-counting | frac-bernoulli")
        ->required();
    pmf->add_option("--alpha", alpha);
    pmf->add_option("--t", t);
    pmf->add_option("--k-max", k_max);
    pmf->add_option("--m-max", m_max);
    pmf->add_option("--kind", kind_str);
    pmf->add_option("--p", p);
    pmf->add_option("--lambda", lambda);

    CLI::App* sample = add_common(app.add_subcommand("sample", "reproducible draws"));
    sample->add_option("--process", process, "sibuya | dml-a | dml-b | ml-wait | path")
        ->required();
    sample->add_option("--alpha", alpha);
    sample->add_option("--p", p);
    sample->add_option("--lambda", lambda);
    sample->add_option("--n", n_count);
    sample->add_option("--seed", seed);
    sample->add_option("--spec", spec_path);
    sample->add_option("--horizon", horizon);
    sample->add_option("--initial", initial);

    CLI::App* moments = add_common(app.add_subcommand("moments", "closed-form counting moments"));
    moments->add_option("--alpha", alpha);
    moments->add_option("--t1", t1);
    moments->add_option("--t2", t2);

    CLI::App* solve = add_common(app.add_subcommand("solve", "governing-system solvers"));
    solve->add_flag("--backward", backward, "semi-Markov backward system");
    solve->add_flag("--forward", forward, "fractional Bernoulli forward system");
    solve->add_option("--spec", spec_path);
    solve->add_option("--alpha", alpha);
    solve->add_option("--lambda", lambda);
    solve->add_option("--horizon", horizon);
    solve->add_option("--k-max", k_max);

    CLI::App* residual = add_common(app.add_subcommand("residual", "governing-system residuals"));
    residual->add_option("--spec", spec_path)->required();
    residual->add_option("--alpha", alpha);
    residual->add_option("--horizon", horizon);

    CLI::App* autocorr = add_common(app.add_subcommand("autocorr", "time-changed walk autocorrelation"));
    autocorr->add_option("--alpha", alpha);
    autocorr->add_option("--s", s_time);
    autocorr->add_option("--t-grid", t_grid)->delimiter(',');
    autocorr->add_option("--mean-x", mean_x);
    autocorr->add_option("--var-x", var_x);

    CLI::App* converge = add_common(app.add_subcommand("converge", "scaling-limit experiments"));
    converge->add_option("--target", target, "inverse-stable | frac-poisson")->required();
    converge->add_option("--alpha", alpha);
    converge->add_option("--lambda", lambda);
    converge->add_option("--t", t_real);
    converge->add_option("--n", n_grid)->delimiter(',');
    converge->add_option("--replicas", replicas);
    converge->add_option("--seed", seed);
    converge->add_option("--kind", kind_str);

    try {
        try {
            app.parse(argc, argv);
        } catch (const CLI::CallForHelp& e) {
            return app.exit(e);
        } catch (const CLI::ParseError& e) {
            std::cerr << "error: " << e.what() << "\n" << app.help() << "\n";
            return 2;
        }
        CLI::App* cmd = app.get_subcommands().front();
        const json cfg = load_config(config_path);
        merge_cfg(cmd, cfg, "output", output);
        merge_cfg(cmd, cfg, "format", format);
        merge_cfg(cmd, cfg, "threads", threads);
        if (format != "csv" && format != "json")
            throw dtsm::usage_error("format must be csv or json");
        apply_threads(threads);
        const Emit sink{output, format};
        Table table;

        if (cmd == pmf) {
            merge_cfg(cmd, cfg, "process", process);
            merge_cfg(cmd, cfg, "alpha", alpha);
            merge_cfg(cmd, cfg, "t", t);
            merge_cfg(cmd, cfg, "k-max", k_max);
            merge_cfg(cmd, cfg, "m-max", m_max);
            merge_cfg(cmd, cfg, "kind", kind_str);
            merge_cfg(cmd, cfg, "p", p);
            merge_cfg(cmd, cfg, "lambda", lambda);
            if (process == "sibuya") {
                const long kk = k_max < 0 ? 20 : k_max;
                if (kk < 1) throw dtsm::usage_error("--k-max must be >= 1");
                table.schema = "sibuya-pmf";
                table.columns = {"k", "prob"};
                for (long k = 1; k <= kk; ++k)
                    table.add({k, dtsm::sibuya_pmf(alpha, k)});
            } else if (process == "sibuya-counting") {
                const long mm = m_max < 0 ? t : m_max;
                table.schema = "sibuya-counting-pmf";
                table.columns = {"m", "prob"};
                const dtsm::DiscretePmf d = dtsm::sibuya_counting_dist(alpha, t, mm);
                for (long m = 0; m <= mm; ++m)
                    table.add({m, d.mass[static_cast<size_t>(m)]});
            } else if (process == "frac-bernoulli") {
                const double pp = geometric_p(cmd, p, lambda);
                const long mm = m_max < 0 ? t : m_max;
                table.schema = "frac-bernoulli-pmf";
                table.columns = {"m", "prob"};
                const auto grid =
                    dtsm::frac_bernoulli_grid(parse_kind(kind_str), alpha, pp, mm, t);
                for (long m = 0; m <= mm; ++m)
                    table.add({m, grid[static_cast<size_t>(m)][static_cast<size_t>(t)]});
            } else {
                throw dtsm::usage_error("unknown pmf process '" + process + "'");
            }
            emit(table, sink, "pmf", seed);
        } else if (cmd == sample) {
            merge_cfg(cmd, cfg, "process", process);
            merge_cfg(cmd, cfg, "alpha", alpha);
            merge_cfg(cmd, cfg, "p", p);
            merge_cfg(cmd, cfg, "lambda", lambda);
            merge_cfg(cmd, cfg, "n", n_count);
            merge_cfg(cmd, cfg, "seed", seed);
            merge_cfg(cmd, cfg, "spec", spec_path);
            merge_cfg(cmd, cfg, "horizon", horizon);
            merge_cfg(cmd, cfg, "initial", initial);
            if (n_count < 1) throw dtsm::usage_error("--n must be >= 1");
            if (process == "path") {
                if (spec_path.empty()) throw dtsm::usage_error("path sampling needs --spec");
                const dtsm::ModelSpec spec = dtsm::load_model_spec(spec_path);
                if (cmd->count("--seed") == 0 && !cfg.contains("seed")) seed = spec.seed;
                dtsm::SemiMarkovSpec sm{dtsm::decompose(spec.markov), spec.step_dist(),
                                        spec.kind};
                table.schema = "path-sample";
                table.columns = {"replica", "t", "state"};
                std::vector<std::vector<long>> states(
                    static_cast<size_t>(n_count),
                    std::vector<long>(static_cast<size_t>(horizon) + 1));
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
                for (long r = 0; r < n_count; ++r) {
                    dtsm::RngStream rng(seed, static_cast<std::uint64_t>(r));
                    const dtsm::PathSample path = dtsm::simulate(sm, rng, initial, horizon);
                    for (long u = 0; u <= horizon; ++u)
                        states[static_cast<size_t>(r)][static_cast<size_t>(u)] =
                            path.state_at(u);
                }
                for (long r = 0; r < n_count; ++r)
                    for (long u = 0; u <= horizon; ++u)
                        table.add({r, u,
                                   spec.markov.states[static_cast<size_t>(
                                       states[static_cast<size_t>(r)][static_cast<size_t>(u)])]});
            } else {
                table.schema = "scalar-sample";
                table.columns = {"index", "value"};
                std::vector<json> values(static_cast<size_t>(n_count));
                const bool is_real = process == "ml-wait";
                dtsm::DmlKind kind = dtsm::DmlKind::type_a;
                if (process == "dml-b") kind = dtsm::DmlKind::type_b;
                else if (process == "dml-a") kind = dtsm::DmlKind::type_a;
                else if (process != "sibuya" && process != "ml-wait")
                    throw dtsm::usage_error("unknown sample process '" + process + "'");
                const double pp =
                    (process == "dml-a" || process == "dml-b") ? geometric_p(cmd, p, lambda) : p;
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
                for (long i = 0; i < n_count; ++i) {
                    dtsm::RngStream rng(seed, static_cast<std::uint64_t>(i));
                    if (process == "sibuya")
                        values[static_cast<size_t>(i)] = dtsm::sibuya_sample(rng, alpha);
                    else if (is_real)
                        values[static_cast<size_t>(i)] =
                            dtsm::ml_waiting_time_sample(rng, alpha, lambda);
                    else
                        values[static_cast<size_t>(i)] = dtsm::dml_sample(rng, alpha, pp, kind);
                }
                for (long i = 0; i < n_count; ++i)
                    table.add({i, values[static_cast<size_t>(i)]});
            }
            emit(table, sink, "sample", seed);
        } else if (cmd == moments) {
            merge_cfg(cmd, cfg, "alpha", alpha);
            merge_cfg(cmd, cfg, "t1", t1);
            merge_cfg(cmd, cfg, "t2", t2);
            const dtsm::CountingMoments mom = dtsm::sibuya_counting_moments(alpha, t1, t2);
            table.schema = "counting-moments";
            table.columns = {"t1", "t2", "mean_t1", "mean_t2", "second_t1", "second_t2",
                             "cross"};
            table.add({t1, t2, mom.mean_t1, mom.mean_t2, mom.second_t1, mom.second_t2,
                       mom.cross});
            emit(table, sink, "moments", seed);
        } else if (cmd == solve) {
            merge_cfg(cmd, cfg, "spec", spec_path);
            merge_cfg(cmd, cfg, "alpha", alpha);
            merge_cfg(cmd, cfg, "lambda", lambda);
            merge_cfg(cmd, cfg, "horizon", horizon);
            merge_cfg(cmd, cfg, "k-max", k_max);
            if (backward == forward)
                throw dtsm::usage_error("choose exactly one of --backward / --forward");
            if (backward) {
                if (spec_path.empty()) throw dtsm::usage_error("--backward needs --spec");
                dtsm::ModelSpec spec = dtsm::load_model_spec(spec_path);
                if (cmd->count("--alpha") > 0 || cfg.contains("alpha")) {
                    spec.has_alpha = true;
                    spec.alpha = alpha;
                }
                const dtsm::JumpChain jc = dtsm::decompose(spec.markov);
                const dtsm::SolutionGrid grid =
                    dtsm::solve_backward(jc, kernel_from_spec(spec), horizon);
                table.schema = "backward-solution-grid";
                table.columns = {"t", "from", "to", "prob"};
                for (long u = 0; u <= horizon; ++u)
                    for (long i = 0; i < grid.n_states; ++i)
                        for (long jj = 0; jj < grid.n_states; ++jj)
                            table.add({u, spec.markov.states[static_cast<size_t>(i)],
                                       spec.markov.states[static_cast<size_t>(jj)],
                                       grid.at(i, jj, u)});
            } else {
                const long kk = k_max < 0 ? horizon : k_max;
                const auto grid = dtsm::nb_forward_solve(alpha, lambda, horizon, kk);
                table.schema = "forward-solution-grid";
                table.columns = {"t", "k", "prob"};
                for (long u = 0; u <= horizon; ++u)
                    for (long k = 0; k <= kk; ++k)
                        table.add({u, k, grid[static_cast<size_t>(k)][static_cast<size_t>(u)]});
            }
            emit(table, sink, "solve", seed);
        } else if (cmd == residual) {
            merge_cfg(cmd, cfg, "spec", spec_path);
            merge_cfg(cmd, cfg, "alpha", alpha);
            merge_cfg(cmd, cfg, "horizon", horizon);
            dtsm::ModelSpec spec = dtsm::load_model_spec(spec_path);
            if (cmd->count("--alpha") > 0 || cfg.contains("alpha")) {
                spec.has_alpha = true;
                spec.alpha = alpha;
            }
            const dtsm::JumpChain jc = dtsm::decompose(spec.markov);
            const dtsm::FracKernel kernel = kernel_from_spec(spec);
            const dtsm::SolutionGrid grid = dtsm::solve_backward(jc, kernel, horizon);
            table.schema = "backward-residuals";
            table.columns = {"t", "max_abs_residual"};
            for (long u = 0; u <= horizon; ++u) {
                const dtsm::Matrix r = dtsm::residual_backward(grid, jc, kernel, u);
                double worst = 0.0;
                for (const auto& row : r)
                    for (double v : row) worst = std::max(worst, std::fabs(v));
                table.add({u, worst});
            }
            emit(table, sink, "residual", seed);
        } else if (cmd == autocorr) {
            merge_cfg(cmd, cfg, "alpha", alpha);
            merge_cfg(cmd, cfg, "s", s_time);
            merge_cfg(cmd, cfg, "t-grid", t_grid);
            merge_cfg(cmd, cfg, "mean-x", mean_x);
            merge_cfg(cmd, cfg, "var-x", var_x);
            if (t_grid.empty()) throw dtsm::usage_error("--t-grid must list at least one time");
            table.schema = "timechange-autocorr";
            table.columns = {"s", "t", "rho"};
            for (long tt : t_grid) {
                const dtsm::CountingMoments mom =
                    dtsm::sibuya_counting_moments(alpha, s_time, tt);
                table.add({s_time, tt, dtsm::timechange_autocorr(mom, mean_x, var_x)});
            }
            emit(table, sink, "autocorr", seed);
        } else if (cmd == converge) {
            merge_cfg(cmd, cfg, "target", target);
            merge_cfg(cmd, cfg, "alpha", alpha);
            merge_cfg(cmd, cfg, "lambda", lambda);
            merge_cfg(cmd, cfg, "t", t_real);
            merge_cfg(cmd, cfg, "n", n_grid);
            merge_cfg(cmd, cfg, "replicas", replicas);
            merge_cfg(cmd, cfg, "seed", seed);
            merge_cfg(cmd, cfg, "kind", kind_str);
            dtsm::DistanceReport report;
            if (target == "inverse-stable") {
                dtsm::ScalingExperiment exp;
                exp.alpha = alpha;
                exp.t = t_real;
                exp.n_grid = n_grid;
                exp.replicas = replicas;
                exp.seed = seed;
                report = dtsm::sibuya_limit_experiment(exp);
            } else if (target == "frac-poisson") {
                report = dtsm::frac_poisson_limit_experiment(parse_kind(kind_str), alpha,
                                                             lambda, t_real, n_grid, replicas,
                                                             seed);
            } else {
                throw dtsm::usage_error("unknown convergence target '" + target + "'");
            }
            table.schema = "distance-report";
            if (format == "json") {
                table.columns = {"n", "distance", "mc_stderr", "mean_model",
                                 "mean_reference", "mean_stderr"};
                for (const auto& row : report.rows)
                    table.add({row.n, row.distance, row.mc_stderr, row.mean_model,
                               row.mean_reference, row.mean_stderr});
            } else {
                table.columns = {"n", "distance", "mc_stderr"};
                for (const auto& row : report.rows)
                    table.add({row.n, row.distance, row.mc_stderr});
            }
            emit(table, sink, "converge", seed);
        }
        return 0;
    } catch (const dtsm::usage_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const dtsm::range_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
}
