// distinf command-line tool: instance generation, sketch oracles, influence
// maximization runs, held-out evaluation and timing.

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "distinf.hpp"

using namespace distinf;
using json = nlohmann::json;

namespace {

struct graph_options {
    std::string path;
    bool weighted = false;
    std::string model = "exp:1";
    std::uint32_t ell = 16;
    std::uint64_t seed = 1;
};

void add_graph_options(CLI::App* cmd, graph_options& o) {
    cmd->add_option("--graph", o.path, "edge list or binary graph cache")->required();
    cmd->add_flag("--weighted", o.weighted, "read edge lengths from the third column");
    cmd->add_option("--model", o.model, "edge length model: unit, file, exp:MEAN, weibull:SCALE:SHAPE")
        ->capture_default_str();
    cmd->add_option("--ell", o.ell, "number of instances to sample")->capture_default_str();
    cmd->add_option("--seed", o.seed, "rng seed")->capture_default_str();
}

// A binary cache holding several instances is used as is; anything else is
// a topology from which ell instances are drawn.
multi_instance_graph load_instances(const graph_options& o) {
    auto base = load_graph(o.path, o.weighted);
    if (base.instance_count() > 1) {
        return base;
    }
    return sample_instances(base, parse_length_model(o.model, o.seed), o.ell);
}

class output {
public:
    explicit output(const std::string& path) {
        if (!path.empty() && path != "-") {
            file_.open(path);
            if (!file_) {
                throw std::runtime_error("cannot open " + path + " for writing");
            }
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

void write_json(const std::string& path, const json& value) {
    if (path.empty()) {
        return;
    }
    output out(path);
    out.stream() << value.dump(2) << '\n';
}

// Reads seed labels either from a trace CSV (second column) or as
// whitespace-separated labels, and maps them to node ids.
std::vector<node_id> read_seeds(const std::string& path, const multi_instance_graph& g) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    std::map<std::uint64_t, node_id> by_label;
    for (node_id v = 0; v < g.node_count(); ++v) {
        by_label.emplace(g.label(v), v);
    }
    std::vector<std::string> tokens;
    std::string line;
    bool csv = false;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && line.starts_with("rank,seed")) {
            csv = true;
            continue;
        }
        if (line.empty() || line[0] == '#') {
            continue;
        }
        if (csv) {
            std::stringstream fields(line);
            std::string rank;
            std::string seed;
            std::getline(fields, rank, ',');
            std::getline(fields, seed, ',');
            tokens.push_back(seed);
        } else {
            std::stringstream words(line);
            for (std::string w; words >> w;) {
                tokens.push_back(w);
            }
        }
    }
    std::vector<node_id> seeds;
    for (const auto& t : tokens) {
        std::uint64_t label = 0;
        std::size_t used = 0;
        try {
            label = std::stoull(t, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != t.size()) {
            throw validation_error("bad seed label '" + t + "'");
        }
        const auto it = by_label.find(label);
        if (it == by_label.end()) {
            throw validation_error("unknown node " + t + " in seed list");
        }
        seeds.push_back(it->second);
    }
    return seeds;
}

double ms_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

json tau_schedule_json(const std::vector<tau_event>& schedule) {
    json events = json::array();
    for (const auto& e : schedule) {
        events.push_back({{"tau", e.tau}, {"seeds", e.seeds}});
    }
    return events;
}

json askim_metrics_json(const askim_metrics& m, const greedy_trace& trace) {
    return {{"tau_schedule", tau_schedule_json(m.tau_schedule)},
            {"delta_updates", m.delta_updates},
            {"cursor_scans", m.cursor_scans},
            {"resumes", m.resumes},
            {"index_entries", m.index_entries},
            {"rejections", m.rejections},
            {"error_sum", trace.error_sum.value_or(0.0)},
            {"seeds", trace.entries.size()},
            {"total_exact", trace.total_exact()}};
}

json tskim_metrics_json(const tskim_metrics& m, const greedy_trace& trace) {
    return {{"pairs_started", m.pairs_started},
            {"reverse_scans", m.reverse_scans},
            {"forward_scans", m.forward_scans},
            {"endgame_seeds", m.endgame_seeds},
            {"seeds", trace.entries.size()},
            {"total_exact", trace.total_exact()}};
}

selection_mode parse_mode(const std::string& text, double& epsilon) {
    if (text == "fixed") {
        return selection_mode::fixed;
    }
    if (text.starts_with("adaptive")) {
        if (text.size() > 8) {
            if (text[8] != ':') {
                throw validation_error("mode must be fixed or adaptive:EPS");
            }
            try {
                epsilon = std::stod(text.substr(9));
            } catch (const std::exception&) {
                throw validation_error("bad epsilon in mode '" + text + "'");
            }
        }
        return selection_mode::adaptive;
    }
    throw validation_error("mode must be fixed or adaptive:EPS");
}

void maybe_evaluate(const graph_options& go, std::uint32_t m, const std::string& path, const std::vector<node_id>& seeds,
                    const decay_function& alpha) {
    if (m == 0) {
        return;
    }
    auto base = load_graph(go.path, go.weighted);
    if (base.instance_count() != 1) {
        throw validation_error("held-out evaluation needs a topology, not a sampled instance cache");
    }
    const auto rows = evaluate_held_out(base, parse_length_model(go.model, go.seed), seeds, alpha, m);
    output out(path);
    write_prefix_csv(out.stream(), rows);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Distance-based influence estimation and maximization"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "write a random directed graph as an edge list or sampled instance cache");
    node_id gen_n = 1000;
    double gen_degree = 4.0;
    std::uint64_t gen_seed = 1;
    std::string gen_out;
    std::string gen_model;
    std::uint32_t gen_ell = 1;
    gen->add_option("--n", gen_n, "node count")->capture_default_str();
    gen->add_option("--degree", gen_degree, "mean out-degree")->capture_default_str();
    gen->add_option("--seed", gen_seed, "rng seed")->capture_default_str();
    gen->add_option("--out", gen_out, "output path")->required();
    gen->add_option("--model", gen_model, "also sample instances with this length model and write a binary cache");
    gen->add_option("--ell", gen_ell, "instances to sample with --model")->capture_default_str();

    // oracle
    auto* oracle_cmd = app.add_subcommand("oracle", "build or query a combined all-distances sketch oracle");
    oracle_cmd->require_subcommand(1);
    auto* build = oracle_cmd->add_subcommand("build", "build sketches for every node");
    graph_options build_graph;
    std::uint32_t build_k = 64;
    std::string build_out;
    std::string build_metrics;
    bool decay_agnostic = true;
    add_graph_options(build, build_graph);
    build->add_option("--k", build_k, "sketch parameter")->capture_default_str();
    build->add_option("--out", build_out, "oracle file")->required();
    build->add_option("--metrics", build_metrics, "JSON with build time and sketch sizes");
    build->add_flag("--decay-agnostic", decay_agnostic, "sketches serve every decay function (always on)");

    auto* query = oracle_cmd->add_subcommand("query", "estimate the influence of a seed set");
    std::string query_oracle;
    std::string query_seeds;
    std::string query_decay;
    std::string query_graph;
    bool query_weighted = false;
    std::string query_out;
    query->add_option("--oracle", query_oracle, "oracle file")->required();
    query->add_option("--seeds", query_seeds, "seed labels, whitespace separated or a trace CSV")->required();
    query->add_option("--decay", query_decay, "threshold:T, exp:RATE or harmonic:SCALE")->required();
    query->add_option("--graph", query_graph, "graph whose labels the seeds use; dense ids otherwise");
    query->add_flag("--weighted", query_weighted, "read edge lengths from the third column");
    query->add_option("--out", query_out, "JSON output, stdout by default");

    // im
    auto* im = app.add_subcommand("im", "approximate greedy influence maximization");
    im->require_subcommand(1);
    auto* im_threshold = im->add_subcommand("threshold", "T-SKIM for threshold decay");
    graph_options t_graph;
    tskim_config t_config;
    std::uint32_t t_eval = 0;
    std::string t_out;
    std::string t_eval_out;
    std::string t_metrics;
    add_graph_options(im_threshold, t_graph);
    im_threshold->add_option("--T", t_config.threshold, "distance threshold")->required();
    im_threshold->add_option("--k", t_config.k, "sketch parameter")->capture_default_str();
    im_threshold->add_option("--seeds", t_config.max_seeds, "number of seeds")->capture_default_str();
    im_threshold->add_option("--eval-instances", t_eval, "held-out instances for evaluation")->capture_default_str();
    im_threshold->add_option("--out", t_out, "trace CSV, stdout by default");
    im_threshold->add_option("--eval-out", t_eval_out, "held-out prefix CSV, stdout by default");
    im_threshold->add_option("--metrics", t_metrics, "run metrics JSON");

    auto* im_alpha = im->add_subcommand("alpha", "alpha-SKIM for a general decay function");
    graph_options a_graph;
    askim_config a_config;
    std::string a_decay;
    std::string a_mode = "fixed";
    std::optional<double> a_tau0;
    std::uint32_t a_eval = 0;
    std::string a_out;
    std::string a_eval_out;
    std::string a_metrics;
    add_graph_options(im_alpha, a_graph);
    im_alpha->add_option("--decay", a_decay, "threshold:T, exp:RATE or harmonic:SCALE")->required();
    im_alpha->add_option("--k", a_config.k, "sample size parameter")->capture_default_str();
    im_alpha->add_option("--seeds", a_config.max_seeds, "number of seeds")->capture_default_str();
    im_alpha->add_option("--mode", a_mode, "fixed or adaptive:EPS")->capture_default_str();
    im_alpha->add_option("--lambda", a_config.lambda, "tau reduction factor")->capture_default_str();
    im_alpha->add_option("--tau0", a_tau0, "initial sampling threshold");
    im_alpha->add_option("--eval-instances", a_eval, "held-out instances for evaluation")->capture_default_str();
    im_alpha->add_option("--out", a_out, "trace CSV, stdout by default");
    im_alpha->add_option("--eval-out", a_eval_out, "held-out prefix CSV, stdout by default");
    im_alpha->add_option("--metrics", a_metrics, "run metrics JSON");

    // greedy exact
    auto* greedy = app.add_subcommand("greedy", "exact greedy baseline");
    greedy->require_subcommand(1);
    auto* exact = greedy->add_subcommand("exact", "lazy greedy with exact marginal gains");
    graph_options g_graph;
    std::string g_decay;
    node_id g_seeds = 50;
    std::string g_out;
    add_graph_options(exact, g_graph);
    exact->add_option("--decay", g_decay, "threshold:T, exp:RATE or harmonic:SCALE")->required();
    exact->add_option("--seeds", g_seeds, "number of seeds")->capture_default_str();
    exact->add_option("--out", g_out, "trace CSV, stdout by default");

    // eval
    auto* eval = app.add_subcommand("eval", "influence of seed prefixes on held-out instances");
    graph_options e_graph;
    std::string e_seeds;
    std::string e_decay;
    std::uint32_t e_m = 512;
    std::string e_out;
    add_graph_options(eval, e_graph);
    eval->add_option("--seeds", e_seeds, "seed labels, whitespace separated or a trace CSV")->required();
    eval->add_option("--decay", e_decay, "threshold:T, exp:RATE or harmonic:SCALE")->required();
    eval->add_option("--eval-instances", e_m, "held-out instance count")->capture_default_str();
    eval->add_option("--out", e_out, "prefix CSV, stdout by default");

    // bench
    auto* bench = app.add_subcommand("bench", "time one pipeline and print JSON");
    std::string b_algo = "askim";
    std::string b_graph;
    bool b_weighted = false;
    node_id b_n = 1000;
    double b_degree = 4.0;
    std::string b_model = "exp:1";
    std::uint32_t b_ell = 16;
    std::uint64_t b_seed = 1;
    std::uint32_t b_k = 64;
    node_id b_seeds = 50;
    double b_t = 1.0;
    std::string b_decay = "harmonic:1";
    std::string b_out;
    bool b_doubling = false;
    std::uint32_t b_repeat = 3;
    bench->add_option("--algo", b_algo, "oracle, tskim, askim or greedy")
        ->check(CLI::IsMember({"oracle", "tskim", "askim", "greedy"}))
        ->capture_default_str();
    bench->add_option("--graph", b_graph, "edge list; a random graph is generated otherwise");
    bench->add_flag("--weighted", b_weighted, "read edge lengths from the third column");
    bench->add_option("--n", b_n, "random graph node count")->capture_default_str();
    bench->add_option("--degree", b_degree, "random graph mean out-degree")->capture_default_str();
    bench->add_option("--model", b_model, "edge length model")->capture_default_str();
    bench->add_option("--ell", b_ell, "instances")->capture_default_str();
    bench->add_option("--seed", b_seed, "rng seed")->capture_default_str();
    bench->add_option("--k", b_k, "sketch parameter")->capture_default_str();
    bench->add_option("--seeds", b_seeds, "number of seeds")->capture_default_str();
    bench->add_option("--T", b_t, "threshold for tskim")->capture_default_str();
    bench->add_option("--decay", b_decay, "decay for askim, greedy and oracle queries")->capture_default_str();
    bench->add_option("--out", b_out, "JSON output, stdout by default");
    bench->add_flag("--doubling", b_doubling, "time random graphs with n and 2n nodes and report the ratio");
    bench->add_option("--repeat", b_repeat, "repetitions per size with --doubling, fastest kept")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*gen) {
            const auto edges = random_digraph(gen_n, gen_degree, gen_seed);
            if (gen_model.empty()) {
                output out(gen_out);
                out.stream() << "# random digraph n=" << gen_n << " degree=" << gen_degree << " seed=" << gen_seed
                             << '\n';
                for (const auto& e : edges) {
                    out.stream() << e.tail << ' ' << e.head << '\n';
                }
            } else {
                const auto base = multi_instance_graph::single(gen_n, edges);
                save_graph(gen_out, sample_instances(base, parse_length_model(gen_model, gen_seed), gen_ell));
            }
        } else if (*build) {
            const auto g = load_instances(build_graph);
            const auto start = std::chrono::steady_clock::now();
            const auto o = cads_oracle::build(g, build_k, build_graph.seed);
            const double build_ms = ms_since(start);
            o.save(build_out);
            write_json(build_metrics, {{"build_ms", build_ms},
                                       {"n", g.node_count()},
                                       {"ell", g.instance_count()},
                                       {"k", build_k},
                                       {"mean_sketch_size", o.mean_sketch_size()}});
        } else if (*query) {
            const auto o = cads_oracle::load(query_oracle);
            std::vector<node_id> seeds;
            if (query_graph.empty()) {
                const auto ids = multi_instance_graph::single(o.node_count(), {});
                seeds = read_seeds(query_seeds, ids);
            } else {
                const auto g = load_graph(query_graph, query_weighted);
                if (g.node_count() != o.node_count()) {
                    throw validation_error("graph and oracle disagree on the node count");
                }
                seeds = read_seeds(query_seeds, g);
            }
            const auto alpha = parse_decay(query_decay);
            const auto start = std::chrono::steady_clock::now();
            const double estimate = o.estimate(seeds, alpha);
            output out(query_out);
            out.stream() << json{{"estimate", estimate},
                                 {"seeds", seeds.size()},
                                 {"decay", alpha.to_string()},
                                 {"query_ms", ms_since(start)}}
                                .dump(2)
                         << '\n';
        } else if (*im_threshold) {
            const auto g = load_instances(t_graph);
            const auto result = run_tskim(g, [&] {
                auto c = t_config;
                c.seed = t_graph.seed;
                return c;
            }());
            {
                output out(t_out);
                write_trace_csv(out.stream(), result.trace, g);
            }
            write_json(t_metrics, tskim_metrics_json(result.metrics, result.trace));
            maybe_evaluate(t_graph, t_eval, t_eval_out, result.trace.seeds(), decay_function::threshold(t_config.threshold));
        } else if (*im_alpha) {
            const auto g = load_instances(a_graph);
            const auto alpha = parse_decay(a_decay);
            a_config.mode = parse_mode(a_mode, a_config.epsilon);
            a_config.tau0 = a_tau0;
            a_config.seed = a_graph.seed;
            const auto result = run_askim(g, alpha, a_config);
            {
                output out(a_out);
                write_trace_csv(out.stream(), result.trace, g);
            }
            write_json(a_metrics, askim_metrics_json(result.metrics, result.trace));
            maybe_evaluate(a_graph, a_eval, a_eval_out, result.trace.seeds(), alpha);
        } else if (*exact) {
            const auto g = load_instances(g_graph);
            const auto trace = lazy_greedy(g, parse_decay(g_decay), g_seeds);
            output out(g_out);
            write_trace_csv(out.stream(), trace, g);
        } else if (*eval) {
            const auto base = load_graph(e_graph.path, e_graph.weighted);
            if (base.instance_count() != 1) {
                throw validation_error("held-out evaluation needs a topology, not a sampled instance cache");
            }
            const auto seeds = read_seeds(e_seeds, base);
            const auto rows =
                evaluate_held_out(base, parse_length_model(e_graph.model, e_graph.seed), seeds, parse_decay(e_decay), e_m);
            output out(e_out);
            write_prefix_csv(out.stream(), rows);
        } else if (*bench) {
            auto random_instances = [&](node_id n) {
                const auto edges = random_digraph(n, b_degree, b_seed);
                return sample_instances(multi_instance_graph::single(n, edges), parse_length_model(b_model, b_seed),
                                        b_ell);
            };
            // Runs the selected pipeline once and fills in its part of the report.
            auto run_pipeline = [&](const multi_instance_graph& g, json& report) {
                std::vector<double> per_seed;
                const auto start = std::chrono::steady_clock::now();
                auto record = [&](std::size_t) { per_seed.push_back(ms_since(start)); };
                if (b_algo == "oracle") {
                    const auto o = cads_oracle::build(g, b_k, b_seed);
                    report["build_ms"] = ms_since(start);
                    report["mean_sketch_size"] = o.mean_sketch_size();
                    const auto alpha = parse_decay(b_decay);
                    const auto q = std::chrono::steady_clock::now();
                    double checksum = 0.0;
                    const node_id queries = std::min<node_id>(g.node_count(), 1000);
                    for (node_id v = 0; v < queries; ++v) {
                        const node_id s[] = {v};
                        checksum += o.estimate(s, alpha);
                    }
                    report["query_ms"] = ms_since(q);
                    report["queries"] = queries;
                    report["mean_estimate"] = checksum / queries;
                    return report["build_ms"].get<double>();
                }
                if (b_algo == "tskim") {
                    tskim_config c;
                    c.threshold = b_t;
                    c.k = b_k;
                    c.max_seeds = std::min(b_seeds, g.node_count());
                    c.seed = b_seed;
                    c.on_seed = record;
                    const auto result = run_tskim(g, c);
                    report["total_ms"] = ms_since(start);
                    report["metrics"] = tskim_metrics_json(result.metrics, result.trace);
                } else if (b_algo == "askim") {
                    askim_config c;
                    c.k = b_k;
                    c.max_seeds = std::min(b_seeds, g.node_count());
                    c.seed = b_seed;
                    c.on_seed = record;
                    const auto result = run_askim(g, parse_decay(b_decay), c);
                    report["total_ms"] = ms_since(start);
                    report["metrics"] = askim_metrics_json(result.metrics, result.trace);
                } else {
                    const auto trace = lazy_greedy(g, parse_decay(b_decay), std::min(b_seeds, g.node_count()));
                    report["total_ms"] = ms_since(start);
                    report["total_exact"] = trace.total_exact();
                }
                report["per_seed_cumulative_ms"] = per_seed;
                return report["total_ms"].get<double>();
            };

            json report{{"algo", b_algo}, {"k", b_k}};
            if (b_doubling) {
                if (!b_graph.empty()) {
                    throw validation_error("--doubling generates its own graphs and cannot take --graph");
                }
                // Seed counts scale with n so both runs do comparable work.
                const node_id seeds_small = b_seeds;
                auto best_ms = [&](node_id n, node_id seeds) {
                    const auto g = random_instances(n);
                    b_seeds = seeds;
                    double best = std::numeric_limits<double>::infinity();
                    for (std::uint32_t r = 0; r < b_repeat; ++r) {
                        json ignored;
                        best = std::min(best, run_pipeline(g, ignored));
                    }
                    return best;
                };
                const double small = best_ms(b_n, std::min(seeds_small, b_n));
                const double large = best_ms(2 * b_n, std::min<node_id>(2 * seeds_small, 2 * b_n));
                report["doubling"] = {{"n", b_n},
                                      {"ms", small},
                                      {"ms_2n", large},
                                      {"ratio", large / small},
                                      {"repeat", b_repeat},
                                      {"near_linear", large / small < 2.6}};
            } else {
                auto start = std::chrono::steady_clock::now();
                const auto g = b_graph.empty() ? random_instances(b_n)
                                               : load_instances({b_graph, b_weighted, b_model, b_ell, b_seed});
                report["n"] = g.node_count();
                report["ell"] = g.instance_count();
                report["edges_per_instance"] = g[0].arc_count();
                report["load_ms"] = ms_since(start);
                run_pipeline(g, report);
            }
            output out(b_out);
            out.stream() << report.dump(2) << '\n';
        }
    } catch (const validation_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
