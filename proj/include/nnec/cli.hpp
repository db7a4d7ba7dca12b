#ifndef NNEC_CLI_HPP
#define NNEC_CLI_HPP

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "clustering.hpp"
#include "dataset.hpp"
#include "eval.hpp"
#include "neighbours.hpp"
#include "synth.hpp"
#include "tuning.hpp"

/**
 * @file cli.hpp
 *
 * @brief The commands behind the `nnec` executable: fit, eval, synth and bench.
 */

namespace nnec::cli {

inline constexpr int schema_version = 1;

enum class Mode { fixed, full_grid, refined };

inline Mode parse_mode(const std::string& s) {
    if (s == "fixed" || s == "fixed-params") {
        return Mode::fixed;
    }
    if (s == "full-grid" || s == "grid") {
        return Mode::full_grid;
    }
    if (s == "refined") {
        return Mode::refined;
    }
    throw ValidationError("unknown mode '" + s + "' (expected fixed, full-grid or refined)");
}

inline const char* to_string(Mode m) {
    switch (m) {
        case Mode::fixed: return "fixed";
        case Mode::full_grid: return "full-grid";
        case Mode::refined: return "refined";
    }
    return "unknown";
}

struct RunConfig {
    std::string input;
    char delimiter = ',';
    bool has_header = false;
    /// Column index or header name; empty for none.
    std::string label_column;
    /// Separate single-column label file.
    std::string labels_path;

    Mode mode = Mode::full_grid;
    std::string lambda = "2";
    std::size_t k = 10;
    /// Overrides of the default search grids (full-grid mode).
    std::vector<std::string> lambdas;
    std::vector<std::size_t> ks;
    bool allow_lambda_below_one = false;

    std::size_t r = 5;
    std::size_t t_max = 100;
    std::size_t workers = 1;
    bool preprocess = true;
    std::size_t max_dim = 100;

    std::string labels_out;
    std::string report_out;
    std::string selection_out;
    std::string trace_out;
    std::string graph_cache;
};

/// Everything a fit produced, for callers that want more than the files.
struct FitOutcome {
    Dataset data;
    std::string hash;
    std::shared_ptr<const ClusteringSolution> solution;
    std::optional<ModelSelectionReport> selection;
    std::optional<ExternalScores> scores;
    nlohmann::json report;
    nlohmann::json selection_json;
};

namespace detail {

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write '" + path + "'");
    }
    out << text;
    if (!out) {
        throw IoError("error writing '" + path + "'");
    }
}

inline nlohmann::json lambda_json(const Lambda& l) {
    return {{"exact", l.to_string()}, {"value", l.value()}};
}

inline std::optional<std::variant<std::size_t, std::string>> parse_label_column(const std::string& s) {
    if (s.empty()) {
        return std::nullopt;
    }
    if (s.find_first_not_of("0123456789") == std::string::npos) {
        return std::stoul(s);
    }
    return s;
}

}  // namespace detail

inline nlohmann::json solution_json(const ClusteringSolution& solution) {
    nlohmann::json clusters = nlohmann::json::array();
    std::vector<Index> seeds;
    for (std::size_t c = 0; c < solution.clusters.size(); ++c) {
        const auto& rec = solution.clusters[c];
        nlohmann::json entry = {{"seed", rec.seed},
                                {"size", rec.members.size()},
                                {"dummy", rec.dummy},
                                {"equilibrium", rec.equilibrium},
                                {"label", solution.label_of_cluster[c]}};
        if (!rec.dummy) {
            entry["status"] = to_string(rec.status);
            entry["iterations"] = rec.iterations;
        }
        clusters.push_back(std::move(entry));
        seeds.push_back(rec.seed);
    }
    std::vector<std::size_t> sizes(solution.cluster_count(), 0);
    for (int l : solution.assignment) {
        ++sizes[static_cast<std::size_t>(l)];
    }
    return {{"params",
             {{"lambda", detail::lambda_json(solution.params.lambda)},
              {"k", solution.params.k},
              {"r", solution.params.r},
              {"t_max", solution.params.t_max}}},
            {"n", solution.n},
            {"seeds", seeds},
            {"clusters", clusters},
            {"cluster_count", solution.cluster_count()},
            {"cluster_sizes", sizes},
            {"label_of_cluster", solution.label_of_cluster},
            {"fallback_count", solution.fallback_count},
            {"criterion", criterion(solution)}};
}

inline nlohmann::json selection_json(const ModelSelectionReport& report) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : report.entries) {
        entries.push_back({{"lambda", detail::lambda_json(e.lambda)},
                           {"k", e.k},
                           {"criterion", e.criterion},
                           {"cluster_count", e.cluster_count},
                           {"equilibrium_cluster_count", e.equilibrium_cluster_count},
                           {"fallback_count", e.fallback_count}});
    }
    return {{"schema_version", schema_version},
            {"mode", report.mode},
            {"evaluated", report.entries.size()},
            {"entries", entries},
            {"selected", {{"index", report.selected}, {"lambda", detail::lambda_json(report.lambda_star())}, {"k", report.k_star()}}}};
}

inline Dataset load_input(const RunConfig& config) {
    LoadOptions options;
    options.delimiter = config.delimiter;
    options.has_header = config.has_header;
    options.label_column = detail::parse_label_column(config.label_column);
    if (!std::filesystem::exists(config.input)) {
        throw IoError("input file '" + config.input + "' does not exist");
    }
    auto data = load_delimited(config.input, options);
    if (!config.labels_path.empty()) {
        data.labels = load_labels(config.labels_path);
        data.validate();
    }
    return data;
}

/// load -> preprocess -> graph -> (tune) -> cluster -> report files.
inline FitOutcome cmd_fit(const RunConfig& config) {
    if (config.workers < 1) {
        throw ValidationError("workers must be at least 1");
    }
    FitOutcome out;
    out.data = load_input(config);
    const Dataset prepared = config.preprocess ? preprocess(out.data, config.max_dim) : out.data;
    out.hash = content_hash(prepared.points);
    const std::size_t n = prepared.n();

    SearchOptions search;
    search.r = config.r;
    search.t_max = config.t_max;
    search.workers = config.workers;
    search.enforce_lambda_floor = !config.allow_lambda_below_one;

    std::vector<Lambda> lambdas;
    std::vector<std::size_t> ks;
    std::size_t k_needed = 0;
    Lambda fixed_lambda;
    switch (config.mode) {
        case Mode::fixed:
            fixed_lambda = Lambda::parse(config.lambda);
            nnec::detail::check_lambda(fixed_lambda, search);
            k_needed = config.k;
            break;
        case Mode::full_grid:
            if (config.lambdas.empty()) {
                lambdas = default_lambda_grid();
            } else {
                for (const auto& s : config.lambdas) {
                    lambdas.push_back(Lambda::parse(s));
                }
            }
            ks = config.ks.empty() ? default_k_grid() : config.ks;
            k_needed = *std::max_element(ks.begin(), ks.end());
            break;
        case Mode::refined:
            k_needed = default_k_for(n);
            break;
    }
    if (k_needed < 1 || k_needed + 1 > n) {
        throw ValidationError("k=" + std::to_string(k_needed) + " needs at least k+1 points; dataset has " + std::to_string(n));
    }

    std::optional<NeighbourGraph> graph;
    if (!config.graph_cache.empty()) {
        graph = load_graph_cache(config.graph_cache, out.hash, k_needed);
    }
    if (!graph) {
        graph = build_graph(prepared.points, k_needed, config.workers);
        if (!config.graph_cache.empty()) {
            save_graph_cache(config.graph_cache, *graph, out.hash);
        }
    }

    std::ofstream trace;
    SweepObserver observer;
    if (!config.trace_out.empty()) {
        trace.open(config.trace_out);
        if (!trace) {
            throw IoError("cannot write '" + config.trace_out + "'");
        }
        observer = [&trace](const SweepRecord& s) {
            trace << nlohmann::json{{"seed", s.seed}, {"t", s.t}, {"size", s.size}, {"added", s.added}, {"removed", s.removed}}.dump()
                  << '\n';
        };
    }

    if (config.mode == Mode::fixed) {
        out.solution = std::make_shared<ClusteringSolution>(
            cluster(*graph, EquilibriumParams{fixed_lambda, config.k, config.r, config.t_max}, observer));
    } else {
        out.selection = config.mode == Mode::full_grid ? grid_search(*graph, lambdas, ks, search) : refined_search(*graph, search);
        out.solution = out.selection->selected_solution;
        if (observer) {
            cluster(*graph, out.solution->params, observer);
        }
        out.selection_json = selection_json(*out.selection);
    }

    out.report = solution_json(*out.solution);
    out.report["schema_version"] = schema_version;
    out.report["input"] = config.input;
    out.report["content_hash"] = out.hash;
    out.report["d"] = prepared.d();
    out.report["mode"] = to_string(config.mode);
    if (out.data.labels) {
        out.scores = score(out.solution->assignment, *out.data.labels);
        out.report["metrics"] = {{"ami", out.scores->ami}, {"ari", out.scores->ari}, {"accuracy", out.scores->accuracy}};
    }

    if (!config.labels_out.empty()) {
        std::string text;
        for (int l : out.solution->assignment) {
            text += std::to_string(l) + '\n';
        }
        detail::write_text(config.labels_out, text);
    }
    if (!config.report_out.empty()) {
        detail::write_text(config.report_out, out.report.dump(2) + '\n');
    }
    if (!config.selection_out.empty() && out.selection) {
        detail::write_text(config.selection_out, out.selection_json.dump(2) + '\n');
    }
    return out;
}

/// {ami, ari, accuracy, n} for two label files.
inline nlohmann::json cmd_eval(const std::string& pred_path, const std::string& truth_path) {
    for (const auto& p : {pred_path, truth_path}) {
        if (!std::filesystem::exists(p)) {
            throw IoError("label file '" + p + "' does not exist");
        }
    }
    const auto pred = load_labels(pred_path);
    const auto truth = load_labels(truth_path);
    const auto s = score(pred, truth);
    return {{"ami", s.ami}, {"ari", s.ari}, {"accuracy", s.accuracy}, {"n", pred.size()}};
}

/// Samples a mixture (from a JSON description or the built-in five-blob preset) and returns its CSV.
inline std::string cmd_synth(const std::string& spec_path, const std::string& preset, std::uint64_t seed) {
    MixtureSpec spec;
    if (!spec_path.empty()) {
        std::ifstream in(spec_path);
        if (!in) {
            throw IoError("cannot open mixture description '" + spec_path + "'");
        }
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError(std::string("invalid mixture description: ") + e.what());
        }
        spec = MixtureSpec::from_json(j);
    } else if (preset == "five-blobs") {
        spec = MixtureSpec::five_blobs();
    } else {
        throw ValidationError("unknown preset '" + preset + "'");
    }
    return to_csv(sample_mixture(spec, seed));
}

inline nlohmann::json aggregate_json(const std::string& metric, const ResultsMatrix& results) {
    const auto tables = aggregate(results);
    return {{"metric", metric},
            {"methods", results.methods},
            {"datasets", results.datasets},
            {"values", results.values},
            {"rank", tables.rank},
            {"minmax", tables.minmax},
            {"studentized", tables.studentized},
            {"minmax_degenerate", tables.minmax_degenerate},
            {"studentized_degenerate", tables.studentized_degenerate},
            {"mean_rank", tables.mean_rank},
            {"mean_minmax", tables.mean_minmax},
            {"mean_studentized", tables.mean_studentized}};
}

inline ResultsMatrix read_results(const std::string& path) {
    if (!std::filesystem::exists(path)) {
        throw IoError("results file '" + path + "' does not exist");
    }
    return parse_results_csv(nnec::detail::read_file(path));
}

struct BenchConfig {
    std::string manifest;
    /// Optional directory with ami.csv / ari.csv / accuracy.csv holding other methods' results.
    std::string baseline_dir;
    /// Aggregate-only inputs as metric=path.
    std::vector<std::string> results;
    Mode mode = Mode::full_grid;
    std::size_t workers = 1;
    std::string out_dir;
    std::string method_name = "NNEC";
};

/**
 * @brief Runs fit+eval over a manifest and aggregates Rank / min-max / studentised tables.
 *
 * Manifest: {"datasets": [{"name", "path", "delimiter"?, "header"?, "label_column"?, "labels"?}]}.
 * Per-metric result matrices are written as CSV next to the JSON summary.
 */
inline nlohmann::json cmd_bench(const BenchConfig& config) {
    nlohmann::json out = {{"schema_version", schema_version}};
    std::map<std::string, ResultsMatrix> matrices;

    if (!config.manifest.empty()) {
        std::ifstream in(config.manifest);
        if (!in) {
            throw IoError("cannot open manifest '" + config.manifest + "'");
        }
        nlohmann::json manifest;
        try {
            in >> manifest;
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError(std::string("invalid manifest: ") + e.what());
        }
        const auto base = std::filesystem::path(config.manifest).parent_path();
        const auto resolve = [&](const std::string& p) {
            const std::filesystem::path path(p);
            return (path.is_absolute() ? path : base / path).string();
        };

        nlohmann::json runs = nlohmann::json::array();
        const std::vector<std::string> metric_names = {"ami", "ari", "accuracy"};
        for (const auto& m : metric_names) {
            matrices[m].methods = {config.method_name};
        }
        for (const auto& entry : manifest.at("datasets")) {
            RunConfig run;
            run.input = resolve(entry.at("path").get<std::string>());
            run.delimiter = entry.value("delimiter", std::string(",")).at(0);
            run.has_header = entry.value("header", false);
            if (entry.contains("label_column")) {
                run.label_column = entry["label_column"].is_number() ? std::to_string(entry["label_column"].get<std::size_t>())
                                                                     : entry["label_column"].get<std::string>();
            }
            if (entry.contains("labels")) {
                run.labels_path = resolve(entry["labels"].get<std::string>());
            }
            run.mode = config.mode;
            run.workers = config.workers;
            const auto name = entry.at("name").get<std::string>();
            auto fit = cmd_fit(run);
            if (!fit.scores) {
                throw ValidationError("dataset '" + name + "' has no ground-truth labels");
            }
            runs.push_back({{"name", name},
                            {"n", fit.data.n()},
                            {"d", fit.data.d()},
                            {"lambda", detail::lambda_json(fit.solution->params.lambda)},
                            {"k", fit.solution->params.k},
                            {"cluster_count", fit.solution->cluster_count()},
                            {"ami", fit.scores->ami},
                            {"ari", fit.scores->ari},
                            {"accuracy", fit.scores->accuracy}});
            const double values[] = {fit.scores->ami, fit.scores->ari, fit.scores->accuracy};
            for (std::size_t m = 0; m < metric_names.size(); ++m) {
                matrices[metric_names[m]].datasets.push_back(name);
                matrices[metric_names[m]].values.push_back({values[m]});
            }
        }
        out["runs"] = runs;

        if (!config.baseline_dir.empty()) {
            for (const auto& m : metric_names) {
                const auto baseline = read_results((std::filesystem::path(config.baseline_dir) / (m + ".csv")).string());
                auto& ours = matrices[m];
                ResultsMatrix merged;
                merged.methods = baseline.methods;
                merged.methods.push_back(config.method_name);
                for (std::size_t i = 0; i < ours.datasets.size(); ++i) {
                    const auto it = std::find(baseline.datasets.begin(), baseline.datasets.end(), ours.datasets[i]);
                    if (it == baseline.datasets.end()) {
                        throw ValidationError("baseline " + m + ".csv has no row for dataset '" + ours.datasets[i] + "'");
                    }
                    auto row = baseline.values[static_cast<std::size_t>(it - baseline.datasets.begin())];
                    row.push_back(ours.values[i][0]);
                    merged.datasets.push_back(ours.datasets[i]);
                    merged.values.push_back(std::move(row));
                }
                ours = std::move(merged);
            }
        }
    }

    for (const auto& spec : config.results) {
        const auto eq = spec.find('=');
        const std::string metric = eq == std::string::npos ? std::filesystem::path(spec).stem().string() : spec.substr(0, eq);
        const std::string path = eq == std::string::npos ? spec : spec.substr(eq + 1);
        matrices[metric] = read_results(path);
    }
    if (matrices.empty()) {
        throw ValidationError("bench needs a manifest or at least one results matrix");
    }

    nlohmann::json tables = nlohmann::json::object();
    for (const auto& [metric, matrix] : matrices) {
        tables[metric] = aggregate_json(metric, matrix);
    }
    out["aggregate"] = tables;

    if (!config.out_dir.empty()) {
        std::filesystem::create_directories(config.out_dir);
        for (const auto& [metric, matrix] : matrices) {
            std::ostringstream csv;
            csv << "dataset";
            for (const auto& m : matrix.methods) {
                csv << ',' << m;
            }
            csv << '\n';
            csv.precision(17);
            for (std::size_t i = 0; i < matrix.datasets.size(); ++i) {
                csv << matrix.datasets[i];
                for (double v : matrix.values[i]) {
                    csv << ',' << v;
                }
                csv << '\n';
            }
            detail::write_text((std::filesystem::path(config.out_dir) / (metric + ".csv")).string(), csv.str());
        }
        detail::write_text((std::filesystem::path(config.out_dir) / "bench.json").string(), out.dump(2) + '\n');
    }
    return out;
}

}  // namespace nnec::cli

#endif  // NNEC_CLI_HPP
