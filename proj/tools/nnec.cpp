// Command-line front end: nnec fit | eval | synth | bench.
//
// Exit codes: 0 ok, 2 validation, 3 I/O, 4 internal. Errors are written to
// stderr as a single JSON object.

#include <cstdio>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "nnec/cli.hpp"

namespace {

int report_error(const char* kind, const std::string& message, int code) {
    std::cerr << nlohmann::json{{"error", {{"kind", kind}, {"message", message}}}}.dump() << '\n';
    return code;
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
    } else {
        nnec::cli::detail::write_text(path, text);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nearest neighbour equilibrium clustering"};
    app.require_subcommand(1);

    nnec::cli::RunConfig fit;
    std::string fit_mode = "full-grid";
    std::string delimiter = ",";
    auto* fit_cmd = app.add_subcommand("fit", "Cluster a delimited numeric file");
    fit_cmd->add_option("input", fit.input, "Input file")->required();
    fit_cmd->add_option("--delimiter", delimiter, "Field delimiter (single character)");
    fit_cmd->add_flag("--header", fit.has_header, "First row is a header");
    fit_cmd->add_option("--label-column", fit.label_column, "Ground-truth column (0-based index or header name)");
    fit_cmd->add_option("--labels", fit.labels_path, "Ground-truth labels file, one per line");
    fit_cmd->add_option("--mode", fit_mode, "fixed | full-grid | refined");
    fit_cmd->add_option("--lambda", fit.lambda, "Threshold for fixed mode (decimal or a/b)");
    fit_cmd->add_option("--k", fit.k, "Neighbour count for fixed mode");
    fit_cmd->add_option("--lambdas", fit.lambdas, "Lambda grid for full-grid mode");
    fit_cmd->add_option("--ks", fit.ks, "k grid for full-grid mode");
    fit_cmd->add_flag("--allow-lambda-below-one", fit.allow_lambda_below_one, "Permit lambda < 1");
    fit_cmd->add_option("--r", fit.r, "Longest detectable cycle");
    fit_cmd->add_option("--t-max", fit.t_max, "Maximum sweeps per growth");
    fit_cmd->add_option("--workers", fit.workers, "Worker threads");
    bool raw = false;
    fit_cmd->add_flag("--raw", raw, "Skip standardisation and PCA");
    fit_cmd->add_option("--max-dim", fit.max_dim, "PCA target dimension");
    fit_cmd->add_option("--labels-out", fit.labels_out, "Write assigned labels here");
    fit_cmd->add_option("--report", fit.report_out, "Write the JSON solution report here");
    fit_cmd->add_option("--selection", fit.selection_out, "Write the model selection report here");
    fit_cmd->add_option("--trace", fit.trace_out, "Write per-sweep growth records (JSON lines) here");
    fit_cmd->add_option("--graph-cache", fit.graph_cache, "Neighbour graph cache file");

    std::string pred_path;
    std::string truth_path;
    std::string eval_out;
    auto* eval_cmd = app.add_subcommand("eval", "Compare two label files");
    eval_cmd->add_option("pred", pred_path, "Predicted labels")->required();
    eval_cmd->add_option("truth", truth_path, "True labels")->required();
    eval_cmd->add_option("--out", eval_out, "Output JSON path (default stdout)");

    std::string synth_spec;
    std::string synth_preset = "five-blobs";
    std::uint64_t synth_seed = 1;
    std::string synth_out;
    auto* synth_cmd = app.add_subcommand("synth", "Sample a Gaussian mixture as CSV");
    synth_cmd->add_option("--spec", synth_spec, "Mixture description JSON");
    synth_cmd->add_option("--preset", synth_preset, "Built-in mixture (five-blobs)");
    synth_cmd->add_option("--seed", synth_seed, "RNG seed");
    synth_cmd->add_option("--out", synth_out, "Output CSV path (default stdout)");

    nnec::cli::BenchConfig bench;
    std::string bench_mode = "full-grid";
    std::string bench_out;
    auto* bench_cmd = app.add_subcommand("bench", "Fit and evaluate over a manifest; aggregate result matrices");
    bench_cmd->add_option("--manifest", bench.manifest, "Dataset manifest JSON");
    bench_cmd->add_option("--baseline-dir", bench.baseline_dir, "Directory with other methods' ami/ari/accuracy.csv");
    bench_cmd->add_option("--results", bench.results, "Results matrix to aggregate, as metric=path");
    bench_cmd->add_option("--mode", bench_mode, "fixed | full-grid | refined");
    bench_cmd->add_option("--workers", bench.workers, "Worker threads");
    bench_cmd->add_option("--out-dir", bench.out_dir, "Directory for bench.json and per-metric CSVs");
    bench_cmd->add_option("--out", bench_out, "Output JSON path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*fit_cmd) {
            if (delimiter.size() != 1) {
                throw nnec::ValidationError("delimiter must be a single character");
            }
            fit.delimiter = delimiter[0];
            fit.mode = nnec::cli::parse_mode(fit_mode);
            fit.preprocess = !raw;
            const auto outcome = nnec::cli::cmd_fit(fit);
            if (fit.report_out.empty()) {
                std::cout << outcome.report.dump(2) << '\n';
            }
        } else if (*eval_cmd) {
            emit(eval_out, nnec::cli::cmd_eval(pred_path, truth_path).dump(2) + '\n');
        } else if (*synth_cmd) {
            emit(synth_out, nnec::cli::cmd_synth(synth_spec, synth_spec.empty() ? synth_preset : "", synth_seed));
        } else if (*bench_cmd) {
            bench.mode = nnec::cli::parse_mode(bench_mode);
            emit(bench_out, nnec::cli::cmd_bench(bench).dump(2) + '\n');
        }
    } catch (const nnec::ValidationError& e) {
        return report_error("validation", e.what(), 2);
    } catch (const nnec::IoError& e) {
        return report_error("io", e.what(), 3);
    } catch (const nlohmann::json::exception& e) {
        return report_error("validation", e.what(), 2);
    } catch (const std::filesystem::filesystem_error& e) {
        return report_error("io", e.what(), 3);
    } catch (const std::exception& e) {
        return report_error("internal", e.what(), 4);
    }
    return 0;
}
