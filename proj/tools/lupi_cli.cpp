// lupi: dataset generation, teacher training and distillation experiment sweeps.
//
// Exit codes: 0 success, 1 configuration error, 2 runtime error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "lupi/binary_io.hpp"
#include "lupi/distill.hpp"
#include "lupi/errors.hpp"
#include "lupi/harness.hpp"
#include "lupi/synthdata.hpp"

namespace {

constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

lupi::RunSpec load_spec(const std::string& path) {
    return path.empty() ? lupi::parse_run_spec_text("") : lupi::parse_run_spec(path);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Teacher-student distillation with privileged information"};
    app.require_subcommand(1);

    std::string spec_path, out_path, in_path, history_dir, format = "csv";
    std::optional<std::size_t> workers;
    std::optional<std::uint64_t> seed;
    bool sequential = false, quiet = false;

    auto* gen = app.add_subcommand("generate-data", "Generate the synthetic paired dataset and write it as PDST");
    gen->add_option("--spec", spec_path, "Run spec (YAML/JSON); defaults apply when omitted");
    gen->add_option("--out", out_path, "Output dataset file")->required();
    gen->add_option("--seed", seed, "Override dataset.seed");

    auto* teach = app.add_subcommand("train-teacher", "Train a teacher on the privileged modality and write a checkpoint");
    teach->add_option("--spec", spec_path, "Run spec");
    teach->add_option("--out", out_path, "Output checkpoint file")->required();
    teach->add_option("--seed", seed, "Initialisation/shuffle seed (default: first spec seed)");
    teach->add_flag("--sequential", sequential, "Train the sequential (encoder+aggregator) teacher");

    auto* matrix = app.add_subcommand("run-matrix", "Run every (strategy, alpha, seed) cell of the spec");
    matrix->add_option("--spec", spec_path, "Run spec");
    matrix->add_option("--out", out_path, "Results file")->required();
    matrix->add_option("--format", format, "csv or json-lines")->check(CLI::IsMember({"csv", "json-lines"}));
    matrix->add_option("--workers", workers, "Concurrent cells (overrides LUPI_WORKERS and the spec)");
    matrix->add_option("--seed", seed, "Run a single seed instead of the spec's seed list");
    matrix->add_option("--history-dir", history_dir, "Write each cell's per-epoch training history CSV here");
    matrix->add_flag("--quiet", quiet, "Suppress progress output");

    auto* summarize = app.add_subcommand("summarize", "Per-(strategy, alpha) mean and stddev over seeds");
    summarize->add_option("--in", in_path, "Results CSV from run-matrix")->required();
    summarize->add_option("--out", out_path, "Summary CSV (stdout when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kConfigError;
    }

    try {
        if (*gen) {
            auto spec = load_spec(spec_path);
            if (seed) spec.dataset.seed = *seed;
            const auto data = lupi::generate(spec.dataset);
            lupi::write_dataset(data, out_path);
            std::cout << "wrote " << data.size() << " samples (train " << data.train.size() << ", val "
                      << data.validation.size() << ", test " << data.test.size() << ") to " << out_path << "\n";
        } else if (*teach) {
            const auto spec = load_spec(spec_path);
            const auto setting = sequential ? lupi::Setting::Sequential : lupi::Setting::NonSequential;
            const auto data = lupi::generate(spec.dataset);
            const auto teacher = lupi::train_teacher(data.train, lupi::teacher_model_config(spec.dataset, spec.teacher, setting),
                                                     setting, spec.teacher_train, seed.value_or(spec.seeds.front()));
            lupi::write_checkpoint(teacher.params(), out_path);
            std::printf("teacher test accuracy %.4f, checkpoint %s\n", lupi::teacher_accuracy(teacher, data.test),
                        out_path.c_str());
        } else if (*matrix) {
            auto spec = load_spec(spec_path);
            if (seed) spec.seeds = {*seed};
            lupi::MatrixOptions options;
            options.workers = lupi::resolve_workers(workers, spec.workers);
            if (!history_dir.empty()) {
                std::filesystem::create_directories(history_dir);
                options.history_dir = history_dir;
            }
            if (!quiet) options.progress = [](const std::string& line) { std::cerr << line << "\n"; };
            const auto records = lupi::run_matrix(spec, options);
            lupi::emit_results(records, out_path, lupi::parse_result_format(format));
            std::cout << "wrote " << records.size() << " records to " << out_path << "\n";
        } else if (*summarize) {
            const auto summary = lupi::summarize_sweep(lupi::read_results_csv(in_path));
            const std::string text = lupi::format_summary(summary);
            if (out_path.empty())
                std::cout << text;
            else
                lupi::write_file(out_path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
            for (const auto& [strategy, alpha] : summary.best_alpha)
                std::cerr << "best alpha for " << strategy << ": " << alpha << "\n";
        }
    } catch (const lupi::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntimeError;
    }
    return 0;
}
