#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lupi/distill.hpp"
#include "lupi/metrics.hpp"
#include "lupi/synthdata.hpp"

namespace lupi {

/// One experiment: dataset, architectures, and the (strategy x alpha x seed) matrix.
struct RunSpec {
    DatasetSpec dataset;
    Architecture teacher;
    Architecture student;
    std::vector<Strategy> strategies;
    std::vector<double> alphas;
    std::vector<std::uint64_t> seeds{1};
    TrainConfig train;
    TrainConfig teacher_train;
    std::size_t workers = 1;

    RunSpec();
    void validate() const;
    bool operator==(const RunSpec&) const = default;
};

/// YAML (or JSON) text; every key is optional, unknown keys are rejected. Errors are ConfigError
/// carrying the key path.
RunSpec parse_run_spec_text(std::string_view text);
RunSpec parse_run_spec(const std::filesystem::path& path);
std::string serialize_run_spec(const RunSpec& spec);

/// One cell of the matrix evaluated on the test split.
struct RunRecord {
    std::string strategy;
    double alpha = 0.0;
    std::uint64_t seed = 0;
    double acc_teacher = 0.0;
    double acc_student = 0.0;
    double uar_student = 0.0;
    double eer_student = 0.0;
    double delta_acc_pct = 0.0;  // vs the no-distill student of the same setting and seed
    double delta_eer_pct = 0.0;
    double wall_time_seconds = 0.0;
};

/// Column order of emitted results.
const std::vector<std::string>& run_record_columns();

/// Verification trials from labelled embeddings: every same-class pair plus an equally sized
/// seeded sample of different-class pairs, scored by cosine similarity.
std::vector<ScoredPair> verification_pairs(std::span<const Tensor> embeddings, std::span<const std::size_t> labels,
                                           std::uint64_t seed);

struct MatrixOptions {
    std::size_t workers = 1;
    std::function<void(const std::string&)> progress;
    std::filesystem::path history_dir;  // per-cell history CSVs when non-empty
};

/// Trains one teacher per (setting, seed) and one student per cell; result order is
/// (strategy name, alpha, seed) regardless of worker count.
std::vector<RunRecord> run_matrix(const RunSpec& spec, const MatrixOptions& options = {});
std::vector<RunRecord> run_matrix(const RunSpec& spec, const Dataset& data, const MatrixOptions& options = {});

enum class ResultFormat { Csv, JsonLines };
ResultFormat parse_result_format(std::string_view name);

/// Reals with 4 decimals, NaN as "nan" (CSV) or null (JSON lines).
std::string format_results(std::span<const RunRecord> records, ResultFormat format);
void emit_results(std::span<const RunRecord> records, const std::filesystem::path& path, ResultFormat format);
std::vector<RunRecord> parse_results_csv(std::string_view text);
std::vector<RunRecord> read_results_csv(const std::filesystem::path& path);

struct MeanStd {
    double mean = 0.0;
    double stddev = 0.0;  // sample standard deviation; 0 for a single seed
};

struct SweepCell {
    std::string strategy;
    double alpha = 0.0;
    std::size_t seeds = 0;
    MeanStd acc_student;
    MeanStd uar_student;
    MeanStd eer_student;
    MeanStd delta_acc_pct;
    bool best_alpha = false;  // highest mean student accuracy for this strategy, lowest alpha on ties
};

struct SweepSummary {
    std::vector<SweepCell> cells;
    std::map<std::string, double> best_alpha;
};

MeanStd mean_std(std::span<const double> values);
SweepSummary summarize_sweep(std::span<const RunRecord> records);
std::string format_summary(const SweepSummary& summary);

/// Worker count from flag, else LUPI_WORKERS, else the spec value.
std::size_t resolve_workers(std::optional<std::size_t> flag, std::size_t spec_value);

}  // namespace lupi
