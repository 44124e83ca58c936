#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lupi/autodiff.hpp"
#include "lupi/networks.hpp"
#include "lupi/synthdata.hpp"

namespace lupi {

/// Non-sequential: one embedding per sample (student) or per frame (teacher).
/// Sequential: per-segment / per-frame embeddings summarised by an aggregator.
enum class Setting { NonSequential, Sequential };

enum class StrategyKind { NoDistill, NonSeqEmbed, SeqEncoder, SeqAggregator, SoftLabel, Multitask };

/// A student-training strategy together with the setting it runs in. nonseq-embed is always
/// non-sequential and seq-* always sequential; the baselines take either, selected by a "-seq"
/// name suffix.
struct Strategy {
    StrategyKind kind = StrategyKind::NoDistill;
    Setting setting = Setting::NonSequential;

    static Strategy parse(std::string_view name);
    std::string name() const;
    bool operator==(const Strategy&) const = default;
    auto operator<=>(const Strategy&) const = default;
};

/// Groups that receive the mixed gradient (1-a)*dL_Y + a*dL_PI. The head is never routed.
std::set<Group> routed_groups(StrategyKind kind);

struct MixSpec {
    double alpha = 0.0;
    std::set<Group> routed;

    static MixSpec for_strategy(StrategyKind kind, double alpha);
    void validate() const;
};

enum class EmbeddingDistance { Mse, Cosine };

struct OptimizerConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.99;
    double epsilon = 1e-8;

    bool operator==(const OptimizerConfig&) const = default;
};

struct TrainConfig {
    std::size_t epochs = 50;
    std::size_t batch_size = 32;
    OptimizerConfig optimizer;
    EmbeddingDistance distance = EmbeddingDistance::Cosine;

    void validate() const;
    bool operator==(const TrainConfig&) const = default;
};

/// Adam with bias correction, one moment pair per parameter tensor.
class AdamOptimizer {
public:
    explicit AdamOptimizer(OptimizerConfig config = {}) : config_(config) {}

    void step(ParamSet& params, const ParamSet& grads);
    std::size_t steps() const noexcept { return steps_; }

private:
    OptimizerConfig config_;
    ParamSet first_, second_;
    std::size_t steps_ = 0;
};

/// Encoder/aggregator shape of a network, independent of its input width.
struct Architecture {
    std::vector<std::size_t> hidden_dims{32};
    std::size_t embedding_dim = 16;
    AggregatorKind aggregator = AggregatorKind::RecurrentAttention;

    bool operator==(const Architecture&) const = default;
};

ModelConfig teacher_model_config(const DatasetSpec& data, const Architecture& arch, Setting setting);
ModelConfig student_model_config(const DatasetSpec& data, const Architecture& arch, Strategy strategy);

/// A trained teacher. Only const access to its parameters exists.
class FrozenTeacher {
public:
    FrozenTeacher(ModelParams params, Setting setting) : params_(std::move(params)), setting_(setting) {}

    const ModelParams& params() const noexcept { return params_; }
    Setting setting() const noexcept { return setting_; }

    /// Per-frame embeddings of a sample's privileged frames.
    std::vector<Tensor> frame_embeddings(const PairedSample& sample) const;
    /// Sample-level class: argmax of the mean frame softmax (non-sequential) or of the aggregate head output.
    std::size_t predict(const PairedSample& sample) const;

private:
    ModelParams params_;
    Setting setting_;
};

struct TeacherHistory {
    std::vector<double> epoch_loss;
};

/// Cross-entropy training on (privileged frames, label). Non-sequential teachers train on
/// individual frames; sequential teachers on whole frame sequences.
FrozenTeacher train_teacher(std::span<const PairedSample> train, const ModelConfig& config, Setting setting,
                            const TrainConfig& train_config, std::uint64_t seed, TeacherHistory* history = nullptr);

double teacher_accuracy(const FrozenTeacher& teacher, std::span<const PairedSample> samples);

/// Index of the frame whose top-class softmax probability is largest; ties to the lowest index.
std::size_t peak_frame_index(std::span<const Tensor> frame_logits);
Tensor select_peak_frame(std::span<const Tensor> frame_embeddings, std::span<const Tensor> frame_logits);

/// Mean of embeddings [r*k, r*(k+1)).
Tensor segment_average(std::span<const Tensor> frame_embeddings, std::size_t r, std::size_t k);

/// Frozen-teacher targets for one sample; only the fields the strategy consumes are set.
struct DistillTargets {
    std::optional<Tensor> peak;
    std::vector<Tensor> per_segment;
    std::optional<Tensor> aggregate;
    std::optional<Tensor> soft_labels;
    std::optional<Tensor> privileged_mean;  // multitask reconstruction target

    bool empty() const {
        return !peak && per_segment.empty() && !aggregate && !soft_labels && !privileged_mean;
    }
    bool operator==(const DistillTargets&) const = default;
};

/// `teacher` may be null only for strategies that consume no teacher output.
DistillTargets compute_targets(const FrozenTeacher* teacher, const PairedSample& sample, Strategy strategy);

/// Student forward pass on a tape.
struct StudentForward {
    std::vector<Var> segment_embeddings;  // sequential only
    Var embedding;                        // encoder output (non-sequential) or aggregator output
    Var logits;
};

StudentForward student_forward(const BoundModel& model, const PairedSample& sample, Setting setting);

struct LossPair {
    Var label_loss;                       // L_Y
    std::optional<Var> privileged_loss;   // L_PI, absent for no-distill
};

LossPair student_losses(const BoundModel& model, const StudentForward& forward, const PairedSample& sample,
                        const DistillTargets& targets, Strategy strategy,
                        EmbeddingDistance distance = EmbeddingDistance::Mse);

/// Per-sample loss values and the two single-loss gradients.
struct SampleGradients {
    double label_loss = 0.0;
    double privileged_loss = 0.0;
    std::size_t prediction = 0;
    ParamSet label_grad;
    ParamSet privileged_grad;
};

SampleGradients sample_gradients(const ModelParams& student, const PairedSample& sample,
                                 const DistillTargets& targets, Strategy strategy,
                                 EmbeddingDistance distance = EmbeddingDistance::Mse);

/// Routed groups get (1-a)*g_Y + a*g_PI, all others g_Y. a=0 and a=1 select one side exactly.
ParamSet mix_gradients(const ParamSet& label_grad, const ParamSet& privileged_grad, const MixSpec& mix);

/// Mix the two gradients and apply one Adam update.
void mixed_step(ModelParams& student, const ParamSet& label_grad, const ParamSet& privileged_grad, const MixSpec& mix,
                AdamOptimizer& optimizer);

struct EpochRecord {
    std::size_t epoch = 0;
    double mean_loss_y = 0.0;
    double mean_loss_pi = 0.0;
    double train_acc = 0.0;
    double val_acc = 0.0;

    bool operator==(const EpochRecord&) const = default;
};

struct StudentRun {
    ModelParams params;
    std::vector<EpochRecord> history;
};

/// Mini-batch training (batch gradient = mean of per-sample mixed gradients) with seeded shuffling.
StudentRun train_student(const Dataset& data, const FrozenTeacher* teacher, Strategy strategy, double alpha,
                         const TrainConfig& config, const Architecture& arch, std::uint64_t seed);

std::vector<std::size_t> student_predictions(const ModelParams& student, std::span<const PairedSample> samples,
                                             Setting setting);
std::vector<Tensor> student_embeddings(const ModelParams& student, std::span<const PairedSample> samples,
                                       Setting setting);

/// Header "epoch,mean_loss_y,mean_loss_pi,train_acc,val_acc".
std::string history_csv(std::span<const EpochRecord> history);
void write_history_csv(std::span<const EpochRecord> history, const std::filesystem::path& path);

}  // namespace lupi
