#include "lupi/distill.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <sstream>

#include "lupi/binary_io.hpp"
#include "lupi/errors.hpp"
#include "lupi/metrics.hpp"

namespace lupi {

namespace {

struct StrategyName {
    const char* name;
    Strategy strategy;
};

constexpr StrategyName kStrategyNames[] = {
    {"no-distill", {StrategyKind::NoDistill, Setting::NonSequential}},
    {"no-distill-seq", {StrategyKind::NoDistill, Setting::Sequential}},
    {"nonseq-embed", {StrategyKind::NonSeqEmbed, Setting::NonSequential}},
    {"seq-encoder", {StrategyKind::SeqEncoder, Setting::Sequential}},
    {"seq-aggregator", {StrategyKind::SeqAggregator, Setting::Sequential}},
    {"soft-label", {StrategyKind::SoftLabel, Setting::NonSequential}},
    {"soft-label-seq", {StrategyKind::SoftLabel, Setting::Sequential}},
    {"multitask", {StrategyKind::Multitask, Setting::NonSequential}},
    {"multitask-seq", {StrategyKind::Multitask, Setting::Sequential}},
};

bool needs_teacher(StrategyKind k) { return k != StrategyKind::NoDistill && k != StrategyKind::Multitask; }

bool uses_teacher_embeddings(StrategyKind k) {
    return k == StrategyKind::NonSeqEmbed || k == StrategyKind::SeqEncoder || k == StrategyKind::SeqAggregator;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t x = seed ^ (salt * 0x9e3779b97f4a7c15ULL);
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

void add_into(ParamSet& acc, const ParamSet& g) {
    for (auto& [group, tensors] : acc) {
        const auto& src = g.at(group);
        for (std::size_t i = 0; i < tensors.size(); ++i) {
            auto d = tensors[i].value.data();
            auto s = src[i].value.data();
            for (std::size_t j = 0; j < d.size(); ++j) d[j] += s[j];
        }
    }
}

void scale_in_place(ParamSet& p, double c) {
    for (auto& [group, tensors] : p)
        for (auto& t : tensors)
            for (auto& v : t.value.data()) v *= c;
}

Var embedding_distance(Var a, Var b, EmbeddingDistance d) {
    return d == EmbeddingDistance::Mse ? mse(a, b) : cosine_distance(a, b);
}

std::vector<Tensor> frame_logits(const FrozenTeacher& teacher, const PairedSample& sample,
                                 std::vector<Tensor>* embeddings) {
    Tape tape;
    BoundModel m(tape, teacher.params());
    std::vector<Tensor> logits;
    for (const auto& frame : sample.privileged_frames) {
        Var e = m.encoder(tape.constant(frame));
        logits.push_back(m.head(e).value());
        if (embeddings) embeddings->push_back(e.value());
    }
    return logits;
}

Tensor teacher_aggregate(const FrozenTeacher& teacher, const PairedSample& sample, Tensor* logits) {
    Tape tape;
    BoundModel m(tape, teacher.params());
    std::vector<Var> seq;
    for (const auto& frame : sample.privileged_frames) seq.push_back(m.encoder(tape.constant(frame)));
    Var agg = m.aggregator(seq);
    if (logits) *logits = m.head(agg).value();
    return agg.value();
}

}  // namespace

Strategy Strategy::parse(std::string_view name) {
    for (const auto& entry : kStrategyNames)
        if (name == entry.name) return entry.strategy;
    throw ConfigError("unknown strategy '" + std::string(name) + "'", "strategies");
}

std::string Strategy::name() const {
    for (const auto& entry : kStrategyNames)
        if (entry.strategy == *this) return entry.name;
    throw ContractError("strategy kind incompatible with its setting");
}

std::set<Group> routed_groups(StrategyKind kind) {
    switch (kind) {
        case StrategyKind::NoDistill: return {};
        case StrategyKind::NonSeqEmbed:
        case StrategyKind::SeqEncoder: return {Group::Encoder};
        case StrategyKind::SeqAggregator: return {Group::Encoder, Group::Aggregator};
        case StrategyKind::SoftLabel:
        case StrategyKind::Multitask: return {Group::Encoder, Group::Aggregator, Group::Decoder};
    }
    return {};
}

MixSpec MixSpec::for_strategy(StrategyKind kind, double alpha) {
    MixSpec m{alpha, routed_groups(kind)};
    m.validate();
    return m;
}

void MixSpec::validate() const {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw ContractError("alpha must lie in [0, 1], got " + std::to_string(alpha));
    if (routed.contains(Group::Head)) throw ContractError("the head group is trained on the label loss only");
}

void TrainConfig::validate() const {
    if (epochs == 0) throw ConfigError("must be positive", "epochs");
    if (batch_size == 0) throw ConfigError("must be positive", "batch_size");
    if (!(optimizer.learning_rate > 0.0)) throw ConfigError("must be positive", "learning_rate");
    if (!(optimizer.beta1 >= 0.0 && optimizer.beta1 < 1.0)) throw ConfigError("must lie in [0, 1)", "beta1");
    if (!(optimizer.beta2 >= 0.0 && optimizer.beta2 < 1.0)) throw ConfigError("must lie in [0, 1)", "beta2");
    if (!(optimizer.epsilon > 0.0)) throw ConfigError("must be positive", "epsilon");
}

void AdamOptimizer::step(ParamSet& params, const ParamSet& grads) {
    if (steps_ == 0) {
        first_ = zeros_like(params);
        second_ = zeros_like(params);
    }
    ++steps_;
    const double b1 = config_.beta1, b2 = config_.beta2;
    const double correction1 = 1.0 - std::pow(b1, static_cast<double>(steps_));
    const double correction2 = 1.0 - std::pow(b2, static_cast<double>(steps_));
    for (auto& [group, tensors] : params) {
        auto git = grads.find(group);
        if (git == grads.end() || git->second.size() != tensors.size())
            throw ContractError("gradient layout does not match parameters in group " + std::string(group_name(group)));
        auto& m = first_.at(group);
        auto& v = second_.at(group);
        for (std::size_t i = 0; i < tensors.size(); ++i) {
            auto p = tensors[i].value.data();
            auto g = git->second[i].value.data();
            if (g.size() != p.size()) throw DimensionError("gradient shape mismatch for " + tensors[i].name);
            auto mi = m[i].value.data();
            auto vi = v[i].value.data();
            for (std::size_t j = 0; j < p.size(); ++j) {
                mi[j] = b1 * mi[j] + (1.0 - b1) * g[j];
                vi[j] = b2 * vi[j] + (1.0 - b2) * g[j] * g[j];
                const double mhat = mi[j] / correction1;
                const double vhat = vi[j] / correction2;
                p[j] -= config_.learning_rate * mhat / (std::sqrt(vhat) + config_.epsilon);
            }
        }
    }
}

ModelConfig teacher_model_config(const DatasetSpec& data, const Architecture& arch, Setting setting) {
    ModelConfig c;
    c.encoder = EncoderConfig{data.privileged_dim, arch.hidden_dims, arch.embedding_dim, Activation::Relu};
    if (setting == Setting::Sequential) c.aggregator = AggregatorConfig{arch.aggregator, arch.embedding_dim};
    c.num_classes = data.num_classes;
    c.validate();
    return c;
}

ModelConfig student_model_config(const DatasetSpec& data, const Architecture& arch, Strategy strategy) {
    ModelConfig c;
    const bool seq = strategy.setting == Setting::Sequential;
    c.encoder = EncoderConfig{seq ? data.primary_dim : data.primary_dim * data.segments, arch.hidden_dims,
                              arch.embedding_dim, Activation::Relu};
    if (seq) c.aggregator = AggregatorConfig{arch.aggregator, arch.embedding_dim};
    c.num_classes = data.num_classes;
    if (strategy.kind == StrategyKind::Multitask) c.decoder = DecoderConfig{{arch.embedding_dim}, data.privileged_dim};
    c.validate();
    return c;
}

std::vector<Tensor> FrozenTeacher::frame_embeddings(const PairedSample& sample) const {
    Tape tape;
    BoundModel m(tape, params_);
    std::vector<Tensor> out;
    for (const auto& frame : sample.privileged_frames) out.push_back(m.encoder(tape.constant(frame)).value());
    return out;
}

std::size_t FrozenTeacher::predict(const PairedSample& sample) const {
    if (setting_ == Setting::Sequential) {
        Tensor logits;
        teacher_aggregate(*this, sample, &logits);
        return argmax(logits.data());
    }
    const auto logits = frame_logits(*this, sample, nullptr);
    std::vector<double> mean_prob(params_.config.num_classes, 0.0);
    for (const auto& l : logits) {
        const auto p = softmax(l.data());
        for (std::size_t c = 0; c < p.size(); ++c) mean_prob[c] += p[c];
    }
    return argmax(mean_prob);
}

FrozenTeacher train_teacher(std::span<const PairedSample> train, const ModelConfig& config, Setting setting,
                            const TrainConfig& train_config, std::uint64_t seed, TeacherHistory* history) {
    if (train.empty()) throw ContractError("train_teacher on an empty dataset");
    train_config.validate();
    if ((setting == Setting::Sequential) != config.aggregator.has_value())
        throw ConfigError("sequential teachers need an aggregator, non-sequential teachers must not have one");

    ModelParams params = init_params(config, seed);
    AdamOptimizer adam(train_config.optimizer);

    // (sample, frame) pairs; frame is ignored for sequential teachers.
    std::vector<std::pair<std::size_t, std::size_t>> examples;
    for (std::size_t i = 0; i < train.size(); ++i) {
        if (setting == Setting::Sequential)
            examples.emplace_back(i, 0);
        else
            for (std::size_t j = 0; j < train[i].privileged_frames.size(); ++j) examples.emplace_back(i, j);
    }

    std::mt19937_64 rng(mix_seed(seed, 0x7eac));
    for (std::size_t epoch = 0; epoch < train_config.epochs; ++epoch) {
        std::shuffle(examples.begin(), examples.end(), rng);
        double loss_sum = 0.0;
        for (std::size_t start = 0; start < examples.size(); start += train_config.batch_size) {
            const std::size_t end = std::min(examples.size(), start + train_config.batch_size);
            ParamSet batch = zeros_like(params.groups);
            for (std::size_t e = start; e < end; ++e) {
                const auto& [si, fj] = examples[e];
                const PairedSample& s = train[si];
                Tape tape;
                BoundModel m(tape, params);
                Var logits;
                if (setting == Setting::Sequential) {
                    std::vector<Var> seq;
                    for (const auto& frame : s.privileged_frames) seq.push_back(m.encoder(tape.constant(frame)));
                    logits = m.head(m.aggregator(seq));
                } else {
                    logits = m.head(m.encoder(tape.constant(s.privileged_frames[fj])));
                }
                Var loss = softmax_cross_entropy(logits, s.label);
                loss_sum += loss.value().item();
                add_into(batch, m.gradients(tape.backward(loss)));
            }
            scale_in_place(batch, 1.0 / static_cast<double>(end - start));
            adam.step(params.groups, batch);
        }
        if (history) history->epoch_loss.push_back(loss_sum / static_cast<double>(examples.size()));
    }
    return FrozenTeacher(std::move(params), setting);
}

double teacher_accuracy(const FrozenTeacher& teacher, std::span<const PairedSample> samples) {
    std::vector<std::size_t> preds, labels;
    for (const auto& s : samples) {
        preds.push_back(teacher.predict(s));
        labels.push_back(s.label);
    }
    return accuracy(preds, labels);
}

std::size_t peak_frame_index(std::span<const Tensor> frame_logits) {
    if (frame_logits.empty()) throw ContractError("peak frame selection over no frames");
    std::vector<double> confidence;
    confidence.reserve(frame_logits.size());
    for (const auto& l : frame_logits) {
        const auto p = softmax(l.data());
        confidence.push_back(p[argmax(p)]);
    }
    return argmax(confidence);
}

Tensor select_peak_frame(std::span<const Tensor> frame_embeddings, std::span<const Tensor> frame_logits) {
    if (frame_embeddings.size() != frame_logits.size())
        throw ContractError("peak frame selection: " + std::to_string(frame_embeddings.size()) + " embeddings for " +
                            std::to_string(frame_logits.size()) + " logit vectors");
    return frame_embeddings[peak_frame_index(frame_logits)];
}

Tensor segment_average(std::span<const Tensor> frame_embeddings, std::size_t r, std::size_t k) {
    if (r == 0) throw ContractError("frames per segment must be at least 1");
    if (r * (k + 1) > frame_embeddings.size())
        throw ContractError("segment " + std::to_string(k) + " with r=" + std::to_string(r) + " exceeds " +
                            std::to_string(frame_embeddings.size()) + " frames");
    Tensor out(frame_embeddings[r * k].shape(), 0.0);
    for (std::size_t j = r * k; j < r * (k + 1); ++j) {
        if (frame_embeddings[j].shape() != out.shape()) throw DimensionError("segment_average: embedding shapes differ");
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += frame_embeddings[j][i];
    }
    for (auto& v : out.data()) v /= static_cast<double>(r);
    return out;
}

DistillTargets compute_targets(const FrozenTeacher* teacher, const PairedSample& sample, Strategy strategy) {
    DistillTargets t;
    if (strategy.kind == StrategyKind::NoDistill) return t;
    if (strategy.kind == StrategyKind::Multitask) {
        if (sample.privileged_frames.empty()) throw ContractError("multitask target needs privileged frames");
        Tensor mean(sample.privileged_frames.front().shape(), 0.0);
        for (const auto& f : sample.privileged_frames)
            for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += f[i];
        for (auto& v : mean.data()) v /= static_cast<double>(sample.privileged_frames.size());
        t.privileged_mean = std::move(mean);
        return t;
    }
    if (!teacher) throw ContractError(strategy.name() + " needs a frozen teacher");
    if (teacher->setting() != strategy.setting)
        throw ContractError(strategy.name() + " needs a " +
                            (strategy.setting == Setting::Sequential ? "sequential" : "non-sequential") + " teacher");
    if (sample.privileged_frames.empty()) throw ContractError("sample has no privileged frames");

    switch (strategy.kind) {
        case StrategyKind::NonSeqEmbed: {
            std::vector<Tensor> emb;
            const auto logits = frame_logits(*teacher, sample, &emb);
            t.peak = select_peak_frame(emb, logits);
            break;
        }
        case StrategyKind::SeqEncoder: {
            const std::size_t r = sample.frames_per_segment();
            const auto emb = teacher->frame_embeddings(sample);
            for (std::size_t k = 0; k < sample.primary_segments.size(); ++k)
                t.per_segment.push_back(segment_average(emb, r, k));
            break;
        }
        case StrategyKind::SeqAggregator: t.aggregate = teacher_aggregate(*teacher, sample, nullptr); break;
        case StrategyKind::SoftLabel: {
            if (strategy.setting == Setting::Sequential) {
                Tensor logits;
                teacher_aggregate(*teacher, sample, &logits);
                t.soft_labels = Tensor(logits.shape(), softmax(logits.data()));
            } else {
                const auto logits = frame_logits(*teacher, sample, nullptr);
                const auto& peak = logits[peak_frame_index(logits)];
                t.soft_labels = Tensor(peak.shape(), softmax(peak.data()));
            }
            break;
        }
        default: break;
    }
    return t;
}

StudentForward student_forward(const BoundModel& model, const PairedSample& sample, Setting setting) {
    Tape& tape = model.tape();
    StudentForward f;
    if (setting == Setting::NonSequential) {
        f.embedding = model.encoder(tape.constant(flatten_nonsequential(sample).first));
    } else {
        for (const auto& seg : sample.primary_segments) f.segment_embeddings.push_back(model.encoder(tape.constant(seg)));
        f.embedding = model.aggregator(f.segment_embeddings);
    }
    f.logits = model.head(f.embedding);
    return f;
}

LossPair student_losses(const BoundModel& model, const StudentForward& forward, const PairedSample& sample,
                        const DistillTargets& targets, Strategy strategy, EmbeddingDistance distance) {
    Tape& tape = model.tape();
    LossPair out{softmax_cross_entropy(forward.logits, sample.label), std::nullopt};
    auto missing = [&](const char* field) {
        return ContractError(strategy.name() + " needs the '" + field + "' target for sample " + std::to_string(sample.id));
    };
    switch (strategy.kind) {
        case StrategyKind::NoDistill: break;
        case StrategyKind::NonSeqEmbed:
            if (!targets.peak) throw missing("peak");
            out.privileged_loss = embedding_distance(forward.embedding, tape.constant(*targets.peak), distance);
            break;
        case StrategyKind::SeqEncoder: {
            if (targets.per_segment.empty()) throw missing("per-segment");
            if (targets.per_segment.size() != forward.segment_embeddings.size())
                throw ContractError("per-segment target count differs from the sample's segment count");
            Var total = embedding_distance(forward.segment_embeddings[0], tape.constant(targets.per_segment[0]), distance);
            for (std::size_t k = 1; k < targets.per_segment.size(); ++k)
                total = add(total, embedding_distance(forward.segment_embeddings[k], tape.constant(targets.per_segment[k]),
                                                      distance));
            out.privileged_loss = total;
            break;
        }
        case StrategyKind::SeqAggregator:
            if (!targets.aggregate) throw missing("aggregate");
            out.privileged_loss = embedding_distance(forward.embedding, tape.constant(*targets.aggregate), distance);
            break;
        case StrategyKind::SoftLabel:
            if (!targets.soft_labels) throw missing("soft-labels");
            out.privileged_loss = softmax_cross_entropy(forward.logits, *targets.soft_labels);
            break;
        case StrategyKind::Multitask:
            if (!targets.privileged_mean) throw missing("privileged-mean");
            out.privileged_loss = mse(model.decoder(forward.embedding), tape.constant(*targets.privileged_mean));
            break;
    }
    return out;
}

SampleGradients sample_gradients(const ModelParams& student, const PairedSample& sample, const DistillTargets& targets,
                                 Strategy strategy, EmbeddingDistance distance) {
    Tape tape;
    BoundModel m(tape, student);
    const StudentForward f = student_forward(m, sample, strategy.setting);
    const LossPair losses = student_losses(m, f, sample, targets, strategy, distance);
    SampleGradients g;
    g.label_loss = losses.label_loss.value().item();
    g.prediction = argmax(f.logits.value().data());
    g.label_grad = m.gradients(tape.backward(losses.label_loss));
    if (losses.privileged_loss) {
        g.privileged_loss = losses.privileged_loss->value().item();
        g.privileged_grad = m.gradients(tape.backward(*losses.privileged_loss));
    } else {
        g.privileged_grad = zeros_like(g.label_grad);
    }
    return g;
}

ParamSet mix_gradients(const ParamSet& label_grad, const ParamSet& privileged_grad, const MixSpec& mix) {
    mix.validate();
    ParamSet out;
    for (const auto& [group, tensors] : label_grad) {
        if (!mix.routed.contains(group) || mix.alpha == 0.0) {
            out[group] = tensors;
            continue;
        }
        auto pit = privileged_grad.find(group);
        if (pit == privileged_grad.end() || pit->second.size() != tensors.size())
            throw ContractError("privileged gradient lacks group " + std::string(group_name(group)));
        if (mix.alpha == 1.0) {
            out[group] = pit->second;
            continue;
        }
        auto& dst = out[group];
        for (std::size_t i = 0; i < tensors.size(); ++i) {
            Tensor t = tensors[i].value;
            auto p = pit->second[i].value.data();
            for (std::size_t j = 0; j < t.size(); ++j) t[j] = (1.0 - mix.alpha) * t[j] + mix.alpha * p[j];
            dst.push_back({tensors[i].name, std::move(t)});
        }
    }
    return out;
}

void mixed_step(ModelParams& student, const ParamSet& label_grad, const ParamSet& privileged_grad, const MixSpec& mix,
                AdamOptimizer& optimizer) {
    optimizer.step(student.groups, mix_gradients(label_grad, privileged_grad, mix));
}

std::vector<std::size_t> student_predictions(const ModelParams& student, std::span<const PairedSample> samples,
                                             Setting setting) {
    std::vector<std::size_t> out;
    out.reserve(samples.size());
    for (const auto& s : samples) {
        Tape tape;
        BoundModel m(tape, student);
        out.push_back(argmax(student_forward(m, s, setting).logits.value().data()));
    }
    return out;
}

std::vector<Tensor> student_embeddings(const ModelParams& student, std::span<const PairedSample> samples,
                                       Setting setting) {
    std::vector<Tensor> out;
    out.reserve(samples.size());
    for (const auto& s : samples) {
        Tape tape;
        BoundModel m(tape, student);
        out.push_back(student_forward(m, s, setting).embedding.value());
    }
    return out;
}

StudentRun train_student(const Dataset& data, const FrozenTeacher* teacher, Strategy strategy, double alpha,
                         const TrainConfig& config, const Architecture& arch, std::uint64_t seed) {
    if (data.train.empty()) throw ContractError("train_student on an empty training split");
    config.validate();
    const MixSpec mix = MixSpec::for_strategy(strategy.kind, alpha);
    strategy.name();  // rejects kind/setting combinations that have no name
    if (needs_teacher(strategy.kind) && !teacher) throw ContractError(strategy.name() + " needs a frozen teacher");
    if (teacher && uses_teacher_embeddings(strategy.kind) &&
        teacher->params().config.encoder.embedding_dim != arch.embedding_dim)
        throw ConfigError("teacher and student embedding dims differ (" +
                              std::to_string(teacher->params().config.encoder.embedding_dim) + " vs " +
                              std::to_string(arch.embedding_dim) + ")",
                          "student.embedding_dim");

    StudentRun run{init_params(student_model_config(data.spec, arch, strategy), seed), {}};
    AdamOptimizer adam(config.optimizer);

    std::vector<DistillTargets> targets;
    targets.reserve(data.train.size());
    for (const auto& s : data.train) targets.push_back(compute_targets(teacher, s, strategy));

    std::vector<std::size_t> order(data.train.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(mix_seed(seed, 0x5717));

    std::vector<std::size_t> train_labels, val_labels;
    for (const auto& s : data.train) train_labels.push_back(s.label);
    for (const auto& s : data.validation) val_labels.push_back(s.label);

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double loss_y = 0.0, loss_pi = 0.0;
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const std::size_t end = std::min(order.size(), start + config.batch_size);
            ParamSet batch = zeros_like(run.params.groups);
            for (std::size_t b = start; b < end; ++b) {
                const std::size_t i = order[b];
                const SampleGradients g = sample_gradients(run.params, data.train[i], targets[i], strategy, config.distance);
                loss_y += g.label_loss;
                loss_pi += g.privileged_loss;
                add_into(batch, mix_gradients(g.label_grad, g.privileged_grad, mix));
            }
            scale_in_place(batch, 1.0 / static_cast<double>(end - start));
            adam.step(run.params.groups, batch);
        }
        EpochRecord rec;
        rec.epoch = epoch + 1;
        rec.mean_loss_y = loss_y / static_cast<double>(order.size());
        rec.mean_loss_pi = loss_pi / static_cast<double>(order.size());
        rec.train_acc = accuracy(student_predictions(run.params, data.train, strategy.setting), train_labels);
        rec.val_acc = data.validation.empty()
                          ? 0.0
                          : accuracy(student_predictions(run.params, data.validation, strategy.setting), val_labels);
        run.history.push_back(rec);
    }
    return run;
}

std::string history_csv(std::span<const EpochRecord> history) {
    std::ostringstream out;
    out << "epoch,mean_loss_y,mean_loss_pi,train_acc,val_acc\n";
    char line[160];
    for (const auto& r : history) {
        std::snprintf(line, sizeof line, "%zu,%.6f,%.6f,%.4f,%.4f\n", r.epoch, r.mean_loss_y, r.mean_loss_pi,
                      r.train_acc, r.val_acc);
        out << line;
    }
    return out.str();
}

void write_history_csv(std::span<const EpochRecord> history, const std::filesystem::path& path) {
    const std::string text = history_csv(history);
    write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace lupi
