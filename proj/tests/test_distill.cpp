#include <cmath>
#include <random>

#include "doctest.h"
#include "lupi/distill.hpp"
#include "lupi/errors.hpp"
#include "lupi/metrics.hpp"
#include "test_support.hpp"

using namespace lupi;
using lupi::testing::random_tensor;
using lupi::testing::randomize;

namespace {

DatasetSpec tiny_spec() {
    DatasetSpec s;
    s.num_classes = 3;
    s.samples_per_class = 12;
    s.primary_dim = 4;
    s.privileged_dim = 5;
    s.segments = 3;
    s.frames_per_segment = 2;
    return s;
}

Architecture tiny_arch() {
    Architecture a;
    a.hidden_dims = {6};
    a.embedding_dim = 4;
    return a;
}

TrainConfig quick(std::size_t epochs) {
    TrainConfig c;
    c.epochs = epochs;
    c.batch_size = 8;
    return c;
}

const std::vector<Strategy>& all_strategies() {
    static const std::vector<Strategy> s{
        Strategy::parse("no-distill"),     Strategy::parse("no-distill-seq"), Strategy::parse("nonseq-embed"),
        Strategy::parse("seq-encoder"),    Strategy::parse("seq-aggregator"), Strategy::parse("soft-label"),
        Strategy::parse("soft-label-seq"), Strategy::parse("multitask"),      Strategy::parse("multitask-seq")};
    return s;
}

struct Fixture {
    Dataset data = generate(tiny_spec());
    FrozenTeacher flat = train_teacher(data.train, teacher_model_config(tiny_spec(), tiny_arch(), Setting::NonSequential),
                                       Setting::NonSequential, quick(2), 3);
    FrozenTeacher seq = train_teacher(data.train, teacher_model_config(tiny_spec(), tiny_arch(), Setting::Sequential),
                                      Setting::Sequential, quick(2), 3);
    const FrozenTeacher& for_setting(Setting s) const { return s == Setting::Sequential ? seq : flat; }
};

const Fixture& fixture() {
    static const Fixture f;
    return f;
}

double mse_oracle(const Tensor& a, const Tensor& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return s / static_cast<double>(a.size());
}

ModelParams random_student(Strategy strategy, std::mt19937_64& rng) {
    return randomize(init_params(student_model_config(tiny_spec(), tiny_arch(), strategy), 1), rng);
}

}  // namespace

TEST_CASE("strategy names") {
    for (const auto& s : all_strategies()) CHECK(Strategy::parse(s.name()) == s);
    CHECK(Strategy::parse("nonseq-embed").setting == Setting::NonSequential);
    CHECK(Strategy::parse("seq-encoder").setting == Setting::Sequential);
    try {
        Strategy::parse("bogus");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.key() == "strategies");
    }
}

TEST_CASE("routing table") {
    using enum Group;
    CHECK(routed_groups(StrategyKind::NoDistill).empty());
    CHECK(routed_groups(StrategyKind::NonSeqEmbed) == std::set<Group>{Encoder});
    CHECK(routed_groups(StrategyKind::SeqEncoder) == std::set<Group>{Encoder});
    CHECK(routed_groups(StrategyKind::SeqAggregator) == std::set<Group>{Encoder, Aggregator});
    CHECK(routed_groups(StrategyKind::SoftLabel) == std::set<Group>{Encoder, Aggregator, Decoder});
    CHECK(routed_groups(StrategyKind::Multitask) == std::set<Group>{Encoder, Aggregator, Decoder});
    CHECK_THROWS_AS(MixSpec::for_strategy(StrategyKind::NonSeqEmbed, 1.5), ContractError);
    CHECK_THROWS_AS(MixSpec::for_strategy(StrategyKind::NonSeqEmbed, -0.1), ContractError);
    CHECK_THROWS_AS((MixSpec{0.5, {Head}}.validate()), ContractError);
}

TEST_CASE("peak frame selection") {
    const std::vector<Tensor> logits{Tensor::vector({0, 0}), Tensor::vector({3, 0}), Tensor::vector({1, 0})};
    CHECK(peak_frame_index(logits) == 1);
    const std::vector<Tensor> emb{Tensor::vector({1}), Tensor::vector({2}), Tensor::vector({3})};
    CHECK(select_peak_frame(emb, logits) == Tensor::vector({2}));
    CHECK(select_peak_frame(std::vector<Tensor>{Tensor::vector({7, 8})}, std::vector<Tensor>{Tensor::vector({1, 2})}) ==
          Tensor::vector({7, 8}));
    CHECK(peak_frame_index(std::vector<Tensor>(4, Tensor::vector({0.3, -1, 2}))) == 0);
    CHECK_THROWS_AS(select_peak_frame(emb, std::vector<Tensor>{Tensor::vector({1, 2})}), ContractError);
    CHECK_THROWS_AS(peak_frame_index(std::vector<Tensor>{}), ContractError);

    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<Tensor> ls;
        for (int j = 0; j < 5; ++j) ls.push_back(random_tensor({3}, rng));
        std::size_t best = 0;
        double best_conf = -1.0;
        for (std::size_t j = 0; j < ls.size(); ++j) {
            double z = 0.0, top = -1e300;
            for (double v : ls[j].data()) top = std::max(top, v);
            for (double v : ls[j].data()) z += std::exp(v - top);
            if (1.0 / z > best_conf) {
                best_conf = 1.0 / z;
                best = j;
            }
        }
        CHECK(peak_frame_index(ls) == best);

        // Two-class confidence is monotone in the logit gap, so positive scaling keeps the peak.
        std::vector<Tensor> two;
        for (int j = 0; j < 5; ++j) two.push_back(random_tensor({2}, rng));
        const auto peak = peak_frame_index(two);
        for (auto& l : two)
            for (auto& v : l.data()) v *= 2.5;
        CHECK(peak_frame_index(two) == peak);
    }

    // With three or more classes the peak can move under scaling.
    std::vector<Tensor> three{Tensor::vector({0, -1, -1}), Tensor::vector({0, -0.5, -10})};
    CHECK(peak_frame_index(three) == 1);
    for (auto& l : three)
        for (auto& v : l.data()) v *= 10.0;
    CHECK(peak_frame_index(three) == 0);
}

TEST_CASE("segment_average") {
    const std::vector<Tensor> two{Tensor::vector({0, 0}), Tensor::vector({2, 4})};
    CHECK(segment_average(two, 2, 0) == Tensor::vector({1, 2}));
    CHECK(segment_average(two, 1, 1) == Tensor::vector({2, 4}));
    CHECK_THROWS_AS(segment_average(two, 2, 1), ContractError);
    CHECK_THROWS_AS(segment_average(two, 0, 0), ContractError);

    std::mt19937_64 rng(13);
    for (std::size_t r : {1, 2, 3, 5}) {
        std::vector<Tensor> frames;
        for (std::size_t j = 0; j < 3 * r; ++j) frames.push_back(random_tensor({4}, rng));
        for (std::size_t k = 0; k < 3; ++k) {
            Tensor want(Shape{4}, 0.0);
            for (std::size_t j = r * k; j < r * (k + 1); ++j)
                for (std::size_t i = 0; i < 4; ++i) want[i] += frames[j][i] / static_cast<double>(r);
            const auto got = segment_average(frames, r, k);
            for (std::size_t i = 0; i < 4; ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-14));
        }
    }
}

TEST_CASE("compute_targets") {
    const auto& f = fixture();
    const auto& sample = f.data.train.front();
    CHECK(compute_targets(nullptr, sample, Strategy::parse("no-distill")).empty());
    CHECK_THROWS_AS(compute_targets(nullptr, sample, Strategy::parse("nonseq-embed")), ContractError);
    CHECK_THROWS_AS(compute_targets(&f.seq, sample, Strategy::parse("nonseq-embed")), ContractError);
    CHECK_THROWS_AS(compute_targets(&f.flat, sample, Strategy::parse("seq-aggregator")), ContractError);

    const auto peak = compute_targets(&f.flat, sample, Strategy::parse("nonseq-embed"));
    CHECK(peak.peak.has_value());
    CHECK_FALSE(peak.aggregate.has_value());
    CHECK(peak.per_segment.empty());
    CHECK(peak == compute_targets(&f.flat, sample, Strategy::parse("nonseq-embed")));

    const auto frames = f.flat.frame_embeddings(sample);
    std::vector<Tensor> logits;
    for (const auto& e : frames) logits.push_back(head_forward(f.flat.params(), e));
    CHECK(*peak.peak == select_peak_frame(frames, logits));

    const auto per_seg = compute_targets(&f.seq, sample, Strategy::parse("seq-encoder"));
    CHECK(per_seg.per_segment.size() == sample.primary_segments.size());
    const auto seq_frames = f.seq.frame_embeddings(sample);
    for (std::size_t k = 0; k < per_seg.per_segment.size(); ++k)
        CHECK(per_seg.per_segment[k] == segment_average(seq_frames, sample.frames_per_segment(), k));

    const auto agg = compute_targets(&f.seq, sample, Strategy::parse("seq-aggregator"));
    CHECK(*agg.aggregate == aggregator_forward(f.seq.params(), seq_frames));

    for (const char* name : {"soft-label", "soft-label-seq"}) {
        const auto s = Strategy::parse(name);
        const auto t = compute_targets(&f.for_setting(s.setting), sample, s);
        REQUIRE(t.soft_labels.has_value());
        double total = 0.0;
        for (double v : t.soft_labels->data()) total += v;
        CHECK(std::abs(total - 1.0) <= 1e-12);
    }

    const auto mt = compute_targets(nullptr, sample, Strategy::parse("multitask"));
    for (std::size_t i = 0; i < 5; ++i) {
        double m = 0.0;
        for (const auto& fr : sample.privileged_frames) m += fr[i];
        CHECK((*mt.privileged_mean)[i] == doctest::Approx(m / sample.privileged_frames.size()).epsilon(1e-14));
    }
}

TEST_CASE("student_losses") {
    std::mt19937_64 rng(31);
    const auto& sample = fixture().data.train.front();

    SUBCASE("seq-encoder sums per-segment distances") {
        const auto s = Strategy::parse("seq-encoder");
        const auto p = random_student(s, rng);
        DistillTargets t;
        for (std::size_t k = 0; k < 3; ++k) t.per_segment.push_back(random_tensor({4}, rng));
        Tape tape;
        BoundModel m(tape, p);
        const auto f = student_forward(m, sample, s.setting);
        const auto losses = student_losses(m, f, sample, t, s);
        double want = 0.0;
        for (std::size_t k = 0; k < 3; ++k)
            want += mse_oracle(encoder_forward(p, sample.primary_segments[k]), t.per_segment[k]);
        CHECK(losses.privileged_loss->value().item() == doctest::Approx(want).epsilon(1e-13));

        // Gradient of the sum equals the sum of per-segment gradients.
        const auto full = m.gradients(tape.backward(*losses.privileged_loss));
        ParamSet summed = zeros_like(p.groups);
        for (std::size_t k = 0; k < 3; ++k) {
            Tape tk;
            BoundModel mk(tk, p);
            const auto g = mk.gradients(tk.backward(
                mse(mk.encoder(tk.constant(sample.primary_segments[k])), tk.constant(t.per_segment[k]))));
            for (auto& [group, ts] : summed)
                for (std::size_t i = 0; i < ts.size(); ++i)
                    for (std::size_t j = 0; j < ts[i].value.size(); ++j) ts[i].value[j] += g.at(group)[i].value[j];
        }
        for (const auto& [group, ts] : full)
            for (std::size_t i = 0; i < ts.size(); ++i)
                for (std::size_t j = 0; j < ts[i].value.size(); ++j)
                    CHECK(std::abs(ts[i].value[j] - summed.at(group)[i].value[j]) <= 1e-12);
    }
    SUBCASE("matching targets give zero distance") {
        for (const char* name : {"nonseq-embed", "seq-aggregator"}) {
            const auto s = Strategy::parse(name);
            const auto p = random_student(s, rng);
            Tape tape;
            BoundModel m(tape, p);
            const auto f = student_forward(m, sample, s.setting);
            DistillTargets t;
            (s.kind == StrategyKind::NonSeqEmbed ? t.peak : t.aggregate) = f.embedding.value();
            CHECK(student_losses(m, f, sample, t, s).privileged_loss->value().item() == 0.0);
        }
    }
    SUBCASE("soft-label with a confident match is near zero") {
        const auto s = Strategy::parse("soft-label");
        auto p = init_params(student_model_config(tiny_spec(), tiny_arch(), s), 1);
        auto& bias = p.get(Group::Head, "b");
        bias = Tensor(bias.shape(), 0.0);
        bias[2] = 60.0;
        DistillTargets t;
        t.soft_labels = Tensor::vector({0, 0, 1});
        Tape tape;
        BoundModel m(tape, p);
        const auto f = student_forward(m, sample, s.setting);
        CHECK(student_losses(m, f, sample, t, s).privileged_loss->value().item() < 1e-12);
    }
    SUBCASE("label loss and missing targets") {
        for (const auto& s : all_strategies()) {
            const auto p = random_student(s, rng);
            Tape tape;
            BoundModel m(tape, p);
            const auto f = student_forward(m, sample, s.setting);
            if (s.kind == StrategyKind::NoDistill) {
                const auto l = student_losses(m, f, sample, {}, s);
                CHECK_FALSE(l.privileged_loss.has_value());
                const auto z = softmax(f.logits.value().data());
                CHECK(l.label_loss.value().item() == doctest::Approx(-std::log(z[sample.label])).epsilon(1e-13));
            } else {
                CHECK_THROWS_AS(student_losses(m, f, sample, {}, s), ContractError);
            }
        }
    }
}

TEST_CASE("two-pass gradient mixing") {
    const auto& f = fixture();
    std::mt19937_64 rng(41);
    for (const auto& s : all_strategies()) {
        if (s.kind == StrategyKind::NoDistill) continue;
        const auto p = random_student(s, rng);
        const auto& sample = f.data.train[3];
        const auto targets = compute_targets(&f.for_setting(s.setting), sample, s);

        // Two independent single-loss passes.
        auto pass = [&](bool privileged) {
            Tape tape;
            BoundModel m(tape, p);
            const auto fw = student_forward(m, sample, s.setting);
            const auto l = student_losses(m, fw, sample, targets, s);
            return m.gradients(tape.backward(privileged ? *l.privileged_loss : l.label_loss));
        };
        const ParamSet gy = pass(false), gpi = pass(true);
        const auto sg = sample_gradients(p, sample, targets, s);
        CHECK(sg.label_grad == gy);
        CHECK(sg.privileged_grad == gpi);

        const auto routed = routed_groups(s.kind);
        for (double alpha : {0.0, 0.25, 0.5, 0.75, 1.0}) {
            const auto mixed = mix_gradients(sg.label_grad, sg.privileged_grad, MixSpec::for_strategy(s.kind, alpha));
            for (const auto& [group, ts] : mixed) {
                const bool r = routed.contains(group);
                for (std::size_t i = 0; i < ts.size(); ++i)
                    for (std::size_t j = 0; j < ts[i].value.size(); ++j) {
                        const double y = gy.at(group)[i].value[j], pi = gpi.at(group)[i].value[j];
                        const double want = r ? (1.0 - alpha) * y + alpha * pi : y;
                        if (alpha == 0.0 || alpha == 1.0 || !r)
                            CHECK(ts[i].value[j] == (r && alpha == 1.0 ? pi : y));
                        else
                            CHECK(std::abs(ts[i].value[j] - want) <= 1e-12);
                    }
            }
        }
    }
}

TEST_CASE("alpha=1 nonseq-embed encoder gradient ignores labels") {
    const auto& f = fixture();
    const auto s = Strategy::parse("nonseq-embed");
    std::mt19937_64 rng(5);
    const auto p = random_student(s, rng);
    auto sample = f.data.train[1];
    const auto targets = compute_targets(&f.flat, sample, s);
    const auto mix = MixSpec::for_strategy(s.kind, 1.0);
    const auto a = mix_gradients(sample_gradients(p, sample, targets, s).label_grad,
                                 sample_gradients(p, sample, targets, s).privileged_grad, mix);
    sample.label = (sample.label + 1) % 3;
    const auto g2 = sample_gradients(p, sample, targets, s);
    const auto b = mix_gradients(g2.label_grad, g2.privileged_grad, mix);
    CHECK(a.at(Group::Encoder) == b.at(Group::Encoder));
    CHECK_FALSE(a.at(Group::Head) == b.at(Group::Head));
}

TEST_CASE("head update ignores teacher targets") {
    const auto& f = fixture();
    std::mt19937_64 rng(8);
    for (const char* name : {"nonseq-embed", "seq-encoder", "seq-aggregator"}) {
        const auto s = Strategy::parse(name);
        const auto p = random_student(s, rng);
        const auto& sample = f.data.train[2];
        auto t1 = compute_targets(&f.for_setting(s.setting), sample, s);
        auto t2 = t1;
        if (t2.peak) *t2.peak = random_tensor({4}, rng);
        if (t2.aggregate) *t2.aggregate = random_tensor({4}, rng);
        for (auto& t : t2.per_segment) t = random_tensor({4}, rng);
        const auto mix = MixSpec::for_strategy(s.kind, 0.5);
        auto step = [&](const DistillTargets& t) {
            auto params = p;
            AdamOptimizer opt;
            const auto g = sample_gradients(params, sample, t, s);
            mixed_step(params, g.label_grad, g.privileged_grad, mix, opt);
            return params;
        };
        const auto a = step(t1), b = step(t2);
        CHECK(a.groups.at(Group::Head) == b.groups.at(Group::Head));
        CHECK_FALSE(a.groups.at(Group::Encoder) == b.groups.at(Group::Encoder));
    }
}

TEST_CASE("adam step oracle") {
    ParamSet params{{Group::Head, {{"w", Tensor::vector({1.0, -2.0})}}}};
    const ParamSet grads{{Group::Head, {{"w", Tensor::vector({0.5, -0.1})}}}};
    AdamOptimizer opt;
    opt.step(params, grads);
    // First bias-corrected step moves each weight by lr * g / (|g| + eps').
    for (std::size_t i = 0; i < 2; ++i) {
        const double g = grads.at(Group::Head)[0].value[i];
        const double m = 0.1 * g / (1 - 0.9), v = 0.01 * g * g / (1 - 0.99);
        const double want = (i == 0 ? 1.0 : -2.0) - 1e-3 * m / (std::sqrt(v) + 1e-8);
        CHECK(params.at(Group::Head)[0].value[i] == doctest::Approx(want).epsilon(1e-14));
    }
    CHECK(opt.steps() == 1);
}

TEST_CASE("teacher training") {
    SUBCASE("single-class data is fit quickly") {
        DatasetSpec spec = tiny_spec();
        spec.frames_per_segment = 1;
        spec.segments = 1;
        auto ds = generate(spec);
        std::vector<PairedSample> one_class;
        for (auto s : ds.train)
            if (one_class.size() < 32) {
                s.label = 0;
                one_class.push_back(s);
            }
        TrainConfig cfg = quick(200);
        cfg.batch_size = 32;
        cfg.optimizer.learning_rate = 1e-2;
        TeacherHistory h;
        train_teacher(one_class, teacher_model_config(spec, tiny_arch(), Setting::NonSequential), Setting::NonSequential,
                      cfg, 1, &h);
        REQUIRE(h.epoch_loss.size() == 200);
        CHECK(h.epoch_loss.back() < 1e-3);
        CHECK(h.epoch_loss.back() < h.epoch_loss.front());
    }
    SUBCASE("linearly separable two-class frames") {
        DatasetSpec spec = tiny_spec();
        spec.num_classes = 2;
        spec.noise_sigma = 0.05;
        spec.latent_spread = 0.05;
        spec.informativeness = 1.0;
        const auto ds = generate(spec);
        std::vector<std::pair<Tensor, std::size_t>> frames;
        for (const auto& s : ds.train)
            for (const auto& fr : s.privileged_frames) frames.emplace_back(fr, s.label);

        // Independent logistic regression confirms separability first.
        std::vector<double> w(spec.privileged_dim + 1, 0.0);
        for (int it = 0; it < 2000; ++it) {
            std::vector<double> g(w.size(), 0.0);
            for (const auto& [x, y] : frames) {
                double z = w.back();
                for (std::size_t i = 0; i < x.size(); ++i) z += w[i] * x[i];
                const double err = 1.0 / (1.0 + std::exp(-z)) - static_cast<double>(y);
                for (std::size_t i = 0; i < x.size(); ++i) g[i] += err * x[i];
                g.back() += err;
            }
            for (std::size_t i = 0; i < w.size(); ++i) w[i] -= 0.5 * g[i] / frames.size();
        }
        std::size_t correct = 0;
        for (const auto& [x, y] : frames) {
            double z = w.back();
            for (std::size_t i = 0; i < x.size(); ++i) z += w[i] * x[i];
            correct += (z > 0) == (y == 1);
        }
        REQUIRE(correct == frames.size());

        const auto teacher = train_teacher(ds.train, teacher_model_config(spec, tiny_arch(), Setting::NonSequential),
                                           Setting::NonSequential, quick(30), 2);
        std::size_t hit = 0;
        for (const auto& [x, y] : frames) hit += argmax(head_forward(teacher.params(), encoder_forward(teacher.params(), x)).data()) == y;
        CHECK(hit == frames.size());
    }
    CHECK_THROWS_AS(train_teacher(std::vector<PairedSample>{}, teacher_model_config(tiny_spec(), tiny_arch(), Setting::NonSequential),
                                  Setting::NonSequential, quick(1), 1),
                    ContractError);
}

TEST_CASE("student training") {
    const auto& f = fixture();
    const auto flat_before = f.flat.params();
    const auto seq_before = f.seq.params();

    SUBCASE("deterministic per seed") {
        const auto s = Strategy::parse("seq-aggregator");
        const auto a = train_student(f.data, &f.seq, s, 0.5, quick(2), tiny_arch(), 4);
        const auto b = train_student(f.data, &f.seq, s, 0.5, quick(2), tiny_arch(), 4);
        CHECK(a.params == b.params);
        CHECK(a.history == b.history);
        CHECK(a.history.size() == 2);
        CHECK_FALSE(train_student(f.data, &f.seq, s, 0.5, quick(2), tiny_arch(), 5).params == a.params);
    }
    SUBCASE("alpha=0 reproduces no-distill") {
        for (const auto& s : all_strategies()) {
            if (s.kind == StrategyKind::NoDistill) continue;
            const Strategy base{StrategyKind::NoDistill, s.setting};
            const auto a = train_student(f.data, &f.for_setting(s.setting), s, 0.0, quick(3), tiny_arch(), 6);
            const auto b = train_student(f.data, nullptr, base, 0.0, quick(3), tiny_arch(), 6);
            for (Group g : {Group::Encoder, Group::Aggregator, Group::Head})
                if (b.params.has_group(g)) CHECK(a.params.groups.at(g) == b.params.groups.at(g));
            REQUIRE(a.history.size() == b.history.size());
            for (std::size_t e = 0; e < a.history.size(); ++e) {
                CHECK(a.history[e].mean_loss_y == b.history[e].mean_loss_y);
                CHECK(a.history[e].train_acc == b.history[e].train_acc);
                CHECK(a.history[e].val_acc == b.history[e].val_acc);
            }
        }
    }
    SUBCASE("separable data is learned without a teacher") {
        DatasetSpec spec = tiny_spec();
        spec.noise_sigma = 0.05;
        spec.latent_spread = 0.05;
        spec.samples_per_class = 40;
        const auto ds = generate(spec);
        const auto run = train_student(ds, nullptr, Strategy::parse("no-distill"), 0.0, quick(30), Architecture{}, 1);
        CHECK(run.history.back().train_acc >= 0.95);
    }
    SUBCASE("mismatched embedding widths") {
        auto arch = tiny_arch();
        arch.embedding_dim = 5;
        CHECK_THROWS_AS(train_student(f.data, &f.flat, Strategy::parse("nonseq-embed"), 0.5, quick(1), arch, 1),
                        ConfigError);
    }
    CHECK(f.flat.params() == flat_before);
    CHECK(f.seq.params() == seq_before);
}

TEST_CASE("history csv") {
    const std::vector<EpochRecord> h{{1, 1.5, 0.25, 0.5, 0.125}, {2, 1.0, 0.0, 0.75, 0.5}};
    const auto csv = history_csv(h);
    CHECK(csv.rfind("epoch,mean_loss_y,mean_loss_pi,train_acc,val_acc\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
    CHECK(csv.find("\n1,") != std::string::npos);
}
