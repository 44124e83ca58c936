#include "lupi/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include <yaml-cpp/yaml.h>

#include "lupi/binary_io.hpp"
#include "lupi/errors.hpp"
#include "lupi/metrics.hpp"

namespace lupi {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// ---- run spec parsing -------------------------------------------------------

std::string join(const std::string& path, std::string_view key) {
    return path.empty() ? std::string(key) : path + "." + std::string(key);
}

void check_keys(const YAML::Node& node, std::initializer_list<std::string_view> allowed, const std::string& path) {
    if (!node.IsMap()) throw ConfigError("expected a mapping", path.empty() ? "<root>" : path);
    for (const auto& kv : node) {
        const auto key = kv.first.as<std::string>();
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw ConfigError("unknown key", join(path, key));
    }
}

template <typename T>
T scalar(const YAML::Node& node, const std::string& path, const char* type) {
    if (!node.IsScalar()) throw ConfigError(std::string("expected ") + type, path);
    try {
        return node.as<T>();
    } catch (const YAML::Exception&) {
        throw ConfigError(std::string("expected ") + type + ", got '" + node.Scalar() + "'", path);
    }
}

std::size_t count(const YAML::Node& node, const std::string& path) {
    const auto text = node.IsScalar() ? node.Scalar() : std::string();
    if (!text.empty() && text.front() == '-') throw ConfigError("expected a non-negative integer", path);
    return scalar<std::size_t>(node, path, "a non-negative integer");
}

double real(const YAML::Node& node, const std::string& path) { return scalar<double>(node, path, "a number"); }

template <typename Fn>
auto sequence(const YAML::Node& node, const std::string& path, Fn&& item) {
    if (!node.IsSequence()) throw ConfigError("expected a list", path);
    std::vector<decltype(item(node, path))> out;
    for (std::size_t i = 0; i < node.size(); ++i) out.push_back(item(node[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

void read_dataset_spec(const YAML::Node& n, DatasetSpec& d, const std::string& p) {
    check_keys(n,
               {"num_classes", "samples_per_class", "primary_dim", "privileged_dim", "segments", "frames_per_segment",
                "noise_sigma", "informativeness", "seed", "latent_dim", "latent_spread", "privileged_noise_scale"},
               p);
    if (n["num_classes"]) d.num_classes = count(n["num_classes"], join(p, "num_classes"));
    if (n["samples_per_class"]) d.samples_per_class = count(n["samples_per_class"], join(p, "samples_per_class"));
    if (n["primary_dim"]) d.primary_dim = count(n["primary_dim"], join(p, "primary_dim"));
    if (n["privileged_dim"]) d.privileged_dim = count(n["privileged_dim"], join(p, "privileged_dim"));
    if (n["segments"]) d.segments = count(n["segments"], join(p, "segments"));
    if (n["frames_per_segment"]) d.frames_per_segment = count(n["frames_per_segment"], join(p, "frames_per_segment"));
    if (n["noise_sigma"]) d.noise_sigma = real(n["noise_sigma"], join(p, "noise_sigma"));
    if (n["informativeness"]) d.informativeness = real(n["informativeness"], join(p, "informativeness"));
    if (n["seed"]) d.seed = count(n["seed"], join(p, "seed"));
    if (n["latent_dim"]) d.latent_dim = count(n["latent_dim"], join(p, "latent_dim"));
    if (n["latent_spread"]) d.latent_spread = real(n["latent_spread"], join(p, "latent_spread"));
    if (n["privileged_noise_scale"])
        d.privileged_noise_scale = real(n["privileged_noise_scale"], join(p, "privileged_noise_scale"));
}

void read_architecture(const YAML::Node& n, Architecture& a, const std::string& p) {
    check_keys(n, {"hidden_dims", "embedding_dim", "aggregator"}, p);
    if (n["hidden_dims"])
        a.hidden_dims = sequence(n["hidden_dims"], join(p, "hidden_dims"),
                                 [](const YAML::Node& x, const std::string& xp) { return count(x, xp); });
    if (n["embedding_dim"]) a.embedding_dim = count(n["embedding_dim"], join(p, "embedding_dim"));
    if (n["aggregator"]) {
        const auto path = join(p, "aggregator");
        try {
            a.aggregator = parse_aggregator_kind(scalar<std::string>(n["aggregator"], path, "a string"));
        } catch (const ConfigError& e) {
            if (e.key() == path) throw;
            throw ConfigError("must be mean-pool or recurrent-attention", path);
        }
    }
}

void read_train(const YAML::Node& n, TrainConfig& t, const std::string& p) {
    check_keys(n, {"epochs", "batch_size", "learning_rate", "beta1", "beta2", "epsilon", "embedding_distance"}, p);
    if (n["epochs"]) t.epochs = count(n["epochs"], join(p, "epochs"));
    if (n["batch_size"]) t.batch_size = count(n["batch_size"], join(p, "batch_size"));
    if (n["learning_rate"]) t.optimizer.learning_rate = real(n["learning_rate"], join(p, "learning_rate"));
    if (n["beta1"]) t.optimizer.beta1 = real(n["beta1"], join(p, "beta1"));
    if (n["beta2"]) t.optimizer.beta2 = real(n["beta2"], join(p, "beta2"));
    if (n["epsilon"]) t.optimizer.epsilon = real(n["epsilon"], join(p, "epsilon"));
    if (n["embedding_distance"]) {
        const auto path = join(p, "embedding_distance");
        const auto v = scalar<std::string>(n["embedding_distance"], path, "a string");
        if (v == "mse")
            t.distance = EmbeddingDistance::Mse;
        else if (v == "cosine")
            t.distance = EmbeddingDistance::Cosine;
        else
            throw ConfigError("must be mse or cosine", path);
    }
}


// ---- result formatting -------------------------------------------------------

std::string fixed4(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.emplace_back(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

double parse_real(const std::string& s) {
    if (s == "nan") return kNaN;
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing characters in '" + s + "'");
    return v;
}

}  // namespace

RunSpec::RunSpec() {
    strategies = {Strategy::parse("no-distill"), Strategy::parse("nonseq-embed"), Strategy::parse("seq-encoder"),
                  Strategy::parse("seq-aggregator"), Strategy::parse("soft-label"), Strategy::parse("multitask")};
    for (int i = 0; i <= 9; ++i) alphas.push_back(i / 10.0);
}

void RunSpec::validate() const {
    dataset.validate();
    if (strategies.empty()) throw ConfigError("must be non-empty", "strategies");
    if (alphas.empty()) throw ConfigError("must be non-empty", "alpha");
    for (double a : alphas)
        if (!(a >= 0.0 && a <= 1.0)) throw ConfigError("values must lie in [0, 1]", "alpha");
    if (seeds.empty()) throw ConfigError("must be non-empty", "seeds");
    if (workers == 0) throw ConfigError("must be positive", "workers");
    try {
        train.validate();
    } catch (const ConfigError& e) {
        throw ConfigError("must be positive / in range", "train." + e.key());
    }
    try {
        teacher_train.validate();
    } catch (const ConfigError& e) {
        throw ConfigError("must be positive / in range", "teacher_train." + e.key());
    }
    for (const auto* arch : {&teacher, &student}) {
        const std::string p = arch == &teacher ? "teacher" : "student";
        if (arch->hidden_dims.empty()) throw ConfigError("must be non-empty", p + ".hidden_dims");
        for (auto h : arch->hidden_dims)
            if (h == 0) throw ConfigError("must be positive", p + ".hidden_dims");
        if (arch->embedding_dim == 0) throw ConfigError("must be positive", p + ".embedding_dim");
    }
    if (teacher.embedding_dim != student.embedding_dim)
        throw ConfigError("teacher and student embedding dims must match", "student.embedding_dim");
}

RunSpec parse_run_spec_text(std::string_view text) {
    YAML::Node root;
    try {
        root = YAML::Load(std::string(text));
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("unparsable run spec: ") + e.what(), "<root>");
    }
    RunSpec spec;
    if (root.IsNull()) {
        spec.validate();
        return spec;
    }
    check_keys(root,
               {"dataset", "teacher", "student", "strategies", "alpha", "seeds", "train", "teacher_train", "workers"},
               "");
    if (root["dataset"]) read_dataset_spec(root["dataset"], spec.dataset, "dataset");
    if (root["teacher"]) read_architecture(root["teacher"], spec.teacher, "teacher");
    if (root["student"]) read_architecture(root["student"], spec.student, "student");
    if (root["strategies"])
        spec.strategies = sequence(root["strategies"], "strategies", [](const YAML::Node& x, const std::string& p) {
            try {
                return Strategy::parse(scalar<std::string>(x, p, "a strategy name"));
            } catch (const ConfigError& e) {
                if (e.key() == p) throw;
                throw ConfigError("unknown strategy '" + x.Scalar() + "'", p);
            }
        });
    if (root["alpha"]) {
        spec.alphas = sequence(root["alpha"], "alpha", [](const YAML::Node& x, const std::string& p) { return real(x, p); });
        for (double a : spec.alphas)
            if (!(a >= 0.0 && a <= 1.0)) throw ConfigError("values must lie in [0, 1], got " + std::to_string(a), "alpha");
    }
    if (root["seeds"])
        spec.seeds = sequence(root["seeds"], "seeds", [](const YAML::Node& x, const std::string& p) {
            return static_cast<std::uint64_t>(count(x, p));
        });
    if (root["train"]) read_train(root["train"], spec.train, "train");
    if (root["teacher_train"]) read_train(root["teacher_train"], spec.teacher_train, "teacher_train");
    if (root["workers"]) spec.workers = count(root["workers"], "workers");
    spec.validate();
    return spec;
}

RunSpec parse_run_spec(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    return parse_run_spec_text(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

std::string serialize_run_spec(const RunSpec& spec) {
    YAML::Emitter out;
    out.SetDoublePrecision(17);
    auto arch = [&](const char* key, const Architecture& a) {
        out << YAML::Key << key << YAML::Value << YAML::BeginMap;
        out << YAML::Key << "hidden_dims" << YAML::Value << YAML::Flow << a.hidden_dims;
        out << YAML::Key << "embedding_dim" << YAML::Value << a.embedding_dim;
        out << YAML::Key << "aggregator" << YAML::Value << std::string(aggregator_kind_name(a.aggregator));
        out << YAML::EndMap;
    };
    auto train = [&](const char* key, const TrainConfig& t) {
        out << YAML::Key << key << YAML::Value << YAML::BeginMap;
        out << YAML::Key << "epochs" << YAML::Value << t.epochs;
        out << YAML::Key << "batch_size" << YAML::Value << t.batch_size;
        out << YAML::Key << "learning_rate" << YAML::Value << t.optimizer.learning_rate;
        out << YAML::Key << "beta1" << YAML::Value << t.optimizer.beta1;
        out << YAML::Key << "beta2" << YAML::Value << t.optimizer.beta2;
        out << YAML::Key << "epsilon" << YAML::Value << t.optimizer.epsilon;
        out << YAML::Key << "embedding_distance" << YAML::Value
            << (t.distance == EmbeddingDistance::Mse ? "mse" : "cosine");
        out << YAML::EndMap;
    };
    const DatasetSpec& d = spec.dataset;
    out << YAML::BeginMap;
    out << YAML::Key << "dataset" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "num_classes" << YAML::Value << d.num_classes;
    out << YAML::Key << "samples_per_class" << YAML::Value << d.samples_per_class;
    out << YAML::Key << "primary_dim" << YAML::Value << d.primary_dim;
    out << YAML::Key << "privileged_dim" << YAML::Value << d.privileged_dim;
    out << YAML::Key << "segments" << YAML::Value << d.segments;
    out << YAML::Key << "frames_per_segment" << YAML::Value << d.frames_per_segment;
    out << YAML::Key << "noise_sigma" << YAML::Value << d.noise_sigma;
    out << YAML::Key << "informativeness" << YAML::Value << d.informativeness;
    out << YAML::Key << "seed" << YAML::Value << d.seed;
    out << YAML::Key << "latent_dim" << YAML::Value << d.latent_dim;
    out << YAML::Key << "latent_spread" << YAML::Value << d.latent_spread;
    out << YAML::Key << "privileged_noise_scale" << YAML::Value << d.privileged_noise_scale;
    out << YAML::EndMap;
    arch("teacher", spec.teacher);
    arch("student", spec.student);
    std::vector<std::string> names;
    for (const auto& s : spec.strategies) names.push_back(s.name());
    out << YAML::Key << "strategies" << YAML::Value << YAML::Flow << names;
    out << YAML::Key << "alpha" << YAML::Value << YAML::Flow << spec.alphas;
    out << YAML::Key << "seeds" << YAML::Value << YAML::Flow << spec.seeds;
    train("train", spec.train);
    train("teacher_train", spec.teacher_train);
    out << YAML::Key << "workers" << YAML::Value << spec.workers;
    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

const std::vector<std::string>& run_record_columns() {
    static const std::vector<std::string> columns{"strategy",    "alpha",       "seed",          "acc_teacher",
                                                  "acc_student", "uar_student", "eer_student",   "delta_acc_pct",
                                                  "delta_eer_pct", "wall_time_seconds"};
    return columns;
}

std::vector<ScoredPair> verification_pairs(std::span<const Tensor> embeddings, std::span<const std::size_t> labels,
                                           std::uint64_t seed) {
    if (embeddings.size() != labels.size()) throw ContractError("verification_pairs: length mismatch");
    std::vector<std::pair<std::size_t, std::size_t>> same, diff;
    for (std::size_t i = 0; i < labels.size(); ++i)
        for (std::size_t j = i + 1; j < labels.size(); ++j) (labels[i] == labels[j] ? same : diff).emplace_back(i, j);
    std::mt19937_64 rng(seed);
    std::shuffle(diff.begin(), diff.end(), rng);
    diff.resize(std::min(diff.size(), same.size()));

    std::vector<ScoredPair> out;
    for (const auto& [i, j] : same) out.push_back({cosine_score(embeddings[i], embeddings[j]), true});
    for (const auto& [i, j] : diff) out.push_back({cosine_score(embeddings[i], embeddings[j]), false});
    return out;
}

namespace {

struct CellResult {
    double acc = 0.0, uar = kNaN, eer = kNaN, seconds = 0.0;
    std::vector<EpochRecord> history;
};

CellResult evaluate_student(const Dataset& data, const FrozenTeacher* teacher, Strategy strategy, double alpha,
                            const RunSpec& spec, std::uint64_t seed) {
    const auto start = std::chrono::steady_clock::now();
    const StudentRun run = train_student(data, teacher, strategy, alpha, spec.train, spec.student, seed);
    std::vector<std::size_t> labels;
    for (const auto& s : data.test) labels.push_back(s.label);
    const auto preds = student_predictions(run.params, data.test, strategy.setting);

    CellResult r;
    r.history = run.history;
    r.acc = accuracy(preds, labels);
    try {
        r.uar = unweighted_accuracy(preds, labels, data.spec.num_classes);
    } catch (const ContractError&) {
        r.uar = kNaN;
    }
    const auto embeddings = student_embeddings(run.params, data.test, strategy.setting);
    try {
        r.eer = compute_eer(verification_pairs(embeddings, labels, seed ^ 0xe3e3ULL));
    } catch (const ContractError&) {
        r.eer = kNaN;
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

/// Runs jobs[0..n) on up to `workers` threads; the first failure (by job index) is rethrown.
void run_parallel(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& job,
                  const std::function<std::string(std::size_t)>& describe) {
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                job(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t threads = std::max<std::size_t>(1, std::min(workers, n));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!errors[i]) continue;
        try {
            std::rethrow_exception(errors[i]);
        } catch (const ConfigError& e) {
            throw ConfigError(describe(i) + ": " + e.what(), e.key());
        } catch (const std::exception& e) {
            throw std::runtime_error(describe(i) + ": " + e.what());
        }
    }
}

}  // namespace

std::vector<RunRecord> run_matrix(const RunSpec& spec, const MatrixOptions& options) {
    spec.validate();
    return run_matrix(spec, generate(spec.dataset), options);
}

std::vector<RunRecord> run_matrix(const RunSpec& spec, const Dataset& data, const MatrixOptions& options) {
    spec.validate();
    if (data.train.empty() || data.test.empty()) throw ContractError("dataset needs non-empty train and test splits");
    auto note = [&](const std::string& msg) {
        if (options.progress) options.progress(msg);
    };

    // Teachers: one per (setting, seed), shared by every strategy and alpha.
    std::vector<std::pair<Setting, std::uint64_t>> teacher_keys;
    for (const auto& s : spec.strategies)
        for (auto seed : spec.seeds)
            if (std::find(teacher_keys.begin(), teacher_keys.end(), std::pair{s.setting, seed}) == teacher_keys.end())
                teacher_keys.emplace_back(s.setting, seed);
    std::vector<std::optional<FrozenTeacher>> teachers(teacher_keys.size());
    std::vector<double> teacher_acc(teacher_keys.size());
    run_parallel(
        teacher_keys.size(), options.workers,
        [&](std::size_t i) {
            const auto [setting, seed] = teacher_keys[i];
            teachers[i].emplace(train_teacher(data.train, teacher_model_config(data.spec, spec.teacher, setting), setting,
                                              spec.teacher_train, seed));
            teacher_acc[i] = teacher_accuracy(*teachers[i], data.test);
            note("teacher " + std::string(setting == Setting::Sequential ? "sequential" : "non-sequential") +
                 " seed=" + std::to_string(seed) + " acc=" + fixed4(teacher_acc[i]));
        },
        [&](std::size_t i) { return "teacher seed=" + std::to_string(teacher_keys[i].second); });
    auto teacher_index = [&](Setting setting, std::uint64_t seed) {
        return static_cast<std::size_t>(
            std::find(teacher_keys.begin(), teacher_keys.end(), std::pair{setting, seed}) - teacher_keys.begin());
    };

    // Jobs: one no-distill baseline per (setting, seed), then every matrix cell.
    struct Job {
        Strategy strategy;
        double alpha;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (const auto& [setting, seed] : teacher_keys) jobs.push_back({Strategy{StrategyKind::NoDistill, setting}, 0.0, seed});
    const std::size_t baseline_count = jobs.size();
    for (const auto& s : spec.strategies)
        for (double a : spec.alphas)
            for (auto seed : spec.seeds) jobs.push_back({s, a, seed});

    std::vector<CellResult> results(jobs.size());
    run_parallel(
        jobs.size(), options.workers,
        [&](std::size_t i) {
            const Job& j = jobs[i];
            if (i >= baseline_count && j.strategy.kind == StrategyKind::NoDistill) return;  // copied from baseline
            const auto& teacher = teachers[teacher_index(j.strategy.setting, j.seed)];
            results[i] = evaluate_student(data, &*teacher, j.strategy, j.alpha, spec, j.seed);
            if (i >= baseline_count)
                note(j.strategy.name() + " alpha=" + fixed4(j.alpha) + " seed=" + std::to_string(j.seed) +
                     " acc=" + fixed4(results[i].acc));
        },
        [&](std::size_t i) {
            return "cell strategy=" + jobs[i].strategy.name() + " alpha=" + fixed4(jobs[i].alpha) +
                   " seed=" + std::to_string(jobs[i].seed);
        });

    std::vector<RunRecord> records;
    for (std::size_t i = baseline_count; i < jobs.size(); ++i) {
        const Job& j = jobs[i];
        const std::size_t ti = teacher_index(j.strategy.setting, j.seed);
        const CellResult& base = results[ti];
        const CellResult& r = j.strategy.kind == StrategyKind::NoDistill ? base : results[i];
        RunRecord rec;
        rec.strategy = j.strategy.name();
        rec.alpha = j.alpha;
        rec.seed = j.seed;
        rec.acc_teacher = teacher_acc[ti];
        rec.acc_student = r.acc;
        rec.uar_student = r.uar;
        rec.eer_student = r.eer;
        rec.delta_acc_pct = base.acc > 0.0 ? relative_delta(base.acc, r.acc, true) : kNaN;
        rec.delta_eer_pct = base.eer > 0.0 ? relative_delta(base.eer, r.eer, false) : kNaN;
        rec.wall_time_seconds = r.seconds;
        if (!options.history_dir.empty())
            write_history_csv(r.history, options.history_dir / (rec.strategy + "_alpha" + fixed4(rec.alpha) + "_seed" +
                                                                std::to_string(rec.seed) + ".csv"));
        records.push_back(std::move(rec));
    }
    std::stable_sort(records.begin(), records.end(), [](const RunRecord& a, const RunRecord& b) {
        return std::tie(a.strategy, a.alpha, a.seed) < std::tie(b.strategy, b.alpha, b.seed);
    });
    return records;
}

ResultFormat parse_result_format(std::string_view name) {
    if (name == "csv") return ResultFormat::Csv;
    if (name == "json-lines") return ResultFormat::JsonLines;
    throw ConfigError("must be csv or json-lines", "format");
}

std::string format_results(std::span<const RunRecord> records, ResultFormat format) {
    if (records.empty()) throw ContractError("no records to emit");
    std::ostringstream out;
    const auto& cols = run_record_columns();
    if (format == ResultFormat::Csv) {
        for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
        out << "\n";
        for (const auto& r : records)
            out << r.strategy << ',' << fixed4(r.alpha) << ',' << r.seed << ',' << fixed4(r.acc_teacher) << ','
                << fixed4(r.acc_student) << ',' << fixed4(r.uar_student) << ',' << fixed4(r.eer_student) << ','
                << fixed4(r.delta_acc_pct) << ',' << fixed4(r.delta_eer_pct) << ',' << fixed4(r.wall_time_seconds)
                << "\n";
        return out.str();
    }
    auto num = [](double v) { return std::isnan(v) ? std::string("null") : fixed4(v); };
    for (const auto& r : records) {
        const std::string values[] = {"\"" + r.strategy + "\"", num(r.alpha), std::to_string(r.seed),
                                      num(r.acc_teacher), num(r.acc_student), num(r.uar_student),
                                      num(r.eer_student), num(r.delta_acc_pct), num(r.delta_eer_pct),
                                      num(r.wall_time_seconds)};
        out << "{";
        for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << '"' << cols[i] << "\":" << values[i];
        out << "}\n";
    }
    return out.str();
}

void emit_results(std::span<const RunRecord> records, const std::filesystem::path& path, ResultFormat format) {
    const std::string text = format_results(records, format);
    write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::vector<RunRecord> parse_results_csv(std::string_view text) {
    std::vector<RunRecord> out;
    std::size_t pos = 0, line_no = 0;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        const std::size_t line_start = pos;
        pos = end + 1;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (line_no == 1) {
            if (fields != run_record_columns()) throw FormatError("unexpected results header", 0);
            continue;
        }
        if (fields.size() != run_record_columns().size())
            throw FormatError("line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(run_record_columns().size()) + " fields",
                              line_start);
        try {
            RunRecord r;
            r.strategy = fields[0];
            r.alpha = parse_real(fields[1]);
            r.seed = std::stoull(fields[2]);
            r.acc_teacher = parse_real(fields[3]);
            r.acc_student = parse_real(fields[4]);
            r.uar_student = parse_real(fields[5]);
            r.eer_student = parse_real(fields[6]);
            r.delta_acc_pct = parse_real(fields[7]);
            r.delta_eer_pct = parse_real(fields[8]);
            r.wall_time_seconds = parse_real(fields[9]);
            out.push_back(std::move(r));
        } catch (const std::logic_error& e) {
            throw FormatError("line " + std::to_string(line_no) + ": malformed field (" + e.what() + ")", line_start);
        }
    }
    if (line_no == 0) throw FormatError("empty results file", 0);
    return out;
}

std::vector<RunRecord> read_results_csv(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    return parse_results_csv(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

MeanStd mean_std(std::span<const double> values) {
    if (values.empty()) throw ContractError("mean of an empty set");
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    if (values.size() == 1) return {mean, 0.0};
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / static_cast<double>(values.size() - 1))};
}

SweepSummary summarize_sweep(std::span<const RunRecord> records) {
    if (records.empty()) throw ContractError("nothing to summarize");
    std::map<std::pair<std::string, double>, std::vector<const RunRecord*>> cells;
    for (const auto& r : records) cells[{r.strategy, r.alpha}].push_back(&r);

    std::optional<std::set<std::uint64_t>> seed_set;
    for (const auto& [key, rs] : cells) {
        std::set<std::uint64_t> seeds;
        for (const auto* r : rs)
            if (!seeds.insert(r->seed).second)
                throw ContractError("duplicate seed " + std::to_string(r->seed) + " in cell " + key.first);
        if (!seed_set)
            seed_set = seeds;
        else if (*seed_set != seeds)
            throw ContractError("ragged seed coverage at strategy=" + key.first + " alpha=" + fixed4(key.second));
    }

    SweepSummary summary;
    for (const auto& [key, rs] : cells) {
        auto column = [&](double RunRecord::*field) {
            std::vector<double> v;
            for (const auto* r : rs) v.push_back(r->*field);
            return mean_std(v);
        };
        SweepCell c;
        c.strategy = key.first;
        c.alpha = key.second;
        c.seeds = rs.size();
        c.acc_student = column(&RunRecord::acc_student);
        c.uar_student = column(&RunRecord::uar_student);
        c.eer_student = column(&RunRecord::eer_student);
        c.delta_acc_pct = column(&RunRecord::delta_acc_pct);
        summary.cells.push_back(c);
    }
    std::map<std::string, std::size_t> best;
    for (std::size_t i = 0; i < summary.cells.size(); ++i) {
        const auto& c = summary.cells[i];
        auto it = best.find(c.strategy);
        // cells are in ascending alpha per strategy, so strict > keeps the lowest alpha on ties
        if (it == best.end() || c.acc_student.mean > summary.cells[it->second].acc_student.mean) best[c.strategy] = i;
    }
    for (const auto& [strategy, i] : best) {
        summary.cells[i].best_alpha = true;
        summary.best_alpha[strategy] = summary.cells[i].alpha;
    }
    return summary;
}

std::string format_summary(const SweepSummary& summary) {
    std::ostringstream out;
    out << "strategy,alpha,seeds,acc_student_mean,acc_student_std,uar_student_mean,uar_student_std,"
           "eer_student_mean,eer_student_std,delta_acc_pct_mean,delta_acc_pct_std,best_alpha\n";
    for (const auto& c : summary.cells)
        out << c.strategy << ',' << fixed4(c.alpha) << ',' << c.seeds << ',' << fixed4(c.acc_student.mean) << ','
            << fixed4(c.acc_student.stddev) << ',' << fixed4(c.uar_student.mean) << ',' << fixed4(c.uar_student.stddev)
            << ',' << fixed4(c.eer_student.mean) << ',' << fixed4(c.eer_student.stddev) << ','
            << fixed4(c.delta_acc_pct.mean) << ',' << fixed4(c.delta_acc_pct.stddev) << ',' << (c.best_alpha ? 1 : 0)
            << "\n";
    return out.str();
}

std::size_t resolve_workers(std::optional<std::size_t> flag, std::size_t spec_value) {
    if (flag) {
        if (*flag == 0) throw ConfigError("must be positive", "workers");
        return *flag;
    }
    if (const char* env = std::getenv("LUPI_WORKERS"); env && *env) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (*end != '\0' || v == 0) throw ConfigError("LUPI_WORKERS must be a positive integer", "workers");
        return static_cast<std::size_t>(v);
    }
    return spec_value;
}

}  // namespace lupi
