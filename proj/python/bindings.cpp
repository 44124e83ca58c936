#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "lupi/distill.hpp"
#include "lupi/errors.hpp"
#include "lupi/harness.hpp"
#include "lupi/metrics.hpp"
#include "lupi/synthdata.hpp"

namespace py = pybind11;
using namespace lupi;

namespace {

py::array_t<double> to_numpy(const Tensor& t) {
    std::vector<py::ssize_t> shape(t.shape().begin(), t.shape().end());
    py::array_t<double> out(shape);
    std::copy(t.data().begin(), t.data().end(), out.mutable_data());
    return out;
}

Tensor from_numpy(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    Shape shape(a.shape(), a.shape() + a.ndim());
    return Tensor(std::move(shape), std::vector<double>(a.data(), a.data() + a.size()));
}

py::list to_numpy_list(const std::vector<Tensor>& ts) {
    py::list out;
    for (const auto& t : ts) out.append(to_numpy(t));
    return out;
}

py::dict record_dict(const RunRecord& r) {
    py::dict d;
    d["strategy"] = r.strategy;
    d["alpha"] = r.alpha;
    d["seed"] = r.seed;
    d["acc_teacher"] = r.acc_teacher;
    d["acc_student"] = r.acc_student;
    d["uar_student"] = r.uar_student;
    d["eer_student"] = r.eer_student;
    d["delta_acc_pct"] = r.delta_acc_pct;
    d["delta_eer_pct"] = r.delta_eer_pct;
    d["wall_time_seconds"] = r.wall_time_seconds;
    return d;
}

RunRecord record_from(const py::dict& d) {
    RunRecord r;
    r.strategy = d["strategy"].cast<std::string>();
    r.alpha = d["alpha"].cast<double>();
    r.seed = d["seed"].cast<std::uint64_t>();
    r.acc_teacher = d["acc_teacher"].cast<double>();
    r.acc_student = d["acc_student"].cast<double>();
    r.uar_student = d["uar_student"].cast<double>();
    r.eer_student = d["eer_student"].cast<double>();
    r.delta_acc_pct = d["delta_acc_pct"].cast<double>();
    r.delta_eer_pct = d["delta_eer_pct"].cast<double>();
    r.wall_time_seconds = d.contains("wall_time_seconds") ? d["wall_time_seconds"].cast<double>() : 0.0;
    return r;
}

std::vector<RunRecord> records_from(const py::list& rows) {
    std::vector<RunRecord> out;
    for (const auto& row : rows) out.push_back(record_from(row.cast<py::dict>()));
    return out;
}

Setting setting_of(bool sequential) { return sequential ? Setting::Sequential : Setting::NonSequential; }

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Teacher-student distillation with privileged information";

    auto config_error = py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
    py::register_exception<ContractError>(m, "ContractError", PyExc_RuntimeError);
    py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
    (void)config_error;

    py::class_<DatasetSpec>(m, "DatasetSpec")
        .def(py::init<>())
        .def_readwrite("num_classes", &DatasetSpec::num_classes)
        .def_readwrite("samples_per_class", &DatasetSpec::samples_per_class)
        .def_readwrite("primary_dim", &DatasetSpec::primary_dim)
        .def_readwrite("privileged_dim", &DatasetSpec::privileged_dim)
        .def_readwrite("segments", &DatasetSpec::segments)
        .def_readwrite("frames_per_segment", &DatasetSpec::frames_per_segment)
        .def_readwrite("noise_sigma", &DatasetSpec::noise_sigma)
        .def_readwrite("informativeness", &DatasetSpec::informativeness)
        .def_readwrite("seed", &DatasetSpec::seed)
        .def_readwrite("latent_dim", &DatasetSpec::latent_dim)
        .def_readwrite("latent_spread", &DatasetSpec::latent_spread)
        .def_readwrite("privileged_noise_scale", &DatasetSpec::privileged_noise_scale)
        .def("validate", &DatasetSpec::validate)
        .def(py::self == py::self);

    py::class_<PairedSample>(m, "PairedSample")
        .def_readonly("id", &PairedSample::id)
        .def_readonly("label", &PairedSample::label)
        .def_property_readonly("primary_segments", [](const PairedSample& s) { return to_numpy_list(s.primary_segments); })
        .def_property_readonly("privileged_frames",
                               [](const PairedSample& s) { return to_numpy_list(s.privileged_frames); });

    py::class_<Dataset>(m, "Dataset")
        .def_readonly("spec", &Dataset::spec)
        .def_readonly("train", &Dataset::train)
        .def_readonly("validation", &Dataset::validation)
        .def_readonly("test", &Dataset::test)
        .def("__len__", &Dataset::size)
        .def(py::self == py::self);

    m.def("generate", &generate, py::arg("spec"), "Deterministic paired dataset with a 70/10/20 split.");
    m.def("write_dataset", &write_dataset, py::arg("dataset"), py::arg("path"));
    m.def("read_dataset", &read_dataset, py::arg("path"));

    py::class_<Architecture>(m, "Architecture")
        .def(py::init<>())
        .def_readwrite("hidden_dims", &Architecture::hidden_dims)
        .def_readwrite("embedding_dim", &Architecture::embedding_dim)
        .def_property(
            "aggregator",
            [](const Architecture& a) { return std::string(aggregator_kind_name(a.aggregator)); },
            [](Architecture& a, const std::string& name) { a.aggregator = parse_aggregator_kind(name); });

    py::class_<TrainConfig>(m, "TrainConfig")
        .def(py::init<>())
        .def_readwrite("epochs", &TrainConfig::epochs)
        .def_readwrite("batch_size", &TrainConfig::batch_size)
        .def_property(
            "learning_rate", [](const TrainConfig& t) { return t.optimizer.learning_rate; },
            [](TrainConfig& t, double v) { t.optimizer.learning_rate = v; })
        .def_property(
            "embedding_distance",
            [](const TrainConfig& t) { return t.distance == EmbeddingDistance::Cosine ? "cosine" : "mse"; },
            [](TrainConfig& t, const std::string& v) {
                if (v == "mse")
                    t.distance = EmbeddingDistance::Mse;
                else if (v == "cosine")
                    t.distance = EmbeddingDistance::Cosine;
                else
                    throw ConfigError("must be mse or cosine", "embedding_distance");
            });

    py::class_<FrozenTeacher>(m, "FrozenTeacher")
        .def_property_readonly("sequential", [](const FrozenTeacher& t) { return t.setting() == Setting::Sequential; })
        .def("predict", &FrozenTeacher::predict, py::arg("sample"))
        .def("accuracy", [](const FrozenTeacher& t, const std::vector<PairedSample>& s) { return teacher_accuracy(t, s); })
        .def("checkpoint", [](const FrozenTeacher& t) {
            const auto bytes = encode_checkpoint(t.params());
            return py::bytes(reinterpret_cast<const char*>(bytes.data()), bytes.size());
        });

    m.def(
        "train_teacher",
        [](const Dataset& data, const Architecture& arch, bool sequential, const TrainConfig& cfg, std::uint64_t seed) {
            py::gil_scoped_release release;
            const Setting s = setting_of(sequential);
            return train_teacher(data.train, teacher_model_config(data.spec, arch, s), s, cfg, seed);
        },
        py::arg("data"), py::arg("arch") = Architecture{}, py::arg("sequential") = false,
        py::arg("config") = TrainConfig{}, py::arg("seed") = 1);

    m.def(
        "train_student",
        [](const Dataset& data, const FrozenTeacher* teacher, const std::string& strategy, double alpha,
           const TrainConfig& cfg, const Architecture& arch, std::uint64_t seed) {
            const Strategy st = Strategy::parse(strategy);
            StudentRun run;
            {
                py::gil_scoped_release release;
                run = train_student(data, teacher, st, alpha, cfg, arch, seed);
            }
            std::vector<std::size_t> labels;
            for (const auto& s : data.test) labels.push_back(s.label);
            py::list history;
            for (const auto& h : run.history) {
                py::dict d;
                d["epoch"] = h.epoch;
                d["mean_loss_y"] = h.mean_loss_y;
                d["mean_loss_pi"] = h.mean_loss_pi;
                d["train_acc"] = h.train_acc;
                d["val_acc"] = h.val_acc;
                history.append(d);
            }
            py::dict out;
            out["history"] = history;
            out["test_accuracy"] = accuracy(student_predictions(run.params, data.test, st.setting), labels);
            return out;
        },
        py::arg("data"), py::arg("teacher"), py::arg("strategy"), py::arg("alpha"), py::arg("config") = TrainConfig{},
        py::arg("arch") = Architecture{}, py::arg("seed") = 1,
        "Train one student and return its history and test accuracy. `teacher` may be None for no-distill "
        "and multitask.");

    m.def("accuracy", [](const std::vector<std::size_t>& p, const std::vector<std::size_t>& y) { return accuracy(p, y); },
          py::arg("predictions"), py::arg("labels"));
    m.def(
        "unweighted_accuracy",
        [](const std::vector<std::size_t>& p, const std::vector<std::size_t>& y, std::size_t c) {
            return unweighted_accuracy(p, y, c);
        },
        py::arg("predictions"), py::arg("labels"), py::arg("num_classes"));
    m.def(
        "cosine_score",
        [](const py::array_t<double>& a, const py::array_t<double>& b) { return cosine_score(from_numpy(a), from_numpy(b)); },
        py::arg("a"), py::arg("b"));
    m.def(
        "compute_eer",
        [](const std::vector<double>& scores, const std::vector<bool>& same_class, bool higher_accepts) {
            if (scores.size() != same_class.size()) throw ContractError("scores and same_class differ in length");
            std::vector<ScoredPair> pairs;
            for (std::size_t i = 0; i < scores.size(); ++i) pairs.push_back({scores[i], same_class[i]});
            return compute_eer(pairs, higher_accepts ? AcceptDirection::HigherAccepts : AcceptDirection::LowerAccepts);
        },
        py::arg("scores"), py::arg("same_class"), py::arg("higher_accepts") = true);
    m.def("relative_delta", &relative_delta, py::arg("before"), py::arg("after"), py::arg("higher_is_better"));
    m.def("round_percent", &round_percent, py::arg("value"));

    m.def(
        "validate_run_spec", [](const std::string& text) { return serialize_run_spec(parse_run_spec_text(text)); },
        py::arg("text"), "Parse and validate a run spec; returns its canonical YAML.");
    m.def(
        "run_matrix",
        [](const std::string& spec_text, std::size_t workers) {
            const RunSpec spec = parse_run_spec_text(spec_text);
            MatrixOptions options;
            options.workers = workers == 0 ? spec.workers : workers;
            std::vector<RunRecord> records;
            {
                py::gil_scoped_release release;
                records = run_matrix(spec, options);
            }
            py::list out;
            for (const auto& r : records) out.append(record_dict(r));
            return out;
        },
        py::arg("spec_text") = "", py::arg("workers") = 0, "Run every cell of a YAML run spec; returns a list of dicts.");
    m.def(
        "format_results",
        [](const py::list& rows, const std::string& format) {
            return format_results(records_from(rows), parse_result_format(format));
        },
        py::arg("records"), py::arg("format") = "csv");
    m.def(
        "parse_results_csv",
        [](const std::string& text) {
            py::list out;
            for (const auto& r : parse_results_csv(text)) out.append(record_dict(r));
            return out;
        },
        py::arg("text"));
    m.def(
        "summarize",
        [](const py::list& rows) {
            const auto summary = summarize_sweep(records_from(rows));
            py::list cells;
            for (const auto& c : summary.cells) {
                py::dict d;
                d["strategy"] = c.strategy;
                d["alpha"] = c.alpha;
                d["seeds"] = c.seeds;
                d["acc_mean"] = c.acc_student.mean;
                d["acc_std"] = c.acc_student.stddev;
                d["eer_mean"] = c.eer_student.mean;
                d["eer_std"] = c.eer_student.stddev;
                d["best_alpha"] = c.best_alpha;
                cells.append(d);
            }
            return py::make_tuple(cells, summary.best_alpha);
        },
        py::arg("records"), "Per-(strategy, alpha) mean/stddev over seeds and the best alpha per strategy.");
}
