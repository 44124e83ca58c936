#include "lupi/networks.hpp"

#include <array>
#include <cmath>
#include <random>

#include "lupi/binary_io.hpp"
#include "lupi/errors.hpp"

namespace lupi {

namespace {

constexpr std::array kGroupNames{"encoder", "aggregator", "head", "decoder"};

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Tensor glorot(std::size_t fan_out, std::size_t fan_in, Shape shape, std::mt19937_64& rng) {
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-bound, bound);
    Tensor t(std::move(shape));
    for (auto& v : t.data()) v = dist(rng);
    return t;
}

void add_mlp(std::vector<NamedTensor>& out, std::size_t input, const std::vector<std::size_t>& hidden,
             std::size_t output, std::mt19937_64& rng) {
    std::size_t prev = input;
    std::vector<std::size_t> widths = hidden;
    widths.push_back(output);
    for (std::size_t i = 0; i < widths.size(); ++i) {
        out.push_back({"w" + std::to_string(i), glorot(widths[i], prev, Shape{widths[i], prev}, rng)});
        out.push_back({"b" + std::to_string(i), Tensor(Shape{widths[i]}, 0.0)});
        prev = widths[i];
    }
}

void require_positive(std::size_t v, const std::string& key) {
    if (v == 0) throw ConfigError("must be positive", key);
}

}  // namespace

std::string_view group_name(Group g) { return kGroupNames.at(static_cast<std::size_t>(g)); }

Group parse_group(std::string_view name) {
    for (std::size_t i = 0; i < kGroupNames.size(); ++i)
        if (name == kGroupNames[i]) return static_cast<Group>(i);
    throw ConfigError("unknown parameter group '" + std::string(name) + "'");
}

std::string_view aggregator_kind_name(AggregatorKind k) {
    return k == AggregatorKind::MeanPool ? "mean-pool" : "recurrent-attention";
}

AggregatorKind parse_aggregator_kind(std::string_view name) {
    if (name == "mean-pool") return AggregatorKind::MeanPool;
    if (name == "recurrent-attention") return AggregatorKind::RecurrentAttention;
    throw ConfigError("unknown aggregator kind '" + std::string(name) + "'", "kind");
}

void ModelConfig::validate() const {
    require_positive(encoder.input_dim, "encoder.input_dim");
    require_positive(encoder.embedding_dim, "encoder.embedding_dim");
    if (encoder.hidden_dims.empty()) throw ConfigError("must be non-empty", "encoder.hidden_dims");
    for (auto h : encoder.hidden_dims) require_positive(h, "encoder.hidden_dims");
    if (num_classes < 2) throw ConfigError("must be at least 2", "num_classes");
    if (aggregator) {
        require_positive(aggregator->state_dim, "aggregator.state_dim");
        if (aggregator->kind == AggregatorKind::RecurrentAttention && aggregator->state_dim != encoder.embedding_dim)
            throw ConfigError("must equal encoder.embedding_dim for recurrent-attention", "aggregator.state_dim");
    }
    if (decoder) {
        require_positive(decoder->output_dim, "decoder.output_dim");
        for (auto h : decoder->hidden_dims) require_positive(h, "decoder.hidden_dims");
    }
}

void to_json(nlohmann::json& j, const ModelConfig& c) {
    j = nlohmann::json{{"encoder",
                        {{"input_dim", c.encoder.input_dim},
                         {"hidden_dims", c.encoder.hidden_dims},
                         {"embedding_dim", c.encoder.embedding_dim},
                         {"activation", "relu"}}},
                       {"num_classes", c.num_classes}};
    j["aggregator"] = c.aggregator ? nlohmann::json{{"kind", aggregator_kind_name(c.aggregator->kind)},
                                                    {"state_dim", c.aggregator->state_dim}}
                                   : nlohmann::json(nullptr);
    j["decoder"] = c.decoder ? nlohmann::json{{"hidden_dims", c.decoder->hidden_dims},
                                              {"output_dim", c.decoder->output_dim}}
                             : nlohmann::json(nullptr);
}

void from_json(const nlohmann::json& j, ModelConfig& c) {
    const auto& e = j.at("encoder");
    c.encoder.input_dim = e.at("input_dim").get<std::size_t>();
    c.encoder.hidden_dims = e.at("hidden_dims").get<std::vector<std::size_t>>();
    c.encoder.embedding_dim = e.at("embedding_dim").get<std::size_t>();
    if (e.value("activation", std::string("relu")) != "relu") throw ConfigError("only relu is supported", "encoder.activation");
    c.num_classes = j.at("num_classes").get<std::size_t>();
    c.aggregator.reset();
    if (j.contains("aggregator") && !j["aggregator"].is_null())
        c.aggregator = AggregatorConfig{parse_aggregator_kind(j["aggregator"].at("kind").get<std::string>()),
                                        j["aggregator"].at("state_dim").get<std::size_t>()};
    c.decoder.reset();
    if (j.contains("decoder") && !j["decoder"].is_null())
        c.decoder = DecoderConfig{j["decoder"].at("hidden_dims").get<std::vector<std::size_t>>(),
                                  j["decoder"].at("output_dim").get<std::size_t>()};
}

std::string ModelConfig::canonical() const { return nlohmann::json(*this).dump(); }

const Tensor& ModelParams::get(Group g, std::string_view name) const {
    auto it = groups.find(g);
    if (it != groups.end())
        for (const auto& t : it->second)
            if (t.name == name) return t.value;
    throw ConfigError("no parameter '" + std::string(name) + "' in group " + std::string(group_name(g)));
}

Tensor& ModelParams::get(Group g, std::string_view name) {
    return const_cast<Tensor&>(std::as_const(*this).get(g, name));
}

std::size_t ModelParams::parameter_count() const {
    std::size_t n = 0;
    for (const auto& [g, tensors] : groups)
        for (const auto& t : tensors) n += t.value.size();
    return n;
}

ParamSet zeros_like(const ParamSet& like) {
    ParamSet out;
    for (const auto& [g, tensors] : like) {
        auto& dst = out[g];
        for (const auto& t : tensors) dst.push_back({t.name, Tensor(t.value.shape(), 0.0)});
    }
    return out;
}

ModelParams init_params(const ModelConfig& config, std::uint64_t seed) {
    config.validate();
    ModelParams params{config, {}};
    auto stream = [seed](Group g) { return std::mt19937_64(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(g) + 1))); };

    {
        auto rng = stream(Group::Encoder);
        add_mlp(params.groups[Group::Encoder], config.encoder.input_dim, config.encoder.hidden_dims,
                config.encoder.embedding_dim, rng);
    }
    if (config.aggregator) {
        auto& agg = params.groups[Group::Aggregator];
        if (config.aggregator->kind == AggregatorKind::RecurrentAttention) {
            auto rng = stream(Group::Aggregator);
            const std::size_t d = config.aggregator->state_dim;
            for (const char* gate : {"z", "c"}) {
                agg.push_back({std::string("w_") + gate, glorot(d, d, Shape{d, d}, rng)});
                agg.push_back({std::string("u_") + gate, glorot(d, d, Shape{d, d}, rng)});
                agg.push_back({std::string("b_") + gate, Tensor(Shape{d}, 0.0)});
            }
            agg.push_back({"attention", glorot(1, d, Shape{d}, rng)});
        }
    }
    {
        auto rng = stream(Group::Head);
        auto& head = params.groups[Group::Head];
        const std::size_t c = config.num_classes, e = config.encoder.embedding_dim;
        head.push_back({"w", glorot(c, e, Shape{c, e}, rng)});
        head.push_back({"b", Tensor(Shape{c}, 0.0)});
    }
    if (config.decoder) {
        auto rng = stream(Group::Decoder);
        add_mlp(params.groups[Group::Decoder], config.encoder.embedding_dim, config.decoder->hidden_dims,
                config.decoder->output_dim, rng);
    }
    return params;
}

BoundModel::BoundModel(Tape& tape, const ModelParams& params) : tape_(&tape), config_(&params.config) {
    for (const auto& [g, tensors] : params.groups) {
        auto& dst = leaves_[g];
        for (const auto& t : tensors) dst.emplace_back(t.name, tape.leaf(t.value));
    }
}

Var BoundModel::leaf(Group g, std::string_view name) const {
    auto it = leaves_.find(g);
    if (it == leaves_.end()) throw ConfigError("model has no " + std::string(group_name(g)) + " group");
    for (const auto& [n, v] : it->second)
        if (n == name) return v;
    throw ConfigError("no parameter '" + std::string(name) + "' in group " + std::string(group_name(g)));
}

Var BoundModel::mlp(Group g, Var x, std::size_t layers) const {
    for (std::size_t i = 0; i < layers; ++i) {
        Var w = leaf(g, "w" + std::to_string(i));
        if (x.shape().size() != 1 || x.shape()[0] != w.shape()[1])
            throw DimensionError(std::string(group_name(g)) + " layer " + std::to_string(i) + " expects input [" +
                                 std::to_string(w.shape()[1]) + "], got " + shape_string(x.shape()));
        x = add(matmul(w, x), leaf(g, "b" + std::to_string(i)));
        if (i + 1 < layers) x = relu(x);
    }
    return x;
}

Var BoundModel::encoder(Var x) const { return mlp(Group::Encoder, x, config_->encoder.hidden_dims.size() + 1); }

Var BoundModel::aggregator(std::span<const Var> sequence) const {
    if (sequence.empty()) throw ContractError("aggregator over an empty sequence");
    if (!config_->aggregator) throw ConfigError("model has no aggregator");
    const std::size_t d = config_->encoder.embedding_dim;
    for (const Var& e : sequence)
        if (e.shape() != Shape{d})
            throw DimensionError("aggregator expects embeddings of shape [" + std::to_string(d) + "], got " +
                                 shape_string(e.shape()));
    if (config_->aggregator->kind == AggregatorKind::MeanPool) return mean(stack(sequence), 0);

    const Var wz = leaf(Group::Aggregator, "w_z"), uz = leaf(Group::Aggregator, "u_z"),
              bz = leaf(Group::Aggregator, "b_z");
    const Var wc = leaf(Group::Aggregator, "w_c"), uc = leaf(Group::Aggregator, "u_c"),
              bc = leaf(Group::Aggregator, "b_c");
    Var h = tape_->constant(Tensor(Shape{d}, 0.0));
    std::vector<Var> states;
    states.reserve(sequence.size());
    for (const Var& x : sequence) {
        // h' = h + z * (c - h), with update gate z and candidate state c
        Var z = sigmoid(add(add(matmul(wz, x), matmul(uz, h)), bz));
        Var c = tanh(add(add(matmul(wc, x), matmul(uc, h)), bc));
        h = add(h, mul(z, sub(c, h)));
        states.push_back(h);
    }
    Var hidden = stack(states);
    Var weights = softmax(matmul(hidden, leaf(Group::Aggregator, "attention")));
    return matmul(weights, hidden);
}

Var BoundModel::head(Var embedding) const {
    Var w = leaf(Group::Head, "w");
    if (embedding.shape() != Shape{w.shape()[1]})
        throw DimensionError("head expects embedding [" + std::to_string(w.shape()[1]) + "], got " +
                             shape_string(embedding.shape()));
    return add(matmul(w, embedding), leaf(Group::Head, "b"));
}

Var BoundModel::decoder(Var embedding) const {
    if (!config_->decoder) throw ConfigError("model has no decoder group");
    return mlp(Group::Decoder, embedding, config_->decoder->hidden_dims.size() + 1);
}

ParamSet BoundModel::gradients(const Gradients& grads) const {
    ParamSet out;
    for (const auto& [g, leaves] : leaves_) {
        auto& dst = out[g];
        for (const auto& [name, v] : leaves) dst.push_back({name, grads[v]});
    }
    return out;
}

Tensor encoder_forward(const ModelParams& params, const Tensor& x) {
    Tape tape;
    BoundModel m(tape, params);
    return m.encoder(tape.constant(x)).value();
}

Tensor aggregator_forward(const ModelParams& params, std::span<const Tensor> sequence) {
    Tape tape;
    BoundModel m(tape, params);
    std::vector<Var> seq;
    for (const auto& t : sequence) seq.push_back(tape.constant(t));
    return m.aggregator(seq).value();
}

Tensor head_forward(const ModelParams& params, const Tensor& embedding) {
    Tape tape;
    BoundModel m(tape, params);
    return m.head(tape.constant(embedding)).value();
}

Tensor multitask_decoder_forward(const ModelParams& params, const Tensor& embedding) {
    if (!params.has_group(Group::Decoder)) throw ConfigError("model has no decoder group");
    Tape tape;
    BoundModel m(tape, params);
    return m.decoder(tape.constant(embedding)).value();
}

// Checkpoint layout (little-endian):
//   "LPCK" | u16 version | u64 fnv1a(config) | str config-json | u32 groups
//   per group: u8 group-id | u32 tensors | per tensor: str name | u32 rank | u64 dims... | f64 data...
namespace {
constexpr std::array<std::uint8_t, 4> kCheckpointMagic{'L', 'P', 'C', 'K'};
constexpr std::uint16_t kCheckpointVersion = 1;
}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const ModelParams& params) {
    ByteWriter w;
    w.raw(kCheckpointMagic);
    w.u16(kCheckpointVersion);
    const std::string config = params.config.canonical();
    w.u64(fnv1a64(config));
    w.str(config);
    w.u32(static_cast<std::uint32_t>(params.groups.size()));
    for (const auto& [g, tensors] : params.groups) {
        w.u8(static_cast<std::uint8_t>(g));
        w.u32(static_cast<std::uint32_t>(tensors.size()));
        for (const auto& t : tensors) {
            w.str(t.name);
            w.u32(static_cast<std::uint32_t>(t.value.rank()));
            for (auto d : t.value.shape()) w.u64(d);
            for (double v : t.value.data()) w.f64(v);
        }
    }
    return std::move(w.bytes());
}

ModelParams decode_checkpoint(std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes);
    auto magic = r.raw(4);
    if (!std::equal(magic.begin(), magic.end(), kCheckpointMagic.begin())) throw FormatError("bad checkpoint magic", 0);
    const auto version_at = r.offset();
    if (r.u16() != kCheckpointVersion) throw FormatError("unsupported checkpoint version", version_at);
    const std::uint64_t digest = r.u64();
    const auto config_at = r.offset();
    const std::string config_text = r.str();
    if (fnv1a64(config_text) != digest) throw FormatError("config digest mismatch", config_at);

    ModelParams params;
    try {
        params.config = nlohmann::json::parse(config_text).get<ModelConfig>();
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("unreadable config: ") + e.what(), config_at);
    }
    const auto group_count = r.u32();
    for (std::uint32_t gi = 0; gi < group_count; ++gi) {
        const auto group_at = r.offset();
        const auto gid = r.u8();
        if (gid > static_cast<std::uint8_t>(Group::Decoder)) throw FormatError("unknown group id", group_at);
        auto& tensors = params.groups[static_cast<Group>(gid)];
        const auto count = r.u32();
        for (std::uint32_t ti = 0; ti < count; ++ti) {
            NamedTensor t;
            t.name = r.str();
            const auto rank_at = r.offset();
            const auto rank = r.u32();
            if (rank > 8) throw FormatError("implausible tensor rank", rank_at);
            Shape shape(rank);
            for (auto& d : shape) d = r.u64();
            const std::size_t n = shape_size(shape);
            if (n > r.remaining() / 8) throw FormatError("tensor payload truncated", r.offset());
            std::vector<double> data(n);
            for (auto& v : data) v = r.f64();
            t.value = Tensor(std::move(shape), std::move(data));
            tensors.push_back(std::move(t));
        }
    }
    if (r.remaining() != 0) throw FormatError("trailing bytes after checkpoint", r.offset());
    return params;
}

void write_checkpoint(const ModelParams& params, const std::filesystem::path& path) {
    write_file(path, encode_checkpoint(params));
}

ModelParams read_checkpoint(const std::filesystem::path& path) { return decode_checkpoint(read_file(path)); }

}  // namespace lupi
