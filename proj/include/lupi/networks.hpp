#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "lupi/autodiff.hpp"
#include "lupi/tensor.hpp"

namespace lupi {

/// Parameter groups; gradient routing during distillation works per group.
enum class Group : std::uint8_t { Encoder = 0, Aggregator = 1, Head = 2, Decoder = 3 };

std::string_view group_name(Group g);
Group parse_group(std::string_view name);

enum class Activation { Relu };
enum class AggregatorKind { MeanPool, RecurrentAttention };

std::string_view aggregator_kind_name(AggregatorKind k);
AggregatorKind parse_aggregator_kind(std::string_view name);

struct EncoderConfig {
    std::size_t input_dim = 1;
    std::vector<std::size_t> hidden_dims{32};
    std::size_t embedding_dim = 32;
    Activation activation = Activation::Relu;

    bool operator==(const EncoderConfig&) const = default;
};

struct AggregatorConfig {
    AggregatorKind kind = AggregatorKind::MeanPool;
    std::size_t state_dim = 32;

    bool operator==(const AggregatorConfig&) const = default;
};

/// MLP from the student embedding into the privileged feature space (multitask baseline only).
struct DecoderConfig {
    std::vector<std::size_t> hidden_dims;
    std::size_t output_dim = 1;

    bool operator==(const DecoderConfig&) const = default;
};

struct ModelConfig {
    EncoderConfig encoder;
    std::optional<AggregatorConfig> aggregator;
    std::size_t num_classes = 2;
    std::optional<DecoderConfig> decoder;

    /// Throws ConfigError on non-positive dims, empty hidden layers, num_classes < 2, or an
    /// aggregator state size that differs from the embedding size.
    void validate() const;
    /// Stable text form, hashed into checkpoint headers.
    std::string canonical() const;

    bool operator==(const ModelConfig&) const = default;
};

void to_json(nlohmann::json& j, const ModelConfig& c);
void from_json(const nlohmann::json& j, ModelConfig& c);

struct NamedTensor {
    std::string name;
    Tensor value;

    bool operator==(const NamedTensor&) const = default;
};

/// Tensors keyed by group, in a fixed per-group order. Used for parameters and for gradients.
using ParamSet = std::map<Group, std::vector<NamedTensor>>;

struct ModelParams {
    ModelConfig config;
    ParamSet groups;

    bool has_group(Group g) const { return groups.contains(g); }
    const Tensor& get(Group g, std::string_view name) const;
    Tensor& get(Group g, std::string_view name);
    std::size_t parameter_count() const;

    bool operator==(const ModelParams&) const = default;
};

/// Same layout as `like`, every tensor zero.
ParamSet zeros_like(const ParamSet& like);

/// Glorot-uniform weights, zero biases. Each group draws from its own stream derived from
/// `seed`, so adding a decoder leaves the other groups' values unchanged.
ModelParams init_params(const ModelConfig& config, std::uint64_t seed);

/// Model parameters recorded as leaves on a tape, with differentiable forward passes.
class BoundModel {
public:
    BoundModel(Tape& tape, const ModelParams& params);

    /// MLP with ReLU hidden layers and a linear output layer.
    Var encoder(Var x) const;
    /// Sequence of embeddings to one embedding: mean pool, or gated recurrent scan followed by
    /// attention pooling over the hidden states.
    Var aggregator(std::span<const Var> sequence) const;
    /// Affine map to class logits.
    Var head(Var embedding) const;
    Var decoder(Var embedding) const;

    /// Gradients for every parameter, shaped like the bound parameters.
    ParamSet gradients(const Gradients& grads) const;

    Tape& tape() const { return *tape_; }
    const ModelConfig& config() const { return *config_; }

private:
    Var leaf(Group g, std::string_view name) const;
    Var mlp(Group g, Var x, std::size_t layers) const;

    Tape* tape_;
    const ModelConfig* config_;
    std::map<Group, std::vector<std::pair<std::string, Var>>> leaves_;
};

Tensor encoder_forward(const ModelParams& params, const Tensor& x);
Tensor aggregator_forward(const ModelParams& params, std::span<const Tensor> sequence);
Tensor head_forward(const ModelParams& params, const Tensor& embedding);
Tensor multitask_decoder_forward(const ModelParams& params, const Tensor& embedding);

/// Versioned little-endian checkpoint: magic "LPCK", version, config digest, config, then every
/// group's tensors (name, shape, raw doubles).
void write_checkpoint(const ModelParams& params, const std::filesystem::path& path);
ModelParams read_checkpoint(const std::filesystem::path& path);
std::vector<std::uint8_t> encode_checkpoint(const ModelParams& params);
ModelParams decode_checkpoint(std::span<const std::uint8_t> bytes);

}  // namespace lupi
