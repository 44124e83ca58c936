#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "lupi/tensor.hpp"

namespace lupi {

/// Paired primary/privileged classification data drawn from a shared latent class code.
struct DatasetSpec {
    std::size_t num_classes = 6;
    std::size_t samples_per_class = 60;
    std::size_t primary_dim = 24;
    std::size_t privileged_dim = 12;
    std::size_t segments = 4;            // M, primary segments per sample
    std::size_t frames_per_segment = 3;  // r, privileged frames per segment
    double noise_sigma = 2.6;
    double informativeness = 0.9;
    std::uint64_t seed = 7;
    std::size_t latent_dim = 8;
    double latent_spread = 0.5;           // per-sample perturbation around the class code
    double privileged_noise_scale = 0.05;  // privileged noise = noise_sigma * this

    void validate() const;
    bool operator==(const DatasetSpec&) const = default;
};

struct PairedSample {
    std::uint64_t id = 0;
    std::size_t label = 0;
    std::vector<Tensor> primary_segments;   // M x [primary_dim]
    std::vector<Tensor> privileged_frames;  // M*r x [privileged_dim]

    std::size_t frames_per_segment() const;
    bool operator==(const PairedSample&) const = default;
};

enum class Split : std::uint8_t { Train = 0, Validation = 1, Test = 2 };

/// Split assignment from a hash of the sample id: 70% train, 10% validation, 20% test.
Split split_of(std::uint64_t id);

struct Dataset {
    DatasetSpec spec;
    std::vector<PairedSample> train;
    std::vector<PairedSample> validation;
    std::vector<PairedSample> test;

    std::size_t size() const { return train.size() + validation.size() + test.size(); }
    bool operator==(const Dataset&) const = default;
};

/// Fixed draws behind a dataset: class codes and the two modality projections.
struct GenerativeModel {
    std::vector<Tensor> class_codes;  // num_classes x [latent_dim]
    Tensor primary_projection;        // [primary_dim x latent_dim]
    Tensor privileged_projection;     // [privileged_dim x latent_dim]
};

GenerativeModel make_generative_model(const DatasetSpec& spec);

/// Deterministic in `spec`. Sample ids are assigned round-robin over classes, and every sample
/// draws from its own id-seeded stream, so growing samples_per_class keeps earlier samples.
Dataset generate(const DatasetSpec& spec);

/// Concatenates the primary segments into one vector; privileged frames pass through.
std::pair<Tensor, std::vector<Tensor>> flatten_nonsequential(const PairedSample& sample);
std::vector<Tensor> split_segments(const Tensor& flat, std::size_t segments);

/// "PDST" file: magic, u16 version, spec fields, u64 content digest, then per-sample records.
void write_dataset(const Dataset& dataset, const std::filesystem::path& path);
Dataset read_dataset(const std::filesystem::path& path);
std::vector<std::uint8_t> encode_dataset(const Dataset& dataset);
Dataset decode_dataset(std::span<const std::uint8_t> bytes);

}  // namespace lupi
