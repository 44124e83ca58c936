#include "lupi/synthdata.hpp"

#include <array>
#include <cmath>
#include <random>

#include "lupi/binary_io.hpp"
#include "lupi/errors.hpp"

namespace lupi {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Tensor gaussian(Shape shape, double sigma, std::mt19937_64& rng) {
    std::normal_distribution<double> dist(0.0, 1.0);
    Tensor t(std::move(shape));
    for (auto& v : t.data()) v = sigma * dist(rng);
    return t;
}

Tensor project(const Tensor& m, const std::vector<double>& v) {
    Tensor out(Shape{m.dim(0)}, 0.0);
    for (std::size_t r = 0; r < m.dim(0); ++r)
        for (std::size_t c = 0; c < m.dim(1); ++c) out[r] += m.at(r, c) * v[c];
    return out;
}

constexpr std::array<std::uint8_t, 4> kMagic{'P', 'D', 'S', 'T'};
constexpr std::uint16_t kVersion = 1;

}  // namespace

void DatasetSpec::validate() const {
    auto positive = [](std::size_t v, const char* key) {
        if (v == 0) throw ConfigError("must be positive", key);
    };
    if (num_classes < 2) throw ConfigError("must be at least 2", "num_classes");
    positive(samples_per_class, "samples_per_class");
    positive(primary_dim, "primary_dim");
    positive(privileged_dim, "privileged_dim");
    positive(segments, "segments");
    positive(frames_per_segment, "frames_per_segment");
    positive(latent_dim, "latent_dim");
    if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) throw ConfigError("must be finite and >= 0", "noise_sigma");
    if (!(informativeness >= 0.0 && informativeness <= 1.0)) throw ConfigError("must lie in [0, 1]", "informativeness");
    if (!(latent_spread >= 0.0) || !std::isfinite(latent_spread)) throw ConfigError("must be finite and >= 0", "latent_spread");
    if (!(privileged_noise_scale >= 0.0) || !std::isfinite(privileged_noise_scale))
        throw ConfigError("must be finite and >= 0", "privileged_noise_scale");
}

std::size_t PairedSample::frames_per_segment() const {
    if (primary_segments.empty() || privileged_frames.size() % primary_segments.size() != 0)
        throw ContractError("sample " + std::to_string(id) + " has " + std::to_string(privileged_frames.size()) +
                            " frames for " + std::to_string(primary_segments.size()) + " segments");
    return privileged_frames.size() / primary_segments.size();
}

Split split_of(std::uint64_t id) {
    const auto bucket = splitmix64(id) % 100;
    if (bucket < 70) return Split::Train;
    if (bucket < 80) return Split::Validation;
    return Split::Test;
}

GenerativeModel make_generative_model(const DatasetSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(splitmix64(spec.seed));
    GenerativeModel g;
    for (std::size_t c = 0; c < spec.num_classes; ++c) g.class_codes.push_back(gaussian(Shape{spec.latent_dim}, 1.0, rng));
    const double proj = 1.0 / std::sqrt(static_cast<double>(spec.latent_dim));
    g.primary_projection = gaussian(Shape{spec.primary_dim, spec.latent_dim}, proj, rng);
    g.privileged_projection = gaussian(Shape{spec.privileged_dim, spec.latent_dim}, proj, rng);
    return g;
}

Dataset generate(const DatasetSpec& spec) {
    const GenerativeModel g = make_generative_model(spec);
    Dataset ds;
    ds.spec = spec;
    const double iota = spec.informativeness;
    // Pure-noise input matches the marginal variance of the latent code.
    const double noise_latent = std::sqrt(1.0 + spec.latent_spread * spec.latent_spread);
    const double privileged_sigma = spec.noise_sigma * spec.privileged_noise_scale;
    std::normal_distribution<double> normal(0.0, 1.0);

    for (std::size_t s = 0; s < spec.samples_per_class; ++s) {
        for (std::size_t c = 0; c < spec.num_classes; ++c) {
            PairedSample sample;
            sample.id = s * spec.num_classes + c;
            sample.label = c;
            std::mt19937_64 rng(splitmix64(spec.seed ^ splitmix64(sample.id + 0x51ed)));

            std::vector<double> latent(spec.latent_dim);
            for (std::size_t l = 0; l < spec.latent_dim; ++l)
                latent[l] = g.class_codes[c][l] + spec.latent_spread * normal(rng);

            for (std::size_t k = 0; k < spec.segments; ++k) {
                Tensor x = project(g.primary_projection, latent);
                for (auto& v : x.data()) v += spec.noise_sigma * normal(rng);
                sample.primary_segments.push_back(std::move(x));
            }
            for (std::size_t j = 0; j < spec.segments * spec.frames_per_segment; ++j) {
                std::vector<double> mixed(spec.latent_dim);
                for (std::size_t l = 0; l < spec.latent_dim; ++l)
                    mixed[l] = iota * latent[l] + (1.0 - iota) * noise_latent * normal(rng);
                Tensor x = project(g.privileged_projection, mixed);
                for (auto& v : x.data()) v += privileged_sigma * normal(rng);
                sample.privileged_frames.push_back(std::move(x));
            }

            switch (split_of(sample.id)) {
                case Split::Train: ds.train.push_back(std::move(sample)); break;
                case Split::Validation: ds.validation.push_back(std::move(sample)); break;
                case Split::Test: ds.test.push_back(std::move(sample)); break;
            }
        }
    }
    return ds;
}

std::pair<Tensor, std::vector<Tensor>> flatten_nonsequential(const PairedSample& sample) {
    if (sample.primary_segments.empty()) throw ContractError("sample has no primary segments");
    const Shape& seg = sample.primary_segments.front().shape();
    std::vector<double> flat;
    for (const auto& s : sample.primary_segments) {
        if (s.shape() != seg) throw DimensionError("primary segments differ in shape");
        flat.insert(flat.end(), s.data().begin(), s.data().end());
    }
    return {Tensor::vector(std::move(flat)), sample.privileged_frames};
}

std::vector<Tensor> split_segments(const Tensor& flat, std::size_t segments) {
    if (segments == 0 || flat.rank() != 1 || flat.size() % segments != 0)
        throw DimensionError("cannot split " + shape_string(flat.shape()) + " into " + std::to_string(segments) + " segments");
    const std::size_t n = flat.size() / segments;
    std::vector<Tensor> out;
    for (std::size_t k = 0; k < segments; ++k) {
        auto part = flat.data().subspan(k * n, n);
        out.push_back(Tensor::vector({part.begin(), part.end()}));
    }
    return out;
}

// Record: u8 split | u64 id | u32 label | u32 M | u32 primary_dim | f64... | u32 N | u32 privileged_dim | f64...
std::vector<std::uint8_t> encode_dataset(const Dataset& ds) {
    const DatasetSpec& s = ds.spec;
    ByteWriter body;
    body.u64(ds.size());
    auto put_tensors = [&](const std::vector<Tensor>& ts, std::size_t dim) {
        body.u32(static_cast<std::uint32_t>(ts.size()));
        body.u32(static_cast<std::uint32_t>(dim));
        for (const auto& t : ts) {
            if (t.size() != dim) throw DimensionError("sample tensors differ in shape");
            for (double v : t.data()) body.f64(v);
        }
    };
    auto put_split = [&](const std::vector<PairedSample>& samples, Split split) {
        for (const auto& p : samples) {
            body.u8(static_cast<std::uint8_t>(split));
            body.u64(p.id);
            body.u32(static_cast<std::uint32_t>(p.label));
            put_tensors(p.primary_segments, s.primary_dim);
            put_tensors(p.privileged_frames, s.privileged_dim);
        }
    };
    put_split(ds.train, Split::Train);
    put_split(ds.validation, Split::Validation);
    put_split(ds.test, Split::Test);

    ByteWriter w;
    w.raw(kMagic);
    w.u16(kVersion);
    w.u32(static_cast<std::uint32_t>(s.num_classes));
    w.u32(static_cast<std::uint32_t>(s.samples_per_class));
    w.u32(static_cast<std::uint32_t>(s.primary_dim));
    w.u32(static_cast<std::uint32_t>(s.privileged_dim));
    w.u32(static_cast<std::uint32_t>(s.segments));
    w.u32(static_cast<std::uint32_t>(s.frames_per_segment));
    w.f64(s.noise_sigma);
    w.f64(s.informativeness);
    w.u64(s.seed);
    w.u32(static_cast<std::uint32_t>(s.latent_dim));
    w.f64(s.latent_spread);
    w.f64(s.privileged_noise_scale);
    w.u64(fnv1a64(body.bytes()));
    w.raw(body.bytes());
    return std::move(w.bytes());
}

Dataset decode_dataset(std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes);
    auto magic = r.raw(4);
    if (!std::equal(magic.begin(), magic.end(), kMagic.begin())) throw FormatError("bad dataset magic", 0);
    const auto version_at = r.offset();
    if (const auto v = r.u16(); v != kVersion)
        throw FormatError("unsupported dataset version " + std::to_string(v), version_at);

    Dataset ds;
    DatasetSpec& s = ds.spec;
    s.num_classes = r.u32();
    s.samples_per_class = r.u32();
    s.primary_dim = r.u32();
    s.privileged_dim = r.u32();
    s.segments = r.u32();
    s.frames_per_segment = r.u32();
    s.noise_sigma = r.f64();
    s.informativeness = r.f64();
    s.seed = r.u64();
    s.latent_dim = r.u32();
    s.latent_spread = r.f64();
    s.privileged_noise_scale = r.f64();
    const auto digest_at = r.offset();
    const std::uint64_t digest = r.u64();
    const auto body_at = r.offset();
    if (fnv1a64(bytes.subspan(body_at)) != digest) throw FormatError("content digest mismatch", digest_at);
    try {
        s.validate();
    } catch (const ConfigError& e) {
        throw FormatError(std::string("invalid spec in header: ") + e.what(), 6);
    }

    auto get_tensors = [&](std::size_t expected_dim) {
        const auto at = r.offset();
        const auto count = r.u32();
        const auto dim = r.u32();
        if (dim != expected_dim) throw FormatError("declared tensor width disagrees with header", at);
        if (static_cast<std::uint64_t>(count) * dim > r.remaining() / 8) throw FormatError("payload truncated", at);
        std::vector<Tensor> out;
        for (std::uint32_t i = 0; i < count; ++i) {
            std::vector<double> v(dim);
            for (auto& x : v) x = r.f64();
            out.push_back(Tensor::vector(std::move(v)));
        }
        return out;
    };

    const auto count = r.u64();
    for (std::uint64_t i = 0; i < count; ++i) {
        const auto at = r.offset();
        const auto split = r.u8();
        if (split > 2) throw FormatError("unknown split tag", at);
        PairedSample p;
        p.id = r.u64();
        p.label = r.u32();
        if (p.label >= s.num_classes) throw FormatError("label out of range", at);
        p.primary_segments = get_tensors(s.primary_dim);
        p.privileged_frames = get_tensors(s.privileged_dim);
        auto& dst = split == 0 ? ds.train : split == 1 ? ds.validation : ds.test;
        dst.push_back(std::move(p));
    }
    if (r.remaining() != 0) throw FormatError("trailing bytes after records", r.offset());
    return ds;
}

void write_dataset(const Dataset& dataset, const std::filesystem::path& path) {
    write_file(path, encode_dataset(dataset));
}

Dataset read_dataset(const std::filesystem::path& path) { return decode_dataset(read_file(path)); }

}  // namespace lupi
