#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "respire/types.hpp"

namespace respire::corpus {

struct ManifestEntry {
    std::filesystem::path path;
    Label label;
    Split split;
};

struct Manifest {
    std::vector<ManifestEntry> entries;

    std::size_t count(Split split) const;
};

// CSV with header `path,label,split` (columns in any order, extra columns
// ignored). Lines starting with '#' are comments. Relative paths are resolved
// against `base_dir` (load_manifest uses the manifest's own directory).
Manifest parse_manifest(std::istream& in, const std::filesystem::path& base_dir = {});
Manifest load_manifest(const std::filesystem::path& path);

// Mono audio with amplitudes normalized into [-1, 1].
struct Signal {
    std::vector<double> samples;
    int sample_rate = 0;

    std::size_t size() const noexcept { return samples.size(); }
    double duration_seconds() const noexcept {
        return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
    }
};

enum class SampleFormat { Pcm8, Pcm16, Pcm24, Pcm32, Float32 };

// RIFF/WAVE with `fmt ` and `data` chunks; integer PCM (8/16/24/32-bit) or
// 32-bit IEEE float, including WAVE_FORMAT_EXTENSIBLE wrappers of those.
// Multi-channel frames are averaged to mono.
Signal decode_wav(std::span<const std::uint8_t> bytes);
Signal decode_wav(const std::filesystem::path& path);

// Interleaved multi-channel writer, mainly for fixtures. Values are clipped
// to [-1, 1] and quantized by rounding.
std::vector<std::uint8_t> encode_wav(std::span<const double> interleaved, int sample_rate,
                                     int channels, SampleFormat format);
void write_wav(const std::filesystem::path& path, const Signal& signal, SampleFormat format);

struct ValidatedClip {
    Signal signal;
    bool resampled = false;
};

// Returns the clip unchanged at the expected rate; otherwise resamples by
// linear interpolation to round(len * expected / rate) samples and flags it.
ValidatedClip validate_clip(const Signal& signal, int expected_rate);

struct FeatureRow {
    std::string clip_id;
    Label label;
    Split split;
    std::vector<double> features;

    friend bool operator==(const FeatureRow&, const FeatureRow&) = default;
};

struct FeatureTable {
    std::vector<FeatureRow> rows;
    std::vector<std::string> feature_names;
    int mel_coeff_count = 0;
    // Provenance written as `# key=value` lines (e.g. config_digest).
    std::map<std::string, std::string> metadata;

    // Throws SchemaMismatch when the table invariants do not hold.
    void check() const;
    LabeledRows labeled_rows(Split split) const;

    friend bool operator==(const FeatureTable&, const FeatureTable&) = default;
};

// Header `clip_id,label,split,f001..fNNN`; reals in shortest round-trip form.
std::string format_feature_table(const FeatureTable& table);
FeatureTable parse_feature_table(std::istream& in);
void write_feature_table(const FeatureTable& table, const std::filesystem::path& path);
FeatureTable read_feature_table(const std::filesystem::path& path);

}  // namespace respire::corpus
