#include "respire/corpus.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

#include "respire/error.hpp"
#include "respire/text.hpp"

namespace respire::corpus {

namespace fs = std::filesystem;

std::size_t Manifest::count(Split split) const {
    return static_cast<std::size_t>(std::count_if(
        entries.begin(), entries.end(), [split](const ManifestEntry& e) { return e.split == split; }));
}

Manifest parse_manifest(std::istream& in, const fs::path& base_dir) {
    Manifest manifest;
    std::string line;
    std::size_t line_no = 0;
    int path_col = -1, label_col = -1, split_col = -1;
    bool have_header = false;
    std::set<fs::path> seen;

    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
        const auto trimmed = text::trim(line);
        if (trimmed.empty() || trimmed.front() == '#') continue;
        auto fields = text::split_csv(trimmed);

        if (!have_header) {
            for (std::size_t i = 0; i < fields.size(); ++i) {
                std::string name = fields[i];
                std::transform(name.begin(), name.end(), name.begin(),
                               [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
                if (name == "path") path_col = static_cast<int>(i);
                if (name == "label") label_col = static_cast<int>(i);
                if (name == "split") split_col = static_cast<int>(i);
            }
            for (auto [col, name] : {std::pair{path_col, "path"}, {label_col, "label"}, {split_col, "split"}})
                if (col < 0)
                    throw Error(Errc::MissingColumn,
                                "manifest header (line " + std::to_string(line_no) + ") lacks column '" +
                                    name + "'");
            have_header = true;
            continue;
        }

        const auto where = "manifest line " + std::to_string(line_no);
        const auto needed = static_cast<std::size_t>(std::max({path_col, label_col, split_col}));
        if (fields.size() <= needed)
            throw Error(Errc::MissingColumn, where + " has " + std::to_string(fields.size()) + " fields");
        const auto& raw_path = fields[static_cast<std::size_t>(path_col)];
        if (raw_path.empty()) throw Error(Errc::MissingColumn, where + " has an empty path");

        const auto label = parse_label(fields[static_cast<std::size_t>(label_col)]);
        if (!label)
            throw Error(Errc::UnknownLabel,
                        where + ": '" + fields[static_cast<std::size_t>(label_col)] + "'");
        const auto split = parse_split(fields[static_cast<std::size_t>(split_col)]);
        if (!split)
            throw Error(Errc::UnknownSplit,
                        where + ": '" + fields[static_cast<std::size_t>(split_col)] + "'");

        fs::path path(raw_path);
        if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
        path = path.lexically_normal();
        if (!seen.insert(path).second)
            throw Error(Errc::DuplicatePath, where + ": '" + raw_path + "' already listed");
        manifest.entries.push_back({std::move(path), *label, *split});
    }
    if (!have_header) throw Error(Errc::MissingColumn, "manifest has no header row");
    return manifest;
}

Manifest load_manifest(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::IoError, "cannot open manifest " + path.string());
    return parse_manifest(in, path.parent_path());
}

// ---------------------------------------------------------------------------
// WAV

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t read_u16(const std::uint8_t* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t read_u32(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

bool tag_is(const std::uint8_t* p, const char* tag) { return std::memcmp(p, tag, 4) == 0; }

struct WavFormat {
    std::uint16_t tag = 0;
    std::uint16_t channels = 0;
    std::uint32_t sample_rate = 0;
    std::uint16_t block_align = 0;
    std::uint16_t bits = 0;
};

double decode_sample(const std::uint8_t* p, const WavFormat& fmt) {
    if (fmt.tag == kFormatFloat) {
        const float v = std::bit_cast<float>(read_u32(p));
        if (!std::isfinite(v)) throw Error(Errc::UnsupportedEncoding, "non-finite float sample");
        return std::clamp(static_cast<double>(v), -1.0, 1.0);
    }
    switch (fmt.bits) {
        case 8: return (static_cast<double>(p[0]) - 128.0) / 128.0;
        case 16: return static_cast<std::int16_t>(read_u16(p)) / 32768.0;
        case 24: {
            std::int32_t v = static_cast<std::int32_t>(p[0] | (p[1] << 8) | (p[2] << 16));
            if (v & 0x800000) v -= 0x1000000;
            return v / 8388608.0;
        }
        case 32: return static_cast<std::int32_t>(read_u32(p)) / 2147483648.0;
        default: break;
    }
    throw Error(Errc::UnsupportedEncoding, "unsupported bit depth");
}

}  // namespace

Signal decode_wav(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 12 || !tag_is(bytes.data(), "RIFF") || !tag_is(bytes.data() + 8, "WAVE"))
        throw Error(Errc::NotRiff, "missing RIFF/WAVE signature");

    std::optional<WavFormat> fmt;
    std::span<const std::uint8_t> data;
    bool have_data = false;

    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const std::uint8_t* chunk = bytes.data() + pos;
        const std::uint32_t size = read_u32(chunk + 4);
        const std::size_t body = pos + 8;
        const std::size_t available = bytes.size() - body;

        if (tag_is(chunk, "fmt ")) {
            if (size < 16 || size > available) throw Error(Errc::TruncatedData, "short fmt chunk");
            const std::uint8_t* f = bytes.data() + body;
            WavFormat w;
            w.tag = read_u16(f);
            w.channels = read_u16(f + 2);
            w.sample_rate = read_u32(f + 4);
            w.block_align = read_u16(f + 12);
            w.bits = read_u16(f + 14);
            if (w.tag == kFormatExtensible) {
                if (size < 40) throw Error(Errc::TruncatedData, "short extensible fmt chunk");
                // The first two bytes of the sub-format GUID carry the real tag.
                w.tag = read_u16(f + 24);
            }
            fmt = w;
        } else if (tag_is(chunk, "data")) {
            if (size > available)
                throw Error(Errc::TruncatedData, "data chunk declares " + std::to_string(size) +
                                                     " bytes, file holds " + std::to_string(available));
            data = bytes.subspan(body, size);
            have_data = true;
        } else if (size > available) {
            break;  // trailing junk after the audio
        }
        pos = body + size + (size & 1u);
    }

    if (!fmt) throw Error(Errc::UnsupportedEncoding, "no fmt chunk");
    if (!have_data) throw Error(Errc::TruncatedData, "no data chunk");

    const WavFormat& f = *fmt;
    const bool pcm_ok = f.tag == kFormatPcm && (f.bits == 8 || f.bits == 16 || f.bits == 24 || f.bits == 32);
    const bool float_ok = f.tag == kFormatFloat && f.bits == 32;
    if (!pcm_ok && !float_ok)
        throw Error(Errc::UnsupportedEncoding,
                    "format tag " + std::to_string(f.tag) + " with " + std::to_string(f.bits) + " bits");
    if (f.channels == 0 || f.sample_rate == 0)
        throw Error(Errc::UnsupportedEncoding, "zero channels or sample rate");
    const std::size_t sample_bytes = f.bits / 8u;
    if (f.block_align != sample_bytes * f.channels)
        throw Error(Errc::UnsupportedEncoding, "block align disagrees with channels and bit depth");

    // A trailing partial frame is ignored.
    const std::size_t frames = data.size() / f.block_align;
    if (frames == 0) throw Error(Errc::EmptySignal, "data chunk holds no complete frame");

    Signal signal;
    signal.sample_rate = static_cast<int>(f.sample_rate);
    signal.samples.resize(frames);
    for (std::size_t i = 0; i < frames; ++i) {
        const std::uint8_t* frame = data.data() + i * f.block_align;
        double sum = 0.0;
        for (std::size_t c = 0; c < f.channels; ++c) sum += decode_sample(frame + c * sample_bytes, f);
        signal.samples[i] = sum / f.channels;
    }
    return signal;
}

Signal decode_wav(const fs::path& path) {
    const std::string bytes = text::read_file(path);
    return decode_wav(std::span(reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()));
}

std::vector<std::uint8_t> encode_wav(std::span<const double> interleaved, int sample_rate, int channels,
                                     SampleFormat format) {
    if (channels <= 0 || sample_rate <= 0) throw Error(Errc::InvalidConfig, "bad channel count or rate");
    int bits = 16;
    std::uint16_t tag = kFormatPcm;
    switch (format) {
        case SampleFormat::Pcm8: bits = 8; break;
        case SampleFormat::Pcm16: bits = 16; break;
        case SampleFormat::Pcm24: bits = 24; break;
        case SampleFormat::Pcm32: bits = 32; break;
        case SampleFormat::Float32: bits = 32; tag = kFormatFloat; break;
    }
    const std::uint32_t sample_bytes = static_cast<std::uint32_t>(bits / 8);
    const std::uint32_t data_size = static_cast<std::uint32_t>(interleaved.size()) * sample_bytes;

    std::vector<std::uint8_t> out;
    out.reserve(44 + data_size);
    auto put_tag = [&](const char* t) { out.insert(out.end(), t, t + 4); };
    auto put_u16 = [&](std::uint32_t v) {
        out.push_back(static_cast<std::uint8_t>(v));
        out.push_back(static_cast<std::uint8_t>(v >> 8));
    };
    auto put_u32 = [&](std::uint32_t v) {
        put_u16(v & 0xffff);
        put_u16(v >> 16);
    };

    put_tag("RIFF");
    put_u32(36 + data_size);
    put_tag("WAVE");
    put_tag("fmt ");
    put_u32(16);
    put_u16(tag);
    put_u16(static_cast<std::uint32_t>(channels));
    put_u32(static_cast<std::uint32_t>(sample_rate));
    put_u32(static_cast<std::uint32_t>(sample_rate) * sample_bytes * static_cast<std::uint32_t>(channels));
    put_u16(sample_bytes * static_cast<std::uint32_t>(channels));
    put_u16(static_cast<std::uint32_t>(bits));
    put_tag("data");
    put_u32(data_size);

    for (double v : interleaved) {
        v = std::clamp(v, -1.0, 1.0);
        if (format == SampleFormat::Float32) {
            put_u32(std::bit_cast<std::uint32_t>(static_cast<float>(v)));
            continue;
        }
        const double scale = std::ldexp(1.0, bits - 1);
        const auto q = static_cast<std::int64_t>(
            std::clamp(std::round(v * scale), -scale, scale - 1.0));
        if (bits == 8) {
            out.push_back(static_cast<std::uint8_t>(q + 128));
        } else {
            const auto u = static_cast<std::uint32_t>(q);
            for (int b = 0; b < bits; b += 8) out.push_back(static_cast<std::uint8_t>(u >> b));
        }
    }
    return out;
}

void write_wav(const fs::path& path, const Signal& signal, SampleFormat format) {
    const auto bytes = encode_wav(signal.samples, signal.sample_rate, 1, format);
    text::write_file(path, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

ValidatedClip validate_clip(const Signal& signal, int expected_rate) {
    if (signal.samples.empty()) throw Error(Errc::EmptySignal, "clip has no samples");
    if (expected_rate <= 0 || signal.sample_rate <= 0)
        throw Error(Errc::InvalidConfig, "sample rates must be positive");
    if (signal.sample_rate == expected_rate) return {signal, false};

    const double ratio = static_cast<double>(signal.sample_rate) / expected_rate;
    const auto in_len = signal.samples.size();
    const auto out_len = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(static_cast<double>(in_len) * expected_rate /
                                                 signal.sample_rate)));
    Signal out;
    out.sample_rate = expected_rate;
    out.samples.resize(out_len);
    for (std::size_t i = 0; i < out_len; ++i) {
        const double t = static_cast<double>(i) * ratio;
        const auto i0 = static_cast<std::size_t>(t);
        if (i0 + 1 >= in_len) {
            out.samples[i] = signal.samples.back();
            continue;
        }
        const double frac = t - static_cast<double>(i0);
        out.samples[i] = signal.samples[i0] + frac * (signal.samples[i0 + 1] - signal.samples[i0]);
    }
    return {std::move(out), true};
}

// ---------------------------------------------------------------------------
// Feature tables

void FeatureTable::check() const {
    if (mel_coeff_count <= 0 || feature_names.size() != static_cast<std::size_t>(mel_coeff_count) * 7)
        throw Error(Errc::SchemaMismatch, std::to_string(feature_names.size()) +
                                              " feature names for mel_coeff_count=" +
                                              std::to_string(mel_coeff_count));
    for (const auto& row : rows)
        if (row.features.size() != feature_names.size())
            throw Error(Errc::SchemaMismatch, "row '" + row.clip_id + "' has " +
                                                  std::to_string(row.features.size()) + " features, expected " +
                                                  std::to_string(feature_names.size()));
}

LabeledRows FeatureTable::labeled_rows(Split split) const {
    LabeledRows out;
    out.x = Matrix(0, feature_names.size());
    for (const auto& row : rows) {
        if (row.split != split) continue;
        out.x.push_row(row.features);
        out.y.push_back(row.label);
        out.splits.push_back(row.split);
    }
    return out;
}

std::string format_feature_table(const FeatureTable& table) {
    table.check();
    std::string out;
    out += "# mel_coeff_count=" + std::to_string(table.mel_coeff_count) + "\n";
    for (const auto& [key, value] : table.metadata) {
        if (key == "mel_coeff_count") continue;
        out += "# " + key + "=" + value + "\n";
    }
    out += "clip_id,label,split";
    for (const auto& name : table.feature_names) out += "," + name;
    out += "\n";
    for (const auto& row : table.rows) {
        out += text::quote_csv(row.clip_id);
        out += ",";
        out += to_string(row.label);
        out += ",";
        out += to_string(row.split);
        for (double v : row.features) {
            out += ",";
            out += text::format_real(v);
        }
        out += "\n";
    }
    return out;
}

FeatureTable parse_feature_table(std::istream& in) {
    FeatureTable table;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    std::optional<int> declared_m;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.front() == '#') {
            const auto body = text::trim(std::string_view(line).substr(1));
            const auto eq = body.find('=');
            if (eq == std::string_view::npos) continue;
            std::string key(text::trim(body.substr(0, eq)));
            std::string value(text::trim(body.substr(eq + 1)));
            if (key == "mel_coeff_count") {
                declared_m = static_cast<int>(text::parse_real(value));
            } else {
                table.metadata[key] = value;
            }
            continue;
        }
        auto fields = text::split_csv(line);
        if (!have_header) {
            if (fields.size() < 3 || fields[0] != "clip_id" || fields[1] != "label" || fields[2] != "split")
                throw Error(Errc::SchemaMismatch, "feature table header must start with clip_id,label,split");
            table.feature_names.assign(fields.begin() + 3, fields.end());
            have_header = true;
            const auto n = table.feature_names.size();
            if (declared_m) {
                if (n != static_cast<std::size_t>(*declared_m) * 7)
                    throw Error(Errc::SchemaMismatch, "header has " + std::to_string(n) +
                                                          " feature columns but mel_coeff_count=" +
                                                          std::to_string(*declared_m));
                table.mel_coeff_count = *declared_m;
            } else {
                if (n == 0 || n % 7 != 0)
                    throw Error(Errc::SchemaMismatch,
                                std::to_string(n) + " feature columns is not a multiple of 7");
                table.mel_coeff_count = static_cast<int>(n / 7);
            }
            continue;
        }
        const auto where = "feature table line " + std::to_string(line_no);
        if (fields.size() != table.feature_names.size() + 3)
            throw Error(Errc::SchemaMismatch, where + " has " + std::to_string(fields.size()) + " fields");
        FeatureRow row;
        row.clip_id = fields[0];
        const auto label = parse_label(fields[1]);
        if (!label) throw Error(Errc::UnknownLabel, where + ": '" + fields[1] + "'");
        const auto split = parse_split(fields[2]);
        if (!split) throw Error(Errc::UnknownSplit, where + ": '" + fields[2] + "'");
        row.label = *label;
        row.split = *split;
        row.features.reserve(table.feature_names.size());
        for (std::size_t i = 3; i < fields.size(); ++i) row.features.push_back(text::parse_real(fields[i]));
        table.rows.push_back(std::move(row));
    }
    if (!have_header) throw Error(Errc::SchemaMismatch, "feature table has no header");
    return table;
}

void write_feature_table(const FeatureTable& table, const fs::path& path) {
    text::write_file(path, format_feature_table(table));
}

FeatureTable read_feature_table(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::IoError, "cannot open feature table " + path.string());
    return parse_feature_table(in);
}

}  // namespace respire::corpus
