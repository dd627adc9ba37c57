#pragma once

// Synthetic datasets and a tiny on-disk corpus for end-to-end runs.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "respire/corpus.hpp"
#include "respire/types.hpp"

namespace fixture {

namespace fs = std::filesystem;

// Four Gaussian blobs at (+-1, +-1); Patient where the signs agree.
inline respire::LabeledRows xor_points(std::size_t n, unsigned seed, double spread = 0.15) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> noise(0.0, spread);
    respire::LabeledRows out;
    out.x = respire::Matrix(0, 2);
    for (std::size_t i = 0; i < n; ++i) {
        const double sx = (i % 2) ? 1.0 : -1.0;
        const double sy = (i / 2 % 2) ? 1.0 : -1.0;
        out.x.push_row(std::vector<double>{sx + noise(rng), sy + noise(rng)});
        out.y.push_back(sx * sy > 0 ? respire::Label::Patient : respire::Label::NonPatient);
        out.splits.push_back(respire::Split::Train);
    }
    return out;
}

inline respire::Matrix uniform_matrix(std::size_t rows, std::size_t cols, std::mt19937& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    respire::Matrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = u(rng);
    return m;
}

inline std::vector<respire::Label> random_labels(std::size_t n, std::mt19937& rng) {
    std::vector<respire::Label> y(n);
    for (auto& l : y) l = rng() % 2 ? respire::Label::Patient : respire::Label::NonPatient;
    return y;
}

// Patient clips are broadband bursts, non-patient clips a steady tone.
inline respire::corpus::Signal clip(bool patient, unsigned seed, std::size_t samples = 22050, int rate = 44100) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    respire::corpus::Signal s;
    s.sample_rate = rate;
    s.samples.resize(samples);
    const double tone = 400.0 + 150.0 * static_cast<double>(seed % 5);
    for (std::size_t i = 0; i < samples; ++i) {
        const double t = static_cast<double>(i) / rate;
        double v = 0.02 * noise(rng);
        if (patient) {
            const double env = std::exp(-12.0 * std::fmod(t, 0.25));
            v += 0.5 * env * noise(rng);
        } else {
            v += 0.4 * std::sin(2.0 * std::numbers::pi * tone * t);
        }
        s.samples[i] = std::clamp(v, -1.0, 1.0);
    }
    return s;
}

// Writes `count` clips plus manifest.csv; splits cycle train, train, validation, test
// over label pairs so every split holds both classes.
inline fs::path write_corpus(const fs::path& dir, std::size_t count = 12, unsigned seed = 7) {
    fs::create_directories(dir / "clips");
    std::ofstream manifest(dir / "manifest.csv");
    manifest << "path,label,split\n";
    static const char* splits[] = {"train", "train", "validation", "test"};
    for (std::size_t i = 0; i < count; ++i) {
        const bool patient = i % 2 == 0;
        const std::string name = "clips/clip" + std::to_string(i) + ".wav";
        respire::corpus::write_wav(dir / name, clip(patient, seed + static_cast<unsigned>(i)),
                                   respire::corpus::SampleFormat::Pcm16);
        manifest << name << "," << (patient ? "patient" : "non_patient") << "," << splits[(i / 2) % 4] << "\n";
    }
    return dir / "manifest.csv";
}

inline std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// A fresh directory under the system temp dir.
inline fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("respire_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace fixture
