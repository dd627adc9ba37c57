#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "respire/error.hpp"
#include "respire/mfcc.hpp"
#include "respire/model.hpp"

namespace respire::cli {

inline constexpr std::uint64_t kDefaultSeed = 61080;

enum ExitCode : int { Success = 0, Usage = 1, DataError = 2, ArtifactMismatch = 3 };

int exit_code_for(Errc code) noexcept;

// Values shared by every command. Built from defaults, then the TOML file,
// then RESPIRE_SEED, then command-line flags.
struct Settings {
    mfcc::MfccConfig mfcc;
    learners::LearnerSpec learners;  // per-learner blocks; kind chosen per command
    std::uint64_t seed = kDefaultSeed;
    std::size_t jobs = 1;
    std::vector<std::size_t> mel;  // empty: the command default
    bool allow_skips = false;
};

// Assigns one dotted key (e.g. "mfcc.hop", "bagging.n_learners", "seed").
// Throws InvalidConfig for unknown keys or unparsable values.
void apply_setting(Settings& settings, std::string_view key, std::string_view value);
void apply_config_file(Settings& settings, const std::string& path);

// "23", "2..39" or "13,23,30".
std::vector<std::size_t> parse_mel_list(std::string_view text);

std::string feature_table_name(std::size_t mel_coeffs);

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace respire::cli
