#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace respire {

// Every failure the library reports carries one of these codes so callers
// (notably the CLI) can map it to an exit status without parsing messages.
enum class Errc {
    // corpus
    IoError,
    MissingColumn,
    UnknownLabel,
    UnknownSplit,
    DuplicatePath,
    NotRiff,
    UnsupportedEncoding,
    TruncatedData,
    EmptySignal,
    SchemaMismatch,
    // mfcc
    InvalidConfig,
    WindowTooShort,
    SignalTooShort,
    NegativeFrequency,
    TooManyFilters,
    // features
    SeriesTooShort,
    TooFewRows,
    // learners
    DimensionMismatch,
    SingleClassData,
    EmptyNode,
    EmptyData,
    SchemaVersionMismatch,
    CorruptModel,
    // selection
    InsufficientFeatures,
    CardinalityOutOfRange,
    // evaluation
    MissingTrace,
    SplitLeak,
    // cli
    MissingArtifact,
    ConfigDigestMismatch,
};

std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace respire
