#include "respire/types.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

#include "respire/error.hpp"

namespace respire {

std::string_view errc_name(Errc code) noexcept {
    switch (code) {
        case Errc::IoError: return "IoError";
        case Errc::MissingColumn: return "MissingColumn";
        case Errc::UnknownLabel: return "UnknownLabel";
        case Errc::UnknownSplit: return "UnknownSplit";
        case Errc::DuplicatePath: return "DuplicatePath";
        case Errc::NotRiff: return "NotRiff";
        case Errc::UnsupportedEncoding: return "UnsupportedEncoding";
        case Errc::TruncatedData: return "TruncatedData";
        case Errc::EmptySignal: return "EmptySignal";
        case Errc::SchemaMismatch: return "SchemaMismatch";
        case Errc::InvalidConfig: return "InvalidConfig";
        case Errc::WindowTooShort: return "WindowTooShort";
        case Errc::SignalTooShort: return "SignalTooShort";
        case Errc::NegativeFrequency: return "NegativeFrequency";
        case Errc::TooManyFilters: return "TooManyFilters";
        case Errc::SeriesTooShort: return "SeriesTooShort";
        case Errc::TooFewRows: return "TooFewRows";
        case Errc::DimensionMismatch: return "DimensionMismatch";
        case Errc::SingleClassData: return "SingleClassData";
        case Errc::EmptyNode: return "EmptyNode";
        case Errc::EmptyData: return "EmptyData";
        case Errc::SchemaVersionMismatch: return "SchemaVersionMismatch";
        case Errc::CorruptModel: return "CorruptModel";
        case Errc::InsufficientFeatures: return "InsufficientFeatures";
        case Errc::CardinalityOutOfRange: return "CardinalityOutOfRange";
        case Errc::MissingTrace: return "MissingTrace";
        case Errc::SplitLeak: return "SplitLeak";
        case Errc::MissingArtifact: return "MissingArtifact";
        case Errc::ConfigDigestMismatch: return "ConfigDigestMismatch";
    }
    return "Unknown";
}

std::string_view to_string(Label label) noexcept {
    return label == Label::Patient ? "patient" : "non_patient";
}

std::string_view to_string(Split split) noexcept {
    switch (split) {
        case Split::Train: return "train";
        case Split::Validation: return "validation";
        case Split::Test: return "test";
    }
    return "train";
}

namespace {

std::string lowered(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

}  // namespace

std::optional<Label> parse_label(std::string_view text) {
    const std::string t = lowered(text);
    if (t == "patient") return Label::Patient;
    if (t == "non_patient") return Label::NonPatient;
    return std::nullopt;
}

std::optional<Split> parse_split(std::string_view text) {
    const std::string t = lowered(text);
    if (t == "train") return Split::Train;
    if (t == "validation") return Split::Validation;
    if (t == "test") return Split::Test;
    return std::nullopt;
}

void Matrix::push_row(std::span<const double> values) {
    if (rows_ == 0 && cols_ == 0) cols_ = values.size();
    if (values.size() != cols_)
        throw Error(Errc::DimensionMismatch, "row of length " + std::to_string(values.size()) +
                                                 " pushed into matrix with " + std::to_string(cols_) +
                                                 " columns");
    data_.insert(data_.end(), values.begin(), values.end());
    ++rows_;
}

Matrix Matrix::select_columns(std::span<const std::size_t> columns) const {
    Matrix out(rows_, columns.size());
    for (std::size_t c : columns)
        if (c >= cols_)
            throw Error(Errc::DimensionMismatch, "column " + std::to_string(c) + " out of range");
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t j = 0; j < columns.size(); ++j) out(r, j) = (*this)(r, columns[j]);
    return out;
}

Matrix Matrix::select_rows(std::span<const std::size_t> rows) const {
    Matrix out(rows.size(), cols_);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        auto src = row(rows[i]);
        std::copy(src.begin(), src.end(), out.row(i).begin());
    }
    return out;
}

bool LabeledRows::contains(Split split) const {
    return std::find(splits.begin(), splits.end(), split) != splits.end();
}

LabeledRows LabeledRows::select_columns(std::span<const std::size_t> columns) const {
    return {x.select_columns(columns), y, splits};
}

LabeledRows LabeledRows::select_rows(std::span<const std::size_t> rows) const {
    LabeledRows out;
    out.x = x.select_rows(rows);
    out.y.reserve(rows.size());
    out.splits.reserve(rows.size());
    for (std::size_t r : rows) {
        out.y.push_back(y[r]);
        out.splits.push_back(splits.empty() ? Split::Train : splits[r]);
    }
    return out;
}

}  // namespace respire
