#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace respire {

enum class Label { Patient, NonPatient };
enum class Split { Train, Validation, Test };

std::string_view to_string(Label label) noexcept;
std::string_view to_string(Split split) noexcept;

// Case-insensitive; accepts the canonical spellings only
// ("patient"/"non_patient", "train"/"validation"/"test").
std::optional<Label> parse_label(std::string_view text);
std::optional<Split> parse_split(std::string_view text);

// +1 for Patient, -1 for NonPatient.
inline int label_sign(Label label) noexcept { return label == Label::Patient ? 1 : -1; }

// Dense row-major matrix of reals.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return rows_ == 0; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    // Appends a row; the first row fixes the column count.
    void push_row(std::span<const double> values);

    // Copy of the given columns, in the given order.
    Matrix select_columns(std::span<const std::size_t> columns) const;
    Matrix select_rows(std::span<const std::size_t> rows) const;

    const std::vector<double>& data() const noexcept { return data_; }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Feature rows with their labels and the split each row came from. The split
// tags travel with the rows so trainers can refuse held-out test data.
struct LabeledRows {
    Matrix x;
    std::vector<Label> y;
    std::vector<Split> splits;

    std::size_t size() const noexcept { return y.size(); }
    bool contains(Split split) const;
    LabeledRows select_columns(std::span<const std::size_t> columns) const;
    LabeledRows select_rows(std::span<const std::size_t> rows) const;
};

}  // namespace respire
