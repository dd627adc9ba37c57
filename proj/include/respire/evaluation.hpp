#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "respire/corpus.hpp"
#include "respire/model.hpp"
#include "respire/selection.hpp"
#include "respire/types.hpp"

namespace respire::evaluation {

struct EvalReport {
    std::size_t tp = 0;  // true Patient, predicted Patient
    std::size_t fn = 0;  // true Patient, predicted NonPatient
    std::size_t fp = 0;  // true NonPatient, predicted Patient
    std::size_t tn = 0;  // true NonPatient, predicted NonPatient
    std::size_t n = 0;
    double accuracy = 0.0;
    // Absent when the class has no rows.
    std::optional<double> sensitivity_patient;
    std::optional<double> sensitivity_nonpatient;

    friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

EvalReport make_report(std::span<const Label> truth, std::span<const Label> predicted);
EvalReport evaluate(const learners::TrainedModel& model, const LabeledRows& rows);

// Human-readable block and one CSV record (header via report_csv_header()).
std::string format_report(std::string_view title, const EvalReport& report);
std::string report_csv_header();
std::string report_csv_row(std::string_view learner, std::string_view split, const EvalReport& report);

// Append-only record of which split rows were handed to which operation.
// Lines are `timestamp,split,rows_read,operation`.
class AuditLog {
public:
    struct Entry {
        std::string timestamp;
        Split split;
        std::size_t rows_read;
        std::string operation;
    };

    AuditLog() = default;
    explicit AuditLog(std::filesystem::path file) : file_(std::move(file)) {}

    void record(Split split, std::size_t rows_read, std::string_view operation);
    const std::vector<Entry>& entries() const noexcept { return entries_; }
    std::size_t rows_read(Split split) const;

private:
    std::filesystem::path file_;
    std::vector<Entry> entries_;
};

// Reads one split of a feature table for an operation, logging the access.
// Test rows are refused with SplitLeak; only final_test may read them.
LabeledRows read_split(const corpus::FeatureTable& table, Split split, std::string_view operation,
                       AuditLog* audit = nullptr);

struct SweepReport {
    std::string axis_name;  // "mel_coeffs" or "k"
    std::vector<std::size_t> axis;
    std::vector<std::string> learners;
    std::vector<std::vector<double>> accuracy;  // [learner][axis index]

    struct Chosen {
        std::size_t axis_value;
        double accuracy;
    };
    // Argmax per learner; ties go to the smaller axis value.
    std::vector<Chosen> chosen() const;

    friend bool operator==(const SweepReport&, const SweepReport&) = default;
};

// Long format `axis,learner,accuracy`, then `# best` comment lines.
std::string sweep_to_csv(const SweepReport& report);

using TableProvider = std::function<corpus::FeatureTable(std::size_t mel_coeffs)>;

// For each M: train every learner on the training split of provider(M) and
// score it on the validation split.
SweepReport sweep_mel(std::span<const std::size_t> mel_values, const TableProvider& provider,
                      std::span<const learners::LearnerSpec> learners, AuditLog* audit = nullptr, std::size_t jobs = 1);

// Accuracy against cardinality for each trace; all traces must have equal length.
SweepReport sweep_sfs(std::span<const selection::SelectionTrace> traces);

struct NamedReport {
    std::string learner;
    EvalReport report;
};

// The only path that reads test rows. Models must already be trained.
std::vector<NamedReport> final_test(std::span<const learners::TrainedModel> models, const corpus::FeatureTable& table,
                                    AuditLog* audit = nullptr);

}  // namespace respire::evaluation
