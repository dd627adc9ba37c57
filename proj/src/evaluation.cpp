#include "respire/evaluation.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>

#include "respire/error.hpp"
#include "respire/parallel.hpp"
#include "respire/text.hpp"

namespace respire::evaluation {

EvalReport make_report(std::span<const Label> truth, std::span<const Label> predicted) {
    if (truth.size() != predicted.size())
        throw Error(Errc::DimensionMismatch, "truth and prediction counts differ");
    if (truth.empty()) throw Error(Errc::EmptyData, "cannot evaluate zero rows");
    EvalReport r;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const bool actual_p = truth[i] == Label::Patient;
        const bool pred_p = predicted[i] == Label::Patient;
        if (actual_p && pred_p) ++r.tp;
        else if (actual_p) ++r.fn;
        else if (pred_p) ++r.fp;
        else ++r.tn;
    }
    r.n = truth.size();
    r.accuracy = static_cast<double>(r.tp + r.tn) / static_cast<double>(r.n);
    if (r.tp + r.fn > 0) r.sensitivity_patient = static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fn);
    if (r.tn + r.fp > 0) r.sensitivity_nonpatient = static_cast<double>(r.tn) / static_cast<double>(r.tn + r.fp);
    return r;
}

EvalReport evaluate(const learners::TrainedModel& model, const LabeledRows& rows) {
    if (rows.size() == 0) throw Error(Errc::EmptyData, "cannot evaluate zero rows");
    std::vector<Label> predicted(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) predicted[i] = learners::predict(model, rows.x.row(i)).label;
    return make_report(rows.y, predicted);
}

namespace {

std::string fixed4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

std::string optional_real(const std::optional<double>& v) { return v ? text::format_real(*v) : ""; }

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

LabeledRows read_rows(const corpus::FeatureTable& table, Split split, std::string_view operation, AuditLog* audit) {
    auto rows = table.labeled_rows(split);
    if (audit) audit->record(split, rows.size(), operation);
    return rows;
}

}  // namespace

std::string format_report(std::string_view title, const EvalReport& r) {
    std::string out;
    out += std::string(title) + "\n";
    out += "  n                        " + std::to_string(r.n) + "\n";
    out += "  confusion (rows = truth) patient: " + std::to_string(r.tp) + " / " + std::to_string(r.fn) +
           "   non_patient: " + std::to_string(r.fp) + " / " + std::to_string(r.tn) + "\n";
    out += "  accuracy                 " + fixed4(r.accuracy) + "\n";
    out += "  sensitivity patient      " + (r.sensitivity_patient ? fixed4(*r.sensitivity_patient) : "absent") + "\n";
    out += "  sensitivity non_patient  " +
           (r.sensitivity_nonpatient ? fixed4(*r.sensitivity_nonpatient) : "absent") + "\n";
    return out;
}

std::string report_csv_header() {
    return "learner,split,n,tp,fn,fp,tn,accuracy,sensitivity_patient,sensitivity_non_patient\n";
}

std::string report_csv_row(std::string_view learner, std::string_view split, const EvalReport& r) {
    return std::string(learner) + "," + std::string(split) + "," + std::to_string(r.n) + "," + std::to_string(r.tp) +
           "," + std::to_string(r.fn) + "," + std::to_string(r.fp) + "," + std::to_string(r.tn) + "," +
           text::format_real(r.accuracy) + "," + optional_real(r.sensitivity_patient) + "," +
           optional_real(r.sensitivity_nonpatient) + "\n";
}

void AuditLog::record(Split split, std::size_t rows_read, std::string_view operation) {
    Entry e{utc_timestamp(), split, rows_read, std::string(operation)};
    if (!file_.empty()) {
        if (file_.has_parent_path()) std::filesystem::create_directories(file_.parent_path());
        std::ofstream out(file_, std::ios::app);
        if (!out) throw Error(Errc::IoError, "cannot append to audit log " + file_.string());
        out << e.timestamp << ',' << to_string(split) << ',' << rows_read << ',' << e.operation << '\n';
    }
    entries_.push_back(std::move(e));
}

std::size_t AuditLog::rows_read(Split split) const {
    std::size_t total = 0;
    for (const auto& e : entries_)
        if (e.split == split) total += e.rows_read;
    return total;
}

LabeledRows read_split(const corpus::FeatureTable& table, Split split, std::string_view operation, AuditLog* audit) {
    if (split == Split::Test)
        throw Error(Errc::SplitLeak, "operation '" + std::string(operation) + "' asked for test rows");
    return read_rows(table, split, operation, audit);
}

std::vector<SweepReport::Chosen> SweepReport::chosen() const {
    std::vector<Chosen> out;
    for (const auto& series : accuracy) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < series.size(); ++i)
            if (series[i] > series[best]) best = i;
        out.push_back(series.empty() ? Chosen{0, 0.0} : Chosen{axis[best], series[best]});
    }
    return out;
}

std::string sweep_to_csv(const SweepReport& report) {
    std::string out = "axis,learner,accuracy\n";
    for (std::size_t l = 0; l < report.learners.size(); ++l)
        for (std::size_t i = 0; i < report.axis.size(); ++i)
            out += std::to_string(report.axis[i]) + "," + report.learners[l] + "," +
                   text::format_real(report.accuracy[l][i]) + "\n";
    const auto chosen = report.chosen();
    for (std::size_t l = 0; l < report.learners.size(); ++l)
        out += "# best " + report.learners[l] + " " + report.axis_name + "=" + std::to_string(chosen[l].axis_value) +
               " accuracy=" + text::format_real(chosen[l].accuracy) + "\n";
    return out;
}

SweepReport sweep_mel(std::span<const std::size_t> mel_values, const TableProvider& provider,
                      std::span<const learners::LearnerSpec> specs, AuditLog* audit, std::size_t jobs) {
    if (mel_values.empty() || specs.empty()) throw Error(Errc::InvalidConfig, "empty mel sweep");
    SweepReport report;
    report.axis_name = "mel_coeffs";
    report.axis.assign(mel_values.begin(), mel_values.end());
    for (const auto& s : specs) report.learners.emplace_back(learners::to_string(s.kind));
    report.accuracy.assign(specs.size(), std::vector<double>(mel_values.size()));

    for (std::size_t i = 0; i < mel_values.size(); ++i) {
        const auto table = provider(mel_values[i]);
        if (static_cast<std::size_t>(table.mel_coeff_count) != mel_values[i])
            throw Error(Errc::SchemaMismatch, "feature table for M=" + std::to_string(mel_values[i]) + " has M=" +
                                                  std::to_string(table.mel_coeff_count));
        const auto train = read_split(table, Split::Train, "sweep_mel", audit);
        const auto val = read_split(table, Split::Validation, "sweep_mel", audit);
        if (train.size() == 0 || val.size() == 0)
            throw Error(Errc::EmptyData, "mel sweep needs training and validation rows");
        std::vector<std::size_t> all(train.x.cols());
        for (std::size_t c = 0; c < all.size(); ++c) all[c] = c;
        parallel_for(specs.size(), jobs, [&](std::size_t l) {
            report.accuracy[l][i] = selection::subset_accuracy(specs[l], train, val, all);
        });
    }
    return report;
}

SweepReport sweep_sfs(std::span<const selection::SelectionTrace> traces) {
    if (traces.empty()) throw Error(Errc::MissingTrace, "no selection traces supplied");
    const std::size_t len = traces.front().steps.size();
    if (len == 0) throw Error(Errc::MissingTrace, "selection trace has no steps");
    SweepReport report;
    report.axis_name = "k";
    for (std::size_t k = 1; k <= len; ++k) report.axis.push_back(k);
    for (const auto& t : traces) {
        if (t.steps.size() != len)
            throw Error(Errc::SchemaMismatch, "selection traces differ in length");
        report.learners.emplace_back(learners::to_string(t.learner.kind));
        std::vector<double> series;
        for (const auto& s : t.steps) series.push_back(s.validation_accuracy);
        report.accuracy.push_back(std::move(series));
    }
    return report;
}

std::vector<NamedReport> final_test(std::span<const learners::TrainedModel> models, const corpus::FeatureTable& table,
                                    AuditLog* audit) {
    if (models.empty()) throw Error(Errc::InvalidConfig, "final_test needs at least one model");
    const auto test = read_rows(table, Split::Test, "final_test", audit);
    if (test.size() == 0) throw Error(Errc::EmptyData, "feature table has no test rows");
    std::vector<NamedReport> out;
    for (const auto& m : models) out.push_back({std::string(learners::to_string(m.kind())), evaluate(m, test)});
    return out;
}

}  // namespace respire::evaluation
