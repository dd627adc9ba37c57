#include "respire/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <thread>

#include "respire/corpus.hpp"
#include "respire/evaluation.hpp"
#include "respire/features.hpp"
#include "respire/json_io.hpp"
#include "respire/parallel.hpp"
#include "respire/selection.hpp"
#include "respire/text.hpp"

namespace respire::cli {

namespace fs = std::filesystem;
using nlohmann::json;

int exit_code_for(Errc code) noexcept {
    switch (code) {
        case Errc::InvalidConfig:
        case Errc::CardinalityOutOfRange: return Usage;
        case Errc::ConfigDigestMismatch:
        case Errc::SchemaVersionMismatch:
        case Errc::CorruptModel: return ArtifactMismatch;
        default: return DataError;
    }
}

namespace {

std::string unquote(std::string_view v) {
    v = text::trim(v);
    if (v.size() >= 2 && (v.front() == '"' || v.front() == '\'') && v.back() == v.front())
        v = v.substr(1, v.size() - 2);
    return std::string(v);
}

template <class T>
T parse_value(std::string_view key, std::string_view raw) {
    const std::string v = unquote(raw);
    T out{};
    const char* end = v.data() + v.size();
    const auto r = std::from_chars(v.data(), end, out);
    if (v.empty() || r.ec != std::errc{} || r.ptr != end)
        throw Error(Errc::InvalidConfig, "bad value '" + v + "' for " + std::string(key));
    return out;
}

bool parse_bool(std::string_view key, std::string_view raw) {
    const std::string v = unquote(raw);
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw Error(Errc::InvalidConfig, "bad boolean '" + v + "' for " + std::string(key));
}

template <class T>
void assign(T& field, std::string_view key, std::string_view value) {
    field = parse_value<T>(key, value);
}

}  // namespace

std::vector<std::size_t> parse_mel_list(std::string_view raw) {
    const std::string t = unquote(raw);
    std::vector<std::size_t> out;
    std::size_t start = 0;
    while (start <= t.size()) {
        const auto comma = t.find(',', start);
        const std::string part(text::trim(std::string_view(t).substr(start, comma - start)));
        const auto dots = part.find("..");
        if (dots == std::string::npos) {
            out.push_back(parse_value<std::size_t>("mel", part));
        } else {
            const auto lo = parse_value<std::size_t>("mel", part.substr(0, dots));
            const auto hi = parse_value<std::size_t>("mel", part.substr(dots + 2));
            if (lo > hi) throw Error(Errc::InvalidConfig, "empty mel range '" + part + "'");
            for (auto m = lo; m <= hi; ++m) out.push_back(m);
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    if (out.empty() || out.front() < 2) throw Error(Errc::InvalidConfig, "mel values must be at least 2");
    return out;
}

void apply_setting(Settings& s, std::string_view key, std::string_view value) {
    auto& m = s.mfcc;
    auto& l = s.learners;
    if (key == "seed") assign(s.seed, key, value);
    else if (key == "jobs") assign(s.jobs, key, value);
    else if (key == "mel") s.mel = parse_mel_list(value);
    else if (key == "allow_skips") s.allow_skips = parse_bool(key, value);
    else if (key == "mfcc.frame_length") assign(m.frame_length, key, value);
    else if (key == "mfcc.hop") assign(m.hop, key, value);
    else if (key == "mfcc.pre_emphasis_alpha") assign(m.pre_emphasis_alpha, key, value);
    else if (key == "mfcc.num_filters") assign(m.num_filters, key, value);
    else if (key == "mfcc.fft_size") assign(m.fft_size, key, value);
    else if (key == "mfcc.log_floor") assign(m.log_floor, key, value);
    else if (key == "mfcc.first_coeff") assign(m.first_coeff, key, value);
    else if (key == "mfcc.expected_rate") assign(m.expected_rate, key, value);
    else if (key == "mfcc.spectrum_mode") {
        const auto v = unquote(value);
        if (v == "power") m.spectrum_mode = mfcc::SpectrumMode::Power;
        else if (v == "magnitude") m.spectrum_mode = mfcc::SpectrumMode::Magnitude;
        else throw Error(Errc::InvalidConfig, "spectrum_mode must be power or magnitude, got '" + v + "'");
    }
    else if (key == "mfcc.num_coeffs") throw Error(Errc::InvalidConfig, "set the coefficient count with mel, not mfcc.num_coeffs");
    else if (key == "svm.C") assign(l.svm.C, key, value);
    else if (key == "svm.sigma") assign(l.svm.sigma, key, value);
    else if (key == "svm.kkt_tolerance") assign(l.svm.kkt_tolerance, key, value);
    else if (key == "svm.max_iterations") assign(l.svm.max_iterations, key, value);
    else if (key == "tree.max_splits") assign(l.tree.max_splits, key, value);
    else if (key == "tree.min_leaf") assign(l.tree.min_leaf, key, value);
    else if (key == "bagging.n_learners") assign(l.bagging.n_learners, key, value);
    else if (key == "bagging.max_splits") assign(l.bagging.tree.max_splits, key, value);
    else if (key == "bagging.min_leaf") assign(l.bagging.tree.min_leaf, key, value);
    else if (key == "adaboost.rounds") assign(l.adaboost.rounds, key, value);
    else if (key == "adaboost.max_splits") assign(l.adaboost.tree.max_splits, key, value);
    else if (key == "adaboost.min_leaf") assign(l.adaboost.tree.min_leaf, key, value);
    else throw Error(Errc::InvalidConfig, "unknown setting '" + std::string(key) + "'");
}

void apply_config_file(Settings& s, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::MissingArtifact, "missing config file: " + path);
    std::vector<CLI::ConfigItem> items;
    try {
        items = CLI::ConfigTOML().from_config(in);
    } catch (const CLI::Error& e) {
        throw Error(Errc::InvalidConfig, path + ": " + e.what());
    }
    for (const auto& item : items) {
        if (item.name == "++" || item.name == "--") continue;  // section markers
        std::string value;
        for (std::size_t i = 0; i < item.inputs.size(); ++i) value += (i ? "," : "") + item.inputs[i];
        apply_setting(s, item.fullname(), value);
    }
}

std::string feature_table_name(std::size_t mel_coeffs) { return "features_m" + std::to_string(mel_coeffs) + ".csv"; }

namespace {

struct Options {
    std::string config;
    std::uint64_t seed = kDefaultSeed;
    std::size_t jobs = 1;
    std::vector<std::string> sets;
    std::string mel;
    bool allow_skips = false;
    std::string manifest, out, features, learner, model, trace, split = "validation", audit, cache, wav, save_model;
    std::vector<std::string> traces;
    std::string learners = "svm,tree,bagging,adaboost_m1";
    std::size_t k = 0;
    std::size_t max_features = 80;
};

void require_artifact(const fs::path& p, std::string_view what) {
    if (!fs::exists(p)) throw Error(Errc::MissingArtifact, "missing " + std::string(what) + ": " + p.string());
}

mfcc::MfccConfig config_for(const mfcc::MfccConfig& base, std::size_t mel_coeffs) {
    auto c = base;
    c.num_coeffs = mel_coeffs;
    return c;
}

learners::LearnerSpec learner_spec(const Settings& s, std::string_view name) {
    const auto kind = learners::parse_model_kind(name);
    if (!kind)
        throw Error(Errc::InvalidConfig,
                    "unknown learner '" + std::string(name) + "' (svm, tree, bagging, adaboost_m1)");
    auto spec = s.learners;
    spec.kind = *kind;
    return spec;
}

std::vector<learners::LearnerSpec> learner_list(const Settings& s, std::string_view names) {
    std::vector<learners::LearnerSpec> out;
    for (const auto& n : text::split_csv(names))
        if (!text::trim(n).empty()) out.push_back(learner_spec(s, text::trim(n)));
    if (out.empty()) throw Error(Errc::InvalidConfig, "no learners named");
    return out;
}

struct LoadedTable {
    corpus::FeatureTable table;
    mfcc::MfccConfig mfcc;
    std::string digest;
};

LoadedTable load_features(const fs::path& p) {
    require_artifact(p, "feature table");
    LoadedTable t;
    t.table = corpus::read_feature_table(p);
    const auto d = t.table.metadata.find("config_digest");
    const auto c = t.table.metadata.find("mfcc_config");
    if (d == t.table.metadata.end() || c == t.table.metadata.end())
        throw Error(Errc::ConfigDigestMismatch, p.string() + " carries no extraction provenance");
    try {
        json::parse(c->second).get_to(t.mfcc);
    } catch (const json::exception&) {
        throw Error(Errc::ConfigDigestMismatch, p.string() + " has an unreadable mfcc_config");
    }
    if (mfcc::config_digest(t.mfcc) != d->second)
        throw Error(Errc::ConfigDigestMismatch, p.string() + ": config_digest does not match its mfcc_config");
    if (t.mfcc.num_coeffs != static_cast<std::size_t>(t.table.mel_coeff_count))
        throw Error(Errc::ConfigDigestMismatch, p.string() + ": mfcc_config disagrees with mel_coeff_count");
    t.digest = d->second;
    return t;
}

learners::TrainedModel load_model_checked(const fs::path& p) {
    require_artifact(p, "model");
    return learners::load_model(p);
}

selection::SelectionTrace load_trace_checked(const fs::path& p) {
    require_artifact(p, "selection trace");
    return selection::load_trace(p);
}

void check_same_features(std::string_view artifact, const std::string& artifact_digest, const LoadedTable& t,
                         std::string_view table_path) {
    if (artifact_digest != t.digest)
        throw Error(Errc::ConfigDigestMismatch, std::string(artifact) + " was built on features with digest " +
                                                    artifact_digest + ", but " + std::string(table_path) +
                                                    " has digest " + t.digest);
}

std::string clip_id_for(const fs::path& clip, const fs::path& base_dir) {
    const auto abs = fs::absolute(clip).lexically_normal();
    const auto rel = abs.lexically_relative(base_dir);
    if (rel.empty() || *rel.begin() == "..") return abs.generic_string();
    return rel.generic_string();
}

struct Extraction {
    std::map<std::size_t, corpus::FeatureTable> tables;
    std::vector<std::pair<std::string, std::string>> failures;  // clip_id, message
};

Extraction extract_tables(const fs::path& manifest_path, const Settings& s, const std::vector<std::size_t>& mels,
                          std::ostream& err) {
    require_artifact(manifest_path, "manifest");
    const auto manifest = corpus::load_manifest(manifest_path);
    if (manifest.entries.empty()) throw Error(Errc::EmptyData, "manifest lists no clips");
    for (auto m : mels) config_for(s.mfcc, m).validate();
    const auto cfg_max = config_for(s.mfcc, *std::max_element(mels.begin(), mels.end()));
    const auto base_dir = fs::absolute(manifest_path).lexically_normal().parent_path();

    struct ClipResult {
        std::vector<std::vector<double>> per_m;
        std::string error;
        int original_rate = 0;
        bool resampled = false;
    };
    std::vector<ClipResult> results(manifest.entries.size());
    parallel_for(results.size(), s.jobs, [&](std::size_t i) {
        auto& r = results[i];
        try {
            const auto signal = corpus::decode_wav(manifest.entries[i].path);
            const auto clip = corpus::validate_clip(signal, cfg_max.expected_rate);
            r.original_rate = signal.sample_rate;
            r.resampled = clip.resampled;
            const auto coeffs = mfcc::compute_mfcc(clip.signal, cfg_max);
            for (auto m : mels) r.per_m.push_back(features::feature_vector(coeffs.leading_rows(m)));
        } catch (const std::exception& e) {
            r.per_m.clear();
            r.error = e.what();
        }
    });

    Extraction ex;
    const auto manifest_digest = text::digest_hex(text::read_file(manifest_path));
    std::size_t failed = 0;
    for (const auto& r : results) failed += !r.error.empty();
    for (std::size_t j = 0; j < mels.size(); ++j) {
        const auto cfg = config_for(s.mfcc, mels[j]);
        auto& t = ex.tables[mels[j]];
        t.mel_coeff_count = static_cast<int>(mels[j]);
        t.feature_names = features::feature_names(mels[j]);
        t.metadata["config_digest"] = mfcc::config_digest(cfg);
        t.metadata["mfcc_config"] = json(cfg).dump();
        t.metadata["manifest_digest"] = manifest_digest;
        t.metadata["skipped_clips"] = std::to_string(failed);
    }
    for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& entry = manifest.entries[i];
        const auto id = clip_id_for(entry.path, base_dir);
        const auto& r = results[i];
        if (!r.error.empty()) {
            ex.failures.emplace_back(id, r.error);
            continue;
        }
        if (r.resampled)
            err << "warning: " << id << " resampled from " << r.original_rate << " Hz to " << cfg_max.expected_rate
                << " Hz\n";
        for (std::size_t j = 0; j < mels.size(); ++j)
            ex.tables[mels[j]].rows.push_back({id, entry.label, entry.split, r.per_m[j]});
    }
    return ex;
}

// Writes the error sidecar; returns false when failures should stop the run.
bool report_failures(const Extraction& ex, const fs::path& dir, bool allow_skips, std::ostream& err) {
    std::string sidecar = "clip_id,error\n";
    for (const auto& [id, msg] : ex.failures) sidecar += text::quote_csv(id) + "," + text::quote_csv(msg) + "\n";
    const auto path = dir / "extract_errors.csv";
    text::write_file(path, sidecar);
    if (ex.failures.empty()) return true;
    err << ex.failures.size() << " clip(s) failed to decode or extract; listed in " << path.string() << "\n";
    if (!allow_skips) {
        err << "rerun with --allow-skips to accept the remaining clips\n";
        return false;
    }
    return true;
}

evaluation::AuditLog make_audit(const std::string& path) {
    return path.empty() ? evaluation::AuditLog{} : evaluation::AuditLog{path};
}

int cmd_extract(const Options& o, const Settings& s, std::ostream& out, std::ostream& err) {
    const auto mels = s.mel.empty() ? std::vector<std::size_t>{23} : s.mel;
    const auto ex = extract_tables(o.manifest, s, mels, err);
    const fs::path dir = o.out.empty() ? fs::path(".") : fs::path(o.out);
    for (const auto& [m, table] : ex.tables) {
        const auto path = dir / feature_table_name(m);
        corpus::write_feature_table(table, path);
        out << "wrote " << path.string() << " (" << table.rows.size() << " clips, " << table.feature_names.size()
            << " features)\n";
    }
    return report_failures(ex, dir, s.allow_skips, err) ? Success : DataError;
}

int cmd_train(const Options& o, const Settings& s, std::ostream& out) {
    const auto ft = load_features(o.features);
    auto audit = make_audit(o.audit);
    const auto train = evaluation::read_split(ft.table, Split::Train, "train", &audit);
    learners::LearnerSpec spec;
    std::vector<std::size_t> selected;
    if (!o.trace.empty()) {
        const auto trace = load_trace_checked(o.trace);
        check_same_features("trace " + o.trace, trace.config_digest, ft, o.features);
        selected = trace.selected(o.k ? o.k : trace.best_k());
        spec = o.learner.empty() ? trace.learner : learner_spec(s, o.learner);
    } else {
        if (o.learner.empty()) throw Error(Errc::InvalidConfig, "train needs --learner or --trace");
        if (o.k) throw Error(Errc::InvalidConfig, "--k needs --trace");
        spec = learner_spec(s, o.learner);
    }
    const auto model = learners::train_model(spec, train, selected, ft.mfcc, s.jobs);
    learners::save_model(model, o.out);
    out << "wrote " << o.out << " (" << learners::to_string(model.kind()) << ", " << model.selected_features.size()
        << " features, " << train.size() << " training clips)\n";
    return Success;
}

int cmd_select(const Options& o, const Settings& s, std::ostream& out) {
    const auto ft = load_features(o.features);
    auto audit = make_audit(o.audit);
    const auto train = evaluation::read_split(ft.table, Split::Train, "select", &audit);
    const auto val = evaluation::read_split(ft.table, Split::Validation, "select", &audit);
    auto trace = selection::sfs(train, val, learner_spec(s, o.learner), o.max_features, s.jobs);
    trace.config_digest = ft.digest;
    selection::save_trace(trace, o.out);
    out << "wrote " << o.out << " (best k=" << trace.best_k() << ", validation accuracy "
        << text::format_real(trace.best_accuracy()) << ")\n";
    return Success;
}

int cmd_evaluate(const Options& o, const Settings& s, std::ostream& out) {
    const auto ft = load_features(o.features);
    const auto split = parse_split(o.split);
    if (!split) throw Error(Errc::InvalidConfig, "--split must be train, validation or test");
    auto audit = make_audit(o.audit);

    learners::TrainedModel model;
    if (!o.model.empty()) {
        model = load_model_checked(o.model);
        check_same_features("model " + o.model, model.feature_digest(), ft, o.features);
    } else if (!o.trace.empty()) {
        const auto trace = load_trace_checked(o.trace);
        check_same_features("trace " + o.trace, trace.config_digest, ft, o.features);
        const auto train = evaluation::read_split(ft.table, Split::Train, "evaluate:fit", &audit);
        model = learners::train_model(trace.learner, train, trace.selected(o.k ? o.k : trace.best_k()), ft.mfcc,
                                      s.jobs);
        if (!o.save_model.empty()) learners::save_model(model, o.save_model);
    } else {
        throw Error(Errc::InvalidConfig, "evaluate needs --model or --trace");
    }
    if (model.raw_feature_count != ft.table.feature_names.size())
        throw Error(Errc::ConfigDigestMismatch, "model expects " + std::to_string(model.raw_feature_count) +
                                                    " raw features, table has " +
                                                    std::to_string(ft.table.feature_names.size()));

    evaluation::EvalReport report;
    if (*split == Split::Test) {
        report = evaluation::final_test(std::span(&model, 1), ft.table, &audit).front().report;
    } else {
        report = evaluation::evaluate(model, evaluation::read_split(ft.table, *split, "evaluate", &audit));
    }
    const std::string learner(learners::to_string(model.kind()));
    out << evaluation::format_report(learner + " on " + std::string(to_string(*split)) + " (" +
                                         std::to_string(model.selected_features.size()) + " features)",
                                     report);
    if (!o.out.empty())
        text::write_file(o.out, evaluation::report_csv_header() +
                                    evaluation::report_csv_row(learner, to_string(*split), report));
    return Success;
}

int cmd_predict(const Options& o, std::ostream& out, std::ostream& err) {
    const auto model = load_model_checked(o.model);
    require_artifact(o.wav, "audio clip");
    const auto signal = corpus::decode_wav(fs::path(o.wav));
    const auto clip = corpus::validate_clip(signal, model.mel_config.expected_rate);
    if (clip.resampled)
        err << "warning: resampled from " << signal.sample_rate << " Hz to " << model.mel_config.expected_rate
            << " Hz\n";
    const auto coeffs = mfcc::compute_mfcc(clip.signal, model.mel_config);
    const auto p = learners::predict(model, features::feature_vector(coeffs));
    out << to_string(p.label) << ' ' << text::format_real(p.score) << '\n';
    return Success;
}

void print_chosen(const evaluation::SweepReport& report, std::ostream& out) {
    const auto chosen = report.chosen();
    for (std::size_t l = 0; l < chosen.size(); ++l)
        out << report.learners[l] << ": best " << report.axis_name << "=" << chosen[l].axis_value << " accuracy "
            << text::format_real(chosen[l].accuracy) << "\n";
}

int cmd_sweep_mel(const Options& o, const Settings& s, std::ostream& out, std::ostream& err) {
    auto mels = s.mel;
    if (mels.empty())
        for (std::size_t m = 2; m <= 39; ++m) mels.push_back(m);
    const auto specs = learner_list(s, o.learners);
    const fs::path cache = o.cache.empty() ? fs::path(".") : fs::path(o.cache);

    std::map<std::size_t, corpus::FeatureTable> tables;
    std::vector<std::size_t> missing;
    for (auto m : mels) {
        const auto path = cache / feature_table_name(m);
        if (!fs::exists(path)) {
            missing.push_back(m);
            continue;
        }
        auto loaded = load_features(path);
        const auto expected = mfcc::config_digest(config_for(s.mfcc, m));
        if (loaded.digest != expected)
            throw Error(Errc::ConfigDigestMismatch, "cached " + path.string() + " has digest " + loaded.digest +
                                                        ", current settings give " + expected);
        tables.emplace(m, std::move(loaded.table));
    }
    if (!missing.empty()) {
        if (o.manifest.empty())
            throw Error(Errc::MissingArtifact,
                        "missing feature table: " + (cache / feature_table_name(missing.front())).string() +
                            " (pass --manifest to extract it)");
        auto ex = extract_tables(o.manifest, s, missing, err);
        for (auto& [m, table] : ex.tables) corpus::write_feature_table(table, cache / feature_table_name(m));
        if (!report_failures(ex, cache, s.allow_skips, err)) return DataError;
        for (auto& [m, table] : ex.tables) tables.emplace(m, std::move(table));
    }

    auto audit = make_audit(o.audit);
    const auto report = evaluation::sweep_mel(
        mels, [&](std::size_t m) { return tables.at(m); }, specs, &audit, s.jobs);
    text::write_file(o.out, evaluation::sweep_to_csv(report));
    out << "wrote " << o.out << "\n";
    print_chosen(report, out);
    return Success;
}

int cmd_sweep_sfs(const Options& o, std::ostream& out) {
    std::vector<selection::SelectionTrace> traces;
    for (const auto& p : o.traces) traces.push_back(load_trace_checked(p));
    for (std::size_t i = 1; i < traces.size(); ++i)
        if (traces[i].config_digest != traces[0].config_digest)
            throw Error(Errc::ConfigDigestMismatch,
                        "traces " + o.traces[0] + " and " + o.traces[i] + " come from different feature tables");
    const auto report = evaluation::sweep_sfs(traces);
    text::write_file(o.out, evaluation::sweep_to_csv(report));
    out << "wrote " << o.out << "\n";
    print_chosen(report, out);
    return Success;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Cough and sneeze clip classification: MFCC statistics, feature selection, SVM and tree ensembles"};
    app.name("respire");
    app.require_subcommand(1);
    app.fallthrough();

    Options o;
    app.add_option("--config", o.config, "TOML settings file");
    auto* seed_opt = app.add_option("--seed", o.seed, "seed for bagging bootstraps (default 61080, env RESPIRE_SEED)");
    auto* jobs_opt = app.add_option("--jobs", o.jobs, "worker threads (0 = all cores)");
    app.add_option("--set", o.sets, "override one setting, e.g. --set mfcc.hop=256");

    auto* extract = app.add_subcommand("extract", "decode clips and write one feature table per Mel count");
    extract->add_option("--manifest", o.manifest, "manifest CSV (path,label,split)")->required();
    extract->add_option("--out", o.out, "output directory");
    auto* extract_mel = extract->add_option("--mel", o.mel, "Mel coefficient counts: 23, 2..39 or 13,23");
    extract->add_flag("--allow-skips", o.allow_skips, "succeed even when some clips fail");

    auto* train = app.add_subcommand("train", "train one learner on the training split");
    train->add_option("--features", o.features, "feature table")->required();
    train->add_option("--learner", o.learner, "svm, tree, bagging or adaboost_m1");
    train->add_option("--trace", o.trace, "selection trace; trains on its first k features");
    train->add_option("--k", o.k, "feature count taken from the trace (default: its best)");
    train->add_option("--out", o.out, "model file")->required();
    train->add_option("--audit", o.audit, "append split reads to this log");

    auto* select = app.add_subcommand("select", "sequential forward selection on the validation split");
    select->add_option("--features", o.features, "feature table")->required();
    select->add_option("--learner", o.learner, "svm, tree, bagging or adaboost_m1")->required();
    select->add_option("--max", o.max_features, "largest subset size (default 80)");
    select->add_option("--out", o.out, "trace file")->required();
    select->add_option("--audit", o.audit, "append split reads to this log");

    auto* evaluate = app.add_subcommand("evaluate", "accuracy and per-class sensitivity on one split");
    evaluate->add_option("--features", o.features, "feature table")->required();
    evaluate->add_option("--model", o.model, "model file");
    evaluate->add_option("--trace", o.trace, "selection trace to train from instead of --model");
    evaluate->add_option("--k", o.k, "feature count taken from the trace (default: its best)");
    evaluate->add_option("--save-model", o.save_model, "keep the model trained from --trace");
    evaluate->add_option("--split", o.split, "train, validation or test (default validation)");
    evaluate->add_option("--out", o.out, "report CSV");
    evaluate->add_option("--audit", o.audit, "append split reads to this log");

    auto* predict = app.add_subcommand("predict", "classify one WAV clip");
    predict->add_option("--model", o.model, "model file")->required();
    predict->add_option("wav", o.wav, "WAV file")->required();

    auto* sweep_mel = app.add_subcommand("sweep-mel", "validation accuracy against Mel coefficient count");
    sweep_mel->add_option("--manifest", o.manifest, "manifest used to fill missing cached tables");
    sweep_mel->add_option("--cache", o.cache, "feature table directory");
    auto* sweep_mel_opt = sweep_mel->add_option("--mel", o.mel, "Mel counts (default 2..39)");
    sweep_mel->add_option("--learners", o.learners, "comma-separated learners (default all four)");
    sweep_mel->add_option("--out", o.out, "sweep CSV")->required();
    sweep_mel->add_option("--audit", o.audit, "append split reads to this log");
    sweep_mel->add_flag("--allow-skips", o.allow_skips, "succeed even when some clips fail");

    auto* sweep_sfs = app.add_subcommand("sweep-sfs", "validation accuracy against selected feature count");
    sweep_sfs->add_option("--trace", o.traces, "selection traces, one per learner")->required();
    sweep_sfs->add_option("--out", o.out, "sweep CSV")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return e.get_exit_code() == 0 ? Success : Usage;
    }

    try {
        Settings s;
        if (!o.config.empty()) apply_config_file(s, o.config);
        if (const char* env = std::getenv("RESPIRE_SEED"); env && *env) apply_setting(s, "seed", env);
        for (const auto& kv : o.sets) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw Error(Errc::InvalidConfig, "--set expects key=value, got '" + kv + "'");
            apply_setting(s, text::trim(std::string_view(kv).substr(0, eq)), std::string_view(kv).substr(eq + 1));
        }
        if (seed_opt->count()) s.seed = o.seed;
        if (jobs_opt->count()) s.jobs = o.jobs;
        if (extract_mel->count() || sweep_mel_opt->count()) s.mel = parse_mel_list(o.mel);
        if (o.allow_skips) s.allow_skips = true;
        if (s.jobs == 0) s.jobs = std::max(1u, std::thread::hardware_concurrency());
        s.learners.bagging.seed = s.seed;

        if (extract->parsed()) return cmd_extract(o, s, out, err);
        if (train->parsed()) return cmd_train(o, s, out);
        if (select->parsed()) return cmd_select(o, s, out);
        if (evaluate->parsed()) return cmd_evaluate(o, s, out);
        if (predict->parsed()) return cmd_predict(o, out, err);
        if (sweep_mel->parsed()) return cmd_sweep_mel(o, s, out, err);
        if (sweep_sfs->parsed()) return cmd_sweep_sfs(o, out);
        return Usage;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return DataError;
    }
}

int run(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, std::cout, std::cerr);
}

}  // namespace respire::cli
