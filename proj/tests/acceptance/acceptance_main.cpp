// One line per acceptance criterion: PASS, FAIL or SKIP, with wall time.
// Exit status is nonzero when any criterion fails or overruns its budget.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "respire/cli.hpp"
#include "respire/ensemble.hpp"
#include "respire/evaluation.hpp"
#include "respire/features.hpp"
#include "respire/mfcc.hpp"
#include "respire/selection.hpp"
#include "respire/svm.hpp"
#include "respire/tree.hpp"

using namespace respire;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    enum Kind { Pass, Fail, Skip } kind = Pass;
    std::string note;
};

Outcome fail(std::string why) { return {Outcome::Fail, std::move(why)}; }

#define EXPECT(cond)                                                   \
    do {                                                               \
        if (!(cond)) return fail(#cond " at line " + std::to_string(__LINE__)); \
    } while (0)

Outcome hamming() {
    for (std::size_t n : {2u, 3u, 256u, 2048u}) {
        const auto w = mfcc::hamming_window(n).weights;
        EXPECT(std::abs(w.front() - 0.08) <= 1e-12);
        EXPECT(std::abs(w.back() - 0.08) <= 1e-12);
        for (std::size_t i = 0; i < n; ++i) EXPECT(std::abs(w[i] - w[n - 1 - i]) <= 1e-12);
        if (n % 2) EXPECT(std::abs(w[n / 2] - 1.0) <= 1e-12);
    }
    return {};
}

Outcome mel_scale() {
    EXPECT(mfcc::hz_to_mel(0.0) == 0.0);
    const double ref = oracle::mel(1000.0);
    EXPECT(std::abs(mfcc::hz_to_mel(1000.0) - ref) <= 1e-9 * ref);
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> u(0.0, 22050.0);
    for (int i = 0; i < 1000; ++i) {
        const double hz = u(rng);
        EXPECT(std::abs(mfcc::mel_to_hz(mfcc::hz_to_mel(hz)) - hz) <= 1e-6);
    }
    return {};
}

Outcome rbf() {
    const std::vector<double> a{0.5, -2.0}, b{1.5, -1.0};
    EXPECT(std::abs(learners::rbf_kernel(a, a, 1.0) - 1.0) <= 1e-12);
    EXPECT(std::abs(learners::rbf_kernel(a, b, 1.0) - learners::rbf_kernel(b, a, 1.0)) <= 1e-12);
    EXPECT(std::abs(learners::rbf_kernel(a, b, 1.0) - std::exp(-1.0)) <= 1e-12);
    return {};
}

Outcome mfcc_oracle() {
    mfcc::MfccConfig c;
    c.frame_length = c.hop = c.fft_size = 64;
    c.num_filters = 6;
    c.num_coeffs = 5;
    c.expected_rate = 8000;
    std::mt19937 rng(8);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int trial = 0; trial < 20; ++trial) {
        corpus::Signal s{std::vector<double>(64), 8000};
        for (auto& v : s.samples) v = u(rng);
        const auto m = mfcc::compute_mfcc(s, c);
        EXPECT(m.frames() == 1);
        std::vector<double> got(m.coeffs());
        for (std::size_t k = 0; k < got.size(); ++k) got[k] = m(k, 0);
        EXPECT(oracle::rel_error(got, oracle::mfcc_frame(s.samples, c, 8000)) <= 1e-9);
    }
    return {};
}

Outcome frame_count() {
    std::mt19937 rng(2);
    for (int i = 0; i < 1000; ++i) {
        const std::size_t len = rng() % 5000, frame = 1 + rng() % 600, hop = 1 + rng() % 300;
        EXPECT(mfcc::frame_count(len, frame, hop) == oracle::frame_count(len, frame, hop));
    }
    return {};
}

Outcome feature_layout() {
    const auto names = features::feature_names(23);
    EXPECT(names.size() == 161);
    const features::Statistic order[] = {features::Statistic::Mean,     features::Statistic::Sd,
                                         features::Statistic::Rms,      features::Statistic::Entropy,
                                         features::Statistic::Kurtosis, features::Statistic::Skewness,
                                         features::Statistic::Variance};
    for (std::size_t j = 0; j < 161; ++j) {
        char expect[8];
        std::snprintf(expect, sizeof expect, "f%03zu", j + 1);
        EXPECT(names[j] == expect);
        const auto d = features::describe_feature(j);
        EXPECT(d.coeff == j / 7 + 1);
        EXPECT(d.statistic == order[j % 7]);
    }
    return {};
}

Outcome svm_xor() {
    std::mt19937 rng(4);
    std::uniform_real_distribution<double> jitter(-0.05, 0.05);
    const double pts[4][2] = {{0, 0}, {1, 1}, {0, 1}, {1, 0}};
    Matrix x(0, 2);
    std::vector<Label> y;
    for (int c = 0; c < 25; ++c)
        for (int p = 0; p < 4; ++p) {
            x.push_row(std::vector<double>{pts[p][0] + jitter(rng), pts[p][1] + jitter(rng)});
            y.push_back(p < 2 ? Label::NonPatient : Label::Patient);
        }
    learners::SvmConfig cfg;
    const auto t = learners::train_svm(x, y, cfg);
    for (std::size_t i = 0; i < x.rows(); ++i) EXPECT(learners::predict_svm(t.model, x.row(i)).label == y[i]);
    double eq = 0.0;
    for (std::size_t i = 0; i < t.alpha.size(); ++i) {
        EXPECT(t.alpha[i] >= 0.0 && t.alpha[i] <= cfg.C);
        eq += t.alpha[i] * t.y[i];
    }
    EXPECT(std::abs(eq) <= 1e-6);
    EXPECT(oracle::kkt_violation(x, t, cfg.C, cfg.sigma) <= 1e-3);
    return {};
}

Outcome tree_oracle() {
    EXPECT(learners::gini_impurity(std::vector<double>{10, 0}) == 0.0);
    EXPECT(learners::gini_impurity(std::vector<double>{5, 5}) == 0.5);
    EXPECT(learners::gini_impurity(std::vector<double>{3, 1}) == 0.375);
    std::mt19937 rng(30);
    for (int trial = 0; trial < 50; ++trial) {
        const auto x = fixture::uniform_matrix(30, 4, rng);
        const auto y = fixture::random_labels(30, rng);
        const auto ref = oracle::root_split(x, y);
        std::vector<double> w(30, 1.0 / 30);
        std::vector<std::size_t> all(30);
        for (std::size_t i = 0; i < 30; ++i) all[i] = i;
        const auto got = learners::best_split(x, y, w, all, 1);
        EXPECT(ref.has_value());
        if (ref->gain <= 1e-13) continue;  // nothing worth splitting
        EXPECT(got.has_value());
        EXPECT(got->feature == ref->feature);
        EXPECT(got->threshold == ref->threshold);
        EXPECT(std::abs(got->gain - ref->gain) <= 1e-12);
    }
    return {};
}

Outcome adaboost() {
    EXPECT(std::abs(learners::adaboost_member_weight(0.3) - std::log(7.0 / 3.0)) <= 1e-12);
    const auto rows = fixture::xor_points(200, 8, 0.7);
    learners::AdaBoostConfig cfg;
    cfg.rounds = 50;
    cfg.tree = learners::TreeConfig{3, 1};
    learners::AdaBoostLog log;
    learners::train_adaboost_m1(rows.x, rows.y, cfg, &log);
    EXPECT(!log.rounds.empty());
    for (const auto& r : log.rounds) {
        EXPECT(std::abs(r.weight_sum - 1.0) <= 1e-12);
        if (r.accepted) EXPECT(r.error < 0.5);
    }
    return {};
}

Outcome bagging() {
    const auto rows = fixture::xor_points(150, 9, 0.6);
    learners::BaggingConfig cfg;
    cfg.n_learners = 20;
    cfg.seed = cli::kDefaultSeed;
    const auto a = learners::train_bagging(rows.x, rows.y, cfg);
    const auto b = learners::train_bagging(rows.x, rows.y, cfg);
    EXPECT(a == b);
    double total = 0.0;
    for (std::size_t m = 0; m < 100; ++m) {
        const auto idx = learners::bootstrap_indices(cli::kDefaultSeed, m, 1000);
        total += static_cast<double>(std::set<std::size_t>(idx.begin(), idx.end()).size()) / 1000.0;
    }
    EXPECT(std::abs(total / 100.0 - 0.632) <= 0.03);
    return {};
}

LabeledRows sfs_rows(std::size_t n, Split split, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1, 1);
    LabeledRows out;
    out.x = Matrix(n, 6);
    for (std::size_t r = 0; r < n; ++r) {
        const bool pat = r % 2 == 0;
        for (std::size_t c = 0; c < 6; ++c) out.x(r, c) = u(rng);
        out.x(r, 1) = (pat ? 0.6 : -0.6) + 0.8 * u(rng);
        out.x(r, 4) = (pat ? 0.3 : -0.3) + 0.8 * u(rng);
        out.y.push_back(pat ? Label::Patient : Label::NonPatient);
        out.splits.push_back(split);
    }
    return out;
}

double score(const learners::LearnerSpec& spec, const LabeledRows& train, const LabeledRows& val,
             const std::vector<std::size_t>& cols) {
    // Independent of subset_accuracy: standardize by hand, call the tree directly.
    Matrix zt(train.size(), cols.size()), zv(val.size(), cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) {
        double mean = 0, var = 0;
        for (std::size_t r = 0; r < train.size(); ++r) mean += train.x(r, cols[j]);
        mean /= static_cast<double>(train.size());
        for (std::size_t r = 0; r < train.size(); ++r) var += std::pow(train.x(r, cols[j]) - mean, 2);
        double sd = std::sqrt(var / static_cast<double>(train.size()));
        if (sd == 0) sd = 1;
        for (std::size_t r = 0; r < train.size(); ++r) zt(r, j) = (train.x(r, cols[j]) - mean) / sd;
        for (std::size_t r = 0; r < val.size(); ++r) zv(r, j) = (val.x(r, cols[j]) - mean) / sd;
    }
    const auto tree = learners::train_tree(zt, train.y, spec.tree);
    std::size_t ok = 0;
    for (std::size_t r = 0; r < val.size(); ++r) ok += learners::predict_tree(tree, zv.row(r)) == val.y[r];
    return static_cast<double>(ok) / static_cast<double>(val.size());
}

Outcome sfs_oracle() {
    const auto train = sfs_rows(60, Split::Train, 11);
    const auto val = sfs_rows(40, Split::Validation, 12);
    learners::LearnerSpec spec;
    spec.kind = learners::ModelKind::Tree;
    spec.tree.max_splits = 3;
    const auto trace = selection::sfs(train, val, spec, 6);
    EXPECT(trace.steps.size() == 6);

    std::vector<std::size_t> prefix;
    std::set<std::size_t> seen;
    for (std::size_t step = 0; step < trace.steps.size(); ++step) {
        std::size_t best = 0;
        double best_acc = -1;
        for (std::size_t f = 0; f < 6; ++f) {
            if (seen.count(f)) continue;
            auto cols = prefix;
            cols.push_back(f);
            const double a = score(spec, train, val, cols);
            if (a > best_acc) best_acc = a, best = f;
        }
        EXPECT(trace.steps[step].validation_accuracy == best_acc);
        if (step < 2) EXPECT(trace.steps[step].feature == best);
        EXPECT(seen.insert(trace.steps[step].feature).second);
        prefix.push_back(trace.steps[step].feature);
    }
    return {};
}

Outcome metrics() {
    std::mt19937 rng(90);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + rng() % 300;
        const auto truth = fixture::random_labels(n, rng);
        const auto pred = fixture::random_labels(n, rng);
        const auto c = oracle::count(truth, pred);
        const auto r = evaluation::make_report(truth, pred);
        EXPECT(r.tp == c.tp && r.fn == c.fn && r.fp == c.fp && r.tn == c.tn);
        EXPECT(r.accuracy == static_cast<double>(c.tp + c.tn) / static_cast<double>(n));
        if (c.tp + c.fn) EXPECT(*r.sensitivity_patient == static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn));
        else EXPECT(!r.sensitivity_patient);
        if (c.tn + c.fp)
            EXPECT(*r.sensitivity_nonpatient == static_cast<double>(c.tn) / static_cast<double>(c.tn + c.fp));
        else EXPECT(!r.sensitivity_nonpatient);
    }
    return {};
}

int quiet_run(const std::vector<std::string>& args, std::string* err_out = nullptr) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    if (err_out) *err_out = err.str();
    return code;
}

Outcome end_to_end() {
    const auto root = fixture::scratch("acceptance_e2e");
    const auto manifest = fixture::write_corpus(root, 12, 7);
    std::string artifacts[2][3];
    for (int pass = 0; pass < 2; ++pass) {
        const auto dir = root / ("run" + std::to_string(pass));
        const auto table = dir / "features_m23.csv";
        std::string err;
        if (quiet_run({"extract", "--manifest", manifest.string(), "--out", dir.string(), "--mel", "23"}, &err))
            return fail("extract: " + err);
        if (quiet_run({"train", "--features", table.string(), "--learner", "bagging", "--out",
                       (dir / "model.json").string()},
                      &err))
            return fail("train: " + err);
        if (quiet_run({"evaluate", "--features", table.string(), "--model", (dir / "model.json").string(), "--out",
                       (dir / "report.csv").string()},
                      &err))
            return fail("evaluate: " + err);
        artifacts[pass][0] = fixture::slurp(table);
        artifacts[pass][1] = fixture::slurp(dir / "model.json");
        artifacts[pass][2] = fixture::slurp(dir / "report.csv");
    }
    for (int k = 0; k < 3; ++k) {
        EXPECT(!artifacts[0][k].empty());
        EXPECT(artifacts[0][k] == artifacts[1][k]);
    }
    return {};
}

// Needs the public cough corpus; point RESPIRE_OSF_MANIFEST at its manifest.
Outcome osf_reproduction() {
    const char* manifest = std::getenv("RESPIRE_OSF_MANIFEST");
    if (!manifest || !*manifest) return {Outcome::Skip, "set RESPIRE_OSF_MANIFEST to run"};
    const auto dir = fixture::scratch("acceptance_osf");
    std::string err;
    if (quiet_run({"--jobs", "0", "extract", "--manifest", manifest, "--out", dir.string(), "--mel", "23",
                   "--allow-skips"},
                  &err))
        return fail("extract: " + err);
    const auto table = corpus::read_feature_table(dir / "features_m23.csv");
    const auto train = evaluation::read_split(table, Split::Train, "acceptance");
    const auto val = evaluation::read_split(table, Split::Validation, "acceptance");
    const auto mel = mfcc::MfccConfig{};

    learners::LearnerSpec svm;
    const auto trace = selection::sfs(train, val, svm, 74, std::max(1u, std::thread::hardware_concurrency()));
    const double val_acc = trace.steps.back().validation_accuracy;

    learners::LearnerSpec bag;
    bag.kind = learners::ModelKind::Bagging;
    bag.bagging.seed = cli::kDefaultSeed;
    const auto bag_trace = selection::sfs(train, val, bag, 74, std::max(1u, std::thread::hardware_concurrency()));
    std::vector<learners::TrainedModel> models;
    models.push_back(learners::train_model(bag, train, bag_trace.selected(74), mel));
    const auto test = evaluation::final_test(models, table);
    const double test_acc = test[0].report.accuracy;

    char note[128];
    std::snprintf(note, sizeof note, "svm validation %.4f, bagging test %.4f", val_acc, test_acc);
    if (std::abs(val_acc - 0.8318) > 0.05 || std::abs(test_acc - 0.7784) > 0.05) return fail(note);
    return {Outcome::Pass, note};
}

struct Criterion {
    const char* name;
    double budget_ms;
    std::function<Outcome()> check;
};

}  // namespace

int main() {
    const Criterion criteria[] = {
        {"hamming-window-exactness", 1000, hamming},
        {"mel-scale-exactness", 1000, mel_scale},
        {"rbf-kernel-exactness", 1000, rbf},
        {"mfcc-oracle-equivalence", 5000, mfcc_oracle},
        {"frame-count-enumeration", 1000, frame_count},
        {"feature-layout-161", 1000, feature_layout},
        {"svm-xor-dual-and-kkt", 10000, svm_xor},
        {"tree-split-oracle-and-gini", 10000, tree_oracle},
        {"adaboost-m1-weights", 5000, adaboost},
        {"bagging-determinism-and-bootstrap", 5000, bagging},
        {"sfs-oracle", 30000, sfs_oracle},
        {"metrics-identities", 1000, metrics},
        {"end-to-end-determinism", 30000, end_to_end},
        {"osf-reproduction (soft)", 0, osf_reproduction},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o = fail(std::string("exception: ") + e.what());
        }
        const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        if (o.kind == Outcome::Pass && c.budget_ms > 0 && ms > c.budget_ms) o = fail("over time budget");
        const char* tag = o.kind == Outcome::Pass ? "PASS" : o.kind == Outcome::Fail ? "FAIL" : "SKIP";
        std::printf("%s %s (%.1f ms)%s%s\n", tag, c.name, ms, o.note.empty() ? "" : " - ", o.note.c_str());
        failures += o.kind == Outcome::Fail;
    }
    return failures ? 1 : 0;
}
