#include "respire/ensemble.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "respire/error.hpp"
#include "respire/parallel.hpp"

namespace respire::learners {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Uniform in [0, bound) by rejection, independent of the standard library's
// distribution implementations.
std::size_t draw_below(std::mt19937_64& rng, std::size_t bound) {
    const std::uint64_t b = bound;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % b;
    std::uint64_t r;
    do {
        r = rng();
    } while (r >= limit);
    return static_cast<std::size_t>(r % b);
}

double patient_share(std::span<const Label> y) {
    std::size_t p = 0;
    for (Label l : y) p += l == Label::Patient;
    return y.empty() ? 0.5 : static_cast<double>(p) / static_cast<double>(y.size());
}

}  // namespace

std::vector<std::size_t> bootstrap_indices(std::uint64_t seed, std::size_t member, std::size_t n) {
    std::mt19937_64 rng(splitmix64(splitmix64(seed) ^ (0xd1b54a32d192ed03ULL * (member + 1))));
    std::vector<std::size_t> idx(n);
    for (auto& i : idx) i = draw_below(rng, n);
    return idx;
}

EnsembleModel train_bagging(const Matrix& x, std::span<const Label> y, const BaggingConfig& cfg, std::size_t jobs) {
    const std::size_t n = x.rows();
    if (n == 0) throw Error(Errc::EmptyData, "no training rows for bagging");
    if (y.size() != n) throw Error(Errc::DimensionMismatch, "labels and rows differ in count");
    if (cfg.n_learners == 0) throw Error(Errc::InvalidConfig, "bagging needs at least one learner");

    EnsembleModel model;
    model.kind = EnsembleKind::Bagging;
    model.rng_seed = cfg.seed;
    model.patient_prior = patient_share(y);
    model.members.resize(cfg.n_learners);
    model.member_weights.assign(cfg.n_learners, 1.0);

    parallel_for(cfg.n_learners, jobs, [&](std::size_t t) {
        const auto idx = bootstrap_indices(cfg.seed, t, n);
        const Matrix xs = x.select_rows(idx);
        std::vector<Label> ys(n);
        for (std::size_t i = 0; i < n; ++i) ys[i] = y[idx[i]];
        auto tree = train_tree(xs, ys, cfg.tree);
        tree.dimension = x.cols();
        model.members[t] = std::move(tree);
    });
    return model;
}

double adaboost_beta(double error) { return std::max(error / (1.0 - error), kMinBeta); }

double adaboost_member_weight(double error) { return std::log(1.0 / adaboost_beta(error)); }

EnsembleModel train_adaboost_m1(const Matrix& x, std::span<const Label> y, const AdaBoostConfig& cfg,
                                AdaBoostLog* log) {
    const std::size_t n = x.rows();
    if (n == 0) throw Error(Errc::EmptyData, "no training rows for AdaBoost.M1");
    if (y.size() != n) throw Error(Errc::DimensionMismatch, "labels and rows differ in count");
    const double prior = patient_share(y);
    if (prior == 0.0 || prior == 1.0) throw Error(Errc::SingleClassData, "AdaBoost.M1 needs both classes");
    if (cfg.rounds == 0) throw Error(Errc::InvalidConfig, "AdaBoost.M1 needs at least one round");

    EnsembleModel model;
    model.kind = EnsembleKind::AdaBoostM1;
    model.patient_prior = prior;

    std::vector<double> w(n, 1.0 / static_cast<double>(n));
    if (log) log->initial_weights = w;

    std::vector<char> correct(n);
    for (std::size_t t = 0; t < cfg.rounds; ++t) {
        auto tree = train_tree(x, y, cfg.tree, w);
        double error = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            correct[i] = predict_tree(tree, x.row(i)) == y[i];
            if (!correct[i]) error += w[i];
        }

        AdaBoostRound round;
        round.error = error;
        if (error >= 0.5) {
            if (model.members.empty()) {
                model.members.push_back(std::move(tree));
                model.member_weights.push_back(1.0);
                round.accepted = true;
                round.member_weight = 1.0;
            }
            round.weight_sum = 1.0;
            if (log) log->rounds.push_back(round);
            break;
        }

        const double beta = adaboost_beta(error);
        round.accepted = true;
        round.member_weight = std::log(1.0 / beta);
        model.members.push_back(std::move(tree));
        model.member_weights.push_back(round.member_weight);

        if (error == 0.0) {
            round.weight_sum = 1.0;
            if (log) log->rounds.push_back(round);
            break;
        }

        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (correct[i]) w[i] *= beta;
            total += w[i];
        }
        double renormalized = 0.0;
        for (auto& v : w) {
            v /= total;
            renormalized += v;
        }
        round.weight_sum = renormalized;
        if (log) log->rounds.push_back(round);
    }
    return model;
}

EnsemblePrediction predict_ensemble(const EnsembleModel& model, std::span<const double> x) {
    if (model.members.empty()) throw Error(Errc::CorruptModel, "ensemble has no members");
    double patient = 0.0, non_patient = 0.0;
    for (std::size_t t = 0; t < model.members.size(); ++t)
        (predict_tree(model.members[t], x) == Label::Patient ? patient : non_patient) += model.member_weights[t];
    const double total = patient + non_patient;

    Label label;
    if (patient > non_patient) label = Label::Patient;
    else if (non_patient > patient) label = Label::NonPatient;
    else label = model.patient_prior < 0.5 ? Label::NonPatient : Label::Patient;
    const double margin = total > 0.0 ? std::abs(patient - non_patient) / total : 0.0;
    return {label, margin};
}

}  // namespace respire::learners
