#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include <nlohmann/json.hpp>

#include "vfdetect/ensemble.hpp"

using namespace vfd;

namespace {

CommitRecord labeled(const std::string& id, const std::string& message, bool label) {
    CommitRecord record;
    record.id = id;
    record.message = message;
    record.label = label;
    return record;
}

// separable-by-construction toy set over all three sources
LabeledDataset toy_training(int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<CommitRecord> records;
    for (int i = 0; i < count; ++i) {
        bool positive = i % 3 == 0;
        CommitRecord record =
            labeled("c" + std::to_string(i),
                    positive ? "fix cve overflow" : "update docs maybe", positive);
        IssueReport issue;
        issue.title = positive ? "overflow report" : "feature request";
        issue.body = positive ? "exploit cve" : "add button";
        record.issue = issue;
        FileChange change;
        change.file_path = "f.c";
        change.added_lines = {positive ? "memcpy_bound(dst, src, n);" : "log_info(x);"};
        change.removed_lines = {positive ? "memcpy(dst, src, n);" : "log_debug();"};
        record.patch.push_back(std::move(change));
        if (rng() % 7 == 0) record.message += " extra";
        records.push_back(std::move(record));
    }
    return LabeledDataset::from_records(std::move(records));
}

// independent Newton/IRLS oracle for the regularized logistic fit
LogisticModel irls_oracle(const std::vector<std::vector<double>>& X,
                          const std::vector<int>& y, double l2) {
    const std::size_t n = X.size();
    const std::size_t d = X[0].size() + 1;  // bias folded in as last coordinate
    std::vector<double> beta(d, 0.0);
    for (int iter = 0; iter < 200; ++iter) {
        std::vector<double> grad(d, 0.0);
        std::vector<std::vector<double>> hess(d, std::vector<double>(d, 0.0));
        for (std::size_t i = 0; i < n; ++i) {
            double z = beta[d - 1];
            for (std::size_t j = 0; j + 1 < d; ++j) z += beta[j] * X[i][j];
            double p = 1.0 / (1.0 + std::exp(-z));
            double r = p - y[i];
            double w = p * (1.0 - p);
            auto xj = [&](std::size_t j) { return j + 1 == d ? 1.0 : X[i][j]; };
            for (std::size_t j = 0; j < d; ++j) {
                grad[j] += r * xj(j) / n;
                for (std::size_t k = 0; k < d; ++k) {
                    hess[j][k] += w * xj(j) * xj(k) / n;
                }
            }
        }
        for (std::size_t j = 0; j + 1 < d; ++j) {
            grad[j] += l2 * beta[j];
            hess[j][j] += l2;
        }
        // solve hess * step = grad by Gaussian elimination
        std::vector<std::vector<double>> a = hess;
        std::vector<double> b = grad;
        for (std::size_t col = 0; col < d; ++col) {
            std::size_t pivot = col;
            for (std::size_t row = col + 1; row < d; ++row) {
                if (std::abs(a[row][col]) > std::abs(a[pivot][col])) pivot = row;
            }
            std::swap(a[col], a[pivot]);
            std::swap(b[col], b[pivot]);
            for (std::size_t row = col + 1; row < d; ++row) {
                double factor = a[row][col] / a[col][col];
                for (std::size_t k = col; k < d; ++k) a[row][k] -= factor * a[col][k];
                b[row] -= factor * b[col];
            }
        }
        std::vector<double> step(d);
        for (std::size_t row = d; row-- > 0;) {
            double s = b[row];
            for (std::size_t k = row + 1; k < d; ++k) s -= a[row][k] * step[k];
            step[row] = s / a[row][row];
        }
        double move = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            beta[j] -= step[j];
            move = std::max(move, std::abs(step[j]));
        }
        if (move < 1e-12) break;
    }
    LogisticModel model;
    model.weights.assign(beta.begin(), beta.end() - 1);
    model.bias = beta[d - 1];
    return model;
}

}  // namespace

TEST_CASE("score_commit: hand-checked values") {
    EnsembleModel zeros;
    zeros.trained = true;
    CHECK(score_commit(zeros, {0.9, 0.1, 0.5, false}) == doctest::Approx(0.5).epsilon(1e-12));

    EnsembleModel hand;
    hand.weights = {1.0, 1.0, 1.0};
    hand.bias = -1.5;
    // logistic(0.9 + 0.8 + 0.7 - 1.5) = logistic(0.9)
    CHECK(score_commit(hand, {0.9, 0.8, 0.7, false}) ==
          doctest::Approx(1.0 / (1.0 + std::exp(-0.9))).epsilon(1e-9));
    CHECK(score_commit(hand, {0.9, 0.8, 0.7, false}) == doctest::Approx(0.7109).epsilon(1e-4));
}

TEST_CASE("score_commit: strictly monotone in each feature with positive weights") {
    EnsembleModel model;
    model.weights = {0.5, 1.0, 2.0};
    model.bias = -1.0;
    StackedFeatures base{0.3, 0.4, 0.5, false};
    double reference = score_commit(model, base);
    for (int feature = 0; feature < 3; ++feature) {
        StackedFeatures bumped = base;
        (feature == 0 ? bumped.p_message : feature == 1 ? bumped.p_issue : bumped.p_patch) +=
            0.1;
        CHECK(score_commit(model, bumped) > reference);
    }
    CHECK(reference > 0.0);
    CHECK(reference < 1.0);
}

TEST_CASE("classify_with_threshold is strict") {
    CHECK(classify_with_threshold(0.7, 0.5));
    CHECK_FALSE(classify_with_threshold(0.5, 0.5));
    CHECK(classify_with_threshold(0.5, 0.0));
    CHECK_FALSE(classify_with_threshold(0.0, 0.0));
}

TEST_CASE("rank_commits: ordering, tie-break, permutation") {
    std::vector<ScoredCommit> scored = {{"x", 0.2, false}, {"y", 0.9, true}, {"z", 0.5, false}};
    auto ranked = rank_commits(scored);
    CHECK(ranked[0].id == "y");
    CHECK(ranked[1].id == "z");
    CHECK(ranked[2].id == "x");

    std::vector<ScoredCommit> ties = {{"b", 0.5, false}, {"a", 0.5, false}};
    auto tied = rank_commits(ties);
    CHECK(tied[0].id == "a");
    CHECK(tied[1].id == "b");

    CHECK(rank_commits({}).empty());
}

TEST_CASE("rank_commits: idempotent and a permutation of its input") {
    std::mt19937_64 rng(17);
    std::vector<ScoredCommit> scored;
    for (int i = 0; i < 40; ++i) {
        scored.push_back({"id" + std::to_string(rng() % 30),
                          static_cast<double>(rng() % 10) / 10.0, false});
    }
    auto once = rank_commits(scored);
    auto twice = rank_commits(once);
    for (std::size_t i = 0; i < once.size(); ++i) {
        CHECK(once[i].id == twice[i].id);
        CHECK(once[i].probability == twice[i].probability);
    }
    auto ids_of = [](const std::vector<ScoredCommit>& list) {
        std::multiset<std::string> ids;
        for (const auto& item : list) ids.insert(item.id);
        return ids;
    };
    CHECK(ids_of(scored) == ids_of(once));
}

TEST_CASE("fit_logistic matches the IRLS oracle to 1e-4 on a toy problem") {
    // non-separable 3-feature instance
    std::vector<std::vector<double>> X = {
        {0.9, 0.8, 0.7}, {0.2, 0.1, 0.3}, {0.8, 0.3, 0.6}, {0.4, 0.6, 0.2},
        {0.7, 0.7, 0.9}, {0.3, 0.4, 0.1}, {0.6, 0.2, 0.8}, {0.1, 0.9, 0.4},
        {0.5, 0.5, 0.5}, {0.5, 0.5, 0.5}};
    std::vector<int> y = {1, 0, 1, 0, 1, 0, 0, 1, 1, 0};

    LogisticFitOptions options;
    options.l2 = 1e-2;
    options.max_iterations = 200000;
    options.tolerance = 1e-12;
    auto fitted = fit_logistic(X, y, options);
    auto oracle = irls_oracle(X, y, 1e-2);
    for (std::size_t j = 0; j < 3; ++j) {
        CHECK(fitted.weights[j] == doctest::Approx(oracle.weights[j]).epsilon(1e-4));
    }
    CHECK(fitted.bias == doctest::Approx(oracle.bias).epsilon(1e-4));
}

TEST_CASE("train_stacker: separable base probabilities reach training accuracy 1") {
    auto data = toy_training(90, 3);
    TrainingConfig config;
    config.seed = 3;
    config.epochs = 10;
    auto ensemble = train_stacker(data, config, Backend::fallback, nullptr, 3);
    CHECK(ensemble.trained);
    CHECK(ensemble.threshold == 0.5);
    CHECK(ensemble.issue_imputation_value ==
          doctest::Approx(static_cast<double>(data.positive_count) /
                          static_cast<double>(data.records.size()))
              .epsilon(1e-12));

    // scoring the idealized features: positives at (1,1,1), negatives at (0,0,0)
    CHECK(score_commit(ensemble, {1.0, 1.0, 1.0, false}) > 0.5);
    CHECK(score_commit(ensemble, {0.0, 0.0, 0.0, false}) < 0.5);
}

TEST_CASE("train_stacker: degenerate labels and bad fold counts rejected") {
    auto data = toy_training(30, 1);
    TrainingConfig config;
    CHECK_THROWS_AS(train_stacker(data, config, Backend::fallback, nullptr, 1),
                    std::invalid_argument);

    std::vector<CommitRecord> positives;
    for (int i = 0; i < 10; ++i) positives.push_back(labeled("p" + std::to_string(i), "m", true));
    auto degenerate = LabeledDataset::from_records(std::move(positives));
    CHECK_THROWS_AS(train_stacker(degenerate, config, Backend::fallback, nullptr, 2),
                    std::runtime_error);
}

TEST_CASE("assemble_features: explicit issue wins, imputation flags recorded") {
    auto data = toy_training(90, 5);
    TrainingConfig config;
    config.seed = 5;
    config.epochs = 10;
    BaseModels models{
        train_classifier(data, Source::message, Backend::fallback, config),
        train_classifier(data, Source::issue, Backend::fallback, config),
        train_classifier(data, Source::patch, Backend::fallback, config)};

    // a linker whose single issue is unmistakably vulnerability-flavored
    std::vector<IssueReport> issues = {{"overflow report", "exploit cve", {}}};
    LinkerConfig linker_config;
    linker_config.similarity_threshold = 0.0;
    auto linker = build_linker(issues, linker_config);

    CommitRecord explicit_issue = labeled("e", "update docs maybe", false);
    explicit_issue.issue = IssueReport{"feature request", "add button", {}};
    auto features = assemble_features(explicit_issue, models, &linker, 0.25);
    CHECK_FALSE(features.issue_imputed);
    // the explicit benign issue is used, not the linker's vulnerable one
    CHECK(features.p_issue < 0.5);

    CommitRecord unlinkable = labeled("u", "", false);
    auto imputed = assemble_features(unlinkable, models, &linker, 0.25);
    CHECK(imputed.issue_imputed);
    CHECK(imputed.p_issue == 0.25);

    CommitRecord linkable = labeled("l", "fix cve overflow exploit", true);
    auto recovered = assemble_features(linkable, models, &linker, 0.25);
    CHECK_FALSE(recovered.issue_imputed);
    CHECK(recovered.p_issue > 0.5);  // scored from the linked vulnerable issue
}

TEST_CASE("ensemble JSON round trip is exact") {
    EnsembleModel model;
    model.weights = {1.25, -0.5, 3.75};
    model.bias = 0.125;
    model.threshold = 0.45;
    model.issue_imputation_value = 1.0 / 3.0;
    model.folds = 7;
    model.trained = true;
    auto restored = ensemble_from_json(ensemble_to_json(model));
    CHECK(restored.weights == model.weights);
    CHECK(restored.bias == model.bias);
    CHECK(restored.threshold == model.threshold);
    CHECK(restored.issue_imputation_value == model.issue_imputation_value);
    CHECK(restored.folds == model.folds);
}
