#include "vfdetect/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace vfd {

using nlohmann::json;

StackedFeatures assemble_features(const CommitRecord& commit, const BaseModels& models,
                                  const LinkerIndex* linker, double imputation_value) {
    StackedFeatures features;
    features.p_message = classify_text(models.message, commit.message);

    std::optional<IssueReport> issue = commit.issue;  // explicit links are kept verbatim
    if (!issue && linker != nullptr) {
        issue = link_commit(*linker, commit);
    }
    if (issue) {
        features.p_issue = classify_text(models.issue, issue_text(*issue));
    } else {
        features.p_issue = imputation_value;
        features.issue_imputed = true;
    }
    features.p_patch = classify_patch(models.patch, commit.patch);
    return features;
}

double score_commit(const EnsembleModel& ensemble, const StackedFeatures& features) {
    double z = ensemble.bias + ensemble.weights[0] * features.p_message +
               ensemble.weights[1] * features.p_issue + ensemble.weights[2] * features.p_patch;
    return sigmoid(z);
}

bool classify_with_threshold(double score, double threshold) { return score > threshold; }

std::vector<ScoredCommit> rank_commits(std::vector<ScoredCommit> scored) {
    std::sort(scored.begin(), scored.end(), [](const ScoredCommit& a, const ScoredCommit& b) {
        if (a.probability != b.probability) return a.probability > b.probability;
        return a.id < b.id;
    });
    return scored;
}

namespace {

std::vector<std::size_t> fold_assignment(const LabeledDataset& data, int folds,
                                         std::uint64_t seed) {
    std::vector<std::size_t> assignment(data.records.size(), 0);
    std::vector<std::size_t> positive_idx, negative_idx;
    for (std::size_t i = 0; i < data.records.size(); ++i) {
        (*data.records[i].label ? positive_idx : negative_idx).push_back(i);
    }
    std::mt19937_64 rng(seed);
    std::shuffle(positive_idx.begin(), positive_idx.end(), rng);
    std::shuffle(negative_idx.begin(), negative_idx.end(), rng);
    // round-robin keeps every fold stratified
    for (std::size_t k = 0; k < positive_idx.size(); ++k) {
        assignment[positive_idx[k]] = k % static_cast<std::size_t>(folds);
    }
    for (std::size_t k = 0; k < negative_idx.size(); ++k) {
        assignment[negative_idx[k]] = k % static_cast<std::size_t>(folds);
    }
    return assignment;
}

}  // namespace

EnsembleModel train_stacker(const LabeledDataset& training, const TrainingConfig& config,
                            Backend backend, const LinkerIndex* linker, int folds,
                            const EncoderConfig& encoder) {
    if (folds < 2) {
        throw std::invalid_argument("folds must be >= 2");
    }
    if (training.positive_count == 0 || training.negative_count == 0) {
        throw std::runtime_error("degenerate labels: training data must contain both classes");
    }

    const double imputation = static_cast<double>(training.positive_count) /
                              static_cast<double>(training.records.size());

    auto assignment = fold_assignment(training, folds, config.seed);

    std::vector<std::vector<double>> features(training.records.size());
    std::vector<int> labels(training.records.size());
    for (int fold = 0; fold < folds; ++fold) {
        std::vector<CommitRecord> fold_train;
        for (std::size_t i = 0; i < training.records.size(); ++i) {
            if (assignment[i] != static_cast<std::size_t>(fold)) {
                fold_train.push_back(training.records[i]);
            }
        }
        BaseModels models{
            train_classifier(LabeledDataset::from_records(fold_train), Source::message,
                             backend, config, encoder),
            train_classifier(LabeledDataset::from_records(fold_train), Source::issue, backend,
                             config, encoder),
            train_classifier(LabeledDataset::from_records(fold_train), Source::patch, backend,
                             config, encoder)};
        for (std::size_t i = 0; i < training.records.size(); ++i) {
            if (assignment[i] != static_cast<std::size_t>(fold)) continue;
            StackedFeatures f =
                assemble_features(training.records[i], models, linker, imputation);
            features[i] = {f.p_message, f.p_issue, f.p_patch};
            labels[i] = *training.records[i].label ? 1 : 0;
        }
    }

    LogisticFitOptions options;
    options.l2 = 1e-3;
    options.max_iterations = 5000;
    LogisticModel fitted = fit_logistic(features, labels, options);

    EnsembleModel ensemble;
    ensemble.weights = {fitted.weights[0], fitted.weights[1], fitted.weights[2]};
    ensemble.bias = fitted.bias;
    ensemble.threshold = 0.5;
    ensemble.issue_imputation_value = imputation;
    ensemble.folds = folds;
    ensemble.trained = true;
    return ensemble;
}

json ensemble_to_json(const EnsembleModel& model) {
    return {{"format_version", 1},
            {"weights", std::vector<double>(model.weights.begin(), model.weights.end())},
            {"bias", model.bias},
            {"threshold", model.threshold},
            {"issue_imputation_value", model.issue_imputation_value},
            {"folds", model.folds},
            {"trained", model.trained}};
}

EnsembleModel ensemble_from_json(const json& doc) {
    if (doc.value("format_version", -1) != 1) {
        throw std::runtime_error("ensemble artifact format version mismatch: expected 1");
    }
    EnsembleModel model;
    auto weights = doc.at("weights").get<std::vector<double>>();
    if (weights.size() != 3) {
        throw std::runtime_error("ensemble artifact: expected 3 weights");
    }
    std::copy(weights.begin(), weights.end(), model.weights.begin());
    model.bias = doc.at("bias").get<double>();
    model.threshold = doc.at("threshold").get<double>();
    model.issue_imputation_value = doc.at("issue_imputation_value").get<double>();
    model.folds = doc.at("folds").get<int>();
    model.trained = doc.at("trained").get<bool>();
    return model;
}

}  // namespace vfd
