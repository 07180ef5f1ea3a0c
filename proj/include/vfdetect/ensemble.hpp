#pragma once

#include <array>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "vfdetect/classifier.hpp"
#include "vfdetect/linker.hpp"
#include "vfdetect/types.hpp"

namespace vfd {

struct StackedFeatures {
    double p_message = 0.0;
    double p_issue = 0.0;
    double p_patch = 0.0;
    bool issue_imputed = false;
};

struct EnsembleModel {
    std::array<double, 3> weights{0.0, 0.0, 0.0};  // message, issue, patch
    double bias = 0.0;
    double threshold = 0.5;
    double issue_imputation_value = 0.5;
    int folds = 5;
    bool trained = false;
};

struct ScoredCommit {
    std::string id;
    double probability = 0.0;
    bool flagged = false;  // probability > threshold, strict
};

struct BaseModels {
    ClassifierModel message;
    ClassifierModel issue;
    ClassifierModel patch;
};

/// Base probabilities for one commit. Explicit issues are used verbatim;
/// otherwise the linker (when given) recovers one; otherwise p_issue is
/// the imputation value and the flag records it.
StackedFeatures assemble_features(const CommitRecord& commit, const BaseModels& models,
                                  const LinkerIndex* linker, double imputation_value);

/// Fit the logistic stacker on out-of-fold base probabilities: the fold
/// assignment is stratified and seeded, base classifiers are retrained per
/// fold, and the imputation value is the positive base rate of `training`.
EnsembleModel train_stacker(const LabeledDataset& training, const TrainingConfig& config,
                            Backend backend, const LinkerIndex* linker, int folds,
                            const EncoderConfig& encoder = {});

double score_commit(const EnsembleModel& ensemble, const StackedFeatures& features);

/// Strict: true iff score > threshold.
bool classify_with_threshold(double score, double threshold);

/// Descending by probability, ties by ascending id.
std::vector<ScoredCommit> rank_commits(std::vector<ScoredCommit> scored);

nlohmann::json ensemble_to_json(const EnsembleModel& model);
EnsembleModel ensemble_from_json(const nlohmann::json& doc);

}  // namespace vfd
