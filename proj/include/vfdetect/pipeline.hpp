#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "vfdetect/ensemble.hpp"

namespace vfd {

struct ModelBundle {
    BaseModels base;
    EnsembleModel ensemble;
};

inline constexpr int kModelFormatVersion = 1;

/// Train the three base classifiers on the full training set plus the
/// out-of-fold stacker.
ModelBundle train_models(const LabeledDataset& training, const TrainingConfig& config,
                         Backend backend, const LinkerIndex* linker, int folds,
                         const EncoderConfig& encoder = {});

/// Directory layout: message.json, issue.json, patch.json, ensemble.json,
/// manifest.json (format version, backend, seed, fold count).
void save_models(const ModelBundle& bundle, const std::filesystem::path& dir);
ModelBundle load_models(const std::filesystem::path& dir);

/// Score every commit; output order matches input order. `threshold`
/// overrides the ensemble default when non-negative.
std::vector<ScoredCommit> score_commits(const ModelBundle& bundle, const LinkerIndex* linker,
                                        std::span<const CommitRecord> commits,
                                        double threshold = -1.0);

}  // namespace vfd
