#include "vfdetect/pipeline.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

namespace vfd {

using nlohmann::json;

ModelBundle train_models(const LabeledDataset& training, const TrainingConfig& config,
                         Backend backend, const LinkerIndex* linker, int folds,
                         const EncoderConfig& encoder) {
    ModelBundle bundle;
    bundle.base.message =
        train_classifier(training, Source::message, backend, config, encoder);
    bundle.base.issue = train_classifier(training, Source::issue, backend, config, encoder);
    bundle.base.patch = train_classifier(training, Source::patch, backend, config, encoder);
    bundle.ensemble = train_stacker(training, config, backend, linker, folds, encoder);
    return bundle;
}

namespace {

void write_json(const std::filesystem::path& path, const json& doc) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << doc.dump(2) << "\n";
}

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    return json::parse(in);
}

}  // namespace

void save_models(const ModelBundle& bundle, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_json(dir / "message.json", classifier_to_json(bundle.base.message));
    write_json(dir / "issue.json", classifier_to_json(bundle.base.issue));
    write_json(dir / "patch.json", classifier_to_json(bundle.base.patch));
    write_json(dir / "ensemble.json", ensemble_to_json(bundle.ensemble));
    write_json(dir / "manifest.json",
               {{"format_version", kModelFormatVersion},
                {"backend", to_string(bundle.base.message.backend)},
                {"seed", bundle.base.message.seed},
                {"folds", bundle.ensemble.folds},
                {"sources", {"message", "issue", "patch"}}});
}

ModelBundle load_models(const std::filesystem::path& dir) {
    json manifest = read_json(dir / "manifest.json");
    if (manifest.value("format_version", -1) != kModelFormatVersion) {
        throw std::runtime_error("model directory format version mismatch: expected " +
                                 std::to_string(kModelFormatVersion));
    }
    ModelBundle bundle;
    bundle.base.message = classifier_from_json(read_json(dir / "message.json"));
    bundle.base.issue = classifier_from_json(read_json(dir / "issue.json"));
    bundle.base.patch = classifier_from_json(read_json(dir / "patch.json"));
    bundle.ensemble = ensemble_from_json(read_json(dir / "ensemble.json"));
    return bundle;
}

std::vector<ScoredCommit> score_commits(const ModelBundle& bundle, const LinkerIndex* linker,
                                        std::span<const CommitRecord> commits,
                                        double threshold) {
    const double cutoff = threshold >= 0.0 ? threshold : bundle.ensemble.threshold;
    std::vector<ScoredCommit> scored;
    scored.reserve(commits.size());
    for (const auto& commit : commits) {
        StackedFeatures features = assemble_features(
            commit, bundle.base, linker, bundle.ensemble.issue_imputation_value);
        double probability = score_commit(bundle.ensemble, features);
        scored.push_back(
            {commit.id, probability, classify_with_threshold(probability, cutoff)});
    }
    return scored;
}

}  // namespace vfd
