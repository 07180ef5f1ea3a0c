#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cli_common.hpp"
#include "vfdetect/evaluation.hpp"
#include "vfdetect/ingest.hpp"
#include "vfdetect/pipeline.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Train the three base classifiers and the stacking ensemble"};

    std::string data_path;
    std::string output_dir = "models";
    std::string linker_path;
    std::uint64_t seed = 13;
    int folds = 5;
    double holdout = 0.0;

    app.add_option("--data_path,--data-path", data_path,
                   "Labeled training file (input schema plus a boolean \"label\")")
        ->required();
    app.add_option("--output_dir,--output-dir,-o", output_dir, "Model artifact directory");
    app.add_option("--linker", linker_path, "Optional linker artifact for issue recovery");
    app.add_option("--seed", seed, "Training seed");
    app.add_option("--folds", folds, "Out-of-fold count for stacker training")
        ->check(CLI::Range(2, 100));
    app.add_option("--holdout", holdout,
                   "Hold out this fraction for evaluation and print the results table")
        ->check(CLI::Range(0.0, 0.5));

    auto args = vfd::cli::normalize_args(argc, argv);
    auto pointers = vfd::cli::arg_pointers(args);
    CLI11_PARSE(app, static_cast<int>(pointers.size()), pointers.data());

    try {
        vfd::LabeledDataset data = vfd::load_labeled_dataset(data_path);
        if (data.positive_count == 0 || data.negative_count == 0) {
            std::cerr << "error: degenerate labels: training data must contain both classes\n";
            return 1;
        }

        std::optional<vfd::LinkerIndex> linker;
        if (!linker_path.empty()) {
            linker = vfd::load_linker(linker_path);
        }
        const vfd::LinkerIndex* linker_ptr = linker ? &*linker : nullptr;

        vfd::TrainingConfig config;
        config.seed = seed;

        std::optional<vfd::LabeledDataset> test;
        if (holdout > 0.0) {
            auto [train_part, test_part] = vfd::split_dataset(data, 1.0 - holdout, seed);
            data = std::move(train_part);
            test = std::move(test_part);
        }

        auto bundle =
            vfd::train_models(data, config, vfd::Backend::fallback, linker_ptr, folds);
        vfd::save_models(bundle, output_dir);
        std::cout << "trained on " << data.records.size() << " commits ("
                  << data.positive_count << " positive, " << data.negative_count
                  << " negative); models written to " << output_dir << "\n";

        if (test) {
            std::vector<std::pair<std::string, bool>> labels;
            for (const auto& record : test->records) {
                labels.emplace_back(record.id, *record.label);
            }
            auto eval_one = [&](auto&& predict) {
                std::vector<std::pair<std::string, bool>> predictions;
                for (const auto& record : test->records) {
                    predictions.emplace_back(record.id, predict(record));
                }
                return vfd::compute_metrics(predictions, labels);
            };
            const double imputation = bundle.ensemble.issue_imputation_value;
            auto message = eval_one([&](const vfd::CommitRecord& r) {
                return vfd::classify_text(bundle.base.message, r.message) > 0.5;
            });
            auto issue = eval_one([&](const vfd::CommitRecord& r) {
                auto f = vfd::assemble_features(r, bundle.base, linker_ptr, imputation);
                return f.p_issue > 0.5;
            });
            auto patch = eval_one([&](const vfd::CommitRecord& r) {
                return vfd::classify_patch(bundle.base.patch, r.patch) > 0.5;
            });
            auto scored = vfd::score_commits(bundle, linker_ptr, test->records);
            std::vector<std::pair<std::string, bool>> predictions;
            for (const auto& s : scored) predictions.emplace_back(s.id, s.flagged);
            auto ensemble = vfd::compute_metrics(predictions, labels);

            std::cout << "\nF1 on the " << test->records.size() << "-commit holdout\n"
                      << vfd::format_results_table("fallback", message, issue, patch,
                                                   ensemble);
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
