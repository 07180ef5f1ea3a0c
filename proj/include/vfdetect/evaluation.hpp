#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "vfdetect/types.hpp"

namespace vfd {

struct ConfusionMatrix {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    std::size_t tn = 0;

    std::size_t total() const { return tp + fp + fn + tn; }
};

struct MetricsReport {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    ConfusionMatrix matrix;
};

struct AblationReport {
    std::map<std::string, std::set<std::string>> tp_sets;
    std::map<std::string, std::size_t> unique_counts;
    std::size_t total_discovered = 0;
};

/// Stratified, seeded, disjoint and exhaustive split. Each class needs at
/// least 2 records and 0 < train_fraction < 1.
std::pair<LabeledDataset, LabeledDataset> split_dataset(const LabeledDataset& data,
                                                        double train_fraction,
                                                        std::uint64_t seed);

/// P = TP/(TP+FP), R = TP/(TP+FN), F1 = 2PR/(P+R); zero denominators give 0.
/// The two id sets must be equal.
MetricsReport compute_metrics(const std::vector<std::pair<std::string, bool>>& predictions,
                              const std::vector<std::pair<std::string, bool>>& labels);

/// unique(c) = |tp(c) minus the union of the other sets|;
/// total = |union of all sets|.
AblationReport ablation_unique_tp(const std::map<std::string, std::set<std::string>>& tp_sets);

nlohmann::json metrics_to_json(const MetricsReport& report);
nlohmann::json ablation_to_json(const AblationReport& report);

/// Per-classifier and ensemble results in the one-row-per-model table
/// layout (columns Message, Issue, Patch, Ensemble).
std::string format_results_table(const std::string& model_name, const MetricsReport& message,
                                 const MetricsReport& issue, const MetricsReport& patch,
                                 const MetricsReport& ensemble);

}  // namespace vfd
