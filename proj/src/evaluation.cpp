#include "vfdetect/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include <nlohmann/json.hpp>

namespace vfd {

using nlohmann::json;

std::pair<LabeledDataset, LabeledDataset> split_dataset(const LabeledDataset& data,
                                                        double train_fraction,
                                                        std::uint64_t seed) {
    if (train_fraction <= 0.0 || train_fraction >= 1.0) {
        throw std::invalid_argument("train_fraction must be strictly between 0 and 1");
    }
    std::vector<std::size_t> positive_idx, negative_idx;
    for (std::size_t i = 0; i < data.records.size(); ++i) {
        if (!data.records[i].label) {
            throw std::invalid_argument("split_dataset: unlabeled record " +
                                        data.records[i].id);
        }
        (*data.records[i].label ? positive_idx : negative_idx).push_back(i);
    }
    if (positive_idx.size() < 2 || negative_idx.size() < 2) {
        throw std::invalid_argument("each class needs at least 2 records to split");
    }

    std::mt19937_64 rng(seed);
    std::shuffle(positive_idx.begin(), positive_idx.end(), rng);
    std::shuffle(negative_idx.begin(), negative_idx.end(), rng);

    std::vector<CommitRecord> train_records, test_records;
    auto partition = [&](const std::vector<std::size_t>& idx) {
        auto count = static_cast<std::size_t>(
            std::llround(train_fraction * static_cast<double>(idx.size())));
        count = std::clamp<std::size_t>(count, 1, idx.size() - 1);  // both sides non-empty
        for (std::size_t k = 0; k < idx.size(); ++k) {
            (k < count ? train_records : test_records).push_back(data.records[idx[k]]);
        }
    };
    partition(positive_idx);
    partition(negative_idx);
    return {LabeledDataset::from_records(std::move(train_records)),
            LabeledDataset::from_records(std::move(test_records))};
}

MetricsReport compute_metrics(const std::vector<std::pair<std::string, bool>>& predictions,
                              const std::vector<std::pair<std::string, bool>>& labels) {
    if (predictions.size() != labels.size()) {
        throw std::invalid_argument("compute_metrics: prediction/label id sets differ in size");
    }
    std::unordered_map<std::string, bool> label_by_id;
    label_by_id.reserve(labels.size());
    for (const auto& [id, value] : labels) {
        if (!label_by_id.emplace(id, value).second) {
            throw std::invalid_argument("compute_metrics: duplicate label id " + id);
        }
    }

    MetricsReport report;
    std::unordered_map<std::string, bool> seen;
    for (const auto& [id, predicted] : predictions) {
        auto it = label_by_id.find(id);
        if (it == label_by_id.end()) {
            throw std::invalid_argument("compute_metrics: prediction id not in labels: " + id);
        }
        if (!seen.emplace(id, predicted).second) {
            throw std::invalid_argument("compute_metrics: duplicate prediction id " + id);
        }
        bool actual = it->second;
        if (predicted && actual) ++report.matrix.tp;
        if (predicted && !actual) ++report.matrix.fp;
        if (!predicted && actual) ++report.matrix.fn;
        if (!predicted && !actual) ++report.matrix.tn;
    }

    const auto& m = report.matrix;
    report.precision =
        m.tp + m.fp == 0 ? 0.0
                         : static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp);
    report.recall = m.tp + m.fn == 0
                        ? 0.0
                        : static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn);
    report.f1 = report.precision + report.recall == 0.0
                    ? 0.0
                    : 2.0 * report.precision * report.recall /
                          (report.precision + report.recall);
    return report;
}

AblationReport ablation_unique_tp(const std::map<std::string, std::set<std::string>>& tp_sets) {
    AblationReport report;
    report.tp_sets = tp_sets;

    std::set<std::string> all;
    for (const auto& [name, ids] : tp_sets) {
        all.insert(ids.begin(), ids.end());
    }
    report.total_discovered = all.size();

    for (const auto& [name, ids] : tp_sets) {
        std::set<std::string> others;
        for (const auto& [other_name, other_ids] : tp_sets) {
            if (other_name == name) continue;
            others.insert(other_ids.begin(), other_ids.end());
        }
        std::size_t unique = 0;
        for (const auto& id : ids) {
            if (!others.contains(id)) ++unique;
        }
        report.unique_counts[name] = unique;
    }
    return report;
}

json metrics_to_json(const MetricsReport& report) {
    return {{"precision", report.precision},
            {"recall", report.recall},
            {"f1", report.f1},
            {"confusion",
             {{"tp", report.matrix.tp},
              {"fp", report.matrix.fp},
              {"fn", report.matrix.fn},
              {"tn", report.matrix.tn}}}};
}

json ablation_to_json(const AblationReport& report) {
    json uniques = json::object();
    for (const auto& [name, count] : report.unique_counts) {
        uniques[name] = count;
    }
    return {{"uniques", std::move(uniques)}, {"total_discovered", report.total_discovered}};
}

std::string format_results_table(const std::string& model_name, const MetricsReport& message,
                                 const MetricsReport& issue, const MetricsReport& patch,
                                 const MetricsReport& ensemble) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(2);
    auto row = [&](const std::string& name, auto metric) {
        out << "| " << std::setw(10) << std::left << name << std::right << " | "
            << std::setw(7) << metric(message) << " | " << std::setw(5) << metric(issue)
            << " | " << std::setw(5) << metric(patch) << " | " << std::setw(8)
            << metric(ensemble) << " |\n";
    };
    out << "| Model      | Message | Issue | Patch | Ensemble |\n";
    out << "|------------|---------|-------|-------|----------|\n";
    row(model_name, [](const MetricsReport& r) { return r.f1; });
    out << "\nPrecision / Recall detail\n";
    row("precision", [](const MetricsReport& r) { return r.precision; });
    row("recall", [](const MetricsReport& r) { return r.recall; });
    return out.str();
}

}  // namespace vfd
