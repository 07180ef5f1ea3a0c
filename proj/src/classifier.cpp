#include "vfdetect/classifier.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace vfd {

using nlohmann::json;

namespace {

// FNV-1a, fixed so persisted models hash identically across builds
std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::size_t bucket_of(std::string_view token, int dim) {
    return static_cast<std::size_t>(fnv1a(token) % static_cast<std::uint64_t>(dim));
}

std::vector<std::string> whitespace_tokens(std::string_view text) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        std::size_t start = i;
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        if (i > start) tokens.emplace_back(text.substr(start, i - start));
    }
    return tokens;
}

void check_config(const EncoderConfig& config) {
    if (config.max_tokens < 8) {
        throw std::invalid_argument("max_tokens must be >= 8");
    }
    if (config.embedding_dim <= 0) {
        throw std::invalid_argument("embedding_dim must be positive");
    }
}

}  // namespace

const char* to_string(Source source) {
    switch (source) {
        case Source::message: return "message";
        case Source::issue: return "issue";
        case Source::patch: return "patch";
    }
    return "message";
}

const char* to_string(Backend backend) {
    return backend == Backend::encoder ? "encoder" : "fallback";
}

Source source_from_string(const std::string& name) {
    if (name == "message") return Source::message;
    if (name == "issue") return Source::issue;
    if (name == "patch") return Source::patch;
    throw std::invalid_argument("unknown source: " + name);
}

Backend backend_from_string(const std::string& name) {
    if (name == "encoder") return Backend::encoder;
    if (name == "fallback") return Backend::fallback;
    throw std::invalid_argument("unknown backend: " + name);
}

std::string issue_text(const IssueReport& issue) { return issue.title + "\n" + issue.body; }

std::vector<std::string> text_tokens(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
            current.push_back(
                static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

PatchInput build_patch_input(const FileChange& change, const EncoderConfig& config) {
    check_config(config);
    std::vector<std::string> removed;
    std::vector<std::string> added;
    for (const auto& line : change.removed_lines) {
        auto tokens = whitespace_tokens(line);
        std::move(tokens.begin(), tokens.end(), std::back_inserter(removed));
    }
    for (const auto& line : change.added_lines) {
        auto tokens = whitespace_tokens(line);
        std::move(tokens.begin(), tokens.end(), std::back_inserter(added));
    }

    const std::size_t max_tokens = static_cast<std::size_t>(config.max_tokens);
    if (removed.size() + added.size() + 3 > max_tokens) {
        const std::size_t budget = (max_tokens - 3) / 2;
        if (removed.size() > budget) removed.resize(budget);
        if (added.size() > budget) added.resize(budget);
    }

    PatchInput input;
    input.tokens.reserve(removed.size() + added.size() + 3);
    input.tokens.emplace_back(kClsToken);
    std::move(removed.begin(), removed.end(), std::back_inserter(input.tokens));
    input.tokens.emplace_back(kSepToken);
    std::move(added.begin(), added.end(), std::back_inserter(input.tokens));
    input.tokens.emplace_back(kEosToken);
    return input;
}

std::vector<double> embed_tokens(const ClassifierModel& model,
                                 std::span<const std::string> tokens) {
    const int dim = model.config.embedding_dim;
    std::vector<double> embedding(static_cast<std::size_t>(dim), 0.0);
    for (const auto& token : tokens) {
        embedding[bucket_of(token, dim)] += 1.0;
    }
    double norm_sq = 0.0;
    for (std::size_t j = 0; j < embedding.size(); ++j) {
        if (embedding[j] == 0.0) continue;
        double idf = j < model.idf.size() ? model.idf[j] : 1.0;
        embedding[j] *= idf;
        norm_sq += embedding[j] * embedding[j];
    }
    if (norm_sq > 0.0) {
        double inv = 1.0 / std::sqrt(norm_sq);
        for (auto& v : embedding) v *= inv;
    }
    return embedding;
}

std::vector<double> embed_patch_input(const ClassifierModel& model, const PatchInput& input) {
    return embed_tokens(model, input.tokens);
}

namespace {

std::vector<double> embed_changes(const ClassifierModel& model,
                                  std::span<const FileChange> changes) {
    std::vector<double> mean(static_cast<std::size_t>(model.config.embedding_dim), 0.0);
    if (changes.empty()) return mean;  // zero embedding
    for (const auto& change : changes) {
        auto embedding = embed_patch_input(model, build_patch_input(change, model.config));
        for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += embedding[j];
    }
    double inv = 1.0 / static_cast<double>(changes.size());
    for (auto& v : mean) v *= inv;
    return mean;
}

void require_trained(const ClassifierModel& model) {
    if (!model.trained) {
        throw std::logic_error("classifier not trained");
    }
}

double validation_f1(const LogisticModel& head, const std::vector<std::vector<double>>& X,
                     const std::vector<int>& y) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        bool predicted = head.predict(X[i]) > 0.5;
        if (predicted && y[i]) ++tp;
        if (predicted && !y[i]) ++fp;
        if (!predicted && y[i]) ++fn;
    }
    if (tp == 0) return 0.0;
    double p = static_cast<double>(tp) / static_cast<double>(tp + fp);
    double r = static_cast<double>(tp) / static_cast<double>(tp + fn);
    return 2.0 * p * r / (p + r);
}

}  // namespace

double classify_text(const ClassifierModel& model, const std::string& text) {
    require_trained(model);
    auto tokens = text_tokens(text);
    return model.head.predict(embed_tokens(model, tokens));
}

double classify_patch(const ClassifierModel& model, std::span<const FileChange> changes) {
    require_trained(model);
    return model.head.predict(embed_changes(model, changes));
}

ClassifierModel train_classifier(const LabeledDataset& data, Source source, Backend backend,
                                 const TrainingConfig& config, const EncoderConfig& encoder) {
    check_config(encoder);
    if (config.validation_fraction <= 0.0 || config.validation_fraction > 0.5) {
        throw std::invalid_argument("validation_fraction must be in (0, 0.5]");
    }
    if (backend == Backend::encoder) {
        throw std::runtime_error(
            "encoder backend requires a pretrained encoder runtime, which this build does "
            "not bundle; use the fallback backend");
    }

    ClassifierModel model;
    model.source = source;
    model.backend = backend;
    model.config = encoder;
    model.seed = config.seed;

    // per-source training documents
    std::vector<std::vector<std::string>> token_docs;  // message/issue
    std::vector<const std::vector<FileChange>*> patch_docs;
    std::vector<int> labels;
    for (const auto& record : data.records) {
        if (!record.label) {
            throw std::invalid_argument("unlabeled record in training data: " + record.id);
        }
        if (source == Source::issue && !record.issue) continue;
        switch (source) {
            case Source::message:
                token_docs.push_back(text_tokens(record.message));
                break;
            case Source::issue:
                token_docs.push_back(text_tokens(issue_text(*record.issue)));
                break;
            case Source::patch:
                patch_docs.push_back(&record.patch);
                break;
        }
        labels.push_back(*record.label ? 1 : 0);
    }
    const std::size_t n = labels.size();
    std::size_t positives = static_cast<std::size_t>(
        std::count(labels.begin(), labels.end(), 1));
    if (n == 0 || positives == 0 || positives == n) {
        throw std::runtime_error("degenerate labels: training data must contain both classes");
    }

    // bucket-level document frequencies for the idf weights
    const std::size_t dim = static_cast<std::size_t>(encoder.embedding_dim);
    std::vector<std::size_t> df(dim, 0);
    auto count_df = [&](auto&& bucket_set) {
        for (std::size_t b : bucket_set) df[b] += 1;
    };
    std::vector<std::set<std::size_t>> doc_buckets(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (source == Source::patch) {
            for (const auto& change : *patch_docs[i]) {
                for (const auto& token : build_patch_input(change, encoder).tokens) {
                    doc_buckets[i].insert(bucket_of(token, encoder.embedding_dim));
                }
            }
        } else {
            for (const auto& token : token_docs[i]) {
                doc_buckets[i].insert(bucket_of(token, encoder.embedding_dim));
            }
        }
        count_df(doc_buckets[i]);
    }
    model.idf.resize(dim);
    for (std::size_t j = 0; j < dim; ++j) {
        model.idf[j] = std::log((1.0 + static_cast<double>(n)) /
                                (1.0 + static_cast<double>(df[j]))) +
                       1.0;
    }

    std::vector<std::vector<double>> features;
    features.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (source == Source::patch) {
            features.push_back(embed_changes(model, *patch_docs[i]));
        } else {
            features.push_back(embed_tokens(model, token_docs[i]));
        }
    }

    // seeded stratified validation split for picking the L2 strength
    std::vector<std::size_t> positive_idx, negative_idx;
    for (std::size_t i = 0; i < n; ++i) {
        (labels[i] ? positive_idx : negative_idx).push_back(i);
    }
    std::mt19937_64 rng(config.seed);
    std::shuffle(positive_idx.begin(), positive_idx.end(), rng);
    std::shuffle(negative_idx.begin(), negative_idx.end(), rng);
    auto take = [&](const std::vector<std::size_t>& idx) {
        return std::max<std::size_t>(
            1, static_cast<std::size_t>(std::llround(
                   config.validation_fraction * static_cast<double>(idx.size()))));
    };
    std::size_t val_pos = std::min(take(positive_idx), positive_idx.size() - 1);
    std::size_t val_neg = std::min(take(negative_idx), negative_idx.size() - 1);

    std::vector<std::vector<double>> train_X, val_X;
    std::vector<int> train_y, val_y;
    auto split_into = [&](const std::vector<std::size_t>& idx, std::size_t val_count) {
        for (std::size_t k = 0; k < idx.size(); ++k) {
            if (k < val_count) {
                val_X.push_back(features[idx[k]]);
                val_y.push_back(labels[idx[k]]);
            } else {
                train_X.push_back(features[idx[k]]);
                train_y.push_back(labels[idx[k]]);
            }
        }
    };
    split_into(positive_idx, val_pos);
    split_into(negative_idx, val_neg);

    LogisticFitOptions fit_options;
    fit_options.max_iterations = std::max(1, config.epochs) * 100;
    fit_options.initial_step = config.learning_rate;

    const double l2_grid[] = {1e-4, 1e-3, 1e-2};
    double best_f1 = -1.0;
    double best_l2 = l2_grid[0];
    for (double l2 : l2_grid) {
        fit_options.l2 = l2;
        LogisticModel head = fit_logistic(train_X, train_y, fit_options);
        double f1 = validation_f1(head, val_X, val_y);
        if (f1 > best_f1) {  // ties keep the smaller l2
            best_f1 = f1;
            best_l2 = l2;
        }
    }

    fit_options.l2 = best_l2;
    model.chosen_l2 = best_l2;
    model.head = fit_logistic(features, labels, fit_options);
    model.trained = true;
    return model;
}

json classifier_to_json(const ClassifierModel& model) {
    return {{"format_version", 1},
            {"source", to_string(model.source)},
            {"backend", to_string(model.backend)},
            {"config",
             {{"encoder_id", model.config.encoder_id},
              {"max_tokens", model.config.max_tokens},
              {"embedding_dim", model.config.embedding_dim}}},
            {"seed", model.seed},
            {"trained", model.trained},
            {"idf", model.idf},
            {"weights", model.head.weights},
            {"bias", model.head.bias},
            {"chosen_l2", model.chosen_l2}};
}

ClassifierModel classifier_from_json(const json& doc) {
    if (doc.value("format_version", -1) != 1) {
        throw std::runtime_error("classifier artifact format version mismatch: expected 1");
    }
    ClassifierModel model;
    model.source = source_from_string(doc.at("source").get<std::string>());
    model.backend = backend_from_string(doc.at("backend").get<std::string>());
    model.config.encoder_id = doc.at("config").at("encoder_id").get<std::string>();
    model.config.max_tokens = doc.at("config").at("max_tokens").get<int>();
    model.config.embedding_dim = doc.at("config").at("embedding_dim").get<int>();
    model.seed = doc.at("seed").get<std::uint64_t>();
    model.trained = doc.at("trained").get<bool>();
    model.idf = doc.at("idf").get<std::vector<double>>();
    model.head.weights = doc.at("weights").get<std::vector<double>>();
    model.head.bias = doc.at("bias").get<double>();
    model.chosen_l2 = doc.at("chosen_l2").get<double>();
    return model;
}

}  // namespace vfd
