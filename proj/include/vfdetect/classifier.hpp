#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "vfdetect/logreg.hpp"
#include "vfdetect/types.hpp"

namespace vfd {

inline constexpr const char* kClsToken = "[CLS]";
inline constexpr const char* kSepToken = "[SEP]";
inline constexpr const char* kEosToken = "[EOS]";

struct EncoderConfig {
    std::string encoder_id = "fallback-bow";
    int max_tokens = 512;     // >= 8
    int embedding_dim = 768;  // hashed-bag dimension for the fallback backend
};

/// [CLS] <removed tokens> [SEP] <added tokens> [EOS]
struct PatchInput {
    std::vector<std::string> tokens;
};

/// Tokenize both sides of a file change and lay them out with sentinel
/// tokens. When combined length would exceed max_tokens, each side is
/// tail-truncated to a budget of (max_tokens - 3) / 2 tokens.
PatchInput build_patch_input(const FileChange& change, const EncoderConfig& config);

enum class Source { message, issue, patch };
enum class Backend { encoder, fallback };

struct TrainingConfig {
    int epochs = 20;
    int batch_size = 32;
    double learning_rate = 1.0;
    std::uint64_t seed = 13;
    double validation_fraction = 0.2;  // in (0, 0.5]
};

/// A trained probability scorer over one information source. Immutable
/// after training; concurrent inference is safe.
struct ClassifierModel {
    Source source = Source::message;
    Backend backend = Backend::fallback;
    EncoderConfig config;
    std::uint64_t seed = 0;
    bool trained = false;

    // fallback backend state
    std::vector<double> idf;  // per hash bucket, size embedding_dim
    LogisticModel head;
    double chosen_l2 = 0.0;
};

std::string issue_text(const IssueReport& issue);  // title + '\n' + body

/// Word tokens for the fallback text path (lowercased, split on
/// non-alphanumerics, '_' kept inside tokens).
std::vector<std::string> text_tokens(std::string_view text);

/// Hashed tf-idf embedding of a token sequence, L2-normalized when nonzero.
std::vector<double> embed_tokens(const ClassifierModel& model,
                                 std::span<const std::string> tokens);

/// Per-file embedding of a patch input.
std::vector<double> embed_patch_input(const ClassifierModel& model, const PatchInput& input);

double classify_text(const ClassifierModel& model, const std::string& text);

/// Mean of per-file embeddings, then the linear head. An empty change
/// list scores the zero embedding.
double classify_patch(const ClassifierModel& model, std::span<const FileChange> changes);

/// Train a classifier for one source. Fallback backend: hashed bag-of-words
/// tf-idf features into logistic regression, with the L2 strength picked on
/// a seeded stratified validation split. For source == issue, records
/// without an issue are excluded. Throws on single-class data
/// ("degenerate labels") and for the encoder backend (no encoder runtime
/// ships with this build).
ClassifierModel train_classifier(const LabeledDataset& data, Source source,
                                 Backend backend, const TrainingConfig& config,
                                 const EncoderConfig& encoder = {});

nlohmann::json classifier_to_json(const ClassifierModel& model);
ClassifierModel classifier_from_json(const nlohmann::json& doc);

const char* to_string(Source source);
const char* to_string(Backend backend);
Source source_from_string(const std::string& name);
Backend backend_from_string(const std::string& name);

}  // namespace vfd
