#include "vfdetect/tfidf.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace vfd {

namespace {

const std::unordered_set<std::string_view> kStopwords = {
    "a",    "an",   "and",  "are",  "as",    "at",   "be",   "but",  "by",
    "for",  "from", "has",  "have", "if",    "in",   "into", "is",   "it",
    "its",  "no",   "not",  "of",   "on",    "or",   "so",   "such", "that",
    "the",  "their", "then", "there", "these", "this", "to",   "was",  "we",
    "were", "when", "which", "will", "with",  "you",  "your"};

bool is_word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' ||
           c == '(' || c == ')';
}

// camelCase boundary: a lowercase letter directly followed by an uppercase one
bool has_camel_boundary(std::string_view token) {
    for (std::size_t i = 0; i + 1 < token.size(); ++i) {
        if (std::islower(static_cast<unsigned char>(token[i])) &&
            std::isupper(static_cast<unsigned char>(token[i + 1]))) {
            return true;
        }
    }
    return false;
}

// dot path: alphanumerics on both sides of a '.'
bool has_dot_path(std::string_view token) {
    for (std::size_t i = 1; i + 1 < token.size(); ++i) {
        if (token[i] == '.' && std::isalnum(static_cast<unsigned char>(token[i - 1])) &&
            std::isalnum(static_cast<unsigned char>(token[i + 1]))) {
            return true;
        }
    }
    return false;
}

bool all_alpha(std::string_view token) {
    return !token.empty() && std::all_of(token.begin(), token.end(), [](char c) {
        return std::isalpha(static_cast<unsigned char>(c));
    });
}

std::string lowercase(std::string_view token) {
    std::string out(token);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

}  // namespace

bool is_stopword(std::string_view word) { return kStopwords.contains(word); }

void TermProfile::merge(const TermProfile& other) {
    for (const auto& [term, count] : other.nl_terms) nl_terms[term] += count;
    for (const auto& [term, count] : other.code_terms) code_terms[term] += count;
}

TermProfile extract_terms(std::string_view text) {
    TermProfile profile;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && !is_word_char(text[i])) ++i;
        std::size_t start = i;
        while (i < text.size() && is_word_char(text[i])) ++i;
        if (i == start) continue;
        std::string_view token = text.substr(start, i - start);

        bool call_like = token.find('(') != std::string_view::npos;
        // strip call parentheses and stray edge dots: "parseHeader()" -> "parseHeader"
        while (!token.empty() && (token.back() == '(' || token.back() == ')' ||
                                  token.back() == '.')) {
            token.remove_suffix(1);
        }
        while (!token.empty() && (token.front() == '(' || token.front() == ')' ||
                                  token.front() == '.')) {
            token.remove_prefix(1);
        }
        if (token.empty()) continue;

        bool identifier_like = call_like || token.find('_') != std::string_view::npos ||
                               has_dot_path(token) || has_camel_boundary(token);
        if (identifier_like) {
            profile.code_terms[std::string(token)] += 1;
        } else if (all_alpha(token)) {
            std::string word = lowercase(token);
            if (!is_stopword(word)) profile.nl_terms[std::move(word)] += 1;
        }
        // other tokens (pure numbers, leftovers) carry no signal for linking
    }
    return profile;
}

TfidfModel fit_tfidf(std::span<const TermProfile> documents, Channel channel) {
    if (documents.empty()) {
        throw std::invalid_argument("empty corpus");
    }
    TfidfModel model;
    model.channel = channel;
    model.document_count = documents.size();

    std::map<std::string, std::size_t> document_frequency;
    for (const auto& doc : documents) {
        const auto& terms = channel == Channel::nl ? doc.nl_terms : doc.code_terms;
        for (const auto& [term, count] : terms) {
            document_frequency[term] += 1;
        }
    }
    model.idf.reserve(document_frequency.size());
    std::uint32_t index = 0;
    const double n = static_cast<double>(model.document_count);
    for (const auto& [term, df] : document_frequency) {
        model.vocabulary.emplace(term, index++);
        model.idf.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(df))) + 1.0);
    }
    return model;
}

SparseVector vectorize(const TfidfModel& model, const TermProfile& profile) {
    const auto& terms = model.channel == Channel::nl ? profile.nl_terms : profile.code_terms;
    SparseVector vec;
    double norm_sq = 0.0;
    for (const auto& [term, count] : terms) {
        auto it = model.vocabulary.find(term);
        if (it == model.vocabulary.end()) continue;
        double weight = static_cast<double>(count) * model.idf[it->second];
        vec[it->second] = weight;
        norm_sq += weight * weight;
    }
    if (norm_sq > 0.0) {
        double norm = std::sqrt(norm_sq);
        for (auto& [index, weight] : vec) weight /= norm;
    }
    return vec;
}

double cosine(const SparseVector& a, const SparseVector& b) {
    if (a.empty() || b.empty()) return 0.0;
    double dot = 0.0, norm_a = 0.0, norm_b = 0.0;
    for (const auto& [i, w] : a) norm_a += w * w;
    for (const auto& [i, w] : b) norm_b += w * w;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (ia->first < ib->first) {
            ++ia;
        } else if (ib->first < ia->first) {
            ++ib;
        } else {
            dot += ia->second * ib->second;
            ++ia;
            ++ib;
        }
    }
    if (norm_a == 0.0 || norm_b == 0.0) return 0.0;
    double value = dot / (std::sqrt(norm_a) * std::sqrt(norm_b));
    return std::clamp(value, 0.0, 1.0);
}

}  // namespace vfd
