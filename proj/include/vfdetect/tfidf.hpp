#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vfd {

/// Term counts split into two disjoint channels: natural-language words
/// and identifier-like code terms. A token lands in exactly one channel.
struct TermProfile {
    std::map<std::string, int> nl_terms;
    std::map<std::string, int> code_terms;

    bool empty() const { return nl_terms.empty() && code_terms.empty(); }
    void merge(const TermProfile& other);
};

/// Route tokens of free text into nl/code channels. Identifier heuristic:
/// camelCase boundary, underscore, dot path, or a call-like name with
/// parentheses (stripped). Remaining alphabetic tokens are lowercased and
/// filtered against a fixed stopword list.
TermProfile extract_terms(std::string_view text);

bool is_stopword(std::string_view word);

enum class Channel { nl, code };

/// index -> weight, L2-normalized unless all-zero
using SparseVector = std::map<std::uint32_t, double>;

struct TfidfModel {
    Channel channel = Channel::nl;
    std::map<std::string, std::uint32_t> vocabulary;
    std::vector<double> idf;  // aligned with vocabulary indices
    std::size_t document_count = 0;
};

/// Fit vocabulary and smoothed idf: idf(t) = ln((1+N)/(1+df(t))) + 1.
/// Throws std::invalid_argument("empty corpus") on an empty document list.
TfidfModel fit_tfidf(std::span<const TermProfile> documents, Channel channel);

/// tf * idf over vocabulary terms, L2-normalized when nonzero.
SparseVector vectorize(const TfidfModel& model, const TermProfile& profile);

/// Cosine of two sparse vectors; any zero vector gives 0.
double cosine(const SparseVector& a, const SparseVector& b);

}  // namespace vfd
