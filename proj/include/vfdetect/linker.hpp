#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "vfdetect/tfidf.hpp"
#include "vfdetect/types.hpp"

namespace vfd {

struct LinkerConfig {
    double similarity_threshold = 0.5;  // in [0,1]
    std::string corpus_path;
};

/// Immutable after build; concurrent read-only queries are safe.
struct LinkerIndex {
    std::vector<IssueReport> issues;
    std::vector<SparseVector> nl_vectors;    // aligned 1:1 with issues
    std::vector<SparseVector> code_vectors;  // aligned 1:1 with issues
    TfidfModel nl_model;
    TfidfModel code_model;
    LinkerConfig config;
};

/// Issue-side document: title + body + comments, whitespace-joined.
TermProfile issue_profile(const IssueReport& issue);

/// Commit-side document: message + all added/removed lines.
TermProfile commit_profile(const CommitRecord& commit);

LinkerIndex build_linker(std::vector<IssueReport> issues, LinkerConfig config);

/// max of nl-channel and code-channel cosines against issue at `position`.
double similarity(const LinkerIndex& index, const TermProfile& commit, std::size_t position);

/// Most similar issue when strictly above the threshold, else nullopt.
/// Ties break toward the lowest issue position. The commit must not
/// already carry an explicit issue (std::logic_error otherwise).
std::optional<IssueReport> link_commit(const LinkerIndex& index, const CommitRecord& commit);

/// Position variant, for callers that need provenance.
std::optional<std::size_t> link_commit_position(const LinkerIndex& index, const CommitRecord& commit);

/// Deterministic JSON serialization with a format-version header.
void persist_linker(const LinkerIndex& index, const std::filesystem::path& path);
LinkerIndex load_linker(const std::filesystem::path& path);

inline constexpr int kLinkerFormatVersion = 1;

}  // namespace vfd
