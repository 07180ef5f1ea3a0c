#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace vfd {

struct IssueReport {
    std::string title;
    std::string body;
    std::vector<std::string> comments;

    bool usable() const { return !title.empty() || !body.empty(); }

    friend bool operator==(const IssueReport&, const IssueReport&) = default;
};

/// One file's change: context lines are never stored, only added/removed.
struct FileChange {
    std::string file_path;
    std::vector<std::string> added_lines;
    std::vector<std::string> removed_lines;

    friend bool operator==(const FileChange&, const FileChange&) = default;
};

struct CommitRecord {
    std::string id;
    std::string message;                 // may be empty (bot commits)
    std::optional<IssueReport> issue;    // absent when no explicit link
    std::vector<FileChange> patch;
    std::optional<bool> label;           // present only in training data

    friend bool operator==(const CommitRecord&, const CommitRecord&) = default;
};

struct LabeledDataset {
    std::vector<CommitRecord> records;
    std::size_t positive_count = 0;
    std::size_t negative_count = 0;

    static LabeledDataset from_records(std::vector<CommitRecord> records);
};

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace vfd
