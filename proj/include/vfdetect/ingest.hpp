#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "vfdetect/types.hpp"

namespace vfd {

/// Parse an input file: a JSON array of commit objects
/// {id, message, issue{title, body, comments[]}, patch[], label?}.
/// Patch entries are either unified-diff strings or pre-split
/// {file_path, added[], removed[]} objects. Unknown keys are ignored
/// with a warning on stderr.
std::vector<CommitRecord> parse_input_file(const std::filesystem::path& path);

/// Same, from an in-memory JSON document.
std::vector<CommitRecord> parse_commits(const nlohmann::json& doc);

/// Split unified-diff text into per-file added/removed line lists.
/// Context lines are dropped. Text with no file or hunk headers yields
/// an empty list.
std::vector<FileChange> parse_unified_diff(const std::string& diff_text);

struct ValidationResult {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

ValidationResult validate_record(const CommitRecord& record, bool require_label);

/// Serialize back to the input schema (pre-split patch form).
nlohmann::json commit_to_json(const CommitRecord& record);
nlohmann::json commits_to_json(const std::vector<CommitRecord>& records);

/// Parse + validate a training file; every record must carry a label and
/// ids must be unique. Throws ValidationError listing violations.
LabeledDataset load_labeled_dataset(const std::filesystem::path& path);

/// Load a corpus directory of issue files (one JSON object per file:
/// {title, body, comments[]}). Files are read in lexicographic name order.
std::vector<IssueReport> load_issue_corpus(const std::filesystem::path& dir);

}  // namespace vfd
