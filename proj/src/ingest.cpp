#include "vfdetect/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

namespace vfd {

using nlohmann::json;

LabeledDataset LabeledDataset::from_records(std::vector<CommitRecord> records) {
    LabeledDataset data;
    data.records = std::move(records);
    for (const auto& record : data.records) {
        if (!record.label) {
            throw ValidationError("record '" + record.id + "': label absent");
        }
        (*record.label ? data.positive_count : data.negative_count) += 1;
    }
    return data;
}

namespace {

void warn_unknown_keys(const json& object, const std::set<std::string>& known,
                       const std::string& where) {
    for (const auto& [key, value] : object.items()) {
        if (!known.contains(key)) {
            std::cerr << "warning: ignoring unknown key \"" << key << "\" in " << where << "\n";
        }
    }
}

std::vector<std::string> string_list(const json& value, const std::string& where) {
    if (!value.is_array()) {
        throw ParseError(where + ": expected an array of strings");
    }
    std::vector<std::string> out;
    out.reserve(value.size());
    for (const auto& item : value) {
        if (!item.is_string()) {
            throw ParseError(where + ": expected string elements");
        }
        out.push_back(item.get<std::string>());
    }
    return out;
}

IssueReport parse_issue(const json& value, const std::string& where) {
    if (!value.is_object()) {
        throw ParseError(where + ": \"issue\" must be an object");
    }
    warn_unknown_keys(value, {"title", "body", "comments"}, where + ".issue");
    IssueReport issue;
    issue.title = value.value("title", std::string{});
    issue.body = value.value("body", std::string{});
    if (value.contains("comments")) {
        issue.comments = string_list(value.at("comments"), where + ".issue.comments");
    }
    return issue;
}

std::vector<FileChange> parse_patch_entry(const json& entry, const std::string& where) {
    if (entry.is_string()) {
        return parse_unified_diff(entry.get<std::string>());
    }
    if (entry.is_object()) {
        warn_unknown_keys(entry, {"file_path", "added", "removed"}, where);
        FileChange change;
        change.file_path = entry.value("file_path", std::string{});
        if (entry.contains("added")) {
            change.added_lines = string_list(entry.at("added"), where + ".added");
        }
        if (entry.contains("removed")) {
            change.removed_lines = string_list(entry.at("removed"), where + ".removed");
        }
        return {std::move(change)};
    }
    throw ParseError(where + ": patch entries must be diff strings or {added, removed} objects");
}

CommitRecord parse_commit(const json& object, std::size_t index) {
    const std::string where = "commit[" + std::to_string(index) + "]";
    if (!object.is_object()) {
        throw ParseError(where + ": expected an object");
    }
    if (!object.contains("id")) {
        throw ValidationError(where + ": missing \"id\"");
    }
    warn_unknown_keys(object, {"id", "message", "issue", "patch", "label"}, where);

    CommitRecord record;
    if (!object.at("id").is_string()) {
        throw ParseError(where + ": \"id\" must be a string");
    }
    record.id = object.at("id").get<std::string>();
    record.message = object.value("message", std::string{});
    if (object.contains("issue") && !object.at("issue").is_null()) {
        record.issue = parse_issue(object.at("issue"), where);
    }
    if (object.contains("patch")) {
        const json& patch = object.at("patch");
        if (!patch.is_array()) {
            throw ParseError(where + ": \"patch\" must be an array");
        }
        std::size_t entry_index = 0;
        for (const auto& entry : patch) {
            auto changes = parse_patch_entry(
                entry, where + ".patch[" + std::to_string(entry_index) + "]");
            std::move(changes.begin(), changes.end(), std::back_inserter(record.patch));
            ++entry_index;
        }
    }
    if (object.contains("label") && !object.at("label").is_null()) {
        if (!object.at("label").is_boolean()) {
            throw ParseError(where + ": \"label\" must be a boolean");
        }
        record.label = object.at("label").get<bool>();
    }
    return record;
}

}  // namespace

std::vector<CommitRecord> parse_commits(const json& doc) {
    if (!doc.is_array()) {
        throw ParseError("input must be a JSON array of commit objects");
    }
    std::vector<CommitRecord> records;
    records.reserve(doc.size());
    std::unordered_set<std::string> seen_ids;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        CommitRecord record = parse_commit(doc.at(i), i);
        if (!seen_ids.insert(record.id).second) {
            throw ValidationError("commit[" + std::to_string(i) + "]: duplicate id \"" +
                                  record.id + "\"");
        }
        records.push_back(std::move(record));
    }
    return records;
}

std::vector<CommitRecord> parse_input_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("cannot open input file: " + path.string());
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError("malformed JSON in " + path.string() + " at byte " +
                         std::to_string(e.byte) + ": " + e.what());
    }
    return parse_commits(doc);
}

std::vector<FileChange> parse_unified_diff(const std::string& diff_text) {
    std::vector<FileChange> changes;
    FileChange* current = nullptr;
    bool in_hunk = false;
    bool header_pending = false;  // file opened by "diff --git", +++ not seen yet

    auto start_file = [&](std::string path) {
        changes.push_back(FileChange{std::move(path), {}, {}});
        current = &changes.back();
        in_hunk = false;
    };

    auto strip_prefix = [](std::string_view path) {
        if (path.starts_with("a/") || path.starts_with("b/")) path.remove_prefix(2);
        return std::string(path);
    };

    std::istringstream stream(diff_text);
    std::string line;
    std::string pending_old_path;
    while (std::getline(stream, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();

        if (line.starts_with("diff --git ")) {
            // "diff --git a/<path> b/<path>"
            auto pos = line.rfind(" b/");
            std::string path = pos != std::string::npos ? line.substr(pos + 3) : std::string{};
            start_file(std::move(path));
            header_pending = true;
            pending_old_path.clear();
            continue;
        }
        if (line.starts_with("--- ")) {
            pending_old_path = strip_prefix(std::string_view(line).substr(4));
            in_hunk = false;
            continue;
        }
        if (line.starts_with("+++ ")) {
            std::string path = strip_prefix(std::string_view(line).substr(4));
            if (path == "/dev/null") path = pending_old_path;
            // A ---/+++ pair opens a file unless "diff --git" already did.
            if (header_pending && current != nullptr) {
                if (current->file_path.empty()) current->file_path = std::move(path);
                header_pending = false;
            } else {
                start_file(std::move(path));
            }
            continue;
        }
        if (line.starts_with("@@")) {
            if (current == nullptr) start_file("");
            in_hunk = true;
            header_pending = false;
            continue;
        }
        if (current == nullptr || !in_hunk) continue;
        if (line.starts_with("+")) {
            current->added_lines.push_back(line.substr(1));
        } else if (line.starts_with("-")) {
            current->removed_lines.push_back(line.substr(1));
        }
        // context and "\ No newline at end of file" lines are dropped
    }
    return changes;
}

ValidationResult validate_record(const CommitRecord& record, bool require_label) {
    ValidationResult result;
    if (record.id.empty()) {
        result.violations.push_back("empty id");
    }
    if (require_label && !record.label) {
        result.violations.push_back("label absent");
    }
    if (record.issue && !record.issue->usable()) {
        result.violations.push_back("issue present but both title and body are empty");
    }
    return result;
}

json commit_to_json(const CommitRecord& record) {
    json patch = json::array();
    for (const auto& change : record.patch) {
        patch.push_back({{"file_path", change.file_path},
                         {"added", change.added_lines},
                         {"removed", change.removed_lines}});
    }
    json object = {{"id", record.id}, {"message", record.message}, {"patch", std::move(patch)}};
    if (record.issue) {
        object["issue"] = {{"title", record.issue->title},
                           {"body", record.issue->body},
                           {"comments", record.issue->comments}};
    }
    if (record.label) {
        object["label"] = *record.label;
    }
    return object;
}

json commits_to_json(const std::vector<CommitRecord>& records) {
    json array = json::array();
    for (const auto& record : records) {
        array.push_back(commit_to_json(record));
    }
    return array;
}

LabeledDataset load_labeled_dataset(const std::filesystem::path& path) {
    auto records = parse_input_file(path);
    std::vector<std::string> violations;
    for (std::size_t i = 0; i < records.size(); ++i) {
        auto result = validate_record(records[i], /*require_label=*/true);
        for (const auto& violation : result.violations) {
            violations.push_back("commit[" + std::to_string(i) + "] (" + records[i].id +
                                 "): " + violation);
        }
    }
    if (!violations.empty()) {
        std::string message = "training data invalid:";
        std::size_t shown = std::min<std::size_t>(violations.size(), 10);
        for (std::size_t i = 0; i < shown; ++i) {
            message += "\n  " + violations[i];
        }
        if (violations.size() > shown) {
            message += "\n  ... and " + std::to_string(violations.size() - shown) + " more";
        }
        throw ValidationError(message);
    }
    return LabeledDataset::from_records(std::move(records));
}

std::vector<IssueReport> load_issue_corpus(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) {
        throw ParseError("corpus not found: " + dir.string());
    }
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());

    std::vector<IssueReport> issues;
    for (const auto& file : files) {
        std::ifstream in(file, std::ios::binary);
        json doc;
        try {
            doc = json::parse(in);
        } catch (const json::parse_error& e) {
            throw ParseError("malformed JSON in " + file.string() + " at byte " +
                             std::to_string(e.byte) + ": " + e.what());
        }
        if (!doc.is_object()) {
            throw ParseError(file.string() + ": expected one issue object");
        }
        warn_unknown_keys(doc, {"title", "body", "comments"}, file.filename().string());
        issues.push_back(parse_issue(doc, file.filename().string()));
    }
    return issues;
}

}  // namespace vfd
