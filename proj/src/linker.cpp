#include "vfdetect/linker.hpp"

#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace vfd {

using nlohmann::json;

TermProfile issue_profile(const IssueReport& issue) {
    TermProfile profile = extract_terms(issue.title);
    profile.merge(extract_terms(issue.body));
    for (const auto& comment : issue.comments) {
        profile.merge(extract_terms(comment));
    }
    return profile;
}

TermProfile commit_profile(const CommitRecord& commit) {
    TermProfile profile = extract_terms(commit.message);
    for (const auto& change : commit.patch) {
        for (const auto& line : change.added_lines) profile.merge(extract_terms(line));
        for (const auto& line : change.removed_lines) profile.merge(extract_terms(line));
    }
    return profile;
}

LinkerIndex build_linker(std::vector<IssueReport> issues, LinkerConfig config) {
    if (config.similarity_threshold < 0.0 || config.similarity_threshold > 1.0) {
        throw std::invalid_argument("similarity_threshold must be in [0,1]");
    }
    if (issues.empty()) {
        throw std::invalid_argument("empty corpus");
    }
    LinkerIndex index;
    index.issues = std::move(issues);
    index.config = std::move(config);

    std::vector<TermProfile> profiles;
    profiles.reserve(index.issues.size());
    for (const auto& issue : index.issues) {
        profiles.push_back(issue_profile(issue));
    }
    index.nl_model = fit_tfidf(profiles, Channel::nl);
    index.code_model = fit_tfidf(profiles, Channel::code);
    index.nl_vectors.reserve(profiles.size());
    index.code_vectors.reserve(profiles.size());
    for (const auto& profile : profiles) {
        index.nl_vectors.push_back(vectorize(index.nl_model, profile));
        index.code_vectors.push_back(vectorize(index.code_model, profile));
    }
    return index;
}

double similarity(const LinkerIndex& index, const TermProfile& commit, std::size_t position) {
    if (position >= index.issues.size()) {
        throw std::out_of_range("issue position out of range");
    }
    SparseVector nl = vectorize(index.nl_model, commit);
    SparseVector code = vectorize(index.code_model, commit);
    return std::max(cosine(nl, index.nl_vectors[position]),
                    cosine(code, index.code_vectors[position]));
}

std::optional<std::size_t> link_commit_position(const LinkerIndex& index,
                                                const CommitRecord& commit) {
    if (commit.issue) {
        throw std::logic_error("link_commit called on a commit with an explicit issue");
    }
    TermProfile profile = commit_profile(commit);
    if (profile.empty()) return std::nullopt;

    SparseVector nl = vectorize(index.nl_model, profile);
    SparseVector code = vectorize(index.code_model, profile);

    double best = -1.0;
    std::size_t best_position = 0;
    for (std::size_t i = 0; i < index.issues.size(); ++i) {
        double score = std::max(cosine(nl, index.nl_vectors[i]),
                                cosine(code, index.code_vectors[i]));
        if (score > best) {  // strict: ties keep the lowest position
            best = score;
            best_position = i;
        }
    }
    if (best > index.config.similarity_threshold) return best_position;
    return std::nullopt;
}

std::optional<IssueReport> link_commit(const LinkerIndex& index, const CommitRecord& commit) {
    auto position = link_commit_position(index, commit);
    if (!position) return std::nullopt;
    return index.issues[*position];
}

namespace {

json model_to_json(const TfidfModel& model) {
    // vocabulary emitted as a sorted term array; indices are implicit
    json terms = json::array();
    json idf = json::array();
    for (const auto& [term, index] : model.vocabulary) {
        terms.push_back(term);
        idf.push_back(model.idf[index]);
    }
    return {{"channel", model.channel == Channel::nl ? "nl" : "code"},
            {"document_count", model.document_count},
            {"terms", std::move(terms)},
            {"idf", std::move(idf)}};
}

TfidfModel model_from_json(const json& doc) {
    TfidfModel model;
    model.channel = doc.at("channel").get<std::string>() == "nl" ? Channel::nl : Channel::code;
    model.document_count = doc.at("document_count").get<std::size_t>();
    const auto& terms = doc.at("terms");
    const auto& idf = doc.at("idf");
    for (std::uint32_t i = 0; i < terms.size(); ++i) {
        model.vocabulary.emplace(terms.at(i).get<std::string>(), i);
        model.idf.push_back(idf.at(i).get<double>());
    }
    return model;
}

json sparse_to_json(const SparseVector& vec) {
    json indices = json::array();
    json weights = json::array();
    for (const auto& [index, weight] : vec) {
        indices.push_back(index);
        weights.push_back(weight);
    }
    return {{"indices", std::move(indices)}, {"weights", std::move(weights)}};
}

SparseVector sparse_from_json(const json& doc) {
    SparseVector vec;
    const auto& indices = doc.at("indices");
    const auto& weights = doc.at("weights");
    for (std::size_t i = 0; i < indices.size(); ++i) {
        vec[indices.at(i).get<std::uint32_t>()] = weights.at(i).get<double>();
    }
    return vec;
}

}  // namespace

void persist_linker(const LinkerIndex& index, const std::filesystem::path& path) {
    json issues = json::array();
    for (const auto& issue : index.issues) {
        issues.push_back({{"title", issue.title},
                          {"body", issue.body},
                          {"comments", issue.comments}});
    }
    json nl_vectors = json::array();
    json code_vectors = json::array();
    for (const auto& vec : index.nl_vectors) nl_vectors.push_back(sparse_to_json(vec));
    for (const auto& vec : index.code_vectors) code_vectors.push_back(sparse_to_json(vec));

    json doc = {{"format_version", kLinkerFormatVersion},
                {"config",
                 {{"similarity_threshold", index.config.similarity_threshold},
                  {"corpus_path", index.config.corpus_path}}},
                {"issues", std::move(issues)},
                {"nl_model", model_to_json(index.nl_model)},
                {"code_model", model_to_json(index.code_model)},
                {"nl_vectors", std::move(nl_vectors)},
                {"code_vectors", std::move(code_vectors)}};

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write linker artifact: " + path.string());
    }
    out << doc.dump(2) << "\n";
}

LinkerIndex load_linker(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open linker artifact: " + path.string());
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::runtime_error("corrupt linker artifact (expected format version " +
                                 std::to_string(kLinkerFormatVersion) + "): " + e.what());
    }
    if (!doc.is_object() || doc.value("format_version", -1) != kLinkerFormatVersion) {
        throw std::runtime_error("linker artifact format version mismatch: expected " +
                                 std::to_string(kLinkerFormatVersion));
    }
    LinkerIndex index;
    index.config.similarity_threshold = doc.at("config").at("similarity_threshold").get<double>();
    index.config.corpus_path = doc.at("config").at("corpus_path").get<std::string>();
    for (const auto& issue : doc.at("issues")) {
        index.issues.push_back(IssueReport{issue.at("title").get<std::string>(),
                                           issue.at("body").get<std::string>(),
                                           issue.at("comments").get<std::vector<std::string>>()});
    }
    index.nl_model = model_from_json(doc.at("nl_model"));
    index.code_model = model_from_json(doc.at("code_model"));
    for (const auto& vec : doc.at("nl_vectors")) index.nl_vectors.push_back(sparse_from_json(vec));
    for (const auto& vec : doc.at("code_vectors")) {
        index.code_vectors.push_back(sparse_from_json(vec));
    }
    if (index.nl_vectors.size() != index.issues.size() ||
        index.code_vectors.size() != index.issues.size()) {
        throw std::runtime_error("corrupt linker artifact: vector/issue count mismatch");
    }
    return index;
}

}  // namespace vfd
