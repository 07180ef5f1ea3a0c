#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "vfdetect/tfidf.hpp"

using namespace vfd;

TEST_CASE("extract_terms: empty text") {
    CHECK(extract_terms("").empty());
}

TEST_CASE("extract_terms: routes identifiers to the code channel") {
    auto profile = extract_terms("Fix buffer overflow in parseHeader()");
    CHECK(profile.nl_terms == std::map<std::string, int>{{"fix", 1}, {"buffer", 1},
                                                         {"overflow", 1}});
    CHECK(profile.code_terms == std::map<std::string, int>{{"parseHeader", 1}});
}

TEST_CASE("extract_terms: plain words stay natural language") {
    auto profile = extract_terms("update README");
    CHECK(profile.nl_terms == std::map<std::string, int>{{"update", 1}, {"readme", 1}});
    CHECK(profile.code_terms.empty());
}

TEST_CASE("extract_terms: underscore and dot-path identifiers") {
    auto profile = extract_terms("call os.path and do_work now");
    CHECK(profile.code_terms.count("os.path") == 1);
    CHECK(profile.code_terms.count("do_work") == 1);
    CHECK(profile.nl_terms == std::map<std::string, int>{{"call", 1}, {"now", 1}});
}

TEST_CASE("fit_tfidf: smoothed idf values") {
    // single document {a}: idf(a) = ln(2/2) + 1 = 1
    std::vector<TermProfile> docs(1);
    docs[0].nl_terms = {{"a", 1}};
    auto model = fit_tfidf(docs, Channel::nl);
    REQUIRE(model.vocabulary.size() == 1);
    CHECK(model.idf[0] == doctest::Approx(1.0).epsilon(1e-12));

    // a term present in every one of N documents also has idf 1
    std::vector<TermProfile> many(5);
    for (auto& doc : many) doc.nl_terms = {{"common", 1}};
    many[0].nl_terms["rare"] = 1;
    auto model5 = fit_tfidf(many, Channel::nl);
    CHECK(model5.idf[model5.vocabulary.at("common")] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(model5.idf[model5.vocabulary.at("rare")] ==
          doctest::Approx(std::log(6.0 / 2.0) + 1.0).epsilon(1e-12));
}

TEST_CASE("fit_tfidf: deterministic and rejects an empty corpus") {
    std::vector<TermProfile> docs(2);
    docs[0].nl_terms = {{"x", 2}};
    docs[1].nl_terms = {{"y", 1}};
    auto a = fit_tfidf(docs, Channel::nl);
    auto b = fit_tfidf(docs, Channel::nl);
    CHECK(a.vocabulary == b.vocabulary);
    CHECK(a.idf == b.idf);

    std::vector<TermProfile> empty;
    CHECK_THROWS_WITH_AS(fit_tfidf(empty, Channel::nl), "empty corpus", std::invalid_argument);
}

TEST_CASE("vectorize: zero vectors for OOV and empty profiles, unit norm otherwise") {
    std::vector<TermProfile> docs(2);
    docs[0].nl_terms = {{"alpha", 1}, {"beta", 2}};
    docs[1].nl_terms = {{"gamma", 1}};
    auto model = fit_tfidf(docs, Channel::nl);

    TermProfile oov;
    oov.nl_terms = {{"delta", 3}};
    CHECK(vectorize(model, oov).empty());
    CHECK(vectorize(model, TermProfile{}).empty());

    auto vec = vectorize(model, docs[0]);
    double norm = 0.0;
    for (const auto& [i, w] : vec) norm += w * w;
    CHECK(std::sqrt(norm) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("vectorize: invariant to term order within a profile") {
    std::vector<TermProfile> docs(1);
    docs[0].nl_terms = {{"a", 1}, {"b", 1}, {"c", 1}};
    auto model = fit_tfidf(docs, Channel::nl);

    TermProfile forward, backward;
    for (const char* term : {"a", "b", "c"}) forward.nl_terms[term] += 1;
    for (const char* term : {"c", "b", "a"}) backward.nl_terms[term] += 1;
    CHECK(vectorize(model, forward) == vectorize(model, backward));
}

TEST_CASE("cosine: identical, orthogonal, and zero vectors") {
    SparseVector a{{0, 0.6}, {1, 0.8}};
    SparseVector b{{2, 1.0}};
    CHECK(cosine(a, a) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cosine(a, b) == 0.0);
    CHECK(cosine(a, SparseVector{}) == 0.0);
    CHECK(cosine(SparseVector{}, SparseVector{}) == 0.0);
}
