#include <exception>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cli_common.hpp"
#include "vfdetect/ingest.hpp"
#include "vfdetect/linker.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Build and persist an issue-linker index from a corpus directory"};

    std::string corpus_path;
    std::string output_path = "linker.json";
    double threshold = 0.5;
    app.add_option("--corpus_path,--corpus-path", corpus_path,
                   "Directory of issue JSON files ({title, body, comments[]})")
        ->required();
    app.add_option("--output,-o", output_path, "Path for the persisted linker artifact");
    app.add_option("--threshold", threshold, "Similarity threshold in [0,1]")
        ->check(CLI::Range(0.0, 1.0));

    auto args = vfd::cli::normalize_args(argc, argv);
    auto pointers = vfd::cli::arg_pointers(args);
    CLI11_PARSE(app, static_cast<int>(pointers.size()), pointers.data());

    try {
        if (!std::filesystem::is_directory(corpus_path)) {
            std::cerr << "error: corpus not found: " << corpus_path << "\n";
            return 1;
        }
        auto issues = vfd::load_issue_corpus(corpus_path);
        if (issues.empty()) {
            std::cerr << "error: empty corpus: " << corpus_path << "\n";
            return 1;
        }
        vfd::LinkerConfig config;
        config.similarity_threshold = threshold;
        config.corpus_path = corpus_path;
        auto index = vfd::build_linker(std::move(issues), std::move(config));
        vfd::persist_linker(index, output_path);

        std::cout << "linker built: " << index.issues.size() << " issues, "
                  << index.nl_model.vocabulary.size() << " nl terms, "
                  << index.code_model.vocabulary.size() << " code terms\n"
                  << "artifact written to " << output_path << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
