#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cli_common.hpp"
#include "vfdetect/ingest.hpp"
#include "vfdetect/pipeline.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Score commits: prediction mode (thresholded flags) or ranking mode"};

    std::string mode;
    std::string input_path;
    std::string output_path;
    std::string model_dir = "models";
    std::string linker_path;
    double threshold = -1.0;

    app.add_option("--mode", mode, "prediction or ranking")
        ->required()
        ->check(CLI::IsMember({"prediction", "ranking"}));
    app.add_option("--input,-i", input_path, "Input commit JSON file")->required();
    app.add_option("--output,-o", output_path, "Output JSON file")->required();
    app.add_option("--threshold", threshold, "Decision threshold (prediction mode)")
        ->check(CLI::Range(0.0, 1.0));
    app.add_option("--model-dir,--model_dir", model_dir, "Trained model directory");
    app.add_option("--linker", linker_path, "Optional linker artifact");

    auto args = vfd::cli::normalize_args(argc, argv);
    auto pointers = vfd::cli::arg_pointers(args);
    CLI11_PARSE(app, static_cast<int>(pointers.size()), pointers.data());

    try {
        if (mode == "ranking" && threshold >= 0.0) {
            std::cerr << "warning: --threshold is ignored in ranking mode\n";
            threshold = -1.0;
        }

        auto commits = vfd::parse_input_file(input_path);
        auto bundle = vfd::load_models(model_dir);

        std::optional<vfd::LinkerIndex> linker;
        if (!linker_path.empty()) {
            linker = vfd::load_linker(linker_path);
        }

        auto scored = vfd::score_commits(bundle, linker ? &*linker : nullptr, commits,
                                         threshold);
        const std::size_t scored_count = scored.size();

        nlohmann::json output = nlohmann::json::array();
        if (mode == "prediction") {
            for (const auto& commit : scored) {
                output.push_back({{"id", commit.id},
                                  {"probability", commit.probability},
                                  {"prediction", commit.flagged}});
            }
        } else {
            for (const auto& commit : vfd::rank_commits(std::move(scored))) {
                output.push_back({{"id", commit.id}, {"probability", commit.probability}});
            }
        }

        std::ofstream out(output_path, std::ios::binary | std::ios::trunc);
        if (!out) {
            std::cerr << "error: cannot write output file: " << output_path << "\n";
            return 1;
        }
        out << output.dump(2) << "\n";
        out.flush();
        if (!out) {
            std::cerr << "error: failed writing output file: " << output_path << "\n";
            return 1;
        }
        std::cout << "scored " << scored_count << " commits -> " << output_path << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
