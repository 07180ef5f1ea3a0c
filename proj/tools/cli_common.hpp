#pragma once

#include <cctype>
#include <string>
#include <vector>

namespace vfd::cli {

/// Accept both "--flag" and the single-dash "-flag" spelling: promote any
/// multi-character single-dash token that looks like a word to a long flag.
inline std::vector<std::string> normalize_args(int argc, char** argv) {
    std::vector<std::string> args;
    args.reserve(static_cast<std::size_t>(argc));
    for (int i = 0; i < argc; ++i) {
        std::string arg = argv[i];
        if (arg.size() > 2 && arg[0] == '-' && arg[1] != '-' &&
            std::isalpha(static_cast<unsigned char>(arg[1]))) {
            arg.insert(arg.begin(), '-');
        }
        args.push_back(std::move(arg));
    }
    return args;
}

inline std::vector<char*> arg_pointers(std::vector<std::string>& args) {
    std::vector<char*> pointers;
    pointers.reserve(args.size());
    for (auto& arg : args) pointers.push_back(arg.data());
    return pointers;
}

}  // namespace vfd::cli
