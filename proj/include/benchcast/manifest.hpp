#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "benchcast/rng.hpp"

namespace benchcast {

inline constexpr const char* kToolkitVersion = "0.1.0";

inline std::string file_digest_hex(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("digest: cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string bytes = buf.str();
    std::ostringstream hex;
    hex << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(bytes);
    return hex.str();
}

// Reproducibility sidecar written by every CLI invocation: the command, its
// full parameter set, the seeds, digests of every input file, and the list
// of files produced. The timestamp is the one field that varies between
// otherwise identical runs.
struct RunManifest {
    std::string command;
    std::map<std::string, std::string> parameters;
    std::uint64_t seed = 0;
    std::vector<std::filesystem::path> inputs;
    std::vector<std::filesystem::path> outputs;

    void write(const std::filesystem::path& path) const {
        nlohmann::json jin = nlohmann::json::array();
        for (const auto& p : inputs)
            jin.push_back({{"path", p.string()}, {"fnv1a64", file_digest_hex(p)}});
        nlohmann::json jout = nlohmann::json::array();
        for (const auto& p : outputs) jout.push_back(p.string());

        auto now = std::chrono::system_clock::now();
        auto t = std::chrono::system_clock::to_time_t(now);
        char stamp[32];
        std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));

        nlohmann::json j{{"command", command},     {"parameters", parameters},
                         {"seed", seed},           {"inputs", jin},
                         {"outputs", jout},        {"toolkit_version", kToolkitVersion},
                         {"written_at", stamp}};
        std::ofstream out(path);
        if (!out)
            throw std::runtime_error("manifest: cannot write " + path.string());
        out << j.dump(2) << "\n";
    }
};

}  // namespace benchcast
