// gaborfio: frame checks, decay scans, multiplier approximation sweeps and
// the dilation demonstration. See README.md for the config format.

#include "gaborfio/commands.hpp"
#include "gaborfio/parallel.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int threads_from_env()
{
    const char* env = std::getenv("GABORFIO_THREADS");
    if (!env || !*env)
        return 0;
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1) {
        std::cerr << "ignoring GABORFIO_THREADS=" << env << " (expected a positive integer)\n";
        return 0;
    }
    return static_cast<int>(v);
}

void write_file(const fs::path& path, const std::string& body)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << body;
}

int run(const std::string& command, const std::string& config_path, const std::string& out_dir,
        std::optional<std::uint64_t> seed)
{
    json doc = json::object();
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) {
            std::cerr << json{{"error", "config"}, {"issues", {{{"field", "--config"}, {"message", "cannot open " + config_path}}}}}.dump(2) << '\n';
            return gaborfio::exit_config;
        }
        try {
            doc = json::parse(in);
        } catch (const json::parse_error& e) {
            std::cerr << json{{"error", "config"}, {"issues", {{{"field", "--config"}, {"message", e.what()}}}}}.dump(2) << '\n';
            return gaborfio::exit_config;
        }
    }
    if (seed && doc.is_object())
        doc["seed"] = *seed;

    gaborfio::RunConfig cfg;
    try {
        cfg = gaborfio::parse_config(doc, command);
    } catch (const gaborfio::ConfigError& e) {
        std::cerr << e.to_json().dump(2) << '\n';
        return gaborfio::exit_config;
    }

    const gaborfio::CommandResult result = gaborfio::run_command(command, cfg);
    fs::create_directories(out_dir);
    for (const auto& f : result.files)
        write_file(fs::path(out_dir) / f.name, f.body);
    json report = result.report.to_json();
    report["provenance"]["exit_code"] = result.exit_code;
    write_file(fs::path(out_dir) / "report.json", report.dump(2) + "\n");

    std::cout << command << ": exit " << result.exit_code << ", report in " << (fs::path(out_dir) / "report.json").string() << '\n';
    std::cout << result.report.verdicts.dump() << '\n';
    return result.exit_code;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Gabor frames, Fourier integral operators and warped Gabor multipliers"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "gaborfio_out";
    std::uint64_t seed = 0;
    int threads = 0;
    app.add_option("--config", config_path, "JSON run configuration");
    app.add_option("--out", out_dir, "output directory for CSV files and report.json");
    auto* seed_opt = app.add_option("--seed", seed, "random seed (overrides the config)");
    app.add_option("--threads", threads, "worker threads (overrides GABORFIO_THREADS)")->check(CLI::PositiveNumber);

    const std::vector<std::pair<const char*, const char*>> commands{
        {"frame-check", "frame bounds, tight and dual windows"},
        {"decay-scan", "off-diagonal decay of the Gabor matrix of an FIO"},
        {"approximate", "truncated multiplier sums and their error curve"},
        {"dilation-demo", "closed-form vs extracted multiplier symbols of a dilation"},
        {"warp-frame", "frame bounds of a warped lattice and a density sweep"},
    };
    for (const auto& [name, help] : commands)
        app.add_subcommand(name, help)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : gaborfio::exit_config;
    }

    const int env_threads = threads_from_env();
    gaborfio::set_thread_count(threads > 0 ? threads : (env_threads > 0 ? env_threads : 1));

    std::string command;
    for (const auto* sub : app.get_subcommands())
        command = sub->get_name();
    try {
        return run(command, config_path, out_dir,
                   seed_opt->count() ? std::optional<std::uint64_t>(seed) : std::nullopt);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return gaborfio::exit_config;
    }
}
