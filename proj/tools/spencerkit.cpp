#include "spencerkit/pipeline.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace spencerkit;

namespace {

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot read " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

int emit(const PipelineConfig& c, const PipelineResult& r)
{
    if (c.output_path) {
        std::ofstream out(*c.output_path, std::ios::binary | std::ios::trunc);
        if (!out) {
            std::cerr << "error: cannot write " << *c.output_path << "\n";
            return 2;
        }
        out << r.text;
    } else {
        std::cout << r.text;
    }
    if (r.from_cache)
        std::cerr << "served from cache\n";
    return r.exit_code;
}

int run(const std::string& path, bool no_cache, bool cohomology_only)
{
    PipelineConfig c = parse_config_text(read_file(path));
    if (cohomology_only) {
        const auto& names = pipeline_stages();
        auto end = std::find(names.begin(), names.end(), "cohomology") + 1;
        std::vector<std::string> kept;
        for (const auto& s : c.checks)
            if (std::find(names.begin(), end, s) != end)
                kept.push_back(s);
        if (kept.empty() || kept.back() != "cohomology")
            kept.push_back("cohomology");
        c.checks = kept;
    }
    if (no_cache)
        return emit(c, run_pipeline(c));
    ReportCache cache(ReportCache::default_dir());
    return emit(c, run_cached(c, &cache));
}

int verify(const std::string& path)
{
    const std::string text = read_file(path);
    nlohmann::json report;
    try {
        report = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("report is not valid JSON: ") + e.what());
    }
    if (!report.contains("config"))
        throw ConfigError("report has no embedded config");
    PipelineConfig c = parse_config(report.at("config"));
    PipelineResult fresh = run_pipeline(c);
    if (fresh.text != text) {
        std::cerr << "verify: recomputed report differs from " << path << "\n";
        return 3;
    }
    std::cerr << "verify: report reproduced byte for byte\n";
    return fresh.exit_code;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Filtered deformations of flat supersymmetric algebras"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kEngineVersion));

    std::string config_path, report_path, hash;
    bool no_cache = false;

    auto* run_cmd = app.add_subcommand("run", "Run every requested stage of a config");
    run_cmd->add_option("config", config_path, "Config JSON")->required();
    run_cmd->add_flag("--no-cache", no_cache, "Bypass the report cache");

    auto* coh_cmd = app.add_subcommand("cohomology", "Run a config up to the cohomology stage");
    coh_cmd->add_option("config", config_path, "Config JSON")->required();
    coh_cmd->add_flag("--no-cache", no_cache, "Bypass the report cache");

    auto* verify_cmd = app.add_subcommand("verify", "Recompute a report and compare it byte for byte");
    verify_cmd->add_option("report", report_path, "Report JSON")->required();

    auto* cache_cmd = app.add_subcommand("cache", "Inspect the report cache");
    cache_cmd->require_subcommand(1);
    auto* ls_cmd = cache_cmd->add_subcommand("ls", "List cached config hashes");
    auto* rm_cmd = cache_cmd->add_subcommand("rm", "Remove one entry, or all entries");
    rm_cmd->add_option("hash", hash, "Config hash; omit to clear the cache");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*run_cmd)
            return run(config_path, no_cache, false);
        if (*coh_cmd)
            return run(config_path, no_cache, true);
        if (*verify_cmd)
            return verify(report_path);
        ReportCache cache(ReportCache::default_dir());
        if (*ls_cmd) {
            for (const auto& h : cache.list())
                std::cout << h << "\n";
            return 0;
        }
        if (*rm_cmd) {
            if (hash.empty()) {
                std::cerr << "removed " << cache.clear() << " entries\n";
                return 0;
            }
            if (!cache.remove(hash)) {
                std::cerr << "error: no cache entry " << hash << "\n";
                return 2;
            }
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
