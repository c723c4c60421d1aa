#pragma once

#include "spencerkit/cliffspin.hpp"
#include "spencerkit/exactla.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace spencerkit {

inline constexpr const char* kEngineVersion = "spencerkit 1.0.0";

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Stage names in dependency order.
const std::vector<std::string>& pipeline_stages();

struct SpinorChoice {
    enum class Kind { Full, Basis, Random } kind = Kind::Full;
    std::vector<Vec> basis;
    std::size_t dim = 0;
    std::uint64_t seed = 0;
};
struct AlgebraChoice {
    enum class Kind { Stabiliser, Full, Zero, Basis } kind = Kind::Full;
    std::vector<Vec> basis;
};
struct CocycleChoice {
    enum class Kind { Zero, Explicit, BasisElement } kind = Kind::Zero;
    Vec coefficients;  // over the cohomology representatives of H^{2,2}(a_-; a)
    std::size_t index = 0;
};

struct PipelineConfig {
    Signature sig;
    std::size_t n = 1;
    bool explicit_kappa = false;
    std::vector<ExactMatrix> tensor;
    SpinorChoice sp;
    AlgebraChoice h{AlgebraChoice::Kind::Stabiliser, {}};
    AlgebraChoice rp{AlgebraChoice::Kind::Full, {}};
    CocycleChoice cocycle;
    std::vector<std::string> checks;  // requested stages, in dependency order
    std::optional<std::string> output_path;
    std::uint64_t seed = 0;           // causality sampling
};

/// Throws ConfigError on schema violations and unknown keys.
PipelineConfig parse_config(const nlohmann::json& j);
PipelineConfig parse_config_text(const std::string& text);
/// Every field spelled out; output_path is left out since it does not affect results.
nlohmann::json canonical_config(const PipelineConfig& c);
std::string sha256_hex(const std::string& bytes);
std::string config_hash(const PipelineConfig& c, const std::string& version = kEngineVersion);

struct PipelineResult {
    std::string text;  // report bytes
    int exit_code = 0;
    bool from_cache = false;
};

/// Runs the requested stages and everything they depend on.
PipelineResult run_pipeline(const PipelineConfig& c);

/// Reports stored as <hash>.json under a directory, written through a temporary file and rename.
class ReportCache {
public:
    explicit ReportCache(std::filesystem::path dir, std::string version = kEngineVersion);
    /// SPENCERKIT_CACHE_DIR, else $XDG_CACHE_HOME/spencerkit, else ~/.cache/spencerkit.
    static std::filesystem::path default_dir();

    const std::filesystem::path& dir() const { return dir_; }
    /// Stored result iff present, intact and written by the same version.
    std::optional<PipelineResult> lookup(const std::string& hash) const;
    void store(const std::string& hash, const PipelineResult& r) const;
    std::vector<std::string> list() const;
    bool remove(const std::string& hash) const;
    std::size_t clear() const;

private:
    std::filesystem::path dir_;
    std::string version_;
};

PipelineResult run_cached(const PipelineConfig& c, const ReportCache* cache);

}  // namespace spencerkit
