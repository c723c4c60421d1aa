#include "spencerkit/pipeline.hpp"

#include "spencerkit/flatmodel.hpp"
#include "spencerkit/spencer.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

using namespace spencerkit;
using nlohmann::json;

namespace {

PipelineConfig cfg(const std::string& text) { return parse_config_text(text); }

json report_of(const PipelineResult& r) { return json::parse(r.text); }

const json* stage(const json& report, const std::string& name)
{
    for (const auto& s : report.at("stages"))
        if (s.at("name") == name)
            return &s;
    return nullptr;
}

struct TempDir {
    std::filesystem::path path;
    TempDir()
    {
        path = std::filesystem::temp_directory_path() /
               ("spencerkit-test-" + std::to_string(std::random_device{}()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

const char* kZeroD3 = R"({"signature":{"s":2,"t":1},"N":1,"cocycle":"zero"})";

}  // namespace

TEST(Config, DefaultsAreFilledIn)
{
    auto c = cfg(R"({"signature":{"s":3,"t":1},"N":2})");
    EXPECT_EQ(c.sig.s, 3);
    EXPECT_EQ(c.sig.t, 1);
    EXPECT_EQ(c.n, 2u);
    EXPECT_FALSE(c.explicit_kappa);
    EXPECT_EQ(c.sp.kind, SpinorChoice::Kind::Full);
    EXPECT_EQ(c.h.kind, AlgebraChoice::Kind::Stabiliser);
    EXPECT_EQ(c.rp.kind, AlgebraChoice::Kind::Full);
    EXPECT_EQ(c.cocycle.kind, CocycleChoice::Kind::Zero);
    EXPECT_EQ(c.checks, pipeline_stages());
}

TEST(Config, UnknownKeysAreRejected)
{
    EXPECT_THROW(cfg(R"({"signature":{"s":2,"t":1},"N":1,"extra":0})"), ConfigError);
    EXPECT_THROW(cfg(R"({"signature":{"s":2,"t":1,"u":0},"N":1})"), ConfigError);
    EXPECT_THROW(cfg(R"({"signature":{"s":2,"t":1},"N":1,"subalgebra":{"S_prime":"full","g":"full"}})"),
                 ConfigError);
    EXPECT_THROW(cfg(R"({"signature":{"s":2,"t":1},"N":1,"cocycle":{"explicit":[],"other":1}})"), ConfigError);
}

TEST(Config, SchemaViolations)
{
    EXPECT_THROW(cfg("not json"), ConfigError);
    EXPECT_THROW(cfg(R"({"N":1})"), ConfigError);
    EXPECT_THROW(cfg(R"({"signature":{"s":2,"t":1},"N":0})"), ConfigError);
    EXPECT_THROW(cfg(R"({"signature":{"s":2,"t":1},"N":-1})"), ConfigError);
    EXPECT_THROW(cfg(R"({"signature":{"s":2,"t":1},"N":1,"dirac_current":{"kind":"odd"}})"), ConfigError);
    EXPECT_THROW(cfg(R"({"signature":{"s":2,"t":1},"N":1,"subalgebra":{"h":"zero"}})"), ConfigError);
    EXPECT_THROW(cfg(R"({"signature":{"s":2,"t":1},"N":1,"subalgebra":{"r_prime":"stabiliser"}})"), ConfigError);
    EXPECT_THROW(cfg(R"({"signature":{"s":2,"t":1},"N":1,"cocycle":{"explicit":["1/0"]}})"), ConfigError);
    EXPECT_THROW(cfg(R"({"signature":{"s":2,"t":1},"N":1,"cocycle":{"explicit":[0.5]}})"), ConfigError);
}

TEST(Config, RandomSubspaceNeedsASeed)
{
    EXPECT_THROW(cfg(R"({"signature":{"s":3,"t":1},"N":1,"subalgebra":{"S_prime":{"random":{"dim":3}}}})"),
                 ConfigError);
    auto c = cfg(R"({"signature":{"s":3,"t":1},"N":1,"subalgebra":{"S_prime":{"random":{"dim":3,"seed":7}}}})");
    EXPECT_EQ(c.sp.kind, SpinorChoice::Kind::Random);
    EXPECT_EQ(c.sp.dim, 3u);
    EXPECT_EQ(c.sp.seed, 7u);
}

TEST(Config, RationalsAreIntegersOrFractionStrings)
{
    auto c = cfg(R"({"signature":{"s":2,"t":1},"N":1,"cocycle":{"explicit":[2,"-3/6","0"]}})");
    ASSERT_EQ(c.cocycle.coefficients.size(), 3u);
    EXPECT_EQ(c.cocycle.coefficients[0], 2);
    EXPECT_EQ(c.cocycle.coefficients[1], frac(-1, 2));
    EXPECT_EQ(c.cocycle.coefficients[2], 0);
    EXPECT_EQ(canonical_config(c)["cocycle"]["explicit"], json::array({"2", "-1/2", "0"}));
}

TEST(Config, ChecksMustBeKnownStagesInOrder)
{
    EXPECT_THROW(cfg(R"({"signature":{"s":2,"t":1},"N":1,"checks":["nope"]})"), ConfigError);
    EXPECT_THROW(cfg(R"({"signature":{"s":2,"t":1},"N":1,"checks":["theta","kappa"]})"), ConfigError);
    EXPECT_THROW(cfg(R"({"signature":{"s":2,"t":1},"N":1,"checks":[]})"), ConfigError);
    auto c = cfg(R"({"signature":{"s":2,"t":1},"N":1,"checks":["kappa","theta"]})");
    EXPECT_EQ(c.checks, (std::vector<std::string>{"kappa", "theta"}));
}

TEST(Config, CanonicalFormRoundTripsAndIgnoresOutputPath)
{
    auto a = cfg(R"({"N":1,"signature":{"t":1,"s":2},"output_path":"/tmp/x.json",
                     "subalgebra":{"S_prime":{"basis":[[1,"1/2"]]},"r_prime":"zero"}})");
    auto b = cfg(R"({"signature":{"s":2,"t":1},"N":1,"subalgebra":{"r_prime":"zero","S_prime":{"basis":[[2,1]]}}})");
    EXPECT_NE(canonical_config(a), canonical_config(b));  // bases are kept as given
    auto c = parse_config(canonical_config(a));
    EXPECT_EQ(canonical_config(c), canonical_config(a));
    EXPECT_EQ(config_hash(c), config_hash(a));
    EXPECT_FALSE(canonical_config(a).contains("output_path"));
    auto d = a;
    d.output_path.reset();
    EXPECT_EQ(config_hash(d), config_hash(a));
}

TEST(Hash, Sha256MatchesPublishedVectors)
{
    EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Hash, VersionIsPartOfTheKey)
{
    auto c = cfg(kZeroD3);
    EXPECT_NE(config_hash(c, "spencerkit 1.0.0"), config_hash(c, "spencerkit 1.0.1"));
    EXPECT_EQ(config_hash(c), config_hash(c, kEngineVersion));
    EXPECT_EQ(config_hash(c).size(), 64u);
}

TEST(Pipeline, ZeroClassEndToEnd)
{
    auto r = run_pipeline(cfg(kZeroD3));
    EXPECT_EQ(r.exit_code, 0);
    auto rep = report_of(r);
    EXPECT_EQ(rep["outcome"], "pass");
    EXPECT_EQ(rep["stages"].size(), pipeline_stages().size());
    for (const auto& s : rep["stages"])
        EXPECT_EQ(s["status"], "pass") << s["name"];
    EXPECT_TRUE((*stage(rep, "flat_model"))["result"]["jacobi"].get<bool>());
    EXPECT_EQ((*stage(rep, "cohomology"))["result"]["subalgebra"]["H21_dim"], 0);
    EXPECT_TRUE((*stage(rep, "deformation"))["result"]["equals_graded"].get<bool>());
    EXPECT_TRUE((*stage(rep, "reconstruction"))["result"]["R0"].empty());
    EXPECT_TRUE((*stage(rep, "reconstruction"))["result"]["F0"].empty());
    EXPECT_FALSE(rep.contains("timing"));
    EXPECT_EQ(rep["config_hash"], config_hash(cfg(kZeroD3)));
    EXPECT_EQ(rep["version"], kEngineVersion);
}

TEST(Pipeline, FlatModelBracketsAreNamedByBlocks)
{
    auto rep = report_of(run_pipeline(cfg(R"({"signature":{"s":2,"t":1},"N":1,"checks":["flat_model"]})")));
    const auto& b = (*stage(rep, "flat_model"))["result"]["brackets"];
    EXPECT_TRUE(b.contains("SS_V"));
    EXPECT_TRUE(b.contains("AV"));
    EXPECT_TRUE(b.contains("AS"));
    EXPECT_TRUE(b.contains("AA"));
    EXPECT_FALSE(b.contains("VV"));
    EXPECT_FALSE(b.contains("SV"));
}

TEST(Pipeline, ReportsAreByteIdentical)
{
    auto c = cfg(R"({"signature":{"s":3,"t":1},"N":1,"subalgebra":{"S_prime":{"random":{"dim":3,"seed":2}}},
                     "cocycle":{"basis_element":1}})");
    auto a = run_pipeline(c);
    auto b = run_pipeline(c);
    EXPECT_EQ(a.text, b.text);
    EXPECT_EQ(a.exit_code, b.exit_code);
    EXPECT_EQ(a.text.back(), '\n');
}

TEST(Pipeline, HomogeneityRankIsRecorded)
{
    auto rep = report_of(run_pipeline(
        cfg(R"({"signature":{"s":3,"t":1},"N":1,"subalgebra":{"S_prime":{"random":{"dim":3,"seed":7}}},
                "checks":["subalgebra"]})")));
    ASSERT_EQ(rep["stages"].size(), 1u);
    EXPECT_EQ((*stage(rep, "subalgebra"))["result"]["homogeneity_rank"], 4);

    // the rank of kappa on all products of pairs of basis spinors, computed directly
    auto m = build_flat_model({3, 1}, 1);
    auto sp = random_subspace(m.dim_s(), 3, 7);
    ExactMatrix values(0, m.dim_v());
    for (std::size_t i = 0; i < sp.dim(); ++i)
        for (std::size_t j = i; j < sp.dim(); ++j)
            values.append_row(m.kappa(sp.vector(i), sp.vector(j)));
    EXPECT_EQ(rank(values), 4u);
}

TEST(Pipeline, RequestedStagesOnly)
{
    auto rep = report_of(run_pipeline(cfg(R"({"signature":{"s":2,"t":1},"N":1,"checks":["kappa","cohomology"]})")));
    ASSERT_EQ(rep["stages"].size(), 2u);
    EXPECT_EQ(rep["stages"][0]["name"], "kappa");
    EXPECT_EQ(rep["stages"][1]["name"], "cohomology");
}

TEST(Pipeline, NoRealFormIsANegative)
{
    auto r = run_pipeline(cfg(R"({"signature":{"s":1,"t":3},"N":1})"));
    EXPECT_EQ(r.exit_code, 1);
    auto rep = report_of(r);
    ASSERT_EQ(rep["stages"].size(), 1u);
    EXPECT_EQ(rep["stages"][0]["status"], "negative");
    EXPECT_EQ(rep["stages"][0]["error"]["type"], "NoRealForm");
    EXPECT_FALSE(rep["stages"][0].contains("result"));
}

TEST(Pipeline, NonAdmissibleClassStopsWithCertificate)
{
    auto r = run_pipeline(cfg(R"({"signature":{"s":3,"t":1},"N":1,"cocycle":{"basis_element":0}})"));
    EXPECT_EQ(r.exit_code, 1);
    auto rep = report_of(r);
    EXPECT_EQ(rep["outcome"], "negative");
    const auto& last = rep["stages"].back();
    EXPECT_EQ(last["name"], "admissibility");
    EXPECT_FALSE(last["result"]["admissible"].get<bool>());
    EXPECT_FALSE(last["result"]["certificate"].empty());
    EXPECT_EQ(stage(rep, "theta"), nullptr);
}

TEST(Pipeline, OutOfRangeCocycleIsAConfigError)
{
    auto r = run_pipeline(cfg(R"({"signature":{"s":2,"t":1},"N":1,"cocycle":{"basis_element":5}})"));
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_EQ(report_of(r)["stages"].back()["error"]["type"], "ConfigError");
    r = run_pipeline(cfg(R"({"signature":{"s":2,"t":1},"N":1,"cocycle":{"explicit":[1,2]}})"));
    EXPECT_EQ(r.exit_code, 2);
}

TEST(Pipeline, ExplicitDiracCurrent)
{
    // the standard current spelled out as an explicit tensor gives the same kappa stage
    auto kappa = build_dirac_current(build_clifford_rep({2, 1}), 1);
    json tensor = json::array();
    for (const auto& k : kappa.components) {
        json rows = json::array();
        for (std::size_t i = 0; i < k.rows(); ++i) {
            json row = json::array();
            for (std::size_t j = 0; j < k.cols(); ++j)
                row.push_back(to_string(k(i, j)));
            rows.push_back(row);
        }
        tensor.push_back(rows);
    }
    json j = json::parse(R"({"signature":{"s":2,"t":1},"N":1,"checks":["kappa","flat_model"]})");
    auto standard = report_of(run_pipeline(parse_config(j)));
    j["dirac_current"] = json{{"kind", "explicit"}, {"tensor", tensor}};
    auto expl = run_pipeline(parse_config(j));
    EXPECT_EQ(expl.exit_code, 0);
    EXPECT_EQ(report_of(expl)["stages"], standard["stages"]);

    auto skew = run_pipeline(cfg(R"({"signature":{"s":2,"t":1},"N":1,"checks":["kappa"],
        "dirac_current":{"kind":"explicit","tensor":[[[0,1],[-1,0]],[[0,1],[-1,0]],[[0,1],[-1,0]]]}})"));
    EXPECT_EQ(skew.exit_code, 1);

    auto zero = run_pipeline(cfg(R"({"signature":{"s":2,"t":1},"N":1,"checks":["kappa"],
        "dirac_current":{"kind":"explicit","tensor":[[[0,0],[0,0]],[[0,0],[0,0]],[[0,0],[0,0]]]}})"));
    EXPECT_EQ(zero.exit_code, 1);
    EXPECT_EQ(report_of(zero)["stages"][0]["error"]["type"], "KappaZero");

    auto wrong = run_pipeline(cfg(R"({"signature":{"s":2,"t":1},"N":1,"checks":["kappa"],
        "dirac_current":{"kind":"explicit","tensor":[[[1,0],[0,1]]]}})"));
    EXPECT_EQ(wrong.exit_code, 2);
}

TEST(Cache, MissStoreHit)
{
    TempDir tmp;
    ReportCache cache(tmp.path);
    EXPECT_FALSE(cache.lookup("0000").has_value());
    PipelineResult r{"{\"a\": 1}\n", 1, false};
    cache.store("abcd", r);
    auto hit = cache.lookup("abcd");
    ASSERT_TRUE(hit.has_value());
    EXPECT_EQ(hit->text, r.text);
    EXPECT_EQ(hit->exit_code, 1);
    EXPECT_TRUE(hit->from_cache);
    EXPECT_EQ(cache.list(), std::vector<std::string>{"abcd"});
    for (const auto& e : std::filesystem::directory_iterator(tmp.path))
        EXPECT_EQ(e.path().extension(), ".json");  // no temporaries left behind
}

TEST(Cache, VersionBumpIsAMiss)
{
    TempDir tmp;
    ReportCache(tmp.path, "spencerkit 1.0.0").store("abcd", {"x\n", 0, false});
    EXPECT_FALSE(ReportCache(tmp.path, "spencerkit 1.0.1").lookup("abcd").has_value());
    EXPECT_TRUE(ReportCache(tmp.path, "spencerkit 1.0.0").lookup("abcd").has_value());
}

TEST(Cache, CorruptEntryIsAMiss)
{
    TempDir tmp;
    ReportCache cache(tmp.path);
    cache.store("abcd", {"original\n", 0, false});
    const auto path = tmp.path / "abcd.json";
    std::ifstream in(path);
    json env = json::parse(in);
    in.close();
    env["report"] = "tampered\n";
    std::ofstream(path) << env.dump();
    EXPECT_FALSE(cache.lookup("abcd").has_value());
    std::ofstream(path) << "{ truncated";
    EXPECT_FALSE(cache.lookup("abcd").has_value());
}

TEST(Cache, RemoveAndClear)
{
    TempDir tmp;
    ReportCache cache(tmp.path);
    cache.store("a", {"1\n", 0, false});
    cache.store("b", {"2\n", 0, false});
    EXPECT_TRUE(cache.remove("a"));
    EXPECT_FALSE(cache.remove("a"));
    EXPECT_EQ(cache.list(), std::vector<std::string>{"b"});
    EXPECT_EQ(cache.clear(), 1u);
    EXPECT_TRUE(cache.list().empty());
}

TEST(Cache, CachedAndUncachedRunsAgree)
{
    TempDir tmp;
    ReportCache cache(tmp.path);
    auto c = cfg(kZeroD3);
    auto first = run_cached(c, &cache);
    EXPECT_FALSE(first.from_cache);
    auto second = run_cached(c, &cache);
    EXPECT_TRUE(second.from_cache);
    EXPECT_EQ(first.text, second.text);
    EXPECT_EQ(run_cached(c, nullptr).text, first.text);
    EXPECT_EQ(cache.list(), std::vector<std::string>{config_hash(c)});
}

TEST(Cache, DefaultDirHonoursEnvironment)
{
    ::setenv("SPENCERKIT_CACHE_DIR", "/tmp/spencerkit-env-test", 1);
    EXPECT_EQ(ReportCache::default_dir(), std::filesystem::path("/tmp/spencerkit-env-test"));
    ::unsetenv("SPENCERKIT_CACHE_DIR");
    ::setenv("XDG_CACHE_HOME", "/tmp/xdg", 1);
    EXPECT_EQ(ReportCache::default_dir(), std::filesystem::path("/tmp/xdg/spencerkit"));
    ::unsetenv("XDG_CACHE_HOME");
}
