#include "support.hpp"

#include <cli.hpp>

#include <geoflow/error.hpp>
#include <geoflow/mesh_io.hpp>

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace fs = std::filesystem;
using geoflow::cli::run;

namespace {

struct Outcome
{
    int code;
    std::string out;
    std::string err;
};

Outcome geoflow_cli(const std::vector<std::string>& args)
{
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

bool contains(const std::string& text, const std::string& needle)
{
    return text.find(needle) != std::string::npos;
}

// "name: ... value" line parsed from smooth output.
double field_after(const std::string& text, const std::string& label)
{
    const auto pos = text.find(label);
    REQUIRE(pos != std::string::npos);
    return std::stod(text.substr(pos + label.size()));
}

std::vector<std::map<std::string, std::string>> read_csv(const fs::path& path)
{
    std::istringstream in(testing::slurp(path));
    std::string line;
    std::getline(in, line);
    std::vector<std::string> header;
    std::stringstream hs(line);
    for (std::string cell; std::getline(hs, cell, ',');) header.push_back(cell);
    std::vector<std::map<std::string, std::string>> rows;
    while (std::getline(in, line)) {
        std::map<std::string, std::string> row;
        std::stringstream ls(line);
        std::size_t k = 0;
        for (std::string cell; k < header.size(); ++k) {
            if (!std::getline(ls, cell, ',')) cell.clear();
            row[header[k]] = cell;
        }
        rows.push_back(row);
    }
    return rows;
}

std::string gen(const fs::path& dir, const std::string& name, std::vector<std::string> extra)
{
    const std::string path = (dir / name).string();
    std::vector<std::string> args = {"gen", "-o", path};
    args.insert(args.end(), extra.begin(), extra.end());
    REQUIRE(geoflow_cli(args).code == 0);
    return path;
}

} // namespace

TEST_CASE("gen writes an icosphere with 642 vertices")
{
    const auto dir = testing::scratch_dir("cli_gen");
    const Outcome o = geoflow_cli({"gen", "--shape", "icosphere", "--subdiv", "3", "-o", (dir / "s.obj").string()});
    CHECK(o.code == 0);
    CHECK(contains(o.out, "642 vertices"));
    CHECK(geoflow::load_mesh(dir / "s.obj").vertex_count() == 642);
}

TEST_CASE("gen is deterministic per seed")
{
    const auto dir = testing::scratch_dir("cli_gen_seed");
    for (const char* name : {"a.obj", "b.obj"}) {
        gen(dir, name, {"--shape", "icosphere", "--subdiv", "3", "--noise", "0.02", "--seed", "7"});
    }
    gen(dir, "c.obj", {"--shape", "icosphere", "--subdiv", "3", "--noise", "0.02", "--seed", "8"});
    CHECK(testing::slurp(dir / "a.obj") == testing::slurp(dir / "b.obj"));
    CHECK(testing::slurp(dir / "a.obj") != testing::slurp(dir / "c.obj"));
}

TEST_CASE("usage errors exit 4")
{
    CHECK(geoflow_cli({"gen", "--shape", "icosphere"}).code == 4);
    CHECK(geoflow_cli({}).code == 4);
    CHECK(geoflow_cli({"frobnicate"}).code == 4);
    CHECK(geoflow_cli({"gen", "--subdiv", "many", "-o", "x.obj"}).code == 4);
    const auto dir = testing::scratch_dir("cli_usage");
    CHECK(geoflow_cli({"gen", "--shape", "klein", "-o", (dir / "k.obj").string()}).code == 4);
    CHECK(geoflow_cli({"gen", "--help"}).code == 0);
}

TEST_CASE("evolve sdf on the icosphere passes and writes all outputs")
{
    const auto dir = testing::scratch_dir("cli_evolve");
    const std::string in = gen(dir, "s.obj", {"--subdiv", "3"});
    const std::string out = (dir / "out.obj").string();
    const Outcome o = geoflow_cli(
        {"evolve", in, "-o", out, "--flow", "sdf", "--steps", "100", "--scheme", "semi-implicit"});
    CHECK(o.code == 0);
    CHECK(contains(o.out, "[PASS] volume_drift"));
    CHECK(fs::exists(out));
    REQUIRE(fs::exists(dir / "out.csv"));
    CHECK(fs::exists(dir / "out.json"));
    const auto rows = read_csv(dir / "out.csv");
    CHECK(rows.size() == 101);
    CHECK(rows.back().at("step") == "100");
}

TEST_CASE("evolve identity failure exits 2 and blow-up exits 3")
{
    const auto dir = testing::scratch_dir("cli_codes");
    const std::string in = gen(dir, "s.obj", {"--subdiv", "2"});
    const Outcome strict = geoflow_cli({"evolve", in, "-o", (dir / "a.obj").string(), "--steps", "10",
        "--volume-drift-tol", "1e-15", "--area-rate-tol", "100"});
    CHECK(strict.code == 2);
    CHECK(contains(strict.out, "[FAIL] volume_drift"));

    const std::string noisy = gen(dir, "n.obj", {"--subdiv", "3", "--noise", "0.01", "--seed", "4"});
    const std::string out = (dir / "b.obj").string();
    const Outcome blow = geoflow_cli({"evolve", noisy, "-o", out, "--scheme", "explicit", "--safety", "100",
        "--steps", "50"});
    CHECK(blow.code == 3);
    CHECK(contains(blow.err, "blow-up"));
    // Partial outputs are still written.
    CHECK(fs::exists(out));
    CHECK(fs::exists(dir / "b.csv"));
}

TEST_CASE("evolve boundary notes")
{
    const auto dir = testing::scratch_dir("cli_notes");
    const std::string disk = gen(dir, "d.obj", {"--shape", "disk", "--subdiv", "3"});
    const Outcome mcf = geoflow_cli({"evolve", disk, "-o", (dir / "m.obj").string(), "--flow", "mcf", "--boundary",
        "g1", "--steps", "5"});
    CHECK(mcf.code == 0);
    CHECK(contains(mcf.out, "over-constrained"));
    CHECK_FALSE(contains(mcf.out, "tangent planes"));

    const Outcome g0 = geoflow_cli({"evolve", disk, "-o", (dir / "q.obj").string(), "--flow", "qsdf", "--boundary",
        "g0", "--steps", "2", "--safety", "0.01"});
    CHECK(contains(g0.out, "tangent planes at the rim are free"));

    const std::string sphere = gen(dir, "s.obj", {"--subdiv", "3"});
    const Outcome closed = geoflow_cli({"evolve", sphere, "-o", (dir / "c.obj").string(), "--boundary", "g1",
        "--steps", "2"});
    CHECK(closed.code == 0);
    CHECK(contains(closed.err, "no boundary"));
    CHECK(contains(closed.out, "boundary free"));
}

TEST_CASE("evolve on a missing input exits nonzero and writes nothing")
{
    const auto dir = testing::scratch_dir("cli_missing");
    const Outcome o = geoflow_cli({"evolve", (dir / "nope.obj").string(), "-o", (dir / "out.obj").string()});
    CHECK(o.code == 4);
    CHECK(fs::is_empty(dir));
}

TEST_CASE("smooth reduces roughness of a noisy sphere by at least half")
{
    const auto dir = testing::scratch_dir("cli_smooth");
    const double h = 0.138283;
    const std::string noisy = gen(dir, "n.obj", {"--subdiv", "3", "--noise", std::to_string(0.05 * h), "--seed", "1"});
    const Outcome o = geoflow_cli({"smooth", noisy, "-o", (dir / "s.obj").string()});
    CHECK(o.code == 0);
    CHECK(contains(o.out, "flow wf"));
    CHECK(field_after(o.out, "roughness change: ") <= -0.5);
}

TEST_CASE("smooth leaves a clean sphere's roughness within 5%")
{
    const auto dir = testing::scratch_dir("cli_smooth_clean");
    const std::string clean = gen(dir, "c.obj", {"--subdiv", "3"});
    const Outcome o = geoflow_cli({"smooth", clean, "-o", (dir / "s.obj").string()});
    CHECK(o.code == 0);
    CHECK(std::abs(field_after(o.out, "roughness change: ")) <= 0.05);
}

TEST_CASE("smooth with qsdf completes and reports a volume change")
{
    const auto dir = testing::scratch_dir("cli_smooth_qsdf");
    const std::string clean = gen(dir, "c.obj", {"--subdiv", "3", "--noise", "0.01", "--seed", "2"});
    const Outcome o = geoflow_cli({"smooth", clean, "-o", (dir / "s.obj").string(), "--flow", "qsdf", "--safety",
        "0.01"});
    CHECK(o.code == 0);
    const double before = field_after(o.out, "volume: ");
    const double after = field_after(o.out, " -> ");
    CHECK(after != before);
}

TEST_CASE("compare on a noisy sphere: short-horizon flows agree")
{
    const auto dir = testing::scratch_dir("cli_compare");
    const double h = 0.138283;
    const std::string noisy = gen(dir, "n.obj", {"--subdiv", "3", "--noise", std::to_string(0.2 * h), "--seed", "1"});
    const std::string out = (dir / "cmp").string();
    const Outcome o = geoflow_cli({"compare", noisy, "-o", out, "--long-steps", "20"});
    CHECK(o.code == 0);
    const auto pairs = read_csv(out + ".pairs.csv");
    REQUIRE(pairs.size() == 6);
    for (const auto& row : pairs) {
        if (row.at("horizon") == "short") CHECK(std::stod(row.at("ratio")) <= 0.25);
    }
    CHECK(read_csv(out + ".flows.csv").size() == 6);
}

namespace {

std::map<std::string, double> long_horizon_willmore()
{
    const auto dir = testing::scratch_dir("cli_compare_ellipsoid");
    const std::string in = gen(dir, "e.obj", {"--shape", "ellipsoid", "--subdiv", "3"});
    const std::string out = (dir / "cmp").string();
    REQUIRE(geoflow_cli({"compare", in, "-o", out}).code == 0);
    std::map<std::string, double> w;
    for (const auto& row : read_csv(out + ".flows.csv")) {
        if (row.at("horizon") == "long") w[row.at("flow")] = std::stod(row.at("willmore"));
    }
    return w;
}

} // namespace

TEST_CASE("compare on the ellipsoid: WF ends below SDF in Willmore energy")
{
    const auto w = long_horizon_willmore();
    CHECK(w.at("wf") < w.at("sdf"));
}

// QSDF lowers W faster than WF on this horizon; the ordering fails as measured.
TEST_CASE("compare on the ellipsoid: WF ends below QSDF in Willmore energy" * doctest::should_fail())
{
    const auto w = long_horizon_willmore();
    CHECK(w.at("wf") < w.at("qsdf"));
}

TEST_CASE("compare requires a closed mesh")
{
    const auto dir = testing::scratch_dir("cli_compare_disk");
    const std::string disk = gen(dir, "d.obj", {"--shape", "disk"});
    const Outcome o = geoflow_cli({"compare", disk, "-o", (dir / "cmp").string()});
    CHECK(o.code == 4);
    CHECK(contains(o.err, "compare requires closed mesh"));
}

TEST_CASE("validate reports findings")
{
    const auto dir = testing::scratch_dir("cli_validate");
    const std::string disk = gen(dir, "d.obj", {"--shape", "disk"});
    const Outcome ok = geoflow_cli({"validate", disk});
    CHECK(ok.code == 0);
    CHECK(contains(ok.out, "1 boundary loops"));
    CHECK(contains(ok.out, "open"));

    const fs::path bad = dir / "bad.obj";
    {
        std::ofstream f(bad);
        f << "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 0 -1 0\nv 0 0 1\nf 1 2 3\nf 2 1 4\nf 1 2 5\n";
    }
    const Outcome nm = geoflow_cli({"validate", bad.string()});
    CHECK(nm.code == 2);
    CHECK(contains(nm.out, "invalid"));
}

TEST_CASE("manifest round trip and overrides")
{
    geoflow::cli::RunManifest m = geoflow::cli::defaults_for("evolve");
    m.input = "in.obj";
    m.output = "out.obj";
    m.flow = "wf";
    m.dt = "0.001";
    m.steps = 7;
    m.stop_tol = 1e-8;
    const std::string text = geoflow::cli::manifest_to_json(m);
    const auto back = geoflow::cli::manifest_from_json(text, "evolve");
    CHECK(geoflow::cli::manifest_to_json(back) == text);
    CHECK(back.steps == 7);
    CHECK(back.flow == "wf");
    CHECK_THROWS_AS(geoflow::cli::manifest_from_json(text, "smooth"), geoflow::ConfigError);
    CHECK_THROWS_AS(geoflow::cli::manifest_from_json("{\"subcommand\": \"evolve\", \"colour\": 3}"),
        geoflow::ConfigError);
    CHECK_THROWS_AS(geoflow::cli::manifest_from_json("{\"subcommand\": \"evolve\", \"steps\": \"x\"}"),
        geoflow::ConfigError);
    const auto smooth = geoflow::cli::defaults_for("smooth");
    CHECK(smooth.flow == "wf");
    CHECK(smooth.steps == 20);
    CHECK(smooth.dt == "auto");
}

TEST_CASE("rerunning a saved manifest reproduces every output byte for byte")
{
    const auto dir = testing::scratch_dir("cli_manifest");
    const std::string in = gen(dir, "e.obj", {"--shape", "ellipsoid", "--subdiv", "2", "--noise", "0.01", "--seed",
        "3"});
    const fs::path first = dir / "first";
    const fs::path second = dir / "second";
    fs::create_directories(first);
    fs::create_directories(second);
    const std::string manifest = (dir / "run.json").string();
    REQUIRE(geoflow_cli({"evolve", in, "-o", (first / "out.obj").string(), "--flow", "wf", "--steps", "15",
                "--save-manifest", manifest})
                .code == 0);
    fs::rename(first / "out.obj", first / "keep.obj");
    fs::rename(first / "out.csv", first / "keep.csv");
    fs::rename(first / "out.json", first / "keep.json");
    REQUIRE(geoflow_cli({"evolve", "--manifest", manifest}).code == 0);
    for (const char* ext : {".obj", ".csv", ".json"}) {
        CHECK(testing::slurp(first / (std::string("keep") + ext)) == testing::slurp(first / (std::string("out") + ext)));
    }
    // Explicit flags override the manifest.
    REQUIRE(geoflow_cli({"evolve", "--manifest", manifest, "-o", (second / "o.obj").string(), "--steps", "3"}).code ==
            0);
    CHECK(read_csv(second / "o.csv").size() == 4);
}
