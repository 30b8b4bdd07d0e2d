#ifdef GEOPITCH_HAVE_CLI

#include "doctest.h"

#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "geopitch/lattice.hpp"

#include "json.hpp"

namespace {

struct Run {
    int code = 0;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "geopitch");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = geopitch::cli::dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::filesystem::path scratch() {
    const auto dir = std::filesystem::temp_directory_path() / "geopitch_unit_cli";
    std::filesystem::create_directories(dir);
    return dir;
}

int lines(const std::string& s) {
    int n = 0;
    for (char c : s) n += c == '\n';
    return n;
}

}  // namespace

TEST_CASE("cli enumerate") {
    for (const char* c : {"GG", "GT", "TG"}) {
        const Run r = run({"enumerate", "--config", c});
        CHECK(r.code == 0);
        CHECK(lines(r.out) == 24);
        std::istringstream in(r.out);
        std::string first;
        std::getline(in, first);
        CHECK(nlohmann::json::parse(first)["configuration"] == c);
    }
    CHECK(run({"enumerate", "--config", "XX"}).code == 1);
}

TEST_CASE("cli exit codes") {
    CHECK(run({}).code == 1);
    CHECK(run({"frobnicate"}).code == 1);
    CHECK(run({"--help"}).code == 0);
    CHECK(run({"analyze", "/nonexistent/x.wav"}).code == 3);
    CHECK(run({"analyze", "x.wav", "--estimator", "yin"}).code == 1);

    const auto bad = scratch() / "bad.wav";
    std::ofstream(bad) << "not a wav file at all";
    CHECK(run({"analyze", bad.string()}).code == 2);

    const auto csv = scratch() / "bad.csv";
    std::ofstream(csv) << "path,instrument,style,notes\nz.wav,Oboe,nonvib,H4\n";
    const Run b = run({"benchmark", "--truth", csv.string()});
    CHECK(b.code == 2);
    CHECK(b.err.find("line 2") != std::string::npos);
}

TEST_CASE("cli synth and analyze") {
    const auto dir = scratch();
    const auto silence = dir / "silence.wav";
    CHECK(run({"synth", "--notes", "", silence.string(), "--seconds", "0.3"}).code == 0);
    const Run quiet = run({"analyze", silence.string(), "--selected"});
    CHECK(quiet.code == 0);
    const auto q = nlohmann::json::parse(quiet.out);
    REQUIRE(q["frames"].size() == 1);
    CHECK(q["frames"][0]["notes"].empty());

    const auto tone = dir / "a3.wav";
    CHECK(run({"synth", "--notes", "A3", tone.string(), "--seconds", "0.5"}).code == 0);
    const Run a = run({"analyze", tone.string(), "--selected"});
    REQUIRE(a.code == 0);
    const auto j = nlohmann::json::parse(a.out);
    CHECK(j["frames"][0]["notes"] == nlohmann::json::array({"A3"}));

    const Run c = run({"analyze", tone.string(), "--out", "csv"});
    CHECK(c.code == 0);
    CHECK(c.out.rfind("frame,start_sample,notes,confidence", 0) == 0);

    const auto mix = dir / "mix.wav";
    CHECK(run({"synth", "--notes", "D4 A5 D6", mix.string(), "--seconds", "0.5"}).code == 0);
    const Run p = run({"analyze", mix.string(), "--poly", "--selected"});
    REQUIRE(p.code == 0);
    const auto notes = nlohmann::json::parse(p.out)["frames"][0]["notes"];
    CHECK(std::find(notes.begin(), notes.end(), "D5") == notes.end());
    CHECK(std::find(notes.begin(), notes.end(), "D4") != notes.end());

    const auto img = dir / "heat.png";
    CHECK(run({"render", "--heatmap", mix.string(), img.string()}).code == 0);
    CHECK(std::filesystem::file_size(img) > 8);
}

TEST_CASE("cli simulate is deterministic") {
    const std::vector<std::string> args{"simulate", "--samples", "20", "--n-min", "1", "--n-max", "10", "--seed", "5"};
    auto with_threads = [&](const char* t) {
        auto a = args;
        a.push_back("--threads");
        a.push_back(t);
        return run(a);
    };
    const Run one = with_threads("1");
    const Run four = with_threads("4");
    CHECK(one.code == 0);
    CHECK(one.out == four.out);
    CHECK(lines(one.out) == 1 + 10 * 9);
}

TEST_CASE("cli classify") {
    geopitch::Interpretation interp;
    for (const char* name : {"D4", "A5", "D6"}) {
        const auto f = *geopitch::parse_note(name);
        interp.set(f);
        for (const auto& h : geopitch::harmonics(f)) interp.set(h);
    }
    const auto path = scratch() / "fig.json";
    std::ofstream(path) << geopitch::interpretation_to_json(interp);

    const Run r = run({"classify", "--interp", path.string(), "--fundamentals", "D4 A5 D6"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["fundamentals_source"] == "given");
    REQUIRE(j["false_fundamentals"].size() == 1);
    const auto& d5 = j["false_fundamentals"][0];
    CHECK(d5["note"] == "D5");
    CHECK(d5["configuration"] == "GT");
    CHECK(d5["terminal_types"] == nlohmann::json({{"empty", 1}}));
    CHECK(d5["generators"].size() == 3);

    const Run dot = run({"classify", "--interp", path.string(), "--fundamentals", "D4 A5 D6", "--dot"});
    CHECK(dot.code == 0);
    CHECK(dot.out.find("digraph") != std::string::npos);

    const Run inferred = run({"classify", "--interp", path.string()});
    REQUIRE(inferred.code == 0);
    CHECK(nlohmann::json::parse(inferred.out)["fundamentals_source"] == "sink_iteration");
    CHECK(run({"classify", "--interp", "/nonexistent.json"}).code == 3);
}

#endif
