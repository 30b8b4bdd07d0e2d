#include "doctest.h"
#include "support.hpp"

#include "geopitch/errors.hpp"
#include "geopitch/eval.hpp"

#include <array>
#include <filesystem>
#include <fstream>
#include <string>

#include "json.hpp"

using namespace geopitch;
using testsupport::note;

namespace {

FileResult result(const char* truth, std::vector<Note> estimate, const char* instrument = "Flute",
                  const char* style = "nonvib") {
    FileResult r;
    r.truth.path = std::string(truth) + ".wav";
    r.truth.instrument = instrument;
    r.truth.style = style;
    r.truth.notes = {note(truth)};
    r.estimate = std::move(estimate);
    return r;
}

// Clean four-partial tones written to a scratch directory with a matching CSV.
std::filesystem::path write_suite(const std::filesystem::path& dir, const std::vector<std::string>& names) {
    std::filesystem::create_directories(dir);
    std::ofstream csv(dir / "truth.csv");
    csv << "path,instrument,style,notes\n";
    constexpr std::array amps{1.0, 0.6, 0.4, 0.3};
    for (const auto& name : names) {
        Signal s = synthesize(harmonic_partials(note(name), amps), 0.5);
        apply_envelope(s, 0.005, 0.3, 0.2);
        write_wav(dir / (name + ".wav"), s);
        csv << name << ".wav,Synth,clean," << name << "\n";
    }
    csv << "missing.wav,Synth,clean,C4\n";
    return dir / "truth.csv";
}

}  // namespace

TEST_CASE("ground truth parsing") {
    const GroundTruth gt = parse_ground_truth(
        "path,instrument,style,notes\n"
        "x.wav,Flute,nonvib,C4\n"
        "y.wav,Violin,pizz,G3 D4\n"
        "\"w, x.wav\",Oboe,nonvib,E\xE2\x99\xAD" "3\n",
        "/data");
    REQUIRE(gt.entries.size() == 3);
    CHECK(gt.entries[0].path == std::filesystem::path("/data/x.wav"));
    CHECK(gt.entries[0].notes == testsupport::notes({"C4"}));
    CHECK(gt.entries[1].notes == testsupport::notes({"G3", "D4"}));
    CHECK(gt.entries[1].style == "pizz");
    CHECK(gt.entries[2].notes == testsupport::notes({"Eb3"}));
    CHECK(gt.entries[2].path.filename() == "w, x.wav");
    CHECK(gt.entries[1].line == 3);

    try {
        parse_ground_truth("path,instrument,style,notes\nx.wav,Flute,nonvib,C4\nz.wav,Oboe,nonvib,H4\n");
        FAIL("expected a data error");
    } catch (const DataError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("line 3") != std::string::npos);
        CHECK(msg.find("H4") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_ground_truth(""), DataError);
    CHECK_THROWS_AS(parse_ground_truth("a,b\n"), DataError);
    CHECK_THROWS_AS(parse_ground_truth("path,instrument,style,notes\nx.wav,Flute\n"), DataError);
    CHECK_THROWS_AS(parse_ground_truth("path,instrument,style,notes\nx.wav,Flute,nonvib,\n"), DataError);
    CHECK_THROWS_AS(load_ground_truth("/nonexistent/truth.csv"), IoError);
}

TEST_CASE("estimators and outliers") {
    CHECK(parse_estimator("naive") == EstimatorKind::Naive);
    CHECK(parse_estimator("HPS") == EstimatorKind::Hps);
    CHECK(parse_estimator("poly") == EstimatorKind::Poly);
    CHECK_FALSE(parse_estimator("yin").has_value());
    const auto rules = default_outliers();
    CHECK(is_outlier(rules, "Violin", "pizz"));
    CHECK(is_outlier(rules, "Cello", "PIZZ"));
    CHECK(is_outlier(rules, "Double Bass", "pizz"));
    CHECK(is_outlier(rules, "Tuba", "nonvib"));
    CHECK_FALSE(is_outlier(rules, "Violin", "arco"));
    CHECK_FALSE(is_outlier(rules, "Flute", "pizz"));
}

TEST_CASE("aggregation") {
    std::vector<FileResult> rs;
    rs.push_back(result("C4", {note("C4")}));
    rs.push_back(result("D4", {note("D5")}));
    rs.push_back(result("E4", {note("F4")}));
    rs.push_back(result("G3", {note("G3")}, "Violin", "pizz"));
    rs.push_back(result("A2", {note("B2")}, "Tuba", "nonvib"));
    FileResult broken = result("B4", {});
    broken.read_ok = false;
    rs.push_back(broken);

    const EvalReport r = summarize(rs, EstimatorKind::Naive);
    CHECK(r.read_failures == 1);
    CHECK(r.overall.files == 5);
    CHECK(r.overall.exact == 2);
    CHECK(r.overall_accuracy() == doctest::Approx(0.4));
    CHECK(r.no_outliers.files == 3);
    CHECK(r.no_outlier_accuracy() == doctest::Approx(1.0 / 3.0));
    CHECK(r.chroma_accuracy() == doctest::Approx(2.0 / 3.0));
    CHECK(r.chroma_accuracy() >= r.no_outlier_accuracy());
    CHECK(r.chroma_accuracy_all() >= r.overall_accuracy());
    CHECK(r.groups.size() == 3);
    CHECK(r.groups.at({"Violin", "pizz"}).files == 1);

    const std::string table = breakdown_table({r, summarize(rs, EstimatorKind::Hps)});
    CHECK(table.find("Overall") != std::string::npos);
    CHECK(table.find("Tuba") != std::string::npos);
    CHECK(table.find("naive") != std::string::npos);
    CHECK(table.find("hps") != std::string::npos);
    CHECK(table.find(" -") != std::string::npos);
    CHECK(table.find("40.00") != std::string::npos);

    const auto j = nlohmann::json::parse(report_to_json(r));
    CHECK(j["read_failures"] == 1);
    CHECK(j["results"].size() == rs.size());
    CHECK(j["overall_accuracy"].get<double>() == doctest::Approx(0.4));
}

TEST_CASE("confusion matrix") {
    std::vector<FileResult> rs;
    for (const char* n : {"C4", "C#4", "D4", "D#4"}) rs.push_back(result(n, {note(n)}));
    ConfusionMatrix cm = confusion_matrix(rs);
    CHECK(cm.low == note_bin(note("C4")));
    CHECK(cm.span() == 4);
    CHECK(cm.counts.rows == 5);
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) CHECK(cm.counts(r, c) == (r == c ? 1.0 : 0.0));
    }

    // An octave error lands outside the tested range.
    rs.push_back(result("D4", {note("D5")}));
    rs.push_back(result("C4", {}));
    rs.push_back(result("D#4", {note("C4")}));
    cm = confusion_matrix(rs);
    CHECK(cm.counts(4, 2) == 1.0);
    CHECK(cm.counts(4, 0) == 1.0);
    CHECK(cm.counts(0, 3) == 1.0);
    const std::array<double, 4> per_truth{2, 1, 2, 2};
    for (int c = 0; c < 4; ++c) {
        double sum = 0.0;
        for (int r = 0; r < cm.counts.rows; ++r) sum += cm.counts(r, c);
        CHECK(sum == per_truth[static_cast<std::size_t>(c)]);
    }

    std::vector<FileResult> constant;
    for (const char* n : {"C4", "E4", "G4"}) constant.push_back(result(n, {note("E4")}));
    const ConfusionMatrix k = confusion_matrix(constant);
    const int row = note_bin(note("E4")) - k.low;
    for (int c = 0; c < k.span(); ++c) {
        const bool tested = c == 0 || c == 4 || c == 7;
        CHECK(k.counts(row, c) == (tested ? 1.0 : 0.0));
    }

    const std::string csv = confusion_to_csv(cm);
    CHECK(csv.rfind("estimate\\truth,C4,C#4,D4,Eb4", 0) == 0);
    CHECK(csv.find("\nother,") != std::string::npos);
    CHECK_THROWS_AS(confusion_matrix({}), std::invalid_argument);
}

TEST_CASE("synthetic suite is estimated exactly") {
    const auto dir = std::filesystem::temp_directory_path() / "geopitch_unit_suite";
    const std::vector<std::string> names{"E2", "A2", "D3", "G3", "C4", "F#4", "A4", "Bb4", "E5", "C6"};
    const GroundTruth gt = load_ground_truth(write_suite(dir, names));
    REQUIRE(gt.entries.size() == 11);

    EvalOptions opt;
    opt.threads = 2;
    const EvalReport naive = evaluate(gt, opt);
    CHECK(naive.read_failures == 1);
    CHECK(naive.overall.files == 10);
    CHECK(naive.overall_accuracy() == 1.0);
    CHECK(naive.chroma_accuracy() == 1.0);

    opt.estimator = EstimatorKind::Hps;
    const EvalReport hps = evaluate(gt, opt);
    CHECK(hps.overall.files == 10);
    CHECK(hps.overall_accuracy() == 1.0);

    opt.estimator = EstimatorKind::Naive;
    opt.threads = 1;
    const EvalReport serial = evaluate(gt, opt);
    for (std::size_t i = 0; i < serial.results.size(); ++i) {
        CHECK(serial.results[i].estimate == naive.results[i].estimate);
        CHECK(serial.results[i].frame_index == naive.results[i].frame_index);
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("simulated polyphony curve") {
    const auto curve = evaluate_poly_simulated(50, 1, 12, 3, 2, 2);
    REQUIRE(curve.size() == 12);
    CHECK(curve[0].n == 1);
    CHECK(curve[0].naive_accuracy == 1.0);
    CHECK(curve[0].simple_accuracy == 1.0);
    CHECK(curve[0].simple_precision == 1.0);
    const auto again = evaluate_poly_simulated(50, 1, 12, 3, 2, 1);
    for (std::size_t i = 0; i < curve.size(); ++i) {
        CHECK(again[i].naive_accuracy == curve[i].naive_accuracy);
        CHECK(again[i].simple_grid_accuracy == curve[i].simple_grid_accuracy);
    }
    for (const auto& p : curve) {
        CHECK(p.naive_accuracy <= 1.0);
        CHECK(p.naive_precision <= 1.0);
        CHECK(p.simple_accuracy > 0.0);
    }
    const std::string csv = poly_curve_to_csv(curve);
    CHECK(csv.rfind("n,naive_accuracy,simple_accuracy", 0) == 0);
    CHECK_THROWS_AS(evaluate_poly_simulated(0, 1, 2, 1), std::invalid_argument);
    CHECK_THROWS_AS(evaluate_poly_simulated(1, 0, 2, 1), std::invalid_argument);
}
