#include "cli.hpp"

#include "geopitch/dsp.hpp"
#include "geopitch/edgecases.hpp"
#include "geopitch/errors.hpp"
#include "geopitch/estimators.hpp"
#include "geopitch/eval.hpp"
#include "geopitch/lattice.hpp"
#include "geopitch/prevalence.hpp"
#include "geopitch/reduction.hpp"
#include "geopitch/render.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

namespace geopitch::cli {

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << text;
    if (!out) throw IoError("write failed for " + path);
}

void emit(std::ostream& out, const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        out << text;
    } else {
        write_text(path, text);
    }
}

bool ends_with(const std::string& s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::vector<Note> parse_note_list(std::string text) {
    std::replace(text.begin(), text.end(), ',', ' ');
    std::vector<Note> out;
    std::istringstream in(text);
    std::string name;
    while (in >> name) {
        const auto n = parse_note(name);
        if (!n) throw UsageError("unknown note name '" + name + "'");
        out.push_back(*n);
    }
    return out;
}

std::string join_names(const std::vector<Note>& notes) {
    std::string s;
    for (const Note& n : notes) {
        if (!s.empty()) s += ' ';
        s += n.name();
    }
    return s;
}

EstimatorKind estimator_or_throw(const std::string& name) {
    const auto k = parse_estimator(name);
    if (!k) throw UsageError("unknown estimator '" + name + "' (naive, hps or poly)");
    return *k;
}

// ---------------------------------------------------------------------------

struct AnalyzeArgs {
    std::string wav;
    bool poly = false;
    std::string estimator = "naive";
    double alpha = kDefaultAlpha;
    std::string format = "json";
    bool selected_only = false;
    std::size_t window = 4096;
    std::size_t hop = 1024;
    std::string output;
};

void run_analyze(const AnalyzeArgs& a, std::ostream& out) {
    if (a.format != "json" && a.format != "csv") throw UsageError("--out must be json or csv");
    EvalOptions opts;
    opts.estimator = a.poly ? EstimatorKind::Poly : estimator_or_throw(a.estimator);
    opts.naive.alpha = a.alpha;
    opts.analysis.window_length = a.window;
    opts.analysis.hop = a.hop;

    const Signal signal = load_audio(a.wav);
    HeatSequence seq;
    try {
        seq = analyze_signal(signal, opts.analysis);
    } catch (const std::invalid_argument& e) {
        throw DataError(a.wav + ": " + e.what());
    }
    const std::size_t selected = select_window(seq.frames, a.alpha);

    std::vector<std::size_t> frames;
    if (a.selected_only) {
        frames.push_back(selected);
    } else {
        for (std::size_t i = 0; i < seq.frames.size(); ++i) frames.push_back(i);
    }

    std::string text;
    if (a.format == "json") {
        nlohmann::ordered_json j;
        j["file"] = a.wav;
        j["sample_rate"] = signal.sample_rate;
        j["estimator"] = std::string(estimator_name(opts.estimator));
        j["alpha"] = a.alpha;
        j["frame_count"] = seq.frames.size();
        j["selected_frame"] = selected;
        j["frames"] = nlohmann::ordered_json::array();
        for (std::size_t i : frames) {
            double conf = 0.0;
            const auto notes = estimate_frame(seq.frames[i], opts, &conf);
            auto e = nlohmann::ordered_json::parse(estimate_to_json(i, notes, conf));
            e["start_sample"] = seq.frames[i].start_index;
            j["frames"].push_back(std::move(e));
        }
        text = j.dump(1) + "\n";
    } else {
        std::ostringstream os;
        os.precision(10);
        os << "frame,start_sample,notes,confidence\n";
        for (std::size_t i : frames) {
            double conf = 0.0;
            const auto notes = estimate_frame(seq.frames[i], opts, &conf);
            os << i << ',' << seq.frames[i].start_index << ',' << join_names(notes) << ',' << conf << '\n';
        }
        text = os.str();
    }
    emit(out, a.output, text);
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
    int samples = 1000;
    int n_min = 1;
    int n_max = kSemitoneCount;
    std::uint64_t seed = 7;
    unsigned threads = 0;
    std::string output;
    std::string format;
    std::string poly_curve;
};

void run_simulate(const SimulateArgs& a, std::ostream& out) {
    std::string format = a.format;
    if (format.empty()) format = ends_with(a.output, ".json") ? "json" : "csv";
    if (format != "json" && format != "csv") throw UsageError("--format must be json or csv");
    PrevalenceStats stats;
    try {
        stats = run_experiment(a.samples, a.n_min, a.n_max, a.seed, a.threads);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    emit(out, a.output, format == "json" ? stats_to_json(stats) + "\n" : stats_to_csv(stats));
    if (!a.poly_curve.empty()) {
        const auto curve = evaluate_poly_simulated(a.samples, a.n_min, a.n_max, a.seed, 2, a.threads);
        write_text(a.poly_curve, poly_curve_to_csv(curve));
    }
}

// ---------------------------------------------------------------------------

struct ClassifyArgs {
    std::string interp;
    std::string fundamentals;
    bool dot = false;
};

nlohmann::ordered_json note_array(const std::vector<Note>& notes) {
    auto arr = nlohmann::ordered_json::array();
    for (const Note& n : notes) arr.push_back(n.name());
    return arr;
}

void run_classify(const ClassifyArgs& a, std::ostream& out) {
    const std::string text = read_text(a.interp);
    const Interpretation interp = interpretation_from_json(text);

    // Fundamentals come from the flag, then a "fundamentals" key, then the
    // sink iteration as a fallback estimate.
    std::vector<Note> fundamentals;
    std::string source;
    if (!a.fundamentals.empty()) {
        fundamentals = parse_note_list(a.fundamentals);
        source = "given";
    } else {
        const auto j = nlohmann::json::parse(text);
        if (j.contains("fundamentals")) {
            if (!j["fundamentals"].is_array()) throw DataError("\"fundamentals\" must be an array of note names");
            for (const auto& f : j["fundamentals"]) {
                if (!f.is_string()) throw DataError("\"fundamentals\" must be an array of note names");
                const auto n = parse_note(f.get<std::string>());
                if (!n) throw DataError("unknown note name '" + f.get<std::string>() + "'");
                fundamentals.push_back(*n);
            }
            source = "given";
        } else {
            fundamentals = sink_iteration(interp);
            source = "sink_iteration";
        }
    }
    std::sort(fundamentals.begin(), fundamentals.end(), LatticeOrder{});

    const auto naive = naive_classify(interp);
    nlohmann::ordered_json j;
    j["notes"] = note_array(interp.notes());
    j["naive"] = note_array(naive);
    j["fundamentals"] = note_array(fundamentals);
    j["fundamentals_source"] = source;
    j["false_fundamentals"] = nlohmann::ordered_json::array();
    std::string dot;
    for (const Note& x : naive) {
        if (std::find(fundamentals.begin(), fundamentals.end(), x) != fundamentals.end()) continue;
        nlohmann::ordered_json e;
        e["note"] = x.name();
        e["configuration"] = std::string(configuration_code(configuration_of(x.chroma)));
        const GeneratorSet set = generator_set_from_fundamentals(x, fundamentals);
        e["generators"] = nlohmann::ordered_json::array();
        for (const auto& g : set.generators) e["generators"].push_back(g.name());
        e["explained"] = set.satisfied();
        if (set.satisfied()) {
            const ReductionGraph graph = reduction_graph(set);
            std::array<int, kTerminalTypeCount> counts{};
            for (EdgeType t : graph.terminal_labels) ++counts[static_cast<std::size_t>(type_index(t))];
            nlohmann::ordered_json types = nlohmann::ordered_json::object();
            for (int t = 0; t < kTerminalTypeCount; ++t) {
                if (counts[static_cast<std::size_t>(t)]) {
                    types[std::string(edge_type_code(type_from_index(t)))] = counts[static_cast<std::size_t>(t)];
                }
            }
            e["terminal_types"] = std::move(types);
            e["graph"] = nlohmann::ordered_json::parse(graph_to_json(graph));
            if (a.dot) dot += "// " + x.name() + "\n" + graph_to_dot(graph);
        }
        j["false_fundamentals"].push_back(std::move(e));
    }
    if (a.dot) {
        out << dot;
    } else {
        out << j.dump(1) << '\n';
    }
}

// ---------------------------------------------------------------------------

struct BenchmarkArgs {
    std::string truth;
    std::string estimator = "naive";
    double alpha = kDefaultAlpha;
    unsigned threads = 0;
    std::string json;
    std::string confusion;
};

void run_benchmark(const BenchmarkArgs& a, std::ostream& out, std::ostream& err) {
    EvalOptions opts;
    opts.estimator = estimator_or_throw(a.estimator);
    opts.naive.alpha = a.alpha;
    opts.threads = a.threads;
    const GroundTruth gt = load_ground_truth(a.truth);
    const EvalReport report = evaluate(gt, opts);
    for (const auto& r : report.results) {
        if (!r.read_ok) err << "unreadable: " << r.truth.path.string() << ": " << r.error << '\n';
    }
    out << breakdown_table({report});
    if (!a.json.empty()) write_text(a.json, report_to_json(report) + "\n");
    if (!a.confusion.empty()) {
        const auto cm = confusion_matrix(report.results);
        if (ends_with(a.confusion, ".csv")) {
            write_text(a.confusion, confusion_to_csv(cm));
        } else {
            write_image(a.confusion, matrix_to_image(cm.counts));
        }
    }
}

// ---------------------------------------------------------------------------

struct RenderArgs {
    bool heatmap = false;
    bool pianoroll = false;
    bool confusion = false;
    std::string input;
    std::string output;
    std::string plane = "chroma-time";
    std::string estimator = "poly";
    int scale = 4;
};

ProjectionPlane parse_plane(const std::string& s) {
    if (s == "chroma-time") return ProjectionPlane::ChromaTime;
    if (s == "height-time") return ProjectionPlane::HeightTime;
    if (s == "chroma-height") return ProjectionPlane::ChromaHeight;
    throw UsageError("--plane must be chroma-time, height-time or chroma-height");
}

void run_render(const RenderArgs& a) {
    const int modes = (a.heatmap ? 1 : 0) + (a.pianoroll ? 1 : 0) + (a.confusion ? 1 : 0);
    if (modes != 1) throw UsageError("choose exactly one of --heatmap, --pianoroll, --confusion");
    if (a.scale < 1) throw UsageError("--scale must be positive");

    Matrix m;
    if (a.confusion) {
        EvalOptions opts;
        opts.estimator = estimator_or_throw(a.estimator == "poly" ? "naive" : a.estimator);
        const EvalReport report = evaluate(load_ground_truth(a.input), opts);
        m = confusion_matrix(report.results).counts;
    } else {
        const Signal signal = load_audio(a.input);
        HeatSequence seq;
        try {
            seq = analyze_signal(signal);
        } catch (const std::invalid_argument& e) {
            throw DataError(a.input + ": " + e.what());
        }
        if (a.heatmap) {
            m = project(heat_slices(seq), parse_plane(a.plane));
        } else {
            EvalOptions opts;
            opts.estimator = estimator_or_throw(a.estimator);
            m = Matrix(kBinCount, static_cast<int>(seq.frames.size()));
            for (std::size_t i = 0; i < seq.frames.size(); ++i) {
                for (const Note& n : estimate_frame(seq.frames[i], opts)) {
                    const int b = note_bin(n);
                    if (b >= 0 && b < kBinCount) m(b, static_cast<int>(i)) = 1.0;
                }
            }
        }
    }
    write_image(a.output, matrix_to_image(m, a.scale));
}

// ---------------------------------------------------------------------------

struct EnumerateArgs {
    std::string config;
    std::string output;
};

void run_enumerate(const EnumerateArgs& a, std::ostream& out) {
    const auto config = parse_configuration(a.config);
    if (!config) throw UsageError("--config must be GG, GT or TG");
    std::string text;
    for (const auto& c : enumerate_basic_cases(*config)) text += record_to_json(make_record(c)) + "\n";
    emit(out, a.output, text);
}

// ---------------------------------------------------------------------------

struct SynthArgs {
    std::string notes;
    std::string output;
    double seconds = 1.0;
    double rate = 44100.0;
    std::vector<double> amplitudes{1.0, 0.6, 0.4, 0.3};
    int bits = 16;
};

void run_synth(const SynthArgs& a) {
    const auto notes = parse_note_list(a.notes);
    if (a.seconds <= 0.0 || a.rate <= 0.0) throw UsageError("--seconds and --rate must be positive");
    std::vector<Partial> partials;
    for (const Note& n : notes) {
        const auto p = harmonic_partials(n, a.amplitudes);
        partials.insert(partials.end(), p.begin(), p.end());
    }
    try {
        write_wav(a.output, synthesize(partials, a.seconds, a.rate), a.bits);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

}  // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Pitch estimation on the fifths/octave lattice", "geopitch"};
    app.require_subcommand(1);

    AnalyzeArgs analyze;
    auto* an = app.add_subcommand("analyze", "Estimate notes in a WAV file, frame by frame");
    an->add_option("wav", analyze.wav, "Input WAV")->required();
    an->add_flag("--poly", analyze.poly, "Use the polyphonic estimator");
    an->add_option("--estimator", analyze.estimator, "naive, hps or poly");
    an->add_option("--alpha", analyze.alpha, "Audibility factor on the mean magnitude");
    an->add_option("--out", analyze.format, "Output format: json or csv");
    an->add_flag("--selected", analyze.selected_only, "Only the strongest window");
    an->add_option("--window", analyze.window, "Window length in samples");
    an->add_option("--hop", analyze.hop, "Hop in samples");
    an->add_option("-o,--output", analyze.output, "Write to this file instead of stdout");

    SimulateArgs simulate;
    auto* si = app.add_subcommand("simulate", "Sample random interpretations and tally edge-case types");
    si->add_option("--samples", simulate.samples, "Interpretations per n");
    si->add_option("--n-min", simulate.n_min, "Smallest number of fundamentals");
    si->add_option("--n-max", simulate.n_max, "Largest number of fundamentals");
    si->add_option("--seed", simulate.seed, "RNG seed");
    si->add_option("--threads", simulate.threads, "Worker threads (0: all cores)");
    si->add_option("--out", simulate.output, "Output path; .json selects JSON, stdout if absent");
    si->add_option("--format", simulate.format, "csv or json");
    si->add_option("--poly-curve", simulate.poly_curve, "Also write naive vs simple-poly accuracy CSV here");

    ClassifyArgs classify;
    auto* cl = app.add_subcommand("classify", "Edge types and reduction graphs for an interpretation");
    cl->add_option("--interp", classify.interp, "Interpretation JSON")->required();
    cl->add_option("--fundamentals", classify.fundamentals, "Sounding fundamentals, e.g. \"D4 A5 D6\"");
    cl->add_flag("--dot", classify.dot, "Print the reduction graphs as Graphviz DOT");

    BenchmarkArgs bench;
    auto* be = app.add_subcommand("benchmark", "Evaluate an estimator against a ground-truth CSV");
    be->add_option("--truth", bench.truth, "Ground-truth CSV (path,instrument,style,notes)")->required();
    be->add_option("--estimator", bench.estimator, "naive, hps or poly");
    be->add_option("--alpha", bench.alpha, "Audibility factor");
    be->add_option("--threads", bench.threads, "Worker threads (0: all cores)");
    be->add_option("--json", bench.json, "Write the full report as JSON");
    be->add_option("--confusion", bench.confusion, "Write the confusion matrix (.csv, .png or .ppm)");

    RenderArgs render;
    auto* re = app.add_subcommand("render", "Draw a heat map, piano roll or confusion matrix");
    re->add_flag("--heatmap", render.heatmap, "Projected CQT magnitudes of a WAV");
    re->add_flag("--pianoroll", render.pianoroll, "Estimated notes of a WAV over time");
    re->add_flag("--confusion", render.confusion, "Confusion matrix for a ground-truth CSV");
    re->add_option("input", render.input, "Input WAV or CSV")->required();
    re->add_option("output", render.output, "Output .png or .ppm")->required();
    re->add_option("--plane", render.plane, "chroma-time, height-time or chroma-height");
    re->add_option("--estimator", render.estimator, "naive, hps or poly");
    re->add_option("--scale", render.scale, "Pixels per cell");

    EnumerateArgs enumerate;
    auto* en = app.add_subcommand("enumerate", "List the basic edge cases of a configuration as JSON lines");
    en->add_option("--config", enumerate.config, "GG, GT or TG")->required();
    en->add_option("-o,--output", enumerate.output, "Write to this file instead of stdout");

    SynthArgs synth;
    auto* sy = app.add_subcommand("synth", "Write a WAV of harmonic tones");
    sy->add_option("--notes", synth.notes, "Fundamentals, e.g. \"D4 A5 D6\"")->required();
    sy->add_option("output", synth.output, "Output WAV")->required();
    sy->add_option("--seconds", synth.seconds, "Duration");
    sy->add_option("--rate", synth.rate, "Sample rate");
    sy->add_option("--amps", synth.amplitudes, "Partial amplitudes")->delimiter(',');
    sy->add_option("--bits", synth.bits, "16, 24 or 32 (float)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*an) run_analyze(analyze, out);
        else if (*si) run_simulate(simulate, out);
        else if (*cl) run_classify(classify, out);
        else if (*be) run_benchmark(bench, out, err);
        else if (*re) run_render(render);
        else if (*en) run_enumerate(enumerate, out);
        else if (*sy) run_synth(synth);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const IoError& e) {
        err << "I/O error: " << e.what() << '\n';
        return kIo;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << '\n';
        return kData;
    } catch (const nlohmann::json::exception& e) {
        err << "data error: " << e.what() << '\n';
        return kData;
    } catch (const std::exception& e) {
        err << "data error: " << e.what() << '\n';
        return kData;
    }
    return kOk;
}

}  // namespace geopitch::cli
