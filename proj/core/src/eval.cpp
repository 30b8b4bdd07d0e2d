#include "geopitch/eval.hpp"

#include "geopitch/errors.hpp"
#include "geopitch/prevalence.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "json.hpp"

namespace geopitch {

namespace {

std::string trim(std::string_view s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return std::string(s.substr(a, b - a));
}

std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

// One CSV record; double quotes group commas and "" escapes a quote.
std::vector<std::string> split_csv(std::string_view line, int line_no) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (quoted) throw DataError("line " + std::to_string(line_no) + ": unterminated quote");
    out.push_back(trim(cur));
    return out;
}

std::string percent(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * v);
    return buf;
}

}  // namespace

GroundTruth parse_ground_truth(std::string_view text, const std::filesystem::path& base_dir) {
    GroundTruth gt;
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        const auto fields = split_csv(line, line_no);
        if (!header_seen) {
            header_seen = true;
            std::vector<std::string> lowered;
            for (const auto& f : fields) lowered.push_back(lower(f));
            if (lowered != std::vector<std::string>{"path", "instrument", "style", "notes"}) {
                throw DataError("line " + std::to_string(line_no) + ": expected header path,instrument,style,notes");
            }
            continue;
        }
        if (fields.size() != 4) {
            throw DataError("line " + std::to_string(line_no) + ": expected 4 fields, found " +
                            std::to_string(fields.size()));
        }
        if (fields[0].empty()) throw DataError("line " + std::to_string(line_no) + ": empty path");
        GroundTruthEntry e;
        e.path = std::filesystem::path(fields[0]);
        if (e.path.is_relative() && !base_dir.empty()) e.path = base_dir / e.path;
        e.instrument = fields[1];
        e.style = fields[2];
        e.line = line_no;
        std::istringstream notes(fields[3]);
        std::string token;
        while (notes >> token) {
            const auto n = parse_note(token);
            if (!n) throw DataError("line " + std::to_string(line_no) + ": unknown note name '" + token + "'");
            e.notes.push_back(*n);
        }
        if (e.notes.empty()) throw DataError("line " + std::to_string(line_no) + ": no notes given");
        gt.entries.push_back(std::move(e));
    }
    if (!header_seen) throw DataError("ground truth is empty");
    return gt;
}

GroundTruth load_ground_truth(const std::filesystem::path& csv_path) {
    std::ifstream in(csv_path, std::ios::binary);
    if (!in) throw IoError("cannot open " + csv_path.string());
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return parse_ground_truth(text, csv_path.parent_path());
    } catch (const DataError& e) {
        throw DataError(csv_path.string() + ": " + e.what());
    }
}

std::string_view estimator_name(EstimatorKind k) {
    switch (k) {
    case EstimatorKind::Naive: return "naive";
    case EstimatorKind::Hps: return "hps";
    case EstimatorKind::Poly: return "poly";
    }
    return "?";
}

std::optional<EstimatorKind> parse_estimator(std::string_view name) {
    for (auto k : {EstimatorKind::Naive, EstimatorKind::Hps, EstimatorKind::Poly}) {
        if (lower(name) == estimator_name(k)) return k;
    }
    return std::nullopt;
}

std::vector<OutlierRule> default_outliers() {
    return {{"violin", "pizz"}, {"viola", "pizz"}, {"cello", "pizz"},
            {"bass", "pizz"},   {"double bass", "pizz"}, {"tuba", ""}};
}

bool is_outlier(const std::vector<OutlierRule>& rules, std::string_view instrument, std::string_view style) {
    const std::string i = lower(trim(instrument));
    const std::string s = lower(trim(style));
    return std::any_of(rules.begin(), rules.end(), [&](const OutlierRule& r) {
        return lower(r.instrument) == i && (r.style.empty() || lower(r.style) == s);
    });
}

std::vector<Note> estimate_frame(const Frame& f, const EvalOptions& options, double* confidence) {
    std::vector<Note> out;
    double conf = 0.0;
    switch (options.estimator) {
    case EstimatorKind::Naive: {
        NaiveMonoOptions o = options.naive;
        const auto e = naive_mono(f, o);
        if (e.note) out.push_back(*e.note);
        conf = e.confidence;
        break;
    }
    case EstimatorKind::Hps: {
        const auto e = hps_estimate(f, options.hps_harmonics);
        if (e.note) out.push_back(*e.note);
        conf = e.confidence;
        break;
    }
    case EstimatorKind::Poly: {
        const auto e = simple_poly(f, options.naive.alpha, options.poly_threshold);
        out = e.notes;
        conf = static_cast<double>(out.size());
        break;
    }
    }
    if (confidence) *confidence = conf;
    return out;
}

namespace {

bool same_notes(std::vector<Note> a, std::vector<Note> b) {
    std::sort(a.begin(), a.end(), PitchOrder{});
    std::sort(b.begin(), b.end(), PitchOrder{});
    return a == b;
}

bool same_chromas(const std::vector<Note>& a, const std::vector<Note>& b) {
    std::set<int> ca, cb;
    for (const Note& n : a) ca.insert(n.chroma.index());
    for (const Note& n : b) cb.insert(n.chroma.index());
    return !ca.empty() && ca == cb;
}

}  // namespace

EvalReport summarize(std::vector<FileResult> results, EstimatorKind estimator, const std::vector<OutlierRule>& outliers) {
    std::sort(results.begin(), results.end(),
              [](const FileResult& a, const FileResult& b) { return a.truth.path < b.truth.path; });
    EvalReport r;
    r.estimator = estimator;
    for (auto& res : results) {
        res.outlier = is_outlier(outliers, res.truth.instrument, res.truth.style);
        if (!res.read_ok) {
            ++r.read_failures;
            continue;
        }
        res.exact = same_notes(res.estimate, res.truth.notes);
        res.chroma = same_chromas(res.estimate, res.truth.notes);
        auto add = [&](GroupStats& g) {
            ++g.files;
            g.exact += res.exact ? 1 : 0;
            g.chroma += res.chroma ? 1 : 0;
        };
        add(r.overall);
        if (!res.outlier) add(r.no_outliers);
        add(r.groups[{res.truth.instrument, res.truth.style}]);
    }
    r.results = std::move(results);
    return r;
}

EvalReport evaluate(const GroundTruth& gt, const EvalOptions& options) {
    std::vector<FileResult> results(gt.entries.size());
    detail::parallel_for(gt.entries.size(), options.threads, [&](std::size_t i) {
        FileResult& res = results[i];
        res.truth = gt.entries[i];
        try {
            const Signal s = load_audio(res.truth.path);
            AnalysisConfig ac = options.analysis;
            ac.threads = 1;
            const HeatSequence seq = analyze_signal(s, ac);
            res.frame_index = select_window(seq.frames, options.naive.alpha);
            res.estimate = estimate_frame(seq.frames[res.frame_index], options);
        } catch (const std::exception& e) {
            // Unreadable or too short: reported, not scored.
            res.read_ok = false;
            res.error = e.what();
        }
    });
    return summarize(std::move(results), options.estimator, options.outliers);
}

ConfusionMatrix confusion_matrix(const std::vector<FileResult>& results) {
    ConfusionMatrix cm;
    bool any = false;
    for (const auto& r : results) {
        if (!r.read_ok || r.truth.notes.empty()) continue;
        const int b = note_bin(r.truth.notes.front());
        if (!any) {
            cm.low = cm.high = b;
            any = true;
        }
        cm.low = std::min(cm.low, b);
        cm.high = std::max(cm.high, b);
    }
    if (!any) throw std::invalid_argument("confusion matrix needs at least one readable result");
    cm.counts = Matrix(cm.span() + 1, cm.span());
    for (const auto& r : results) {
        if (!r.read_ok || r.truth.notes.empty()) continue;
        const int col = note_bin(r.truth.notes.front()) - cm.low;
        int row = cm.span();
        if (!r.estimate.empty()) {
            const int e = note_bin(r.estimate.front());
            if (e >= cm.low && e <= cm.high) row = e - cm.low;
        }
        cm.counts(row, col) += 1.0;
    }
    return cm;
}

std::string confusion_to_csv(const ConfusionMatrix& cm) {
    std::ostringstream os;
    os << "estimate\\truth";
    for (int c = 0; c < cm.span(); ++c) os << ',' << bin_note(cm.low + c).name();
    os << '\n';
    for (int r = 0; r <= cm.span(); ++r) {
        os << (r < cm.span() ? bin_note(cm.low + r).name() : std::string("other"));
        for (int c = 0; c < cm.span(); ++c) os << ',' << cm.counts(r, c);
        os << '\n';
    }
    return os.str();
}

std::string breakdown_table(const std::vector<EvalReport>& reports) {
    std::set<std::pair<std::string, std::string>> keys;
    for (const auto& rep : reports) {
        for (const auto& [k, _] : rep.groups) keys.insert(k);
    }
    std::vector<OutlierRule> rules = default_outliers();

    std::ostringstream os;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-22s %-8s", "Instrument", "Type");
    os << buf;
    for (const auto& rep : reports) {
        std::snprintf(buf, sizeof buf, " | %-8s %8s %8s %8s", std::string(estimator_name(rep.estimator)).c_str(), "1", "2",
                      "3");
        os << buf;
    }
    os << '\n';
    auto row = [&](const std::string& name, const std::string& type, auto&& cells) {
        std::snprintf(buf, sizeof buf, "%-22s %-8s", name.c_str(), type.c_str());
        os << buf;
        for (const auto& rep : reports) {
            const auto [a, b, c] = cells(rep);
            std::snprintf(buf, sizeof buf, " | %-8s %8s %8s %8s", "", a.c_str(), b.c_str(), c.c_str());
            os << buf;
        }
        os << '\n';
    };
    for (const auto& key : keys) {
        const bool outlier = is_outlier(rules, key.first, key.second);
        row(key.first, key.second, [&](const EvalReport& rep) {
            const auto it = rep.groups.find(key);
            if (it == rep.groups.end()) return std::tuple<std::string, std::string, std::string>{"n/a", "n/a", "n/a"};
            const GroupStats& g = it->second;
            if (outlier) return std::tuple<std::string, std::string, std::string>{percent(g.accuracy()), "-", "-"};
            return std::tuple<std::string, std::string, std::string>{percent(g.accuracy()), percent(g.accuracy()),
                                                                     percent(g.chroma_accuracy())};
        });
    }
    row("Overall", "", [](const EvalReport& rep) {
        return std::tuple<std::string, std::string, std::string>{
            percent(rep.overall_accuracy()), percent(rep.no_outlier_accuracy()), percent(rep.chroma_accuracy())};
    });
    return os.str();
}

std::string report_to_json(const EvalReport& report) {
    nlohmann::ordered_json j;
    j["estimator"] = std::string(estimator_name(report.estimator));
    j["files"] = report.results.size();
    j["read_failures"] = report.read_failures;
    j["overall_accuracy"] = report.overall_accuracy();
    j["no_outlier_accuracy"] = report.no_outlier_accuracy();
    j["chroma_accuracy"] = report.chroma_accuracy();
    j["chroma_accuracy_all"] = report.chroma_accuracy_all();
    j["groups"] = nlohmann::ordered_json::array();
    for (const auto& [key, g] : report.groups) {
        j["groups"].push_back({{"instrument", key.first},
                               {"style", key.second},
                               {"files", g.files},
                               {"accuracy", g.accuracy()},
                               {"chroma_accuracy", g.chroma_accuracy()}});
    }
    j["results"] = nlohmann::ordered_json::array();
    for (const auto& r : report.results) {
        nlohmann::ordered_json e;
        e["path"] = r.truth.path.string();
        nlohmann::ordered_json truth = nlohmann::ordered_json::array();
        for (const Note& n : r.truth.notes) truth.push_back(n.name());
        e["truth"] = truth;
        nlohmann::ordered_json est = nlohmann::ordered_json::array();
        for (const Note& n : r.estimate) est.push_back(n.name());
        e["estimate"] = est;
        e["frame_index"] = r.frame_index;
        e["exact"] = r.exact;
        e["chroma"] = r.chroma;
        e["outlier"] = r.outlier;
        if (!r.read_ok) e["error"] = r.error;
        j["results"].push_back(e);
    }
    return j.dump(1);
}

std::vector<PolyCurvePoint> evaluate_poly_simulated(int samples_per_n, int n_min, int n_max, std::uint64_t seed,
                                                    int threshold, unsigned threads) {
    if (samples_per_n < 1) throw std::invalid_argument("samples_per_n must be at least 1");
    if (n_min < 1 || n_max < n_min || n_max > kSemitoneCount) throw std::invalid_argument("bad n range");
    std::vector<PolyCurvePoint> curve(static_cast<std::size_t>(n_max - n_min + 1));
    detail::parallel_for(curve.size(), threads, [&](std::size_t i) {
        const int n = n_min + static_cast<int>(i);
        Rng rng(substream_seed(seed, n));
        PolyCurvePoint p;
        p.n = n;
        for (int s = 0; s < samples_per_n; ++s) {
            const auto sample = sample_interpretation(n, rng);
            const auto naive = naive_classify(sample.interpretation);
            const auto simple = simple_poly(sample.interpretation, threshold).notes;
            const auto mn = compare_notes(naive, sample.fundamentals);
            const auto ms = compare_notes(simple, sample.fundamentals);
            p.naive_accuracy += mn.accuracy();
            p.simple_accuracy += ms.accuracy();
            p.naive_precision += mn.precision();
            p.simple_precision += ms.precision();
            p.naive_grid_accuracy += mn.grid_accuracy();
            p.simple_grid_accuracy += ms.grid_accuracy();
        }
        const double k = samples_per_n;
        p.naive_accuracy /= k;
        p.simple_accuracy /= k;
        p.naive_precision /= k;
        p.simple_precision /= k;
        p.naive_grid_accuracy /= k;
        p.simple_grid_accuracy /= k;
        curve[i] = p;
    });
    return curve;
}

std::string poly_curve_to_csv(const std::vector<PolyCurvePoint>& curve) {
    std::ostringstream os;
    os.precision(10);
    os << "n,naive_accuracy,simple_accuracy,naive_precision,simple_precision,naive_grid_accuracy,simple_grid_accuracy\n";
    for (const auto& p : curve) {
        os << p.n << ',' << p.naive_accuracy << ',' << p.simple_accuracy << ',' << p.naive_precision << ','
           << p.simple_precision << ',' << p.naive_grid_accuracy << ',' << p.simple_grid_accuracy << '\n';
    }
    return os.str();
}

}  // namespace geopitch
