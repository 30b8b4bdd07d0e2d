#pragma once

#include "geopitch/dsp.hpp"
#include "geopitch/estimators.hpp"
#include "geopitch/lattice.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace geopitch {

struct GroundTruthEntry {
    std::filesystem::path path;  ///< resolved against the CSV's directory
    std::string instrument;
    std::string style;
    std::vector<Note> notes;     ///< one for monophonic files
    int line = 0;
};

struct GroundTruth {
    std::vector<GroundTruthEntry> entries;
};

/// CSV with header path,instrument,style,notes. Notes are space-separated
/// pitch names. Throws DataError naming the offending line.
GroundTruth parse_ground_truth(std::string_view text, const std::filesystem::path& base_dir = {});
GroundTruth load_ground_truth(const std::filesystem::path& csv_path);

enum class EstimatorKind : std::uint8_t { Naive, Hps, Poly };

std::string_view estimator_name(EstimatorKind k);
std::optional<EstimatorKind> parse_estimator(std::string_view name);

/// Instrument/style pairs left out of the "no outliers" figures. An empty
/// style matches any style. Matching ignores case.
struct OutlierRule {
    std::string instrument;
    std::string style;
};

std::vector<OutlierRule> default_outliers();
bool is_outlier(const std::vector<OutlierRule>& rules, std::string_view instrument, std::string_view style);

struct EvalOptions {
    EstimatorKind estimator = EstimatorKind::Naive;
    AnalysisConfig analysis;
    NaiveMonoOptions naive;
    int hps_harmonics = 3;
    int poly_threshold = 2;
    std::vector<OutlierRule> outliers = default_outliers();
    unsigned threads = 0;
};

struct FileResult {
    GroundTruthEntry truth;
    std::vector<Note> estimate;
    bool read_ok = true;
    std::string error;
    std::size_t frame_index = 0;
    bool exact = false;   ///< same notes
    bool chroma = false;  ///< same chromas, octaves ignored
    bool outlier = false;
};

struct GroupStats {
    int files = 0;
    int exact = 0;
    int chroma = 0;

    double accuracy() const { return files ? static_cast<double>(exact) / files : 0.0; }
    double chroma_accuracy() const { return files ? static_cast<double>(chroma) / files : 0.0; }
};

struct EvalReport {
    EstimatorKind estimator = EstimatorKind::Naive;
    std::vector<FileResult> results;  ///< sorted by path
    int read_failures = 0;

    GroupStats overall;          ///< every readable file
    GroupStats no_outliers;      ///< readable files outside the outlier groups
    std::map<std::pair<std::string, std::string>, GroupStats> groups;  ///< (instrument, style)

    double overall_accuracy() const { return overall.accuracy(); }
    double no_outlier_accuracy() const { return no_outliers.accuracy(); }
    /// Octave errors forgiven, outliers excluded.
    double chroma_accuracy() const { return no_outliers.chroma_accuracy(); }
    /// Octave errors forgiven over every readable file.
    double chroma_accuracy_all() const { return overall.chroma_accuracy(); }
};

/// Picks the strongest window per file, estimates, and aggregates. Unreadable
/// files are reported and left out of every denominator.
EvalReport evaluate(const GroundTruth& gt, const EvalOptions& options);

/// Aggregation step of evaluate(), exposed for callers that estimate themselves.
EvalReport summarize(std::vector<FileResult> results, EstimatorKind estimator,
                     const std::vector<OutlierRule>& outliers = default_outliers());

/// Estimate for a single frame with the chosen estimator.
std::vector<Note> estimate_frame(const Frame& f, const EvalOptions& options, double* confidence = nullptr);

/// Counts over the tested chromatic range [low, high] of the truth notes.
/// counts(r, c): r = estimate bin - low for r < span, r = span for estimates
/// outside the range or no estimate; c = truth bin - low. Column sums are the
/// per-truth sample counts.
struct ConfusionMatrix {
    int low = 0;
    int high = -1;
    Matrix counts;

    int span() const { return high - low + 1; }
};

/// Monophonic results only (first truth note, first estimated note).
/// Throws std::invalid_argument when no readable result is given.
ConfusionMatrix confusion_matrix(const std::vector<FileResult>& results);

std::string confusion_to_csv(const ConfusionMatrix& cm);

/// Per instrument/style rows with columns 1 (all), 2 (no outliers) and
/// 3 (chroma), one block of columns per report; "-" for outlier groups.
std::string breakdown_table(const std::vector<EvalReport>& reports);

std::string report_to_json(const EvalReport& report);

struct PolyCurvePoint {
    int n = 0;
    double naive_accuracy = 0.0;
    double simple_accuracy = 0.0;
    double naive_precision = 0.0;
    double simple_precision = 0.0;
    double naive_grid_accuracy = 0.0;
    double simple_grid_accuracy = 0.0;
};

/// Naive versus simple_poly on the prevalence sampler. Uses the same per-n
/// substreams as run_experiment, so both see identical interpretations.
std::vector<PolyCurvePoint> evaluate_poly_simulated(int samples_per_n, int n_min, int n_max, std::uint64_t seed,
                                                    int threshold = 2, unsigned threads = 0);

std::string poly_curve_to_csv(const std::vector<PolyCurvePoint>& curve);

}  // namespace geopitch
