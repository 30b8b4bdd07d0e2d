#pragma once

// Monte Carlo prevalence of edge types: draw n random fundamentals, find the
// notes that look like fundamentals but are not, and tally the reduction
// terminals of each.

#include "geopitch/reduction.hpp"

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace geopitch {

/// Octaves kept above the sampled range so that harmonics of high
/// fundamentals are not cut off.
inline constexpr int kSamplerHeadroom = 2;

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t& state);

/// Seed for the substream of a given n, independent of execution order.
std::uint64_t substream_seed(std::uint64_t seed, int n);

/// Uniform integer in [0, bound) by rejection; identical across standard libraries.
std::uint64_t uniform_below(Rng& rng, std::uint64_t bound);

struct SampledInterpretation {
    Interpretation interpretation;  ///< octaves + headroom rows
    std::vector<Note> fundamentals; ///< lattice order
};

/// n distinct fundamentals drawn uniformly from the 12 * octaves notes, each
/// with its three harmonics marked. Throws std::invalid_argument for n out of range.
SampledInterpretation sample_interpretation(int n, Rng& rng, int octaves = kDefaultOctaves);

/// Every note exhibiting a full shape, in lattice order.
std::vector<Note> naive_classify(const Interpretation& interp);

/// Note-level comparison of an estimate against the truth on a grid of
/// `grid_notes` cells.
struct NoteMetrics {
    int true_positives = 0;
    int false_positives = 0;
    int false_negatives = 0;
    int grid_notes = kSemitoneCount;

    /// 1 - (FP + FN) / grid_notes: fraction of grid cells classified correctly.
    double grid_accuracy() const;
    /// TP / (TP + FP), 1 when nothing was reported.
    double precision() const;
    /// Per-note accuracy TP / (TP + FP + FN), 1 when both sets are empty.
    double accuracy() const;
};

NoteMetrics compare_notes(const std::vector<Note>& estimate, const std::vector<Note>& truth,
                          int grid_notes = kSemitoneCount);

struct TrialRecord {
    int n_fundamentals = 0;
    std::vector<Note> fundamentals;
    std::vector<Note> false_fundamentals;
    std::array<double, kTerminalTypeCount> type_tallies{};
    double terminal_count_sum = 0.0;  ///< distinct terminal types, summed over false fundamentals
    NoteMetrics naive;
};

/// Tallies one sampled interpretation. Each false fundamental contributes a
/// total weight of one, split evenly across its reduction terminals.
TrialRecord tally_trial(const SampledInterpretation& sample);
TrialRecord run_trial(int n, Rng& rng, int octaves = kDefaultOctaves);

struct PrevalenceRow {
    int n = 0;
    int samples = 0;
    std::int64_t false_fundamentals = 0;
    std::array<double, kTerminalTypeCount> tallies{};
    double terminal_count_sum = 0.0;
    double accuracy_sum = 0.0;  ///< per-note accuracy of the naive classifier
    double precision_sum = 0.0;
    double grid_accuracy_sum = 0.0;

    double tally_total() const;
    double proportion(EdgeType t) const;  ///< 0 when no edge case occurred
    double mean_false_fundamentals() const;
    double mean_terminals() const;        ///< per false fundamental; 0 if none
    double naive_accuracy() const;
    double naive_precision() const;
    double naive_grid_accuracy() const;

    bool operator==(const PrevalenceRow&) const = default;
};

struct PrevalenceStats {
    std::uint64_t seed = 0;
    int samples_per_n = 0;
    int octaves = kDefaultOctaves;
    std::vector<PrevalenceRow> rows;  ///< ascending n

    /// Type shares over every n combined.
    std::array<double, kTerminalTypeCount> overall_proportions() const;
    /// False fundamentals per sampled interpretation, over every n.
    double mean_edge_cases() const;

    bool operator==(const PrevalenceStats&) const = default;
};

/// Runs samples_per_n trials for every n in [n_min, n_max]. Each n draws from
/// its own substream, so results do not depend on `threads` (0 = hardware).
PrevalenceStats run_experiment(int samples_per_n, int n_min, int n_max, std::uint64_t seed, unsigned threads = 0,
                               int octaves = kDefaultOctaves);

/// Columns n,type,proportion,mean_terminals,naive_accuracy followed by
/// mean_false_fundamentals,naive_precision,naive_grid_accuracy.
std::string stats_to_csv(const PrevalenceStats& stats);
std::string stats_to_json(const PrevalenceStats& stats);
PrevalenceStats stats_from_json(const std::string& text);

}  // namespace geopitch
