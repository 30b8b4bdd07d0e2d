#pragma once

#include "geopitch/dsp.hpp"
#include "geopitch/lattice.hpp"

#include <optional>
#include <string>
#include <vector>

namespace geopitch {

struct MonoEstimate {
    std::optional<Note> note;
    double confidence = 0.0;
};

struct PolyEstimate {
    std::vector<Note> notes;      ///< accepted, lattice order
    std::vector<Note> discarded;  ///< judged to be false fundamentals
};

/// Semitone offset of the h-th partial (h = 1 is the fundamental).
int partial_offset(int h);

/// Harmonic product spectrum on the semitone bins: product of the magnitudes
/// at partials 1..n_harmonics+1. Partials beyond the top bin count as zero.
/// Ties go to the lowest bin; none if every product is zero.
MonoEstimate hps_estimate(const Frame& f, int n_harmonics = 3);

struct NaiveMonoOptions {
    double alpha = kDefaultAlpha;
    /// Weight of the two semitone-neighbour shapes in the confidence.
    double companion_weight = 0.25;
    /// Skip a candidate whose semitone neighbour carries a stronger shape.
    bool leakage_veto = true;
};

/// Lowest note whose four shape cells are all audible. Spectral leakage puts
/// copies of a shape one semitone away (five steps along the fifths axis), so
/// a candidate is passed over when either neighbouring shape is stronger.
MonoEstimate naive_mono(const Frame& f, const NaiveMonoOptions& options = {});

/// Iteratively takes every present note that has all three harmonics present
/// and is not itself a harmonic of a present note, then removes it along
/// with those of its harmonics that no longer explain anything on their own.
/// A harmonic h is kept while some present harmonic of h has h as its only
/// present generator.
std::vector<Note> sink_iteration(const Interpretation& interp);

/// Walks shape-exhibiting notes bottom-to-top, left-to-right. The first is
/// accepted. A later one is discarded when at least `threshold` of its four
/// parts have a possible generator among the notes accepted so far.
PolyEstimate simple_poly(const Interpretation& interp, int threshold = 2);
PolyEstimate simple_poly(const Frame& f, double alpha = kDefaultAlpha, int threshold = 2);

/// {frame_index, notes: ["C4", ...], confidence}
std::string estimate_to_json(std::size_t frame_index, const std::vector<Note>& notes, double confidence);

}  // namespace geopitch
