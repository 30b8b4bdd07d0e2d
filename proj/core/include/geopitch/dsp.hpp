#pragma once

// Audio front-end: WAV input, constant-Q analysis into 120 semitone bins
// (C0..B9), thresholding into interpretations, and window selection.

#include "geopitch/lattice.hpp"

#include <complex>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace geopitch {

inline constexpr double kReferenceA4 = 440.0;
inline constexpr int kBinCount = kSemitoneCount;
inline constexpr int kA4Bin = 57;
inline constexpr double kDefaultAlpha = 3.25;

struct Signal {
    std::vector<double> samples;
    double sample_rate = 44100.0;
};

/// Reads PCM 8/16/24/32-bit or IEEE float 32/64-bit WAV (including the
/// extensible header). Channels are averaged. Throws IoError if the file cannot
/// be opened and DataError on a malformed or unsupported file.
Signal load_audio(const std::filesystem::path& path);
Signal decode_wav(std::span<const unsigned char> bytes);

/// Writes mono PCM (16 or 24 bit) or float32 (bits = 32). Samples are clipped to [-1, 1].
void write_wav(const std::filesystem::path& path, const Signal& signal, int bits = 16);
std::vector<unsigned char> encode_wav(const Signal& signal, int bits = 16);

/// Equal-tempered centre frequency of chromatic bin k (0 = C0).
double bin_frequency(int bin, double a4 = kReferenceA4);
inline double note_frequency(const Note& n, double a4 = kReferenceA4) { return bin_frequency(n.chromatic_index(), a4); }
inline Note bin_note(int bin) { return Note::from_chromatic(bin); }
inline int note_bin(const Note& n) { return n.chromatic_index(); }

/// Windows starting at 0, hop, 2*hop, ... while the start lies inside the
/// signal; each is `length` samples, zero-padded past the end.
/// Throws std::invalid_argument if hop > length, hop == 0, or the signal is
/// shorter than one hop.
std::vector<std::vector<double>> windows(const Signal& signal, std::size_t length = 4096, std::size_t hop = 1024);
std::size_t window_count(std::size_t signal_length, std::size_t hop);

struct Frame {
    std::size_t start_index = 0;
    std::vector<double> bins;  ///< kBinCount magnitudes, chromatic order

    double at(const Note& n) const {
        const int b = note_bin(n);
        return (n.octave >= 0 && b >= 0 && b < static_cast<int>(bins.size())) ? bins[static_cast<std::size_t>(b)] : 0.0;
    }
    double mean() const;
};

/// Bank of Hann-windowed complex kernels, one per semitone bin, with
/// Q = 1 / (2^(1/12) - 1). Kernels longer than the window are truncated to it
/// and centred. Bins at or above Nyquist are left at zero.
class ConstantQ {
public:
    ConstantQ(double sample_rate, std::size_t window_length = 4096, double a4 = kReferenceA4);

    double sample_rate() const { return sample_rate_; }
    std::size_t window_length() const { return window_length_; }
    std::size_t kernel_length(int bin) const { return kernels_[static_cast<std::size_t>(bin)].size(); }

    /// Magnitudes for one window of exactly window_length() samples.
    Frame transform(std::span<const double> window, std::size_t start_index = 0) const;

    static double quality_factor();

private:
    double sample_rate_;
    std::size_t window_length_;
    std::vector<std::size_t> offsets_;
    std::vector<std::vector<std::complex<double>>> kernels_;
};

/// Convenience wrapper using a cached kernel bank for (sample_rate, window length).
Frame cqt_frame(std::span<const double> window, double sample_rate, std::size_t start_index = 0);

/// Frame magnitudes on a 12 x 10 grid.
WeightedGrid frame_grid(const Frame& f);

/// Audible threshold alpha * mean(bins).
double audible_threshold(const Frame& f, double alpha = kDefaultAlpha);

/// Cells whose magnitude is positive and at least alpha * mean(bins).
Interpretation threshold_interpretation(const Frame& f, double alpha = kDefaultAlpha);

/// Mean magnitude of the audible bins; 0 if none.
double window_score(const Frame& f, double alpha = kDefaultAlpha);

/// Index of the highest-scoring frame, earliest on ties.
/// Throws std::invalid_argument on an empty list.
std::size_t select_window(std::span<const Frame> frames, double alpha = kDefaultAlpha);

struct AnalysisConfig {
    std::size_t window_length = 4096;
    std::size_t hop = 1024;
    double a4 = kReferenceA4;
    unsigned threads = 0;
};

struct HeatSequence {
    std::vector<Frame> frames;
    double reference_max = 0.0;  ///< largest raw magnitude before normalization
    double sample_rate = 0.0;
    std::size_t hop = 0;
};

/// Divides every bin by the largest bin over all frames (no-op for silence).
void normalize(HeatSequence& seq);

/// Windows, transforms and globally normalizes a signal.
HeatSequence analyze_signal(const Signal& signal, const AnalysisConfig& config = {});

/// Rows are the 120 bins (chromatic, with note names), columns are frames.
std::string heat_to_csv(const HeatSequence& seq);

/// {"frames": [[[bin, magnitude], ...], ...], "max": m}; only positive bins listed.
std::string heat_to_json(const HeatSequence& seq);

/// Render-time opacity for a cell: magnitude / max + 0.05, clamped to [0, 1].
double heat_opacity(double magnitude, double max);

/// Weighted slices for projection, one per frame.
std::vector<WeightedGrid> heat_slices(const HeatSequence& seq);

// Synthesis, for tests, demos and benchmarks.

struct Partial {
    double frequency = 0.0;
    double amplitude = 0.0;
};

/// Fundamental and three harmonics at frequency ratios 1..4.
std::vector<Partial> harmonic_partials(const Note& fundamental, std::span<const double> amplitudes,
                                       double a4 = kReferenceA4);

/// Sum of sines, peak-normalized to `peak` when the sum exceeds it.
Signal synthesize(std::span<const Partial> partials, double seconds, double sample_rate = 44100.0, double peak = 0.9);

/// Linear attack to 1, exponential decay towards `sustain`.
void apply_envelope(Signal& signal, double attack_seconds, double decay_seconds, double sustain);

}  // namespace geopitch
