#pragma once

// The note lattice: a 12-column cylinder of chromas ordered by fifths, with
// one row per octave. Columns wrap, rows do not.

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace geopitch {

inline constexpr int kChromaCount = 12;
inline constexpr int kDefaultOctaves = 10;
inline constexpr int kSemitoneCount = kChromaCount * kDefaultOctaves;

/// A pitch class, indexed by its position on the circle of fifths
/// (C=0, G=1, D=2, ... F=11).
class Chroma {
public:
    constexpr Chroma() = default;
    constexpr explicit Chroma(int fifths_index) : index_(wrap(fifths_index)) {}

    static constexpr Chroma from_pitch_class(int pitch_class) {
        // 7 semitones per fifth, and 7 * 7 = 49 = 1 (mod 12), so the map is
        // its own inverse.
        return Chroma(wrap(pitch_class) * 7);
    }

    constexpr int index() const { return index_; }
    constexpr int pitch_class() const { return (index_ * 7) % kChromaCount; }

    std::string_view name() const;

    constexpr Chroma shifted(int steps) const { return Chroma(index_ + steps); }

    constexpr auto operator<=>(const Chroma&) const = default;

private:
    static constexpr int wrap(int v) { return ((v % kChromaCount) + kChromaCount) % kChromaCount; }
    int index_ = 0;
};

/// A lattice cell: chroma column and octave row.
struct Note {
    Chroma chroma;
    int octave = 0;

    constexpr Note() = default;
    constexpr Note(Chroma c, int o) : chroma(c), octave(o) {}

    /// Semitones above C0.
    constexpr int chromatic_index() const { return octave * kChromaCount + chroma.pitch_class(); }

    static constexpr Note from_chromatic(int semitone) {
        int octave = semitone >= 0 ? semitone / kChromaCount : -((-semitone + kChromaCount - 1) / kChromaCount);
        return Note(Chroma::from_pitch_class(semitone - octave * kChromaCount), octave);
    }

    /// Scientific pitch name, e.g. "C4", "F#3", "Eb5".
    std::string name() const;

    constexpr bool operator==(const Note&) const = default;
};

/// Ascending pitch order: by octave, then by chromatic pitch class.
struct PitchOrder {
    constexpr bool operator()(const Note& a, const Note& b) const {
        return a.chromatic_index() < b.chromatic_index();
    }
};

/// Lattice order: by octave, then by fifths column (left-to-right, bottom-to-top).
struct LatticeOrder {
    constexpr bool operator()(const Note& a, const Note& b) const {
        if (a.octave != b.octave) return a.octave < b.octave;
        return a.chroma.index() < b.chroma.index();
    }
};

/// Parses scientific pitch notation: a letter A-G, any number of accidentals
/// ('#', 'b', U+266F, U+266D) and a signed octave. Returns nullopt on failure.
std::optional<Note> parse_note(std::string_view text);

/// Group element delta^k omega^l. delta moves one fifth, omega one octave.
struct GroupElement {
    int k = 0;  ///< delta exponent, kept in [0, 12)
    int l = 0;  ///< omega exponent

    constexpr GroupElement() = default;
    constexpr GroupElement(int delta, int omega)
        : k(((delta % kChromaCount) + kChromaCount) % kChromaCount), l(omega) {}

    static constexpr GroupElement identity() { return {}; }
    static constexpr GroupElement delta(int power = 1) { return {power, 0}; }
    static constexpr GroupElement omega(int power = 1) { return {0, power}; }

    /// Representative of k in [-5, 6], for display and serialization.
    constexpr int signed_k() const { return k > 6 ? k - kChromaCount : k; }

    constexpr GroupElement inverse() const { return {-k, -l}; }

    /// Composition; the group is abelian so the order does not matter.
    constexpr GroupElement operator*(const GroupElement& o) const { return {k + o.k, l + o.l}; }

    constexpr Note apply(const Note& n) const { return Note(n.chroma.shifted(k), n.octave + l); }

    /// "w^2 d^-1" style ASCII name; "1" for the identity.
    std::string name() const;
    /// Unicode name with ω/δ and superscript exponents.
    std::string pretty_name() const;

    constexpr auto operator<=>(const GroupElement&) const = default;
};

constexpr Note act(const GroupElement& g, const Note& n) { return g.apply(n); }

enum class ShapeKind : std::uint8_t { Turnstile, Gamma };

std::string_view shape_symbol(ShapeKind kind);

/// Turnstile for C, C#, D, Eb, E (fifths indices 0, 7, 2, 9, 4); Gamma otherwise.
constexpr ShapeKind shape_class(Chroma c) {
    switch (c.index()) {
    case 0: case 2: case 4: case 7: case 9: return ShapeKind::Turnstile;
    default: return ShapeKind::Gamma;
    }
}

/// The four elements tracing a fundamental and its first three harmonics.
constexpr std::array<GroupElement, 4> shape_elements(ShapeKind kind) {
    const GroupElement f2 = kind == ShapeKind::Turnstile ? GroupElement(1, 1) : GroupElement(1, 2);
    return {GroupElement::identity(), GroupElement::omega(1), f2, GroupElement::omega(2)};
}

/// f1, f2, f3 of a fundamental.
constexpr std::array<Note, 3> harmonics(const Note& n) {
    const auto elems = shape_elements(shape_class(n.chroma));
    return {elems[1].apply(n), elems[2].apply(n), elems[3].apply(n)};
}

/// {s^-1 n | s in either shape}: every cell that could have a part at n,
/// ignoring which shape that cell actually carries. Always contains n.
std::vector<Note> inverse_positions(const Note& n);

/// The notes whose own shape covers n (n itself included). Exactly four.
std::vector<Note> generators_of(const Note& n);

/// Offsets {s' s | s' an inverse shape element, s a shape element}; 13 cells
/// inside the 3-column by 5-row block around the origin.
std::vector<GroupElement> hex_offsets();
std::vector<Note> hex_region(const Note& n);

enum class NeighborhoodKind : std::uint8_t { VonNeumann, Moore };

std::vector<GroupElement> neighborhood_offsets(NeighborhoodKind kind);
std::vector<Note> neighborhood(const Note& n, NeighborhoodKind kind);
bool in_neighborhood(const GroupElement& offset, NeighborhoodKind kind);

/// Shape classes of the column left of a note and of the note's own column.
enum class Configuration : std::uint8_t { GammaGamma, GammaTurnstile, TurnstileGamma };

inline constexpr std::array<Configuration, 3> kAllConfigurations = {
    Configuration::GammaGamma, Configuration::GammaTurnstile, Configuration::TurnstileGamma};

std::string_view configuration_name(Configuration c);   // "ΓΓ", "Γ⊢", "⊢Γ"
std::string_view configuration_code(Configuration c);   // "GG", "GT", "TG"
std::optional<Configuration> parse_configuration(std::string_view code);

constexpr ShapeKind left_shape(Configuration c) {
    return c == Configuration::TurnstileGamma ? ShapeKind::Turnstile : ShapeKind::Gamma;
}
constexpr ShapeKind own_shape(Configuration c) {
    return c == Configuration::GammaTurnstile ? ShapeKind::Turnstile : ShapeKind::Gamma;
}

/// Configuration of a chroma column relative to its left neighbour. Two
/// turnstile columns are never adjacent, so this is total.
Configuration configuration_of(Chroma c);

/// A chroma that lies in the given configuration (used as a canonical site).
Chroma representative_chroma(Configuration c);

/// Boolean occupancy of a 12 x octaves grid.
class Interpretation {
public:
    explicit Interpretation(int octaves = kDefaultOctaves);

    int octaves() const { return octaves_; }

    bool contains(const Note& n) const {
        return n.octave >= 0 && n.octave < octaves_;
    }
    bool at(const Note& n) const {
        return contains(n) && cells_[offset(n)] != 0;
    }
    void set(const Note& n, bool value = true);

    /// Set cells in lattice order.
    std::vector<Note> notes() const;
    std::size_t count() const;
    bool empty() const { return count() == 0; }

    bool operator==(const Interpretation&) const = default;

private:
    std::size_t offset(const Note& n) const {
        return static_cast<std::size_t>(n.octave) * kChromaCount + static_cast<std::size_t>(n.chroma.index());
    }
    int octaves_;
    std::vector<std::uint8_t> cells_;
};

/// Real-valued analogue of an interpretation (magnitudes per cell).
class WeightedGrid {
public:
    explicit WeightedGrid(int octaves = kDefaultOctaves);

    int octaves() const { return octaves_; }
    bool contains(const Note& n) const { return n.octave >= 0 && n.octave < octaves_; }
    double at(const Note& n) const { return contains(n) ? cells_[offset(n)] : 0.0; }
    void set(const Note& n, double value);
    double max() const;

    /// Cells with magnitude >= threshold and > 0.
    Interpretation support(double threshold = 0.0) const;

    bool operator==(const WeightedGrid&) const = default;

private:
    std::size_t offset(const Note& n) const {
        return static_cast<std::size_t>(n.octave) * kChromaCount + static_cast<std::size_t>(n.chroma.index());
    }
    int octaves_;
    std::vector<double> cells_;
};

/// True iff n and all three of its harmonics are set. Out-of-grid parts make
/// the predicate false.
bool exhibits_shape(const Interpretation& interp, const Note& n);

/// Builds an interpretation from a pitch-sorted note list, rejecting noise.
/// Notes must be strictly ascending in pitch. A note is kept if an already-kept note could have generated it, or
/// if its full shape is present among the (not yet discarded) input notes.
/// Throws std::invalid_argument on unsorted or duplicate input.
Interpretation build_interpretation(std::span<const Note> sorted_notes, int octaves = kDefaultOctaves);

/// Weighted variant: kept cells store |amplitude|.
WeightedGrid build_interpretation(std::span<const Note> sorted_notes, std::span<const double> amplitudes,
                                  int octaves = kDefaultOctaves);

/// Row-major dense matrix used for projections and confusion tables.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(int r, int c, double fill = 0.0) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, fill) {}

    double& operator()(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
    double operator()(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
};

enum class ProjectionPlane : std::uint8_t { ChromaTime, HeightTime, ChromaHeight };

/// Max-projection of a sequence of weighted slices.
///  ChromaTime:   12 x T (rows in fifths order) -- a fifths-ordered piano roll
///  HeightTime:   O  x T
///  ChromaHeight: 12 x O
/// Throws std::invalid_argument on an empty sequence or mismatched octaves.
Matrix project(std::span<const WeightedGrid> slices, ProjectionPlane plane);

/// JSON {"octaves": O, "cells": [[chroma, octave], ...]}.
std::string interpretation_to_json(const Interpretation& interp);
Interpretation interpretation_from_json(std::string_view text);

/// CSV, one row per octave, header "octave,C,G,D,...,F" (fifths order).
std::string interpretation_to_csv(const Interpretation& interp);
std::string weighted_grid_to_csv(const WeightedGrid& grid);

}  // namespace geopitch
