#pragma once

// False fundamentals: notes that present a full shape because other
// fundamentals happen to cover each of their four parts.
//
// All generators are expressed relative to the false fundamental.

#include "geopitch/lattice.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace geopitch {

enum class Part : std::uint8_t { F0, F1, F2, F3 };

inline constexpr std::array<Part, 4> kAllParts = {Part::F0, Part::F1, Part::F2, Part::F3};

std::string_view part_name(Part p);

/// The three cells whose shapes cover the given part of a false fundamental
/// in the given configuration. The false fundamental itself is never listed.
std::array<GroupElement, 3> part_generators(Configuration config, Part part);

/// Union of all part candidates for a configuration (10 distinct elements).
std::vector<GroupElement> candidate_pool(Configuration config);

/// Number of elements of `generators` that cover each part, in F0..F3 order.
std::array<int, 4> part_coverage(Configuration config, std::span<const GroupElement> generators);

/// Every part covered at least once.
bool satisfies(Configuration config, std::span<const GroupElement> generators);

/// (g(f0), g(f1), g(f3)). f2 is left out: its candidates never overlap the others.
struct Triple {
    GroupElement f0;
    GroupElement f1;
    GroupElement f3;

    bool operator==(const Triple&) const = default;
};

/// A basic edge case: one generator chosen per part, each part covered once.
struct GeneratorAssignment {
    Note false_fundamental;
    Configuration configuration = Configuration::GammaGamma;
    std::array<GroupElement, 4> chosen;  ///< indexed by Part

    GroupElement at(Part p) const { return chosen[static_cast<std::size_t>(p)]; }
    Triple triple() const { return {at(Part::F0), at(Part::F1), at(Part::F3)}; }
    /// Distinct generators, sorted.
    std::vector<GroupElement> generators() const;
};

enum class GeneratingStructure : std::uint8_t { I, II, III, IV, V };

std::string_view structure_name(GeneratingStructure gs);

struct EdgeInvariants {
    int back_delta = 0;  ///< entries of the triple lying one column to the left
    int epsilon = 0;     ///< distinct entries in the triple
    GeneratingStructure gs = GeneratingStructure::V;

    bool operator==(const EdgeInvariants&) const = default;
};

enum class EdgeType : std::uint8_t { Type1, Type2, Type3, Type4, Type5, Type6, Type7, Type8, TypeEmpty, NonBasic };

inline constexpr int kTerminalTypeCount = 9;  // Type1..Type8 and TypeEmpty

std::string_view edge_type_name(EdgeType t);       // "1".."8", "Ø", "non-basic"
std::string_view edge_type_code(EdgeType t);       // "1".."8", "empty", "non-basic"
inline constexpr int type_index(EdgeType t) { return static_cast<int>(t); }
inline constexpr EdgeType type_from_index(int i) { return static_cast<EdgeType>(i); }

/// True iff n and its harmonics are all set in I. An edge case is a note for
/// which this holds although n is not itself a fundamental.
bool presents_as_fundamental(const Interpretation& interp, const Note& n);

/// All 24 basic cases for a configuration, anchored at `false_fundamental`
/// (default: a representative middle-register note in that configuration).
std::vector<GeneratorAssignment> enumerate_basic_cases(Configuration config);
std::vector<GeneratorAssignment> enumerate_basic_cases(Configuration config, const Note& false_fundamental);

EdgeInvariants invariants_of(const Triple& t);

/// Table lookup of the eight basic types; {ω⁻¹, ω} maps to TypeEmpty, any
/// other pattern to NonBasic.
EdgeType classify_type(const Triple& t, Configuration config);

/// Independent route to the basic types through the invariants alone.
/// NonBasic if the invariants match no row.
EdgeType classify_by_invariants(const Triple& t);

/// Classifies a satisfying generator set: basic (each part covered once),
/// TypeEmpty ({ω⁻¹, ω} plus one f2 generator) or NonBasic.
/// Throws std::invalid_argument if the set does not satisfy the configuration.
EdgeType classify_generators(Configuration config, std::span<const GroupElement> generators);

/// Triples related by ω^l δ^m -> ω^(l+km) δ^m for some k in {-1, 0, 1}.
bool same_type(const Triple& a, const Triple& b);

struct NeighborhoodMinimum {
    int moore = 0;
    int von_neumann = 0;

    bool operator==(const NeighborhoodMinimum&) const = default;
};

/// Fewest generators a basic case can place in the Moore and von Neumann
/// neighbourhoods, built by picking per part the least intrusive candidate.
NeighborhoodMinimum min_neighborhood_generators(Configuration config);

/// The per-part choice made by min_neighborhood_generators (F0..F3).
std::array<GroupElement, 4> min_neighborhood_choice(Configuration config);

/// Same minimum found by scanning every basic case.
NeighborhoodMinimum min_neighborhood_generators_exhaustive(Configuration config);

struct EdgeCaseRecord {
    GeneratorAssignment assignment;
    EdgeInvariants invariants;
    EdgeType type = EdgeType::NonBasic;
};

EdgeCaseRecord make_record(const GeneratorAssignment& a);

/// {false_fundamental, configuration, triple, g_f2, back_delta, epsilon, gs, type}
std::string record_to_json(const EdgeCaseRecord& r);

}  // namespace geopitch
