#pragma once

// Reduction of generator sets: drop a generator while the false fundamental
// stays satisfied, until nothing more can go.

#include "geopitch/edgecases.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace geopitch {

/// Generators relative to a false fundamental, kept sorted and unique.
struct GeneratorSet {
    Configuration configuration = Configuration::GammaGamma;
    Note false_fundamental;
    std::vector<GroupElement> generators;

    bool contains(const GroupElement& g) const;
    bool satisfied() const { return satisfies(configuration, generators); }
    std::string name() const;  // "{w^-1, w, w d}"

    bool operator==(const GeneratorSet&) const = default;
};

/// Canonicalizes and validates: every element must be a non-identity member of
/// the hex region. The configuration is taken from the note's column.
/// Throws std::invalid_argument otherwise.
GeneratorSet make_generator_set(const Note& false_fundamental, std::span<const GroupElement> generators);
GeneratorSet make_generator_set(Configuration config, std::span<const GroupElement> generators);

/// The generators of `false_fundamental` among a set of sounding fundamentals:
/// every candidate cell (for any part) that holds a fundamental.
GeneratorSet generator_set_from_fundamentals(const Note& false_fundamental, std::span<const Note> fundamentals);

/// G \ {g} if that still satisfies the false fundamental, nullopt otherwise.
/// Throws std::invalid_argument if g is not in G.
std::optional<GeneratorSet> reduce_once(const GeneratorSet& set, const GroupElement& g);

bool is_irreducible(const GeneratorSet& set);

struct ReductionEdge {
    int from = 0;
    int to = 0;
    GroupElement removed;
};

struct ReductionGraph {
    std::vector<GeneratorSet> nodes;  ///< nodes[0] is the root
    std::vector<ReductionEdge> edges;
    std::vector<int> terminals;       ///< node indices with no outgoing edge
    std::vector<EdgeType> terminal_labels;
    std::size_t paths_explored = 0;   ///< reductions tried before dedup
};

/// Applies every valid reduction to every node, merging equal sets.
/// Throws std::invalid_argument if the root does not satisfy its false fundamental.
ReductionGraph reduction_graph(const GeneratorSet& root);

std::vector<EdgeType> terminal_types(const ReductionGraph& graph);

std::string graph_to_dot(const ReductionGraph& graph);
std::string graph_to_json(const ReductionGraph& graph);

/// Every irreducible satisfying subset of the candidate pool (or of the whole
/// hex region minus the identity when `whole_region` is set).
std::vector<GeneratorSet> irreducible_sets(Configuration config, bool whole_region = false);

/// Terminal statistics for one generator set.
struct TerminalSummary {
    std::array<std::uint8_t, kTerminalTypeCount> counts{};  ///< terminal nodes per type
    std::uint8_t total = 0;           ///< terminal nodes
    std::uint8_t distinct_types = 0;  ///< types with at least one terminal
    bool satisfied = false;
};

/// Memoized terminal summaries over every subset of a configuration's
/// candidate pool. Built once per configuration and read-only afterwards, so
/// safe to share between threads.
class TerminalTable {
public:
    static const TerminalTable& get(Configuration config);

    Configuration configuration() const { return config_; }
    const std::vector<GroupElement>& pool() const { return pool_; }

    /// Bit i set iff pool()[i] is in the set; elements outside the pool are ignored.
    std::uint16_t mask_of(std::span<const GroupElement> generators) const;
    const TerminalSummary& lookup(std::uint16_t mask) const { return table_[mask]; }

private:
    explicit TerminalTable(Configuration config);

    Configuration config_;
    std::vector<GroupElement> pool_;
    std::vector<TerminalSummary> table_;
};

}  // namespace geopitch
