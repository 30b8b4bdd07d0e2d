#include "geopitch/reduction.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <map>
#include <set>
#include <stdexcept>

#include "json.hpp"

namespace geopitch {

namespace {

using G = GroupElement;

void canonicalize(std::vector<G>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

const std::vector<G>& region_without_identity() {
    static const std::vector<G> region = [] {
        std::vector<G> r;
        for (const G& g : hex_offsets()) {
            if (g != G::identity()) r.push_back(g);
        }
        return r;
    }();
    return region;
}

std::string set_name(std::span<const G> gens) {
    std::string out = "{";
    for (std::size_t i = 0; i < gens.size(); ++i) {
        if (i) out += ", ";
        out += gens[i].name();
    }
    return out + "}";
}

}  // namespace

bool GeneratorSet::contains(const GroupElement& g) const {
    return std::binary_search(generators.begin(), generators.end(), g);
}

std::string GeneratorSet::name() const { return set_name(generators); }

GeneratorSet make_generator_set(Configuration config, std::span<const GroupElement> generators) {
    GeneratorSet out{config, Note(representative_chroma(config), 4), {generators.begin(), generators.end()}};
    canonicalize(out.generators);
    const auto& region = region_without_identity();
    for (const G& g : out.generators) {
        if (std::find(region.begin(), region.end(), g) == region.end()) {
            throw std::invalid_argument("generator " + g.name() + " lies outside the hex region");
        }
    }
    return out;
}

GeneratorSet make_generator_set(const Note& false_fundamental, std::span<const GroupElement> generators) {
    GeneratorSet out = make_generator_set(configuration_of(false_fundamental.chroma), generators);
    out.false_fundamental = false_fundamental;
    return out;
}

GeneratorSet generator_set_from_fundamentals(const Note& false_fundamental, std::span<const Note> fundamentals) {
    const Configuration config = configuration_of(false_fundamental.chroma);
    std::vector<G> gens;
    for (const G& g : candidate_pool(config)) {
        const Note at = g.apply(false_fundamental);
        if (std::find(fundamentals.begin(), fundamentals.end(), at) != fundamentals.end()) gens.push_back(g);
    }
    return make_generator_set(false_fundamental, gens);
}

std::optional<GeneratorSet> reduce_once(const GeneratorSet& set, const GroupElement& g) {
    if (!set.contains(g)) throw std::invalid_argument("generator " + g.name() + " not in set");
    GeneratorSet out = set;
    out.generators.erase(std::find(out.generators.begin(), out.generators.end(), g));
    if (!out.satisfied()) return std::nullopt;
    return out;
}

bool is_irreducible(const GeneratorSet& set) {
    return std::none_of(set.generators.begin(), set.generators.end(),
                        [&](const G& g) { return reduce_once(set, g).has_value(); });
}

ReductionGraph reduction_graph(const GeneratorSet& root) {
    if (!root.satisfied()) throw std::invalid_argument("root set does not satisfy its false fundamental");
    ReductionGraph graph;
    std::map<std::vector<G>, int> index;
    graph.nodes.push_back(root);
    index.emplace(root.generators, 0);

    std::deque<int> queue{0};
    while (!queue.empty()) {
        const int at = queue.front();
        queue.pop_front();
        const GeneratorSet node = graph.nodes[static_cast<std::size_t>(at)];
        bool any = false;
        for (const G& g : node.generators) {
            auto next = reduce_once(node, g);
            if (!next) continue;
            any = true;
            ++graph.paths_explored;
            auto [it, inserted] = index.emplace(next->generators, static_cast<int>(graph.nodes.size()));
            if (inserted) {
                graph.nodes.push_back(std::move(*next));
                queue.push_back(it->second);
            }
            graph.edges.push_back({at, it->second, g});
        }
        if (!any) {
            graph.terminals.push_back(at);
            graph.terminal_labels.push_back(classify_generators(node.configuration, node.generators));
        }
    }
    return graph;
}

std::vector<EdgeType> terminal_types(const ReductionGraph& graph) { return graph.terminal_labels; }

std::string graph_to_dot(const ReductionGraph& graph) {
    std::string out = "digraph reduction {\n  node [shape=box];\n";
    std::vector<int> label_of(graph.nodes.size(), -1);
    for (std::size_t i = 0; i < graph.terminals.size(); ++i) {
        label_of[static_cast<std::size_t>(graph.terminals[i])] = static_cast<int>(i);
    }
    for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
        out += "  n" + std::to_string(i) + " [label=\"" + graph.nodes[i].name();
        if (label_of[i] >= 0) {
            out += "\\ntype " + std::string(edge_type_name(graph.terminal_labels[static_cast<std::size_t>(label_of[i])])) +
                   "\", peripheries=2";
        } else {
            out += "\"";
        }
        out += "];\n";
    }
    for (const auto& e : graph.edges) {
        out += "  n" + std::to_string(e.from) + " -> n" + std::to_string(e.to) + " [label=\"" + e.removed.name() +
               "\"];\n";
    }
    return out + "}\n";
}

std::string graph_to_json(const ReductionGraph& graph) {
    nlohmann::ordered_json j;
    j["nodes"] = nlohmann::ordered_json::array();
    for (const auto& n : graph.nodes) {
        nlohmann::ordered_json gens = nlohmann::ordered_json::array();
        for (const G& g : n.generators) gens.push_back({g.signed_k(), g.l});
        j["nodes"].push_back(std::move(gens));
    }
    j["edges"] = nlohmann::ordered_json::array();
    for (const auto& e : graph.edges) {
        j["edges"].push_back({{"from", e.from}, {"to", e.to}, {"removed", {e.removed.signed_k(), e.removed.l}}});
    }
    j["terminals"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < graph.terminals.size(); ++i) {
        j["terminals"].push_back(
            {{"node", graph.terminals[i]}, {"type", std::string(edge_type_code(graph.terminal_labels[i]))}});
    }
    return j.dump();
}

std::vector<GeneratorSet> irreducible_sets(Configuration config, bool whole_region) {
    const std::vector<G> base = whole_region ? region_without_identity() : candidate_pool(config);
    const std::uint32_t limit = 1u << base.size();
    std::vector<GeneratorSet> out;
    for (std::uint32_t mask = 0; mask < limit; ++mask) {
        std::vector<G> gens;
        for (std::size_t i = 0; i < base.size(); ++i) {
            if (mask & (1u << i)) gens.push_back(base[i]);
        }
        GeneratorSet set = make_generator_set(config, gens);
        if (set.satisfied() && is_irreducible(set)) out.push_back(std::move(set));
    }
    return out;
}

const TerminalTable& TerminalTable::get(Configuration config) {
    static const std::array<TerminalTable, 3> tables = {TerminalTable(Configuration::GammaGamma),
                                                        TerminalTable(Configuration::GammaTurnstile),
                                                        TerminalTable(Configuration::TurnstileGamma)};
    return tables[static_cast<std::size_t>(config)];
}

std::uint16_t TerminalTable::mask_of(std::span<const GroupElement> generators) const {
    std::uint16_t mask = 0;
    for (const G& g : generators) {
        const auto it = std::lower_bound(pool_.begin(), pool_.end(), g);
        if (it != pool_.end() && *it == g) mask = static_cast<std::uint16_t>(mask | (1u << (it - pool_.begin())));
    }
    return mask;
}

TerminalTable::TerminalTable(Configuration config) : config_(config), pool_(candidate_pool(config)) {
    const std::size_t size = std::size_t{1} << pool_.size();
    table_.resize(size);

    std::vector<std::uint16_t> part_masks;
    for (Part p : kAllParts) {
        const auto cands = part_generators(config, p);
        part_masks.push_back(mask_of(cands));
    }
    auto sat = [&](std::uint32_t m) {
        return std::all_of(part_masks.begin(), part_masks.end(), [m](std::uint16_t pm) { return (m & pm) != 0; });
    };

    // Terminal node sets per mask, filled in order of increasing popcount so
    // every child is ready before its parent.
    std::vector<std::vector<std::uint16_t>> terms(size);
    std::vector<std::uint32_t> order(size);
    for (std::uint32_t m = 0; m < size; ++m) order[m] = m;
    std::stable_sort(order.begin(), order.end(),
                     [](std::uint32_t a, std::uint32_t b) { return std::popcount(a) < std::popcount(b); });

    for (std::uint32_t m : order) {
        if (!sat(m)) continue;
        std::set<std::uint16_t> acc;
        for (std::size_t i = 0; i < pool_.size(); ++i) {
            const std::uint32_t bit = 1u << i;
            if (!(m & bit) || !sat(m & ~bit)) continue;
            const auto& child = terms[m & ~bit];
            acc.insert(child.begin(), child.end());
        }
        if (acc.empty()) acc.insert(static_cast<std::uint16_t>(m));
        terms[m].assign(acc.begin(), acc.end());

        TerminalSummary& s = table_[m];
        s.satisfied = true;
        for (std::uint16_t t : terms[m]) {
            std::vector<G> gens;
            for (std::size_t i = 0; i < pool_.size(); ++i) {
                if (t & (1u << i)) gens.push_back(pool_[i]);
            }
            const EdgeType type = classify_generators(config, gens);
            if (type == EdgeType::NonBasic) throw std::logic_error("non-basic terminal " + set_name(gens));
            ++s.counts[static_cast<std::size_t>(type_index(type))];
            ++s.total;
        }
        for (auto c : s.counts) s.distinct_types = static_cast<std::uint8_t>(s.distinct_types + (c > 0 ? 1 : 0));
    }
}

}  // namespace geopitch
