#include "geopitch/edgecases.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "json.hpp"

namespace geopitch {

namespace {

using G = GroupElement;

constexpr G w(int l) { return G(0, l); }
constexpr G wd(int l, int k) { return G(k, l); }

// Rows of the type table, triple elements only. The ΓΓ and Γ⊢ configurations
// share a column.
struct TypeRow {
    std::vector<G> gamma_left;
    std::vector<G> turnstile_left;
};

const std::array<TypeRow, 8>& type_rows() {
    static const std::array<TypeRow, 8> rows = {{
        {{w(-1), w(2)}, {w(-1), w(2)}},
        {{w(-2), w(1)}, {w(-2), w(1)}},
        {{w(-1), wd(0, -1)}, {w(-1), wd(1, -1)}},
        {{wd(-2, -1), w(1)}, {wd(-1, -1), w(1)}},
        {{w(-2), wd(-1, -1), w(2)}, {w(-2), wd(0, -1), w(2)}},
        {{w(-2), wd(-1, -1), wd(0, -1)}, {w(-2), wd(0, -1), wd(1, -1)}},
        {{wd(-2, -1), wd(-1, -1), w(2)}, {wd(-1, -1), wd(0, -1), w(2)}},
        {{wd(-2, -1), wd(-1, -1), wd(0, -1)}, {wd(-1, -1), wd(0, -1), wd(1, -1)}},
    }};
    return rows;
}

std::vector<G> sorted_unique(std::vector<G> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

Note default_anchor(Configuration config) { return Note(representative_chroma(config), 4); }

int neighborhood_tier(const G& g) {
    if (in_neighborhood(g, NeighborhoodKind::VonNeumann)) return 2;
    if (in_neighborhood(g, NeighborhoodKind::Moore)) return 1;
    return 0;
}

NeighborhoodMinimum count_in_neighborhoods(std::span<const G> generators) {
    NeighborhoodMinimum out;
    for (const G& g : sorted_unique({generators.begin(), generators.end()})) {
        if (in_neighborhood(g, NeighborhoodKind::Moore)) ++out.moore;
        if (in_neighborhood(g, NeighborhoodKind::VonNeumann)) ++out.von_neumann;
    }
    return out;
}

}  // namespace

std::string_view part_name(Part p) {
    switch (p) {
    case Part::F0: return "f0";
    case Part::F1: return "f1";
    case Part::F2: return "f2";
    case Part::F3: return "f3";
    }
    return "?";
}

std::array<GroupElement, 3> part_generators(Configuration config, Part part) {
    const bool left_turnstile = left_shape(config) == ShapeKind::Turnstile;
    switch (part) {
    case Part::F0: return {w(-1), w(-2), left_turnstile ? wd(-1, -1) : wd(-2, -1)};
    case Part::F1: return {w(1), w(-1), left_turnstile ? wd(0, -1) : wd(-1, -1)};
    case Part::F2:
        if (own_shape(config) == ShapeKind::Turnstile) return {wd(1, 1), wd(0, 1), wd(-1, 1)};
        return {wd(2, 1), wd(1, 1), wd(0, 1)};
    case Part::F3: return {w(1), w(2), left_turnstile ? wd(1, -1) : wd(0, -1)};
    }
    throw std::logic_error("unknown part");
}

std::vector<GroupElement> candidate_pool(Configuration config) {
    std::vector<G> all;
    for (Part p : kAllParts) {
        const auto c = part_generators(config, p);
        all.insert(all.end(), c.begin(), c.end());
    }
    return sorted_unique(std::move(all));
}

std::array<int, 4> part_coverage(Configuration config, std::span<const GroupElement> generators) {
    const auto unique = sorted_unique({generators.begin(), generators.end()});
    std::array<int, 4> out{};
    for (Part p : kAllParts) {
        const auto cands = part_generators(config, p);
        for (const G& g : unique) {
            if (std::find(cands.begin(), cands.end(), g) != cands.end()) ++out[static_cast<std::size_t>(p)];
        }
    }
    return out;
}

bool satisfies(Configuration config, std::span<const GroupElement> generators) {
    const auto cov = part_coverage(config, generators);
    return std::all_of(cov.begin(), cov.end(), [](int c) { return c > 0; });
}

std::vector<GroupElement> GeneratorAssignment::generators() const {
    return sorted_unique({chosen.begin(), chosen.end()});
}

std::string_view structure_name(GeneratingStructure gs) {
    switch (gs) {
    case GeneratingStructure::I: return "I";
    case GeneratingStructure::II: return "II";
    case GeneratingStructure::III: return "III";
    case GeneratingStructure::IV: return "IV";
    case GeneratingStructure::V: return "V";
    }
    return "?";
}

std::string_view edge_type_name(EdgeType t) {
    static constexpr std::array<std::string_view, 10> names = {"1", "2", "3", "4", "5",
                                                               "6", "7", "8", "Ø", "non-basic"};
    return names[static_cast<std::size_t>(t)];
}

std::string_view edge_type_code(EdgeType t) {
    static constexpr std::array<std::string_view, 10> names = {"1", "2", "3", "4", "5",
                                                               "6", "7", "8", "empty", "non-basic"};
    return names[static_cast<std::size_t>(t)];
}

bool presents_as_fundamental(const Interpretation& interp, const Note& n) { return exhibits_shape(interp, n); }

std::vector<GeneratorAssignment> enumerate_basic_cases(Configuration config) {
    return enumerate_basic_cases(config, default_anchor(config));
}

std::vector<GeneratorAssignment> enumerate_basic_cases(Configuration config, const Note& false_fundamental) {
    if (configuration_of(false_fundamental.chroma) != config) {
        throw std::invalid_argument("note " + false_fundamental.name() + " is not in configuration " +
                                    std::string(configuration_code(config)));
    }
    std::array<std::array<G, 3>, 4> cands;
    for (Part p : kAllParts) cands[static_cast<std::size_t>(p)] = part_generators(config, p);

    std::vector<GeneratorAssignment> out;
    std::set<std::vector<G>> seen;
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
            for (int c = 0; c < 3; ++c) {
                for (int d = 0; d < 3; ++d) {
                    GeneratorAssignment ga{false_fundamental, config,
                                           {cands[0][a], cands[1][b], cands[2][c], cands[3][d]}};
                    const auto set = ga.generators();
                    const auto cov = part_coverage(config, set);
                    if (!std::all_of(cov.begin(), cov.end(), [](int v) { return v == 1; })) continue;
                    if (seen.insert(set).second) out.push_back(ga);
                }
            }
        }
    }
    return out;
}

EdgeInvariants invariants_of(const Triple& t) {
    EdgeInvariants inv;
    for (const G& g : {t.f0, t.f1, t.f3}) {
        if (g.signed_k() == -1) ++inv.back_delta;
    }
    inv.epsilon = static_cast<int>(sorted_unique({t.f0, t.f1, t.f3}).size());
    const bool e01 = t.f0 == t.f1;
    const bool e13 = t.f1 == t.f3;
    const bool e03 = t.f0 == t.f3;
    if (e01 && e13) inv.gs = GeneratingStructure::I;
    else if (e01) inv.gs = GeneratingStructure::II;
    else if (e03) inv.gs = GeneratingStructure::III;
    else if (e13) inv.gs = GeneratingStructure::IV;
    else inv.gs = GeneratingStructure::V;
    return inv;
}

EdgeType classify_type(const Triple& t, Configuration config) {
    const auto set = sorted_unique({t.f0, t.f1, t.f3});
    const bool turnstile_left = left_shape(config) == ShapeKind::Turnstile;
    const auto& rows = type_rows();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& row = turnstile_left ? rows[i].turnstile_left : rows[i].gamma_left;
        if (set != sorted_unique(row)) continue;
        // The set alone fixes the triple, except that the part each element
        // fills must also agree with the candidates.
        if (invariants_of(t).gs == GeneratingStructure::I || invariants_of(t).gs == GeneratingStructure::III) break;
        const auto f0 = part_generators(config, Part::F0);
        const auto f1 = part_generators(config, Part::F1);
        const auto f3 = part_generators(config, Part::F3);
        auto has = [](const auto& arr, const G& g) { return std::find(arr.begin(), arr.end(), g) != arr.end(); };
        if (!has(f0, t.f0) || !has(f1, t.f1) || !has(f3, t.f3)) break;
        return type_from_index(static_cast<int>(i));
    }
    if (set == sorted_unique({w(-1), w(1)})) return EdgeType::TypeEmpty;
    return EdgeType::NonBasic;
}

EdgeType classify_by_invariants(const Triple& t) {
    const auto inv = invariants_of(t);
    using GS = GeneratingStructure;
    if (inv.back_delta == 0 && inv.epsilon == 2 && inv.gs == GS::II) return EdgeType::Type1;
    if (inv.back_delta == 0 && inv.epsilon == 2 && inv.gs == GS::IV) return EdgeType::Type2;
    if (inv.back_delta == 1 && inv.epsilon == 2 && inv.gs == GS::II) return EdgeType::Type3;
    if (inv.back_delta == 1 && inv.epsilon == 2 && inv.gs == GS::IV) return EdgeType::Type4;
    if (inv.back_delta == 1 && inv.epsilon == 3 && inv.gs == GS::V) return EdgeType::Type5;
    if (inv.back_delta == 2 && inv.epsilon == 3 && inv.gs == GS::V) {
        // Type 6 keeps its same-column generator below the false fundamental.
        const bool below = t.f0 == w(-2) || t.f1 == w(-2) || t.f3 == w(-2);
        return below ? EdgeType::Type6 : EdgeType::Type7;
    }
    if (inv.back_delta == 3 && inv.epsilon == 3 && inv.gs == GS::V) return EdgeType::Type8;
    return EdgeType::NonBasic;
}

EdgeType classify_generators(Configuration config, std::span<const GroupElement> generators) {
    const auto set = sorted_unique({generators.begin(), generators.end()});
    const auto cov = part_coverage(config, set);
    if (std::any_of(cov.begin(), cov.end(), [](int c) { return c == 0; })) {
        throw std::invalid_argument("generator set does not satisfy the false fundamental");
    }
    if (std::all_of(cov.begin(), cov.end(), [](int c) { return c == 1; })) {
        auto pick = [&](Part p) {
            const auto cands = part_generators(config, p);
            for (const G& g : set) {
                if (std::find(cands.begin(), cands.end(), g) != cands.end()) return g;
            }
            throw std::logic_error("uncovered part");
        };
        return classify_type({pick(Part::F0), pick(Part::F1), pick(Part::F3)}, config);
    }
    if (set.size() == 3 && cov[static_cast<std::size_t>(Part::F2)] == 1 &&
        std::find(set.begin(), set.end(), w(-1)) != set.end() &&
        std::find(set.begin(), set.end(), w(1)) != set.end()) {
        return EdgeType::TypeEmpty;
    }
    return EdgeType::NonBasic;
}

bool same_type(const Triple& a, const Triple& b) {
    for (int k = -1; k <= 1; ++k) {
        auto map = [k](const G& g) { return G(g.signed_k(), g.l + k * g.signed_k()); };
        if (map(a.f0) == b.f0 && map(a.f1) == b.f1 && map(a.f3) == b.f3) return true;
    }
    return false;
}

std::array<GroupElement, 4> min_neighborhood_choice(Configuration config) {
    std::array<G, 4> out;
    for (Part p : kAllParts) {
        const auto cands = part_generators(config, p);
        out[static_cast<std::size_t>(p)] = *std::min_element(
            cands.begin(), cands.end(), [](const G& x, const G& y) { return neighborhood_tier(x) < neighborhood_tier(y); });
    }
    return out;
}

NeighborhoodMinimum min_neighborhood_generators(Configuration config) {
    const auto choice = min_neighborhood_choice(config);
    return count_in_neighborhoods(choice);
}

NeighborhoodMinimum min_neighborhood_generators_exhaustive(Configuration config) {
    NeighborhoodMinimum best{1 << 20, 1 << 20};
    for (const auto& ga : enumerate_basic_cases(config)) {
        const auto gens = ga.generators();
        const auto c = count_in_neighborhoods(gens);
        best.moore = std::min(best.moore, c.moore);
        best.von_neumann = std::min(best.von_neumann, c.von_neumann);
    }
    return best;
}

EdgeCaseRecord make_record(const GeneratorAssignment& a) {
    const Triple t = a.triple();
    return {a, invariants_of(t), classify_type(t, a.configuration)};
}

std::string record_to_json(const EdgeCaseRecord& r) {
    auto pair = [](const G& g) { return nlohmann::json::array({g.signed_k(), g.l}); };
    const Triple t = r.assignment.triple();
    nlohmann::ordered_json j;
    j["false_fundamental"] = r.assignment.false_fundamental.name();
    j["configuration"] = std::string(configuration_code(r.assignment.configuration));
    j["triple"] = nlohmann::json::array({pair(t.f0), pair(t.f1), pair(t.f3)});
    j["g_f2"] = pair(r.assignment.at(Part::F2));
    j["back_delta"] = r.invariants.back_delta;
    j["epsilon"] = r.invariants.epsilon;
    j["gs"] = std::string(structure_name(r.invariants.gs));
    j["type"] = std::string(edge_type_code(r.type));
    return j.dump();
}

}  // namespace geopitch
