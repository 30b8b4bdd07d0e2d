#include "geopitch/lattice.hpp"

#include "geopitch/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace geopitch {

namespace {

constexpr std::array<std::string_view, kChromaCount> kChromaNames = {
    "C", "G", "D", "A", "E", "B", "F#", "C#", "G#", "Eb", "Bb", "F"};

std::string exponent_ascii(char base, int power) {
    std::string out(1, base);
    if (power != 1) out += "^" + std::to_string(power);
    return out;
}

std::string superscript(int value) {
    static constexpr std::array<std::string_view, 10> digits = {
        "⁰", "¹", "²", "³", "⁴", "⁵", "⁶", "⁷", "⁸", "⁹"};
    std::string out;
    if (value < 0) {
        out += "⁻";
        value = -value;
    }
    for (char ch : std::to_string(value)) out += digits[static_cast<std::size_t>(ch - '0')];
    return out;
}

std::string exponent_pretty(std::string_view base, int power) {
    std::string out(base);
    if (power != 1) out += superscript(power);
    return out;
}

}  // namespace

std::string_view Chroma::name() const { return kChromaNames[static_cast<std::size_t>(index_)]; }

std::string Note::name() const { return std::string(chroma.name()) + std::to_string(octave); }

std::optional<Note> parse_note(std::string_view text) {
    if (text.empty()) return std::nullopt;
    static constexpr std::array<int, 7> letter_pc = {9, 11, 0, 2, 4, 5, 7};  // A..G
    char letter = text[0];
    if (letter >= 'a' && letter <= 'g') letter = static_cast<char>(letter - 'a' + 'A');
    if (letter < 'A' || letter > 'G') return std::nullopt;
    int pc = letter_pc[static_cast<std::size_t>(letter - 'A')];
    std::size_t pos = 1;
    for (;;) {
        if (pos < text.size() && text[pos] == '#') {
            ++pc;
            ++pos;
        } else if (pos < text.size() && text[pos] == 'b') {
            --pc;
            ++pos;
        } else if (text.substr(pos, 3) == "♯") {
            ++pc;
            pos += 3;
        } else if (text.substr(pos, 3) == "♭") {
            --pc;
            pos += 3;
        } else {
            break;
        }
    }
    if (pos >= text.size()) return std::nullopt;
    int octave = 0;
    const char* first = text.data() + pos;
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, octave);
    if (ec != std::errc() || ptr != last) return std::nullopt;
    // B#3 is C4, Cb4 is B3.
    return Note::from_chromatic(octave * kChromaCount + pc);
}

std::string GroupElement::name() const {
    const int sk = signed_k();
    if (sk == 0 && l == 0) return "1";
    std::string out;
    if (l != 0) out += exponent_ascii('w', l);
    if (sk != 0) {
        if (!out.empty()) out += ' ';
        out += exponent_ascii('d', sk);
    }
    return out;
}

std::string GroupElement::pretty_name() const {
    const int sk = signed_k();
    if (sk == 0 && l == 0) return "\U0001d7d9";
    std::string out;
    if (l != 0) out += exponent_pretty("ω", l);
    if (sk != 0) out += exponent_pretty("δ", sk);
    return out;
}

std::string_view shape_symbol(ShapeKind kind) {
    return kind == ShapeKind::Turnstile ? "⊢" : "Γ";
}

std::vector<Note> inverse_positions(const Note& n) {
    std::vector<Note> out;
    for (ShapeKind kind : {ShapeKind::Turnstile, ShapeKind::Gamma}) {
        for (const auto& g : shape_elements(kind)) {
            const Note m = g.inverse().apply(n);
            if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
        }
    }
    return out;
}

std::vector<Note> generators_of(const Note& n) {
    std::vector<Note> out;
    for (const Note& m : inverse_positions(n)) {
        const auto h = harmonics(m);
        if (m == n || std::find(h.begin(), h.end(), n) != h.end()) out.push_back(m);
    }
    return out;
}

std::vector<GroupElement> hex_offsets() {
    std::set<GroupElement> acc;
    for (ShapeKind outer : {ShapeKind::Turnstile, ShapeKind::Gamma}) {
        for (ShapeKind inner : {ShapeKind::Turnstile, ShapeKind::Gamma}) {
            for (const auto& a : shape_elements(outer)) {
                for (const auto& b : shape_elements(inner)) acc.insert(a.inverse() * b);
            }
        }
    }
    return {acc.begin(), acc.end()};
}

std::vector<Note> hex_region(const Note& n) {
    std::vector<Note> out;
    for (const auto& g : hex_offsets()) out.push_back(g.apply(n));
    return out;
}

std::vector<GroupElement> neighborhood_offsets(NeighborhoodKind kind) {
    std::vector<GroupElement> out = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    if (kind == NeighborhoodKind::Moore) {
        out.insert(out.end(), {{1, 1}, {-1, 1}, {1, -1}, {-1, -1}});
    }
    return out;
}

std::vector<Note> neighborhood(const Note& n, NeighborhoodKind kind) {
    std::vector<Note> out;
    for (const auto& g : neighborhood_offsets(kind)) out.push_back(g.apply(n));
    return out;
}

bool in_neighborhood(const GroupElement& offset, NeighborhoodKind kind) {
    const auto offs = neighborhood_offsets(kind);
    return std::find(offs.begin(), offs.end(), offset) != offs.end();
}

std::string_view configuration_name(Configuration c) {
    switch (c) {
    case Configuration::GammaGamma: return "ΓΓ";
    case Configuration::GammaTurnstile: return "Γ⊢";
    case Configuration::TurnstileGamma: return "⊢Γ";
    }
    return "?";
}

std::string_view configuration_code(Configuration c) {
    switch (c) {
    case Configuration::GammaGamma: return "GG";
    case Configuration::GammaTurnstile: return "GT";
    case Configuration::TurnstileGamma: return "TG";
    }
    return "?";
}

std::optional<Configuration> parse_configuration(std::string_view code) {
    for (Configuration c : kAllConfigurations) {
        if (code == configuration_code(c) || code == configuration_name(c)) return c;
    }
    return std::nullopt;
}

Configuration configuration_of(Chroma c) {
    const ShapeKind left = shape_class(c.shifted(-1));
    const ShapeKind own = shape_class(c);
    if (left == ShapeKind::Turnstile) {
        if (own == ShapeKind::Turnstile) throw std::logic_error("adjacent turnstile columns");
        return Configuration::TurnstileGamma;
    }
    return own == ShapeKind::Turnstile ? Configuration::GammaTurnstile : Configuration::GammaGamma;
}

Chroma representative_chroma(Configuration c) {
    switch (c) {
    case Configuration::GammaGamma: return Chroma(6);
    case Configuration::GammaTurnstile: return Chroma(0);
    case Configuration::TurnstileGamma: return Chroma(1);
    }
    return Chroma(0);
}

Interpretation::Interpretation(int octaves) : octaves_(octaves) {
    if (octaves <= 0) throw std::invalid_argument("interpretation needs at least one octave");
    cells_.assign(static_cast<std::size_t>(octaves) * kChromaCount, 0);
}

void Interpretation::set(const Note& n, bool value) {
    if (!contains(n)) throw std::out_of_range("note " + n.name() + " outside grid");
    cells_[offset(n)] = value ? 1 : 0;
}

std::vector<Note> Interpretation::notes() const {
    std::vector<Note> out;
    for (int o = 0; o < octaves_; ++o) {
        for (int c = 0; c < kChromaCount; ++c) {
            if (cells_[static_cast<std::size_t>(o) * kChromaCount + c]) out.emplace_back(Chroma(c), o);
        }
    }
    return out;
}

std::size_t Interpretation::count() const {
    return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), std::uint8_t{1}));
}

WeightedGrid::WeightedGrid(int octaves) : octaves_(octaves) {
    if (octaves <= 0) throw std::invalid_argument("grid needs at least one octave");
    cells_.assign(static_cast<std::size_t>(octaves) * kChromaCount, 0.0);
}

void WeightedGrid::set(const Note& n, double value) {
    if (!contains(n)) throw std::out_of_range("note " + n.name() + " outside grid");
    cells_[offset(n)] = value;
}

double WeightedGrid::max() const { return *std::max_element(cells_.begin(), cells_.end()); }

Interpretation WeightedGrid::support(double threshold) const {
    Interpretation out(octaves_);
    for (int o = 0; o < octaves_; ++o) {
        for (int c = 0; c < kChromaCount; ++c) {
            const Note n(Chroma(c), o);
            const double v = at(n);
            if (v > 0.0 && v >= threshold) out.set(n);
        }
    }
    return out;
}

bool exhibits_shape(const Interpretation& interp, const Note& n) {
    if (!interp.at(n)) return false;
    for (const Note& h : harmonics(n)) {
        if (!interp.at(h)) return false;
    }
    return true;
}

namespace {

// Shared core of both builders: returns the keep mask over the input.
std::vector<bool> interpretation_mask(std::span<const Note> notes, int octaves) {
    for (std::size_t i = 0; i < notes.size(); ++i) {
        if (notes[i].octave < 0 || notes[i].octave >= octaves) {
            throw std::invalid_argument("note " + notes[i].name() + " outside grid");
        }
        if (i > 0 && notes[i - 1].chromatic_index() >= notes[i].chromatic_index()) {
            throw std::invalid_argument("notes must be strictly ascending in pitch");
        }
    }

    Interpretation kept(octaves);
    Interpretation phi(octaves);  // input notes not yet discarded
    for (const Note& n : notes) phi.set(n);

    std::vector<bool> mask(notes.size(), false);
    for (std::size_t i = 0; i < notes.size(); ++i) {
        const Note& n = notes[i];

        // Harmonic of an already-kept note? The f2 generator sits one column
        // to the left, one or two octaves down depending on that column's shape.
        const bool left_turnstile = shape_class(n.chroma.shifted(-1)) == ShapeKind::Turnstile;
        const GroupElement f2_gen = left_turnstile ? GroupElement(-1, -1) : GroupElement(-1, -2);
        if (kept.at(GroupElement(0, -1).apply(n)) || kept.at(f2_gen.apply(n)) ||
            kept.at(GroupElement(0, -2).apply(n))) {
            kept.set(n);
            mask[i] = true;
            continue;
        }

        // Potential fundamental: all of its own harmonics still in the input.
        const auto h = harmonics(n);
        if (phi.at(h[0]) && phi.at(h[1]) && phi.at(h[2])) {
            kept.set(n);
            mask[i] = true;
            continue;
        }

        phi.set(n, false);
    }
    return mask;
}

}  // namespace

Interpretation build_interpretation(std::span<const Note> sorted_notes, int octaves) {
    const auto mask = interpretation_mask(sorted_notes, octaves);
    Interpretation out(octaves);
    for (std::size_t i = 0; i < sorted_notes.size(); ++i) {
        if (mask[i]) out.set(sorted_notes[i]);
    }
    return out;
}

WeightedGrid build_interpretation(std::span<const Note> sorted_notes, std::span<const double> amplitudes,
                                  int octaves) {
    if (amplitudes.size() != sorted_notes.size()) {
        throw std::invalid_argument("amplitude count does not match note count");
    }
    const auto mask = interpretation_mask(sorted_notes, octaves);
    WeightedGrid out(octaves);
    for (std::size_t i = 0; i < sorted_notes.size(); ++i) {
        if (mask[i]) out.set(sorted_notes[i], std::abs(amplitudes[i]));
    }
    return out;
}

Matrix project(std::span<const WeightedGrid> slices, ProjectionPlane plane) {
    if (slices.empty()) throw std::invalid_argument("cannot project an empty sequence");
    const int octaves = slices.front().octaves();
    for (const auto& s : slices) {
        if (s.octaves() != octaves) throw std::invalid_argument("slices have different octave counts");
    }
    const int t_count = static_cast<int>(slices.size());

    Matrix out;
    switch (plane) {
    case ProjectionPlane::ChromaTime: out = Matrix(kChromaCount, t_count); break;
    case ProjectionPlane::HeightTime: out = Matrix(octaves, t_count); break;
    case ProjectionPlane::ChromaHeight: out = Matrix(kChromaCount, octaves); break;
    }
    for (int t = 0; t < t_count; ++t) {
        for (int o = 0; o < octaves; ++o) {
            for (int c = 0; c < kChromaCount; ++c) {
                const double v = slices[static_cast<std::size_t>(t)].at(Note(Chroma(c), o));
                double& cell = plane == ProjectionPlane::ChromaTime   ? out(c, t)
                               : plane == ProjectionPlane::HeightTime ? out(o, t)
                                                                      : out(c, o);
                cell = std::max(cell, v);
            }
        }
    }
    return out;
}

std::string interpretation_to_json(const Interpretation& interp) {
    nlohmann::json j;
    j["octaves"] = interp.octaves();
    j["cells"] = nlohmann::json::array();
    for (const Note& n : interp.notes()) j["cells"].push_back({n.chroma.index(), n.octave});
    return j.dump();
}

Interpretation interpretation_from_json(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError(std::string("interpretation JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("cells") || !j["cells"].is_array()) {
        throw DataError("interpretation JSON needs a \"cells\" array");
    }
    const int octaves = j.value("octaves", kDefaultOctaves);
    if (octaves <= 0) throw DataError("interpretation JSON: octaves must be positive");
    Interpretation out(octaves);
    for (const auto& cell : j["cells"]) {
        if (!cell.is_array() || cell.size() != 2 || !cell[0].is_number_integer() || !cell[1].is_number_integer()) {
            throw DataError("interpretation JSON: each cell must be [chroma, octave]");
        }
        const int c = cell[0].get<int>();
        const int o = cell[1].get<int>();
        if (c < 0 || c >= kChromaCount || o < 0 || o >= octaves) {
            throw DataError("interpretation JSON: cell [" + std::to_string(c) + "," + std::to_string(o) +
                            "] out of range");
        }
        out.set(Note(Chroma(c), o));
    }
    return out;
}

namespace {

std::string csv_header() {
    std::string h = "octave";
    for (auto name : kChromaNames) {
        h += ',';
        h += name;
    }
    return h + '\n';
}

}  // namespace

std::string interpretation_to_csv(const Interpretation& interp) {
    std::string out = csv_header();
    for (int o = 0; o < interp.octaves(); ++o) {
        out += std::to_string(o);
        for (int c = 0; c < kChromaCount; ++c) out += interp.at(Note(Chroma(c), o)) ? ",1" : ",0";
        out += '\n';
    }
    return out;
}

std::string weighted_grid_to_csv(const WeightedGrid& grid) {
    std::ostringstream os;
    os.precision(9);
    os << csv_header();
    for (int o = 0; o < grid.octaves(); ++o) {
        os << o;
        for (int c = 0; c < kChromaCount; ++c) os << ',' << grid.at(Note(Chroma(c), o));
        os << '\n';
    }
    return os.str();
}

}  // namespace geopitch
