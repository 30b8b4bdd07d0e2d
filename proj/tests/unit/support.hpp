#pragma once

#include "geopitch/lattice.hpp"

#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace testsupport {

inline geopitch::Note note(const std::string& name) {
    const auto n = geopitch::parse_note(name);
    if (!n) throw std::invalid_argument("bad note in test: " + name);
    return *n;
}

inline std::vector<geopitch::Note> notes(std::initializer_list<const char*> names) {
    std::vector<geopitch::Note> out;
    for (const char* s : names) out.push_back(note(s));
    return out;
}

/// A fundamental together with its three harmonics, set in a fresh grid.
inline void add_shape(geopitch::Interpretation& interp, const geopitch::Note& f) {
    interp.set(f);
    for (const auto& h : geopitch::harmonics(f)) interp.set(h);
}

}  // namespace testsupport
