#include "crokage/diagnostics.hpp"

#include <sstream>

namespace crokage {

void Diagnostics::record(const std::string& key, std::string note) {
    ++counts[key];
    if (!note.empty()) {
        notes.push_back(key + ": " + std::move(note));
    }
}

std::size_t Diagnostics::count(const std::string& key) const {
    auto it = counts.find(key);
    return it == counts.end() ? 0 : it->second;
}

std::string Diagnostics::report() const {
    std::ostringstream out;
    for (const auto& [key, n] : counts) {
        out << key << ' ' << n << '\n';
    }
    for (const auto& note : notes) {
        out << "# " << note << '\n';
    }
    return out.str();
}

}  // namespace crokage
