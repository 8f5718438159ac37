#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace crokage {

/// Counters and notes collected while processing; never fatal.
struct Diagnostics {
    std::map<std::string, std::size_t> counts;
    std::vector<std::string> notes;

    void record(const std::string& key, std::string note = {});
    std::size_t count(const std::string& key) const;
    bool empty() const { return counts.empty(); }

    /// Plain-text report: one "key count" line per counter, then notes.
    std::string report() const;
};

}  // namespace crokage
