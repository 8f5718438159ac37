#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace crokage {

/// API class names used in a Java-like snippet, first-occurrence order, no
/// duplicates. A class is an uppercase-initial identifier of two or more
/// letters/digits seen after `new`, before `.`, before a declared
/// identifier, after `extends`/`implements`, or inside generic brackets.
std::vector<std::string> extract_api_classes(std::string_view code);

/// Method names in call position: lowercase-initial identifier directly
/// followed by `(`, not a keyword and not preceded by `new`. Sorted, unique.
std::vector<std::string> extract_methods(std::string_view code);

}  // namespace crokage
