#pragma once

#include <sstream>
#include <string>

#include "catch_amalgamated.hpp"
#include "zspace/zspace.hpp"

namespace zspace::testing {

inline std::string source_path(const std::string& rel) { return std::string(ZSPACE_SOURCE_DIR) + "/" + rel; }

inline const Manifest& corpus_manifest() {
    static const Manifest m = load_manifest(source_path("corpus/manifest.txt"));
    return m;
}

inline Manifest manifest_from(const std::string& text) {
    std::istringstream in(text);
    return parse_manifest(in);
}

inline double max_rel(const std::vector<double>& a, const std::vector<double>& b) {
    REQUIRE(a.size() == b.size());
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, relative_difference(a[i], b[i]));
    return m;
}

inline double max_abs(const std::vector<double>& a, const std::vector<double>& b) {
    REQUIRE(a.size() == b.size());
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace zspace::testing
