#pragma once

#include <cmath>
#include <filesystem>
#include <string>

#include "beltrami/field.hpp"
#include "beltrami/operators.hpp"

namespace test_helpers {

inline double rel_err(const beltrami::SpectralVectorField& a,
                      const beltrami::SpectralVectorField& ref) {
    double nref = beltrami::spectral::norm(ref);
    double diff = beltrami::spectral::norm(a - ref);
    return nref > 0.0 ? diff / nref : diff;
}

/// Bitwise equality of every coefficient.
inline bool identical(const beltrami::SpectralVectorField& a,
                      const beltrami::SpectralVectorField& b) {
    if (a.grid != b.grid) return false;
    for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < a.comp[c].size(); ++i)
            if (a.comp[c][i] != b.comp[c][i]) return false;
    return true;
}

/// Temp-file path unique to this test binary.
inline std::string temp_path(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "beltrami_unit_tests";
    std::filesystem::create_directories(dir);
    return (dir / name).string();
}

} // namespace test_helpers
