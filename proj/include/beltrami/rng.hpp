#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace beltrami {

/// Deterministic Gaussian source: mt19937_64 uniforms fed through an explicit
/// Box-Muller transform. std::normal_distribution is implementation-defined,
/// which would break the byte-identical-rerun guarantee across toolchains.
class GaussianRng {
  public:
    explicit GaussianRng(std::uint64_t seed) : gen_(seed) {}

    double uniform01() {
        // 53-bit mantissa uniform in (0, 1]
        return (static_cast<double>(gen_() >> 11) + 1.0) * 0x1p-53;
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        double u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    std::complex<double> complex_normal() {
        double u1 = uniform01();
        double u2 = uniform01();
        double r = std::sqrt(-std::log(u1)); // each part has variance 1/2
        double a = 2.0 * M_PI * u2;
        return {r * std::cos(a), r * std::sin(a)};
    }

  private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace beltrami
