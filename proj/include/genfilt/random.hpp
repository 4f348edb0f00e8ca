#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

namespace genfilt {

/// Seeded source for probe vectors. mt19937_64 is fully specified by the
/// standard and the bit-to-double mapping is done by hand, so a seed gives the
/// same stream on every conforming platform.
class ProbeRng {
public:
    explicit ProbeRng(std::uint64_t seed) : engine_(seed) {}

    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on the closed unit disk.
    std::complex<double> unit_disk() {
        double radius = std::sqrt(uniform01());
        double angle = 2.0 * std::numbers::pi * uniform01();
        return std::polar(radius, angle);
    }

    std::uint64_t next() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace genfilt
