#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace debrisense {

using Complex = std::complex<double>;

/// Speed of light used throughout the model [m/s].
inline constexpr double kSpeedOfLight = 3.0e8;
inline constexpr double kPi = std::numbers::pi;
/// CODATA 2018 vacuum constants. Only impedances use them; path lengths and
/// phases use the rounded kSpeedOfLight above.
inline constexpr double kMu0 = 1.25663706212e-6;
inline constexpr double kEpsilon0 = 8.8541878128e-12;
inline constexpr double kMetersPerKm = 1.0e3;

inline double wavelength(double frequency_hz) { return kSpeedOfLight / frequency_hz; }

// Error hierarchy. CLI maps ConfigError to exit code 2, everything else to 3.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class GeometryError : public Error {
public:
    using Error::Error;
};

class MaterialError : public Error {
public:
    using Error::Error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend Vec3 operator*(double s, const Vec3& v) { return {s * v.x, s * v.y, s * v.z}; }
    friend bool operator==(const Vec3&, const Vec3&) = default;

    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    double norm() const { return std::sqrt(dot(*this)); }
    bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

/// Wraps a phase expressed in cycles to radians in (-pi, pi].
inline double wrap_cycles(double cycles)
{
    double frac = cycles - std::round(cycles);
    if (frac <= -0.5) frac += 1.0;
    return 2.0 * kPi * frac;
}

/// exp(-j 2 pi f tau) with the phase reduced before exponentiation.
inline Complex delay_phasor(double frequency_hz, double delay_s)
{
    return std::polar(1.0, wrap_cycles(-frequency_hz * delay_s));
}

}  // namespace debrisense
