#ifndef ORBTUNE_RNG_HPP
#define ORBTUNE_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>

namespace orbtune {

/// Deterministic random stream. mt19937_64 has a standardized output
/// sequence, and the variate transforms below are written out explicitly, so
/// a seed reproduces the same doubles on every platform (the std::
/// distributions make no such promise).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    /// Uniform on [0, 1).
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Standard normal via Box-Muller, one variate per two draws (no cached
    /// second value, which keeps the stream state exactly the engine state).
    double normal() {
        const double u1 = (static_cast<double>(gen_() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
        const double u2 = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    std::string serialize() const {
        std::ostringstream os;
        os << gen_;
        return os.str();
    }

    static Rng deserialize(const std::string& text) {
        Rng r(0);
        std::istringstream is(text);
        is >> r.gen_;
        if (!is) throw std::runtime_error("Rng::deserialize: malformed state");
        return r;
    }

    bool operator==(const Rng& other) const { return gen_ == other.gen_; }

private:
    std::mt19937_64 gen_;
};

}  // namespace orbtune

#endif
