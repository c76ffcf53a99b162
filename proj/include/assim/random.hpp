#pragma once

// Portable seeded randomness. std::mt19937_64 is fully specified by the
// standard, but the std distributions are not, so every draw is derived here
// from raw engine output. Results are identical on every conforming platform.

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace assim {

inline constexpr std::string_view kRngAlgorithm = "mt19937_64/splitmix64-streams";

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Independent stream seed for a (seed, a, b) coordinate.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) noexcept;

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, 1) with 53 bits of precision.
    double uniform01();

    /// Uniform integer in [0, bound). bound > 0.
    std::uint64_t uniform_below(std::uint64_t bound);

    double standard_normal();

    /// Gamma(shape, 1), shape > 0 (Marsaglia-Tsang).
    double gamma(double shape);

private:
    std::mt19937_64 engine_;
};

/// m distinct indices from [0, n), uniformly, in draw order (partial Fisher-Yates).
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t m, Rng& rng);

/// Symmetric Dirichlet draw of dimension n.
std::vector<double> dirichlet(std::size_t n, double concentration, Rng& rng);

} // namespace assim
