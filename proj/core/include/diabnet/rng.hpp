#ifndef DIABNET_RNG_HPP
#define DIABNET_RNG_HPP

#include <cstdint>
#include <string_view>
#include <vector>

namespace diabnet {

/// Seeded pseudo-random generator used everywhere randomness is needed.
///
/// The algorithm is xoshiro256** (Blackman/Vigna), with the 256-bit state
/// expanded from the 64-bit seed by splitmix64. Both are integer-only, so
/// identical seeds give identical sequences on every platform. This is the
/// generator recorded as "xoshiro256**" in serialized artifacts.
class Rng {
public:
    static constexpr std::string_view kAlgorithm = "xoshiro256**";

    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();

    /// Uniform draw in [0, 1) with 53 bits of precision.
    double next_double();

    /// Uniform draw in [0, bound), unbiased via rejection. bound must be > 0.
    std::uint64_t below(std::uint64_t bound);

    /// In-place Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& values) {
        if (values.size() < 2) return;
        for (std::size_t i = values.size() - 1; i > 0; --i) {
            const std::size_t j = static_cast<std::size_t>(below(i + 1));
            std::swap(values[i], values[j]);
        }
    }

    /// k distinct indices drawn uniformly from [0, n), in draw order.
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

private:
    std::uint64_t state_[4];
};

/// splitmix64 finalizer. Also used to derive independent sub-seeds.
std::uint64_t splitmix64(std::uint64_t& state);

/// Deterministically derives the seed for an independent random stream.
/// Commands and sweeps use fixed stream ids so every stage of a pipeline can
/// be replayed in isolation.
std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t stream);

} // namespace diabnet

#endif // DIABNET_RNG_HPP
