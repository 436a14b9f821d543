#pragma once

#include <cmath>
#include <cstdint>

namespace mvi {

// Counter-based noise source. Every random draw is a pure function of
// (seed, path_index, particle_index, step_index, draw counter), so simulation
// results are bit-identical regardless of thread count or scheduling order.

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

// SplitMix64 finalizer; bijective on 64-bit words.
inline std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// One substream = one SplitMix64 sequence keyed by hashed indices.
// Box-Muller pairs are cached, Poisson counts use Knuth's product method, so a
// substream may consume a variable number of raw words; that is fine because
// substreams are never shared across (particle, step) cells.
class Substream {
  public:
    explicit Substream(std::uint64_t key) noexcept : state_(key) {}

    std::uint64_t next_u64() noexcept {
        state_ += kGolden;
        return mix64(state_);
    }

    // Uniform on (0, 1]; never zero so log() below is safe.
    double uniform() noexcept {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    double normal() noexcept {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // Exact for any mean; intended for mean = rate*dt << 1.
    unsigned poisson(double mean) noexcept {
        const double limit = std::exp(-mean);
        unsigned k = 0;
        double p = uniform();
        while (p > limit) {
            ++k;
            p *= uniform();
        }
        return k;
    }

  private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Identifies one Monte-Carlo path's noise. Stateless: all methods are const
// and derive substream keys by hashing, never by consuming shared state.
struct NoiseStream {
    std::uint64_t seed = 0;
    std::uint64_t path_index = 0;

    // Reserved particle id for draws shared by the whole ensemble (dB1).
    static constexpr std::uint64_t kCommonParticle = ~0ull;
    // Reserved step id for initial-condition sampling.
    static constexpr std::uint64_t kInitStep = ~0ull;

    Substream substream(std::uint64_t particle, std::uint64_t step) const noexcept {
        std::uint64_t k = mix64(seed + kGolden);
        k = mix64(k + path_index);
        k = mix64(k + particle);
        k = mix64(k + step);
        return Substream(k);
    }

    // Standard-normal draw behind the common increment of one step.
    double common_normal(std::uint64_t step) const noexcept {
        Substream s = substream(kCommonParticle, step);
        return s.normal();
    }
};

} // namespace mvi
