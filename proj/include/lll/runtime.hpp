#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lll/common.hpp"

namespace lll {

// Accumulated simulated LOCAL rounds, one phase per gather-then-compute step.
// Convention: collecting a radius-r ball costs r rounds, local computation
// costs 0, iterated phases sum.
struct RoundLedger {
    struct Phase {
        std::string label;
        std::uint64_t rounds = 0;
    };
    std::vector<Phase> phases;
    std::uint64_t total = 0;

    void charge(const std::string& label, std::uint64_t r) {
        phases.push_back({label, r});
        total += r;
    }
};

inline RoundLedger& charge(RoundLedger& ledger, const std::string& label,
                           std::uint64_t r) {
    ledger.charge(label, r);
    return ledger;
}

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}
}  // namespace detail

// Counter-based deterministic stream: the i-th output is a hash of
// (base, i), so streams never depend on platform RNG internals.
class Rng {
  public:
    explicit Rng(std::uint64_t base) : base_(base) {}

    std::uint64_t next_u64() {
        return detail::splitmix64(base_ + 0x9E3779B97F4A7C15ULL * (++ctr_));
    }
    // Uniform in [0, bound) by rejection; bound >= 1.
    std::uint64_t below(std::uint64_t bound) {
        LLL_CHECK(bound >= 1, "Rng::below: empty range");
        std::uint64_t limit = ~std::uint64_t(0) - ~std::uint64_t(0) % bound;
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % bound;
    }
    // Uniform double in [0,1) with 53 random bits.
    double real53() { return double(next_u64() >> 11) * 0x1.0p-53; }
    bool bernoulli(double p) { return real53() < p; }
    // Index into a probability vector (sums to 1); walks the CDF.
    int sample_pmf(const std::vector<double>& pmf) {
        double u = real53();
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < pmf.size(); ++i) {
            acc += pmf[i];
            if (u < acc) return int(i);
        }
        return int(pmf.size()) - 1;
    }

  private:
    std::uint64_t base_;
    std::uint64_t ctr_ = 0;
};

// Deterministic per-(node, phase) substream derivation from a master seed.
struct SeedContext {
    std::uint64_t master_seed = 0;

    Rng stream(std::uint64_t node, std::uint64_t phase) const {
        std::uint64_t h = detail::splitmix64(master_seed ^ 0xA5A5A5A55A5A5A5AULL);
        h = detail::splitmix64(h ^ (node * 0xC2B2AE3D27D4EB4FULL));
        h = detail::splitmix64(h ^ (phase * 0x165667B19E3779F9ULL));
        return Rng(h);
    }

    // Child context with an independent substream family.
    SeedContext derived(std::uint64_t salt) const {
        return SeedContext{detail::splitmix64(master_seed ^ (salt * 0x9E3779B97F4A7C15ULL))};
    }
};

// Structured phase ids so algorithm stages draw from disjoint substreams.
enum class PhaseKind : std::uint64_t {
    MtInitial = 1,
    MtResample = 2,
    RpsDraw = 3,
    DetRetry = 4,
    BootstrapRetry = 5,
    StrayFill = 6,
    BucketDraw = 7,
    FrugalDraw = 8,
    FrugalRetry = 9,
    PruneFlip = 10,
    ListDraw = 11,
    Generator = 12,
    ListCompletion = 13,
};

inline std::uint64_t phase_id(PhaseKind kind, std::uint64_t a = 0, std::uint64_t b = 0) {
    std::uint64_t h = detail::splitmix64(std::uint64_t(kind) * 0x9E3779B97F4A7C15ULL);
    h = detail::splitmix64(h ^ (a * 0xD6E8FEB86659FD93ULL));
    h = detail::splitmix64(h ^ (b * 0xCA5A826395121157ULL));
    return h;
}

}  // namespace lll
