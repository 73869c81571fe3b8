#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace conicover {

using i64 = std::int64_t;
using u64 = std::uint64_t;

// Error taxonomy, mapped onto CLI exit codes by the tool.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
// Malformed or inconsistent input data (exit 3).
struct InputError : Error {
    using Error::Error;
};
// A hypothesis required by a pipeline does not hold (exit 2 is not used here; exit 1).
struct HypothesisError : Error {
    using Error::Error;
};
// A verification or post-construction check failed, or a bounded search exhausted (exit 2).
struct VerificationError : Error {
    using Error::Error;
};
// A synthesis step could not complete (stalled recursion, exhausted search). Subtype of
// VerificationError so pipelines and the CLI treat it as a certification failure.
struct SynthesisError : VerificationError {
    using VerificationError::VerificationError;
};

// Explicit RNG handle. Never global; derived streams keep batch runs reproducible.
class Rng {
  public:
    explicit Rng(u64 seed = 0) : eng_(seed) {}
    u64 next() { return eng_(); }
    // value in [0, bound)
    u64 below(u64 bound) {
        std::uniform_int_distribution<u64> d(0, bound - 1);
        return d(eng_);
    }
    // independent stream for worker/instance `index`
    Rng derive(u64 index) const {
        Rng r;
        r.eng_.seed(seed_mix_ ^ (0x9e3779b97f4a7c15ULL * (index + 1)));
        return r;
    }
    static Rng seeded(u64 seed) {
        Rng r(seed);
        r.seed_mix_ = seed;
        return r;
    }

  private:
    std::mt19937_64 eng_;
    u64 seed_mix_ = 0;
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw Error(msg);
}

}  // namespace conicover
