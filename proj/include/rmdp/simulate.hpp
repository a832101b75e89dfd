#pragma once

#include <cstdint>
#include <random>

#include "rmdp/model.hpp"

namespace rmdp {

/// splitmix64 finalizer; the per-episode stream rule below is the only
/// consumer.
uint64_t splitmix64(uint64_t x);

/// Episode i draws from mt19937_64 seeded with splitmix64(seed + i * golden
/// ratio increment). The engine sequence is pinned by the standard and the
/// uniform conversion is explicit, so rollouts are bit-reproducible across
/// platforms.
uint64_t episode_seed(uint64_t seed, uint64_t episode);

class EpisodeRng {
public:
    explicit EpisodeRng(uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1) from the top 53 bits.
    double uniform01() { return (engine_() >> 11) * 0x1.0p-53; }

    /// Inverse-CDF draw; the final index absorbs rounding residue.
    int sample(const numvec& probs);

private:
    std::mt19937_64 engine_;
};

struct RolloutConfig {
    long episodes = 7000;
    long max_steps = 100000;
    uint64_t seed = 0;
    DecisionRule policy;
};

struct ReturnDistribution {
    numvec returns;        // one total per episode, in episode order
    long truncated_count;  // episodes stopped by max_steps
    uint64_t seed;
};

/// Simulates episodes to the sink (or max_steps), accumulating undiscounted
/// rewards. Deterministic given the seed; truncation is reported, not hidden.
ReturnDistribution rollout(const TransientMdp& model, const RolloutConfig& config);

/// -beta^{-1} log(mean exp(-beta x)) with a log-sum-exp stabilizer.
double empirical_erm(const numvec& returns, double beta);

struct HistogramBin {
    double lo, hi;
    long count;
};

std::vector<HistogramBin> histogram(const numvec& returns, const numvec& edges);

/// One bin per integer value spanning the sample range.
numvec integer_bin_edges(const numvec& returns);

numvec uniform_bin_edges(const numvec& returns, int bins);

/// True when every return is within tol of an integer.
bool returns_are_integral(const numvec& returns, double tol = 1e-9);

}  // namespace rmdp
