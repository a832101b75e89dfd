#include "rmdp/simulate.hpp"

#include <algorithm>
#include <cmath>

namespace rmdp {

uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

uint64_t episode_seed(uint64_t seed, uint64_t episode) {
    return splitmix64(seed + episode * 0x9E3779B97F4A7C15ULL);
}

int EpisodeRng::sample(const numvec& probs) {
    double u = uniform01();
    double acc = 0.0;
    for (size_t i = 0; i + 1 < probs.size(); i++) {
        acc += probs[i];
        if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size()) - 1;
}

ReturnDistribution rollout(const TransientMdp& model, const RolloutConfig& config) {
    if (config.episodes < 1) throw std::invalid_argument("episodes must be >= 1");
    if (config.max_steps < 1) throw std::invalid_argument("max_steps must be >= 1");
    if (static_cast<int>(config.policy.probs.size()) != model.num_states())
        throw ModelError("policy does not match model");

    ReturnDistribution dist{numvec(), 0, config.seed};
    dist.returns.reserve(config.episodes);

    numvec outcome_probs;
    for (long ep = 0; ep < config.episodes; ep++) {
        EpisodeRng rng(episode_seed(config.seed, static_cast<uint64_t>(ep)));
        int s = rng.sample(model.initial());
        double total = 0.0;
        bool terminated = false;
        for (long step = 0; step < config.max_steps; step++) {
            int k = rng.sample(config.policy.probs[s]);
            int action = model.actions(s)[k];
            const auto& outs = model.outcomes(s, action);
            outcome_probs.clear();
            for (const Outcome& o : outs) outcome_probs.push_back(o.prob);
            const Outcome& o = outs[rng.sample(outcome_probs)];
            total += o.reward;
            if (o.next == TransientMdp::SINK) {
                terminated = true;
                break;
            }
            s = o.next;
        }
        if (!terminated) dist.truncated_count++;
        dist.returns.push_back(total);
    }
    return dist;
}

double empirical_erm(const numvec& returns, double beta) {
    if (returns.empty()) throw std::invalid_argument("empty sample");
    if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
    numvec terms;
    terms.reserve(returns.size());
    for (double x : returns) terms.push_back(-beta * x);
    double lse = log_sum_exp(terms) - std::log(static_cast<double>(returns.size()));
    return -lse / beta;
}

std::vector<HistogramBin> histogram(const numvec& returns, const numvec& edges) {
    if (edges.size() < 2) throw std::invalid_argument("need at least two bin edges");
    std::vector<HistogramBin> bins;
    for (size_t i = 0; i + 1 < edges.size(); i++) bins.push_back({edges[i], edges[i + 1], 0});
    for (double x : returns) {
        // upper edge of the last bin is inclusive
        auto it = std::upper_bound(edges.begin(), edges.end(), x);
        long idx = (it - edges.begin()) - 1;
        if (idx == static_cast<long>(bins.size()) && x == edges.back()) idx--;
        if (idx >= 0 && idx < static_cast<long>(bins.size())) bins[idx].count++;
    }
    return bins;
}

numvec integer_bin_edges(const numvec& returns) {
    if (returns.empty()) throw std::invalid_argument("empty sample");
    long lo = std::lround(*std::min_element(returns.begin(), returns.end()));
    long hi = std::lround(*std::max_element(returns.begin(), returns.end()));
    numvec edges;
    for (long k = lo; k <= hi + 1; k++) edges.push_back(k - 0.5);
    return edges;
}

numvec uniform_bin_edges(const numvec& returns, int bins) {
    if (returns.empty()) throw std::invalid_argument("empty sample");
    if (bins < 1) throw std::invalid_argument("bins must be >= 1");
    double lo = *std::min_element(returns.begin(), returns.end());
    double hi = *std::max_element(returns.begin(), returns.end());
    if (lo == hi) hi = lo + 1.0;
    numvec edges;
    for (int i = 0; i <= bins; i++) edges.push_back(lo + (hi - lo) * i / bins);
    return edges;
}

bool returns_are_integral(const numvec& returns, double tol) {
    for (double x : returns)
        if (std::abs(x - std::round(x)) > tol) return false;
    return true;
}

}  // namespace rmdp
