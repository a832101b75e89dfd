#pragma once

#include <optional>

#include "rmdp/model.hpp"

namespace rmdp {

enum class ChainVariant { Transient, Discounted };

/// Single-state chain: self-loop with probability epsilon, exit to the sink
/// with 1 - epsilon, reward r on both. The Discounted variant is the
/// sink-free self-loop-only model meant for discount_to_trc.
struct ChainParams {
    double epsilon = 0.9;
    double reward = -0.2;
    ChainVariant variant = ChainVariant::Transient;
};

TransientMdp single_state_chain(const ChainParams& params);

/// ERM of the chain's total reward. The return is r * min(G, T) with G
/// geometric (success 1 - epsilon), so the value has a closed form:
/// finite horizons sum the truncated geometric series (in log space),
/// the infinite horizon is -beta^{-1} log((1-eps) e^{-beta r} /
/// (1 - eps e^{-beta r})) when eps * e^{-beta r} < 1 and -inf otherwise.
double analytic_chain_erm(const ChainParams& params, double beta,
                          std::optional<long> horizon = std::nullopt);

enum class GamblerInitial { UniformMiddle, UniformAll };
enum class GamblerActionMode { Strict, Literal };

/// Gambler's ruin with win probability q and target capital cap. States are
/// capitals 0..cap; capital 0 exits with reward -1, capital cap exits with
/// reward cap, middle capitals c bet a (win -> min(c+a, cap), lose -> c-a,
/// reward 0) or quit (exit with reward c).
///
/// Strict mode offers bets {1..c}; Literal also includes bet 0, whose
/// deterministic self-loop makes the always-bet-0 policy non-transient.
struct GamblersRuinParams {
    double q = 0.68;
    int cap = 7;
    GamblerInitial initial = GamblerInitial::UniformMiddle;
    GamblerActionMode mode = GamblerActionMode::Strict;
};

TransientMdp gamblers_ruin(const GamblersRuinParams& params);

/// Action id of the quit action emitted by gamblers_ruin (bets use ids
/// 0..cap-1).
int gambler_quit_action(int cap);

/// Nested-CVaR recursion on the single-state chain via the dual form
/// v_t = r + min{q1 v_{t-1} : q in the CVaR envelope}. Demonstrates
/// divergence: for epsilon >= alpha and r < 0 the values fall without bound.
/// Returns v_0..v_T.
numvec nested_cvar_chain_values(double epsilon, double alpha, double r, int horizon);

}  // namespace rmdp
