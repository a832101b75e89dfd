#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rmdp/matrix.hpp"
#include "rmdp/types.hpp"

namespace rmdp {

/// One stored transition. `next == SINK` targets the implicit absorbing sink;
/// transitions out of the sink are never stored (its zero-reward self-loop is
/// implied).
struct Transition {
    int state;
    int action;
    int next;  // state id, or SINK
    double prob;
    double reward;
};

struct Outcome {
    int next;  // state id, or SINK
    double prob;
    double reward;
};

struct ValidationReport {
    std::vector<std::string> violations;  // hard errors
    std::vector<std::string> warnings;

    bool valid() const { return violations.empty(); }
};

/// Finite state/action model with a designated implicit sink state, a
/// transition kernel with per-transition rewards, and an initial distribution
/// over non-sink states. Immutable after construction; all operations on it
/// are pure.
class TransientMdp {
public:
    static constexpr int SINK = -1;

    TransientMdp(int n_states, int n_actions, std::vector<Transition> transitions, numvec mu,
                 std::vector<std::string> state_labels = {},
                 std::vector<std::string> action_labels = {},
                 std::optional<std::vector<indvec>> allowed_actions = std::nullopt);

    int num_states() const { return n_states_; }
    int num_actions() const { return n_actions_; }

    /// Action ids available at state s, increasing.
    const indvec& actions(int s) const { return actions_[s]; }

    /// Outcomes of (s, a); empty when the action is not available at s.
    const std::vector<Outcome>& outcomes(int s, int a) const { return outcomes_[s][a]; }

    const numvec& initial() const { return mu_; }
    const std::vector<Transition>& transitions() const { return transitions_; }

    const std::vector<std::string>& state_labels() const { return state_labels_; }
    const std::vector<std::string>& action_labels() const { return action_labels_; }

    double max_abs_reward() const { return max_abs_reward_; }

    /// True when some transition targets the sink.
    bool has_sink_transitions() const;

private:
    int n_states_;
    int n_actions_;
    std::vector<Transition> transitions_;
    numvec mu_;
    std::vector<std::string> state_labels_;
    std::vector<std::string> action_labels_;
    std::vector<indvec> actions_;                      // [s] -> available action ids
    std::vector<std::vector<std::vector<Outcome>>> outcomes_;  // [s][a] -> outcomes
    double max_abs_reward_ = 0.0;
};

/// Per-state distribution over the actions available at that state.
/// probs[s][k] weights model.actions(s)[k].
struct DecisionRule {
    std::vector<numvec> probs;

    /// Unit-row rule choosing action_ids[s] at each state.
    static DecisionRule deterministic(const TransientMdp& model, const indvec& action_ids);

    /// Uniform over the available actions of every state.
    static DecisionRule uniform(const TransientMdp& model);

    bool is_deterministic(double tol = MASS_TOL) const;

    /// Argmax action id per state (the chosen action for deterministic rules).
    indvec action_ids(const TransientMdp& model) const;
};

/// Substochastic transition matrix of a rule together with the per-state
/// termination probabilities: row sums of P plus p_term equal 1.
struct PolicyMatrices {
    Matrix P;
    numvec p_term;
};

/// Reward-exponentiated transition/termination matrices of a rule at risk
/// level beta: B[s][s'] = sum_a p(s,a,s') d_a(s) exp(-beta r(s,a,s')) and
/// b[s] the same aggregated over sink transitions. Both reduce to (P, p_term)
/// at zero rewards.
struct ExponentialMatrices {
    Matrix B;
    numvec b;
    double beta;
};

/// Report-valued model validation: row masses, probability ranges, reward
/// finiteness, initial-distribution mass and positivity, empty action sets.
ValidationReport validate_model(const TransientMdp& model);

PolicyMatrices build_policy_matrices(const TransientMdp& model, const DecisionRule& rule);

/// Throws UnboundedRiskError when some exponent -beta*r exceeds the overflow
/// limit.
ExponentialMatrices build_exponential_matrices(const TransientMdp& model,
                                               const DecisionRule& rule, double beta);

/// Converts a sink-free discounted model into an equivalent transient one:
/// all transition probabilities scaled by gamma, remaining 1-gamma mass sent
/// to the sink carrying the expected one-step reward. Risk-neutral values of
/// the output equal discounted values of the input.
TransientMdp discount_to_trc(const TransientMdp& discounted, double gamma);

}  // namespace rmdp
