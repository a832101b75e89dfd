#include "rmdp/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace rmdp {

TransientMdp::TransientMdp(int n_states, int n_actions, std::vector<Transition> transitions,
                           numvec mu, std::vector<std::string> state_labels,
                           std::vector<std::string> action_labels,
                           std::optional<std::vector<indvec>> allowed_actions)
    : n_states_(n_states),
      n_actions_(n_actions),
      transitions_(std::move(transitions)),
      mu_(std::move(mu)),
      state_labels_(std::move(state_labels)),
      action_labels_(std::move(action_labels)) {
    if (n_states_ <= 0) throw ModelError("model needs at least one non-sink state");
    if (n_actions_ <= 0) throw ModelError("model needs at least one action");
    if (static_cast<int>(mu_.size()) != n_states_)
        throw ModelError("mu has length " + std::to_string(mu_.size()) + ", expected " +
                         std::to_string(n_states_));

    outcomes_.assign(n_states_, std::vector<std::vector<Outcome>>(n_actions_));
    for (const Transition& t : transitions_) {
        if (t.state < 0 || t.state >= n_states_)
            throw ModelError("transition source state " + std::to_string(t.state) +
                             " out of range");
        if (t.action < 0 || t.action >= n_actions_)
            throw ModelError("transition action " + std::to_string(t.action) + " out of range");
        if (t.next != SINK && (t.next < 0 || t.next >= n_states_))
            throw ModelError("transition target state " + std::to_string(t.next) +
                             " out of range");
        outcomes_[t.state][t.action].push_back({t.next, t.prob, t.reward});
        max_abs_reward_ = std::max(max_abs_reward_, std::abs(t.reward));
    }

    actions_.assign(n_states_, {});
    if (allowed_actions) {
        if (static_cast<int>(allowed_actions->size()) != n_states_)
            throw ModelError("allowed_actions has wrong length");
        for (int s = 0; s < n_states_; s++) {
            actions_[s] = (*allowed_actions)[s];
            std::sort(actions_[s].begin(), actions_[s].end());
        }
    } else {
        for (int s = 0; s < n_states_; s++)
            for (int a = 0; a < n_actions_; a++)
                if (!outcomes_[s][a].empty()) actions_[s].push_back(a);
    }
}

bool TransientMdp::has_sink_transitions() const {
    for (const Transition& t : transitions_)
        if (t.next == SINK) return true;
    return false;
}

DecisionRule DecisionRule::deterministic(const TransientMdp& model, const indvec& action_ids) {
    if (static_cast<int>(action_ids.size()) != model.num_states())
        throw ModelError("action id list has wrong length");
    DecisionRule rule;
    rule.probs.resize(model.num_states());
    for (int s = 0; s < model.num_states(); s++) {
        const indvec& avail = model.actions(s);
        rule.probs[s].assign(avail.size(), 0.0);
        auto it = std::find(avail.begin(), avail.end(), action_ids[s]);
        if (it == avail.end())
            throw ModelError("action " + std::to_string(action_ids[s]) +
                             " not available at state " + std::to_string(s));
        rule.probs[s][it - avail.begin()] = 1.0;
    }
    return rule;
}

DecisionRule DecisionRule::uniform(const TransientMdp& model) {
    DecisionRule rule;
    rule.probs.resize(model.num_states());
    for (int s = 0; s < model.num_states(); s++) {
        size_t n = model.actions(s).size();
        rule.probs[s].assign(n, n > 0 ? 1.0 / static_cast<double>(n) : 0.0);
    }
    return rule;
}

bool DecisionRule::is_deterministic(double tol) const {
    for (const numvec& row : probs) {
        for (double p : row)
            if (p > tol && p < 1.0 - tol) return false;
    }
    return true;
}

indvec DecisionRule::action_ids(const TransientMdp& model) const {
    indvec ids(probs.size(), 0);
    for (size_t s = 0; s < probs.size(); s++) {
        const numvec& row = probs[s];
        size_t best = 0;
        for (size_t k = 1; k < row.size(); k++)
            if (row[k] > row[best]) best = k;
        ids[s] = row.empty() ? 0 : model.actions(static_cast<int>(s))[best];
    }
    return ids;
}

ValidationReport validate_model(const TransientMdp& model) {
    ValidationReport report;
    auto where = [](int s, int a) {
        return "(s=" + std::to_string(s) + ", a=" + std::to_string(a) + ")";
    };

    for (int s = 0; s < model.num_states(); s++) {
        if (model.actions(s).empty())
            report.violations.push_back("state " + std::to_string(s) + " has no actions");
        for (int a : model.actions(s)) {
            const auto& outs = model.outcomes(s, a);
            if (outs.empty()) {
                report.violations.push_back("allowed action with no transitions at " +
                                            where(s, a));
                continue;
            }
            double mass = 0.0;
            std::set<int> seen;
            for (const Outcome& o : outs) {
                mass += o.prob;
                if (o.prob < 0.0 || o.prob > 1.0)
                    report.violations.push_back("probability " + std::to_string(o.prob) +
                                                " outside [0,1] at " + where(s, a));
                if (!std::isfinite(o.reward))
                    report.violations.push_back("non-finite reward at " + where(s, a));
                if (!seen.insert(o.next).second)
                    report.violations.push_back("duplicate transition target at " + where(s, a));
            }
            if (std::abs(mass - 1.0) > MASS_TOL)
                report.violations.push_back("row mass != 1 at " + where(s, a) + ": " +
                                            std::to_string(mass));
        }
    }

    double mu_mass = 0.0;
    bool mu_zero = false;
    for (int s = 0; s < model.num_states(); s++) {
        double m = model.initial()[s];
        mu_mass += m;
        if (m < 0.0)
            report.violations.push_back("mu[" + std::to_string(s) + "] is negative");
        else if (m == 0.0)
            mu_zero = true;
    }
    if (std::abs(mu_mass - 1.0) > MASS_TOL)
        report.violations.push_back("mu mass != 1: " + std::to_string(mu_mass));
    if (mu_zero)
        report.warnings.push_back(
            "mu has zero-probability-mass states; the aggregate objective "
            "covers only the supported states");

    return report;
}

PolicyMatrices build_policy_matrices(const TransientMdp& model, const DecisionRule& rule) {
    const int n = model.num_states();
    if (static_cast<int>(rule.probs.size()) != n)
        throw ModelError("rule does not match model dimensions");

    PolicyMatrices pm{Matrix(n, n), numvec(n, 0.0)};
    for (int s = 0; s < n; s++) {
        const indvec& avail = model.actions(s);
        if (rule.probs[s].size() != avail.size())
            throw ModelError("rule row " + std::to_string(s) + " does not match action set");
        for (size_t k = 0; k < avail.size(); k++) {
            double weight = rule.probs[s][k];
            if (weight == 0.0) continue;
            for (const Outcome& o : model.outcomes(s, avail[k])) {
                if (o.next == TransientMdp::SINK)
                    pm.p_term[s] += weight * o.prob;
                else
                    pm.P(s, o.next) += weight * o.prob;
            }
        }
    }
    return pm;
}

ExponentialMatrices build_exponential_matrices(const TransientMdp& model,
                                               const DecisionRule& rule, double beta) {
    if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
    const int n = model.num_states();
    if (static_cast<int>(rule.probs.size()) != n)
        throw ModelError("rule does not match model dimensions");

    ExponentialMatrices em{Matrix(n, n), numvec(n, 0.0), beta};
    for (int s = 0; s < n; s++) {
        const indvec& avail = model.actions(s);
        if (rule.probs[s].size() != avail.size())
            throw ModelError("rule row " + std::to_string(s) + " does not match action set");
        for (size_t k = 0; k < avail.size(); k++) {
            double weight = rule.probs[s][k];
            if (weight == 0.0) continue;
            for (const Outcome& o : model.outcomes(s, avail[k])) {
                // exponents are checked before exponentiation so overflow is a
                // diagnostic, not an inf
                double exponent = -beta * o.reward;
                if (exponent > EXP_OVERFLOW_LIMIT)
                    throw UnboundedRiskError(s, avail[k], o.next, exponent);
                double value = weight * o.prob * std::exp(exponent);
                if (o.next == TransientMdp::SINK)
                    em.b[s] += value;
                else
                    em.B(s, o.next) += value;
            }
        }
    }
    return em;
}

TransientMdp discount_to_trc(const TransientMdp& discounted, double gamma) {
    if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must be in [0,1)");
    if (discounted.has_sink_transitions())
        throw ModelError("input to discount_to_trc must have no sink transitions");

    std::vector<Transition> out;
    for (int s = 0; s < discounted.num_states(); s++) {
        for (int a : discounted.actions(s)) {
            double expected_reward = 0.0;
            for (const Outcome& o : discounted.outcomes(s, a)) {
                expected_reward += o.prob * o.reward;
                if (gamma > 0.0) out.push_back({s, a, o.next, gamma * o.prob, o.reward});
            }
            out.push_back({s, a, TransientMdp::SINK, 1.0 - gamma, expected_reward});
        }
    }
    return TransientMdp(discounted.num_states(), discounted.num_actions(), std::move(out),
                        discounted.initial(), discounted.state_labels(),
                        discounted.action_labels());
}

}  // namespace rmdp
