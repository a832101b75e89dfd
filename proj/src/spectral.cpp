#include "rmdp/spectral.hpp"

#include <algorithm>
#include <cmath>

namespace rmdp {

namespace {

/// Inverse-positivity certificate: for nonnegative M and lambda > 0,
/// lambda > rho(M) iff (lambda*I - M) x = 1 has a strictly positive solution.
bool above_radius(const Matrix& m, double lambda) {
    const int n = m.rows();
    Matrix a(n, n);
    for (int r = 0; r < n; r++)
        for (int c = 0; c < n; c++) a(r, c) = (r == c ? lambda : 0.0) - m(r, c);
    std::vector<int> perm;
    if (!lu_factor(a, perm)) return false;
    numvec x = lu_solve(a, perm, numvec(n, 1.0));
    for (double v : x)
        if (!(v > 0.0) || !std::isfinite(v)) return false;
    return true;
}

}  // namespace

double spectral_radius(const Matrix& m, const SpectralOptions& opts) {
    const int n = m.rows();
    if (n == 0) return 0.0;
    if (n != m.cols()) throw std::invalid_argument("spectral_radius needs a square matrix");

    double min_row_sum = POS_INF, max_row_sum = 0.0, max_diag = 0.0;
    for (int r = 0; r < n; r++) {
        double sum = 0.0;
        for (int c = 0; c < n; c++) {
            double v = m(r, c);
            if (!(v >= 0.0) || !std::isfinite(v))
                throw std::invalid_argument("spectral_radius needs a nonnegative finite matrix");
            sum += v;
        }
        min_row_sum = std::min(min_row_sum, sum);
        max_row_sum = std::max(max_row_sum, sum);
        max_diag = std::max(max_diag, m(r, r));
    }
    if (max_row_sum == 0.0) return 0.0;

    // Collatz-Wielandt bracket: any nonnegative x yields min-ratio <= rho;
    // strictly positive x also yields rho <= max-ratio.
    double lo = std::max(min_row_sum, max_diag);
    double hi = max_row_sum;

    numvec x(n, 1.0);
    for (int it = 0; it < opts.power_iterations && hi - lo > opts.tol; it++) {
        numvec y = m.multiply(x);
        double ymax = 0.0;
        for (double v : y) ymax = std::max(ymax, v);
        if (ymax == 0.0) return 0.0;  // M^k * positive vector vanished => nilpotent

        double rlo = POS_INF, rhi = 0.0;
        bool strictly_positive = true;
        for (int i = 0; i < n; i++) {
            if (x[i] > 0.0) {
                double ratio = y[i] / x[i];
                rlo = std::min(rlo, ratio);
                rhi = std::max(rhi, ratio);
            } else {
                strictly_positive = false;
            }
        }
        lo = std::max(lo, rlo);
        if (strictly_positive) hi = std::min(hi, rhi);

        for (int i = 0; i < n; i++) x[i] = y[i] / ymax;
    }

    // Bisection fallback closes the gap when power iteration stalls.
    for (int it = 0; it < opts.bisection_iterations && hi - lo > opts.tol; it++) {
        double mid = 0.5 * (lo + hi);
        if (above_radius(m, mid))
            hi = mid;
        else
            lo = mid;
    }
    if (hi - lo > opts.tol)
        throw SolverError("spectral radius did not converge; bracket [" + std::to_string(lo) +
                          ", " + std::to_string(hi) + "]");
    return 0.5 * (lo + hi);
}

double log_spectral_radius_exponential(const TransientMdp& model, const DecisionRule& rule,
                                       double beta) {
    const int n = model.num_states();
    // uniform shift: B = exp(shift) * B_scaled, so log rho(B) = shift + log rho(B_scaled)
    double shift = NEG_INF;
    for (int s = 0; s < n; s++) {
        const indvec& avail = model.actions(s);
        for (size_t k = 0; k < avail.size(); k++) {
            if (rule.probs[s][k] == 0.0) continue;
            for (const Outcome& o : model.outcomes(s, avail[k]))
                if (o.next != TransientMdp::SINK) shift = std::max(shift, -beta * o.reward);
        }
    }
    if (shift == NEG_INF) return NEG_INF;  // no non-sink transitions: B = 0

    Matrix scaled(n, n);
    for (int s = 0; s < n; s++) {
        const indvec& avail = model.actions(s);
        for (size_t k = 0; k < avail.size(); k++) {
            double weight = rule.probs[s][k];
            if (weight == 0.0) continue;
            for (const Outcome& o : model.outcomes(s, avail[k]))
                if (o.next != TransientMdp::SINK)
                    scaled(s, o.next) += weight * o.prob * std::exp(-beta * o.reward - shift);
        }
    }
    double rho = spectral_radius(scaled);
    return rho == 0.0 ? NEG_INF : shift + std::log(rho);
}

TransienceVerdict check_transient_policy(const TransientMdp& model, const DecisionRule& rule,
                                         double tol_margin) {
    PolicyMatrices pm = build_policy_matrices(model, rule);
    double rho = spectral_radius(pm.P);
    TransienceVerdict verdict{rho < 1.0 - tol_margin, rho, std::nullopt, 1};
    if (!verdict.transient) verdict.violating_policy = rule.action_ids(model);
    return verdict;
}

long long count_deterministic_rules(const TransientMdp& model, long long cap) {
    long long count = 1;
    for (int s = 0; s < model.num_states(); s++) {
        long long k = static_cast<long long>(model.actions(s).size());
        if (k == 0) return 0;
        if (count > cap / std::max<long long>(k, 1)) return cap + 1;
        count *= k;
    }
    return count;
}

void for_each_deterministic_rule(const TransientMdp& model,
                                 const std::function<bool(const indvec&)>& visit) {
    const int n = model.num_states();
    std::vector<size_t> pick(n, 0);
    indvec ids(n);
    while (true) {
        for (int s = 0; s < n; s++) ids[s] = model.actions(s)[pick[s]];
        if (!visit(ids)) return;
        int s = n - 1;
        while (s >= 0) {
            if (++pick[s] < model.actions(s).size()) break;
            pick[s] = 0;
            s--;
        }
        if (s < 0) return;
    }
}

TransienceVerdict check_transient_exhaustive(const TransientMdp& model, long long cap,
                                             double tol_margin) {
    long long count = count_deterministic_rules(model, cap);
    if (count > cap)
        throw BudgetExceededError("deterministic policy count exceeds cap " +
                                  std::to_string(cap) +
                                  "; fall back to per-policy checks");

    TransienceVerdict verdict{true, 0.0, std::nullopt, 0};
    for_each_deterministic_rule(model, [&](const indvec& ids) {
        TransienceVerdict one =
            check_transient_policy(model, DecisionRule::deterministic(model, ids), tol_margin);
        verdict.policies_checked++;
        verdict.radius = std::max(verdict.radius, one.radius);
        if (!one.transient) {
            verdict.transient = false;
            verdict.violating_policy = ids;
            return false;
        }
        return true;
    });
    return verdict;
}

}  // namespace rmdp
