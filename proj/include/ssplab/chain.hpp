// Absorbing-chain canonical form and phase-type hitting-time analytics.
//
// A stationary policy on an SSP instance induces a Markov chain over
// S ∪ {goal} whose canonical form is [[Q, R], [0, 1]]. The absorption time
// tau follows a discrete phase-type distribution:
//   P(tau(s) > n) = (Q^n 1)(s)            (tail identity)
//   E[tau]        = (I - Q)^{-1} 1        (fundamental matrix row sums)
//   E[(tau)_r]    = r! 1_s' (I-Q)^{-r} Q^{r-1} 1   (factorial moments)
//   E[tau^r]      = sum_j S2(r,j) E[(tau)_j]       (Stirling conversion)
#pragma once

#include "ssplab/instance.hpp"

#include <Eigen/Dense>

namespace ssplab {

/// Canonical (Q, R) decomposition of a stationary policy's chain.
struct AbsorbingChain {
    int n = 0;  ///< number of non-goal states
    numvec q;   ///< S x S substochastic block, row-major: q[s*n + y]
    numvec r;   ///< S probabilities of absorbing into the goal

    AbsorbingChain() = default;
    AbsorbingChain(int n_, numvec q_, numvec r_) : n(n_), q(std::move(q_)), r(std::move(r_)) {
        if (q.size() != static_cast<std::size_t>(n) * n || r.size() != static_cast<std::size_t>(n))
            throw DataError("AbsorbingChain: inconsistent dimensions");
    }

    prec_t q_at(int s, int y) const { return q[static_cast<std::size_t>(s) * n + y]; }

    /// One tail-iteration step: v <- Q v (in place, using scratch).
    void apply_q(numvec& v, numvec& scratch) const {
        assert(static_cast<int>(v.size()) == n);
        scratch.assign(n, 0.0);
        for (int s = 0; s < n; ++s) {
            const prec_t* row = q.data() + static_cast<std::size_t>(s) * n;
            prec_t acc = 0;
            for (int y = 0; y < n; ++y) acc += row[y] * v[y];
            scratch[s] = acc;
        }
        v.swap(scratch);
    }
};

/// Canonical decomposition of the chain of pol on inst:
/// q[s][y] = p(y|s, pol(s)), r[s] = p(goal|s, pol(s)).
inline AbsorbingChain chain_of(const SspInstance& inst, const StationaryPolicy& pol) {
    if (!is_valid_policy(inst, pol)) throw DataError("chain_of: invalid policy");
    const int S = inst.n_states;
    numvec q(static_cast<std::size_t>(S) * S);
    numvec r(S);
    for (int s = 0; s < S; ++s) {
        const prec_t* row = inst.row(s, pol[s]);
        for (int y = 0; y < S; ++y) q[static_cast<std::size_t>(s) * S + y] = row[y];
        r[s] = row[S];
    }
    return AbsorbingChain(S, std::move(q), std::move(r));
}

/// Tail probability P(tau(start) > n) = 1_start^T Q^n 1, computed by n
/// repeated vector products v <- Q v from v = 1.
inline prec_t hitting_tail(const AbsorbingChain& chain, int start, long n) {
    if (start < 0 || start >= chain.n) throw DataError("hitting_tail: bad start state");
    if (n < 0) throw DataError("hitting_tail: n must be nonnegative");
    numvec v(chain.n, 1.0), scratch;
    for (long i = 0; i < n; ++i) chain.apply_q(v, scratch);
    return v[start];
}

namespace detail {

/// LU factorization of (I - Q); throws ImproperPolicyError when singular
/// (spectral radius 1, i.e. some state never reaches the goal).
inline Eigen::FullPivLU<Eigen::MatrixXd> fundamental_lu(const AbsorbingChain& chain) {
    const int S = chain.n;
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(S, S);
    for (int s = 0; s < S; ++s)
        for (int y = 0; y < S; ++y) m(s, y) -= chain.q_at(s, y);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
    if (!lu.isInvertible())
        throw ImproperPolicyError("(I - Q) is singular: policy is not proper");
    return lu;
}

} // namespace detail

/// Expected hitting times E[tau(s)] for every start state: (I - Q)^{-1} 1,
/// via a dense direct solve. Throws ImproperPolicyError for improper chains.
inline ValueVector expected_hitting_times(const AbsorbingChain& chain) {
    auto lu = detail::fundamental_lu(chain);
    Eigen::VectorXd x = lu.solve(Eigen::VectorXd::Ones(chain.n));
    ValueVector out(chain.n);
    for (int s = 0; s < chain.n; ++s) {
        // tau >= 1 from every non-goal state; fp noise below that, or
        // non-finite entries, means the solve degenerated.
        if (!std::isfinite(x(s)) || x(s) < 1.0 - 1e-6)
            throw ImproperPolicyError("expected_hitting_times: degenerate solve");
        out[s] = x(s);
    }
    return out;
}

/// r-th factorial moment E[(tau)_r(start)] = r! 1_start^T (I-Q)^{-r} Q^{r-1} 1.
inline prec_t ph_factorial_moment(const AbsorbingChain& chain, int start, int r) {
    if (start < 0 || start >= chain.n) throw DataError("ph_factorial_moment: bad start state");
    if (r < 1) throw DataError("ph_factorial_moment: order r must be >= 1");
    auto lu = detail::fundamental_lu(chain);
    // w = Q^{r-1} 1
    numvec w(chain.n, 1.0), scratch;
    for (int i = 0; i < r - 1; ++i) chain.apply_q(w, scratch);
    Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(w.data(), chain.n);
    prec_t rfact = 1;
    for (int i = 1; i <= r; ++i) {
        x = lu.solve(x).eval();
        rfact *= i;
    }
    return rfact * x(start);
}

/// Stirling numbers of the second kind {r; j} for j = 0..r, by the standard
/// recurrence. Exact in double up to r <= 20.
inline numvec stirling2_row(int r) {
    if (r < 0 || r > 20) throw DataError("stirling2_row: supported orders are 0 <= r <= 20");
    std::vector<numvec> s2(r + 1, numvec(r + 1, 0.0));
    s2[0][0] = 1;
    for (int n = 1; n <= r; ++n)
        for (int k = 1; k <= n; ++k) s2[n][k] = k * s2[n - 1][k] + s2[n - 1][k - 1];
    return s2[r];
}

/// Raw moment E[tau^r(start)] via Stirling-weighted factorial moments.
/// Orders above 20 are rejected (Stirling exactness limit).
inline prec_t ph_raw_moment(const AbsorbingChain& chain, int start, int r) {
    if (r < 1) throw DataError("ph_raw_moment: order r must be >= 1");
    if (r > 20) throw DataError("ph_raw_moment: unsupported order r > 20");
    const numvec s2 = stirling2_row(r);
    // Reuse one LU factorization across the factorial moments.
    auto lu = detail::fundamental_lu(chain);
    prec_t total = 0;
    numvec w(chain.n, 1.0), scratch;
    prec_t jfact = 1;
    for (int j = 1; j <= r; ++j) {
        jfact *= j;
        // w currently holds Q^{j-1} 1.
        Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(w.data(), chain.n);
        for (int i = 0; i < j; ++i) x = lu.solve(x).eval();
        total += s2[j] * jfact * x(start);
        chain.apply_q(w, scratch);
    }
    return total;
}

} // namespace ssplab
