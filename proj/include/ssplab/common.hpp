// Shared typedefs, error types and small numeric helpers used across ssplab.
#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace ssplab {

/// Default precision type of all value/probability computations.
using prec_t = double;
/// Vector of real values (values, costs, probability rows, ...).
using numvec = std::vector<prec_t>;
/// Vector of indices (actions, states).
using indvec = std::vector<int>;
/// Visit counters.
using cntvec = std::vector<long long>;

constexpr prec_t INFTY = std::numeric_limits<prec_t>::infinity();

/// Row-sum slack accepted when checking that probability rows are stochastic.
constexpr prec_t ROW_SUM_TOL = 1e-12;

/// Base class of all ssplab errors.
class SspError : public std::runtime_error {
public:
    explicit SspError(const std::string& what) : std::runtime_error(what) {}
};

/// Value iteration failed to reach its tolerance within the iteration cap.
class DivergenceError : public SspError {
public:
    DivergenceError(const std::string& what, int worst_state)
        : SspError(what + " (worst state " + std::to_string(worst_state) + ")"),
          worst_state(worst_state) {}
    int worst_state;
};

/// A chain/policy does not reach the goal with probability 1 from every state.
class ImproperPolicyError : public SspError {
public:
    using SspError::SspError;
};

/// Malformed or out-of-contract data (dimensions, ranges, modes).
class DataError : public SspError {
public:
    using SspError::SspError;
};

/// Maximum entry of a vector; -inf for an empty vector.
inline prec_t max_of(const numvec& v) {
    prec_t m = -INFTY;
    for (prec_t x : v) m = std::max(m, x);
    return m;
}

/// Sup-norm distance between two equally sized vectors.
inline prec_t sup_dist(const numvec& a, const numvec& b) {
    assert(a.size() == b.size());
    prec_t m = 0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

/// Index of the largest |a-b| gap; 0 for empty input.
inline int sup_dist_argmax(const numvec& a, const numvec& b) {
    assert(a.size() == b.size());
    prec_t m = -1;
    int arg = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const prec_t d = std::abs(a[i] - b[i]);
        if (d > m) { m = d; arg = static_cast<int>(i); }
    }
    return arg;
}

/// FNV-1a 64-bit hash of a byte buffer; used for file integrity manifests.
inline unsigned long long fnv1a64(const void* data, std::size_t n) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    unsigned long long h = 14695981039346656037ull;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace ssplab
