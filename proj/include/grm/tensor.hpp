// Pointwise dense tensors on a tangent space of dimension n.
//
// Component layout: valence (p,q) stores comps row-major over (p+q) slots,
// contravariant slots first, i.e. T^{i1..ip}_{j1..jq} lives at the flat index
// ((i1*n + i2)*n + ...)*n + jq. All operations preserve this convention.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace grm {

class TensorValue {
public:
    TensorValue() = default;
    TensorValue(int dim, int contravariant, int covariant)
        : n_(dim), p_(contravariant), q_(covariant),
          comps_(static_cast<std::size_t>(std::pow(dim, contravariant + covariant)), 0.0) {}
    TensorValue(int dim, int contravariant, int covariant, std::vector<double> comps)
        : n_(dim), p_(contravariant), q_(covariant), comps_(std::move(comps)) {
        if (comps_.size() != static_cast<std::size_t>(std::pow(n_, rank())))
            throw std::invalid_argument("component count does not match valence");
    }

    int dim() const { return n_; }
    int contravariant() const { return p_; }
    int covariant() const { return q_; }
    int rank() const { return p_ + q_; }
    const std::vector<double>& comps() const { return comps_; }
    std::vector<double>& comps() { return comps_; }

    double& at(std::initializer_list<int> idx) { return comps_[flat(idx)]; }
    double at(std::initializer_list<int> idx) const { return comps_[flat(idx)]; }

    std::size_t flat(std::initializer_list<int> idx) const {
        std::size_t f = 0;
        for (int i : idx) f = f * static_cast<std::size_t>(n_) + static_cast<std::size_t>(i);
        return f;
    }

    double sup_norm() const {
        double m = 0.0;
        for (double c : comps_) m = std::max(m, std::abs(c));
        return m;
    }

    static TensorValue identity(int dim) {
        TensorValue t(dim, 1, 1);
        for (int i = 0; i < dim; ++i) t.at({i, i}) = 1.0;
        return t;
    }

private:
    int n_ = 0, p_ = 0, q_ = 0;
    std::vector<double> comps_;
};

inline TensorValue operator+(const TensorValue& a, const TensorValue& b) {
    TensorValue r = a;
    for (std::size_t i = 0; i < r.comps().size(); ++i) r.comps()[i] += b.comps()[i];
    return r;
}
inline TensorValue operator-(const TensorValue& a, const TensorValue& b) {
    TensorValue r = a;
    for (std::size_t i = 0; i < r.comps().size(); ++i) r.comps()[i] -= b.comps()[i];
    return r;
}
inline TensorValue operator*(double s, const TensorValue& a) {
    TensorValue r = a;
    for (double& c : r.comps()) c *= s;
    return r;
}

// Outer product; contravariant slots of both operands precede covariant ones.
inline TensorValue tensor_product(const TensorValue& a, const TensorValue& b) {
    const int n = a.dim();
    TensorValue r(n, a.contravariant() + b.contravariant(), a.covariant() + b.covariant());
    const int ra = a.rank(), rb = b.rank();
    std::vector<int> ia(ra, 0), ib(rb, 0);
    // iterate over all index tuples of a and b
    const std::size_t na = a.comps().size(), nb = b.comps().size();
    for (std::size_t fa = 0; fa < na; ++fa) {
        // decode a's indices
        std::size_t t = fa;
        for (int s = ra - 1; s >= 0; --s) { ia[s] = static_cast<int>(t % n); t /= n; }
        for (std::size_t fb = 0; fb < nb; ++fb) {
            t = fb;
            for (int s = rb - 1; s >= 0; --s) { ib[s] = static_cast<int>(t % n); t /= n; }
            // interleave: a-contravariant, b-contravariant, a-covariant, b-covariant
            std::size_t f = 0;
            for (int s = 0; s < a.contravariant(); ++s) f = f * n + ia[s];
            for (int s = 0; s < b.contravariant(); ++s) f = f * n + ib[s];
            for (int s = 0; s < a.covariant(); ++s) f = f * n + ia[a.contravariant() + s];
            for (int s = 0; s < b.covariant(); ++s) f = f * n + ib[b.contravariant() + s];
            r.comps()[f] += a.comps()[fa] * b.comps()[fb];
        }
    }
    return r;
}

// Trace over one contravariant and one covariant slot. Slots are numbered
// within their variance class: upper_slot in [0,p), lower_slot in [0,q).
inline TensorValue contract(const TensorValue& t, int upper_slot, int lower_slot) {
    if (upper_slot < 0 || upper_slot >= t.contravariant() || lower_slot < 0 ||
        lower_slot >= t.covariant())
        throw std::invalid_argument("contract: slot out of range or variance mismatch");
    const int n = t.dim();
    const int r = t.rank();
    const int su = upper_slot;                       // absolute slot position
    const int sl = t.contravariant() + lower_slot;
    TensorValue out(n, t.contravariant() - 1, t.covariant() - 1);
    std::vector<int> idx(r, 0);
    const std::size_t total = t.comps().size();
    for (std::size_t f = 0; f < total; ++f) {
        std::size_t tmp = f;
        for (int s = r - 1; s >= 0; --s) { idx[s] = static_cast<int>(tmp % n); tmp /= n; }
        if (idx[su] != idx[sl]) continue;
        std::size_t g = 0;
        for (int s = 0; s < r; ++s) {
            if (s == su || s == sl) continue;
            g = g * n + idx[s];
        }
        out.comps()[g] += t.comps()[f];
    }
    return out;
}

namespace detail {

inline void permutations(int k, std::vector<std::vector<int>>& perms, std::vector<int>& cur,
                         std::vector<bool>& used) {
    if (static_cast<int>(cur.size()) == k) { perms.push_back(cur); return; }
    for (int i = 0; i < k; ++i) {
        if (used[static_cast<std::size_t>(i)]) continue;
        used[static_cast<std::size_t>(i)] = true;
        cur.push_back(i);
        permutations(k, perms, cur, used);
        cur.pop_back();
        used[static_cast<std::size_t>(i)] = false;
    }
}

inline int parity(const std::vector<int>& perm) {
    int sign = 1;
    std::vector<int> v = perm;
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = i + 1; j < v.size(); ++j)
            if (v[i] > v[j]) { std::swap(v[i], v[j]); sign = -sign; }
    return sign;
}

inline TensorValue alternate(const TensorValue& t, const std::vector<int>& slots, bool anti) {
    const int k = static_cast<int>(slots.size());
    const int p = t.contravariant();
    for (int s : slots) {
        const bool upper = s < p;
        const bool first_upper = slots[0] < p;
        if (upper != first_upper)
            throw std::invalid_argument("(anti)symmetrize: slots must share variance");
        if (s < 0 || s >= t.rank())
            throw std::invalid_argument("(anti)symmetrize: slot out of range");
    }
    std::vector<std::vector<int>> perms;
    std::vector<int> cur;
    std::vector<bool> used(static_cast<std::size_t>(k), false);
    permutations(k, perms, cur, used);

    const int n = t.dim();
    const int r = t.rank();
    TensorValue out(n, t.contravariant(), t.covariant());
    std::vector<int> idx(r, 0), pidx(r, 0);
    double fact = 1.0;
    for (int i = 2; i <= k; ++i) fact *= i;
    const std::size_t total = t.comps().size();
    for (std::size_t f = 0; f < total; ++f) {
        std::size_t tmp = f;
        for (int s = r - 1; s >= 0; --s) { idx[s] = static_cast<int>(tmp % n); tmp /= n; }
        double acc = 0.0;
        for (const auto& perm : perms) {
            pidx = idx;
            for (int s = 0; s < k; ++s) pidx[slots[static_cast<std::size_t>(s)]] =
                idx[slots[static_cast<std::size_t>(perm[static_cast<std::size_t>(s)])]];
            std::size_t g = 0;
            for (int s = 0; s < r; ++s) g = g * n + pidx[s];
            acc += (anti ? parity(perm) : 1) * t.comps()[g];
        }
        out.comps()[f] = acc / fact;
    }
    return out;
}

}  // namespace detail

inline TensorValue symmetrize(const TensorValue& t, const std::vector<int>& slots) {
    return detail::alternate(t, slots, false);
}
inline TensorValue antisymmetrize(const TensorValue& t, const std::vector<int>& slots) {
    return detail::alternate(t, slots, true);
}

struct SingularMatrixError : std::runtime_error {
    double condition_estimate;
    explicit SingularMatrixError(double cond)
        : std::runtime_error("singular matrix (condition number estimate " +
                             std::to_string(cond) + ")"),
          condition_estimate(cond) {}
};

namespace detail {

// Gauss-Jordan with partial pivoting on a flat n x n array.
inline std::vector<double> invert_flat(const std::vector<double>& m, int n) {
    std::vector<double> a = m;
    std::vector<double> inv(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) inv[static_cast<std::size_t>(i) * n + i] = 1.0;
    double max_abs = 0.0, min_pivot = 1e300;
    for (double v : m) max_abs = std::max(max_abs, std::abs(v));
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a[static_cast<std::size_t>(r) * n + col]) >
                std::abs(a[static_cast<std::size_t>(piv) * n + col]))
                piv = r;
        double pv = a[static_cast<std::size_t>(piv) * n + col];
        if (std::abs(pv) < 1e-13 * (1.0 + max_abs))
            throw SingularMatrixError(max_abs / std::max(std::abs(pv), 1e-300));
        min_pivot = std::min(min_pivot, std::abs(pv));
        if (piv != col) {
            for (int c = 0; c < n; ++c) {
                std::swap(a[static_cast<std::size_t>(piv) * n + c],
                          a[static_cast<std::size_t>(col) * n + c]);
                std::swap(inv[static_cast<std::size_t>(piv) * n + c],
                          inv[static_cast<std::size_t>(col) * n + c]);
            }
        }
        const double ipv = 1.0 / a[static_cast<std::size_t>(col) * n + col];
        for (int c = 0; c < n; ++c) {
            a[static_cast<std::size_t>(col) * n + c] *= ipv;
            inv[static_cast<std::size_t>(col) * n + c] *= ipv;
        }
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = a[static_cast<std::size_t>(r) * n + col];
            if (f == 0.0) continue;
            for (int c = 0; c < n; ++c) {
                a[static_cast<std::size_t>(r) * n + c] -=
                    f * a[static_cast<std::size_t>(col) * n + c];
                inv[static_cast<std::size_t>(r) * n + c] -=
                    f * inv[static_cast<std::size_t>(col) * n + c];
            }
        }
    }
    return inv;
}

}  // namespace detail

// Inverse of a (0,2) or (1,1) matrix tensor. A (0,2) input yields the (2,0)
// inverse (index convention: G_{pi} G^{pj} = delta_i^j), a (1,1) input yields
// the (1,1) inverse endomorphism.
inline TensorValue invert_matrix(const TensorValue& m) {
    if (m.rank() != 2) throw std::invalid_argument("invert_matrix: rank-2 tensor required");
    const int n = m.dim();
    auto inv = detail::invert_flat(m.comps(), n);
    if (m.contravariant() == 0 && m.covariant() == 2) {
        // transpose so that contraction over the FIRST slots gives the identity
        TensorValue r(n, 2, 0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                r.at({i, j}) = inv[static_cast<std::size_t>(j) * n + i];
        return r;
    }
    if (m.contravariant() == 1 && m.covariant() == 1)
        return TensorValue(n, 1, 1, std::move(inv));
    if (m.contravariant() == 2 && m.covariant() == 0) {
        TensorValue r(n, 0, 2);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                r.at({i, j}) = inv[static_cast<std::size_t>(j) * n + i];
        return r;
    }
    throw std::invalid_argument("invert_matrix: unsupported valence");
}

}  // namespace grm
