// Chart-level differential geometry: connections, covariant derivatives,
// torsion, exterior derivatives, Nijenhuis tensor, curvature.
//
// Connection coefficients are stored flat as gamma[(k*n + i)*n + j] with
//   nabla_{e_i} e_j = gamma^k_{ij} e_k,
// i.e. the FIRST lower index is the differentiation direction. The historical
// "+" variant (direction in the last slot) is exposed through
// covariant_derivative_pm; everything else uses the direction-first form.

#pragma once

#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "grm/fields.hpp"
#include "grm/tensor.hpp"

namespace grm {

// --- pointwise metric helpers ----------------------------------------------

inline std::pair<TensorValue, TensorValue> split_metric(const TensorValue& G) {
    const int n = G.dim();
    TensorValue g(n, 0, 2), F(n, 0, 2);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            g.at({i, j}) = 0.5 * (G.at({i, j}) + G.at({j, i}));
            F.at({i, j}) = 0.5 * (G.at({i, j}) - G.at({j, i}));
        }
    return {g, F};
}

// A^k_i = F_{ij} g^{jk}
inline TensorValue adjoint_A(const TensorValue& g, const TensorValue& F) {
    const int n = g.dim();
    auto gi = invert_matrix(g);
    TensorValue A(n, 1, 1);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i) {
            double acc = 0.0;
            for (int j = 0; j < n; ++j) acc += F.at({i, j}) * gi.at({j, k});
            A.at({k, i}) = acc;
        }
    return A;
}

// --- field evaluation with partial derivatives ------------------------------

// Components of a named field together with their chart partials, over any
// scalar level D (one extra dual nesting is spent internally).
template <class D>
struct PartialEval {
    std::vector<D> v;  // flattened components
    std::vector<D> d;  // d[c * n + m] = partial_m of component c
};

template <class D>
PartialEval<D> components_with_partials(const FieldProvider& P, const std::string& name,
                                        const std::vector<D>& x) {
    const std::size_t n = x.size();
    auto xs = seed(x);
    auto c = P.components(name, xs);
    PartialEval<D> r;
    r.v.resize(c.size());
    r.d.resize(c.size() * n);
    for (std::size_t k = 0; k < c.size(); ++k) {
        r.v[k] = c[k].a;
        for (std::size_t m = 0; m < n; ++m) r.d[k * n + m] = c[k].b[m];
    }
    return r;
}

// --- connections ------------------------------------------------------------

class ConnectionField {
public:
    virtual ~ConnectionField() = default;
    virtual int dim() const = 0;
    virtual std::vector<double> gamma(const std::vector<double>& x) const = 0;
    virtual std::vector<D1> gamma(const std::vector<D1>& x) const = 0;
};

namespace detail {

template <class Fn>
class FnConnection final : public ConnectionField {
public:
    FnConnection(int n, Fn fn) : n_(n), fn_(std::move(fn)) {}
    int dim() const override { return n_; }
    std::vector<double> gamma(const std::vector<double>& x) const override { return fn_(x); }
    std::vector<D1> gamma(const std::vector<D1>& x) const override { return fn_(x); }

private:
    int n_;
    Fn fn_;
};

}  // namespace detail

template <class Fn>
std::shared_ptr<ConnectionField> make_connection(int n, Fn fn) {
    return std::make_shared<detail::FnConnection<Fn>>(n, std::move(fn));
}

// gamma^k_{ij} = 1/2 g^{kl} (d_i g_{jl} + d_j g_{il} - d_l g_{ij})
template <class D>
std::vector<D> levi_civita_gamma(const FieldProvider& P, const std::vector<D>& x) {
    const int n = static_cast<int>(x.size());
    auto g = components_with_partials(P, "g", x);
    auto gi = detail::invert_flat_dual(g.v, n);
    std::vector<D> out(static_cast<std::size_t>(n) * n * n, zero_like(x[0]));
    auto dg = [&](int m, int i, int j) -> const D& {
        return g.d[(static_cast<std::size_t>(i) * n + j) * n + m];
    };
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                D acc = zero_like(x[0]);
                for (int l = 0; l < n; ++l) {
                    D s = dg(i, j, l) + dg(j, i, l) - dg(l, i, j);
                    acc = acc + gi[static_cast<std::size_t>(k) * n + l] * s;
                }
                out[(static_cast<std::size_t>(k) * n + i) * n + j] = 0.5 * acc;
            }
    return out;
}

inline std::shared_ptr<ConnectionField> levi_civita(const FieldProvider& P) {
    return make_connection(P.dim(), [P](const auto& x) { return levi_civita_gamma(P, x); });
}

// --- derived pointwise objects ----------------------------------------------

// dF_{ijk} = d_i F_{jk} + d_j F_{ki} + d_k F_{ij}
template <class D>
std::vector<D> dF_components(const FieldProvider& P, const std::vector<D>& x) {
    const int n = static_cast<int>(x.size());
    auto F = components_with_partials(P, "F", x);
    auto dF = [&](int m, int i, int j) -> const D& {
        return F.d[(static_cast<std::size_t>(i) * n + j) * n + m];
    };
    std::vector<D> out(static_cast<std::size_t>(n) * n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                out[(static_cast<std::size_t>(i) * n + j) * n + k] =
                    dF(i, j, k) + dF(j, k, i) + dF(k, i, j);
    return out;
}

inline TensorValue exterior_derivative_F(const FieldProvider& P, const std::vector<double>& x) {
    return TensorValue(P.dim(), 0, 3, dF_components(P, x));
}

// d(eta)_{ij} = d_i eta_j - d_j eta_i for the one-form field "eta"
inline TensorValue exterior_derivative_eta(const FieldProvider& P, const std::vector<double>& x) {
    const int n = P.dim();
    auto j = P.jet("eta", x);
    TensorValue out(n, 0, 2);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            out.at({a, b}) = j.d1[static_cast<std::size_t>(b) * n + a] -
                             j.d1[static_cast<std::size_t>(a) * n + b];
    return out;
}

// T^k_{ij} = gamma^k_{ij} - gamma^k_{ji}
inline TensorValue torsion_of(const ConnectionField& C, const std::vector<double>& x) {
    const int n = C.dim();
    auto G = C.gamma(x);
    TensorValue T(n, 1, 2);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                T.at({k, i, j}) = G[(static_cast<std::size_t>(k) * n + i) * n + j] -
                                  G[(static_cast<std::size_t>(k) * n + j) * n + i];
    return T;
}

// [X,Y]^k = X^m d_m Y^k - Y^m d_m X^k for two (1,0) field jets
inline TensorValue lie_bracket(const FieldJet& X, const FieldJet& Y) {
    const int n = X.value.dim();
    TensorValue out(n, 1, 0);
    for (int k = 0; k < n; ++k) {
        double acc = 0.0;
        for (int m = 0; m < n; ++m)
            acc += X.value.at({m}) * Y.d1[static_cast<std::size_t>(k) * n + m] -
                   Y.value.at({m}) * X.d1[static_cast<std::size_t>(k) * n + m];
        out.at({k}) = acc;
    }
    return out;
}

// --- covariant derivatives --------------------------------------------------

namespace detail {

// Appends the differentiation index as the LAST covariant slot. d1 follows the
// FieldJet layout; direction_first selects which lower gamma slot contracts
// with the differentiation direction.
inline TensorValue cov_deriv(const TensorValue& t, const std::vector<double>& d1,
                             const std::vector<double>& G, bool direction_first) {
    const int n = t.dim();
    const int p = t.contravariant(), q = t.covariant();
    const int r = p + q;
    TensorValue out(n, p, q + 1);
    std::vector<int> idx(static_cast<std::size_t>(r) + 1, 0);
    const std::size_t total = out.comps().size();
    auto gam = [&](int k, int i, int j) {
        return G[(static_cast<std::size_t>(k) * n + i) * n + j];
    };
    for (std::size_t f = 0; f < total; ++f) {
        std::size_t tmp = f;
        for (int s = r; s >= 0; --s) { idx[s] = static_cast<int>(tmp % n); tmp /= n; }
        const int m = idx[static_cast<std::size_t>(r)];
        std::size_t base = 0;
        for (int s = 0; s < r; ++s) base = base * n + idx[s];
        double acc = d1[base * n + m];
        for (int s = 0; s < r; ++s) {
            const int orig = idx[s];
            for (int c = 0; c < n; ++c) {
                std::size_t g2 = 0;
                for (int u = 0; u < r; ++u) g2 = g2 * n + (u == s ? c : idx[u]);
                const double coef = s < p
                    ? (direction_first ? gam(orig, m, c) : gam(orig, c, m))
                    : -(direction_first ? gam(c, m, orig) : gam(c, orig, m));
                acc += coef * t.comps()[g2];
            }
        }
        out.comps()[f] = acc;
    }
    return out;
}

}  // namespace detail

inline TensorValue covariant_derivative(const TensorValue& t, const std::vector<double>& d1,
                                        const std::vector<double>& gamma) {
    return detail::cov_deriv(t, d1, gamma, true);
}

inline TensorValue covariant_derivative(const FieldProvider& P, const ConnectionField& C,
                                        const std::string& name, const std::vector<double>& x) {
    auto j = P.jet(name, x);
    return detail::cov_deriv(j.value, j.d1, C.gamma(x), true);
}

// Both historical index placements; first = direction in the last gamma slot
// ("+"), second = direction in the first slot ("-", the default above).
inline std::pair<TensorValue, TensorValue> covariant_derivative_pm(
    const FieldProvider& P, const ConnectionField& C, const std::string& name,
    const std::vector<double>& x) {
    auto j = P.jet(name, x);
    auto G = C.gamma(x);
    return {detail::cov_deriv(j.value, j.d1, G, false), detail::cov_deriv(j.value, j.d1, G, true)};
}

// --- Nijenhuis tensor -------------------------------------------------------

// N^k_{ij} = A^s_i d_s A^k_j - A^s_j d_s A^k_i - A^k_s (d_i A^s_j - d_j A^s_i)
// for any named (1,1) field in place of A
inline TensorValue nijenhuis(const FieldProvider& P, const std::string& name,
                             const std::vector<double>& x) {
    const int n = P.dim();
    auto A = P.jet(name, x);
    auto a = [&](int k, int i) { return A.value.at({k, i}); };
    auto da = [&](int m, int k, int i) {
        return A.d1[(static_cast<std::size_t>(k) * n + i) * n + m];
    };
    TensorValue N(n, 1, 2);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double acc = 0.0;
                for (int s = 0; s < n; ++s)
                    acc += a(s, i) * da(s, k, j) - a(s, j) * da(s, k, i) -
                           a(k, s) * (da(i, s, j) - da(j, s, i));
                N.at({k, i, j}) = acc;
            }
    return N;
}

inline TensorValue nijenhuis(const FieldProvider& P, const std::vector<double>& x) {
    return nijenhuis(P, "A", x);
}

// --- curvature --------------------------------------------------------------

// R.at({i,k,l,m}) = component i of R(e_l, e_m) e_k
//   = d_l gamma^i_{mk} - d_m gamma^i_{lk} + gamma^s_{mk} gamma^i_{ls}
//     - gamma^s_{lk} gamma^i_{ms}
inline TensorValue curvature(const ConnectionField& C, const std::vector<double>& x) {
    const int n = C.dim();
    std::vector<D1> xs(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        xs[i].a = x[i];
        xs[i].b.assign(x.size(), 0.0);
        xs[i].b[i] = 1.0;
    }
    auto Gd = C.gamma(xs);
    auto gam = [&](int k, int i, int j) {
        return Gd[(static_cast<std::size_t>(k) * n + i) * n + j].a;
    };
    auto dgam = [&](int m, int k, int i, int j) {
        return Gd[(static_cast<std::size_t>(k) * n + i) * n + j].b[static_cast<std::size_t>(m)];
    };
    TensorValue R(n, 1, 3);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l)
                for (int m = 0; m < n; ++m) {
                    double acc = dgam(l, i, m, k) - dgam(m, i, l, k);
                    for (int s = 0; s < n; ++s)
                        acc += gam(s, m, k) * gam(i, l, s) - gam(s, l, k) * gam(i, m, s);
                    R.at({i, k, l, m}) = acc;
                }
    return R;
}

}  // namespace grm
