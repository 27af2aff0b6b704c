// Model-space generators: flat Kahler spaces, the round 2-sphere, the nearly
// Kahler 6-sphere, weighted products, real-line products, and the two negative
// controls shipped for the verification suites.

#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "grm/fields.hpp"

namespace grm {

namespace detail {

inline Expr cexpr(double v, int dim) { return Expr(e_const(v), dim); }

inline std::vector<Expr> zero_matrix(int n) {
    return std::vector<Expr>(static_cast<std::size_t>(n) * n, cexpr(0.0, n));
}

inline std::vector<Expr> identity_matrix(int n) {
    auto m = zero_matrix(n);
    for (int i = 0; i < n; ++i) m[static_cast<std::size_t>(i) * n + i] = cexpr(1.0, n);
    return m;
}

inline std::vector<std::array<double, 2>> box(int n, double half) {
    return std::vector<std::array<double, 2>>(static_cast<std::size_t>(n), {-half, half});
}

// Re-home an Expr into a chart of dimension new_dim with variables offset.
inline Expr rehome(const Expr& e, int offset, int new_dim) {
    return Expr(shift_vars(e.root(), offset), new_dim);
}

inline Expr scale(const Expr& e, double s) {
    if (s == 1.0) return e;
    return Expr(e_binary(ExprOp::Mul, e_const(s), e.root()), e.dim());
}

}  // namespace detail

inline ManifoldSpec builtin_flat_kahler(int n) {
    if (n < 2 || n % 2 != 0) throw std::invalid_argument("flat_kahler: dimension must be even and >= 2");
    ManifoldSpec spec;
    spec.name = "flat_kahler_" + std::to_string(n);
    spec.dim = n;
    spec.domain = detail::box(n, 0.8);
    spec.fields["g"] = detail::identity_matrix(n);
    spec.fields["Q"] = detail::identity_matrix(n);
    auto F = detail::zero_matrix(n);
    auto A = detail::zero_matrix(n);
    for (int b = 0; b < n / 2; ++b) {
        const int i = 2 * b, j = 2 * b + 1;
        F[static_cast<std::size_t>(i) * n + j] = detail::cexpr(1.0, n);
        F[static_cast<std::size_t>(j) * n + i] = detail::cexpr(-1.0, n);
        // A e_i = e_j, A e_j = -e_i
        A[static_cast<std::size_t>(j) * n + i] = detail::cexpr(1.0, n);
        A[static_cast<std::size_t>(i) * n + j] = detail::cexpr(-1.0, n);
    }
    spec.fields["F"] = F;
    spec.fields["A"] = A;
    return spec;
}

inline ManifoldSpec builtin_flat_torus_kahler(int n) {
    auto spec = builtin_flat_kahler(n);
    spec.name = "flat_torus_kahler_" + std::to_string(n);
    return spec;
}

namespace detail {

// Signed cross-product structure table on indices 0..m-1: each triple (p,q,r)
// has epsilon_{pqr} = +1, extended totally antisymmetrically. Returns the m*m
// matrix of expressions for the endomorphism X -> p x X, entries linear in the
// ambient coordinates, optionally scaled.
inline std::vector<Expr> cross_product_matrix(const std::vector<std::array<int, 3>>& triples,
                                              int m, double scale) {
    // entry (a,c) accumulates sum_b eps_{abc} * x_b
    std::vector<ExprPtr> acc(static_cast<std::size_t>(m) * m);
    auto add = [&](int a, int b, int c, double sign) {
        ExprPtr term = e_var(b);
        if (sign * scale != 1.0) term = e_binary(ExprOp::Mul, e_const(sign * scale), term);
        auto& slot = acc[static_cast<std::size_t>(a) * m + c];
        slot = slot ? e_binary(ExprOp::Add, slot, term) : term;
    };
    for (const auto& [p, q, r] : triples) {
        add(p, q, r, 1.0);
        add(q, r, p, 1.0);
        add(r, p, q, 1.0);
        add(p, r, q, -1.0);
        add(r, q, p, -1.0);
        add(q, p, r, -1.0);
    }
    std::vector<Expr> out(static_cast<std::size_t>(m) * m, cexpr(0.0, m));
    for (int a = 0; a < m; ++a)
        for (int c = 0; c < m; ++c) {
            auto& slot = acc[static_cast<std::size_t>(a) * m + c];
            if (slot) out[static_cast<std::size_t>(a) * m + c] = Expr(slot, m);
        }
    return out;
}

// Graph chart of the upper hemisphere: phi = (r x0,..., r x_{n-1}, r w) with
// w = sqrt(1 - |x|^2); box chosen so |x| <= 0.8 away from the equator.
inline void sphere_embedding(ManifoldSpec& spec, int n, double radius) {
    spec.backend = ManifoldSpec::Backend::embedded;
    spec.dim = n;
    spec.ambient_dim = n + 1;
    spec.domain = box(n, 0.8 / std::sqrt(static_cast<double>(n)));
    std::string w = "1";
    for (int i = 0; i < n; ++i) w += "-x" + std::to_string(i) + "^2";
    for (int i = 0; i < n; ++i)
        spec.embedding.push_back(
            parse_expr(std::to_string(radius) + "*x" + std::to_string(i), n));
    spec.embedding.push_back(parse_expr(std::to_string(radius) + "*sqrt(" + w + ")", n));
}

}  // namespace detail

inline ManifoldSpec builtin_round_s2(double radius) {
    if (radius <= 0) throw std::invalid_argument("round_s2: radius must be positive");
    ManifoldSpec spec;
    spec.name = "round_s2";
    detail::sphere_embedding(spec, 2, radius);
    // A_amb X = (p/r) x X, the standard complex structure of the 2-sphere
    spec.ambient_A = detail::cross_product_matrix({{0, 1, 2}}, 3, 1.0 / radius);
    spec.fields["Q"] = detail::identity_matrix(2);
    return spec;
}

inline ManifoldSpec builtin_s6_nearly_kahler() {
    ManifoldSpec spec;
    spec.name = "s6_nearly_kahler";
    detail::sphere_embedding(spec, 6, 1.0);
    // G2-invariant octonionic cross product on R^7 (indices 0..6)
    spec.ambient_A = detail::cross_product_matrix(
        {{0, 1, 2}, {0, 3, 4}, {0, 6, 5}, {1, 3, 5}, {1, 4, 6}, {2, 3, 6}, {2, 5, 4}}, 7, 1.0);
    spec.fields["Q"] = detail::identity_matrix(6);
    return spec;
}

inline ManifoldSpec builtin_weighted_product(const std::vector<ManifoldSpec>& factors,
                                             const std::vector<double>& weights) {
    if (factors.empty() || factors.size() != weights.size())
        throw std::invalid_argument("weighted_product: need one positive weight per factor");
    for (double w : weights)
        if (!(w > 0)) throw std::invalid_argument("weighted_product: weights must be positive");

    bool any_embedded = false;
    int total_dim = 0;
    for (const auto& f : factors) {
        if (f.backend == ManifoldSpec::Backend::embedded) any_embedded = true;
        else if (!f.fields.count("A"))
            throw std::invalid_argument("weighted_product: each chart factor must carry A");
        total_dim += f.dim;
    }

    ManifoldSpec spec;
    spec.name = "weighted_product";
    spec.dim = total_dim;
    const int n = total_dim;

    auto Q = detail::zero_matrix(n);
    {
        int off = 0;
        for (std::size_t j = 0; j < factors.size(); ++j) {
            for (int i = 0; i < factors[j].dim; ++i)
                Q[static_cast<std::size_t>(off + i) * n + (off + i)] = detail::cexpr(weights[j], n);
            off += factors[j].dim;
        }
    }
    spec.fields["Q"] = Q;
    for (const auto& f : factors)
        spec.domain.insert(spec.domain.end(), f.domain.begin(), f.domain.end());

    if (!any_embedded) {
        auto g = detail::zero_matrix(n);
        auto F = detail::zero_matrix(n);
        auto A = detail::zero_matrix(n);
        int off = 0;
        for (std::size_t j = 0; j < factors.size(); ++j) {
            const auto& f = factors[j];
            const int nf = f.dim;
            const double s = std::sqrt(weights[j]);
            FieldProvider fp(f);
            const auto& gf = f.fields.count("g") ? f.fields.at("g") : f.fields.at("G");
            const auto& Ff = f.fields.at("F");
            const auto& Af = f.fields.at("A");
            for (int i = 0; i < nf; ++i)
                for (int k = 0; k < nf; ++k) {
                    const std::size_t src = static_cast<std::size_t>(i) * nf + k;
                    const std::size_t dst = static_cast<std::size_t>(off + i) * n + (off + k);
                    g[dst] = detail::rehome(gf[src], off, n);
                    F[dst] = detail::scale(detail::rehome(Ff[src], off, n), s);
                    A[dst] = detail::scale(detail::rehome(Af[src], off, n), s);
                }
            off += nf;
        }
        spec.fields["g"] = g;
        spec.fields["F"] = F;
        spec.fields["A"] = A;
        return spec;
    }

    // Mixed case: embed everything. Chart factors must be flat (g = delta) and
    // go in through the identity map, with their A serving as the ambient one.
    spec.backend = ManifoldSpec::Backend::embedded;
    int total_amb = 0;
    for (const auto& f : factors)
        total_amb += f.backend == ManifoldSpec::Backend::embedded ? f.ambient_dim : f.dim;
    spec.ambient_dim = total_amb;
    const int m = total_amb;
    spec.ambient_A = detail::zero_matrix(m);

    int chart_off = 0, amb_off = 0;
    for (std::size_t j = 0; j < factors.size(); ++j) {
        const auto& f = factors[j];
        const double s = std::sqrt(weights[j]);
        if (f.backend == ManifoldSpec::Backend::embedded) {
            for (const auto& e : f.embedding)
                spec.embedding.push_back(detail::rehome(e, chart_off, n));
            for (int a = 0; a < f.ambient_dim; ++a)
                for (int b = 0; b < f.ambient_dim; ++b)
                    spec.ambient_A[static_cast<std::size_t>(amb_off + a) * m + (amb_off + b)] =
                        detail::scale(detail::rehome(f.ambient_A[static_cast<std::size_t>(a) * f.ambient_dim + b],
                                                     amb_off, m), s);
            amb_off += f.ambient_dim;
        } else {
            if (!f.fields.count("A"))
                throw std::invalid_argument("weighted_product: each chart factor must carry A");
            for (int i = 0; i < f.dim; ++i)
                spec.embedding.push_back(Expr(e_var(chart_off + i), n));
            const auto& Af = f.fields.at("A");
            for (int a = 0; a < f.dim; ++a)
                for (int b = 0; b < f.dim; ++b)
                    spec.ambient_A[static_cast<std::size_t>(amb_off + a) * m + (amb_off + b)] =
                        detail::scale(detail::rehome(Af[static_cast<std::size_t>(a) * f.dim + b],
                                                     amb_off, m), s);
            amb_off += f.dim;
        }
        chart_off += f.dim;
    }
    return spec;
}

// R x M with the product metric dt^2 + g, xi = d/dt, eta = dt; t is x0.
inline ManifoldSpec builtin_line_product(const ManifoldSpec& base) {
    if (!base.fields.count("Q"))
        throw std::invalid_argument("line_product: base spec must carry Q");
    ManifoldSpec spec;
    spec.name = "line_product_" + base.name;
    spec.dim = base.dim + 1;
    const int n = spec.dim;
    spec.domain.push_back({-0.8, 0.8});
    spec.domain.insert(spec.domain.end(), base.domain.begin(), base.domain.end());

    auto Q = detail::zero_matrix(n);
    Q[0] = detail::cexpr(1.0, n);
    const auto& Qb = base.fields.at("Q");
    for (int i = 0; i < base.dim; ++i)
        for (int j = 0; j < base.dim; ++j)
            Q[static_cast<std::size_t>(i + 1) * n + (j + 1)] =
                detail::rehome(Qb[static_cast<std::size_t>(i) * base.dim + j], 1, n);
    spec.fields["Q"] = Q;

    std::vector<Expr> xi(static_cast<std::size_t>(n), detail::cexpr(0.0, n));
    xi[0] = detail::cexpr(1.0, n);
    spec.fields["xi"] = xi;
    spec.fields["eta"] = xi;

    if (base.backend == ManifoldSpec::Backend::chart) {
        auto lift = [&](const std::string& key, bool unit_tt) {
            auto M = detail::zero_matrix(n);
            if (unit_tt) M[0] = detail::cexpr(1.0, n);
            const auto& src = base.fields.at(key);
            for (int i = 0; i < base.dim; ++i)
                for (int j = 0; j < base.dim; ++j)
                    M[static_cast<std::size_t>(i + 1) * n + (j + 1)] =
                        detail::rehome(src[static_cast<std::size_t>(i) * base.dim + j], 1, n);
            spec.fields[key] = M;
        };
        lift("g", true);
        lift("F", false);
        if (base.fields.count("A")) lift("A", false);
        return spec;
    }

    spec.backend = ManifoldSpec::Backend::embedded;
    spec.ambient_dim = base.ambient_dim + 1;
    const int m = spec.ambient_dim;
    spec.embedding.push_back(Expr(e_var(0), n));
    for (const auto& e : base.embedding) spec.embedding.push_back(detail::rehome(e, 1, n));
    spec.ambient_A = detail::zero_matrix(m);
    for (int a = 0; a < base.ambient_dim; ++a)
        for (int b = 0; b < base.ambient_dim; ++b)
            spec.ambient_A[static_cast<std::size_t>(a + 1) * m + (b + 1)] =
                detail::rehome(base.ambient_A[static_cast<std::size_t>(a) * base.ambient_dim + b], 1, m);
    return spec;
}

// Generic non-integrable control: the skew-torsion existence criterion fails,
// so the constructed connection cannot satisfy the metricity condition.
inline ManifoldSpec builtin_control_noncriterion() {
    ManifoldSpec spec;
    spec.name = "control_noncriterion";
    spec.dim = 4;
    spec.domain = detail::box(4, 0.8);
    spec.fields["g"] = detail::identity_matrix(4);
    auto F = detail::zero_matrix(4);
    auto set = [&](int i, int j, const std::string& s) {
        F[static_cast<std::size_t>(i) * 4 + j] = parse_expr(s, 4);
        F[static_cast<std::size_t>(j) * 4 + i] = parse_expr("-(" + s + ")", 4);
    };
    set(0, 1, "1+0.5*sin(x2)");
    set(2, 3, "1+0.5*sin(x0)");
    set(0, 2, "0.4*x3");
    set(1, 3, "0.3*x0*x2");
    spec.fields["F"] = F;
    return spec;
}

// Eigenvalue-drift control: Q has a non-constant spectrum over the chart.
inline ManifoldSpec builtin_control_qdrift() {
    auto spec = builtin_flat_kahler(4);
    spec.name = "control_qdrift";
    auto Q = detail::zero_matrix(4);
    Q[0 * 4 + 0] = parse_expr("1+x0^2", 4);
    Q[1 * 4 + 1] = parse_expr("1+x0^2", 4);
    Q[2 * 4 + 2] = detail::cexpr(4.0, 4);
    Q[3 * 4 + 3] = detail::cexpr(4.0, 4);
    spec.fields["Q"] = Q;
    return spec;
}

struct BuiltinParams {
    int dim = 4;
    double radius = 1.0;
    std::vector<std::string> factors;   // weighted_product factor tokens
    std::vector<double> weights;
    std::string base;                   // line_product base token
};

inline ManifoldSpec builtin(const std::string& name, const BuiltinParams& params);

namespace detail {

// Factor tokens: tN = flat torus, fkN = flat Kahler, s2, s6.
inline ManifoldSpec factor_from_token(const std::string& tok) {
    if (tok == "s6") return builtin_s6_nearly_kahler();
    if (tok == "s2") return builtin_round_s2(1.0);
    if (tok.size() >= 2 && tok[0] == 't')
        return builtin_flat_torus_kahler(std::stoi(tok.substr(1)));
    if (tok.size() >= 3 && tok.substr(0, 2) == "fk")
        return builtin_flat_kahler(std::stoi(tok.substr(2)));
    throw std::invalid_argument("unknown factor token '" + tok + "'");
}

}  // namespace detail

inline ManifoldSpec builtin(const std::string& name, const BuiltinParams& params) {
    if (name == "flat_kahler") return builtin_flat_kahler(params.dim);
    if (name == "flat_torus_kahler") return builtin_flat_torus_kahler(params.dim);
    if (name == "round_s2") return builtin_round_s2(params.radius);
    if (name == "s6_nearly_kahler") return builtin_s6_nearly_kahler();
    if (name == "control_noncriterion") return builtin_control_noncriterion();
    if (name == "control_qdrift") return builtin_control_qdrift();
    if (name == "weighted_product") {
        std::vector<ManifoldSpec> factors;
        for (const auto& tok : params.factors) factors.push_back(detail::factor_from_token(tok));
        return builtin_weighted_product(factors, params.weights);
    }
    if (name == "line_product") {
        if (params.base.empty()) throw std::invalid_argument("line_product: missing base token");
        return builtin_line_product(detail::factor_from_token(params.base));
    }
    throw std::invalid_argument("unknown builtin '" + name + "'");
}

}  // namespace grm
