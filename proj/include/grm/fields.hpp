// Manifold specifications and field providers.
//
// A ManifoldSpec names component fields (G or g+F, optionally A, Q, xi, eta)
// over a single chart, either directly as expression matrices or through an
// embedding into Euclidean space. A FieldProvider evaluates any named field,
// with derivatives to any order via nested dual numbers: call
// components<double> for values, components<D1> at a seeded point for first
// partials, components<D2> for second partials.

#pragma once

#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "grm/dual.hpp"
#include "grm/expr.hpp"
#include "grm/tensor.hpp"

namespace grm {

struct SpecError : std::runtime_error {
    explicit SpecError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ManifoldSpec {
    enum class Backend { chart, embedded };

    std::string name = "spec";
    int dim = 0;
    Backend backend = Backend::chart;
    std::vector<std::array<double, 2>> domain;              // per-coordinate box
    std::map<std::string, std::vector<Expr>> fields;        // flattened matrices / vectors
    // embedded backend only:
    int ambient_dim = 0;
    std::vector<Expr> embedding;                            // m expressions of n chart vars
    std::vector<Expr> ambient_A;                            // m*m expressions of ambient vars
};

// (contravariant, covariant) valence of the named field.
inline std::pair<int, int> field_valence(const std::string& name) {
    if (name == "G" || name == "g" || name == "F") return {0, 2};
    if (name == "A" || name == "Q") return {1, 1};
    if (name == "xi") return {1, 0};
    if (name == "eta") return {0, 1};
    throw std::invalid_argument("unknown field name: " + name);
}

// --- deterministic low-discrepancy sampling ---------------------------------

namespace detail {

inline double halton(unsigned long long index, int base) {
    double f = 1.0, r = 0.0;
    while (index > 0) {
        f /= base;
        r += f * static_cast<double>(index % static_cast<unsigned long long>(base));
        index /= static_cast<unsigned long long>(base);
    }
    return r;
}

constexpr int kHaltonPrimes[16] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

}  // namespace detail

inline std::vector<std::vector<double>> sample_points(
    const std::vector<std::array<double, 2>>& domain, int count, unsigned seed) {
    const int n = static_cast<int>(domain.size());
    if (n > 16) throw std::invalid_argument("chart dimension > 16 not supported");
    std::vector<std::vector<double>> pts;
    pts.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        std::vector<double> p(static_cast<std::size_t>(n));
        const unsigned long long idx = static_cast<unsigned long long>(i) + 1 +
                                       static_cast<unsigned long long>(seed) * 7919ull;
        for (int d = 0; d < n; ++d) {
            const double u = detail::halton(idx, detail::kHaltonPrimes[d]);
            p[static_cast<std::size_t>(d)] = domain[static_cast<std::size_t>(d)][0] +
                (domain[static_cast<std::size_t>(d)][1] - domain[static_cast<std::size_t>(d)][0]) * u;
        }
        pts.push_back(std::move(p));
    }
    return pts;
}

// --- generic linear algebra over dual scalars -------------------------------

namespace detail {

// Gauss-Jordan inverse of a flat n x n matrix of dual scalars; pivots on the
// leading (double) value.
template <class D>
std::vector<D> invert_flat_dual(const std::vector<D>& m, int n) {
    std::vector<D> a = m;
    std::vector<D> inv(static_cast<std::size_t>(n) * n, zero_like(m[0]));
    for (int i = 0; i < n; ++i) inv[static_cast<std::size_t>(i) * n + i] = constant_like(m[0], 1.0);
    double max_abs = 0.0;
    for (const D& v : m) max_abs = std::max(max_abs, std::abs(leading(v)));
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(leading(a[static_cast<std::size_t>(r) * n + col])) >
                std::abs(leading(a[static_cast<std::size_t>(piv) * n + col])))
                piv = r;
        const double pv = leading(a[static_cast<std::size_t>(piv) * n + col]);
        if (std::abs(pv) < 1e-13 * (1.0 + max_abs))
            throw SingularMatrixError(max_abs / std::max(std::abs(pv), 1e-300));
        if (piv != col)
            for (int c = 0; c < n; ++c) {
                std::swap(a[static_cast<std::size_t>(piv) * n + c],
                          a[static_cast<std::size_t>(col) * n + c]);
                std::swap(inv[static_cast<std::size_t>(piv) * n + c],
                          inv[static_cast<std::size_t>(col) * n + c]);
            }
        const D ipv = constant_like(m[0], 1.0) / a[static_cast<std::size_t>(col) * n + col];
        for (int c = 0; c < n; ++c) {
            a[static_cast<std::size_t>(col) * n + c] = a[static_cast<std::size_t>(col) * n + c] * ipv;
            inv[static_cast<std::size_t>(col) * n + c] = inv[static_cast<std::size_t>(col) * n + c] * ipv;
        }
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            const D f = a[static_cast<std::size_t>(r) * n + col];
            if (leading(f) == 0.0) continue;
            for (int c = 0; c < n; ++c) {
                a[static_cast<std::size_t>(r) * n + c] =
                    a[static_cast<std::size_t>(r) * n + c] - f * a[static_cast<std::size_t>(col) * n + c];
                inv[static_cast<std::size_t>(r) * n + c] =
                    inv[static_cast<std::size_t>(r) * n + c] - f * inv[static_cast<std::size_t>(col) * n + c];
            }
        }
    }
    return inv;
}

}  // namespace detail

// --- provider ---------------------------------------------------------------

struct FieldJet {
    TensorValue value;
    std::vector<double> d1;  // d1[c * n + m] = partial_m of component c
};

class FieldProvider {
public:
    explicit FieldProvider(ManifoldSpec spec) : spec_(std::move(spec)) {}

    int dim() const { return spec_.dim; }
    const ManifoldSpec& spec() const { return spec_; }

    bool has(const std::string& name) const {
        if (spec_.fields.count(name)) return true;
        if (name == "g" || name == "F" || name == "G" || name == "A") {
            if (spec_.backend == ManifoldSpec::Backend::embedded) return true;
            return spec_.fields.count("G") || spec_.fields.count("g");
        }
        return false;
    }

    // Flattened components of the named field over scalar type D. The chart
    // point x carries whatever derivative seeding the caller set up.
    template <class D>
    std::vector<D> components(const std::string& name, const std::vector<D>& x) const {
        if (static_cast<int>(x.size()) != spec_.dim)
            throw std::invalid_argument("point dimension mismatch");
        if (spec_.backend == ManifoldSpec::Backend::chart)
            return chart_components(name, x);
        return embedded_components(name, x);
    }

    TensorValue value(const std::string& name, const std::vector<double>& x) const {
        auto [p, q] = field_valence(name);
        return TensorValue(spec_.dim, p, q, components<double>(name, x));
    }

    FieldJet jet(const std::string& name, const std::vector<double>& x) const {
        const std::size_t n = x.size();
        std::vector<D1> xs(n);
        for (std::size_t i = 0; i < n; ++i) {
            xs[i].a = x[i];
            xs[i].b.assign(n, 0.0);
            xs[i].b[i] = 1.0;
        }
        auto c = components<D1>(name, xs);
        auto [p, q] = field_valence(name);
        FieldJet j{TensorValue(spec_.dim, p, q), {}};
        j.d1.resize(c.size() * n);
        for (std::size_t k = 0; k < c.size(); ++k) {
            j.value.comps()[k] = c[k].a;
            for (std::size_t m = 0; m < n; ++m) j.d1[k * n + m] = c[k].b[m];
        }
        return j;
    }

private:
    ManifoldSpec spec_;

    template <class D>
    std::vector<D> eval_all(const std::vector<Expr>& exprs, const std::vector<D>& x) const {
        std::vector<D> out;
        out.reserve(exprs.size());
        for (const auto& e : exprs) out.push_back(eval(e, x));
        return out;
    }

    template <class D>
    std::vector<D> chart_components(const std::string& name, const std::vector<D>& x) const {
        const int n = spec_.dim;
        auto it = spec_.fields.find(name);
        if (it != spec_.fields.end()) return eval_all(it->second, x);

        if (name == "g" || name == "F") {
            auto git = spec_.fields.find("G");
            if (git == spec_.fields.end()) {
                if (name == "F" && spec_.fields.count("g")) {
                    // g given without F: skew part is zero
                    return std::vector<D>(static_cast<std::size_t>(n) * n, zero_like(x[0]));
                }
                throw SpecError("field '" + name + "' unavailable: neither it nor G given");
            }
            auto G = eval_all(git->second, x);
            std::vector<D> out(G.size());
            const double s = (name == "g") ? 1.0 : -1.0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    out[static_cast<std::size_t>(i) * n + j] =
                        (G[static_cast<std::size_t>(i) * n + j] +
                         s * G[static_cast<std::size_t>(j) * n + i]) * 0.5;
            return out;
        }
        if (name == "G") {
            auto g = chart_components("g", x);
            auto F = chart_components("F", x);
            for (std::size_t k = 0; k < g.size(); ++k) g[k] = g[k] + F[k];
            return g;
        }
        if (name == "A") return adjoint_from(chart_components("g", x), chart_components("F", x));
        throw SpecError("field '" + name + "' not present in spec");
    }

    // A^k_i = F_{ij} g^{jk}
    template <class D>
    std::vector<D> adjoint_from(const std::vector<D>& g, const std::vector<D>& F) const {
        const int n = spec_.dim;
        auto gi = detail::invert_flat_dual(g, n);  // gi[j*n+k] = g^{jk}
        std::vector<D> A(static_cast<std::size_t>(n) * n, zero_like(g[0]));
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i) {
                D acc = zero_like(g[0]);
                for (int j = 0; j < n; ++j)
                    acc = acc + F[static_cast<std::size_t>(i) * n + j] *
                              gi[static_cast<std::size_t>(j) * n + k];
                A[static_cast<std::size_t>(k) * n + i] = acc;
            }
        return A;
    }

    template <class D>
    std::vector<D> embedded_components(const std::string& name, const std::vector<D>& x) const {
        auto it = spec_.fields.find(name);
        if (it != spec_.fields.end()) return eval_all(it->second, x);

        const int n = spec_.dim;
        const int m = spec_.ambient_dim;
        if (name == "g" || name == "F" || name == "G" || name == "A") {
            // differentiate the embedding in the chart directions
            std::vector<Dual<D>> xs = seed(x);
            std::vector<Dual<D>> phi(static_cast<std::size_t>(m));
            for (int a = 0; a < m; ++a) phi[static_cast<std::size_t>(a)] = eval(spec_.embedding[static_cast<std::size_t>(a)], xs);

            std::vector<D> g(static_cast<std::size_t>(n) * n, zero_like(x[0]));
            for (int i = 0; i < n; ++i)
                for (int j = i; j < n; ++j) {
                    D acc = zero_like(x[0]);
                    for (int a = 0; a < m; ++a)
                        acc = acc + phi[static_cast<std::size_t>(a)].b[static_cast<std::size_t>(i)] *
                                  phi[static_cast<std::size_t>(a)].b[static_cast<std::size_t>(j)];
                    g[static_cast<std::size_t>(i) * n + j] = acc;
                    g[static_cast<std::size_t>(j) * n + i] = acc;
                }
            if (name == "g") return g;

            // ambient endomorphism at phi(x), then F_ij = <A_amb dphi_i, dphi_j>
            std::vector<D> ax(static_cast<std::size_t>(m));
            for (int a = 0; a < m; ++a) ax[static_cast<std::size_t>(a)] = phi[static_cast<std::size_t>(a)].a;
            std::vector<D> Aamb(static_cast<std::size_t>(m) * m);
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b)
                    Aamb[static_cast<std::size_t>(a) * m + b] =
                        eval(spec_.ambient_A[static_cast<std::size_t>(a) * m + b], ax);

            std::vector<D> F(static_cast<std::size_t>(n) * n, zero_like(x[0]));
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    D acc = zero_like(x[0]);
                    for (int a = 0; a < m; ++a) {
                        D Ad = zero_like(x[0]);
                        for (int b = 0; b < m; ++b)
                            Ad = Ad + Aamb[static_cast<std::size_t>(a) * m + b] *
                                     phi[static_cast<std::size_t>(b)].b[static_cast<std::size_t>(i)];
                        acc = acc + Ad * phi[static_cast<std::size_t>(a)].b[static_cast<std::size_t>(j)];
                    }
                    F[static_cast<std::size_t>(i) * n + j] = acc;
                }
            if (name == "F") return F;
            if (name == "A") return adjoint_from(g, F);
            // G
            for (std::size_t k = 0; k < g.size(); ++k) g[k] = g[k] + F[k];
            return g;
        }
        throw SpecError("field '" + name + "' not present in spec");
    }
};

inline FieldProvider make_provider(const ManifoldSpec& spec) { return FieldProvider(spec); }

// --- JSON schema ------------------------------------------------------------

inline ManifoldSpec load_spec(const nlohmann::json& doc);

namespace detail {

inline std::vector<Expr> parse_matrix(const nlohmann::json& j, int rows, int cols, int dim,
                                      const std::string& what) {
    if (!j.is_array() || static_cast<int>(j.size()) != rows)
        throw SpecError(what + ": expected " + std::to_string(rows) + " rows");
    std::vector<Expr> out;
    out.reserve(static_cast<std::size_t>(rows) * cols);
    for (const auto& row : j) {
        if (!row.is_array() || static_cast<int>(row.size()) != cols)
            throw SpecError(what + ": expected " + std::to_string(cols) + " columns");
        for (const auto& cell : row) {
            if (!cell.is_string()) throw SpecError(what + ": entries must be expression strings");
            out.push_back(parse_expr(cell.get<std::string>(), dim));
        }
    }
    return out;
}

inline std::vector<Expr> parse_vector(const nlohmann::json& j, int len, int dim,
                                      const std::string& what) {
    if (!j.is_array() || static_cast<int>(j.size()) != len)
        throw SpecError(what + ": expected " + std::to_string(len) + " entries");
    std::vector<Expr> out;
    out.reserve(static_cast<std::size_t>(len));
    for (const auto& cell : j) {
        if (!cell.is_string()) throw SpecError(what + ": entries must be expression strings");
        out.push_back(parse_expr(cell.get<std::string>(), dim));
    }
    return out;
}

inline void spot_check(const ManifoldSpec& spec) {
    FieldProvider prov(spec);
    auto pts = sample_points(spec.domain, 8, 7);
    for (const auto& p : pts) {
        auto g = prov.value("g", p);
        invert_matrix(g);  // throws SingularMatrixError if degenerate

        if (spec.backend == ManifoldSpec::Backend::embedded) {
            // rank check: Gram determinant of Dphi equals det g, must be nonzero
            // (covered by the inversion above); additionally assert the ambient
            // endomorphism maps tangent vectors to tangent vectors.
            const int n = spec.dim, m = spec.ambient_dim;
            std::vector<D1> xs(p.size());
            for (std::size_t i = 0; i < p.size(); ++i) {
                xs[i].a = p[i];
                xs[i].b.assign(p.size(), 0.0);
                xs[i].b[i] = 1.0;
            }
            std::vector<std::vector<double>> dphi(static_cast<std::size_t>(m));
            std::vector<double> ax(static_cast<std::size_t>(m));
            for (int a = 0; a < m; ++a) {
                D1 v = eval(spec.embedding[static_cast<std::size_t>(a)], xs);
                dphi[static_cast<std::size_t>(a)] = v.b;
                ax[static_cast<std::size_t>(a)] = v.a;
            }
            auto A = prov.value("A", p);
            for (int i = 0; i < n; ++i) {
                // ambient image of A_amb dphi_i minus its pushed-forward chart image
                std::vector<double> resid(static_cast<std::size_t>(m), 0.0);
                for (int a = 0; a < m; ++a) {
                    double Ad = 0.0;
                    for (int b = 0; b < m; ++b)
                        Ad += eval_jet2(spec.ambient_A[static_cast<std::size_t>(a) * m + b], ax).value *
                              dphi[static_cast<std::size_t>(b)][static_cast<std::size_t>(i)];
                    resid[static_cast<std::size_t>(a)] = Ad;
                }
                for (int k = 0; k < n; ++k)
                    for (int a = 0; a < m; ++a)
                        resid[static_cast<std::size_t>(a)] -=
                            A.at({k, i}) * dphi[static_cast<std::size_t>(a)][static_cast<std::size_t>(k)];
                double r = 0.0;
                for (double v : resid) r = std::max(r, std::abs(v));
                if (r > 1e-9)
                    throw SpecError("ambient endomorphism is not tangent (residual " +
                                    std::to_string(r) + ")");
            }
        }
        if (prov.has("xi") && prov.has("eta")) {
            auto xi = prov.value("xi", p);
            auto eta = prov.value("eta", p);
            double pairing = 0.0;
            for (int i = 0; i < spec.dim; ++i) pairing += eta.at({i}) * xi.at({i});
            if (std::abs(pairing - 1.0) > 1e-9)
                throw SpecError("eta(xi) != 1 at a sample point (got " + std::to_string(pairing) + ")");
        }
    }
}

}  // namespace detail

inline ManifoldSpec load_spec(const nlohmann::json& doc) {
    ManifoldSpec spec;
    if (!doc.contains("dim") || !doc["dim"].is_number_integer())
        throw SpecError("missing integer 'dim'");
    spec.dim = doc["dim"].get<int>();
    if (spec.dim < 1 || spec.dim > 16) throw SpecError("dim out of range [1,16]");
    spec.name = doc.value("name", std::string("spec"));

    const std::string backend = doc.value("backend", std::string("chart"));
    if (backend == "chart") spec.backend = ManifoldSpec::Backend::chart;
    else if (backend == "embedded") spec.backend = ManifoldSpec::Backend::embedded;
    else throw SpecError("backend must be 'chart' or 'embedded'");

    if (!doc.contains("domain")) throw SpecError("missing 'domain'");
    for (const auto& iv : doc["domain"]) {
        if (!iv.is_array() || iv.size() != 2) throw SpecError("domain entries must be [lo,hi]");
        double lo = iv[0].get<double>(), hi = iv[1].get<double>();
        if (!(lo < hi)) throw SpecError("domain interval must satisfy lo < hi");
        spec.domain.push_back({lo, hi});
    }
    if (static_cast<int>(spec.domain.size()) != spec.dim)
        throw SpecError("domain must have one interval per coordinate");

    const int n = spec.dim;
    if (doc.contains("fields")) {
        const auto& f = doc["fields"];
        for (const auto& [key, val] : f.items()) {
            if (key == "G" || key == "g" || key == "F" || key == "A" || key == "Q")
                spec.fields[key] = detail::parse_matrix(val, n, n, n, "fields." + key);
            else if (key == "xi" || key == "eta")
                spec.fields[key] = detail::parse_vector(val, n, n, "fields." + key);
            else
                throw SpecError("unknown field '" + key + "'");
        }
    }

    if (spec.backend == ManifoldSpec::Backend::embedded) {
        if (!doc.contains("embedding")) throw SpecError("embedded backend requires 'embedding'");
        const auto& emb = doc["embedding"];
        spec.ambient_dim = emb.value("ambient_dim", 0);
        if (spec.ambient_dim < spec.dim) throw SpecError("ambient_dim must be >= dim");
        spec.embedding = detail::parse_vector(emb["map"], spec.ambient_dim, n, "embedding.map");
        spec.ambient_A = detail::parse_matrix(emb["A_ambient"], spec.ambient_dim, spec.ambient_dim,
                                              spec.ambient_dim, "embedding.A_ambient");
    } else {
        if (!spec.fields.count("G") && !spec.fields.count("g"))
            throw SpecError("chart backend requires field G or g (optionally with F)");
    }

    detail::spot_check(spec);
    return spec;
}

inline nlohmann::json spec_to_json(const ManifoldSpec& spec) {
    nlohmann::json doc;
    doc["name"] = spec.name;
    doc["dim"] = spec.dim;
    doc["backend"] = spec.backend == ManifoldSpec::Backend::chart ? "chart" : "embedded";
    doc["domain"] = nlohmann::json::array();
    for (const auto& iv : spec.domain) doc["domain"].push_back({iv[0], iv[1]});
    nlohmann::json f = nlohmann::json::object();
    const int n = spec.dim;
    for (const auto& [key, exprs] : spec.fields) {
        if (key == "xi" || key == "eta") {
            nlohmann::json v = nlohmann::json::array();
            for (const auto& e : exprs) v.push_back(print_expr(e));
            f[key] = v;
        } else {
            nlohmann::json mat = nlohmann::json::array();
            for (int i = 0; i < n; ++i) {
                nlohmann::json row = nlohmann::json::array();
                for (int j = 0; j < n; ++j)
                    row.push_back(print_expr(exprs[static_cast<std::size_t>(i) * n + j]));
                mat.push_back(row);
            }
            f[key] = mat;
        }
    }
    doc["fields"] = f;
    if (spec.backend == ManifoldSpec::Backend::embedded) {
        nlohmann::json emb;
        emb["ambient_dim"] = spec.ambient_dim;
        nlohmann::json mp = nlohmann::json::array();
        for (const auto& e : spec.embedding) mp.push_back(print_expr(e));
        emb["map"] = mp;
        const int m = spec.ambient_dim;
        nlohmann::json mat = nlohmann::json::array();
        for (int a = 0; a < m; ++a) {
            nlohmann::json row = nlohmann::json::array();
            for (int b = 0; b < m; ++b)
                row.push_back(print_expr(spec.ambient_A[static_cast<std::size_t>(a) * m + b]));
            mat.push_back(row);
        }
        emb["A_ambient"] = mat;
        doc["embedding"] = emb;
    }
    return doc;
}

}  // namespace grm
