// Weak metric structures: axiom checks for the four structure kinds, the
// A-Q-basis construction, spectral eigen-splitting of Q with Lagrange
// projectors, and the contact-geometry tensors N^(5), N^wac, d(eta).

#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "grm/geometry.hpp"

namespace grm {

struct StructureError : std::runtime_error {
    explicit StructureError(const std::string& msg) : std::runtime_error(msg) {}
};

// --- symmetric eigen machinery ----------------------------------------------

namespace detail {

// Cholesky g = L L^T; throws if g is not positive definite.
inline std::vector<double> cholesky(const std::vector<double>& g, int n) {
    std::vector<double> L(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = g[static_cast<std::size_t>(i) * n + j];
            for (int k = 0; k < j; ++k)
                s -= L[static_cast<std::size_t>(i) * n + k] * L[static_cast<std::size_t>(j) * n + k];
            if (i == j) {
                if (s <= 0.0) throw StructureError("metric is not positive definite");
                L[static_cast<std::size_t>(i) * n + j] = std::sqrt(s);
            } else {
                L[static_cast<std::size_t>(i) * n + j] = s / L[static_cast<std::size_t>(j) * n + j];
            }
        }
    }
    return L;
}

// Cyclic Jacobi on a symmetric matrix; returns ascending eigenvalues and the
// matching orthonormal eigenvector columns V (so S V = V diag(w)).
inline void jacobi_eigen(std::vector<double> S, int n, std::vector<double>& w,
                         std::vector<double>& V) {
    V.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) V[static_cast<std::size_t>(i) * n + i] = 1.0;
    auto at = [&](std::vector<double>& M, int i, int j) -> double& {
        return M[static_cast<std::size_t>(i) * n + j];
    };
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off = std::max(off, std::abs(at(S, p, q)));
        if (off < 1e-14) break;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                const double apq = at(S, p, q);
                if (std::abs(apq) < 1e-300) continue;
                const double theta = (at(S, q, q) - at(S, p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double skp = at(S, k, p), skq = at(S, k, q);
                    at(S, k, p) = c * skp - s * skq;
                    at(S, k, q) = s * skp + c * skq;
                }
                for (int k = 0; k < n; ++k) {
                    const double spk = at(S, p, k), sqk = at(S, q, k);
                    at(S, p, k) = c * spk - s * sqk;
                    at(S, q, k) = s * spk + c * sqk;
                    const double vkp = at(V, k, p), vkq = at(V, k, q);
                    at(V, k, p) = c * vkp - s * vkq;
                    at(V, k, q) = s * vkp + c * vkq;
                }
            }
    }
    w.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) w[static_cast<std::size_t>(i)] = at(S, i, i);
    // sort ascending, carrying eigenvector columns along (stable)
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return w[static_cast<std::size_t>(a)] < w[static_cast<std::size_t>(b)];
    });
    std::vector<double> w2(static_cast<std::size_t>(n));
    std::vector<double> V2(V.size());
    for (int c = 0; c < n; ++c) {
        w2[static_cast<std::size_t>(c)] = w[static_cast<std::size_t>(order[static_cast<std::size_t>(c)])];
        for (int r = 0; r < n; ++r)
            V2[static_cast<std::size_t>(r) * n + c] =
                V[static_cast<std::size_t>(r) * n + order[static_cast<std::size_t>(c)]];
    }
    w = std::move(w2);
    V = std::move(V2);
}

// Conjugate an endomorphism into the g-orthonormal frame: M_w = L^T M L^{-T}.
inline std::vector<double> conjugate_to_orthonormal(const std::vector<double>& M,
                                                    const std::vector<double>& L, int n) {
    // B = M L^{-T}: solve B L^T = M column-wise via back-substitution on rows
    std::vector<double> B(static_cast<std::size_t>(n) * n, 0.0);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            double s = M[static_cast<std::size_t>(r) * n + c];
            for (int k = 0; k < c; ++k)
                s -= B[static_cast<std::size_t>(r) * n + k] * L[static_cast<std::size_t>(c) * n + k];
            B[static_cast<std::size_t>(r) * n + c] = s / L[static_cast<std::size_t>(c) * n + c];
        }
    std::vector<double> out(static_cast<std::size_t>(n) * n, 0.0);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            double s = 0.0;
            for (int k = r; k < n; ++k)
                s += L[static_cast<std::size_t>(k) * n + r] * B[static_cast<std::size_t>(k) * n + c];
            out[static_cast<std::size_t>(r) * n + c] = s;
        }
    return out;
}

// chart components of a w-frame vector: v = L^{-T} w (back substitution)
inline std::vector<double> from_orthonormal(const std::vector<double>& L,
                                            const std::vector<double>& w, int n) {
    std::vector<double> v(static_cast<std::size_t>(n), 0.0);
    for (int i = n - 1; i >= 0; --i) {
        double s = w[static_cast<std::size_t>(i)];
        for (int k = i + 1; k < n; ++k)
            s -= L[static_cast<std::size_t>(k) * n + i] * v[static_cast<std::size_t>(k)];
        v[static_cast<std::size_t>(i)] = s / L[static_cast<std::size_t>(i) * n + i];
    }
    return v;
}

}  // namespace detail

// Eigenvalues (ascending) of a g-self-adjoint endomorphism field at a point.
inline std::vector<double> q_eigenvalues(const FieldProvider& P, const std::vector<double>& x) {
    const int n = P.dim();
    auto g = P.components("g", x);
    auto Q = P.components("Q", x);
    std::vector<double> w, V;
    try {
        auto L = detail::cholesky(g, n);
        detail::jacobi_eigen(detail::conjugate_to_orthonormal(Q, L, n), n, w, V);
    } catch (const StructureError&) {
        // indefinite metric (para kinds): fall back to the plain symmetric part
        std::vector<double> S(Q.size());
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                S[static_cast<std::size_t>(i) * n + j] =
                    0.5 * (Q[static_cast<std::size_t>(i) * n + j] +
                           Q[static_cast<std::size_t>(j) * n + i]);
        detail::jacobi_eigen(S, n, w, V);
    }
    return w;
}

// --- axiom checks -----------------------------------------------------------

enum class StructureKind { weak_hermitian, weak_acm, weak_para_hermitian, weak_para_contact };

struct AxiomReport {
    std::map<std::string, double> residuals;
    double q_min_eigenvalue = 0.0;

    double max_residual() const {
        double m = 0.0;
        for (const auto& [k, v] : residuals) m = std::max(m, v);
        return m;
    }
};

inline AxiomReport check_axioms(const FieldProvider& P, StructureKind kind,
                                const std::vector<double>& x) {
    const bool contact = kind == StructureKind::weak_acm || kind == StructureKind::weak_para_contact;
    const bool para =
        kind == StructureKind::weak_para_hermitian || kind == StructureKind::weak_para_contact;
    if (!P.has("Q")) throw StructureError("axiom check requires field Q");
    if (contact && (!P.has("xi") || !P.has("eta")))
        throw StructureError("contact axiom check requires fields xi and eta");

    const int n = P.dim();
    auto g = P.value("g", x);
    auto F = P.value("F", x);
    auto A = P.value("A", x);
    auto Q = P.value("Q", x);
    TensorValue xi, eta;
    if (contact) {
        xi = P.value("xi", x);
        eta = P.value("eta", x);
    }
    // A^2 = -Q + eta (x) xi   (Hermitian: A^2 = -Q; para kinds flip the sign of Q)
    const double sq = para ? 1.0 : -1.0;
    AxiomReport rep;
    double r = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double a2 = 0.0;
            for (int k = 0; k < n; ++k) a2 += A.at({i, k}) * A.at({k, j});
            double want = sq * Q.at({i, j});
            if (contact) want -= sq * eta.at({j}) * xi.at({i});
            r = std::max(r, std::abs(a2 - want));
        }
    rep.residuals["A2_Q"] = r;

    // g(AX, AY) = +-g(QX, Y) (- eta eta in the contact kinds)
    r = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double gaa = 0.0, gq = 0.0;
            for (int p = 0; p < n; ++p) {
                for (int q = 0; q < n; ++q) gaa += A.at({p, i}) * g.at({p, q}) * A.at({q, j});
                gq += g.at({p, j}) * Q.at({p, i});
            }
            double want = -sq * gq;
            if (contact) want += sq * eta.at({i}) * eta.at({j});
            r = std::max(r, std::abs(gaa - want));
        }
    rep.residuals["gA_gQ"] = r;

    // F(X,Y) = g(AX,Y)
    r = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double gA = 0.0;
            for (int k = 0; k < n; ++k) gA += A.at({k, i}) * g.at({k, j});
            r = std::max(r, std::abs(F.at({i, j}) - gA));
        }
    rep.residuals["F_gA"] = r;

    // Q self-adjoint: gQ symmetric
    r = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double qij = 0.0, qji = 0.0;
            for (int k = 0; k < n; ++k) {
                qij += g.at({i, k}) * Q.at({k, j});
                qji += g.at({j, k}) * Q.at({k, i});
            }
            r = std::max(r, std::abs(qij - qji));
        }
    rep.residuals["Q_selfadjoint"] = r;

    // [A, Q] = 0
    r = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double aq = 0.0, qa = 0.0;
            for (int k = 0; k < n; ++k) {
                aq += A.at({i, k}) * Q.at({k, j});
                qa += Q.at({i, k}) * A.at({k, j});
            }
            r = std::max(r, std::abs(aq - qa));
        }
    rep.residuals["AQ_commute"] = r;

    if (contact) {
        double raxi = 0.0, rqxi = 0.0, rpair = 0.0, rdual = 0.0;
        for (int i = 0; i < n; ++i) {
            double axi = 0.0, qxi = 0.0, gxi = 0.0;
            for (int k = 0; k < n; ++k) {
                axi += A.at({i, k}) * xi.at({k});
                qxi += Q.at({i, k}) * xi.at({k});
                gxi += g.at({i, k}) * xi.at({k});
            }
            raxi = std::max(raxi, std::abs(axi));
            rqxi = std::max(rqxi, std::abs(qxi - xi.at({i})));
            rdual = std::max(rdual, std::abs(gxi - eta.at({i})));
        }
        double pair = 0.0;
        for (int i = 0; i < n; ++i) pair += eta.at({i}) * xi.at({i});
        rpair = std::abs(pair - 1.0);
        rep.residuals["A_xi"] = raxi;
        rep.residuals["Q_xi"] = rqxi;
        rep.residuals["eta_xi"] = rpair;
        rep.residuals["eta_dual"] = rdual;
    }

    auto w = q_eigenvalues(P, x);
    rep.q_min_eigenvalue = w.empty() ? 0.0 : w.front();
    return rep;
}

// --- nearly Kahler / nearly cosymplectic residuals --------------------------

// sup | g((nabla^g_X A)Y + (nabla^g_Y A)X, Z) | over the coordinate frame
inline double nearly_kahler_residual(const FieldProvider& P, const std::vector<double>& x) {
    const int n = P.dim();
    auto LC = levi_civita(P);
    auto nA = covariant_derivative(P, *LC, "A", x);  // slots (k, arg j, direction m)
    auto g = P.value("g", x);
    double r = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int l = 0; l < n; ++l) {
                double s = 0.0;
                for (int k = 0; k < n; ++k)
                    s += (nA.at({k, j, i}) + nA.at({k, i, j})) * g.at({k, l});
                r = std::max(r, std::abs(s));
            }
    return r;
}

// residual of g((nabla^g_X A)Y, Z) + 1/3 dF(AX, AY, Z)
//             - 1/6 eta(Z) d\eta(Y, AX) + 1/2 eta(Y) d\eta(AZ, X)
inline double anc_residual(const FieldProvider& P, const std::vector<double>& x) {
    if (!P.has("xi") || !P.has("eta"))
        throw StructureError("almost-nearly cosymplectic residual requires xi and eta");
    const int n = P.dim();
    auto LC = levi_civita(P);
    auto nA = covariant_derivative(P, *LC, "A", x);
    auto g = P.value("g", x);
    auto A = P.value("A", x);
    auto eta = P.value("eta", x);
    auto dF = exterior_derivative_F(P, x);
    auto de = exterior_derivative_eta(P, x);
    double r = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int l = 0; l < n; ++l) {
                double lhs = 0.0;
                for (int k = 0; k < n; ++k) lhs += nA.at({k, j, i}) * g.at({k, l});
                double dfaa = 0.0;
                for (int p = 0; p < n; ++p)
                    for (int q = 0; q < n; ++q)
                        dfaa += A.at({p, i}) * A.at({q, j}) * dF.at({p, q, l});
                double dyax = 0.0, dazx = 0.0;
                for (int p = 0; p < n; ++p) {
                    dyax += de.at({j, p}) * A.at({p, i});
                    dazx += A.at({p, l}) * de.at({p, i});
                }
                const double res = lhs + dfaa / 3.0 - eta.at({l}) * dyax / 6.0 +
                                   eta.at({j}) * dazx / 2.0;
                r = std::max(r, std::abs(res));
            }
    return r;
}

// --- special contact tensors ------------------------------------------------

struct SpecialTensors {
    TensorValue N5;    // (0,3)
    TensorValue Nwac;  // (0,3)
    TensorValue deta;  // (0,2)
};

inline SpecialTensors special_tensors(const FieldProvider& P, const std::vector<double>& x) {
    if (!P.has("Q") || !P.has("eta"))
        throw StructureError("special tensors require fields Q and eta");
    const int n = P.dim();
    auto Aj = P.jet("A", x);
    auto gj = P.jet("g", x);
    auto Qj = P.jet("Q", x);
    auto eta = P.value("eta", x);
    auto de = exterior_derivative_eta(P, x);

    // M_ij = g(e_i, Qt e_j), Qt = Q - Id, with first partials
    std::vector<double> M(static_cast<std::size_t>(n) * n, 0.0);
    std::vector<double> dM(static_cast<std::size_t>(n) * n * n, 0.0);  // [ (i*n+j)*n + m ]
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double acc = -gj.value.at({i, j});
            for (int s = 0; s < n; ++s) acc += gj.value.at({i, s}) * Qj.value.at({s, j});
            M[static_cast<std::size_t>(i) * n + j] = acc;
            for (int m = 0; m < n; ++m) {
                double d = -gj.d1[(static_cast<std::size_t>(i) * n + j) * n + m];
                for (int s = 0; s < n; ++s)
                    d += gj.d1[(static_cast<std::size_t>(i) * n + s) * n + m] * Qj.value.at({s, j}) +
                         gj.value.at({i, s}) * Qj.d1[(static_cast<std::size_t>(s) * n + j) * n + m];
                dM[(static_cast<std::size_t>(i) * n + j) * n + m] = d;
            }
        }
    auto a = [&](int k, int i) { return Aj.value.at({k, i}); };
    auto da = [&](int m, int k, int i) {
        return Aj.d1[(static_cast<std::size_t>(k) * n + i) * n + m];
    };
    auto m_at = [&](int i, int j) { return M[static_cast<std::size_t>(i) * n + j]; };
    auto dm = [&](int m, int i, int j) {
        return dM[(static_cast<std::size_t>(i) * n + j) * n + m];
    };

    SpecialTensors out{TensorValue(n, 0, 3), TensorValue(n, 0, 3), de};
    // N5 on the coordinate frame X=e_i, Y=e_j, Z=e_k:
    //   (A e_k)(M_ij) - (A e_j)(M_ik)
    //   + d_i A^s_k M_sj - d_i A^s_j M_sk + (d_j A^s_k - d_k A^s_j) M_si
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                double acc = 0.0;
                for (int s = 0; s < n; ++s) {
                    acc += a(s, k) * dm(s, i, j) - a(s, j) * dm(s, i, k);
                    acc += da(i, s, k) * m_at(s, j) - da(i, s, j) * m_at(s, k);
                    acc += (da(j, s, k) - da(k, s, j)) * m_at(s, i);
                }
                out.N5.at({i, j, k}) = acc;
            }

    // N^wac = N_A (lowered with g) + d(eta) (x) eta
    auto N = nijenhuis(P, x);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                double low = 0.0;
                for (int s = 0; s < n; ++s) low += N.at({s, i, j}) * gj.value.at({s, k});
                out.Nwac.at({i, j, k}) = low + de.at({i, j}) * eta.at({k});
            }
    return out;
}

// --- A-Q-basis (block diagonalization) --------------------------------------

struct AQBasis {
    std::vector<double> point;
    int pairs = 0;   // m
    int kernel = 0;  // s
    // chart components; columns ordered e_1, Ae_1/|Ae_1|, ..., e_m, Ae_m/|Ae_m|,
    // then the kernel vectors. columns[c] is the c-th basis vector.
    std::vector<std::vector<double>> columns;
    std::vector<double> q_eigen;  // per column, the Q eigenvalue it belongs to
};

inline AQBasis aq_basis(const FieldProvider& P, const std::vector<double>& x) {
    const int n = P.dim();
    auto g = P.components("g", x);
    auto A = P.components("A", x);
    auto Q = P.components("Q", x);

    // preconditions: [A,Q] = 0 and Q self-adjoint positive
    double comm = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double aq = 0.0, qa = 0.0;
            for (int k = 0; k < n; ++k) {
                aq += A[static_cast<std::size_t>(i) * n + k] * Q[static_cast<std::size_t>(k) * n + j];
                qa += Q[static_cast<std::size_t>(i) * n + k] * A[static_cast<std::size_t>(k) * n + j];
            }
            comm = std::max(comm, std::abs(aq - qa));
        }
    if (comm > 1e-8)
        throw StructureError("A and Q do not commute (residual " + std::to_string(comm) + ")");

    auto L = detail::cholesky(g, n);  // throws if g is not positive definite
    auto Qw = detail::conjugate_to_orthonormal(Q, L, n);
    auto Aw = detail::conjugate_to_orthonormal(A, L, n);
    std::vector<double> w, V;
    detail::jacobi_eigen(Qw, n, w, V);
    if (w.front() <= 0.0) throw StructureError("Q is not positive definite");

    auto apply = [&](const std::vector<double>& M, const std::vector<double>& v) {
        std::vector<double> r(static_cast<std::size_t>(n), 0.0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                r[static_cast<std::size_t>(i)] +=
                    M[static_cast<std::size_t>(i) * n + j] * v[static_cast<std::size_t>(j)];
        return r;
    };
    auto dot = [&](const std::vector<double>& u, const std::vector<double>& v) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += u[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i)];
        return s;
    };
    auto norm = [&](const std::vector<double>& u) { return std::sqrt(dot(u, u)); };

    // C = -A^2 is symmetric positive semidefinite and commutes with Q; pairing
    // happens inside the joint eigenspaces of (Q, C), where A acts exactly as
    // s J on the non-kernel part (s^2 the C-eigenvalue).
    std::vector<double> C(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int k = 0; k < n; ++k)
                s -= Aw[static_cast<std::size_t>(i) * n + k] * Aw[static_cast<std::size_t>(k) * n + j];
            C[static_cast<std::size_t>(i) * n + j] = s;
        }

    AQBasis out;
    out.point = x;
    std::vector<std::pair<std::vector<double>, double>> pair_cols;  // (w-vector, lambda)
    std::vector<std::pair<std::vector<double>, double>> kernel_cols;

    int lo = 0;
    while (lo < n) {
        int hi = lo + 1;
        while (hi < n && std::abs(w[static_cast<std::size_t>(hi)] - w[static_cast<std::size_t>(lo)]) < 1e-7)
            ++hi;
        const double lambda = w[static_cast<std::size_t>(lo)];
        const int k = hi - lo;
        // restrict C to this eigenspace and diagonalize the restriction
        std::vector<std::vector<double>> qbasis;
        for (int c = lo; c < hi; ++c) {
            std::vector<double> v(static_cast<std::size_t>(n));
            for (int r = 0; r < n; ++r) v[static_cast<std::size_t>(r)] = V[static_cast<std::size_t>(r) * n + c];
            qbasis.push_back(std::move(v));
        }
        std::vector<double> Cr(static_cast<std::size_t>(k) * k, 0.0);
        double leak = 0.0;
        for (int c = 0; c < k; ++c) {
            auto cv = apply(C, qbasis[static_cast<std::size_t>(c)]);
            double inside = 0.0;
            for (int r = 0; r < k; ++r) {
                const double coef = dot(qbasis[static_cast<std::size_t>(r)], cv);
                Cr[static_cast<std::size_t>(r) * k + c] = coef;
                inside += coef * coef;
            }
            leak = std::max(leak, std::sqrt(std::max(0.0, dot(cv, cv) - inside)));
        }
        if (leak > 1e-7)
            throw StructureError("eigenspace of eigenvalue " + std::to_string(lambda) +
                                 " is not A-invariant (residual " + std::to_string(leak) + ")");
        std::vector<double> s2, W;
        detail::jacobi_eigen(Cr, k, s2, W);
        // joint-eigenspace basis vectors, grouped by the C-eigenvalue s^2
        int clo = 0;
        while (clo < k) {
            int chi = clo + 1;
            while (chi < k && std::abs(s2[static_cast<std::size_t>(chi)] - s2[static_cast<std::size_t>(clo)]) < 1e-8)
                ++chi;
            const double ssq = std::max(0.0, s2[static_cast<std::size_t>(clo)]);
            std::vector<std::vector<double>> basis;
            for (int c = clo; c < chi; ++c) {
                std::vector<double> v(static_cast<std::size_t>(n), 0.0);
                for (int r = 0; r < k; ++r)
                    for (int i = 0; i < n; ++i)
                        v[static_cast<std::size_t>(i)] +=
                            qbasis[static_cast<std::size_t>(r)][static_cast<std::size_t>(i)] *
                            W[static_cast<std::size_t>(r) * k + c];
                basis.push_back(std::move(v));
            }
            if (ssq < 1e-12) {
                for (auto& v : basis) kernel_cols.emplace_back(std::move(v), lambda);
                clo = chi;
                continue;
            }
            const double s = std::sqrt(ssq);
            while (!basis.empty()) {
                // within the joint eigenspace |A e| = s for every unit vector,
                // so the greedy choice reduces to the lowest-index one
                std::vector<double> e = basis.front();
                std::vector<double> u = apply(Aw, e);
                for (double& c2 : u) c2 /= s;
                pair_cols.emplace_back(e, lambda);
                pair_cols.emplace_back(u, lambda);
                std::vector<std::vector<double>> next;
                for (std::size_t c = 1; c < basis.size(); ++c) {
                    auto v = basis[c];
                    const double pe = dot(v, e), pu = dot(v, u);
                    for (int i = 0; i < n; ++i)
                        v[static_cast<std::size_t>(i)] -= pe * e[static_cast<std::size_t>(i)] +
                                                          pu * u[static_cast<std::size_t>(i)];
                    for (const auto& prev : next) {
                        const double pv = dot(v, prev);
                        for (int i = 0; i < n; ++i)
                            v[static_cast<std::size_t>(i)] -= pv * prev[static_cast<std::size_t>(i)];
                    }
                    const double nv = norm(v);
                    if (nv > 1e-8) {
                        for (double& c2 : v) c2 /= nv;
                        next.push_back(std::move(v));
                    }
                }
                basis = std::move(next);
            }
            clo = chi;
        }
        lo = hi;
    }

    out.pairs = static_cast<int>(pair_cols.size() / 2);
    out.kernel = static_cast<int>(kernel_cols.size());
    for (const auto& [v, lambda] : pair_cols) {
        out.columns.push_back(detail::from_orthonormal(L, v, n));
        out.q_eigen.push_back(lambda);
    }
    for (const auto& [v, lambda] : kernel_cols) {
        out.columns.push_back(detail::from_orthonormal(L, v, n));
        out.q_eigen.push_back(lambda);
    }
    return out;
}

// --- spectral split of Q across sample points -------------------------------

struct SpectralSplit {
    std::vector<double> eigenvalues;  // ascending, distinct
    std::vector<int> multiplicities;
    int dim = 0;
};

inline SpectralSplit spectral_split(const FieldProvider& P,
                                    const std::vector<std::vector<double>>& pts) {
    if (pts.empty()) throw StructureError("spectral split needs at least one sample point");
    SpectralSplit split;
    split.dim = P.dim();
    bool first = true;
    for (const auto& x : pts) {
        auto w = q_eigenvalues(P, x);
        // cluster this point's spectrum
        std::vector<double> vals;
        std::vector<int> mult;
        for (double v : w) {
            if (!vals.empty() && std::abs(v - vals.back()) < 1e-6) {
                ++mult.back();
                continue;
            }
            vals.push_back(v);
            mult.push_back(1);
        }
        if (first) {
            split.eigenvalues = vals;
            split.multiplicities = mult;
            first = false;
            continue;
        }
        if (vals.size() != split.eigenvalues.size() || mult != split.multiplicities)
            throw StructureError("eigenvalue structure of Q varies across sample points");
        for (std::size_t i = 0; i < vals.size(); ++i) {
            const double spread = std::abs(vals[i] - split.eigenvalues[i]);
            if (spread > 1e-7)
                throw StructureError("eigenvalue " + std::to_string(split.eigenvalues[i]) +
                                     " of Q drifts across sample points (spread " +
                                     std::to_string(spread) + ")");
        }
    }
    for (std::size_t i = 0; i + 1 < split.eigenvalues.size(); ++i)
        if (split.eigenvalues[i + 1] - split.eigenvalues[i] < 1e-4)
            throw StructureError("eigenvalue gap too small for stable projectors");
    return split;
}

namespace detail {

// P_i(Q) = prod_{j != i} (Q - lambda_j Id) / (lambda_i - lambda_j), over duals
template <class D>
std::vector<D> lagrange_projector(const SpectralSplit& split, int which,
                                  const std::vector<D>& Q, int n) {
    std::vector<D> acc(static_cast<std::size_t>(n) * n, zero_like(Q[0]));
    for (int i = 0; i < n; ++i) acc[static_cast<std::size_t>(i) * n + i] = constant_like(Q[0], 1.0);
    for (std::size_t j = 0; j < split.eigenvalues.size(); ++j) {
        if (static_cast<int>(j) == which) continue;
        const double denom = split.eigenvalues[static_cast<std::size_t>(which)] - split.eigenvalues[j];
        std::vector<D> term = Q;
        for (int d = 0; d < n; ++d)
            term[static_cast<std::size_t>(d) * n + d] =
                term[static_cast<std::size_t>(d) * n + d] - split.eigenvalues[j];
        std::vector<D> next(acc.size(), zero_like(Q[0]));
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) {
                D s = zero_like(Q[0]);
                for (int k = 0; k < n; ++k)
                    s = s + acc[static_cast<std::size_t>(r) * n + k] *
                            term[static_cast<std::size_t>(k) * n + c];
                next[static_cast<std::size_t>(r) * n + c] = s * (1.0 / denom);
            }
        acc = std::move(next);
    }
    return acc;
}

}  // namespace detail

inline TensorValue spectral_projector(const SpectralSplit& split, int which,
                                      const FieldProvider& P, const std::vector<double>& x) {
    auto Q = P.components("Q", x);
    return TensorValue(P.dim(), 1, 1, detail::lagrange_projector(split, which, Q, P.dim()));
}

struct InvolutivityResidual {
    double involutivity = 0.0;     // bracket component outside the distribution
    double totally_geodesic = 0.0; // nabla^g component outside the distribution
};

inline std::vector<InvolutivityResidual> involutivity_residual(const SpectralSplit& split,
                                                               const FieldProvider& P,
                                                               const std::vector<double>& x) {
    const int n = P.dim();
    auto gamma = levi_civita_gamma(P, x);
    std::vector<InvolutivityResidual> out;
    for (int which = 0; which < static_cast<int>(split.eigenvalues.size()); ++which) {
        // projector with partials: evaluate the polynomial over seeded duals
        std::vector<D1> xs(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            xs[i].a = x[i];
            xs[i].b.assign(x.size(), 0.0);
            xs[i].b[i] = 1.0;
        }
        auto Qd = P.components("Q", xs);
        auto Pd = detail::lagrange_projector(split, which, Qd, n);
        auto p = [&](int k, int a) { return Pd[static_cast<std::size_t>(k) * n + a].a; };
        auto dp = [&](int m, int k, int a) {
            return Pd[static_cast<std::size_t>(k) * n + a].b[static_cast<std::size_t>(m)];
        };
        auto gam = [&](int k, int i, int j) {
            return gamma[(static_cast<std::size_t>(k) * n + i) * n + j];
        };
        InvolutivityResidual res;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                std::vector<double> br(static_cast<std::size_t>(n), 0.0);
                std::vector<double> cd(static_cast<std::size_t>(n), 0.0);
                for (int k = 0; k < n; ++k) {
                    double acc = 0.0, cacc = 0.0;
                    for (int m = 0; m < n; ++m) {
                        acc += p(m, a) * dp(m, k, b) - p(m, b) * dp(m, k, a);
                        double cov = dp(m, k, b);
                        for (int s = 0; s < n; ++s) cov += gam(k, m, s) * p(s, b);
                        cacc += p(m, a) * cov;
                    }
                    br[static_cast<std::size_t>(k)] = acc;
                    cd[static_cast<std::size_t>(k)] = cacc;
                }
                // component outside the distribution: (Id - P_i) v
                for (int k = 0; k < n; ++k) {
                    double vb = br[static_cast<std::size_t>(k)], vc = cd[static_cast<std::size_t>(k)];
                    for (int s = 0; s < n; ++s) {
                        vb -= p(k, s) * br[static_cast<std::size_t>(s)];
                        vc -= p(k, s) * cd[static_cast<std::size_t>(s)];
                    }
                    res.involutivity = std::max(res.involutivity, std::abs(vb));
                    res.totally_geodesic = std::max(res.totally_geodesic, std::abs(vc));
                }
            }
        out.push_back(res);
    }
    return out;
}

}  // namespace grm
