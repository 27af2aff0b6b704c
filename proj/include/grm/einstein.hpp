// Connections compatible with the combined metric G = g + F:
//   - the canonical one with torsion proportional to dF, defined by
//       g(nabla_X Y, Z) = g(nabla^g_X Y, Z)
//                         + 1/6 [dF(AX,Y,Z) - dF(X,Y,Z) - dF(X,AY,Z)]
//   - the general family parameterized by a prescribed lowered torsion T:
//       g(nabla_X Y, Z) = g(nabla^g_X Y, Z)
//                         + 1/2 [T(X,Y,Z) - T(X,Z,AY) - T(Y,Z,AX)]

#pragma once

#include <memory>
#include <vector>

#include "grm/geometry.hpp"

namespace grm {

template <class D>
std::vector<D> einstein_gamma(const FieldProvider& P, const std::vector<D>& x) {
    const int n = static_cast<int>(x.size());
    auto base = levi_civita_gamma(P, x);
    auto g = P.components("g", x);
    auto A = P.components("A", x);
    auto dF = dF_components(P, x);
    auto gi = detail::invert_flat_dual(g, n);
    auto a = [&](int k, int i) -> const D& { return A[static_cast<std::size_t>(k) * n + i]; };
    auto df = [&](int i, int j, int k) -> const D& {
        return dF[(static_cast<std::size_t>(i) * n + j) * n + k];
    };
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                D acc = zero_like(x[0]);
                for (int l = 0; l < n; ++l) {
                    D low = zero_like(x[0]);
                    for (int s = 0; s < n; ++s)
                        low = low + a(s, i) * df(s, j, l) - a(s, j) * df(i, s, l);
                    low = low - df(i, j, l);
                    acc = acc + gi[static_cast<std::size_t>(k) * n + l] * low;
                }
                auto& slot = base[(static_cast<std::size_t>(k) * n + i) * n + j];
                slot = slot + acc * (1.0 / 6.0);
            }
    return base;
}

inline std::shared_ptr<ConnectionField> einstein_connection(const FieldProvider& P) {
    return make_connection(P.dim(), [P](const auto& x) { return einstein_gamma(P, x); });
}

// Connection with the prescribed lowered torsion t_low, a callable returning
// the flattened (0,3) components T_{ijk} = g(T(e_i,e_j), e_k) over any dual
// level. The resulting connection satisfies the metricity condition for G
// whenever T does the required compatibility (checked in the test suite, not
// assumed here).
template <class Fn>
std::shared_ptr<ConnectionField> general_emc_connection(const FieldProvider& P, Fn t_low) {
    return make_connection(P.dim(), [P, t_low](const auto& x) {
        using D = std::decay_t<decltype(x[0])>;
        const int n = static_cast<int>(x.size());
        auto base = levi_civita_gamma(P, x);
        auto g = P.components("g", x);
        auto A = P.components("A", x);
        std::vector<D> T = t_low(x);
        auto gi = detail::invert_flat_dual(g, n);
        auto a = [&](int k, int i) -> const D& { return A[static_cast<std::size_t>(k) * n + i]; };
        auto t = [&](int i, int j, int k) -> const D& {
            return T[(static_cast<std::size_t>(i) * n + j) * n + k];
        };
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    D acc = zero_like(x[0]);
                    for (int l = 0; l < n; ++l) {
                        D low = t(i, j, l);
                        for (int s = 0; s < n; ++s)
                            low = low - t(i, l, s) * a(s, j) - t(j, l, s) * a(s, i);
                        acc = acc + gi[static_cast<std::size_t>(k) * n + l] * low;
                    }
                    auto& slot = base[(static_cast<std::size_t>(k) * n + i) * n + j];
                    slot = slot + acc * 0.5;
                }
        return base;
    });
}

// The lowered torsion of the canonical connection above: -1/3 dF.
inline auto canonical_torsion_low(const FieldProvider& P) {
    return [P](const auto& x) {
        auto dF = dF_components(P, x);
        for (auto& c : dF) c = c * (-1.0 / 3.0);
        return dF;
    };
}

// Difference to the Levi-Civita connection as a (1,2) tensor.
inline TensorValue contorsion(const FieldProvider& P, const ConnectionField& C,
                              const std::vector<double>& x) {
    const int n = P.dim();
    auto G = C.gamma(x);
    auto B = levi_civita_gamma(P, x);
    TensorValue K(n, 1, 2);
    for (std::size_t c = 0; c < G.size(); ++c) K.comps()[c] = G[c] - B[c];
    return K;
}

// Pointwise metricity residual of a connection with respect to the combined
// metric: d_m G_ij - gamma^p_{im} G_pj - gamma^p_{mj} G_ip, as a (0,3) tensor
// indexed (i, j, m).
inline TensorValue metricity_residual(const FieldProvider& P, const ConnectionField& C,
                                      const std::vector<double>& x) {
    const int n = P.dim();
    auto Gj = P.jet("G", x);
    auto gam = C.gamma(x);
    auto gm = [&](int k, int i, int j) {
        return gam[(static_cast<std::size_t>(k) * n + i) * n + j];
    };
    TensorValue out(n, 0, 3);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int m = 0; m < n; ++m) {
                double acc = Gj.d1[(static_cast<std::size_t>(i) * n + j) * n + m];
                for (int p = 0; p < n; ++p)
                    acc -= gm(p, i, m) * Gj.value.at({p, j}) + gm(p, m, j) * Gj.value.at({i, p});
                out.at({i, j, m}) = acc;
            }
    return out;
}

}  // namespace grm
