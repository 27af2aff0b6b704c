#include <doctest.h>

#include <cmath>

#include "grm/builtins.hpp"
#include "grm/einstein.hpp"

using namespace grm;

TEST_CASE("canonical connection satisfies the metricity condition for G") {
    // ... on spaces meeting the existence criterion for a totally skew torsion
    for (auto spec : {builtin_flat_kahler(4), builtin_round_s2(2.0), builtin_s6_nearly_kahler()}) {
        auto P = make_provider(spec);
        auto C = einstein_connection(P);
        const int pts = spec.backend == ManifoldSpec::Backend::embedded ? 3 : 8;
        for (const auto& x : sample_points(spec.domain, pts, 21)) {
            auto r = metricity_residual(P, *C, x);
            CHECK(r.sup_norm() < 1e-9);
        }
    }
    // the negative control violates the criterion, and metricity must fail
    auto bad = make_provider(builtin_control_noncriterion());
    auto C = einstein_connection(bad);
    double worst = 0.0;
    for (const auto& x : sample_points(bad.spec().domain, 8, 21))
        worst = std::max(worst, metricity_residual(bad, *C, x).sup_norm());
    CHECK(worst > 1e-2);
}

TEST_CASE("Levi-Civita fails metricity exactly by the dF terms") {
    auto spec = builtin_control_noncriterion();
    auto P = make_provider(spec);
    auto LC = levi_civita(P);
    std::vector<double> x = {0.2, -0.3, 0.4, 0.1};
    auto r = metricity_residual(P, *LC, x);
    CHECK(r.sup_norm() > 1e-3);
    // since nabla^g g = 0 the whole residual comes from the F part:
    // residual(i,j,m) = d_m F_ij - gamma^p_im F_pj - gamma^p_mj F_ip
    auto gam = LC->gamma(x);
    const int n = 4;
    auto gm = [&](int k, int i, int j) {
        return gam[(static_cast<std::size_t>(k) * n + i) * n + j];
    };
    auto Fj = P.jet("F", x);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int m = 0; m < n; ++m) {
                double direct = Fj.d1[(static_cast<std::size_t>(i) * n + j) * n + m];
                for (int p = 0; p < n; ++p)
                    direct -= gm(p, i, m) * Fj.value.at({p, j}) +
                              gm(p, m, j) * Fj.value.at({i, p});
                CHECK(r.at({i, j, m}) == doctest::Approx(direct).epsilon(1e-10));
            }
}

TEST_CASE("torsion of the canonical connection is -1/3 dF with the index lowered") {
    for (auto spec : {builtin_control_noncriterion(), builtin_round_s2(1.5)}) {
        auto P = make_provider(spec);
        auto C = einstein_connection(P);
        const int n = P.dim();
        for (const auto& x : sample_points(spec.domain, 5, 2)) {
            auto T = torsion_of(*C, x);
            auto g = P.value("g", x);
            auto dF = exterior_derivative_F(P, x);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int l = 0; l < n; ++l) {
                        double low = 0.0;
                        for (int k = 0; k < n; ++k) low += T.at({k, i, j}) * g.at({k, l});
                        CHECK(low == doctest::Approx(-dF.at({i, j, l}) / 3.0)
                                         .epsilon(1e-8).scale(1.0));
                    }
        }
    }
}

TEST_CASE("contorsion matches its closed form") {
    auto spec = builtin_control_noncriterion();
    auto P = make_provider(spec);
    auto C = einstein_connection(P);
    const int n = 4;
    std::vector<double> x = {-0.1, 0.25, 0.3, -0.4};
    auto K = contorsion(P, *C, x);
    auto g = P.value("g", x);
    auto A = P.value("A", x);
    auto dF = exterior_derivative_F(P, x);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int l = 0; l < n; ++l) {
                double low = 0.0;
                for (int k = 0; k < n; ++k) low += K.at({k, i, j}) * g.at({k, l});
                double want = -dF.at({i, j, l});
                for (int s = 0; s < n; ++s)
                    want += A.at({s, i}) * dF.at({s, j, l}) - A.at({s, j}) * dF.at({i, s, l});
                CHECK(low == doctest::Approx(want / 6.0).epsilon(1e-9));
            }
    // contorsion of Levi-Civita against itself vanishes
    auto LC = levi_civita(P);
    CHECK(contorsion(P, *LC, x).sup_norm() < 1e-13);
}

TEST_CASE("prescribing the canonical torsion reproduces the canonical connection") {
    auto spec = builtin_control_noncriterion();
    auto P = make_provider(spec);
    auto C1 = einstein_connection(P);
    auto C2 = general_emc_connection(P, canonical_torsion_low(P));
    for (const auto& x : sample_points(spec.domain, 6, 17)) {
        auto g1 = C1->gamma(x);
        auto g2 = C2->gamma(x);
        for (std::size_t c = 0; c < g1.size(); ++c)
            CHECK(g1[c] == doctest::Approx(g2[c]).epsilon(1e-11));
    }
}

TEST_CASE("prescribing a torsion reproduces that torsion and the g-compatibility") {
    auto spec = builtin_control_noncriterion();
    auto P = make_provider(spec);
    // a made-up smooth (0,3) torsion, antisymmetric in its first two slots
    auto tfn = [](const auto& x) {
        using D = std::decay_t<decltype(x[0])>;
        const int n = static_cast<int>(x.size());
        std::vector<D> T(static_cast<std::size_t>(n) * n * n, zero_like(x[0]));
        auto set = [&](int i, int j, int k, const D& v) {
            T[(static_cast<std::size_t>(i) * n + j) * n + k] = v;
            T[(static_cast<std::size_t>(j) * n + i) * n + k] = -v;
        };
        set(0, 1, 2, sin(x[0]) * 0.3);
        set(1, 2, 0, x[3] * x[1]);
        set(0, 3, 3, constant_like(x[0], 0.4));
        set(2, 3, 1, cos(x[2]) * x[0]);
        set(0, 2, 2, x[1] * 0.5);
        return T;
    };
    auto C = general_emc_connection(P, tfn);
    const int n = 4;
    for (const auto& x : sample_points(spec.domain, 6, 31)) {
        // the g-part of the metricity condition holds for any prescribed
        // torsion: nabla_i g_jk = -1/2 [T_ijk - T_ijs A^s_k + T_ikj - T_iks A^s_j]
        auto ng = covariant_derivative(P, *C, "g", x);  // slots (j, k, direction)
        auto Tl = tfn(x);
        auto A = P.value("A", x);
        auto t = [&](int i, int j, int k) {
            return Tl[(static_cast<std::size_t>(i) * n + j) * n + k];
        };
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    double want = t(i, j, k) + t(i, k, j);
                    for (int s = 0; s < n; ++s)
                        want -= t(i, j, s) * A.at({s, k}) + t(i, k, s) * A.at({s, j});
                    CHECK(ng.at({j, k, i}) == doctest::Approx(-0.5 * want)
                                                  .epsilon(1e-9).scale(1.0));
                }
        // and its torsion is exactly the prescribed one
        auto T = torsion_of(*C, x);
        auto g = P.value("g", x);
        auto want = tfn(x);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int l = 0; l < n; ++l) {
                    double low = 0.0;
                    for (int k = 0; k < n; ++k) low += T.at({k, i, j}) * g.at({k, l});
                    CHECK(low == doctest::Approx(want[(static_cast<std::size_t>(i) * n + j) * n + l])
                                     .epsilon(1e-9).scale(1.0));
                }
    }
}

TEST_CASE("constant F on flat space gives back Levi-Civita") {
    auto P = make_provider(builtin_flat_kahler(4));
    auto C = einstein_connection(P);
    std::vector<double> x = {0.1, 0.4, -0.2, 0.3};
    auto g = C->gamma(x);
    for (double v : g) CHECK(std::abs(v) < 1e-13);
}

TEST_CASE("canonical connection coefficients differentiate consistently") {
    // the D1 evaluation path (used for curvature) against finite differences
    auto spec = builtin_control_noncriterion();
    auto P = make_provider(spec);
    auto C = einstein_connection(P);
    std::vector<double> x = {0.15, -0.25, 0.35, 0.05};
    const int n = 4;
    std::vector<D1> xs(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        xs[i].a = x[i];
        xs[i].b.assign(x.size(), 0.0);
        xs[i].b[i] = 1.0;
    }
    auto gd = C->gamma(xs);
    const double h = 1e-6;
    for (int m = 0; m < n; ++m) {
        auto xp = x, xm = x;
        xp[static_cast<std::size_t>(m)] += h;
        xm[static_cast<std::size_t>(m)] -= h;
        auto gp = C->gamma(xp), gm = C->gamma(xm);
        for (std::size_t c = 0; c < gp.size(); ++c) {
            const double fd = (gp[c] - gm[c]) / (2 * h);
            CHECK(gd[c].b[static_cast<std::size_t>(m)] == doctest::Approx(fd).epsilon(1e-5));
        }
    }
    // curvature of a torsionful connection is still antisymmetric in the 2-form slots
    auto R = curvature(*C, x);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l)
                for (int m = 0; m < n; ++m)
                    CHECK(R.at({i, k, l, m}) == doctest::Approx(-R.at({i, k, m, l})));
}
