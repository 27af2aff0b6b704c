#include <doctest.h>

#include <cmath>
#include <json.hpp>

#include "grm/builtins.hpp"
#include "grm/geometry.hpp"

using namespace grm;
using nlohmann::json;

namespace {

json chart_doc_2d() {
    json doc;
    doc["name"] = "asym2";
    doc["dim"] = 2;
    doc["backend"] = "chart";
    doc["domain"] = json::array({json::array({-0.8, 0.8}), json::array({-0.8, 0.8})});
    doc["fields"]["G"] = json::array({json::array({"1+0.1*x1^2", "0.5+0.2*sin(x0)"}),
                                      json::array({"-0.5-0.2*sin(x0)+0.3*x0*x1", "2"})});
    doc["fields"]["xi"] = json::array({"1", "0"});
    doc["fields"]["eta"] = json::array({"1", "x0*x1"});
    return doc;
}

// an artificial torsionful connection for exercising index conventions
std::shared_ptr<ConnectionField> twisty_connection() {
    return make_connection(2, [](const auto& x) {
        using D = std::decay_t<decltype(x[0])>;
        std::vector<D> G(8, zero_like(x[0]));
        auto at = [&](int k, int i, int j) -> D& { return G[(k * 2 + i) * 2 + j]; };
        at(0, 0, 1) = sin(x[0]);
        at(0, 1, 0) = x[1] * x[1];
        at(1, 0, 0) = x[0] * x[1];
        at(1, 1, 1) = cos(x[1]) * x[0];
        at(1, 0, 1) = constant_like(x[0], 0.7);
        return G;
    });
}

}  // namespace

TEST_CASE("split_metric and adjoint_A at a point") {
    auto spec = load_spec(chart_doc_2d());
    auto P = make_provider(spec);
    std::vector<double> x = {0.2, 0.4};
    auto G = P.value("G", x);
    auto [g, F] = split_metric(G);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            CHECK(g.at({i, j}) + F.at({i, j}) == doctest::Approx(G.at({i, j})));
            CHECK(g.at({i, j}) == doctest::Approx(g.at({j, i})));
            CHECK(F.at({i, j}) == doctest::Approx(-F.at({j, i})));
        }
    auto A = adjoint_A(g, F);
    auto Ap = P.value("A", x);
    for (std::size_t c = 0; c < A.comps().size(); ++c)
        CHECK(A.comps()[c] == doctest::Approx(Ap.comps()[c]));
    // defining property without inverting: A^k_i g_kj = F_ij
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            double lhs = 0.0;
            for (int k = 0; k < 2; ++k) lhs += A.at({k, i}) * g.at({k, j});
            CHECK(lhs == doctest::Approx(F.at({i, j})));
        }
}

TEST_CASE("Levi-Civita on the sphere graph chart matches the closed form") {
    // For g_ij = r^2 (delta_ij + u_i u_j / (1 - |u|^2)) the Christoffel symbols
    // are radius-independent: gamma^k_{ij} = u^k (delta_ij + u_i u_j / (1-|u|^2)).
    for (double r : {1.0, 3.0}) {
        auto spec = builtin_round_s2(r);
        auto P = make_provider(spec);
        auto C = levi_civita(P);
        for (const auto& u : sample_points(spec.domain, 10, 2)) {
            const double s = u[0] * u[0] + u[1] * u[1];
            auto G = C->gamma(u);
            for (int k = 0; k < 2; ++k)
                for (int i = 0; i < 2; ++i)
                    for (int j = 0; j < 2; ++j) {
                        const double want =
                            u[static_cast<std::size_t>(k)] *
                            ((i == j ? 1.0 : 0.0) + u[static_cast<std::size_t>(i)] *
                                                        u[static_cast<std::size_t>(j)] / (1.0 - s));
                        CHECK(G[(static_cast<std::size_t>(k) * 2 + i) * 2 + j] ==
                              doctest::Approx(want).epsilon(1e-9));
                    }
        }
    }
}

TEST_CASE("Levi-Civita is torsion-free and metric") {
    auto spec = load_spec(chart_doc_2d());
    auto P = make_provider(spec);
    auto C = levi_civita(P);
    for (const auto& x : sample_points(spec.domain, 16, 4)) {
        CHECK(torsion_of(*C, x).sup_norm() < 1e-12);
        auto nabla_g = covariant_derivative(P, *C, "g", x);
        CHECK(nabla_g.sup_norm() < 1e-11);
    }
}

TEST_CASE("covariant derivative obeys the Leibniz rule on a pairing") {
    auto spec = load_spec(chart_doc_2d());
    auto P = make_provider(spec);
    auto LC = levi_civita(P);
    auto TW = twisty_connection();
    for (const auto* C : {LC.get(), TW.get()}) {
        for (const auto& x : sample_points(spec.domain, 8, 9)) {
            auto dxi = covariant_derivative(P, *C, "xi", x);    // (1,1), slot order (k, m)
            auto deta = covariant_derivative(P, *C, "eta", x);  // (0,2), slot order (j, m)
            auto xi = P.value("xi", x);
            auto eta = P.jet("eta", x);
            for (int m = 0; m < 2; ++m) {
                // d_m (eta(xi)) with constant xi = (1,0): just d_m eta_0
                const double lhs = eta.d1[static_cast<std::size_t>(0) * 2 + m];
                double rhs = 0.0;
                for (int i = 0; i < 2; ++i)
                    rhs += deta.at({i, m}) * xi.at({i}) + eta.value.at({i}) * dxi.at({i, m});
                CHECK(rhs == doctest::Approx(lhs).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("the two covariant derivative variants differ by torsion terms") {
    auto spec = load_spec(chart_doc_2d());
    auto P = make_provider(spec);
    auto C = twisty_connection();
    std::vector<double> x = {0.3, -0.5};
    auto [plus, minus] = covariant_derivative_pm(P, *C, "A", x);
    auto T = torsion_of(*C, x);
    auto A = P.value("A", x);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int m = 0; m < 2; ++m) {
                double want = 0.0;
                for (int p = 0; p < 2; ++p)
                    want += T.at({i, p, m}) * A.at({p, j}) - T.at({p, j, m}) * A.at({i, p});
                CHECK(plus.at({i, j, m}) - minus.at({i, j, m}) == doctest::Approx(want));
            }
    // and they coincide for the torsion-free Levi-Civita connection
    auto LC = levi_civita(P);
    auto [p2, m2] = covariant_derivative_pm(P, *LC, "A", x);
    CHECK((p2 - m2).sup_norm() < 1e-12);
}

TEST_CASE("lie bracket on hand-built jets") {
    // X = (-x1, x0) (rotation field), Y = (1, 0): [X,Y] = (0,-1)
    std::vector<double> x = {0.4, 0.7};
    FieldJet X{TensorValue(2, 1, 0, {-x[1], x[0]}), {0.0, -1.0, 1.0, 0.0}};
    FieldJet Y{TensorValue(2, 1, 0, {1.0, 0.0}), {0.0, 0.0, 0.0, 0.0}};
    auto b = lie_bracket(X, Y);
    CHECK(b.at({0}) == doctest::Approx(0.0));
    CHECK(b.at({1}) == doctest::Approx(-1.0));
    // antisymmetry
    auto c = lie_bracket(Y, X);
    CHECK(c.at({1}) == doctest::Approx(1.0));
}

TEST_CASE("exterior derivative of F against finite differences") {
    auto spec = builtin_control_noncriterion();
    auto P = make_provider(spec);
    const int n = 4;
    const double h = 1e-6;
    for (const auto& x : sample_points(spec.domain, 6, 12)) {
        auto dF = exterior_derivative_F(P, x);
        // full antisymmetry
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    CHECK(dF.at({i, j, k}) == doctest::Approx(-dF.at({j, i, k})));
                    CHECK(dF.at({i, j, k}) == doctest::Approx(-dF.at({i, k, j})));
                }
        auto pd = [&](int m, int i, int j) {
            auto xp = x, xm = x;
            xp[static_cast<std::size_t>(m)] += h;
            xm[static_cast<std::size_t>(m)] -= h;
            return (P.value("F", xp).at({i, j}) - P.value("F", xm).at({i, j})) / (2 * h);
        };
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                for (int k = j + 1; k < n; ++k) {
                    const double want = pd(i, j, k) + pd(j, k, i) + pd(k, i, j);
                    CHECK(dF.at({i, j, k}) == doctest::Approx(want).epsilon(1e-6));
                }
    }
}

TEST_CASE("exterior derivative of eta against finite differences") {
    auto spec = load_spec(chart_doc_2d());
    auto P = make_provider(spec);
    std::vector<double> x = {0.15, -0.35};
    auto de = exterior_derivative_eta(P, x);
    CHECK(de.at({0, 0}) == doctest::Approx(0.0));
    CHECK(de.at({0, 1}) == doctest::Approx(-de.at({1, 0})));
    // eta = (1, x0 x1): d eta = d(x0 x1) ^ dx1, so (d eta)_{01} = x1
    CHECK(de.at({0, 1}) == doctest::Approx(x[1]));
}

TEST_CASE("Nijenhuis tensor agrees with the bracket definition") {
    for (auto spec : {builtin_control_noncriterion(), builtin_s6_nearly_kahler()}) {
        auto P = make_provider(spec);
        const int n = P.dim();
        for (const auto& x : sample_points(spec.domain, 4, 3)) {
            auto N = nijenhuis(P, x);
            auto Aj = P.jet("A", x);
            auto A = Aj.value;
            // brute force N(e_i, e_j) = [Ae_i, Ae_j] - A[Ae_i, e_j] - A[e_i, Ae_j] + A^2 [e_i,e_j]
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    // jets of the vector fields Ae_i and Ae_j
                    FieldJet Vi{TensorValue(n, 1, 0), std::vector<double>(
                                                          static_cast<std::size_t>(n) * n)};
                    FieldJet Vj = Vi;
                    for (int k = 0; k < n; ++k) {
                        Vi.value.at({k}) = A.at({k, i});
                        Vj.value.at({k}) = A.at({k, j});
                        for (int m = 0; m < n; ++m) {
                            Vi.d1[static_cast<std::size_t>(k) * n + m] =
                                Aj.d1[(static_cast<std::size_t>(k) * n + i) * n + m];
                            Vj.d1[static_cast<std::size_t>(k) * n + m] =
                                Aj.d1[(static_cast<std::size_t>(k) * n + j) * n + m];
                        }
                    }
                    auto br = lie_bracket(Vi, Vj);  // [Ae_i, Ae_j]
                    for (int k = 0; k < n; ++k) {
                        // [Ae_i, e_j]^k = -d_j (A^k_i); [e_i, Ae_j]^k = d_i (A^k_j)
                        double t = br.at({k});
                        for (int s = 0; s < n; ++s) {
                            const double dj_Asi = Aj.d1[(static_cast<std::size_t>(s) * n + i) * n + j];
                            const double di_Asj = Aj.d1[(static_cast<std::size_t>(s) * n + j) * n + i];
                            t -= A.at({k, s}) * (-dj_Asi);
                            t -= A.at({k, s}) * di_Asj;
                        }
                        CHECK(N.at({k, i, j}) == doctest::Approx(t).epsilon(1e-9));
                    }
                }
        }
    }
}

TEST_CASE("Nijenhuis tensor vanishes for integrable structures") {
    // constant A on flat space
    auto flat = make_provider(builtin_flat_kahler(4));
    std::vector<double> x4 = {0.1, 0.2, -0.3, 0.4};
    CHECK(nijenhuis(flat, x4).sup_norm() < 1e-13);
    // any almost complex structure on a 2-manifold is integrable
    auto s2 = builtin_round_s2(1.0);
    auto P = make_provider(s2);
    for (const auto& x : sample_points(s2.domain, 6, 8))
        CHECK(nijenhuis(P, x).sup_norm() < 1e-9);
}

TEST_CASE("curvature of the round sphere has constant sectional curvature 1/r^2") {
    for (double r : {1.0, 2.0}) {
        auto spec = builtin_round_s2(r);
        auto P = make_provider(spec);
        auto C = levi_civita(P);
        const double kappa = 1.0 / (r * r);
        for (const auto& x : sample_points(spec.domain, 8, 6)) {
            auto R = curvature(*C, x);
            auto g = P.value("g", x);
            // R(e_l, e_m) e_k = kappa (g_mk e_l - g_lk e_m)
            for (int i = 0; i < 2; ++i)
                for (int k = 0; k < 2; ++k)
                    for (int l = 0; l < 2; ++l)
                        for (int m = 0; m < 2; ++m) {
                            const double want = kappa * (g.at({m, k}) * (i == l ? 1.0 : 0.0) -
                                                         g.at({l, k}) * (i == m ? 1.0 : 0.0));
                            CHECK(R.at({i, k, l, m}) == doctest::Approx(want).epsilon(1e-8));
                        }
        }
    }
}

TEST_CASE("curvature symmetries and a finite-difference cross-check") {
    auto spec = load_spec(chart_doc_2d());
    auto P = make_provider(spec);
    auto C = levi_civita(P);
    std::vector<double> x = {0.2, -0.3};
    auto R = curvature(*C, x);
    for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 2; ++k)
            for (int l = 0; l < 2; ++l)
                for (int m = 0; m < 2; ++m) {
                    CHECK(R.at({i, k, l, m}) == doctest::Approx(-R.at({i, k, m, l})));
                    // first Bianchi identity (torsion-free)
                    CHECK(R.at({i, k, l, m}) + R.at({i, l, m, k}) + R.at({i, m, k, l}) ==
                          doctest::Approx(0.0));
                }
    // rebuild from finite differences of gamma
    const int n = 2;
    const double h = 1e-6;
    auto g0 = C->gamma(x);
    auto gam = [&](const std::vector<double>& G, int k, int i, int j) {
        return G[(static_cast<std::size_t>(k) * n + i) * n + j];
    };
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l)
                for (int m = 0; m < n; ++m) {
                    auto xp = x, xm = x;
                    xp[static_cast<std::size_t>(l)] += h;
                    xm[static_cast<std::size_t>(l)] -= h;
                    const double dl = (gam(C->gamma(xp), i, m, k) - gam(C->gamma(xm), i, m, k)) / (2 * h);
                    xp = x; xm = x;
                    xp[static_cast<std::size_t>(m)] += h;
                    xm[static_cast<std::size_t>(m)] -= h;
                    const double dm = (gam(C->gamma(xp), i, l, k) - gam(C->gamma(xm), i, l, k)) / (2 * h);
                    double want = dl - dm;
                    for (int s = 0; s < n; ++s)
                        want += gam(g0, s, m, k) * gam(g0, i, l, s) -
                                gam(g0, s, l, k) * gam(g0, i, m, s);
                    CHECK(R.at({i, k, l, m}) == doctest::Approx(want).epsilon(1e-5));
                }
}

TEST_CASE("flat metrics are curvature-free") {
    auto P = make_provider(builtin_flat_kahler(4));
    auto C = levi_civita(P);
    std::vector<double> x = {0.3, -0.1, 0.5, 0.2};
    CHECK(curvature(*C, x).sup_norm() < 1e-13);
}
