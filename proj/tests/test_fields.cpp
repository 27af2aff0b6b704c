#include <doctest.h>

#include <cmath>
#include <json.hpp>

#include "grm/builtins.hpp"
#include "grm/fields.hpp"

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
    return doc;
}

}  // namespace

TEST_CASE("halton sampling is deterministic, seed-sensitive and in-domain") {
    std::vector<std::array<double, 2>> dom = {{-1.0, 2.0}, {0.0, 0.5}, {-3.0, -1.0}};
    auto a = sample_points(dom, 32, 42);
    auto b = sample_points(dom, 32, 42);
    auto c = sample_points(dom, 32, 43);
    REQUIRE(a.size() == 32);
    CHECK(a == b);
    CHECK(a != c);
    for (const auto& p : a)
        for (std::size_t d = 0; d < dom.size(); ++d) {
            CHECK(p[d] >= dom[d][0]);
            CHECK(p[d] <= dom[d][1]);
        }
    // successive points differ
    CHECK(a[0] != a[1]);
}

TEST_CASE("chart provider splits G into g + F and derives the adjoint") {
    auto spec = load_spec(chart_doc_2d());
    auto P = make_provider(spec);
    std::vector<double> x = {0.3, -0.2};

    auto G = P.value("G", x);
    auto g = P.value("g", x);
    auto F = P.value("F", x);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            CHECK(g.at({i, j}) == doctest::Approx(0.5 * (G.at({i, j}) + G.at({j, i}))));
            CHECK(F.at({i, j}) == doctest::Approx(0.5 * (G.at({i, j}) - G.at({j, i}))));
            CHECK(g.at({i, j}) == doctest::Approx(g.at({j, i})));
            CHECK(F.at({i, j}) == doctest::Approx(-F.at({j, i})));
        }

    // A^k_i = F_ij g^{jk}, checked against a by-hand 2x2 inverse
    auto A = P.value("A", x);
    const double det = g.at({0, 0}) * g.at({1, 1}) - g.at({0, 1}) * g.at({1, 0});
    const double gi[2][2] = {{g.at({1, 1}) / det, -g.at({0, 1}) / det},
                             {-g.at({1, 0}) / det, g.at({0, 0}) / det}};
    for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 2; ++i) {
            double want = 0.0;
            for (int j = 0; j < 2; ++j) want += F.at({i, j}) * gi[j][k];
            CHECK(A.at({k, i}) == doctest::Approx(want));
        }
}

TEST_CASE("field jets agree with central finite differences") {
    auto spec = load_spec(chart_doc_2d());
    auto P = make_provider(spec);
    std::vector<double> x = {0.25, -0.4};
    const double h = 1e-6;
    for (const char* name : {"G", "g", "F", "A"}) {
        auto j = P.jet(name, x);
        const std::size_t nc = j.value.comps().size();
        for (std::size_t c = 0; c < nc; ++c)
            CHECK(j.value.comps()[c] == doctest::Approx(P.value(name, x).comps()[c]));
        for (int m = 0; m < 2; ++m) {
            auto xp = x, xm = x;
            xp[static_cast<std::size_t>(m)] += h;
            xm[static_cast<std::size_t>(m)] -= h;
            auto vp = P.value(name, xp), vm = P.value(name, xm);
            for (std::size_t c = 0; c < nc; ++c) {
                const double fd = (vp.comps()[c] - vm.comps()[c]) / (2 * h);
                CHECK(std::abs(j.d1[c * 2 + static_cast<std::size_t>(m)] - fd) < 1e-7);
            }
        }
    }
}

TEST_CASE("spec validation rejects malformed documents") {
    auto doc = chart_doc_2d();
    doc.erase("dim");
    CHECK_THROWS_AS(load_spec(doc), SpecError);

    doc = chart_doc_2d();
    doc["domain"] = json::array({json::array({-0.8, 0.8})});
    CHECK_THROWS_AS(load_spec(doc), SpecError);

    doc = chart_doc_2d();
    doc["fields"]["bogus"] =
        json::array({json::array({"1", "0"}), json::array({"0", "1"})});
    CHECK_THROWS_AS(load_spec(doc), SpecError);

    doc = chart_doc_2d();
    doc["fields"]["G"] = json::array({json::array({"1", "0"})});
    CHECK_THROWS_AS(load_spec(doc), SpecError);

    doc = chart_doc_2d();
    doc["fields"].erase("G");
    CHECK_THROWS_AS(load_spec(doc), SpecError);

    // expressions referencing out-of-range coordinates surface as parse errors
    doc = chart_doc_2d();
    doc["fields"]["G"][0][0] = "x5";
    CHECK_THROWS(load_spec(doc));

    // degenerate symmetric part is caught by the load-time sample sweep
    doc = chart_doc_2d();
    doc["fields"]["G"] = json::array({json::array({"1", "1"}), json::array({"1", "1"})});
    CHECK_THROWS(load_spec(doc));
}

TEST_CASE("load-time sweep enforces eta(xi) = 1") {
    auto doc = chart_doc_2d();
    doc["fields"]["xi"] = json::array({"1", "0"});
    doc["fields"]["eta"] = json::array({"0.5", "0"});
    CHECK_THROWS_AS(load_spec(doc), SpecError);
    doc["fields"]["eta"] = json::array({"1", "0"});
    CHECK_NOTHROW(load_spec(doc));
}

TEST_CASE("spec_to_json round-trips field values") {
    auto spec = load_spec(chart_doc_2d());
    auto spec2 = load_spec(spec_to_json(spec));
    auto P1 = make_provider(spec), P2 = make_provider(spec2);
    for (const auto& x : sample_points(spec.domain, 10, 3))
        for (const char* name : {"G", "g", "F", "A"}) {
            auto v1 = P1.value(name, x), v2 = P2.value(name, x);
            for (std::size_t c = 0; c < v1.comps().size(); ++c)
                CHECK(v1.comps()[c] == doctest::Approx(v2.comps()[c]).epsilon(1e-12));
        }
}

TEST_CASE("round 2-sphere chart induces the analytic metric") {
    for (double r : {1.0, 2.5}) {
        auto spec = builtin_round_s2(r);
        auto P = make_provider(spec);
        for (const auto& x : sample_points(spec.domain, 12, 1)) {
            const double s2 = x[0] * x[0] + x[1] * x[1];
            auto g = P.value("g", x);
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) {
                    const double want =
                        r * r * ((i == j ? 1.0 : 0.0) + x[static_cast<std::size_t>(i)] *
                                                            x[static_cast<std::size_t>(j)] /
                                                            (1.0 - s2));
                    CHECK(g.at({i, j}) == doctest::Approx(want).epsilon(1e-10));
                }
            // the ambient cross product induces an almost complex structure
            auto A = P.value("A", x);
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) {
                    double a2 = 0.0;
                    for (int k = 0; k < 2; ++k) a2 += A.at({i, k}) * A.at({k, j});
                    CHECK(a2 == doctest::Approx(i == j ? -1.0 : 0.0).epsilon(1e-9));
                }
        }
    }
}

TEST_CASE("six-sphere cross product structure is orthogonal almost complex") {
    auto spec = builtin_s6_nearly_kahler();
    auto P = make_provider(spec);
    for (const auto& x : sample_points(spec.domain, 6, 5)) {
        auto g = P.value("g", x);
        auto A = P.value("A", x);
        auto F = P.value("F", x);
        const int n = 6;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double a2 = 0.0, gaa = 0.0, f = 0.0;
                for (int k = 0; k < n; ++k) {
                    a2 += A.at({i, k}) * A.at({k, j});
                    f += g.at({i, k}) * A.at({k, j});
                }
                // g(AX, AY) = g(X, Y)
                for (int p = 0; p < n; ++p)
                    for (int q = 0; q < n; ++q)
                        gaa += A.at({p, i}) * g.at({p, q}) * A.at({q, j});
                CHECK(a2 == doctest::Approx(i == j ? -1.0 : 0.0).epsilon(1e-9));
                CHECK(gaa == doctest::Approx(g.at({i, j})).epsilon(1e-9));
                // F_ij = g_ik A^k_j up to sign convention F_ij = A^k_i g_kj
                double f2 = 0.0;
                for (int k = 0; k < n; ++k) f2 += A.at({k, i}) * g.at({k, j});
                CHECK(F.at({i, j}) == doctest::Approx(f2).epsilon(1e-9));
                (void)f;
            }
    }
}

TEST_CASE("flat Kahler builtin is self-consistent") {
    auto spec = builtin_flat_kahler(4);
    auto P = make_provider(spec);
    std::vector<double> x = {0.1, -0.2, 0.3, 0.4};
    auto A = P.value("A", x);
    auto g = P.value("g", x);
    auto F = P.value("F", x);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            double a2 = 0.0, adj = 0.0;
            for (int k = 0; k < 4; ++k) {
                a2 += A.at({i, k}) * A.at({k, j});
                adj += F.at({j, k}) * (k == i ? 1.0 : 0.0);  // g = identity
            }
            CHECK(a2 == doctest::Approx(i == j ? -1.0 : 0.0));
            CHECK(A.at({i, j}) == doctest::Approx(adj));
        }
    auto G = P.value("G", x);
    for (std::size_t c = 0; c < G.comps().size(); ++c)
        CHECK(G.comps()[c] == doctest::Approx(g.comps()[c] + F.comps()[c]));
}

TEST_CASE("non-tangent ambient endomorphism is rejected at load time") {
    json doc;
    doc["name"] = "bad_tangency";
    doc["dim"] = 2;
    doc["backend"] = "embedded";
    doc["domain"] = json::array({json::array({-0.5, 0.5}), json::array({-0.5, 0.5})});
    doc["embedding"]["ambient_dim"] = 3;
    doc["embedding"]["map"] = json::array({"x0", "x1", "sqrt(1-x0^2-x1^2)"});
    // rotation about the z-axis: not tangent to the sphere
    doc["embedding"]["A_ambient"] = json::array({json::array({"0", "-1", "0"}),
                                                 json::array({"1", "0", "0"}),
                                                 json::array({"0", "0", "0"})});
    CHECK_THROWS_AS(load_spec(doc), SpecError);
}
