#include <doctest.h>

#include <map>
#include <set>
#include <string>

#include "grm/builtins.hpp"
#include "grm/verify.hpp"

using namespace grm;

namespace {

std::map<std::string, std::string> verdicts(const VerificationReport& rep) {
    std::map<std::string, std::string> out;
    for (const auto& r : rep.results) out[r.id] = r.verdict;
    return out;
}

}  // namespace

TEST_CASE("flat Kahler passes every applicable identity, contact ids skip") {
    auto P = make_provider(builtin_flat_kahler(4));
    auto rep = run_suite(P, Suite::all, 64, 42, 1e-8);
    auto v = verdicts(rep);
    CHECK(v.size() > 20);
    for (const auto& [id, verdict] : v) {
        INFO("id = ", id);
        CHECK(verdict != "fail");
        const auto& entry = catalog_entry(identity_from_string(id));
        if (entry.needs_contact)
            CHECK(verdict == "skip");
        else
            CHECK(verdict == "pass");
    }
    CHECK(rep.all_passed());
}

TEST_CASE("the round 6-sphere passes the hermitian suite") {
    auto P = make_provider(builtin_s6_nearly_kahler());
    auto rep = run_suite(P, Suite::hermitian, 4, 42, 1e-8);
    auto v = verdicts(rep);
    for (const char* id : {"wah", "emc", "a_torsion", "q_torsion", "skew1", "ff2", "tordf",
                           "skew0_g", "skew0_f", "p27_nablaA", "p27_NA", "nk", "nablaQ_g",
                           "nablaQ", "eq32"}) {
        INFO("id = ", id);
        CHECK(v.at(id) == "pass");
    }
    // the suite is exercised on a space with genuinely nonzero dF
    auto x = sample_points(P.spec().domain, 1, 42)[0];
    CHECK(exterior_derivative_F(P, x).sup_norm() > 0.1);
}

TEST_CASE("the line over the 6-sphere passes the contact suite") {
    auto P = make_provider(builtin_line_product(builtin_s6_nearly_kahler()));
    auto rep = run_suite(P, Suite::acm, 3, 42, 1e-8);
    auto v = verdicts(rep);
    for (const char* id : {"acm", "anc", "reeb_geo", "reeb_kill", "deta_xi", "mainw", "n51",
                           "nwac_skew", "skewacB1", "t38", "nablaQ_g", "nablaQ"}) {
        INFO("id = ", id);
        CHECK(v.at(id) == "pass");
    }
}

TEST_CASE("the generic control spec fails the skew criterion and metricity") {
    auto P = make_provider(builtin_control_noncriterion());
    auto rep = run_suite(P, Suite::emc, 16, 42, 1e-8);
    std::map<std::string, double> worst;
    for (const auto& r : rep.results) worst[r.id] = r.max_residual;
    auto v = verdicts(rep);
    CHECK(v.at("skew1") == "fail");
    CHECK(v.at("emc") == "fail");
    CHECK(worst.at("skew1") > 1e-2);
    CHECK(worst.at("emc") > 1e-2);
    CHECK_FALSE(rep.all_passed());
    // the g-part identities hold for ANY canonical connection and still pass
    for (const char* id : {"ein_g", "skew0_g", "tordf", "nuj1_xcheck"}) {
        INFO("id = ", id);
        CHECK(v.at(id) == "pass");
    }
    // while the F-part identities are equivalent to the failed criterion
    for (const char* id : {"emc_t", "ein_f", "skew0_f"}) {
        INFO("id = ", id);
        CHECK(v.at(id) == "fail");
    }
    CHECK(v.at("nujq_xcheck") == "skip");  // the control carries no Q
}

TEST_CASE("a contact suite on a Hermitian spec reports skips, not passes") {
    auto P = make_provider(builtin_flat_kahler(4));
    auto rep = run_suite(P, Suite::acm, 8, 42, 1e-8);
    auto v = verdicts(rep);
    for (const char* id : {"acm", "anc", "reeb_geo", "reeb_kill", "deta_xi", "mainw", "n51",
                           "nwac_skew", "skewacB1"}) {
        INFO("id = ", id);
        CHECK(v.at(id) == "skip");
    }
    CHECK(v.at("nablaQ_g") == "pass");  // needs only Q, which the spec has
    CHECK(rep.all_passed());            // skips never flip a report to failing
}

TEST_CASE("reports are deterministic and spec-identified") {
    auto P = make_provider(builtin_control_noncriterion());
    auto a = report_to_json(run_suite(P, Suite::emc, 8, 7, 1e-8)).dump(2);
    auto b = report_to_json(run_suite(P, Suite::emc, 8, 7, 1e-8)).dump(2);
    CHECK(a == b);
    // a different seed samples different points and may change residual stats
    auto c = report_to_json(run_suite(P, Suite::emc, 8, 8, 1e-8)).dump(2);
    CHECK(a != c);
    // the report names the spec and carries a content hash
    auto doc = nlohmann::json::parse(a);
    CHECK(doc["spec"].get<std::string>().find("control_noncriterion") == 0);
    CHECK(doc["spec"].get<std::string>().size() > 17);  // name + 16 hex digits
    CHECK(doc["results"].size() > 0);
    for (const auto& row : doc["results"]) {
        CHECK(row.contains("id"));
        CHECK(row.contains("paper_ref"));
        CHECK(row.contains("max_residual"));
        CHECK(row.contains("mean_residual"));
        CHECK(row.contains("verdict"));
    }
}

TEST_CASE("passing at a tolerance implies passing at any larger tolerance") {
    auto P = make_provider(builtin_round_s2(1.5));
    auto tight = run_suite(P, Suite::emc, 8, 42, 1e-8);
    auto loose = run_suite(P, Suite::emc, 8, 42, 1e-3);
    auto vt = verdicts(tight), vl = verdicts(loose);
    for (const auto& [id, verdict] : vt)
        if (verdict == "pass") CHECK(vl.at(id) == "pass");
    // and the residual statistics are tolerance-independent
    for (std::size_t i = 0; i < tight.results.size(); ++i) {
        CHECK(tight.results[i].max_residual == loose.results[i].max_residual);
        CHECK(tight.results[i].mean_residual == loose.results[i].mean_residual);
    }
}

TEST_CASE("the eigenvalue splitting identity passes on the weighted product") {
    auto spec = builtin_weighted_product(
        {builtin_flat_torus_kahler(2), builtin_flat_torus_kahler(2)}, {1.0, 4.0});
    auto P = make_provider(spec);
    auto rep = run_suite(P, Suite::splitting, 16, 42, 1e-8);
    REQUIRE(rep.results.size() == 1);
    CHECK(rep.results[0].id == "invol");
    CHECK(rep.results[0].verdict == "pass");
}

TEST_CASE("catalog closure: the coverage table is total and well-formed") {
    std::set<std::string> referenced;
    for (const auto& row : coverage_table()) {
        const std::string realization = row.realization;
        if (realization.rfind("op:", 0) == 0) {
            CHECK(realization.size() > 3);
            continue;
        }
        // non-op realizations must be catalog ids
        CHECK_NOTHROW(identity_from_string(realization));
        referenced.insert(realization);
    }
    // every catalog id is reachable from the coverage table...
    for (const auto& entry : identity_catalog()) {
        INFO("id = ", entry.name);
        CHECK(referenced.count(entry.name) == 1);
    }
    // ...and every catalog id belongs to at least one suite
    std::set<int> in_suites;
    for (Suite s : {Suite::emc, Suite::hermitian, Suite::acm, Suite::para, Suite::splitting})
        for (IdentityId id : suite_ids(s)) in_suites.insert(static_cast<int>(id));
    for (const auto& entry : identity_catalog()) {
        INFO("id = ", entry.name);
        CHECK(in_suites.count(static_cast<int>(entry.id)) == 1);
    }
    // the "all" suite is exactly the non-para union
    auto all = suite_ids(Suite::all);
    CHECK(all.size() == identity_catalog().size() - suite_ids(Suite::para).size());
}

TEST_CASE("missing fields raise instead of silently passing in direct evaluation") {
    auto P = make_provider(builtin_control_noncriterion());  // no Q, xi, eta
    std::vector<double> x = {0.1, 0.2, -0.1, 0.3};
    CHECK_THROWS_AS(identity_residual(IdentityId::nujq_xcheck, P, x), StructureError);
    CHECK_THROWS_AS(identity_residual(IdentityId::mainw, P, x), StructureError);
    CHECK_THROWS_AS(identity_residual(IdentityId::invol, P, x), StructureError);
}

TEST_CASE("spot residuals match their direct oracles") {
    // metricity on flat space is identically zero
    auto flat = make_provider(builtin_flat_kahler(4));
    std::vector<double> o = {0.0, 0.0, 0.0, 0.0};
    CHECK(identity_residual(IdentityId::emc, flat, o) < 1e-13);
    // canonical torsion is -1/3 dF even off-structure
    auto ctrl = make_provider(builtin_control_noncriterion());
    for (const auto& x : sample_points(ctrl.spec().domain, 4, 11))
        CHECK(identity_residual(IdentityId::tordf, ctrl, x) < 1e-10);
    // the para axioms hold on a hand-built para-Hermitian plane
    ManifoldSpec para;
    para.name = "para2";
    para.dim = 2;
    para.domain = {{-1.0, 1.0}, {-1.0, 1.0}};
    para.fields["g"] = {parse_expr("1", 2), parse_expr("0", 2), parse_expr("0", 2),
                        parse_expr("-1", 2)};
    para.fields["F"] = {parse_expr("0", 2), parse_expr("-1", 2), parse_expr("1", 2),
                        parse_expr("0", 2)};
    para.fields["A"] = {parse_expr("0", 2), parse_expr("1", 2), parse_expr("1", 2),
                        parse_expr("0", 2)};
    para.fields["Q"] = {parse_expr("1", 2), parse_expr("0", 2), parse_expr("0", 2),
                        parse_expr("1", 2)};
    auto PP = make_provider(para);
    std::vector<double> z = {0.2, -0.3};
    CHECK(identity_residual(IdentityId::para_h, PP, z) < 1e-12);
    auto rep = run_suite(PP, Suite::para, 4, 42, 1e-8);
    CHECK(verdicts(rep).at("para_h") == "pass");
    CHECK(verdicts(rep).at("para_c") == "skip");  // no Reeb data on the plane
}
