// Command-line surface over the library: load or generate specs, run identity
// suites, and emit connection / basis / splitting tables. Every subcommand is
// a thin shell over library calls; exit codes are 0 (pass), 1 (verification
// failure), 2 (error).

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "grm/builtins.hpp"
#include "grm/verify.hpp"

namespace {

struct CommonOpts {
    std::string spec_file;
    std::string builtin_name;
    std::string out_file;
    std::string format = "text";
    int points = 64;
    unsigned seed = 42;
    double tol = 1e-8;
    // builtin parameters
    int dim = 4;
    double radius = 1.0;
    std::vector<std::string> factors;
    std::vector<double> weights;
    std::string base;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool spec_input) {
    if (spec_input) {
        auto* s = cmd->add_option("--spec", o.spec_file, "spec file (JSON)");
        auto* b = cmd->add_option("--builtin", o.builtin_name, "builtin space name");
        s->excludes(b);
        b->excludes(s);
    } else {
        cmd->add_option("--builtin", o.builtin_name, "builtin space name")->required();
    }
    cmd->add_option("--points", o.points, "sample point count");
    cmd->add_option("--seed", o.seed, "sampling seed");
    cmd->add_option("--tol", o.tol, "residual tolerance");
    cmd->add_option("--out", o.out_file, "output file (default: stdout)");
    cmd->add_option("--format", o.format, "output format")
        ->check(CLI::IsMember({"json", "text"}));
    cmd->add_option("--dim", o.dim, "dimension for flat builtins");
    cmd->add_option("--radius", o.radius, "radius for round_s2");
    cmd->add_option("--factors", o.factors, "weighted_product factor tokens")
        ->delimiter(',');
    cmd->add_option("--weights", o.weights, "weighted_product weights")->delimiter(',');
    cmd->add_option("--base", o.base, "line_product base token");
}

grm::ManifoldSpec resolve_spec(const CommonOpts& o) {
    if (!o.spec_file.empty()) {
        std::ifstream in(o.spec_file);
        if (!in) throw std::runtime_error("cannot open spec file: " + o.spec_file);
        nlohmann::json doc;
        in >> doc;
        return grm::load_spec(doc);
    }
    if (o.builtin_name.empty())
        throw std::runtime_error("exactly one of --spec / --builtin is required");
    grm::BuiltinParams p;
    p.dim = o.dim;
    p.radius = o.radius;
    p.factors = o.factors;
    p.weights = o.weights;
    p.base = o.base;
    return grm::builtin(o.builtin_name, p);
}

void emit(const CommonOpts& o, const std::string& payload) {
    if (o.out_file.empty()) {
        std::cout << payload;
        return;
    }
    std::ofstream out(o.out_file, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + o.out_file);
    out << payload;
}

std::vector<double> parse_point(const std::string& text, const grm::ManifoldSpec& spec) {
    std::vector<double> x;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) x.push_back(std::stod(tok));
    if (static_cast<int>(x.size()) != spec.dim)
        throw std::runtime_error("point has " + std::to_string(x.size()) +
                                 " coordinates, spec dimension is " +
                                 std::to_string(spec.dim));
    for (std::size_t d = 0; d < x.size(); ++d)
        if (x[d] < spec.domain[d][0] || x[d] > spec.domain[d][1])
            throw std::runtime_error("coordinate " + std::to_string(d) +
                                     " lies outside the spec domain");
    return x;
}

std::vector<double> default_point(const grm::ManifoldSpec& spec) {
    std::vector<double> x;
    for (const auto& box : spec.domain) x.push_back(0.5 * (box[0] + box[1]));
    return x;
}

nlohmann::json nested3(const grm::TensorValue& t, int n) {
    nlohmann::json out = nlohmann::json::array();
    for (int i = 0; i < n; ++i) {
        nlohmann::json mi = nlohmann::json::array();
        for (int j = 0; j < n; ++j) {
            nlohmann::json row = nlohmann::json::array();
            for (int k = 0; k < n; ++k) row.push_back(t.at({i, j, k}));
            mi.push_back(std::move(row));
        }
        out.push_back(std::move(mi));
    }
    return out;
}

std::string table3(const char* name, const grm::TensorValue& t, int n) {
    std::string out;
    char buf[96];
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                const double v = t.at({i, j, k});
                if (std::abs(v) < 1e-14) continue;
                std::snprintf(buf, sizeof(buf), "%s[%d][%d][%d] = % .12g\n", name, i, j, k, v);
                out += buf;
            }
    return out;
}

grm::TensorValue gamma_tensor(const std::vector<double>& flat, int n) {
    return grm::TensorValue(n, 1, 2, flat);
}

grm::TensorValue lower3(const grm::TensorValue& T, const grm::TensorValue& g) {
    const int n = g.dim();
    grm::TensorValue out(n, 0, 3);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                double acc = 0.0;
                for (int s = 0; s < n; ++s) acc += T.at({s, i, j}) * g.at({s, k});
                out.at({i, j, k}) = acc;
            }
    return out;
}

int cmd_generate(const CommonOpts& o) {
    auto spec = resolve_spec(o);
    emit(o, grm::spec_to_json(spec).dump(2) + "\n");
    return 0;
}

int cmd_verify(const CommonOpts& o, const std::string& suite_name) {
    auto spec = resolve_spec(o);
    auto P = grm::make_provider(spec);
    auto rep = grm::run_suite(P, grm::suite_from_string(suite_name), o.points, o.seed, o.tol);
    if (o.format == "json")
        emit(o, grm::report_to_json(rep).dump(2) + "\n");
    else
        emit(o, grm::report_to_text(rep));
    return rep.all_passed() ? 0 : 1;
}

int cmd_connection(const CommonOpts& o, const std::string& point_text) {
    auto spec = resolve_spec(o);
    auto P = grm::make_provider(spec);
    const int n = spec.dim;
    auto x = point_text.empty() ? default_point(spec) : parse_point(point_text, spec);
    auto C = grm::einstein_connection(P);
    auto lc = gamma_tensor(grm::levi_civita_gamma(P, x), n);
    auto gam = gamma_tensor(C->gamma(x), n);
    auto g = P.value("g", x);
    auto Tl = lower3(grm::torsion_of(*C, x), g);
    auto Kl = lower3(grm::contorsion(P, *C, x), g);
    auto dF = grm::exterior_derivative_F(P, x);
    if (o.format == "json") {
        nlohmann::json doc;
        doc["spec"] = spec.name;
        doc["point"] = x;
        doc["gamma_g"] = nested3(lc, n);
        doc["gamma"] = nested3(gam, n);
        doc["T"] = nested3(Tl, n);
        doc["K"] = nested3(Kl, n);
        doc["dF"] = nested3(dF, n);
        emit(o, doc.dump(2) + "\n");
        return 0;
    }
    std::string out = "spec: " + spec.name + "\npoint:";
    char buf[48];
    for (double v : x) {
        std::snprintf(buf, sizeof(buf), " % .6g", v);
        out += buf;
    }
    out += "\n(entries below 1e-14 omitted; Gamma indexed [component][direction][argument],\n";
    out += " T, K, dF fully lowered)\n";
    out += table3("Gamma_g", lc, n);
    out += table3("Gamma", gam, n);
    out += table3("T", Tl, n);
    out += table3("K", Kl, n);
    out += table3("dF", dF, n);
    emit(o, out);
    return 0;
}

int cmd_basis(const CommonOpts& o, const std::string& point_text) {
    auto spec = resolve_spec(o);
    auto P = grm::make_provider(spec);
    auto x = point_text.empty() ? default_point(spec) : parse_point(point_text, spec);
    auto B = grm::aq_basis(P, x);
    const int n = spec.dim;
    if (o.format == "json") {
        nlohmann::json doc;
        doc["spec"] = spec.name;
        doc["point"] = x;
        doc["pairs"] = B.pairs;
        doc["kernel"] = B.kernel;
        doc["q_eigenvalues"] = B.q_eigen;
        doc["columns"] = nlohmann::json::array();
        for (const auto& col : B.columns) doc["columns"].push_back(col);
        emit(o, doc.dump(2) + "\n");
        return 0;
    }
    std::string out = "spec: " + spec.name + "\n";
    out += "pairs: " + std::to_string(B.pairs) + "   kernel: " + std::to_string(B.kernel) + "\n";
    char buf[48];
    for (std::size_t c = 0; c < B.columns.size(); ++c) {
        std::snprintf(buf, sizeof(buf), "e%-2zu  (Q-eigenvalue % .6g): ", c + 1, B.q_eigen[c]);
        out += buf;
        for (int r = 0; r < n; ++r) {
            std::snprintf(buf, sizeof(buf), " % .8f", B.columns[c][static_cast<std::size_t>(r)]);
            out += buf;
        }
        out += "\n";
    }
    emit(o, out);
    return 0;
}

int cmd_split(const CommonOpts& o) {
    auto spec = resolve_spec(o);
    auto P = grm::make_provider(spec);
    auto pts = grm::sample_points(spec.domain, o.points, o.seed);
    auto split = grm::spectral_split(P, pts);
    const int probes = std::min<int>(8, static_cast<int>(pts.size()));
    std::vector<double> invol(split.eigenvalues.size(), 0.0);
    std::vector<double> geo(split.eigenvalues.size(), 0.0);
    for (int i = 0; i < probes; ++i) {
        auto res = grm::involutivity_residual(split, P, pts[static_cast<std::size_t>(i)]);
        for (std::size_t e = 0; e < res.size(); ++e) {
            invol[e] = std::max(invol[e], res[e].involutivity);
            geo[e] = std::max(geo[e], res[e].totally_geodesic);
        }
    }
    if (o.format == "json") {
        nlohmann::json doc;
        doc["spec"] = spec.name;
        doc["points"] = o.points;
        doc["seed"] = o.seed;
        doc["eigenvalues"] = split.eigenvalues;
        doc["multiplicities"] = split.multiplicities;
        doc["involutivity"] = invol;
        doc["totally_geodesic"] = geo;
        emit(o, doc.dump(2) + "\n");
        return 0;
    }
    std::string out = "spec: " + spec.name + "\n";
    char buf[128];
    for (std::size_t e = 0; e < split.eigenvalues.size(); ++e) {
        std::snprintf(buf, sizeof(buf),
                      "lambda % .6g  mult %d  involutivity %.3e  totally-geodesic %.3e\n",
                      split.eigenvalues[e], split.multiplicities[e], invol[e], geo[e]);
        out += buf;
    }
    emit(o, out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"verification engine for generalized Riemannian manifolds (G = g + F)"};
    app.require_subcommand(1);

    CommonOpts gen_o, ver_o, con_o, bas_o, spl_o;
    std::string suite = "all", con_point, bas_point;

    auto* gen = app.add_subcommand("generate", "write a builtin as a self-contained spec file");
    add_common(gen, gen_o, false);

    auto* ver = app.add_subcommand("verify", "run an identity suite and report residuals");
    add_common(ver, ver_o, true);
    ver->add_option("--suite", suite, "identity suite")
        ->check(CLI::IsMember({"emc", "hermitian", "acm", "para", "splitting", "all"}));

    auto* con = app.add_subcommand("connection",
                                   "emit connection, torsion, contorsion and dF tables");
    add_common(con, con_o, true);
    con->add_option("--point", con_point, "chart point, comma-separated");

    auto* bas = app.add_subcommand("basis", "pointwise basis block-diagonalizing A and Q");
    add_common(bas, bas_o, true);
    bas->add_option("--point", bas_point, "chart point, comma-separated");

    auto* spl = app.add_subcommand("split", "eigenvalue splitting of Q across sample points");
    add_common(spl, spl_o, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (gen->parsed()) return cmd_generate(gen_o);
        if (ver->parsed()) return cmd_verify(ver_o, suite);
        if (con->parsed()) return cmd_connection(con_o, con_point);
        if (bas->parsed()) return cmd_basis(bas_o, bas_point);
        if (spl->parsed()) return cmd_split(spl_o);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
