// qmrank: evaluate rank generating multisums at roots of unity and verify
// their quantum modular transformation behaviour.  Every subcommand prints
// one JSON document on stdout; human-readable notes go to stderr.  Exit
// code 0 means every asserted tolerance was met.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <qmrank/qmrank.hpp>

using nlohmann::json;
using namespace qmrank;

namespace {

json cplx_json(const cplx& z) { return json::array({z.real(), z.imag()}); }

json residual_json(const std::vector<ResidualEntry>& table)
{
    json out = json::array();
    for (const auto& e : table)
        out.push_back({{"name", e.name},
                       {"residual", e.residual},
                       {"tolerance", e.tolerance},
                       {"pass", e.pass()}});
    return out;
}

struct Emitter {
    std::string command;
    json inputs = json::object();
    json outputs = json::object();
    json residuals = json::array();
    std::vector<std::string> errors;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    int finish(bool ok)
    {
        const double ms = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - start)
                              .count();
        json doc{{"command", command}, {"inputs", inputs},       {"outputs", outputs},
                 {"residuals", residuals}, {"errors", errors}, {"timing_ms", ms}};
        std::cout << doc.dump(2) << "\n";
        return ok && errors.empty() ? 0 : 1;
    }

    int fail(const std::string& message)
    {
        errors.push_back(message);
        std::cerr << "error: " << message << "\n";
        return finish(false);
    }
};

std::vector<double> parse_heights(const std::string& text)
{
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto comma = text.find(',', pos);
        if (comma == std::string::npos) comma = text.size();
        out.push_back(std::stod(text.substr(pos, comma - pos)));
        pos = comma + 1;
    }
    return out;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"rank generating multisums at roots of unity and their quantum modularity"};
    app.set_config("--config", "", "flags from a file, one `key = value` per line");
    app.require_subcommand(1);

    int threads = 1;
    app.add_option("--threads", threads, "worker threads for the finite sums")
        ->capture_default_str();

    std::string zeta_str, x_str = "1/3", word = "S", heights_str;
    std::string mode = "finite";
    int kmax = 12, samples = 8;
    std::uint64_t seed = 20240814, grid_seed = 20240814;
    double tol = 1e-5;

    auto* validate = app.add_subcommand("validate-zeta", "check the root-of-unity vector invariants");
    validate->add_option("--zeta", zeta_str, "comma list of reduced fractions a/b")->required();

    auto* qset = app.add_subcommand("qset", "quantum set membership and enumeration");
    auto* qcheck = qset->add_subcommand("check", "test one rational");
    qcheck->add_option("--zeta", zeta_str)->required();
    qcheck->add_option("--x", x_str, "rational h/k")->required();
    auto* qpool = qset->add_subcommand("pool", "enumerate members with small denominator");
    qpool->add_option("--zeta", zeta_str)->required();
    qpool->add_option("--kmax", kmax, "largest denominator");

    auto* eval = app.add_subcommand("eval", "evaluate the rank multisum");
    auto* evalrn = eval->add_subcommand("rn", "R_n at a quantum rational");
    evalrn->add_option("--zeta", zeta_str)->required();
    evalrn->add_option("--x", x_str)->required();
    evalrn->add_option("--mode", mode, "finite | radial");
    evalrn->add_option("--heights", heights_str, "radial mode: comma list of t in (0,1)");

    auto* verify = app.add_subcommand("verify", "identity batteries and the cocycle check");
    auto* v_eta = verify->add_subcommand("eta", "eta multiplier identities");
    v_eta->add_option("--grid-seed", grid_seed);
    auto* v_zw = verify->add_subcommand("zwegers", "theta/R/g/Appell transformation battery");
    v_zw->add_option("--grid-seed", grid_seed);
    auto* v_ap = verify->add_subcommand("appell", "completed Appell elliptic shifts");
    v_ap->add_option("--grid-seed", grid_seed);
    auto* v_qmf = verify->add_subcommand("qmf", "two-way cocycle verification");
    v_qmf->add_option("--zeta", zeta_str)->required();
    v_qmf->add_option("--x", x_str)->required();
    v_qmf->add_option("--word", word, "word in S, T (s, t for inverses)");
    v_qmf->add_option("--tol", tol, "two-way agreement tolerance");
    v_qmf->add_option("--samples", samples);
    v_qmf->add_option("--seed", seed);

    auto* pid = app.add_subcommand("pi-dagger", "fit the Appell decomposition constants");
    pid->add_option("--zeta", zeta_str)->required();
    pid->add_option("--samples", samples);
    pid->add_option("--seed", seed);

    CLI11_PARSE(app, argc, argv);

    if (const char* env = std::getenv("QMF_THREADS")) threads = std::atoi(env);
    if (threads < 1) threads = 1;

    Emitter em;
    try {
        if (validate->parsed()) {
            em.command = "validate-zeta";
            em.inputs["zeta"] = zeta_str;
            try {
                const RootVector zeta = RootVector::parse(zeta_str);
                em.outputs["valid"] = true;
                em.outputs["n"] = zeta.size();
                em.outputs["ell"] = ell_of(zeta);
                return em.finish(true);
            } catch (const domain_error& ex) {
                em.outputs["valid"] = false;
                return em.fail(ex.what());
            }
        }

        if (qcheck->parsed()) {
            em.command = "qset check";
            em.inputs = {{"zeta", zeta_str}, {"x", x_str}};
            const RootVector zeta = RootVector::parse(zeta_str);
            const auto chk = check_quantum_set(zeta, Rational::parse(x_str));
            em.outputs["member"] = chk.member;
            if (!chk.member) em.outputs["violated"] = chk.violated;
            return em.finish(true);
        }

        if (qpool->parsed()) {
            em.command = "qset pool";
            em.inputs = {{"zeta", zeta_str}, {"kmax", kmax}};
            const RootVector zeta = RootVector::parse(zeta_str);
            json members = json::array();
            for (const auto& x : quantum_pool(zeta, kmax, kmax)) members.push_back(x.str());
            em.outputs["members"] = members;
            return em.finish(true);
        }

        if (evalrn->parsed()) {
            em.command = "eval rn";
            em.inputs = {{"zeta", zeta_str}, {"x", x_str}, {"mode", mode}};
            const RootVector zeta = RootVector::parse(zeta_str);
            const Rational x = Rational::parse(x_str);
            if (mode == "finite") {
                const RnEvaluation ev = rn_finite_sum(zeta, x, threads);
                em.outputs["value"] = cplx_json(ev.value);
                em.outputs["mode"] = "finite-sum";
                em.outputs["term_count"] = ev.term_count;
                em.outputs["error_estimate"] = ev.error_estimate;
            } else if (mode == "radial") {
                std::vector<double> heights;
                if (heights_str.empty())
                    for (int m = 3; m <= 10; ++m) heights.push_back(1.0 - std::pow(2.0, -m));
                else
                    heights = parse_heights(heights_str);
                const auto probe = radial_limit_probe(zeta, x, heights);
                json seq = json::array();
                for (std::size_t i = 0; i < probe.size(); ++i)
                    seq.push_back({{"t", heights[i]},
                                   {"value", cplx_json(probe[i].value)},
                                   {"term_count", probe[i].term_count},
                                   {"tail_estimate", probe[i].error_estimate}});
                em.outputs["mode"] = "truncated-multisum";
                em.outputs["sequence"] = seq;
            } else {
                return em.fail("eval rn: mode must be finite or radial");
            }
            return em.finish(true);
        }

        if (v_eta->parsed() || v_zw->parsed() || v_ap->parsed()) {
            std::vector<ResidualEntry> table;
            if (v_eta->parsed()) {
                em.command = "verify eta";
                table = verify_eta_battery(2400, 100, 20, grid_seed);
            } else if (v_zw->parsed()) {
                em.command = "verify zwegers";
                table = verify_zwegers_battery(25, grid_seed, true);
            } else {
                em.command = "verify appell";
                table = verify_appell_battery(25, grid_seed);
            }
            em.inputs["grid_seed"] = grid_seed;
            em.residuals = residual_json(table);
            em.outputs["max_residual"] = max_residual(table);
            em.outputs["all_pass"] = all_pass(table);
            return em.finish(all_pass(table));
        }

        if (v_qmf->parsed()) {
            em.command = "verify qmf";
            em.inputs = {{"zeta", zeta_str}, {"x", x_str}, {"word", word}, {"tol", tol}};
            const RootVector zeta = RootVector::parse(zeta_str);
            const Rational x = Rational::parse(x_str);
            const long long ell = ell_of(zeta);
            std::cerr << "fitting the Appell decomposition constants...\n";
            const PiDaggerSolution pi = solve_pi_dagger(zeta, samples, seed);
            std::cerr << "held-out residual " << pi.residual << "; computing the cocycle...\n";
            const CocycleReport rep =
                verify_cocycle(zeta, GroupWord(word, ell), x, pi, 1e-9, threads);
            em.outputs["ell"] = ell;
            em.outputs["direct_value"] = cplx_json(rep.direct_value);
            if (rep.has_closed_form) {
                em.outputs["closed_form_value"] = cplx_json(rep.closed_form_value);
                em.outputs["closed_form_alt_weighting"] = cplx_json(rep.closed_form_alt);
                em.outputs["integral_error_estimate"] = rep.integral_error_estimate;
                em.residuals = json::array(
                    {{{"name", "two-way cocycle"}, {"residual", rep.residual}, {"tolerance", tol},
                      {"pass", rep.residual < tol}}});
                em.outputs["alt_weighting_residual"] = rep.alt_residual;
                return em.finish(rep.residual < tol);
            }
            em.outputs["closed_form_value"] = nullptr; // only S and T words have one
            return em.finish(true);
        }

        if (pid->parsed()) {
            em.command = "pi-dagger";
            em.inputs = {{"zeta", zeta_str}, {"samples", samples}, {"seed", seed}};
            const RootVector zeta = RootVector::parse(zeta_str);
            const PiDaggerSolution sol = solve_pi_dagger(zeta, samples, seed);
            json cs = json::array(), pis = json::array();
            for (const auto& c : sol.c) cs.push_back(cplx_json(c));
            for (const auto& p : sol.pi_dagger) pis.push_back(cplx_json(p));
            em.outputs["c"] = cs;
            em.outputs["pi_dagger"] = pis;
            em.outputs["residual"] = sol.residual;
            em.outputs["sample_count"] = sol.sample_count;
            em.outputs["usable"] = sol.usable;
            return em.finish(sol.usable);
        }
    } catch (const error& ex) {
        return em.fail(ex.what());
    } catch (const std::exception& ex) {
        return em.fail(std::string("unexpected: ") + ex.what());
    }
    return em.fail("no subcommand dispatched");
}
