// igl: proof search, proof checking and countermodels for GL and IGL.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "igl/countermodel.hpp"
#include "igl/cutelim.hpp"
#include "igl/formula.hpp"
#include "igl/prover.hpp"
#include "igl/semantics.hpp"
#include "json.hpp"

using namespace igl;

namespace {

enum Exit { kOk = 0, kNo = 1, kUnknown = 2, kUsage = 3 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text << "\n";
        return;
    }
    std::ofstream out(path);
    if (!out) throw UsageError("cannot write " + path);
    out << text << "\n";
}

SystemId system_flag(const std::string& s) {
    if (s == "gl") return SystemId::K4;
    if (s == "igl") return SystemId::IK4;
    if (s == "migl") return SystemId::mIK4;
    try {
        return parse_system(s);
    } catch (const std::exception&) {
        throw UsageError("unknown system " + s + " (gl, igl or migl)");
    }
}

Formula formula_flag(const std::string& s) {
    try {
        return parse_formula(s);
    } catch (const std::exception& e) {
        throw UsageError(std::string("bad formula: ") + e.what());
    }
}

std::string proof_report(const CyclicProof& p) {
    LocalReport lr = check_local(p);
    std::ostringstream os;
    if (!lr.ok) {
        os << "invalid: local check failed";
        for (const auto& v : lr.violations) os << "\n  node " << v.node << ": " << v.message;
        return os.str();
    }
    ProgressReport pr = check_progress(p);
    if (!pr.progressing) {
        os << "invalid: cycle without progress through nodes";
        for (int n : pr.witness) os << " " << n;
        return os.str();
    }
    return "valid";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Proof search and countermodels for GL and intuitionistic GL"};
    app.require_subcommand(1, 1);
    bool pretty = false;
    app.add_flag("--pretty", pretty, "Indent JSON output");

    // prove
    auto* prove_cmd = app.add_subcommand("prove", "Search for a cyclic proof or a countermodel");
    std::string f_text, system = "igl", out_path, denier_path;
    SearchConfig cfg;
    bool no_fallback = false;
    prove_cmd->add_option("-f,--formula", f_text, "Formula")->required();
    prove_cmd->add_option("-s,--system", system, "gl, igl or migl")->capture_default_str();
    prove_cmd->add_option("--max-labels", cfg.max_labels, "Label bound")->capture_default_str();
    prove_cmd->add_option("--max-depth", cfg.max_depth, "Branch depth bound")->capture_default_str();
    prove_cmd->add_option("--max-nodes", cfg.max_nodes, "Search node bound")->capture_default_str();
    prove_cmd->add_flag("--no-cut-fallback", no_fallback, "igl: skip the cut-reduction route");
    prove_cmd->add_option("-o,--output", out_path, "Write the certificate or countermodel here");
    prove_cmd->add_option("--denier", denier_path, "Write the Denier tree here when refuted");

    // check-proof
    auto* check_cmd = app.add_subcommand("check-proof", "Check a cyclic proof certificate");
    std::string proof_path;
    check_cmd->add_option("file", proof_path, "Proof JSON")->required();

    // countermodel
    auto* cm_cmd = app.add_subcommand("countermodel", "Extract a Kripke countermodel from a Denier tree");
    std::string tree_path, cm_out;
    cm_cmd->add_option("file", tree_path, "Denier tree JSON")->required();
    cm_cmd->add_option("-o,--output", cm_out, "Write the countermodel here");

    // modelcheck
    auto* mc_cmd = app.add_subcommand("modelcheck", "Evaluate a formula at a world");
    std::string model_path, world, element;
    bool classical = false;
    mc_cmd->add_option("-m,--model", model_path, "Birelational, Kripke or countermodel JSON")->required();
    mc_cmd->add_option("-w,--world", world, "World name")->required();
    mc_cmd->add_option("-f,--formula", f_text, "Formula")->required();
    mc_cmd->add_option("-e,--element", element, "Element for the free variable (Kripke models)");
    mc_cmd->add_flag("--classical", classical, "Read -> and [] locally");

    // translate
    auto* tr_cmd = app.add_subcommand("translate", "First-order standard translation ST_x");
    std::string var = "x";
    tr_cmd->add_option("-f,--formula", f_text, "Formula")->required();
    tr_cmd->add_option("--var", var, "Free variable")->capture_default_str();

    // reduce-cut
    auto* rc_cmd = app.add_subcommand("reduce-cut", "Embed and reduce cuts to degree 1");
    int max_height = 12;
    std::string rc_out;
    rc_cmd->add_option("file", proof_path, "Proof JSON (mIK4 cut-free, or dIK4)")->required();
    rc_cmd->add_option("--max-height", max_height, "Largest bar height")->capture_default_str();
    rc_cmd->add_option("-o,--output", rc_out, "Write the reduced proof here");

    // enumerate-models
    auto* en_cmd = app.add_subcommand("enumerate-models", "Stream IGL birelational models as JSON lines");
    int max_worlds = 2;
    std::string atoms_text = "p";
    en_cmd->add_option("--max-worlds", max_worlds, "Largest model size")->capture_default_str();
    en_cmd->add_option("--atoms", atoms_text, "Comma-separated atoms")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*prove_cmd) {
            Formula f = formula_flag(f_text);
            cfg.system = system_flag(system);
            cfg.allow_cut_fallback = !no_fallback;
            SearchOutcome o = prove(f, cfg);
            std::cout << verdict_name(o.verdict);
            if (!o.reason.empty()) std::cout << " (" << o.reason << ")";
            std::cout << "\n";
            if (o.verdict == Verdict::Provable) {
                emit(out_path, proof_to_json(*o.proof, pretty));
                return kOk;
            }
            if (o.verdict == Verdict::Refutable) {
                if (!denier_path.empty()) emit(denier_path, denier_to_json(*o.denier, pretty));
                if (o.denier->system == SystemId::K4 || o.denier->system == SystemId::K) {
                    // classical refutations have no intuitionistic countermodel format
                    if (out_path.empty() && denier_path.empty()) emit("", denier_to_json(*o.denier, pretty));
                    return kNo;
                }
                Countermodel cm = extract_countermodel(*o.denier);
                emit(out_path, countermodel_to_json(cm, pretty));
                return kNo;
            }
            for (const auto& s : o.frontier) std::cout << "open: " << render_sequent(s) << "\n";
            return kUnknown;
        }
        if (*check_cmd) {
            std::string text = slurp(proof_path);
            CyclicProof p = proof_from_json(text);
            std::string verdict = proof_report(p);
            std::cout << verdict << "\n";
            return verdict == "valid" ? kOk : kNo;
        }
        if (*cm_cmd) {
            DenierTree d = denier_from_json(slurp(tree_path));
            if (auto why = validate_denier_tree(d)) {
                std::cout << "invalid Denier tree: " << *why << "\n";
                return kNo;
            }
            Countermodel cm = extract_countermodel(d);
            emit(cm_out, countermodel_to_json(cm, pretty));
            CountermodelCheck seg = verify_segments(cm, d);
            CountermodelCheck goal{true, ""};
            const Sequent& root = d.nodes[d.root].sequent;
            if (root.rhs.size() == 1 && root.rhs[0].labelled() && root.rhs[0].label() == kRootLabel)
                goal = verify_countermodel(cm.structure, cm.root, cm.env, root.rhs[0].formula());
            if (seg.ok && goal.ok) {
                std::cout << "verified\n";
                return kOk;
            }
            std::cout << "not verified: " << (seg.ok ? goal.message : seg.message) << "\n";
            return kNo;
        }
        if (*mc_cmd) {
            Formula f = formula_flag(f_text);
            auto j = nlohmann::ordered_json::parse(slurp(model_path));
            bool truth;
            if (j.contains("structure") || j.contains("domain")) {
                bool wrapped = j.contains("structure");
                KripkeStructure k = kripke_from_json((wrapped ? j["structure"] : j).dump());
                int w = k.world(world);
                Environment env;
                if (wrapped && j.contains("env"))
                    for (const auto& [l, e] : j["env"].items()) env[l] = e.get<std::string>();
                if (!element.empty()) env[kRootLabel] = element;
                if (!env.count(kRootLabel)) {
                    if (k.domain[w].empty()) throw UsageError("world " + world + " has an empty domain");
                    env[kRootLabel] = k.domain[w].front();
                }
                truth = kripke_satisfies(k, w, env, kRootLabel, f);
            } else {
                BirelModel m = model_from_json(j.dump());
                truth = birel_satisfies(m, m.world(world), f, classical);
            }
            std::cout << (truth ? "true" : "false") << "\n";
            return truth ? kOk : kNo;
        }
        if (*tr_cmd) {
            std::cout << render_fo(standard_translation(var, formula_flag(f_text))) << "\n";
            return kOk;
        }
        if (*rc_cmd) {
            CyclicProof p = proof_from_json(slurp(proof_path));
            if (p.system != SystemId::dIK4) p = embed_multisuccedent(p);
            std::cout << "embedded, degree " << degree_of(p) << "\n";
            for (int round = 0; degree_of(p) > 1; ++round) {
                DegreeReduction r = degree_reduce_bounded(p, max_height);
                if (r.unfinished || round > 64) {
                    std::cout << "Unfinished (" << r.note << ")\n";
                    emit(rc_out, proof_to_json(r.proof, pretty));
                    return kUnknown;
                }
                std::cout << "degree " << r.degree << " at bar height " << r.height << ", " << r.steps
                          << " rewrite steps\n";
                p = std::move(r.proof);
            }
            std::cout << "Reduced\n";
            emit(rc_out, proof_to_json(p, pretty));
            return kOk;
        }
        if (*en_cmd) {
            std::vector<std::string> atoms;
            std::stringstream ss(atoms_text);
            for (std::string a; std::getline(ss, a, ',');)
                if (!a.empty()) atoms.push_back(a);
            enumerate_igl_models(max_worlds, atoms, [&](const BirelModel& m) {
                std::cout << model_to_json(m, false) << "\n";
                return true;
            });
            return kOk;
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNo;
    }
    return kUsage;
}
