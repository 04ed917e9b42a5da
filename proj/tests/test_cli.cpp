// Runs the igl binary end to end and checks exit codes and output.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "fixtures.hpp"
#include "igl/countermodel.hpp"
#include "igl/cutelim.hpp"
#include "igl/proof.hpp"
#include "igl/semantics.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace igl;

namespace {

struct Outcome {
    int code;
    std::string out;
};

Outcome run(const std::string& args) {
    std::string cmd = std::string(IGL_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    std::string out;
    std::array<char, 4096> buf{};
    while (std::size_t n = fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
    int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string quote(const std::string& s) { return "'" + s + "'"; }

fs::path scratch(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / "igl_cli_test";
    fs::create_directories(dir);
    return dir / name;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string read(const fs::path& p) {
    std::ifstream in(p);
    return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST(Cli, ProvesLoebInIgl) {
    fs::path out = scratch("loeb.json");
    Outcome r = run("prove -f " + quote(fixtures::kLoeb) + " -o " + out.string());
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("Provable"), std::string::npos);
    CyclicProof p = proof_from_json(read(out));
    EXPECT_TRUE(check_local(p).ok);
    EXPECT_TRUE(check_progress(p).progressing);
}

TEST(Cli, RefutesContraLoebWithCountermodel) {
    fs::path out = scratch("cm.json");
    Outcome r = run("prove -s igl -f " + quote(fixtures::kContraLoeb) + " -o " + out.string());
    EXPECT_EQ(r.code, 1) << r.out;
    EXPECT_NE(r.out.find("Refutable"), std::string::npos);
    auto j = nlohmann::ordered_json::parse(read(out));
    KripkeStructure k = kripke_from_json(j["structure"].dump());
    Environment env;
    for (const auto& [l, e] : j["env"].items()) env[l] = e.get<std::string>();
    int root = k.world(j["root"].get<std::string>());
    EXPECT_TRUE(verify_countermodel(k, root, env, parse_formula(fixtures::kContraLoeb)).ok);
}

TEST(Cli, ProvesContraLoebClassically) {
    Outcome r = run("prove -s gl -f " + quote(fixtures::kContraLoeb) + " -o " + scratch("gl.json").string());
    EXPECT_EQ(r.code, 0) << r.out;
}

TEST(Cli, ChecksProofFiles) {
    fs::path good = scratch("fig.json");
    write(good, proof_to_json(fixtures::loeb_certificate(), false));
    Outcome r = run("check-proof " + good.string());
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("valid"), std::string::npos);

    CyclicProof broken = fixtures::loeb_certificate();
    broken.nodes[6].sequent.rel.clear();
    fs::path bad = scratch("broken.json");
    write(bad, proof_to_json(broken, false));
    r = run("check-proof " + bad.string());
    EXPECT_EQ(r.code, 1) << r.out;
    EXPECT_NE(r.out.find("invalid"), std::string::npos);
}

TEST(Cli, ModelchecksExample3) {
    fs::path m = scratch("ex3.json");
    write(m, model_to_json(fixtures::example3_model(), false));
    Outcome r = run("modelcheck -m " + m.string() + " -w w1 -f " + quote(fixtures::kContraLoeb));
    EXPECT_EQ(r.code, 1);
    EXPECT_EQ(r.out, "false\n");
    r = run("modelcheck -m " + m.string() + " -w w1 -f '<>p'");
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "true\n");
}

TEST(Cli, Translates) {
    Outcome r = run("translate -f '[]p -> p'");
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("p(x)"), std::string::npos);
    EXPECT_NE(r.out.find("x R "), std::string::npos);
}

TEST(Cli, BadFormulaIsUsageError) {
    Outcome r = run("prove -f 'p &'");
    EXPECT_EQ(r.code, 3);
    EXPECT_NE(r.out.find("bad formula"), std::string::npos);
    EXPECT_EQ(run("prove -s nope -f p").code, 3);
    EXPECT_EQ(run("frobnicate").code, 3);
}

TEST(Cli, EnumeratesModels) {
    Outcome r = run("enumerate-models --max-worlds 2 --atoms p");
    EXPECT_EQ(r.code, 0);
    int lines = 0;
    std::size_t start = 0;
    for (std::size_t nl; (nl = r.out.find('\n', start)) != std::string::npos; start = nl + 1) {
        BirelModel m = model_from_json(r.out.substr(start, nl - start));
        EXPECT_TRUE(check_igl_birel_class(m).ok);
        ++lines;
    }
    EXPECT_GT(lines, 2);
}

TEST(Cli, ReducesCuts) {
    fs::path in = scratch("migl.json"), out = scratch("reduced.json");
    ASSERT_EQ(run("prove -s migl -f " + quote(fixtures::kLoeb) + " -o " + in.string()).code, 0);
    Outcome r = run("reduce-cut " + in.string() + " -o " + out.string());
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("Reduced"), std::string::npos);
    CyclicProof p = proof_from_json(read(out));
    EXPECT_LE(degree_of(p), 1);
    EXPECT_TRUE(check_local(p).ok);
    EXPECT_TRUE(check_progress(p).progressing);
}
