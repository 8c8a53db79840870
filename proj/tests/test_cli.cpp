#include "bfdr/cli.hpp"

#include "bfdr/fdr_control.hpp"
#include "bfdr/tsv.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using namespace bfdr;

namespace {

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::path(BFDR_TEST_TMP) / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write(const fs::path& p, const std::string& text)
{
    std::ofstream(p) << text;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args)
{
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string comment_value(const std::string& report, const std::string& key)
{
    std::istringstream in(report);
    std::string line;
    const std::string prefix = "# " + key + "\t";
    while (std::getline(in, line))
        if (line.rfind(prefix, 0) == 0)
            return line.substr(prefix.size());
    return {};
}

} // namespace

TEST_CASE("bf computes Bayes factors from z and se")
{
    const fs::path dir = scratch("bf_basic");
    write(dir / "in.tsv", "# comment\nid\tz\tse\na\t0\t1\nb\t2\t1\n");
    const Result r = run({"bf", "-i", (dir / "in.tsv").string(), "-o", (dir / "out.tsv").string(), "--omega-grid", "1",
                          "--json"});
    REQUIRE(r.code == 0);
    const tsv::Table t = tsv::read_file(dir / "out.tsv");
    REQUIRE(t.rows.size() == 2);
    CHECK(tsv::parse_double(t, t.rows[0], t.require("bf")) == doctest::Approx(0.7071067811865476).epsilon(1e-15));
    CHECK(tsv::parse_double(t, t.rows[1], t.require("log_bf")) ==
          doctest::Approx(1.0 + 0.5 * std::log(0.5)).epsilon(1e-15));
    CHECK(fs::exists(dir / "out.tsv.json"));
}

TEST_CASE("bf input errors exit with status 2")
{
    const fs::path dir = scratch("bf_errors");
    write(dir / "header.tsv", "id\tzz\tse\na\t0\t1\n");
    const Result missing = run({"bf", "-i", (dir / "header.tsv").string(), "-o", (dir / "o.tsv").string()});
    CHECK(missing.code == 2);
    CHECK(missing.err.find("missing column 'z'") != std::string::npos);

    write(dir / "empty.tsv", "id\tz\tse\n");
    const Result empty = run({"bf", "-i", (dir / "empty.tsv").string(), "-o", (dir / "o.tsv").string()});
    CHECK(empty.code == 2);
    CHECK(empty.err.find("no tests") != std::string::npos);

    write(dir / "bad.tsv", "id\tz\tse\na\t0\t1\nb\tabc\t1\n");
    const Result bad = run({"bf", "-i", (dir / "bad.tsv").string(), "-o", (dir / "o.tsv").string()});
    CHECK(bad.code == 2);
    CHECK(bad.err.find(":3:") != std::string::npos);
    CHECK_FALSE(fs::exists(dir / "o.tsv"));
    CHECK_FALSE(fs::exists(dir / "o.tsv.partial"));

    CHECK(run({"bf", "-i", (dir / "nope.tsv").string(), "-o", (dir / "o.tsv").string()}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
}

TEST_CASE("bf reads per-gene phenotype and genotype files")
{
    const fs::path dir = scratch("bf_gene");
    write(dir / "y.txt", "1.2\n0.3\n2.2\n-0.4\n1.0\n0.1\n");
    write(dir / "g.txt", "0 1\n1 1\n2 0\n0 2\n1 0\n0 1\n");
    write(dir / "in.tsv", "id\ty_file\tg_file\ng1\ty.txt\tg.txt\n");
    const Result r = run({"bf", "-i", (dir / "in.tsv").string(), "-o", (dir / "out.tsv").string()});
    REQUIRE(r.code == 0);
    const tsv::Table t = tsv::read_file(dir / "out.tsv");
    CHECK(std::isfinite(tsv::parse_double(t, t.rows[0], t.require("log_bf"))));
}

TEST_CASE("fdr ebf report")
{
    const fs::path dir = scratch("fdr_ebf");
    write(dir / "in.tsv", "id\tbf\na\t0.5\nb\t0.8\nc\t2.0\n");
    const Result r = run({"fdr", "-i", (dir / "in.tsv").string(), "-o", (dir / "rep.tsv").string(), "--method", "ebf"});
    REQUIRE(r.code == 0);
    const std::string rep = slurp(dir / "rep.tsv");
    CHECK(std::stod(comment_value(rep, "pi0_hat")) == doctest::Approx(2.0 / 3.0));
    CHECK(comment_value(rep, "d0") == "2");
    CHECK(comment_value(rep, "n_rejected") == "0");
    CHECK(r.out.find("0.666667") != std::string::npos);
}

TEST_CASE("fdr method and column mismatches exit with status 2")
{
    const fs::path dir = scratch("fdr_mismatch");
    write(dir / "in.tsv", "id\tbf\na\t0.5\nb\t0.8\n");
    CHECK(run({"fdr", "-i", (dir / "in.tsv").string(), "-o", (dir / "r.tsv").string(), "--method", "qbf"}).code == 2);
    CHECK(run({"fdr", "-i", (dir / "in.tsv").string(), "-o", (dir / "r.tsv").string(), "--method", "bh"}).code == 2);
    CHECK(run({"fdr", "-i", (dir / "in.tsv").string(), "-o", (dir / "r.tsv").string(), "--method", "nope"}).code == 2);
    write(dir / "neg.tsv", "id\tbf\na\t-0.5\n");
    const Result neg = run({"fdr", "-i", (dir / "neg.tsv").string(), "-o", (dir / "r.tsv").string(), "--method", "ebf"});
    CHECK(neg.code == 2);
    CHECK(neg.err.find("bf must be positive") != std::string::npos);
}

TEST_CASE("fdr bh passes through to the decision rule")
{
    const fs::path dir = scratch("fdr_bh");
    const std::vector<double> p{0.001, 0.02, 0.9, 0.04, 0.011, 0.5};
    std::string text = "id\tp\n";
    std::vector<PValue> pv;
    for (std::size_t i = 0; i < p.size(); ++i) {
        text += "t" + std::to_string(i) + "\t" + tsv::format_full(p[i]) + "\n";
        pv.push_back({"t" + std::to_string(i), p[i]});
    }
    write(dir / "in.tsv", text);
    REQUIRE(run({"fdr", "-i", (dir / "in.tsv").string(), "-o", (dir / "r.tsv").string(), "--method", "bh"}).code == 0);
    const tsv::Table t = tsv::read_file(dir / "r.tsv");
    std::vector<std::string> rejected;
    for (const auto& row : t.rows)
        if (row.fields[t.require("rejected")] == "1")
            rejected.push_back(row.fields[0]);
    CHECK(rejected == bh_decide(pv, 0.05).rejected);
}

TEST_CASE("sim output is deterministic and round-trips through fdr")
{
    const fs::path dir = scratch("sim");
    const std::vector<std::string> base{"sim", "--scenario", "I", "--m", "400", "--pi0", "0.7", "--reps", "2",
                                        "--seed", "9", "--json", "--output-dir"};
    auto a = base, b = base;
    a.push_back((dir / "a").string());
    b.push_back((dir / "b").string());
    REQUIRE(run(a).code == 0);
    REQUIRE(run(b).code == 0);
    for (const char* f : {"rep_001.tsv", "rep_002.tsv", "rep_001_eval.tsv", "aggregate.tsv", "aggregate.json"})
        CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
    CHECK_FALSE(fs::exists(dir / "a" / ".bfdr-staging"));

    for (const char* method : {"ebf", "qbf", "bh", "storey"}) {
        const Result r = run({"fdr", "-i", (dir / "a" / "rep_001.tsv").string(), "-o",
                              (dir / (std::string(method) + ".tsv")).string(), "--method", method});
        CHECK(r.code == 0);
    }
    // The EBF pi0 in the evaluation file matches the fdr report.
    const tsv::Table eval = tsv::read_file(dir / "a" / "rep_001_eval.tsv");
    const std::string rep = slurp(dir / "ebf.tsv");
    CHECK(eval.rows[0].fields[0] == "EBF");
    CHECK(std::stod(eval.rows[0].fields[1]) == std::stod(comment_value(rep, "pi0_hat")));
    CHECK(std::stoul(eval.rows[0].fields[2]) == std::stoul(comment_value(rep, "n_rejected")));
}

TEST_CASE("sim argument errors exit with status 2")
{
    const fs::path dir = scratch("sim_err");
    CHECK(run({"sim", "--scenario", "I", "--reps", "0", "--output-dir", dir.string()}).code == 2);
    CHECK(run({"sim", "--scenario", "III", "--output-dir", dir.string()}).code == 2);
    CHECK(run({"sim", "--scenario", "I", "--maf-low", "0.4", "--maf-high", "0.1", "--output-dir", dir.string()})
              .code == 2);
    CHECK(fs::is_empty(dir));
}

TEST_CASE("sim scenario II writes permutation columns and qbf reads them back")
{
    const fs::path dir = scratch("sim2");
    REQUIRE(run({"sim", "--scenario", "II", "--m", "30", "--pi0", "0.5", "--reps", "1", "--perms", "20,40",
                 "--pvalue-perms", "40", "--output-dir", dir.string()})
                .code == 0);
    const tsv::Table t = tsv::read_file(dir / "rep_001.tsv");
    CHECK(t.has("null_q_20"));
    CHECK(t.has("null_q_40"));
    CHECK(t.has("p_minp"));
    CHECK(run({"fdr", "-i", (dir / "rep_001.tsv").string(), "-o", (dir / "q.tsv").string(), "--method", "qbf"})
              .code == 0);
}

TEST_CASE("fdr qbf with permutations on gene files")
{
    const fs::path dir = scratch("fdr_perm");
    write(dir / "y.txt", "1.2 0.3 2.2 -0.4 1.0 0.1 0.7 1.9\n");
    write(dir / "g.txt", "0 1\n1 1\n2 0\n0 2\n1 0\n0 1\n2 2\n1 0\n");
    write(dir / "in.tsv", "id\ty_file\tg_file\ng1\ty.txt\tg.txt\ng2\ty.txt\tg.txt\n");
    const std::vector<std::string> args{"fdr", "-i", (dir / "in.tsv").string(), "-o", (dir / "r.tsv").string(),
                                        "--method", "qbf", "--perms", "50", "--seed", "4"};
    REQUIRE(run(args).code == 0);
    const std::string first = slurp(dir / "r.tsv");
    REQUIRE(run(args).code == 0);
    CHECK(slurp(dir / "r.tsv") == first);
}
