#include "bfdr/cli.hpp"

#include "bfdr/bayes_factor.hpp"
#include "bfdr/fdr_control.hpp"
#include "bfdr/model.hpp"
#include "bfdr/numeric.hpp"
#include "bfdr/parallel.hpp"
#include "bfdr/permutation.hpp"
#include "bfdr/pi0.hpp"
#include "bfdr/study.hpp"
#include "bfdr/tsv.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

namespace bfdr::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::uint64_t default_seed()
{
    if (const char* env = std::getenv("BFDR_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw UsageError(std::string("BFDR_SEED is not an unsigned integer: ") + env);
        }
    }
    return 1;
}

OmegaGrid parse_grid(const std::string& csv)
{
    std::vector<double> values;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t used = 0;
            values.push_back(std::stod(tok, &used));
            if (used != tok.size())
                throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw UsageError("--omega-grid: not a number: '" + tok + "'");
        }
    }
    return OmegaGrid(std::move(values));
}

const std::string kDefaultGrid = "0.1,0.2,0.4,0.8,1.6";

// ---------------------------------------------------------------------------
// input loading

Eigen::VectorXd load_vector(const fs::path& path)
{
    const auto rows = tsv::read_matrix_file(path);
    std::vector<double> flat;
    if (rows.size() == 1) {
        flat = rows.front();
    } else if (rows.front().size() == 1) {
        for (const auto& r : rows)
            flat.push_back(r.front());
    } else {
        throw tsv::ParseError(path.string(), 1, "phenotype file must hold a single row or column");
    }
    return Eigen::Map<const Eigen::VectorXd>(flat.data(), static_cast<Eigen::Index>(flat.size()));
}

Eigen::MatrixXd load_matrix(const fs::path& path)
{
    const auto rows = tsv::read_matrix_file(path);
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return m;
}

struct GeneInputs {
    std::size_t y_col = 0;
    std::size_t g_col = 0;
    fs::path base;
};

std::optional<GeneInputs> gene_columns(const tsv::Table& table, const fs::path& input)
{
    if (!table.has("y_file") && !table.has("g_file"))
        return std::nullopt;
    return GeneInputs{table.require("y_file"), table.require("g_file"), input.parent_path()};
}

GeneData load_gene(const tsv::Table& table, const tsv::Row& row, std::size_t id_col, const GeneInputs& cols)
{
    GeneData gene;
    gene.id = row.fields[id_col];
    gene.y = load_vector(cols.base / row.fields[cols.y_col]);
    gene.genotypes = load_matrix(cols.base / row.fields[cols.g_col]);
    if (gene.y.size() != gene.genotypes.rows())
        throw tsv::ParseError(table.source, row.line,
                              "phenotype has " + std::to_string(gene.y.size()) + " samples but genotype file has " +
                                  std::to_string(gene.genotypes.rows()) + " rows");
    return gene;
}

double gene_sigma(const GeneData& gene, double sigma, bool estimate)
{
    if (!estimate)
        return sigma;
    // Residual sd under the null model.
    const double mean = gene.y.mean();
    const double ss = (gene.y.array() - mean).square().sum();
    const double s = std::sqrt(ss / static_cast<double>(gene.y.size() - 1));
    if (!(s > 0.0))
        throw NumericalError("cannot estimate sigma for '" + gene.id + "': constant phenotype");
    return s;
}

void require_rows(const tsv::Table& table)
{
    if (table.rows.empty())
        throw UsageError(table.source + ": no tests");
}

void check_unique_ids(const tsv::Table& table, std::size_t id_col)
{
    std::set<std::string> seen;
    for (const auto& row : table.rows)
        if (!seen.insert(row.fields[id_col]).second)
            throw tsv::ParseError(table.source, row.line, "duplicate id '" + row.fields[id_col] + "'");
}

void write_json(const fs::path& path, const json& doc)
{
    tsv::AtomicFile f(path);
    f.stream() << std::setw(2) << doc << '\n';
    f.commit();
}

fs::path json_path(const fs::path& output)
{
    fs::path p = output;
    p += ".json";
    return p;
}

// ---------------------------------------------------------------------------
// bf

struct BfOptions {
    std::string input;
    std::string output;
    double sigma = 1.0;
    bool estimate_sigma = false;
    std::string grid = kDefaultGrid;
    unsigned threads = 0;
    bool json = false;
};

int cmd_bf(const BfOptions& o, std::ostream& out)
{
    const OmegaGrid grid = parse_grid(o.grid);
    const tsv::Table table = tsv::read_file(o.input);
    const std::size_t id_col = table.require("id");
    const auto genes = gene_columns(table, o.input);
    std::optional<std::size_t> z_col, se_col;
    if (!genes) {
        z_col = table.require("z");
        se_col = table.require("se");
    }
    require_rows(table);
    check_unique_ids(table, id_col);

    const std::size_t m = table.rows.size();
    std::vector<double> log_bf(m);
    if (z_col) {
        for (std::size_t i = 0; i < m; ++i) {
            const auto& row = table.rows[i];
            const double z = tsv::parse_double(table, row, *z_col);
            const double se = tsv::parse_double(table, row, *se_col);
            if (!std::isfinite(z))
                throw tsv::ParseError(table.source, row.line, "z must be finite");
            if (!(se > 0.0) || !std::isfinite(se))
                throw tsv::ParseError(table.source, row.line, "se must be positive");
            log_bf[i] = log_bf_averaged(z, se, grid);
        }
    } else {
        parallel_for(m, o.threads, [&](std::size_t i) {
            const GeneData gene = load_gene(table, table.rows[i], id_col, *genes);
            const GeneModel model(gene.genotypes, gene_sigma(gene, o.sigma, o.estimate_sigma), grid);
            log_bf[i] = observed_statistics(gene, model).log_bf;
        });
    }

    tsv::AtomicFile f(o.output);
    f.stream() << "id\tlog_bf\tbf\n";
    json tests = json::array();
    for (std::size_t i = 0; i < m; ++i) {
        if (!std::isfinite(log_bf[i]))
            throw NumericalError("non-finite log Bayes factor for '" + table.rows[i].fields[id_col] + "'");
        const std::string& id = table.rows[i].fields[id_col];
        const double bf = std::exp(log_bf[i]);
        f.stream() << id << '\t' << tsv::format_full(log_bf[i]) << '\t' << tsv::format_full(bf) << '\n';
        if (o.json)
            tests.push_back({{"id", id}, {"log_bf", log_bf[i]}, {"bf", std::isfinite(bf) ? json(bf) : json("inf")}});
    }
    f.commit();
    if (o.json)
        write_json(json_path(o.output), {{"command", "bf"}, {"omega_grid", grid.values()}, {"tests", tests}});
    out << "wrote " << m << " Bayes factors to " << o.output << '\n';
    return kSuccess;
}

// ---------------------------------------------------------------------------
// fdr

struct FdrOptions {
    std::string input;
    std::string output;
    std::string method;
    double alpha = 0.05;
    double gamma = kDefaultGamma;
    std::size_t perms = 0;
    std::uint64_t seed = 1;
    double sigma = 1.0;
    std::string grid = kDefaultGrid;
    unsigned threads = 0;
    bool json = false;
};

std::vector<TestRecord> read_records(const tsv::Table& table, std::size_t id_col,
                                     const std::optional<GeneInputs>& genes, const FdrOptions& o,
                                     const OmegaGrid& grid)
{
    const std::size_t m = table.rows.size();
    std::vector<TestRecord> records(m);
    if (auto c = table.column("log_bf")) {
        for (std::size_t i = 0; i < m; ++i)
            records[i] = TestRecord::from_log_bf(table.rows[i].fields[id_col],
                                                 tsv::parse_double(table, table.rows[i], *c));
    } else if (auto c = table.column("bf")) {
        for (std::size_t i = 0; i < m; ++i)
            records[i] = TestRecord::from_bf(table.rows[i].fields[id_col],
                                             tsv::parse_double(table, table.rows[i], *c));
    } else if (genes) {
        parallel_for(m, o.threads, [&](std::size_t i) {
            const GeneData gene = load_gene(table, table.rows[i], id_col, *genes);
            const GeneModel model(gene.genotypes, o.sigma, grid);
            records[i] = TestRecord::from_log_bf(gene.id, observed_statistics(gene, model).log_bf);
        });
    } else {
        table.require("bf");
    }
    try {
        validate_records(records);
    } catch (const ValidationError& e) {
        throw tsv::ParseError(table.source, table.rows[e.index()].line, e.what());
    }
    return records;
}

std::vector<double> read_column(const tsv::Table& table, std::size_t col)
{
    std::vector<double> v;
    v.reserve(table.rows.size());
    for (const auto& row : table.rows)
        v.push_back(tsv::parse_double(table, row, col));
    return v;
}

json pi0_json(const Pi0Estimate& e)
{
    json j{{"method", std::string(to_string(e.method))}, {"pi0_hat", e.pi0_hat}, {"m", e.m}};
    if (e.gamma)
        j["gamma"] = *e.gamma;
    if (e.d0)
        j["d0"] = *e.d0;
    if (e.empty_prefix)
        j["empty_prefix"] = true;
    return j;
}

void write_pi0_header(std::ostream& s, const Pi0Estimate& e)
{
    s << "# method\t" << to_string(e.method) << '\n';
    s << "# pi0_hat\t" << tsv::format_full(e.pi0_hat) << '\n';
    s << "# m\t" << e.m << '\n';
    if (e.gamma)
        s << "# gamma\t" << tsv::format_full(*e.gamma) << '\n';
    if (e.d0)
        s << "# d0\t" << *e.d0 << '\n';
    if (e.empty_prefix)
        s << "# warning\tno prefix of sorted Bayes factors has mean below 1; pi0_hat set to 0\n";
}

std::string join(const std::vector<std::string>& ids)
{
    std::string s;
    for (const auto& id : ids) {
        if (!s.empty())
            s += ',';
        s += id;
    }
    return s;
}

int cmd_fdr(const FdrOptions& o, std::ostream& out)
{
    const OmegaGrid grid = parse_grid(o.grid);
    const tsv::Table table = tsv::read_file(o.input);
    const std::size_t id_col = table.require("id");
    const auto genes = gene_columns(table, o.input);
    check_unique_ids(table, id_col);
    const bool bayes = o.method == "ebf" || o.method == "qbf";

    if (o.method == "qbf" && !table.has("null_q") && !(o.perms > 0 && genes))
        throw UsageError("method qbf requires a null_q column or --perms with y_file/g_file columns");
    if (!bayes && !table.has("p"))
        throw UsageError("method " + o.method + " requires a p column");
    require_rows(table);

    const std::size_t m = table.rows.size();
    std::vector<std::string> ids;
    ids.reserve(m);
    for (const auto& row : table.rows)
        ids.push_back(row.fields[id_col]);

    tsv::AtomicFile f(o.output);
    auto& s = f.stream();
    json doc{{"command", "fdr"}, {"method", o.method}, {"alpha", o.alpha}};
    json tests = json::array();

    if (bayes) {
        const std::vector<TestRecord> records = read_records(table, id_col, genes, o, grid);
        std::vector<double> bfs(m);
        for (std::size_t i = 0; i < m; ++i)
            bfs[i] = records[i].bf;

        Pi0Estimate pi0;
        if (o.method == "ebf") {
            pi0 = ebf_pi0(bfs);
        } else {
            std::vector<double> q;
            if (auto c = table.column("null_q")) {
                q = read_column(table, *c);
            } else {
                q.resize(m);
                const PermutationPlan plan{o.perms, o.seed, PermStatistic::GeneBf};
                parallel_for(m, o.threads, [&](std::size_t i) {
                    const GeneData gene = load_gene(table, table.rows[i], id_col, *genes);
                    q[i] = permute_null_quantile(gene, o.sigma, grid, o.gamma, plan);
                });
            }
            pi0 = qbf_pi0(bfs, q, o.gamma);
        }

        const PosteriorTable post = posterior_table(records, pi0);
        DecisionReport report = bfdr_decide(post, o.alpha);
        if (pi0.method == Pi0Method::EBF)
            report = apply_auto_reject(std::move(report), records, m, o.alpha);
        const std::set<std::string> rejected(report.rejected.begin(), report.rejected.end());

        write_pi0_header(s, pi0);
        s << "id\tv_hat\trejected\n";
        for (const auto& e : post.entries) {
            const bool r = rejected.contains(e.id);
            s << e.id << '\t' << tsv::format_full(e.v_hat) << '\t' << (r ? 1 : 0) << '\n';
            if (o.json)
                tests.push_back({{"id", e.id}, {"v_hat", e.v_hat}, {"rejected", r}});
        }
        s << "# threshold\t" << tsv::format_full(report.threshold) << '\n';
        s << "# n_rejected\t" << report.rejected.size() << '\n';
        s << "# estimated_bfdr\t" << tsv::format_full(report.estimated_bfdr) << '\n';
        s << "# auto_rejected\t" << join(report.auto_rejected) << '\n';

        doc["pi0"] = pi0_json(pi0);
        doc["threshold"] = report.threshold;
        doc["n_rejected"] = report.rejected.size();
        doc["estimated_bfdr"] = report.estimated_bfdr;
        doc["auto_rejected"] = report.auto_rejected;

        out << "method " << o.method << "  pi0_hat " << tsv::format_human(pi0.pi0_hat) << "  m " << m << '\n';
        out << "rejected " << report.rejected.size() << "  threshold " << tsv::format_human(report.threshold)
            << "  estimated bFDR " << tsv::format_human(report.estimated_bfdr) << "  auto-rejected "
            << report.auto_rejected.size() << '\n';
    } else {
        const std::vector<double> ps = read_column(table, table.require("p"));
        std::vector<PValue> pvalues;
        pvalues.reserve(m);
        for (std::size_t i = 0; i < m; ++i) {
            if (!(ps[i] >= 0.0 && ps[i] <= 1.0))
                throw tsv::ParseError(table.source, table.rows[i].line, "p must lie in [0, 1]");
            pvalues.push_back({ids[i], ps[i]});
        }
        PValueDecision d;
        Pi0Estimate pi0 = Pi0Estimate::fixed(1.0, m);
        if (o.method == "bh") {
            d = bh_decide(pvalues, o.alpha);
        } else {
            pi0 = storey_pi0(ps, o.gamma);
            d = storey_decide(pvalues, o.gamma, o.alpha, pi0.pi0_hat);
        }
        const std::set<std::string> rejected(d.rejected.begin(), d.rejected.end());

        write_pi0_header(s, pi0);
        s << "id\tq_value\trejected\n";
        for (std::size_t i = 0; i < m; ++i) {
            const bool r = rejected.contains(ids[i]);
            s << ids[i] << '\t' << tsv::format_full(d.q_values[i]) << '\t' << (r ? 1 : 0) << '\n';
            if (o.json)
                tests.push_back({{"id", ids[i]}, {"q_value", d.q_values[i]}, {"rejected", r}});
        }
        s << "# p_cutoff\t" << tsv::format_full(d.p_cutoff) << '\n';
        s << "# n_rejected\t" << d.rejected.size() << '\n';

        doc["pi0"] = pi0_json(pi0);
        doc["p_cutoff"] = d.p_cutoff;
        doc["n_rejected"] = d.rejected.size();

        out << "method " << o.method << "  pi0_hat " << tsv::format_human(pi0.pi0_hat) << "  m " << m << '\n';
        out << "rejected " << d.rejected.size() << "  p cutoff " << tsv::format_human(d.p_cutoff) << '\n';
    }
    f.commit();
    if (o.json) {
        doc["tests"] = tests;
        write_json(json_path(o.output), doc);
    }
    return kSuccess;
}

// ---------------------------------------------------------------------------
// sim

struct SimOptions {
    std::string scenario;
    std::size_t m = 10000;
    std::size_t n = 0; // 0: scenario default
    double pi0 = 0.95;
    std::size_t reps = 20;
    std::uint64_t seed = 1;
    std::string output_dir;
    unsigned threads = 0;
    double alpha = 0.05;
    double gamma = kDefaultGamma;
    std::string grid = kDefaultGrid;
    double mu = 1.0;
    double sigma = 1.0;
    double phi_low = 0.5, phi_high = 1.5;
    double maf_low = 0.05, maf_high = 0.5;
    std::size_t k_low = 40, k_high = 120;
    std::size_t causal_low = 1, causal_high = 5;
    double ld_decay = 0.5;
    std::vector<std::size_t> perms{100};
    std::size_t pvalue_perms = 500;
    bool json = false;
};

// Files are written into a staging directory and moved into place only once
// every replicate has finished.
class Staging {
public:
    explicit Staging(fs::path target) : target_(std::move(target)), dir_(target_ / ".bfdr-staging")
    {
        fs::create_directories(target_);
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    ~Staging()
    {
        std::error_code ec;
        fs::remove_all(dir_, ec);
    }
    fs::path file(const std::string& name)
    {
        names_.push_back(name);
        return dir_ / name;
    }
    void publish()
    {
        for (const auto& name : names_)
            fs::rename(dir_ / name, target_ / name);
    }

private:
    fs::path target_;
    fs::path dir_;
    std::vector<std::string> names_;
};

std::string rep_name(std::size_t rep, const std::string& suffix)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "rep_%03zu%s.tsv", rep + 1, suffix.c_str());
    return buf;
}

void write_eval(const fs::path& path, const std::vector<MethodOutcome>& outcomes)
{
    tsv::AtomicFile f(path);
    f.stream() << "method\tpi0_hat\tn_rejected\tfdp\tfnp\n";
    for (const auto& o : outcomes)
        f.stream() << o.method << '\t' << (o.pi0_hat ? tsv::format_full(*o.pi0_hat) : "NA") << '\t'
                   << o.eval.n_rejected << '\t' << tsv::format_full(o.eval.fdp) << '\t'
                   << tsv::format_full(o.eval.fnp) << '\n';
    f.commit();
}

json summary_json(const Summary& s)
{
    return {{"mean", s.mean}, {"min", s.min}, {"max", s.max}};
}

void print_aggregate(std::ostream& out, const std::vector<AggregateRow>& rows)
{
    auto cell = [](const Summary& s) {
        return tsv::format_human(s.mean) + " [" + tsv::format_human(s.min) + ", " + tsv::format_human(s.max) + "]";
    };
    out << std::left << std::setw(16) << "method" << std::setw(34) << "pi0_hat" << std::setw(34) << "FDP"
        << "FNP" << '\n';
    for (const auto& r : rows)
        out << std::left << std::setw(16) << r.method << std::setw(34) << (r.pi0_hat ? cell(*r.pi0_hat) : "-")
            << std::setw(34) << cell(r.fdp) << cell(r.fnp) << '\n';
}

int cmd_sim(const SimOptions& o, std::ostream& out)
{
    if (o.reps == 0)
        throw UsageError("--reps must be at least 1");
    if (o.scenario != "I" && o.scenario != "II")
        throw UsageError("--scenario must be I or II");
    const OmegaGrid grid = parse_grid(o.grid);
    const Range phi{o.phi_low, o.phi_high};
    const Range maf{o.maf_low, o.maf_high};

    SimIConfig c1;
    SimIIConfig c2;
    StudyOptions base{o.alpha, o.gamma, o.threads};
    StudyIIOptions opts2;
    static_cast<StudyOptions&>(opts2) = base;
    opts2.qbf_perms = o.perms;
    opts2.pvalue_perms = o.pvalue_perms;
    opts2.grid = grid;
    if (o.scenario == "I") {
        c1 = SimIConfig{o.m, o.n ? o.n : 100, o.pi0, o.mu, o.sigma, phi, maf, o.seed, grid};
        c1.check();
    } else {
        c2 = SimIIConfig{o.m, o.n ? o.n : 85, o.pi0, o.mu, o.sigma, phi, maf, o.seed,
                         {o.k_low, o.k_high}, {o.causal_low, o.causal_high}, o.ld_decay};
        c2.check();
        if (o.perms.empty())
            throw UsageError("--perms needs at least one value");
        for (std::size_t p : o.perms)
            if (p == 0)
                throw UsageError("--perms values must be positive");
    }
    if (!(o.alpha > 0.0 && o.alpha < 1.0))
        throw UsageError("--alpha must lie in (0, 1)");
    if (!(o.gamma > 0.0 && o.gamma < 1.0))
        throw UsageError("--gamma must lie in (0, 1)");

    Staging staging(o.output_dir);
    std::vector<std::vector<MethodOutcome>> all;
    for (std::size_t rep = 0; rep < o.reps; ++rep) {
        const std::uint64_t rep_seed = o.seed + rep;
        tsv::AtomicFile data(staging.file(rep_name(rep, "")));
        auto& s = data.stream();
        if (o.scenario == "I") {
            c1.seed = rep_seed;
            const ReplicateI r = run_replicate_I(c1, base);
            s << "id\tz\tse\tlog_bf\tbf\tp\tnull_q\ttruth\n";
            for (std::size_t i = 0; i < r.data.records.size(); ++i) {
                const TestRecord& t = r.data.records[i];
                s << t.id << '\t' << tsv::format_full(*t.z) << '\t' << tsv::format_full(*t.se) << '\t'
                  << tsv::format_full(t.log_bf) << '\t' << tsv::format_full(t.bf) << '\t'
                  << tsv::format_full(r.pvalues[i]) << '\t' << tsv::format_full(r.null_quantiles[i]) << '\t'
                  << int(r.data.truth.z[i]) << '\n';
            }
            all.push_back(r.outcomes);
        } else {
            c2.seed = rep_seed;
            const ReplicateII r = run_replicate_II(c2, opts2);
            s << "id\tn_variants\tlog_bf\tbf\tmin_p\tnull_q";
            for (std::size_t p : o.perms)
                s << "\tnull_q_" << p;
            s << "\tp\tp_bf\tp_minp\ttruth\n";
            for (std::size_t i = 0; i < r.rows.size(); ++i) {
                const GeneRow& g = r.rows[i];
                s << g.id << '\t' << g.n_variants << '\t' << tsv::format_full(g.log_bf) << '\t'
                  << tsv::format_full(std::exp(g.log_bf)) << '\t' << tsv::format_full(g.min_p) << '\t'
                  << tsv::format_full(g.null_quantiles.front());
                for (double q : g.null_quantiles)
                    s << '\t' << tsv::format_full(q);
                s << '\t' << tsv::format_full(g.p_bf) << '\t' << tsv::format_full(g.p_bf) << '\t'
                  << tsv::format_full(g.p_minp) << '\t'
                  << int(r.truth.z[i]) << '\n';
            }
            all.push_back(r.outcomes);
        }
        data.commit();
        write_eval(staging.file(rep_name(rep, "_eval")), all.back());
    }

    const std::vector<AggregateRow> rows = aggregate(all);
    {
        tsv::AtomicFile f(staging.file("aggregate.tsv"));
        f.stream() << "method\tpi0_mean\tpi0_min\tpi0_max\tfdp_mean\tfdp_min\tfdp_max\tfnp_mean\tfnp_min\tfnp_max\n";
        for (const auto& r : rows) {
            f.stream() << r.method;
            for (const auto& sm : {r.pi0_hat, std::optional<Summary>(r.fdp), std::optional<Summary>(r.fnp)}) {
                if (sm)
                    f.stream() << '\t' << tsv::format_full(sm->mean) << '\t' << tsv::format_full(sm->min) << '\t'
                               << tsv::format_full(sm->max);
                else
                    f.stream() << "\tNA\tNA\tNA";
            }
            f.stream() << '\n';
        }
        f.commit();
    }
    if (o.json) {
        json methods = json::array();
        for (const auto& r : rows) {
            json j{{"method", r.method}, {"fdp", summary_json(r.fdp)}, {"fnp", summary_json(r.fnp)}};
            if (r.pi0_hat)
                j["pi0_hat"] = summary_json(*r.pi0_hat);
            methods.push_back(j);
        }
        write_json(staging.file("aggregate.json"),
                   {{"command", "sim"}, {"scenario", o.scenario}, {"m", o.m}, {"pi0", o.pi0}, {"reps", o.reps},
                    {"seed", o.seed}, {"alpha", o.alpha}, {"gamma", o.gamma}, {"methods", methods}});
    }
    staging.publish();

    out << "scenario " << o.scenario << "  m " << o.m << "  pi0 " << tsv::format_human(o.pi0) << "  reps " << o.reps
        << "  alpha " << tsv::format_human(o.alpha) << '\n';
    print_aggregate(out, rows);
    return kSuccess;
}

void add_common(CLI::App* cmd, std::string& grid, unsigned& threads, bool& json_flag)
{
    cmd->add_option("--omega-grid", grid, "Comma-separated prior effect-size sds")->capture_default_str();
    cmd->add_option("--threads", threads, "Worker threads (0 = all cores)")->capture_default_str();
    cmd->add_flag("--json", json_flag, "Also write a JSON document next to each report");
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Bayesian FDR control with Bayes factors", "bfdr"};
    app.require_subcommand(1);

    BfOptions bf;
    auto* bf_cmd = app.add_subcommand("bf", "Compute Bayes factors from (z, se) or (y_file, g_file) inputs");
    bf_cmd->add_option("--input,-i", bf.input, "Input TSV")->required();
    bf_cmd->add_option("--output,-o", bf.output, "Output TSV")->required();
    bf_cmd->add_option("--sigma", bf.sigma, "Known residual sd")->capture_default_str()->check(CLI::PositiveNumber);
    bf_cmd->add_flag("--estimate-sigma", bf.estimate_sigma, "Estimate residual sd per gene from the phenotype");
    add_common(bf_cmd, bf.grid, bf.threads, bf.json);

    FdrOptions fdr;
    fdr.seed = 0;
    auto* fdr_cmd = app.add_subcommand("fdr", "Estimate pi0 and make FDR decisions");
    fdr_cmd->add_option("--input,-i", fdr.input, "Input TSV")->required();
    fdr_cmd->add_option("--output,-o", fdr.output, "Report TSV")->required();
    fdr_cmd->add_option("--method", fdr.method, "ebf, qbf, storey or bh")
        ->required()
        ->check(CLI::IsMember({"ebf", "qbf", "storey", "bh"}));
    fdr_cmd->add_option("--alpha", fdr.alpha, "Target FDR level")->capture_default_str()->check(CLI::Range(0.0, 1.0));
    fdr_cmd->add_option("--gamma", fdr.gamma, "Quantile level for QBF/Storey")->capture_default_str();
    fdr_cmd->add_option("--perms", fdr.perms, "Permutations for QBF null quantiles");
    auto* fdr_seed = fdr_cmd->add_option("--seed", fdr.seed, "Permutation seed (default $BFDR_SEED or 1)");
    fdr_cmd->add_option("--sigma", fdr.sigma, "Known residual sd")->capture_default_str()->check(CLI::PositiveNumber);
    add_common(fdr_cmd, fdr.grid, fdr.threads, fdr.json);

    SimOptions sim;
    auto* sim_cmd = app.add_subcommand("sim", "Run a simulation study");
    sim_cmd->add_option("--scenario", sim.scenario, "I or II")->required();
    sim_cmd->add_option("--m", sim.m, "Tests (genes) per replicate")->capture_default_str();
    sim_cmd->add_option("--n", sim.n, "Samples per test (default 100 for I, 85 for II)");
    sim_cmd->add_option("--pi0", sim.pi0, "True null proportion")->capture_default_str();
    sim_cmd->add_option("--reps", sim.reps, "Replicates")->capture_default_str();
    auto* sim_seed = sim_cmd->add_option("--seed", sim.seed, "Base seed (default $BFDR_SEED or 1)");
    sim_cmd->add_option("--output-dir", sim.output_dir, "Directory for per-replicate and aggregate files")
        ->required();
    sim_cmd->add_option("--alpha", sim.alpha, "Target FDR level")->capture_default_str();
    sim_cmd->add_option("--gamma", sim.gamma, "Quantile level for QBF/Storey")->capture_default_str();
    sim_cmd->add_option("--mu", sim.mu)->capture_default_str();
    sim_cmd->add_option("--sigma", sim.sigma)->capture_default_str();
    sim_cmd->add_option("--phi-low", sim.phi_low)->capture_default_str();
    sim_cmd->add_option("--phi-high", sim.phi_high)->capture_default_str();
    sim_cmd->add_option("--maf-low", sim.maf_low)->capture_default_str();
    sim_cmd->add_option("--maf-high", sim.maf_high)->capture_default_str();
    sim_cmd->add_option("--k-low", sim.k_low, "Scenario II: fewest variants per gene")->capture_default_str();
    sim_cmd->add_option("--k-high", sim.k_high, "Scenario II: most variants per gene")->capture_default_str();
    sim_cmd->add_option("--causal-low", sim.causal_low)->capture_default_str();
    sim_cmd->add_option("--causal-high", sim.causal_high)->capture_default_str();
    sim_cmd->add_option("--ld-decay", sim.ld_decay, "Scenario II: adjacent latent correlation")->capture_default_str();
    sim_cmd->add_option("--perms", sim.perms, "Scenario II: permutation counts for QBF")
        ->delimiter(',')
        ->capture_default_str();
    sim_cmd->add_option("--pvalue-perms", sim.pvalue_perms, "Scenario II: permutations for p-values (0 = skip)")
        ->capture_default_str();
    add_common(sim_cmd, sim.grid, sim.threads, sim.json);

    std::vector<std::string> argv(args.rbegin(), args.rend());
    try {
        app.parse(argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kSuccess : kUsageError;
    }

    try {
        if (*bf_cmd)
            return cmd_bf(bf, out);
        if (*fdr_cmd) {
            if (!*fdr_seed)
                fdr.seed = default_seed();
            return cmd_fdr(fdr, out);
        }
        if (!*sim_seed)
            sim.seed = default_seed();
        return cmd_sim(sim, out);
    } catch (const NumericalError& e) {
        err << "bfdr: numerical failure: " << e.what() << '\n';
        return kNumericalError;
    } catch (const std::exception& e) {
        err << "bfdr: " << e.what() << '\n';
        return kUsageError;
    }
}

} // namespace bfdr::cli
