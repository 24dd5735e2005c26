#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "xvine/error.hpp"
#include "xvine/estimation.hpp"
#include "xvine/io.hpp"
#include "xvine/parallel.hpp"
#include "xvine/simulation.hpp"

namespace xvine::cli {

namespace {

using nlohmann::json;

struct SimulateArgs {
    std::string spec, out;
    long long n = -1;
    std::uint64_t seed = 1;
    int conditional = 0;
    bool pareto = false;
    int threads = 0;
};

struct FitArgs {
    std::string data, structure, out;
    long long k = 0;
    std::string trunc = "auto";
    double psi0 = 0.9;
    std::string input_kind = "raw";
    std::string aic = "paper";
    std::vector<std::string> tails, pairs;
    int threads = 0;
};

struct ChiArgs {
    std::string data, spec, out;
    bool triples = false;
    long long mc = 100000;
    long long k = 0;
    std::string input_kind = "raw";
    std::uint64_t seed = 1;
    int threads = 0;
};

struct StructureArgs {
    std::string convert, validate, diag, out;
};

// Writes to the file when a path is given, else to `out`.
void emit(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty() || path == "-")
        out << text;
    else
        write_text(path, text);
}

std::string csv_text(const Matrix& m) {
    std::ostringstream ss;
    write_csv(ss, m);
    return ss.str();
}

void write_matrix(const std::string& path, const Matrix& m, std::ostream& out) { emit(path, csv_text(m), out); }

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t used;
            out.push_back(std::stoi(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            fail(ErrorKind::Parse, "'" + tok + "' is not an integer");
        }
    }
    return out;
}

/// Vine from a structure-matrix JSON, a model JSON (its "structure") or {"d", "trees"}: tree 1 as
/// node pairs and deeper trees as index pairs into the previous tree.
VineSequence load_vine(const std::string& path) {
    json j = parse_json(read_text(path));
    if (j.contains("structure")) j = j.at("structure");
    if (j.contains("matrix")) return from_structure_matrix(structure_from_json(j));
    try {
        int d = j.at("d").get<int>();
        auto trees = j.at("trees").get<std::vector<std::vector<std::pair<int, int>>>>();
        return VineSequence::from_pairs(d, trees);
    } catch (const json::exception& e) {
        fail(ErrorKind::Parse, std::string("vine JSON: ") + e.what());
    }
}

int simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
    if (a.n < 0) fail(ErrorKind::DomainError, "--n must be non-negative");
    if (a.conditional && a.pareto) fail(ErrorKind::DomainError, "--conditional and --pareto are exclusive");
    XVineSpec spec = model_from_json(parse_json(read_text(a.spec)));
    const auto n = static_cast<std::size_t>(a.n);
    if (a.conditional) {
        if (!spec.vine().nodes().contains(a.conditional))
            fail(ErrorKind::InvalidIndex, "--conditional must name a node in 1.." + std::to_string(spec.dim()));
        Matrix z = sample_conditional(spec, a.conditional, n, a.seed, a.threads);
        write_matrix(a.out, z, out);
        err << "acceptance rate: 1 (conditional sampler, no rejection)\n";
        return kOk;
    }
    SampleResult res = a.pareto ? sample_pareto(spec, n, a.seed, a.threads) : sample_inverted_pareto(spec, n, a.seed, a.threads);
    write_matrix(a.out, res.z, out);
    err << "acceptance rate: " << std::setprecision(6) << (n ? res.acceptance_rate() : 1.0) << " (" << res.z.rows
        << " of " << res.proposals << " proposals)\n";
    return kOk;
}

PseudoSample load_sample(const std::string& path, const std::string& kind, long long k) {
    Matrix x = read_csv(path);
    if (kind == "inverted-pareto") return from_inverted_pareto(x);
    if (kind != "raw") fail(ErrorKind::DomainError, "--input-kind must be raw or inverted-pareto");
    if (k < 1) fail(ErrorKind::DomainError, "--k is required for raw input and must be positive");
    if (static_cast<std::size_t>(k) >= x.rows)
        fail(ErrorKind::DomainError, "--k (" + std::to_string(k) + ") must be smaller than n (" + std::to_string(x.rows) + ")");
    return rank_transform(x, static_cast<std::size_t>(k));
}

int fit(const FitArgs& a, std::ostream& out, std::ostream& err) {
    FitOptions opts;
    if (a.trunc == "mbic") {
        opts.trunc_mode = TruncationMode::Mbic;
    } else if (a.trunc == "auto") {
        opts.trunc_mode = TruncationMode::Auto;
    } else {
        opts.trunc_mode = TruncationMode::Fixed;
        auto q = parse_int_list(a.trunc);
        if (q.size() != 1) fail(ErrorKind::DomainError, "--trunc must be an integer, mbic or auto");
        opts.trunc_q = q[0];
    }
    if (!(a.psi0 > 0.0 && a.psi0 < 1.0)) fail(ErrorKind::DomainError, "--psi0 must lie in (0,1)");
    opts.psi0 = a.psi0;
    if (a.aic != "paper" && a.aic != "standard") fail(ErrorKind::DomainError, "--aic must be paper or standard");
    opts.aic = a.aic == "paper" ? AicConvention::Paper : AicConvention::Standard;
    if (!a.tails.empty()) {
        opts.tail_catalogue.clear();
        for (const auto& s : a.tails) {
            TailKind k;
            if (!parse_tail_kind(s, k)) fail(ErrorKind::DomainError, "unknown tail family '" + s + "'");
            opts.tail_catalogue.push_back(k);
        }
    }
    if (!a.pairs.empty()) {
        opts.pair_catalogue.clear();
        for (const auto& s : a.pairs) {
            PairKind k;
            if (!parse_pair_kind(s, k)) fail(ErrorKind::DomainError, "unknown pair family '" + s + "'");
            opts.pair_catalogue.push_back(k);
        }
    }
    opts.threads = a.threads;
    PseudoSample ps = load_sample(a.data, a.input_kind, a.k);
    if (!a.structure.empty()) opts.structure = load_vine(a.structure);
    FitReport rep = fit_pipeline(ps, opts);
    emit(a.out, report_to_json(rep).dump(2) + "\n", out);
    for (const auto& e : rep.errors) err << "warning: " << e << '\n';
    return rep.complete() ? kOk : kPartialFit;
}

std::string fmt(double v) {
    std::ostringstream ss;
    ss << std::setprecision(17) << v;
    return ss.str();
}

int chi(const ChiArgs& a, std::ostream& out) {
    if (a.data.empty() == a.spec.empty()) fail(ErrorKind::DomainError, "give exactly one of --data and --spec");
    std::ostringstream csv;
    csv << (a.triples ? "a,b,c,chi" : "a,b,chi") << (a.spec.empty() ? "" : ",se") << '\n';
    auto tuples = [&](int d) {
        std::vector<std::vector<int>> t;
        for (int x = 1; x <= d; ++x)
            for (int y = x + 1; y <= d; ++y) {
                if (!a.triples) {
                    t.push_back({x, y});
                    continue;
                }
                for (int z = y + 1; z <= d; ++z) t.push_back({x, y, z});
            }
        return t;
    };
    auto label = [](const std::vector<int>& t) {
        std::string s;
        for (int v : t) s += std::to_string(v) + ",";
        return s;
    };
    if (!a.data.empty()) {
        PseudoSample ps = load_sample(a.data, a.input_kind, a.k);
        for (const auto& t : tuples(ps.d)) csv << label(t) << fmt(empirical_chi(ps, t)) << '\n';
    } else {
        if (a.mc < 1) fail(ErrorKind::DomainError, "--mc must be positive");
        XVineSpec spec = model_from_json(parse_json(read_text(a.spec)));
        const auto n = static_cast<std::size_t>(a.mc);
        Rng root(a.seed);
        // One conditional sample per leading node serves every tuple starting there.
        int current = 0;
        Matrix z;
        for (const auto& t : tuples(spec.dim())) {
            if (t[0] != current) {
                current = t[0];
                z = sample_conditional(spec, current, n, root.substream(current).next_u64(), a.threads);
            }
            std::size_t hits = 0;
            for (std::size_t r = 0; r < n; ++r) {
                bool all = true;
                for (std::size_t i = 1; i < t.size(); ++i) all = all && z(r, t[i] - 1) < 1.0;
                hits += all;
            }
            double p = static_cast<double>(hits) / static_cast<double>(n);
            csv << label(t) << fmt(p) << ',' << fmt(std::sqrt(p * (1.0 - p) / static_cast<double>(n))) << '\n';
        }
    }
    emit(a.out, csv.str(), out);
    return kOk;
}

int structure(const StructureArgs& a, std::ostream& out) {
    if (a.convert.empty() == a.validate.empty()) fail(ErrorKind::DomainError, "give exactly one of --convert and --validate");
    if (!a.validate.empty()) {
        VineSequence v = load_vine(a.validate);
        std::ostringstream ss;
        ss << "tree,edge,a,b,D,A\n";
        for (int lv = 1; lv <= v.levels(); ++lv)
            for (const auto& e : v.tree(lv)) {
                EdgeMetadata m = v.metadata(e.key);
                ss << lv << ',' << '"' << e.key.label() << '"' << ',' << m.a << ',' << m.b << ",\"" << m.cond.str()
                   << "\",\"" << m.complete.str() << "\"\n";
            }
        ss << "valid vine: d=" << v.dim() << ", levels=" << v.levels() << '\n';
        emit(a.out, ss.str(), out);
        return kOk;
    }
    VineSequence v = load_vine(a.convert);
    StructureMatrix m;
    if (a.diag.empty()) {
        m = to_structure_matrix(v);
    } else {
        std::vector<int> diag = parse_int_list(a.diag);
        if (diag.size() == 1)
            m = to_structure_matrix(v, diag[0]);
        else
            m = to_structure_matrix(v, std::span<const int>(diag));
    }
    emit(a.out, structure_to_json(m).dump() + "\n", out);
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"X-vine models for multivariate extremes", "xvine"};
    app.require_subcommand(1);

    SimulateArgs sa;
    auto* sim = app.add_subcommand("simulate", "Sample from an X-vine model");
    sim->add_option("--spec", sa.spec, "Model JSON")->required();
    sim->add_option("--n", sa.n, "Number of rows")->required();
    sim->add_option("--seed", sa.seed, "RNG seed");
    sim->add_option("--conditional", sa.conditional, "Sample (Z | Z_j < 1) for node j");
    sim->add_flag("--pareto", sa.pareto, "Multivariate Pareto scale (reciprocals)");
    sim->add_option("--out", sa.out, "Output CSV (stdout when omitted)");
    sim->add_option("--threads", sa.threads, "Worker threads (default XVINE_THREADS or 1)");

    FitArgs fa;
    auto* fit_cmd = app.add_subcommand("fit", "Fit an X-vine model to data");
    fit_cmd->add_option("--data", fa.data, "Data CSV")->required();
    fit_cmd->add_option("--k", fa.k, "Number of exceedances per variable (raw input)");
    fit_cmd->add_option("--structure", fa.structure, "Structure-matrix JSON; skips tree learning");
    fit_cmd->add_option("--trunc", fa.trunc, "Truncation: an integer q, mbic or auto");
    fit_cmd->add_option("--psi0", fa.psi0, "mBIC prior parameter");
    fit_cmd->add_option("--input-kind", fa.input_kind, "raw or inverted-pareto");
    fit_cmd->add_option("--aic", fa.aic, "Averaged AIC convention: paper or standard");
    fit_cmd->add_option("--tail-families", fa.tails, "Tail family catalogue")->delimiter(',');
    fit_cmd->add_option("--pair-families", fa.pairs, "Pair family catalogue")->delimiter(',');
    fit_cmd->add_option("--out", fa.out, "Output JSON (stdout when omitted)");
    fit_cmd->add_option("--threads", fa.threads, "Worker threads");

    ChiArgs ca;
    auto* chi_cmd = app.add_subcommand("chi", "Tail dependence coefficients from data or a model");
    chi_cmd->add_option("--data", ca.data, "Data CSV");
    chi_cmd->add_option("--spec", ca.spec, "Model JSON (Monte Carlo)");
    chi_cmd->add_flag("--triples", ca.triples, "Trivariate coefficients instead of pairs");
    chi_cmd->add_option("--mc", ca.mc, "Monte Carlo sample size per leading node");
    chi_cmd->add_option("--k", ca.k, "Number of exceedances (raw data)");
    chi_cmd->add_option("--input-kind", ca.input_kind, "raw or inverted-pareto");
    chi_cmd->add_option("--seed", ca.seed, "RNG seed");
    chi_cmd->add_option("--out", ca.out, "Output CSV (stdout when omitted)");
    chi_cmd->add_option("--threads", ca.threads, "Worker threads");

    StructureArgs st;
    auto* st_cmd = app.add_subcommand("structure", "Convert or validate vine structures");
    st_cmd->add_option("--convert", st.convert, "Input vine JSON to re-encode");
    st_cmd->add_option("--diag", st.diag, "First diagonal entry j, or the full diagonal as a comma list");
    st_cmd->add_option("--validate", st.validate, "Input vine JSON to check");
    st_cmd->add_option("--out", st.out, "Output file (stdout when omitted)");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kBadInput;
    }

    try {
        if (*sim) return simulate(sa, out, err);
        if (*fit_cmd) return fit(fa, out, err);
        if (*chi_cmd) return chi(ca, out);
        if (*st_cmd) return structure(st, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return e.kind() == ErrorKind::Io ? kIoError : kBadInput;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kBadInput;
    }
    return kBadInput;
}

}  // namespace xvine::cli
