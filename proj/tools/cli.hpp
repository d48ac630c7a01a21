#pragma once

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "agreement/agreement.hpp"

namespace agreement::cli {

inline std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::InvalidProfile, "cannot read '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text(const std::string& path, const std::string& text, std::ostream& out)
{
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw Error(ErrorCode::BadConfig, "cannot write '" + path + "'");
    }
    f << text;
}

inline std::string join_labels(const std::vector<LabelId>& ls, const LabelTable& table)
{
    std::vector<std::string> names;
    for (LabelId l : ls) {
        names.push_back(table.name(l));
    }
    std::sort(names.begin(), names.end());
    std::string s = "{";
    for (std::size_t j = 0; j < names.size(); ++j) {
        s += (j ? "," : "") + names[j];
    }
    return s + "}";
}

inline const char* condition_text(EmbeddingViolation::Condition c)
{
    switch (c) {
    case EmbeddingViolation::Condition::E1: return "label away from its subtree's lca";
    case EmbeddingViolation::Condition::E2: return "child not strictly below";
    case EmbeddingViolation::Condition::E3: return "children share a subtree";
    }
    return "";
}

inline void print_disagreement(const Disagreement& d, const LabelTable& table, std::ostream& out)
{
    out << "DISAGREE\n";
    out << "position:";
    for (std::size_t i = 0; i < d.position.size(); ++i) {
        out << ' ' << i << '=' << (d.position[i] ? table.name(*d.position[i]) : "-");
    }
    out << "\nchildren: " << join_labels(d.children, table) << '\n';
    out << "blocks:";
    for (const auto& b : d.blocks) {
        out << ' ' << join_labels(b, table);
    }
    out << '\n';
}

inline SolveResult solve_named(const Profile& p, const std::string& backend)
{
    return backend == "rescan" ? solve<RescanConnectivity>(p) : solve<HdtConnectivity>(p);
}

inline int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Agreement supertrees for internally labeled trees"};
    app.require_subcommand(1);

    std::string file, output, tree_arg, method = "both", backend = "hdt";
    bool keep_synthetic = false;
    std::size_t taxa = 10, trees = 3, perturb = 0, max_children = 4, cap = kDefaultOracleCap;
    std::uint64_t seed = 1;
    double coverage = 0.7;
    std::vector<std::size_t> taxa_list;
    int repeats = 1;

    auto* check = app.add_subcommand("check", "Decide whether the profile has an agreement tree");
    check->add_option("file", file, "Profile file")->required();
    check->add_option("--backend", backend)->check(CLI::IsMember({"hdt", "rescan"}));

    auto* build = app.add_subcommand("build", "Print an agreement tree");
    build->add_option("file", file, "Profile file")->required();
    build->add_option("-o,--output", output);
    build->add_flag("--keep-synthetic", keep_synthetic);
    build->add_option("--backend", backend)->check(CLI::IsMember({"hdt", "rescan"}));

    auto* verify = app.add_subcommand("verify", "Check a candidate tree against the profile");
    verify->add_option("file", file, "Profile file")->required();
    verify->add_option("--tree", tree_arg, "Newick text or a file holding it")->required();
    verify->add_option("--method", method)->check(CLI::IsMember({"clusters", "embedding", "both"}));

    auto* gen = app.add_subcommand("gen", "Generate a random profile");
    gen->add_option("--taxa", taxa)->required();
    gen->add_option("--trees", trees)->required();
    gen->add_option("--seed", seed)->required();
    gen->add_option("--coverage", coverage);
    gen->add_option("--perturb", perturb);
    gen->add_option("--max-children", max_children);
    gen->add_option("-o,--output", output);

    auto* oracle = app.add_subcommand("oracle", "Exhaustive decision for small label sets");
    oracle->add_option("file", file, "Profile file")->required();
    oracle->add_option("--cap", cap);

    auto* bench = app.add_subcommand("bench", "Scaling benchmark on agreeing profiles");
    bench->add_option("--taxa-list", taxa_list)->required()->delimiter(',');
    bench->add_option("--trees", trees)->required();
    bench->add_option("--seed", seed)->required();
    bench->add_option("--backend", backend)->check(CLI::IsMember({"hdt", "rescan"}));
    bench->add_option("--coverage", coverage);
    bench->add_option("--max-children", max_children);
    bench->add_option("--repeats", repeats);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        return 2;
    }

    try {
        if (check->parsed()) {
            const Profile p = parse_profile(read_file(file));
            const SolveResult r = solve_named(p, backend);
            if (r.outcome.agrees()) {
                out << "AGREE\n";
                return 0;
            }
            print_disagreement(*r.outcome.disagreement, r.normalized.profile.table(), out);
            return 1;
        }
        if (build->parsed()) {
            const Profile p = parse_profile(read_file(file));
            const SolveResult r = solve_named(p, backend);
            if (!r.outcome.agrees()) {
                print_disagreement(*r.outcome.disagreement, r.normalized.profile.table(), err);
                return 1;
            }
            const std::string text = keep_synthetic
                ? serialize_newick(*r.outcome.tree, r.normalized.profile.table())
                : serialize_newick(*r.tree, r.normalized.profile.table(), true);
            write_text(output, text + "\n", out);
            return 0;
        }
        if (verify->parsed()) {
            const Profile p = parse_profile(read_file(file));
            std::string text = tree_arg;
            if (std::ifstream probe(tree_arg); probe) {
                text = read_file(tree_arg);
            }
            while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) {
                text.pop_back();
            }
            // Candidates printed with --keep-synthetic are checked against
            // the normalized profile.
            const Profile normalized = normalize_profile(p).profile;
            LabelTable table = normalized.table();
            const XTree cand = parse_newick(text, table);
            const Profile* target = &p;
            if (cand.labels() != p.label_universe() && cand.labels() == normalized.label_universe()) {
                target = &normalized;
            }
            bool ok = true;
            if (method != "embedding") {
                const bool c = verify_by_clusters(*target, cand);
                out << "clusters: " << (c ? "ok" : "fail") << '\n';
                ok = ok && c;
            }
            if (method != "clusters") {
                const auto v = find_embedding_violation(*target, cand);
                if (v) {
                    out << "embedding: fail (tree " << v->tree << ", node " << v->node << ", "
                        << condition_text(v->condition)
                        << ")\n";
                } else {
                    out << "embedding: ok\n";
                }
                ok = ok && !v;
            }
            return ok ? 0 : 1;
        }
        if (gen->parsed()) {
            GeneratorConfig cfg;
            cfg.n = taxa;
            cfg.k = trees;
            cfg.seed = seed;
            cfg.coverage = coverage;
            cfg.max_children = max_children;
            if (perturb > 0) {
                cfg.mode = GeneratorMode::Perturbed;
                cfg.edits = perturb;
            }
            const Profile p = generate_profile(cfg);
            write_text(output, serialize_profile(p), out);
            return 0;
        }
        if (oracle->parsed()) {
            const Profile p = normalize_profile(parse_profile(read_file(file))).profile;
            const auto found = brute_force_agreement(p, cap);
            if (found) {
                XTree shown = induced_tree(*found, [&](LabelId l) { return !p.table().is_synthetic(l); });
                shown.canonicalize();
                out << "AGREE\n" << serialize_newick(shown, p.table()) << '\n';
                return 0;
            }
            out << "DISAGREE\n";
            return 1;
        }
        if (bench->parsed()) {
            BenchmarkConfig cfg;
            cfg.taxa = taxa_list;
            cfg.k = trees;
            cfg.seed = seed;
            cfg.backend = backend;
            cfg.coverage = coverage;
            cfg.max_children = max_children;
            cfg.repeats = repeats;
            const BenchmarkReport report = run_benchmark(cfg);
            out << benchmark_csv(report);
            err << "fitted exponent: " << report.exponent << '\n';
            return 0;
        }
    } catch (const Error& e) {
        err << e.what() << '\n';
        return e.code() == ErrorCode::CapExceeded ? 3 : 2;
    }
    return 2;
}

} // namespace agreement::cli
