#include "codeevo/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "codeevo/ceg.hpp"
#include "codeevo/embed.hpp"
#include "codeevo/features.hpp"
#include "codeevo/ingest.hpp"
#include "codeevo/pyast.hpp"
#include "codeevo/report.hpp"

namespace codeevo {

namespace {

namespace fs = std::filesystem;

struct Settings {
    std::string input;
    std::string out = "out";
    std::string y_axis = "pc1";
    std::string feature_set;
    std::string normalize = "minmax";
    std::string direction = "maximize";
    std::string norm_scope = "group";
    std::string std_scope = "dataset";
    std::string policy = "strict";
    std::uint64_t seed = 0;
    std::optional<double> perplexity;
    int iterations = 1000;
    unsigned threads = 0;
    double node_radius = 3.0;
    bool include_eigencentrality = false;
};

namespace stage {
constexpr unsigned kExtract = 1;
constexpr unsigned kCeg = 2;
constexpr unsigned kTsne = 4;
constexpr unsigned kCorrelate = 8;
}  // namespace stage

void add_common_options(CLI::App& cmd, Settings& s, bool analysis) {
    cmd.add_option("--input", s.input, "Run log (JSONL)")->required();
    cmd.add_option("--out", s.out, "Output directory")->capture_default_str();
    cmd.add_option("--policy", s.policy, "Lineage validation policy")
        ->check(CLI::IsMember({"strict", "drop-dangling-edges"}))
        ->capture_default_str();
    cmd.add_flag("--include-eigencentrality", s.include_eigencentrality, "Add eigenvector-centrality features");
    cmd.add_option("--threads", s.threads, "Featurization workers (0 = all cores)");
    if (!analysis) return;
    cmd.add_option("--y-axis", s.y_axis, "CEG y axis: pc1, tokens or feature:<name>")->capture_default_str();
    cmd.add_option("--feature-set", s.feature_set, "ast22, complexity6, all28 or custom:<file>");
    cmd.add_option("--normalize", s.normalize, "Fitness normalization")
        ->check(CLI::IsMember({"minmax", "none"}))
        ->capture_default_str();
    cmd.add_option("--direction", s.direction, "Optimization direction")
        ->check(CLI::IsMember({"maximize", "minimize"}))
        ->capture_default_str();
    cmd.add_option("--norm-scope", s.norm_scope, "Fitness normalization scope")
        ->check(CLI::IsMember({"group", "run", "global"}))
        ->capture_default_str();
    cmd.add_option("--std-scope", s.std_scope, "Feature standardization scope")
        ->check(CLI::IsMember({"dataset", "group"}))
        ->capture_default_str();
    cmd.add_option("--seed", s.seed, "t-SNE seed")->capture_default_str();
    cmd.add_option("--perplexity", s.perplexity, "t-SNE perplexity (default 30, capped at (n-1)/3)");
    cmd.add_option("--iterations", s.iterations, "t-SNE iterations")->check(CLI::NonNegativeNumber)->capture_default_str();
    cmd.add_option("--node-radius", s.node_radius, "Base CEG node radius")->check(CLI::PositiveNumber);
}

CegOptions ceg_options(const Settings& s) {
    CegOptions o;
    o.normalize = s.normalize == "none" ? Normalization::None : Normalization::MinMax;
    o.direction = s.direction == "minimize" ? Direction::Minimize : Direction::Maximize;
    o.norm_scope = s.norm_scope == "run" ? NormScope::Run : s.norm_scope == "global" ? NormScope::Global : NormScope::Group;
    o.std_scope = s.std_scope == "group" ? StdScope::Group : StdScope::Dataset;
    return o;
}

void run_stages(const Settings& s, unsigned stages, std::ostream& out, std::ostream& err) {
    const YAxis y_axis = YAxis::parse(s.y_axis);
    const Dataset raw = load_jsonl(s.input);
    const auto policy = s.policy == "strict" ? ValidationPolicy::Strict : ValidationPolicy::DropDanglingEdges;
    auto [dataset, violations] = validate(raw, policy);
    for (const auto& v : violations) {
        err << "warning: dropped edge " << v.parent_id << " -> " << v.sample_id << ": " << v.reason << "\n";
    }

    FeatureOptions fopts;
    fopts.include_eigencentrality = s.include_eigencentrality;
    const FeatureTable table = extract_dataset(dataset, fopts, s.threads);
    for (const auto& bad : table.invalid) {
        err << "warning: sample '" << bad.sample_id << "' skipped: " << bad.message << "\n";
    }

    std::optional<std::vector<std::string>> chosen;
    if (!s.feature_set.empty()) chosen = resolve_feature_set(s.feature_set, table.names);

    const fs::path dir(s.out);
    auto emit = [&](const std::string& name, const std::string& content) {
        write_text_file(dir / name, content);
        out << (dir / name).string() << "\n";
    };

    if (stages & stage::kExtract) {
        emit("features.csv", features_csv(dataset, table, s.include_eigencentrality));
    }
    if (!(stages & (stage::kCeg | stage::kTsne | stage::kCorrelate))) return;

    std::vector<std::string> warnings;
    const auto cegs = build_ceg(dataset, table, ceg_options(s), &warnings);
    for (const auto& w : warnings) err << "warning: " << w << "\n";
    if (cegs.empty()) throw ValidationError("no run has parsable samples");
    std::size_t n = 0;
    for (const auto& g : cegs) n += g.nodes.size();

    if (stages & stage::kCeg) {
        emit("ceg.json", ceg_to_json(cegs));
        CegFigureSpec spec;
        spec.y_axis = y_axis;
        spec.node_radius = s.node_radius;
        spec.pca_features = chosen ? *chosen : resolve_feature_set("ast22", table.names);
        if (y_axis.kind == YAxis::Kind::Pc1 && n < 2) {
            if (stages != stage::kCeg) {
                err << "warning: CEG figure skipped: the pc1 axis needs at least 2 samples, have " << n << "\n";
            } else {
                throw InvalidArgument("the pc1 axis needs at least 2 samples, have " + std::to_string(n));
            }
        } else {
            emit("ceg_" + y_axis.tag() + ".svg", render_ceg(cegs, spec).svg);
        }
    }

    if (stages & stage::kTsne) {
        const double cap = (static_cast<double>(n) - 1.0) / 3.0;
        TsneFigureSpec spec;
        spec.features = chosen ? *chosen : resolve_feature_set("all28", table.names);
        spec.tsne.seed = s.seed;
        spec.tsne.iterations = s.iterations;
        spec.tsne.perplexity = s.perplexity ? *s.perplexity : std::min(30.0, cap);
        if (n < 4 || (!s.perplexity && cap < 1.0)) {
            if (stages != stage::kTsne) {
                err << "warning: t-SNE skipped: needs at least 4 samples, have " << n << "\n";
            } else {
                throw InvalidArgument("t-SNE needs at least 4 samples, have " + std::to_string(n));
            }
        } else {
            emit("tsne.svg", render_tsne(cegs, spec).svg);
        }
    }

    if (stages & stage::kCorrelate) {
        const auto names = chosen ? *chosen : resolve_feature_set("all28", table.names);
        const CorrelationTable corr = correlation_table(cegs, names);
        emit("correlations.csv", corr.to_csv());
        emit("heatmap.svg", render_heatmap(corr).svg);
    }
}

int dump_ast(const std::string& path, std::ostream& out, std::ostream& err) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        err << "error: cannot read " << path << "\n";
        return kExitIo;
    }
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        out << pyast::to_json(pyast::parse_to_graph(buf.str())) << "\n";
    } catch (const ParseError& e) {
        err << "error: " << path << ":" << e.what() << "\n";
        return kExitValidation;
    }
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Code evolution graph analysis for automated algorithm design runs", "codeevo"};
    app.require_subcommand(1);
    app.fallthrough(false);

    Settings s;
    auto* extract = app.add_subcommand("extract", "Run log -> features.csv");
    add_common_options(*extract, s, false);
    auto* ceg = app.add_subcommand("ceg", "Run log -> ceg.json and CEG figure");
    add_common_options(*ceg, s, true);
    auto* tsne_cmd = app.add_subcommand("tsne", "Run log -> t-SNE scatter");
    add_common_options(*tsne_cmd, s, true);
    auto* correlate = app.add_subcommand("correlate", "Run log -> correlations.csv and heatmap");
    add_common_options(*correlate, s, true);
    auto* pipeline = app.add_subcommand("pipeline", "All of the above");
    add_common_options(*pipeline, s, true);
    std::string ast_path;
    auto* dump = app.add_subcommand("dump-ast", "Print the syntax graph of a Python file as JSON");
    dump->add_option("file", ast_path, "Python source file")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) reversed.pop_back();
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n";
        const CLI::App* sub = nullptr;
        for (const CLI::App* c : app.get_subcommands()) sub = c;
        err << (sub ? sub->help() : app.help());
        return kExitIo;
    }

    if (dump->parsed()) return dump_ast(ast_path, out, err);

    unsigned stages = 0;
    if (extract->parsed()) stages = stage::kExtract;
    if (ceg->parsed()) stages = stage::kCeg;
    if (tsne_cmd->parsed()) stages = stage::kTsne;
    if (correlate->parsed()) stages = stage::kCorrelate;
    if (pipeline->parsed()) stages = stage::kExtract | stage::kCeg | stage::kTsne | stage::kCorrelate;

    try {
        run_stages(s, stages, out, err);
    } catch (const ValidationError& e) {
        err << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const IoError& e) {
        err << "I/O error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitOk;
}

int run_cli(int argc, char** argv) {
    return run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}

}  // namespace codeevo
