#include "cli.hpp"

#include "adbl2/dataset.hpp"
#include "adbl2/error.hpp"
#include "adbl2/eval.hpp"
#include "adbl2/kialo.hpp"
#include "adbl2/registry.hpp"
#include "adbl2/service.hpp"
#include "adbl2/store.hpp"
#include "adbl2/verification.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <ostream>

namespace adbl2::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string env_or(const char* name, std::string fallback) {
    const char* v = std::getenv(name);
    return v && *v ? std::string(v) : fallback;
}

BackendRegistry load_registry(const std::string& path) {
    return path.empty() ? BackendRegistry::builtin() : BackendRegistry::load_file(path);
}

fs::path manifest_path(const fs::path& jsonl) {
    auto p = jsonl;
    p.replace_extension(".manifest.json");
    return p;
}

dataset::TripleDataset read_dataset(const fs::path& path) {
    auto data = dataset::read_jsonl(read_file(path));
    auto side = manifest_path(path);
    if (fs::exists(side)) {
        auto m = json::parse(read_file(side), nullptr, false);
        if (!m.is_discarded() && m.contains("provenance")) data.provenance = m["provenance"];
    }
    return data;
}

void write_dataset(const fs::path& path, const dataset::TripleDataset& data) {
    write_file_atomic(path, dataset::write_jsonl(data));
    write_file_atomic(manifest_path(path), dataset::manifest(data).dump(2) + "\n");
}

std::string shorten(std::string_view text, std::size_t width) {
    if (text.size() <= width) return std::string(text);
    return std::string(text.substr(0, width - 3)) + "...";
}

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument:
        case ErrorCode::TemplateError: return kUsage;
        default: return kFailure;
    }
}

/// "-o-train" style long flags are accepted with a single dash.
std::vector<std::string> normalize_args(std::vector<std::string> args) {
    for (auto& a : args) {
        if (a == "-o-train" || a == "-o-test") a = "-" + a;
    }
    return args;
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    CLI::App app{"adbl2: assisted debate building with attack/support relation classification"};
    app.name("adbl2");
    app.require_subcommand(1);

    std::string data_dir = env_or("ADBL2_DATA", "adbl2-data");
    std::string backends_file = env_or("ADBL2_BACKENDS", "");
    app.add_option("--data", data_dir, "Debate store directory (env ADBL2_DATA)");
    app.add_option("--backends", backends_file, "Backend registry JSON (env ADBL2_BACKENDS); built-ins if unset");

    // import
    auto* import_cmd = app.add_subcommand("import", "Parse a Kialo export and store it");
    std::string import_file;
    std::optional<std::string> import_domain;
    import_cmd->add_option("file", import_file)->required();
    import_cmd->add_option("--domain", import_domain, "Domain tag (overrides filename detection)");

    // export
    auto* export_cmd = app.add_subcommand("export", "Write a stored debate as a Kialo export");
    std::string export_id;
    std::string export_out;
    export_cmd->add_option("debate_id", export_id)->required();
    export_cmd->add_option("-o,--output", export_out, "Output file (stdout if omitted)");

    // classify
    auto* classify_cmd = app.add_subcommand("classify", "Classify one parent/child pair");
    std::string parent_text, child_text;
    std::optional<std::string> backend_name, technique;
    classify_cmd->add_option("--parent", parent_text)->required();
    classify_cmd->add_option("--child", child_text)->required();
    classify_cmd->add_option("--backend", backend_name);
    classify_cmd->add_option("--technique", technique)->check(CLI::IsMember({"zero", "few"}));
    classify_cmd->add_flag("--json", "Print the classification as JSON");

    // verify
    auto* verify_cmd = app.add_subcommand("verify", "Re-check every stored relation of a debate");
    std::string verify_id;
    double floor = kDefaultConfidenceFloor;
    verify_cmd->add_option("debate_id", verify_id)->required();
    verify_cmd->add_option("--backend", backend_name);
    verify_cmd->add_option("--technique", technique)->check(CLI::IsMember({"zero", "few"}));
    verify_cmd->add_option("--floor", floor, "Confidence floor")->capture_default_str();

    // dataset
    auto* dataset_cmd = app.add_subcommand("dataset", "Dataset construction pipeline");
    dataset_cmd->require_subcommand(1);

    auto* extract_cmd = dataset_cmd->add_subcommand("extract", "Extract (child, parent, label) triples");
    std::vector<std::string> extract_files;
    std::size_t max_depth = dataset::kDefaultMaxChildDepth;
    std::optional<std::string> extract_domain;
    std::string extract_out;
    extract_cmd->add_option("files", extract_files)->required();
    extract_cmd->add_option("--max-depth", max_depth, "Maximum child depth")->capture_default_str();
    extract_cmd->add_option("--domain", extract_domain, "Domain tag for every file");
    extract_cmd->add_option("-o,--output", extract_out)->required();

    auto* balance_cmd = dataset_cmd->add_subcommand("balance", "Undersample to per-domain label balance");
    std::string balance_in, balance_out;
    std::uint64_t seed = 0;
    balance_cmd->add_option("input", balance_in)->required();
    balance_cmd->add_option("--seed", seed)->required();
    balance_cmd->add_option("-o,--output", balance_out)->required();

    auto* split_cmd = dataset_cmd->add_subcommand("split", "Class-balanced train/test split");
    std::string split_in, split_train, split_test;
    dataset::SplitSpec spec;
    split_cmd->add_option("input", split_in)->required();
    split_cmd->add_option("--train-frac", spec.train_fraction)->capture_default_str();
    split_cmd->add_option("--seed", spec.seed)->required();
    split_cmd->add_option("--o-train", split_train, "Train output (also -o-train)")->required();
    split_cmd->add_option("--o-test", split_test, "Test output (also -o-test)")->required();
    split_cmd->add_flag("--by-domain", spec.by_domain, "Stratify by domain as well as label");

    auto* corpus_cmd = dataset_cmd->add_subcommand("emit-corpus", "Write prompt/completion JSON lines");
    std::string corpus_in, corpus_out, template_file;
    corpus_cmd->add_option("input", corpus_in)->required();
    corpus_cmd->add_option("--template", template_file, "Prompt template JSON (built-in default if omitted)");
    corpus_cmd->add_option("-o,--output", corpus_out)->required();

    auto* stats_cmd = dataset_cmd->add_subcommand("stats", "Per-domain label counts");
    std::string stats_in;
    stats_cmd->add_option("input", stats_in)->required();

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "Per-domain attack/support/macro F1 report");
    std::string eval_in;
    std::string format_name = "table";
    bool weighted = false;
    eval_cmd->add_option("input", eval_in)->required();
    eval_cmd->add_option("--backend", backend_name);
    eval_cmd->add_option("--technique", technique)->check(CLI::IsMember({"zero", "few"}));
    eval_cmd->add_option("--format", format_name)->check(CLI::IsMember({"table", "csv", "json"}))->capture_default_str();
    eval_cmd->add_flag("--weighted", weighted, "Headline the size-weighted average");

    // serve
    auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP service");
    std::string listen = env_or("ADBL2_LISTEN", "127.0.0.1:8080");
    double assist_threshold = kDefaultAssistThreshold;
    serve_cmd->add_option("--listen", listen, "host:port (env ADBL2_LISTEN)")->capture_default_str();
    serve_cmd->add_option("--floor", floor, "Default confidence floor")->capture_default_str();
    serve_cmd->add_option("--assist-threshold", assist_threshold)->capture_default_str();

    auto args = normalize_args(raw_args);
    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        auto code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kUsage;
    }

    try {
        if (*import_cmd) {
            auto parsed = kialo::parse_kialo(read_file(import_file));
            for (const auto& d : parsed.diagnostics) {
                err << fmt::format("{}:{}: {}: {}\n", import_file, d.line_number,
                                   d.severity == kialo::Severity::Error ? "error" : "warning", d.message);
            }
            if (!parsed.ok()) return kFailure;
            auto domain = kialo::detect_domain(fs::path(import_file).filename().string(), kialo::default_domain_map(),
                                               import_domain);
            if (!domain && parsed.title) domain = kialo::detect_domain(*parsed.title);
            parsed.tree->set_domain(domain);
            auto size = parsed.tree->size();
            DebateStore store(data_dir);
            auto id = store.create(std::move(*parsed.tree), parsed.title);
            out << fmt::format("{}\t{} arguments\tdomain={}\n", id, size, domain.value_or("-"));
            return kSuccess;
        }

        if (*export_cmd) {
            DebateStore store(data_dir);
            auto snap = store.get(export_id);
            auto text = kialo::serialize_kialo(snap.tree, snap.title);
            if (export_out.empty()) {
                out << text << '\n';
            } else {
                write_file_atomic(export_out, text);
            }
            return kSuccess;
        }

        if (*classify_cmd) {
            auto cfg = load_registry(backends_file).resolve(backend_name, technique);
            auto c = classify(cfg, parent_text, child_text);
            if (classify_cmd->count("--json") > 0) {
                out << api::to_json(c).dump(2) << '\n';
            } else {
                out << fmt::format("p_attack\t{:.4f}\np_support\t{:.4f}\npredicted\t{}{}\n", c.p_attack, c.p_support,
                                   to_string(c.predicted), c.tie ? " (tie)" : "");
            }
            return kSuccess;
        }

        if (*verify_cmd) {
            auto cfg = load_registry(backends_file).resolve(backend_name, technique);
            DebateStore store(data_dir);
            auto snap = store.get(verify_id);
            auto summary = verify_tree(snap.tree, cfg, floor);
            out << fmt::format("{:<8} {:<8} {:<8} {:<9} {:>8}  {:<14} {}\n", "child", "parent", "stored", "predicted",
                               "p_stored", "status", "text");
            for (const auto& e : summary.results) {
                const auto& child_text_ref = snap.tree.argument(e.edge.child).text;
                if (!e.result) {
                    out << fmt::format("{:<8} {:<8} {:<8} {:<9} {:>8}  {:<14} {}\n", e.edge.child.value,
                                       e.edge.parent.value, to_string(e.edge.relation), "-", "-", "error", e.error);
                    continue;
                }
                const auto& r = *e.result;
                out << fmt::format("{:<8} {:<8} {:<8} {:<9} {:>8.4f}  {:<14} {}\n", r.edge.child.value,
                                   r.edge.parent.value, to_string(r.stored), to_string(r.predicted),
                                   r.probability_of_stored, to_string(r.status), shorten(child_text_ref, 60));
            }
            out << fmt::format("total {}  confirmed {}  mismatched {}  low_confidence {}  failed {}\n", summary.total,
                               summary.confirmed, summary.mismatched, summary.low_confidence, summary.failed);
            if (summary.failed > 0) return kFailure;
            return summary.mismatched > 0 ? kFindings : kSuccess;
        }

        if (*extract_cmd) {
            std::vector<dataset::Source> sources;
            for (const auto& f : extract_files) {
                auto name = fs::path(f).filename().string();
                auto text = read_file(f);
                auto domain = kialo::detect_domain(name, kialo::default_domain_map(), extract_domain);
                if (!domain) {
                    auto parsed = kialo::parse_kialo(text);
                    if (parsed.title) domain = kialo::detect_domain(*parsed.title);
                }
                sources.push_back({fs::path(f).stem().string(), std::move(text), domain.value_or("unknown")});
            }
            auto data = dataset::extract_dataset(sources, max_depth);
            write_dataset(extract_out, data);
            out << fmt::format("{} triples from {} files -> {}\n", data.triples.size(), sources.size(), extract_out);
            return kSuccess;
        }

        if (*balance_cmd) {
            auto balanced = dataset::undersample(read_dataset(balance_in), seed);
            write_dataset(balance_out, balanced);
            out << fmt::format("{} triples -> {}\n", balanced.triples.size(), balance_out);
            return kSuccess;
        }

        if (*split_cmd) {
            auto [train, test] = dataset::split(read_dataset(split_in), spec);
            write_dataset(split_train, train);
            write_dataset(split_test, test);
            out << fmt::format("train {} -> {}\ntest {} -> {}\n", train.triples.size(), split_train,
                               test.triples.size(), split_test);
            return kSuccess;
        }

        if (*corpus_cmd) {
            auto tmpl = template_file.empty() ? default_template() : parse_template_json(read_file(template_file));
            auto records = dataset::emit_finetune_corpus(read_dataset(corpus_in), tmpl);
            std::string text;
            for (const auto& r : records) text += r + "\n";
            write_file_atomic(corpus_out, text);
            out << fmt::format("{} records -> {}\n", records.size(), corpus_out);
            return kSuccess;
        }

        if (*stats_cmd) {
            auto data = read_dataset(stats_in);
            out << "domain,attack,support\n";
            for (const auto& [domain, c] : dataset::dataset_stats(data)) {
                out << fmt::format("{},{},{}\n", domain, c.attack, c.support);
            }
            return kSuccess;
        }

        if (*eval_cmd) {
            auto data = read_dataset(eval_in);
            auto registry = load_registry(backends_file);
            BackendConfig cfg;
            if (backend_name == "oracle" && !registry.contains("oracle")) {
                // Self-consistency check: answers with the dataset's own labels.
                auto oracle = std::make_shared<LabelOracleBackend>();
                for (const auto& t : data.triples) oracle->add(t.parent_text, t.child_text, t.label);
                cfg.backend_id = "oracle";
                cfg.backend = std::move(oracle);
            } else {
                cfg = registry.resolve(backend_name, technique);
            }
            auto report = eval::evaluate(cfg, data);
            report.show_weighted = weighted;
            out << eval::render_report(report, *eval::parse_format(format_name));
            bool incomplete = std::any_of(report.rows.begin(), report.rows.end(),
                                          [](const eval::ReportRow& r) { return r.incomplete; });
            return incomplete ? kFailure : kSuccess;
        }

        if (*serve_cmd) {
            auto colon = listen.rfind(':');
            if (colon == std::string::npos) {
                err << "--listen expects host:port\n";
                return kUsage;
            }
            ServiceConfig cfg;
            cfg.data_dir = data_dir;
            cfg.registry = load_registry(backends_file);
            cfg.confidence_floor = floor;
            cfg.assist_threshold = assist_threshold;
            Service service(std::move(cfg));
            auto port = service.bind(listen.substr(0, colon), std::stoi(listen.substr(colon + 1)));
            out << fmt::format("listening on {}:{}\n", listen.substr(0, colon), port) << std::flush;
            service.run();
            return kSuccess;
        }
    } catch (const Error& e) {
        err << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kUsage;
}

}  // namespace adbl2::cli
