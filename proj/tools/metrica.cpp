// metrica: command-line front end for scansion, corpus preparation,
// evaluation and the positional stress baseline.

#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "metrica/metrica.hpp"

namespace fs = std::filesystem;
using namespace metrica;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_io = 1;
constexpr int exit_data = 2;

int exit_code_for(const Error& e) { return e.code() == ErrorCode::Io ? exit_io : exit_data; }

StressLexicon resolve_lexicon(const std::string& flag)
{
    std::string path = flag;
    if (path.empty())
        if (const char* env = std::getenv("METRICA_LEXICON"); env && *env)
            path = env;
    return path.empty() ? StressLexicon::defaults() : StressLexicon::load(path);
}

/// Output stream that is stdout unless a path was given.
class Sink {
public:
    explicit Sink(const std::string& path)
    {
        if (path.empty() || path == "-")
            return;
        file_ = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
        if (!*file_)
            throw Error(ErrorCode::Io, "cannot write '" + path + "'");
    }
    std::ostream& out() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

std::vector<std::string> read_lines(std::istream& in)
{
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        lines.push_back(std::move(line));
    }
    return lines;
}

std::vector<std::string> read_lines(const std::string& path)
{
    if (path.empty() || path == "-")
        return read_lines(std::cin);
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::Io, "cannot open '" + path + "'");
    return read_lines(in);
}

/// Applies fn to every index in [0, n) on up to `jobs` threads; results are
/// written by index so output order never depends on scheduling.
template <typename Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn&& fn)
{
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (jobs == 1) {
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < jobs; ++t)
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < n; i += jobs)
                fn(i);
        });
    for (auto& th : pool)
        th.join();
}

struct ScanRecord {
    std::string text;
    std::optional<ScansionResult> result;
    std::string error;
    std::vector<int> achievable;
};

ScanRecord scan_record(const std::string& text, const StressLexicon& lexicon, const ScanConfig& config)
{
    ScanRecord rec{text, std::nullopt, {}, {}};
    try {
        rec.result = scan_line(text, lexicon, config);
    } catch (const UnfittableError& e) {
        rec.error = e.what();
        rec.achievable = e.achievable_lengths();
    } catch (const Error& e) {
        rec.error = e.what();
    }
    return rec;
}

std::string tsv_safe(std::string s)
{
    for (auto& c : s)
        if (c == '\t' || c == '\n')
            c = ' ';
    return s;
}

void write_record(std::ostream& out, const ScanRecord& rec, bool json, bool diagnostics)
{
    if (json) {
        nlohmann::json j;
        j["text"] = rec.text;
        if (rec.result) {
            const auto& r = *rec.result;
            j["syllables"] = hyphenate(r.syllabification);
            j["pattern"] = r.pattern.str();
            j["length"] = r.candidate.metrical_length;
            auto figures = nlohmann::json::array();
            for (const auto& f : r.candidate.applied)
                figures.push_back({{"kind", to_string(f.kind)}, {"position", f.position}});
            j["figures"] = figures;
            j["ambiguous"] = r.ambiguous;
            if (diagnostics)
                j["diagnostics"] = r.diagnostics;
        } else {
            j["error"] = rec.error;
            if (!rec.achievable.empty())
                j["achievable_lengths"] = rec.achievable;
        }
        out << j.dump() << '\n';
        return;
    }
    out << tsv_safe(rec.text) << '\t';
    if (rec.result) {
        const auto& r = *rec.result;
        out << hyphenate(r.syllabification) << '\t' << r.pattern << '\t' << r.candidate.metrical_length << '\t'
            << (r.candidate.applied.empty() ? "-" : describe_figures(r.candidate.applied)) << '\t'
            << (r.ambiguous ? "ambiguous" : "ok");
        if (diagnostics)
            for (const auto& d : r.diagnostics)
                out << '\t' << tsv_safe(d);
    } else {
        out << "-\tERROR\t-\t-\t" << tsv_safe(rec.error);
    }
    out << '\n';
}

ScanConfig scan_config(int target, const std::string& policy, bool h_blocks, bool diagnostics)
{
    ScanConfig config;
    config.target_length = target;
    config.h_blocks_synalepha = h_blocks;
    config.emit_diagnostics = diagnostics;
    config.figure_preference = policy == "ordered" ? FigurePreference::Ordered : FigurePreference::Rhythmic;
    config.validate();
    return config;
}

std::vector<CorpusLine> load_gold(const std::string& path)
{
    if (!fs::exists(path))
        throw Error(ErrorCode::Io, "gold file '" + path + "' does not exist");
    return read_tsv(fs::path(path));
}

void emit_report(const EvalReport& report, bool json)
{
    if (json)
        std::cout << to_json(report).dump(2) << '\n';
    else
        print_report(std::cout, report);
}

std::array<double, 3> parse_ratios(const std::vector<double>& v)
{
    if (v.size() != 3)
        throw Error(ErrorCode::InvalidArgument, "--ratios takes exactly three values");
    return {v[0], v[1], v[2]};
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Spanish verse scansion and evaluation toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "metrica 0.1.0");

    std::string lexicon_path;
    app.add_option("--lexicon", lexicon_path, "Unstressed-word lexicon (overrides $METRICA_LEXICON)");

    // scan
    auto* scan = app.add_subcommand("scan", "Scan verse lines, one per input line");
    std::string scan_in = "-", scan_out;
    std::string scan_format = "tsv", policy = "rhythmic";
    int target = 11;
    unsigned jobs = 1;
    bool h_blocks = false, diagnostics = false;
    scan->add_option("input", scan_in, "Input file, '-' for stdin");
    scan->add_option("-o,--output", scan_out, "Output file (default stdout)");
    scan->add_option("--format", scan_format, "tsv or json (JSON lines)")->check(CLI::IsMember({"tsv", "json"}));
    scan->add_option("--target", target, "Target metrical length")->check(CLI::Range(2, 64));
    scan->add_option("--policy", policy, "Figure preference")->check(CLI::IsMember({"rhythmic", "ordered"}));
    scan->add_flag("--h-blocks-synalepha", h_blocks, "Treat initial h as blocking synalepha");
    scan->add_flag("--diagnostics", diagnostics, "Include fitting diagnostics");
    scan->add_option("-j,--jobs", jobs, "Worker threads")->check(CLI::Range(1u, 256u));

    // prepare
    auto* prepare = app.add_subcommand("prepare", "Parse TEI files and write train/eval/test TSVs");
    std::string tei_dir, out_dir;
    std::vector<double> ratios{default_split_ratios.begin(), default_split_ratios.end()};
    std::uint64_t seed = 42;
    bool manual_only = false;
    prepare->add_option("tei_dir", tei_dir, "Directory of TEI-XML files")->required();
    prepare->add_option("out_dir", out_dir, "Output directory")->required();
    prepare->add_option("--ratios", ratios, "train eval test fractions")->expected(3)->delimiter(',');
    prepare->add_option("--seed", seed, "Split seed");
    prepare->add_flag("--manual-only", manual_only, "Keep only manually annotated lines");

    // evaluate
    auto* evaluate_cmd = app.add_subcommand("evaluate", "Score the engine or a predictions file against gold");
    std::string eval_gold, eval_pred;
    bool use_engine = false, eval_json = false;
    evaluate_cmd->add_option("gold", eval_gold, "Gold TSV")->required();
    auto* pred_opt = evaluate_cmd->add_option("predictions", eval_pred, "Predictions TSV");
    auto* engine_flag = evaluate_cmd->add_flag("--engine", use_engine, "Scan gold texts with the rule engine");
    engine_flag->excludes(pred_opt);
    evaluate_cmd->add_option("--policy", policy, "Figure preference")->check(CLI::IsMember({"rhythmic", "ordered"}));
    evaluate_cmd->add_option("-j,--jobs", jobs, "Worker threads")->check(CLI::Range(1u, 256u));
    evaluate_cmd->add_flag("--json", eval_json, "Structured report");

    // score
    auto* score = app.add_subcommand("score", "Score an external predictions file against gold");
    std::string score_gold, score_pred;
    bool score_json = false;
    score->add_option("gold", score_gold, "Gold TSV")->required();
    score->add_option("predictions", score_pred, "Predictions TSV")->required();
    score->add_flag("--json", score_json, "Structured report");

    // baseline
    auto* baseline = app.add_subcommand("baseline", "Positional n-gram stress classifier");
    baseline->require_subcommand(1);
    auto* btrain = baseline->add_subcommand("train", "Train a model");
    std::string train_path, eval_path, model_path;
    TrainConfig tc;
    btrain->add_option("train", train_path, "Training TSV")->required();
    btrain->add_option("--eval", eval_path, "Eval TSV for early stopping");
    btrain->add_option("-o,--model", model_path, "Model output path")->required();
    btrain->add_option("--epochs", tc.epochs, "Epochs");
    btrain->add_option("--dim", tc.embedding_dim, "Embedding dimension");
    btrain->add_option("--lr", tc.learning_rate, "Learning rate");
    btrain->add_option("--ngram-min", tc.ngram_min, "Shortest character n-gram");
    btrain->add_option("--ngram-max", tc.ngram_max, "Longest character n-gram");
    btrain->add_option("--buckets", tc.bucket_count, "Hash buckets for unseen n-grams");
    btrain->add_option("--patience", tc.patience, "Early-stopping patience");
    btrain->add_option("--seed", tc.seed, "Initialization and shuffling seed");
    auto* bpredict = baseline->add_subcommand("predict", "Predict patterns with a trained model");
    std::string predict_in, predict_out;
    bpredict->add_option("model", model_path, "Model file")->required();
    bpredict->add_option("input", predict_in, "Gold TSV (keyed output) or plain verse lines (bare output)")->required();
    bpredict->add_option("-o,--output", predict_out, "Output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_data;
    }

    try {
        if (*scan) {
            const auto lexicon = resolve_lexicon(lexicon_path);
            const auto config = scan_config(target, policy, h_blocks, diagnostics);
            Sink sink(scan_out);
            const bool json = scan_format == "json";
            bool failed = false;
            if (jobs == 1) {
                std::unique_ptr<std::ifstream> file;
                if (scan_in != "-") {
                    file = std::make_unique<std::ifstream>(scan_in, std::ios::binary);
                    if (!*file)
                        throw Error(ErrorCode::Io, "cannot open '" + scan_in + "'");
                }
                std::istream& in = file ? *file : std::cin;
                std::string line;
                while (std::getline(in, line)) {
                    if (!line.empty() && line.back() == '\r')
                        line.pop_back();
                    const auto rec = scan_record(line, lexicon, config);
                    failed |= !rec.result.has_value();
                    write_record(sink.out(), rec, json, diagnostics);
                }
            } else {
                const auto lines = read_lines(scan_in);
                std::vector<ScanRecord> records(lines.size());
                parallel_for(lines.size(), jobs, [&](std::size_t i) { records[i] = scan_record(lines[i], lexicon, config); });
                for (const auto& rec : records) {
                    failed |= !rec.result.has_value();
                    write_record(sink.out(), rec, json, diagnostics);
                }
            }
            sink.out().flush();
            return failed ? exit_data : exit_ok;
        }

        if (*prepare) {
            if (!fs::is_directory(tei_dir))
                throw Error(ErrorCode::Io, "'" + tei_dir + "' is not a directory");
            auto parsed = parse_tei_directory(tei_dir);
            for (const auto& w : parsed.warnings)
                std::cerr << "warning: " << w << '\n';
            auto lines = dedupe_and_clean(std::move(parsed.lines));
            if (manual_only)
                lines = only_manual(lines);
            const auto parts = split(lines, parse_ratios(ratios), seed);
            std::error_code ec;
            fs::create_directories(out_dir, ec);
            if (ec)
                throw Error(ErrorCode::Io, "cannot create '" + out_dir + "': " + ec.message());
            auto write = [&](const std::string& name, const std::vector<CorpusLine>& part) {
                Sink sink((fs::path(out_dir) / name).string());
                write_tsv(sink.out(), part);
            };
            write("train.tsv", parts.train);
            write("eval.tsv", parts.eval);
            write("test.tsv", parts.test);
            nlohmann::ordered_json manifest;
            manifest["seed"] = parts.seed;
            manifest["ratios"] = parts.ratios;
            manifest["counts"] = {{"train", parts.train.size()}, {"eval", parts.eval.size()}, {"test", parts.test.size()}};
            manifest["skipped_missing_met"] = parsed.missing_met;
            Sink sink((fs::path(out_dir) / "split.json").string());
            sink.out() << manifest.dump(2) << '\n';
            std::cout << "train\t" << parts.train.size() << "\neval\t" << parts.eval.size() << "\ntest\t" << parts.test.size() << '\n';
            return exit_ok;
        }

        if (*evaluate_cmd) {
            const auto gold = load_gold(eval_gold);
            EvalReport report;
            if (use_engine) {
                const auto lexicon = resolve_lexicon(lexicon_path);
                const auto config = scan_config(11, policy, false, false);
                std::vector<std::optional<MetricalPattern>> predicted(gold.size());
                parallel_for(gold.size(), jobs, [&](std::size_t i) {
                    try {
                        predicted[i] = scan_line(gold[i].text, lexicon, config).pattern;
                    } catch (const Error&) {
                    }
                });
                std::vector<EvalPair> pairs;
                for (std::size_t i = 0; i < gold.size(); ++i)
                    pairs.push_back({predicted[i], gold[i].gold, gold[i].text});
                report = metrica::evaluate(pairs);
            } else if (!eval_pred.empty()) {
                report = score_predictions_file(eval_pred, gold);
            } else {
                throw Error(ErrorCode::InvalidArgument, "evaluate needs a predictions file or --engine");
            }
            emit_report(report, eval_json);
            return exit_ok;
        }

        if (*score) {
            emit_report(score_predictions_file(score_pred, load_gold(score_gold)), score_json);
            return exit_ok;
        }

        if (*btrain) {
            const auto train_lines = load_gold(train_path);
            const auto eval_lines = eval_path.empty() ? std::vector<CorpusLine>{} : load_gold(eval_path);
            const auto model = train(labeled(train_lines), labeled(eval_lines), tc, [](const EpochStats& s) {
                std::cout << "epoch " << s.epoch << "\tloss " << std::fixed << std::setprecision(4) << s.train_loss
                          << std::defaultfloat;
                if (s.eval_accuracy >= 0)
                    std::cout << "\teval_accuracy " << format_percent(s.eval_accuracy);
                std::cout << '\n';
            });
            save_model(model, model_path);
            std::cout << "best epoch " << model.meta().best_epoch << " of " << model.meta().epochs_run << "; model written to "
                      << model_path << '\n';
            return exit_ok;
        }

        if (*bpredict) {
            const auto model = load_model(model_path);
            if (!fs::exists(predict_in))
                throw Error(ErrorCode::Io, "input '" + predict_in + "' does not exist");
            Sink sink(predict_out);
            // A file whose first row has four tab-separated fields is a gold TSV.
            const auto raw = read_lines(predict_in);
            const bool keyed = !raw.empty() && split_tabs(raw.front()).size() >= 4;
            if (keyed) {
                for (const auto& l : read_tsv(fs::path(predict_in)))
                    sink.out() << l.poem_id << '\t' << l.line_no << '\t' << model.predict(l.text) << '\n';
            } else {
                for (const auto& l : raw)
                    sink.out() << model.predict(l) << '\n';
            }
            return exit_ok;
        }
    } catch (const Error& e) {
        std::cerr << "metrica: " << e.what() << '\n';
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "metrica: " << e.what() << '\n';
        return exit_io;
    }
    return exit_ok;
}
