// sqlion command-line entry point.
//
// Exit codes: 0 ok, 1 usage, 2 data/format, 3 network.

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <stop_token>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "sqlion/collab/tcp.hpp"
#include "sqlion/dataset/access_log.hpp"
#include "sqlion/dataset/builder.hpp"
#include "sqlion/dataset/corpus.hpp"
#include "sqlion/dataset/dataset_csv.hpp"
#include "sqlion/features.hpp"
#include "sqlion/labeler.hpp"
#include "sqlion/ml/evaluate.hpp"
#include "sqlion/ml/model.hpp"
#include "sqlion/ml/split.hpp"

namespace {

using namespace sqlion;

enum Exit { ok = 0, usage = 1, data = 2, network = 3 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot read " + path);
    return in;
}

// Writes through a temporary string so a failed run leaves no partial file.
void write_file(const std::string& path, const std::function<void(std::ostream&)>& body) {
    std::ostringstream buf;
    body(buf);
    if (path == "-") {
        std::cout << buf.str();
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !(out << buf.str()) || !out.flush()) throw FormatError("cannot write " + path);
}

TokenDictionary load_dict(const std::string& path) {
    if (path.empty()) return default_dictionary();
    auto in = open_in(path);
    return read_dictionary(in, path);
}

Model load_model(const std::string& path) {
    auto in = open_in(path);
    return read_model(in, path);
}

LabeledDataset load_dataset(const std::string& path) {
    auto in = open_in(path);
    return read_dataset(in, path);
}

std::vector<RawQuery> load_queries(const std::string& path, const std::string& format, std::string_view source) {
    auto in = open_in(path);
    if (format == "corpus") return read_corpus(in, source);
    auto parsed = parse_access_log(in);
    if (parsed.malformed > 0) spdlog::warn("{}: skipped {} malformed log lines", path, parsed.malformed);
    std::vector<RawQuery> out;
    out.reserve(parsed.records.size());
    for (auto& r : parsed.records) out.push_back(std::move(r.query));
    return out;
}

void check_threshold(int t, const char* flag) {
    if (t < 2 || t > 4) throw UsageError(std::string(flag) + " must be 2, 3 or 4");
}

std::string broker_default() {
    const char* env = std::getenv("SQLION_BROKER");
    return env ? env : "";
}

net::HostPort broker_address(const std::string& value) {
    if (value.empty()) throw UsageError("--broker is required (or set SQLION_BROKER)");
    try {
        return net::parse_host_port(value);
    } catch (const InvalidArgument& e) {
        throw UsageError(std::string("--broker: ") + e.what());
    }
}

// Blocks until SIGINT or SIGTERM, then asks `source` to stop.
void stop_on_signal(std::stop_source source) {
    sigset_t set;
    sigemptyset(&set);
    sigaddset(&set, SIGINT);
    sigaddset(&set, SIGTERM);
    int sig = 0;
    sigwait(&set, &sig);
    spdlog::info("signal {} received, shutting down", sig);
    source.request_stop();
}

void block_signals() {
    sigset_t set;
    sigemptyset(&set);
    sigaddset(&set, SIGINT);
    sigaddset(&set, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &set, nullptr);
}

} // namespace

int main(int argc, char** argv) {
    auto logger = spdlog::stderr_color_mt("sqlion");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("%Y-%m-%dT%H:%M:%S.%e %^%l%$ %v");

    CLI::App app{"SQL-injection detection: corpora, dictionaries, datasets, classifiers and the verdict network"};
    app.require_subcommand(1);
    std::function<int()> action;

    // gen-corpus
    auto* gen = app.add_subcommand("gen-corpus", "Generate a seeded malicious or legitimate query corpus");
    std::string gen_kind, gen_out, gen_templates;
    std::size_t gen_count = 0;
    std::uint64_t gen_seed = 0;
    bool gen_dedupe = false;
    gen->add_option("--kind", gen_kind, "malicious or legitimate")->required()->check(CLI::IsMember({"malicious", "legitimate"}));
    gen->add_option("--count", gen_count, "Number of queries")->required()->check(CLI::PositiveNumber);
    gen->add_option("--seed", gen_seed, "Random seed")->required();
    gen->add_option("--out", gen_out, "Output corpus file ('-' for stdout)")->required();
    gen->add_option("--templates", gen_templates, "Template file replacing the built-in grammar's templates");
    gen->add_flag("--dedupe", gen_dedupe, "Emit distinct queries only");
    gen->callback([&] {
        action = [&] {
            CorpusKind kind = gen_kind == "malicious" ? CorpusKind::malicious : CorpusKind::legitimate;
            CorpusGrammar grammar = default_grammar(kind);
            if (!gen_templates.empty()) {
                auto in = open_in(gen_templates);
                grammar.templates = read_templates(in);
            }
            auto corpus = generate_corpus({kind, gen_count, gen_seed, gen_dedupe}, grammar);
            write_file(gen_out, [&](std::ostream& o) { write_corpus(o, corpus); });
            return ok;
        };
    });

    // freq
    auto* freq = app.add_subcommand("freq", "Rank words or symbols by frequency over corpus files");
    std::vector<std::string> freq_corpus;
    std::string freq_mode, freq_out = "-";
    freq->add_option("--corpus", freq_corpus, "Corpus file(s)")->required();
    freq->add_option("--mode", freq_mode, "words or symbols")->required()->check(CLI::IsMember({"words", "symbols"}));
    freq->add_option("--out", freq_out, "Output report ('-' for stdout)");
    freq->callback([&] {
        action = [&] {
            std::vector<RawQuery> all;
            for (const auto& path : freq_corpus) {
                auto in = open_in(path);
                auto part = read_corpus(in, path);
                all.insert(all.end(), part.begin(), part.end());
            }
            auto mode = freq_mode == "words" ? FrequencyMode::alphabetic_words : FrequencyMode::single_symbols;
            auto report = frequency_analysis(all, mode);
            write_file(freq_out, [&](std::ostream& o) { write_frequency_report(o, report); });
            return ok;
        };
    });

    // build-dict
    auto* bdict = app.add_subcommand("build-dict", "Build a 30+20 token dictionary from frequency reports");
    std::string bd_words, bd_symbols, bd_out;
    bdict->add_option("--words", bd_words, "Word frequency report")->required();
    bdict->add_option("--symbols", bd_symbols, "Symbol frequency report")->required();
    bdict->add_option("--out", bd_out, "Output dictionary file ('-' for stdout)")->required();
    bdict->callback([&] {
        action = [&] {
            auto win = open_in(bd_words);
            auto sin = open_in(bd_symbols);
            auto words = read_frequency_report(win, bd_words);
            auto symbols = read_frequency_report(sin, bd_symbols);
            if (words.mode != FrequencyMode::alphabetic_words) throw FormatError(bd_words + ": not a words report");
            if (symbols.mode != FrequencyMode::single_symbols) throw FormatError(bd_symbols + ": not a symbols report");
            TokenDictionary dict = [&] {
                try {
                    return build_dictionary(words, symbols);
                } catch (const InvalidArgument& e) {
                    throw FormatError(bd_words + ", " + bd_symbols + ": " + e.what());
                }
            }();
            write_file(bd_out, [&](std::ostream& o) { write_dictionary(o, dict); });
            return ok;
        };
    });

    // build-dataset
    auto* bds = app.add_subcommand("build-dataset", "Label two query sources into a dataset CSV");
    std::string ds_mal, ds_leg, ds_dict, ds_out, ds_format = "corpus";
    bool ds_override = false;
    bds->add_option("--malicious", ds_mal, "Malicious corpus or access log")->required();
    bds->add_option("--legitimate", ds_leg, "Legitimate corpus or access log")->required();
    bds->add_option("--dict", ds_dict, "Dictionary file (default: built-in)");
    bds->add_option("--out", ds_out, "Output dataset CSV ('-' for stdout)")->required();
    bds->add_option("--format", ds_format, "Input format: corpus or log")->check(CLI::IsMember({"corpus", "log"}));
    bds->add_flag("--override-legit", ds_override, "Force legitimate rows to level 1");
    bds->callback([&] {
        action = [&] {
            auto dict = load_dict(ds_dict);
            auto mal = load_queries(ds_mal, ds_format, "malicious");
            auto leg = load_queries(ds_leg, ds_format, "legitimate");
            auto dataset = build_dataset(mal, leg, dict, {ds_override});
            write_file(ds_out, [&](std::ostream& o) { write_dataset(o, dataset); });
            return ok;
        };
    });

    // train / eval share the split flags.
    struct SplitFlags {
        std::string data;
        std::uint64_t seed = 0;
        double test_fraction = 0.3;
        int threshold = default_block_threshold;
        std::string report_csv;
    };
    auto add_split_flags = [](CLI::App* cmd, SplitFlags& f) {
        cmd->add_option("--data", f.data, "Dataset CSV")->required();
        cmd->add_option("--seed", f.seed, "Split seed")->required();
        cmd->add_option("--test-fraction", f.test_fraction, "Held-out fraction")->check(CLI::Range(0.0, 1.0));
        cmd->add_option("--threshold", f.threshold, "Block threshold for false-positive accounting (2-4)");
        cmd->add_option("--report-csv", f.report_csv, "Also write the report as CSV");
    };
    auto report = [](const EvaluationReport& r, const SplitFlags& f) {
        write_report_table(std::cout, r);
        if (!f.report_csv.empty()) write_file(f.report_csv, [&](std::ostream& o) { write_report_csv(o, r); });
    };
    auto held_out = [](const SplitFlags& f) {
        check_threshold(f.threshold, "--threshold");
        if (!(f.test_fraction > 0.0 && f.test_fraction < 1.0)) throw UsageError("--test-fraction must be in (0, 1)");
        auto data = load_dataset(f.data);
        if (data.size() < 2) throw FormatError(f.data + ": need at least 2 rows to split");
        auto parts = split(data, f.test_fraction, f.seed);
        if (parts.test.empty() || parts.train.empty())
            throw FormatError(f.data + ": too few rows for test fraction " + std::to_string(f.test_fraction));
        return parts;
    };

    auto* train = app.add_subcommand("train", "Train a model on the training part of a seeded split");
    SplitFlags tr;
    std::string tr_kind, tr_out;
    double tr_alpha = 1.0;
    int tr_depth = default_tree_depth;
    add_split_flags(train, tr);
    train->add_option("--model-kind", tr_kind, "nb or tree")->required()->check(CLI::IsMember({"nb", "tree"}));
    train->add_option("--out", tr_out, "Output model file")->required();
    train->add_option("--alpha", tr_alpha, "Naive Bayes smoothing constant")->check(CLI::PositiveNumber);
    train->add_option("--max-depth", tr_depth, "Decision tree depth limit")->check(CLI::Range(1, default_tree_depth));
    train->callback([&] {
        action = [&] {
            auto parts = held_out(tr);
            Model model = tr_kind == "nb" ? Model{train_nb(parts.train, tr_alpha)} : Model{train_tree(parts.train, tr_depth)};
            write_file(tr_out, [&](std::ostream& o) { write_model(o, model); });
            report(evaluate(model, parts.test, tr.threshold, tr.seed), tr);
            return ok;
        };
    });

    auto* eval = app.add_subcommand("eval", "Evaluate a model on the held-out part of a seeded split");
    SplitFlags ev;
    std::string ev_model;
    bool ev_all = false;
    add_split_flags(eval, ev);
    eval->add_option("--model", ev_model, "Model file")->required();
    eval->add_flag("--all", ev_all, "Evaluate on every row instead of the held-out split");
    eval->callback([&] {
        action = [&] {
            auto model = load_model(ev_model);
            if (ev_all) {
                check_threshold(ev.threshold, "--threshold");
                auto data = load_dataset(ev.data);
                if (data.empty()) throw FormatError(ev.data + ": dataset is empty");
                report(evaluate(model, data, ev.threshold, ev.seed), ev);
            } else {
                report(evaluate(model, held_out(ev).test, ev.threshold, ev.seed), ev);
            }
            return ok;
        };
    });

    // classify
    auto* cls = app.add_subcommand("classify", "Classify one query with a trained model");
    std::string cl_query, cl_model, cl_dict;
    int cl_threshold = default_block_threshold;
    cls->add_option("--query", cl_query, "Raw query text")->required();
    cls->add_option("--model", cl_model, "Model file")->required();
    cls->add_option("--dict", cl_dict, "Dictionary file (default: built-in)");
    cls->add_option("--threshold", cl_threshold, "Block threshold (2-4)");
    cls->callback([&] {
        action = [&] {
            check_threshold(cl_threshold, "--threshold");
            auto model = load_model(cl_model);
            auto dict = load_dict(cl_dict);
            auto c = classify(model, count_features(normalize(cl_query), dict));
            std::cout << "level=" << c.level.value() << " verdict=" << to_string(verdict_from_level(c.level, cl_threshold))
                      << " confidence=" << format_ratio(c.confidence) << '\n';
            return ok;
        };
    });

    // broker
    auto* brk = app.add_subcommand("broker", "Run the verdict broker");
    std::string br_listen;
    brk->add_option("--listen", br_listen, "HOST:PORT to listen on")->required();
    brk->callback([&] {
        action = [&] {
            net::HostPort addr;
            try {
                addr = net::parse_host_port(br_listen);
            } catch (const InvalidArgument& e) {
                throw UsageError(std::string("--listen: ") + e.what());
            }
            block_signals();
            net::BrokerServer server(addr);
            server.start();
            std::stop_source stop;
            stop_on_signal(stop);
            server.stop();
            return ok;
        };
    });

    // agent
    auto* agt = app.add_subcommand("agent", "Run a client agent that reports an access log and enforces blocks");
    std::string ag_broker = broker_default(), ag_log, ag_name = "agent";
    int ag_threshold = default_block_threshold;
    std::optional<std::int64_t> ag_ttl;
    agt->add_option("--broker", ag_broker, "Broker HOST:PORT (default: $SQLION_BROKER)");
    agt->add_option("--log", ag_log, "Access log to follow")->required();
    agt->add_option("--threshold", ag_threshold, "Ignore blocks from verdicts below this level (2-4)");
    agt->add_option("--name", ag_name, "Node name");
    agt->add_option("--block-ttl", ag_ttl, "Expire blocks after this many seconds")->check(CLI::PositiveNumber);
    agt->callback([&] {
        action = [&] {
            check_threshold(ag_threshold, "--threshold");
            auto addr = broker_address(ag_broker);
            block_signals();
            Agent agent({ag_name, ag_threshold, ag_ttl});
            std::jthread runner([&](std::stop_token st) { net::run_agent(agent, addr, ag_log, st); });
            std::stop_source stop;
            stop_on_signal(stop);
            runner.request_stop();
            runner.join();
            auto c = agent.counters();
            spdlog::info("emitted {} dropped-blocked {} malformed {} blocks {}", c.emitted, c.dropped_blocked,
                         c.malformed, agent.blocklist().size());
            return ok;
        };
    });

    // analyzer
    auto* anl = app.add_subcommand("analyzer", "Run an analyzer that classifies routed queries");
    std::string an_broker = broker_default(), an_model, an_dict, an_name = "analyzer";
    int an_threshold = default_block_threshold;
    anl->add_option("--broker", an_broker, "Broker HOST:PORT (default: $SQLION_BROKER)");
    anl->add_option("--model", an_model, "Model file")->required();
    anl->add_option("--dict", an_dict, "Dictionary file (default: built-in)");
    anl->add_option("--threshold", an_threshold, "Block threshold (2-4)");
    anl->add_option("--name", an_name, "Node name");
    anl->callback([&] {
        action = [&] {
            check_threshold(an_threshold, "--threshold");
            auto addr = broker_address(an_broker);
            Analyzer analyzer(an_name, load_model(an_model), load_dict(an_dict), an_threshold);
            block_signals();
            std::jthread runner([&](std::stop_token st) { net::run_analyzer(analyzer, addr, st); });
            std::stop_source stop;
            stop_on_signal(stop);
            runner.request_stop();
            runner.join();
            return ok;
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return usage;
    }

    try {
        return action();
    } catch (const UsageError& e) {
        std::cerr << "sqlion: " << e.what() << "\n";
        return usage;
    } catch (const NetworkError& e) {
        std::cerr << "sqlion: " << e.what() << "\n";
        return network;
    } catch (const FormatError& e) {
        std::cerr << "sqlion: " << e.what() << "\n";
        return data;
    } catch (const InvalidArgument& e) {
        std::cerr << "sqlion: " << e.what() << "\n";
        return data;
    } catch (const std::exception& e) {
        std::cerr << "sqlion: " << e.what() << "\n";
        return data;
    }
}
