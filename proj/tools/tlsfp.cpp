// tlsfp.cpp
//
// command line front end: extract, fuse, kb build|merge|window, weights,
// classify, eval
//
// Copyright (c) 2026 the tlsfp authors.  License: Apache-2.0; see LICENSE.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tlsfp/classifier.hpp"
#include "tlsfp/fusion.hpp"
#include "tlsfp/knowledge_base.hpp"
#include "tlsfp/pcap.hpp"
#include "tlsfp/records.hpp"

namespace {

using nlohmann::json;

constexpr int exit_ok = 0;
constexpr int exit_usage = 1;
constexpr int exit_io = 2;
constexpr int exit_data = 3;

struct io_error : std::runtime_error {
    explicit io_error(const std::string &what) : std::runtime_error(what) {}
};

std::ifstream open_input(const std::string &path) {
    std::ifstream in{path, std::ios::binary};
    if (!in) {
        throw io_error{"cannot open " + path};
    }
    return in;
}

std::ofstream open_output(const std::string &path) {
    std::ofstream out{path, std::ios::binary};
    if (!out) {
        throw io_error{"cannot open " + path + " for writing"};
    }
    return out;
}

struct table_paths {
    std::string psl;
    std::string asn;
    std::string ports;
};

tlsfp::equivalence_tables load_tables(const table_paths &paths) {
    tlsfp::equivalence_tables tables;
    if (!paths.psl.empty()) {
        auto in = open_input(paths.psl);
        tables.psl = tlsfp::suffix_rules::from_stream(in);
    }
    if (!paths.asn.empty()) {
        auto in = open_input(paths.asn);
        tables.asn = tlsfp::asn_table::from_stream(in);
    }
    if (!paths.ports.empty()) {
        auto in = open_input(paths.ports);
        tables.ports = tlsfp::port_classes::from_stream(in);
    }
    return tables;
}

tlsfp::knowledge_base load_kb(const std::string &path) {
    auto in = open_input(path);
    return tlsfp::deserialize(in);
}

void add_table_options(CLI::App *cmd, table_paths &paths) {
    cmd->add_option("--psl", paths.psl, "public suffix list file");
    cmd->add_option("--asn", paths.asn, "prefix,asn CSV");
    cmd->add_option("--ports", paths.ports, "port,label CSV");
}

int run_extract(const std::string &pcap_path, const std::string &format) {
    auto in = open_input(pcap_path);
    tlsfp::extract_stats stats;
    auto records = tlsfp::extract_client_hellos(in, stats);
    for (const auto &r : records) {
        if (format == "tsv") {
            std::cout << r.flow.src_ip << '\t' << r.flow.dst_ip << '\t' << r.flow.src_port
                      << '\t' << r.flow.dst_port << '\t' << r.start_time << '\t'
                      << r.fingerprint << '\t'
                      << (r.destination.server_name ? *r.destination.server_name : "") << '\n';
        } else {
            std::cout << tlsfp::to_json_line(r) << '\n';
        }
    }
    std::cerr << "packets=" << stats.packets << " tcp_payloads=" << stats.tcp_payloads
              << " client_hellos=" << stats.client_hellos
              << " parse_errors=" << stats.parse_errors << '\n';
    return exit_ok;
}

int run_fuse(const std::string &hosts_path, const std::string &nets_path,
             const std::string &verdicts_path, double max_delta) {
    auto hosts_in = open_input(hosts_path);
    auto hosts = tlsfp::read_host_records(hosts_in);
    auto nets_in = open_input(nets_path);
    auto nets = tlsfp::read_network_records(nets_in);
    auto fused = tlsfp::join_records(hosts, nets, max_delta);
    if (!verdicts_path.empty()) {
        auto verdicts_in = open_input(verdicts_path);
        fused = tlsfp::label_malware(std::move(fused), tlsfp::read_verdicts_csv(verdicts_in));
    }
    for (const auto &r : fused) {
        std::cout << tlsfp::to_json_line(r) << '\n';
    }
    return exit_ok;
}

tlsfp::name_maps load_name_maps(const std::string &procmap, const std::string &familymap) {
    tlsfp::name_maps maps;
    auto load = [](const std::string &path, auto add) {
        auto in = open_input(path);
        std::string line;
        std::size_t line_number = 0;
        while (std::getline(in, line)) {
            line_number++;
            if (line.empty() || line[0] == '#') {
                continue;
            }
            auto comma = line.find(',');
            if (comma == std::string::npos) {
                throw std::runtime_error{path + " line " + std::to_string(line_number) +
                                         ": expected two columns"};
            }
            add(line.substr(0, comma), line.substr(comma + 1));
        }
    };
    if (!procmap.empty()) {
        load(procmap, [&](std::string a, std::string b) {
            maps.add_normalization(std::move(a), std::move(b));
        });
    }
    if (!familymap.empty()) {
        load(familymap, [&](std::string a, std::string b) {
            maps.add_family(std::move(a), std::move(b));
        });
    }
    return maps;
}

json result_to_json(const tlsfp::classification_result &result, bool abstain) {
    json j;
    const auto *top = result.top();
    j["process"] = top ? top->process_name : "unknown";
    j["family"] = top ? top->process_family : "unknown";
    j["probability"] = top ? top->probability : 0.0;
    j["malware"] = top ? top->malware : false;
    j["malware_probability"] = result.malware_probability;
    j["match"] = result.match.kind == tlsfp::match_kind::exact ? "exact" : "approximate";
    j["distance"] = result.match.distance;
    j["abstain"] = abstain;
    return j;
}

void print_result_tsv(const tlsfp::classification_result &result, bool abstain) {
    const auto *top = result.top();
    std::cout << (top ? top->process_name : "unknown") << '\t'
              << (top ? top->probability : 0.0) << '\t' << result.malware_probability << '\t'
              << (result.match.kind == tlsfp::match_kind::exact ? "exact" : "approximate")
              << '\t' << result.match.distance << '\t' << (abstain ? 1 : 0) << '\n';
}

struct classify_input {
    std::string fingerprint;
    tlsfp::destination_context destination;
};

// accepts network or fused record lines; both carry fingerprint+destination
std::vector<classify_input> read_classify_inputs(std::istream &in) {
    std::vector<classify_input> inputs;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        line_number++;
        if (line.empty()) {
            continue;
        }
        try {
            json j = json::parse(line);
            classify_input ci;
            ci.fingerprint = j.at("fingerprint").get<std::string>();
            const json &d = j.at("destination");
            ci.destination.dst_ip = d.at("dst_ip").get<std::string>();
            ci.destination.dst_port = d.at("dst_port").get<std::uint16_t>();
            if (d.contains("server_name") && !d.at("server_name").is_null()) {
                ci.destination.server_name = d.at("server_name").get<std::string>();
            }
            inputs.push_back(std::move(ci));
        } catch (const json::exception &e) {
            throw tlsfp::record_parse_error{e.what(), line_number};
        }
    }
    return inputs;
}

int run_classify(const std::string &kb_path, const std::string &weights_path,
                 const std::string &in_path, double threshold,
                 const std::vector<std::string> &features, const table_paths &tables_paths,
                 const std::string &baseline, const std::string &format) {
    tlsfp::knowledge_base kb = load_kb(kb_path);
    tlsfp::equivalence_tables tables = load_tables(tables_paths);

    tlsfp::feature_weights weights = tlsfp::feature_weights::defaults();
    if (!weights_path.empty()) {
        auto in = open_input(weights_path);
        weights = tlsfp::feature_weights::from_csv(in);
    }

    tlsfp::classify_options options;
    if (!features.empty()) {
        std::vector<tlsfp::feature_kind> kinds;
        for (const auto &name : features) {
            kinds.push_back(tlsfp::feature_kind_from_name(name));
        }
        options = tlsfp::classify_options::with_kinds(kinds);
    }
    tlsfp::match_cache cache;
    options.cache = &cache;

    std::vector<classify_input> inputs;
    if (in_path.empty()) {
        inputs = read_classify_inputs(std::cin);
    } else {
        auto in = open_input(in_path);
        inputs = read_classify_inputs(in);
    }

    for (const auto &ci : inputs) {
        try {
            tlsfp::classification_result result;
            if (baseline == "top") {
                result = tlsfp::top_process(kb, ci.fingerprint, options);
            } else if (baseline == "server_name") {
                result = tlsfp::destination_only(kb, tlsfp::feature_kind::server_name,
                                                 ci.destination);
            } else if (baseline == "dst_ip") {
                result = tlsfp::destination_only(kb, tlsfp::feature_kind::ip, ci.destination);
            } else {
                result = tlsfp::classify(kb, weights, ci.fingerprint, ci.destination, tables,
                                         options);
            }
            bool abstain = !tlsfp::apply_threshold(result, threshold).has_value();
            if (format == "tsv") {
                print_result_tsv(result, abstain);
            } else {
                std::cout << result_to_json(result, abstain).dump() << '\n';
            }
        } catch (const std::exception &e) {
            // per-record problems are reported inline, processing continues
            if (format == "tsv") {
                std::cout << "error\t0\t0\terror\t0\t1\n";
            } else {
                std::cout << json{{"error", e.what()}}.dump() << '\n';
            }
        }
    }
    return exit_ok;
}

std::vector<std::string> read_label_column(const std::string &path,
                                           std::vector<int> *malware_column) {
    auto in = open_input(path);
    std::vector<std::string> labels;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        auto tab = line.find('\t');
        if (tab == std::string::npos) {
            labels.push_back(line);
        } else {
            labels.push_back(line.substr(0, tab));
            if (malware_column != nullptr) {
                malware_column->push_back(line.substr(tab + 1) == "1" ? 1 : 0);
            }
        }
    }
    return labels;
}

int run_eval(const std::string &pred_path, const std::string &truth_path) {
    std::vector<int> pred_malware, truth_malware;
    auto pred = read_label_column(pred_path, &pred_malware);
    auto truth = read_label_column(truth_path, &truth_malware);
    if (pred.size() != truth.size()) {
        std::cerr << "error: " << pred.size() << " predictions vs " << truth.size()
                  << " truth labels\n";
        return exit_data;
    }
    std::vector<std::pair<std::string, std::string>> pairs;
    pairs.reserve(pred.size());
    for (std::size_t i = 0; i < pred.size(); i++) {
        pairs.emplace_back(pred[i], truth[i]);
    }
    auto metrics = tlsfp::evaluate(pairs);

    json out{{"micro_f1", metrics.micro_f1},
             {"micro_precision", metrics.micro_precision},
             {"micro_recall", metrics.micro_recall}};
    json per_label = json::object();
    for (const auto &[label, lm] : metrics.per_label) {
        per_label[label] = json{{"precision", lm.precision}, {"recall", lm.recall}};
    }
    out["per_label"] = per_label;

    if (pred_malware.size() == pred.size() && truth_malware.size() == truth.size()) {
        std::vector<std::pair<bool, bool>> malware_pairs;
        malware_pairs.reserve(pred.size());
        for (std::size_t i = 0; i < pred.size(); i++) {
            malware_pairs.emplace_back(pred_malware[i] != 0, truth_malware[i] != 0);
        }
        auto mm = tlsfp::evaluate_malware(malware_pairs);
        out["malware"] = json{{"precision", mm.precision}, {"recall", mm.recall}};
    }
    std::cout << out.dump() << '\n';
    return exit_ok;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"TLS fingerprint knowledge bases and process inference"};
    app.require_subcommand(1);

    // extract
    auto *extract = app.add_subcommand("extract", "client_hello records from a pcap file");
    std::string pcap_path;
    std::string extract_format = "jsonl";
    extract->add_option("pcap", pcap_path, "classic pcap file")->required();
    extract->add_option("--format", extract_format, "jsonl or tsv")
        ->check(CLI::IsMember({"jsonl", "tsv"}));

    // fuse
    auto *fuse = app.add_subcommand("fuse", "join host and network records");
    std::string hosts_path, nets_path, verdicts_path;
    double max_delta = 5.0;
    fuse->add_option("--hosts", hosts_path, "host records (jsonl)")->required();
    fuse->add_option("--nets", nets_path, "network records (jsonl)")->required();
    fuse->add_option("--verdicts", verdicts_path, "sha256,engine_count CSV");
    fuse->add_option("--max-delta", max_delta, "max timestamp delta in seconds");

    // kb build|merge|window
    auto *kb_cmd = app.add_subcommand("kb", "knowledge base lifecycle");
    kb_cmd->require_subcommand(1);

    auto *kb_build = kb_cmd->add_subcommand("build", "build a daily base from fused records");
    std::string build_in, build_day, build_out, procmap_path, familymap_path;
    table_paths build_tables;
    kb_build->add_option("--in", build_in, "fused records (jsonl)")->required();
    kb_build->add_option("--day", build_day, "ISO date of the records")->required();
    kb_build->add_option("--out", build_out, "output base file")->required();
    kb_build->add_option("--procmap", procmap_path, "raw_name,normalized_name CSV");
    kb_build->add_option("--familymap", familymap_path, "normalized_name,family CSV");
    add_table_options(kb_build, build_tables);

    auto *kb_merge = kb_cmd->add_subcommand("merge", "merge base files");
    std::string merge_out;
    std::vector<std::string> merge_inputs;
    kb_merge->add_option("--out", merge_out, "output base file")->required();
    kb_merge->add_option("inputs", merge_inputs, "base files")->required();

    auto *kb_export = kb_cmd->add_subcommand("export", "re-serialize a base, optionally redacted");
    std::string export_in, export_out;
    bool export_redact = false;
    kb_export->add_option("--in", export_in, "base file")->required();
    kb_export->add_option("--out", export_out, "output base file")->required();
    kb_export->add_flag("--redact", export_redact,
                        "keep the top-10 processes per fingerprint and only the "
                        "equivalence-mapped destination counts");

    auto *kb_window = kb_cmd->add_subcommand("window", "merge daily bases within a date range");
    std::string window_start, window_end, window_out;
    std::vector<std::string> window_inputs;
    kb_window->add_option("--start", window_start, "first day, inclusive")->required();
    kb_window->add_option("--end", window_end, "last day, inclusive")->required();
    kb_window->add_option("--out", window_out, "output base file")->required();
    kb_window->add_option("inputs", window_inputs, "daily base files")->required();

    // weights
    auto *weights_cmd = app.add_subcommand("weights", "feature weights from a base");
    std::string weights_kb, weights_out;
    weights_cmd->add_option("--kb", weights_kb, "knowledge base (omit for bundled defaults)");
    weights_cmd->add_option("--out", weights_out, "output kind,weight CSV")->required();

    // classify
    auto *classify_cmd = app.add_subcommand("classify", "process inference per record");
    std::string classify_kb, classify_weights, classify_in;
    std::string classify_format = "jsonl";
    std::string baseline = "nb";
    double threshold = 0.0;
    std::vector<std::string> classify_features;
    table_paths classify_tables;
    classify_cmd->add_option("--kb", classify_kb, "knowledge base file")->required();
    classify_cmd->add_option("--weights", classify_weights, "kind,weight CSV");
    classify_cmd->add_option("--in", classify_in, "records (jsonl); stdin when omitted");
    classify_cmd->add_option("--threshold", threshold, "min top probability")
        ->check(CLI::Range(0.0, 1.0));
    classify_cmd->add_option("--features", classify_features, "feature kinds to use")
        ->delimiter(',');
    classify_cmd->add_option("--baseline", baseline, "nb, top, server_name, or dst_ip")
        ->check(CLI::IsMember({"nb", "top", "server_name", "dst_ip"}));
    classify_cmd->add_option("--format", classify_format, "jsonl or tsv")
        ->check(CLI::IsMember({"jsonl", "tsv"}));
    add_table_options(classify_cmd, classify_tables);

    // eval
    auto *eval_cmd = app.add_subcommand("eval", "micro-F1 and precision/recall");
    std::string pred_path, truth_path;
    eval_cmd->add_option("--pred", pred_path, "predicted labels, one per line")->required();
    eval_cmd->add_option("--truth", truth_path, "true labels, one per line")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? exit_ok : exit_usage;
    }

    try {
        if (*extract) {
            return run_extract(pcap_path, extract_format);
        }
        if (*fuse) {
            return run_fuse(hosts_path, nets_path, verdicts_path, max_delta);
        }
        if (*kb_build) {
            auto in = open_input(build_in);
            auto records = tlsfp::read_fused_records(in);
            auto tables = load_tables(build_tables);
            auto names = load_name_maps(procmap_path, familymap_path);
            auto kb = tlsfp::build_daily(records, build_day, tables, names);
            auto out = open_output(build_out);
            tlsfp::serialize(kb, out);
            return exit_ok;
        }
        if (*kb_merge) {
            std::vector<tlsfp::knowledge_base> bases;
            for (const auto &path : merge_inputs) {
                bases.push_back(load_kb(path));
            }
            auto out = open_output(merge_out);
            tlsfp::serialize(tlsfp::merge(bases), out);
            return exit_ok;
        }
        if (*kb_export) {
            auto kb = load_kb(export_in);
            auto out = open_output(export_out);
            tlsfp::serialize(export_redact ? tlsfp::redact(kb) : kb, out);
            return exit_ok;
        }
        if (*kb_window) {
            std::vector<std::pair<std::string, tlsfp::knowledge_base>> daily;
            for (const auto &path : window_inputs) {
                auto kb = load_kb(path);
                std::string day = kb.first_day;
                daily.emplace_back(std::move(day), std::move(kb));
            }
            auto out = open_output(window_out);
            tlsfp::serialize(tlsfp::filter_window(daily, window_start, window_end), out);
            return exit_ok;
        }
        if (*weights_cmd) {
            tlsfp::feature_weights fw = tlsfp::feature_weights::defaults();
            if (!weights_kb.empty()) {
                fw = tlsfp::compute_weights(load_kb(weights_kb));
            }
            auto out = open_output(weights_out);
            fw.to_csv(out);
            return exit_ok;
        }
        if (*classify_cmd) {
            return run_classify(classify_kb, classify_weights, classify_in, threshold,
                                classify_features, classify_tables, baseline, classify_format);
        }
        if (*eval_cmd) {
            return run_eval(pred_path, truth_path);
        }
    } catch (const io_error &e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_io;
    } catch (const tlsfp::pcap_error &e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_data;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_data;
    }
    return exit_usage;
}
