// classifier.cpp
//
// Copyright (c) 2026 the tlsfp authors.  License: Apache-2.0; see LICENSE.

#include "tlsfp/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace tlsfp {

namespace {

// marker for sessions that lack a feature; control byte keeps it disjoint
// from every observable value
const std::string absent_value = "\x01" "absent";

// Entropy in nats from a multiset of counts.  Counts are sorted first so
// equal multisets produce bit-identical sums regardless of origin.
double entropy(std::vector<std::uint64_t> counts) {
    std::sort(counts.begin(), counts.end());
    double total = 0;
    for (std::uint64_t c : counts) {
        total += static_cast<double>(c);
    }
    if (total == 0) {
        return 0;
    }
    double h = 0;
    for (std::uint64_t c : counts) {
        if (c == 0) {
            continue;
        }
        double p = static_cast<double>(c) / total;
        h -= p * std::log(p);
    }
    return h;
}

} // namespace

feature_weights feature_weights::ones() {
    feature_weights fw;
    fw.w.fill(1.0);
    return fw;
}

feature_weights feature_weights::defaults() {
    feature_weights fw;
    fw[feature_kind::server_name] = 0.97192;
    fw[feature_kind::domain] = 0.16200;
    fw[feature_kind::tld] = 0.01044;
    fw[feature_kind::ip] = 0.53294;
    fw[feature_kind::asn] = 0.10343;
    fw[feature_kind::port] = 0.00396;
    fw[feature_kind::port_class] = 0.00265;
    return fw;
}

feature_weights feature_weights::from_csv(std::istream &in) {
    feature_weights fw;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        line_number++;
        if (line.empty() || line[0] == '#') {
            continue;
        }
        auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw std::runtime_error{"weights line " + std::to_string(line_number) +
                                     ": expected kind,weight"};
        }
        feature_kind kind = feature_kind_from_name(line.substr(0, comma));
        fw[kind] = std::stod(line.substr(comma + 1));
    }
    return fw;
}

void feature_weights::to_csv(std::ostream &out) const {
    for (int i = 0; i < feature_kind_count; i++) {
        feature_kind kind = static_cast<feature_kind>(i);
        out << feature_kind_name(kind) << ',' << w[i] << '\n';
    }
}

classify_options classify_options::with_kinds(std::span<const feature_kind> kinds) {
    classify_options opts;
    opts.enabled.fill(false);
    for (feature_kind k : kinds) {
        opts.enabled[static_cast<int>(k)] = true;
    }
    return opts;
}

feature_weights compute_weights(const knowledge_base &kb) {
    if (kb.empty()) {
        throw empty_knowledge_base{};
    }
    feature_weights fw;

    for (int i = 0; i < feature_kind_count; i++) {
        feature_kind kind = static_cast<feature_kind>(i);

        // session-weighted joint counts of (process, value), pooled across
        // fingerprints
        std::map<std::string, std::uint64_t> by_process;
        std::map<std::string, std::map<std::string, std::uint64_t>> by_value;

        for (const auto &[fp, entry] : kb.entries) {
            for (const auto &[pname, pe] : entry.processes) {
                std::uint64_t covered = 0;
                auto it = pe.feature_counts.find(kind);
                if (it != pe.feature_counts.end()) {
                    for (const auto &[value, c] : it->second) {
                        by_value[value][pname] += c;
                        covered += c;
                    }
                }
                by_process[pname] += pe.session_count;
                if (pe.session_count > covered) {
                    by_value[absent_value][pname] += pe.session_count - covered;
                }
            }
        }

        std::vector<std::uint64_t> process_counts;
        for (const auto &[p, c] : by_process) {
            process_counts.push_back(c);
        }
        double h_process = entropy(process_counts);

        std::vector<std::uint64_t> value_counts;
        std::uint64_t total = 0;
        for (const auto &[v, processes] : by_value) {
            std::uint64_t value_total = 0;
            for (const auto &[p, c] : processes) {
                value_total += c;
            }
            value_counts.push_back(value_total);
            total += value_total;
        }
        double h_value = entropy(value_counts);

        if (h_value == 0) {
            fw[kind] = 0;
            continue;
        }

        // H(Z|F) = sum_v P(v) H(Z|v)
        double h_conditional = 0;
        std::size_t vi = 0;
        for (const auto &[value, processes] : by_value) {
            std::vector<std::uint64_t> conditional;
            conditional.reserve(processes.size());
            for (const auto &[p, c] : processes) {
                conditional.push_back(c);
            }
            h_conditional += static_cast<double>(value_counts[vi++]) /
                             static_cast<double>(total) * entropy(std::move(conditional));
        }
        fw[kind] = (h_process - h_conditional) / h_value;
    }
    return fw;
}

namespace {

const fingerprint_entry &resolve_entry(const knowledge_base &kb, const std::string &fingerprint,
                                       const classify_options &options, match_result &match) {
    if (options.cache != nullptr) {
        match = cached_nearest(kb, *options.cache, fingerprint);
    } else {
        match = nearest_fingerprint(kb, fingerprint);
    }
    return kb.entries.at(match.fingerprint);
}

// observable (kind, value) pairs of a destination, honoring the option mask
std::vector<std::pair<feature_kind, std::string>> destination_features(
    const destination_context &dest, const equivalence_tables &tables,
    const classify_options &options) {
    std::vector<std::pair<feature_kind, std::string>> features;
    if (dest.server_name && !dest.server_name->empty()) {
        if (options.is_enabled(feature_kind::server_name)) {
            features.emplace_back(feature_kind::server_name, *dest.server_name);
        }
        if (options.is_enabled(feature_kind::domain)) {
            if (auto dom = domain_of(*dest.server_name, tables)) {
                features.emplace_back(feature_kind::domain, *dom);
            }
        }
        if (options.is_enabled(feature_kind::tld)) {
            features.emplace_back(feature_kind::tld, tld_of(*dest.server_name, tables));
        }
    }
    if (!dest.dst_ip.empty()) {
        if (options.is_enabled(feature_kind::ip)) {
            features.emplace_back(feature_kind::ip, dest.dst_ip);
        }
        if (options.is_enabled(feature_kind::asn)) {
            features.emplace_back(feature_kind::asn, asn_of(dest.dst_ip, tables));
        }
    }
    if (options.is_enabled(feature_kind::port)) {
        features.emplace_back(feature_kind::port, std::to_string(dest.dst_port));
    }
    if (options.is_enabled(feature_kind::port_class)) {
        features.emplace_back(feature_kind::port_class, port_class(dest.dst_port, tables));
    }
    return features;
}

// Softmax of the log scores, then sort by descending probability with ties
// by name.  Log-sum-exp keeps huge count ratios finite.
classification_result finalize(std::vector<candidate_score> candidates, match_result match) {
    double max_q = candidates.front().log_score;
    for (const auto &c : candidates) {
        max_q = std::max(max_q, c.log_score);
    }
    double denom = 0;
    for (const auto &c : candidates) {
        denom += std::exp(c.log_score - max_q);
    }
    for (auto &c : candidates) {
        c.probability = std::exp(c.log_score - max_q) / denom;
    }
    std::sort(candidates.begin(), candidates.end(),
              [](const candidate_score &a, const candidate_score &b) {
                  if (a.log_score != b.log_score) {
                      return a.log_score > b.log_score;
                  }
                  return a.process_name < b.process_name;
              });

    classification_result result;
    result.match = std::move(match);
    result.malware_probability = 0;
    for (const auto &c : candidates) {
        if (c.malware) {
            result.malware_probability += c.probability;
        }
    }
    result.candidates = std::move(candidates);
    return result;
}

} // namespace

classification_result classify(const knowledge_base &kb, const feature_weights &weights,
                               const std::string &fingerprint, const destination_context &dest,
                               const equivalence_tables &tables,
                               const classify_options &options) {
    match_result match;
    const fingerprint_entry &entry = resolve_entry(kb, fingerprint, options, match);
    if (entry.processes.empty()) {
        throw no_candidates{};
    }
    auto features = destination_features(dest, tables, options);
    double total = static_cast<double>(entry.total);

    std::vector<candidate_score> candidates;
    candidates.reserve(entry.processes.size());
    for (const auto &[pname, pe] : entry.processes) {
        double sessions = static_cast<double>(pe.session_count);
        double q = std::log(sessions / total);
        for (const auto &[kind, value] : features) {
            std::uint64_t count = 0;
            auto kit = pe.feature_counts.find(kind);
            if (kit != pe.feature_counts.end()) {
                auto vit = kit->second.find(value);
                if (vit != kit->second.end()) {
                    count = vit->second;
                }
            }
            // zero empirical estimates fall back to the 1/total prior
            double p = count > 0 ? static_cast<double>(count) / sessions : 1.0 / total;
            q += weights[kind] * std::log(p);
        }
        candidates.push_back({pname, pe.family, pe.malware, q, 0});
    }
    return finalize(std::move(candidates), std::move(match));
}

classification_result top_process(const knowledge_base &kb, const std::string &fingerprint,
                                  const classify_options &options) {
    match_result match;
    const fingerprint_entry &entry = resolve_entry(kb, fingerprint, options, match);
    if (entry.processes.empty()) {
        throw no_candidates{};
    }
    double total = static_cast<double>(entry.total);
    std::vector<candidate_score> candidates;
    candidates.reserve(entry.processes.size());
    for (const auto &[pname, pe] : entry.processes) {
        double q = std::log(static_cast<double>(pe.session_count) / total);
        candidates.push_back({pname, pe.family, pe.malware, q, 0});
    }
    return finalize(std::move(candidates), std::move(match));
}

classification_result destination_only(const knowledge_base &kb, feature_kind kind,
                                       const destination_context &dest) {
    if (kind != feature_kind::server_name && kind != feature_kind::ip) {
        throw std::invalid_argument{"destination_only works on server_name or ip"};
    }
    if (kb.empty()) {
        throw empty_knowledge_base{};
    }
    std::optional<std::string> value;
    if (kind == feature_kind::server_name) {
        if (dest.server_name && !dest.server_name->empty()) {
            value = *dest.server_name;
        }
    } else {
        if (!dest.dst_ip.empty()) {
            value = dest.dst_ip;
        }
    }

    classification_result result;
    result.match = {"", 0, match_kind::exact};
    if (!value) {
        return result;
    }

    std::map<std::string, candidate_score> pooled;
    double total = 0;
    for (const auto &[fp, entry] : kb.entries) {
        for (const auto &[pname, pe] : entry.processes) {
            auto kit = pe.feature_counts.find(kind);
            if (kit == pe.feature_counts.end()) {
                continue;
            }
            auto vit = kit->second.find(*value);
            if (vit == kit->second.end()) {
                continue;
            }
            candidate_score &c = pooled[pname];
            c.process_name = pname;
            c.process_family = pe.family;
            c.malware = c.malware || pe.malware;
            c.log_score += static_cast<double>(vit->second);  // raw count for now
            total += static_cast<double>(vit->second);
        }
    }
    if (pooled.empty()) {
        return result;  // value never observed: unknown
    }
    for (auto &[pname, c] : pooled) {
        c.probability = c.log_score / total;
        c.log_score = std::log(c.probability);
        result.candidates.push_back(c);
        if (c.malware) {
            result.malware_probability += c.probability;
        }
    }
    std::sort(result.candidates.begin(), result.candidates.end(),
              [](const candidate_score &a, const candidate_score &b) {
                  if (a.probability != b.probability) {
                      return a.probability > b.probability;
                  }
                  return a.process_name < b.process_name;
              });
    return result;
}

std::optional<classification_result> apply_threshold(const classification_result &result,
                                                     double min_probability) {
    double top = result.candidates.empty() ? 0.0 : result.candidates.front().probability;
    if (top >= min_probability) {
        return result;
    }
    return std::nullopt;
}

evaluation_metrics evaluate(std::span<const std::pair<std::string, std::string>> predictions) {
    struct tally {
        std::uint64_t tp = 0, fp = 0, fn = 0;
    };
    std::map<std::string, tally> by_label;
    std::uint64_t tp_total = 0, fp_total = 0, fn_total = 0;

    for (const auto &[predicted, truth] : predictions) {
        if (predicted == truth) {
            by_label[truth].tp++;
            tp_total++;
        } else {
            by_label[predicted].fp++;
            by_label[truth].fn++;
            fp_total++;
            fn_total++;
        }
    }

    evaluation_metrics m;
    m.micro_precision = tp_total + fp_total == 0
                            ? 0.0
                            : static_cast<double>(tp_total) / static_cast<double>(tp_total + fp_total);
    m.micro_recall = tp_total + fn_total == 0
                         ? 0.0
                         : static_cast<double>(tp_total) / static_cast<double>(tp_total + fn_total);
    m.micro_f1 = m.micro_precision + m.micro_recall == 0
                     ? 0.0
                     : 2 * m.micro_precision * m.micro_recall / (m.micro_precision + m.micro_recall);
    for (const auto &[label, t] : by_label) {
        label_metrics lm;
        lm.precision = t.tp + t.fp == 0 ? 0.0
                                        : static_cast<double>(t.tp) / static_cast<double>(t.tp + t.fp);
        lm.recall = t.tp + t.fn == 0 ? 0.0
                                     : static_cast<double>(t.tp) / static_cast<double>(t.tp + t.fn);
        m.per_label[label] = lm;
    }
    return m;
}

label_metrics evaluate_malware(std::span<const std::pair<bool, bool>> predictions) {
    std::uint64_t tp = 0, fp = 0, fn = 0;
    for (const auto &[predicted, truth] : predictions) {
        if (predicted && truth) {
            tp++;
        } else if (predicted && !truth) {
            fp++;
        } else if (!predicted && truth) {
            fn++;
        }
    }
    label_metrics m;
    m.precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
    m.recall = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
    return m;
}

} // namespace tlsfp
