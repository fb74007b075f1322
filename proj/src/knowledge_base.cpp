// knowledge_base.cpp
//
// Copyright (c) 2026 the tlsfp authors.  License: Apache-2.0; see LICENSE.

#include "tlsfp/knowledge_base.hpp"

#include <algorithm>
#include <atomic>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include <json.hpp>

namespace tlsfp {

using nlohmann::json;

namespace {

constexpr std::string_view kind_names[feature_kind_count] = {
    "server_name", "domain", "tld", "ip", "asn", "port", "port_class",
};

std::atomic<std::uint64_t> next_identity{1};

} // namespace

std::string_view feature_kind_name(feature_kind kind) {
    return kind_names[static_cast<int>(kind)];
}

feature_kind feature_kind_from_name(std::string_view name) {
    for (int i = 0; i < feature_kind_count; i++) {
        if (kind_names[i] == name) {
            return static_cast<feature_kind>(i);
        }
    }
    throw std::invalid_argument{"unknown feature kind: " + std::string{name}};
}

void name_maps::add_normalization(std::string raw, std::string normalized) {
    normalized_[std::move(raw)] = std::move(normalized);
}

void name_maps::add_family(std::string normalized, std::string family) {
    families_[std::move(normalized)] = std::move(family);
}

std::string name_maps::normalize(const std::string &raw) const {
    auto it = normalized_.find(raw);
    return it == normalized_.end() ? raw : it->second;
}

std::string name_maps::family_of(const std::string &normalized) const {
    auto it = families_.find(normalized);
    return it == families_.end() ? normalized : it->second;
}

name_maps name_maps::from_csv(std::istream &normalized, std::istream &families) {
    name_maps maps;
    auto load = [](std::istream &in, auto add) {
        std::string line;
        std::size_t line_number = 0;
        while (std::getline(in, line)) {
            line_number++;
            if (line.empty() || line[0] == '#') {
                continue;
            }
            auto comma = line.find(',');
            if (comma == std::string::npos) {
                throw std::runtime_error{"name map line " + std::to_string(line_number) +
                                         ": expected two columns"};
            }
            add(line.substr(0, comma), line.substr(comma + 1));
        }
    };
    load(normalized, [&](std::string a, std::string b) {
        maps.add_normalization(std::move(a), std::move(b));
    });
    load(families, [&](std::string a, std::string b) {
        maps.add_family(std::move(a), std::move(b));
    });
    return maps;
}

knowledge_base::knowledge_base() : identity_{next_identity.fetch_add(1)} {}

knowledge_base::knowledge_base(const knowledge_base &other)
    : entries{other.entries}, first_day{other.first_day}, last_day{other.last_day},
      schema_version{other.schema_version}, identity_{next_identity.fetch_add(1)} {}

knowledge_base::knowledge_base(knowledge_base &&other) noexcept = default;

knowledge_base &knowledge_base::operator=(const knowledge_base &other) {
    entries = other.entries;
    first_day = other.first_day;
    last_day = other.last_day;
    schema_version = other.schema_version;
    identity_ = next_identity.fetch_add(1);
    return *this;
}

knowledge_base &knowledge_base::operator=(knowledge_base &&other) noexcept = default;

std::uint64_t knowledge_base::total_sessions() const {
    std::uint64_t total = 0;
    for (const auto &[fp, entry] : entries) {
        total += entry.total;
    }
    return total;
}

knowledge_base build_daily(std::span<const fused_record> records, const std::string &day,
                           const equivalence_tables &tables, const name_maps &names) {
    knowledge_base kb;
    if (records.empty()) {
        return kb;
    }
    kb.first_day = day;
    kb.last_day = day;

    for (const fused_record &rec : records) {
        fingerprint_entry &entry = kb.entries[rec.fingerprint];
        entry.total++;

        std::string pname = names.normalize(rec.process_name);
        process_entry &pe = entry.processes[pname];
        if (pe.session_count == 0) {
            pe.name = pname;
            pe.family = names.family_of(pname);
        }
        pe.session_count++;
        pe.malware = pe.malware || rec.malware;

        auto count = [&pe](feature_kind kind, const std::string &value) {
            pe.feature_counts[kind][value]++;
        };
        const destination_context &dest = rec.destination;
        if (dest.server_name && !dest.server_name->empty()) {
            count(feature_kind::server_name, *dest.server_name);
            if (auto dom = domain_of(*dest.server_name, tables)) {
                count(feature_kind::domain, *dom);
            }
            count(feature_kind::tld, tld_of(*dest.server_name, tables));
        }
        count(feature_kind::ip, dest.dst_ip);
        count(feature_kind::asn, asn_of(dest.dst_ip, tables));
        count(feature_kind::port, std::to_string(dest.dst_port));
        count(feature_kind::port_class, port_class(dest.dst_port, tables));
    }
    return kb;
}

knowledge_base merge(std::span<const knowledge_base> bases) {
    knowledge_base out;
    for (const knowledge_base &kb : bases) {
        if (kb.schema_version != out.schema_version) {
            throw schema_mismatch{"cannot merge schema '" + kb.schema_version +
                                  "' into schema '" + out.schema_version + "'"};
        }
        if (!kb.first_day.empty() &&
            (out.first_day.empty() || kb.first_day < out.first_day)) {
            out.first_day = kb.first_day;
        }
        if (!kb.last_day.empty() && (out.last_day.empty() || kb.last_day > out.last_day)) {
            out.last_day = kb.last_day;
        }
        for (const auto &[fp, entry] : kb.entries) {
            fingerprint_entry &dst = out.entries[fp];
            dst.total += entry.total;
            for (const auto &[pname, pe] : entry.processes) {
                process_entry &dpe = dst.processes[pname];
                if (dpe.session_count == 0) {
                    dpe.name = pe.name;
                    dpe.family = pe.family;
                }
                dpe.session_count += pe.session_count;
                dpe.malware = dpe.malware || pe.malware;
                for (const auto &[kind, values] : pe.feature_counts) {
                    for (const auto &[value, c] : values) {
                        dpe.feature_counts[kind][value] += c;
                    }
                }
            }
        }
    }
    return out;
}

knowledge_base filter_window(std::span<const std::pair<std::string, knowledge_base>> daily,
                             const std::string &start, const std::string &end) {
    std::vector<knowledge_base> selected;
    for (const auto &[day, kb] : daily) {
        if (day >= start && day <= end) {
            selected.push_back(kb);
        }
    }
    return merge(selected);
}

knowledge_base redact(const knowledge_base &kb) {
    constexpr std::size_t max_processes = 10;
    knowledge_base out;
    out.schema_version = kb.schema_version;
    out.first_day = kb.first_day;
    out.last_day = kb.last_day;

    for (const auto &[fp, entry] : kb.entries) {
        std::vector<const process_entry *> by_count;
        by_count.reserve(entry.processes.size());
        for (const auto &[pname, pe] : entry.processes) {
            by_count.push_back(&pe);
        }
        std::sort(by_count.begin(), by_count.end(), [](const auto *a, const auto *b) {
            if (a->session_count != b->session_count) {
                return a->session_count > b->session_count;
            }
            return a->name < b->name;
        });
        if (by_count.size() > max_processes) {
            by_count.resize(max_processes);
        }

        fingerprint_entry redacted;
        for (const process_entry *pe : by_count) {
            process_entry copy = *pe;
            copy.feature_counts.erase(feature_kind::server_name);
            copy.feature_counts.erase(feature_kind::ip);
            redacted.total += copy.session_count;
            redacted.processes[copy.name] = std::move(copy);
        }
        if (redacted.total > 0) {
            out.entries[fp] = std::move(redacted);
        }
    }
    return out;
}

void serialize(const knowledge_base &kb, std::ostream &out) {
    json header{{"schema_version", kb.schema_version},
                {"first_day", kb.first_day},
                {"last_day", kb.last_day}};
    out << header.dump() << '\n';

    for (const auto &[fp, entry] : kb.entries) {
        json procs = json::array();
        for (const auto &[pname, pe] : entry.processes) {
            json features = json::object();
            for (const auto &[kind, values] : pe.feature_counts) {
                json &kj = features[std::string{feature_kind_name(kind)}];
                for (const auto &[value, c] : values) {
                    kj[value] = c;
                }
            }
            procs.push_back(json{{"name", pe.name},
                                 {"family", pe.family},
                                 {"malware", pe.malware},
                                 {"count", pe.session_count},
                                 {"features", features}});
        }
        json line{{"fingerprint", fp}, {"total", entry.total}, {"processes", procs}};
        out << line.dump() << '\n';
    }
}

std::string serialize(const knowledge_base &kb) {
    std::ostringstream out;
    serialize(kb, out);
    return out.str();
}

knowledge_base deserialize(std::istream &in) {
    knowledge_base kb;
    std::string line;
    std::size_t line_number = 0;
    bool have_header = false;

    while (std::getline(in, line)) {
        line_number++;
        if (line.empty()) {
            continue;
        }
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception &e) {
            throw kb_parse_error{e.what(), line_number};
        }
        try {
            if (!have_header) {
                kb.schema_version = j.at("schema_version").get<std::string>();
                kb.first_day = j.at("first_day").get<std::string>();
                kb.last_day = j.at("last_day").get<std::string>();
                have_header = true;
                continue;
            }
            std::string fp = j.at("fingerprint").get<std::string>();
            fingerprint_entry entry;
            entry.total = j.at("total").get<std::uint64_t>();
            std::uint64_t sum = 0;
            for (const json &pj : j.at("processes")) {
                process_entry pe;
                pe.name = pj.at("name").get<std::string>();
                pe.family = pj.at("family").get<std::string>();
                pe.malware = pj.at("malware").get<bool>();
                pe.session_count = pj.at("count").get<std::uint64_t>();
                sum += pe.session_count;
                for (const auto &[kind_name, values] : pj.at("features").items()) {
                    feature_kind kind = feature_kind_from_name(kind_name);
                    for (const auto &[value, c] : values.items()) {
                        pe.feature_counts[kind][value] = c.get<std::uint64_t>();
                    }
                }
                entry.processes[pe.name] = std::move(pe);
            }
            if (entry.total == 0) {
                throw kb_parse_error{"fingerprint entry with zero total", line_number};
            }
            if (sum != entry.total) {
                throw kb_parse_error{"process counts do not sum to total", line_number};
            }
            kb.entries[std::move(fp)] = std::move(entry);
        } catch (const json::exception &e) {
            throw kb_parse_error{e.what(), line_number};
        } catch (const std::invalid_argument &e) {
            throw kb_parse_error{e.what(), line_number};
        }
    }
    if (!have_header) {
        throw kb_parse_error{"missing knowledge base header", line_number};
    }
    return kb;
}

} // namespace tlsfp
