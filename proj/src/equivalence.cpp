// equivalence.cpp
//
// Copyright (c) 2026 the tlsfp authors.  License: Apache-2.0; see LICENSE.

#include "tlsfp/equivalence.hpp"

#include <algorithm>
#include <cctype>
#include <istream>
#include <sstream>
#include <stdexcept>

#include <arpa/inet.h>

namespace tlsfp {

namespace {

std::string lowercase(std::string_view s) {
    std::string out{s};
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return out;
}

// Splits a host name into labels; a single trailing dot is ignored.
// Returns an empty vector when any label is empty.
std::vector<std::string> split_labels(std::string_view name) {
    if (!name.empty() && name.back() == '.') {
        name.remove_suffix(1);
    }
    std::vector<std::string> labels;
    std::size_t start = 0;
    while (start <= name.size()) {
        std::size_t dot = name.find('.', start);
        std::size_t end = dot == std::string_view::npos ? name.size() : dot;
        if (end == start) {
            return {};
        }
        labels.push_back(lowercase(name.substr(start, end - start)));
        if (dot == std::string_view::npos) {
            break;
        }
        start = dot + 1;
    }
    return labels;
}

std::string join_tail(const std::vector<std::string> &labels, std::size_t count) {
    std::string out;
    for (std::size_t i = labels.size() - count; i < labels.size(); i++) {
        if (!out.empty()) {
            out.push_back('.');
        }
        out += labels[i];
    }
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return s;
}

} // namespace

suffix_rules suffix_rules::from_string(std::string_view text) {
    std::istringstream in{std::string{text}};
    return from_stream(in);
}

suffix_rules suffix_rules::from_stream(std::istream &in) {
    suffix_rules rules;
    std::string line;
    bool has_icann_markers = false;
    bool in_icann = false;

    std::vector<std::string> raw_lines;
    while (std::getline(in, line)) {
        raw_lines.push_back(line);
        if (line.find("===BEGIN ICANN DOMAINS===") != std::string::npos) {
            has_icann_markers = true;
        }
    }

    for (const std::string &raw : raw_lines) {
        std::string_view l = trim(raw);
        if (l.find("===BEGIN ICANN DOMAINS===") != std::string_view::npos) {
            in_icann = true;
            continue;
        }
        if (l.find("===END ICANN DOMAINS===") != std::string_view::npos) {
            in_icann = false;
            continue;
        }
        if (has_icann_markers && !in_icann) {
            continue;
        }
        if (l.empty() || l.starts_with("//")) {
            continue;
        }
        // a rule ends at the first whitespace
        auto ws = l.find_first_of(" \t");
        if (ws != std::string_view::npos) {
            l = l.substr(0, ws);
        }
        std::string rule = lowercase(l);
        if (rule.starts_with("!")) {
            rules.exception_.insert(rule.substr(1));
        } else if (rule.starts_with("*.")) {
            rules.wildcard_.insert(rule.substr(2));
        } else {
            rules.exact_.insert(rule);
        }
    }
    return rules;
}

suffix_rules::match suffix_rules::match_suffix(const std::vector<std::string> &labels) const {
    std::size_t total = labels.size();
    std::size_t best = 0;
    bool found = false;

    // exception rules prevail over everything else
    for (std::size_t k = total; k >= 1; k--) {
        if (exception_.contains(join_tail(labels, k))) {
            return {k - 1, true};
        }
    }
    for (std::size_t k = 1; k <= total; k++) {
        std::string tail = join_tail(labels, k);
        if (exact_.contains(tail)) {
            best = std::max(best, k);
            found = true;
        }
        // "*.foo" matches exactly one extra label in front of "foo"
        if (total >= k + 1 && wildcard_.contains(tail)) {
            best = std::max(best, k + 1);
            found = true;
        }
    }
    if (!found) {
        return {1, false};
    }
    return {best, true};
}

std::optional<std::string> domain_of(std::string_view server_name,
                                     const equivalence_tables &tables) {
    std::vector<std::string> labels = split_labels(server_name);
    if (labels.empty()) {
        return std::nullopt;
    }
    auto m = tables.psl.match_suffix(labels);
    if (!m.explicit_rule) {
        if (labels.size() <= 2) {
            return join_tail(labels, labels.size());
        }
        return join_tail(labels, 2);
    }
    if (labels.size() <= m.suffix_labels) {
        // the name itself is a public suffix
        return std::nullopt;
    }
    return join_tail(labels, m.suffix_labels + 1);
}

std::string tld_of(std::string_view server_name, const equivalence_tables &tables) {
    std::vector<std::string> labels = split_labels(server_name);
    if (labels.empty()) {
        return lowercase(server_name);
    }
    auto m = tables.psl.match_suffix(labels);
    std::size_t n = std::min(std::max<std::size_t>(m.suffix_labels, 1), labels.size());
    return join_tail(labels, n);
}

namespace {

struct parsed_ip {
    bool ok = false;
    bool v6 = false;
    std::array<std::uint8_t, 16> bytes{};
    int max_bits() const { return v6 ? 128 : 32; }
};

parsed_ip parse_ip(std::string_view ip) {
    parsed_ip out;
    std::string s{ip};
    in_addr a4{};
    if (inet_pton(AF_INET, s.c_str(), &a4) == 1) {
        out.ok = true;
        out.v6 = false;
        std::copy_n(reinterpret_cast<const std::uint8_t *>(&a4), 4, out.bytes.begin());
        return out;
    }
    in6_addr a6{};
    if (inet_pton(AF_INET6, s.c_str(), &a6) == 1) {
        out.ok = true;
        out.v6 = true;
        std::copy_n(reinterpret_cast<const std::uint8_t *>(&a6), 16, out.bytes.begin());
        return out;
    }
    return out;
}

std::string masked_key(const std::array<std::uint8_t, 16> &bytes, int prefix_len) {
    std::string key(reinterpret_cast<const char *>(bytes.data()), (prefix_len + 7) / 8);
    int partial = prefix_len % 8;
    if (partial != 0 && !key.empty()) {
        key.back() = static_cast<char>(
            static_cast<std::uint8_t>(key.back()) & static_cast<std::uint8_t>(0xff << (8 - partial)));
    }
    return key;
}

} // namespace

void asn_table::add(std::string_view prefix_cidr, std::uint32_t asn) {
    auto slash = prefix_cidr.find('/');
    if (slash == std::string_view::npos) {
        throw std::invalid_argument{"prefix needs a /length"};
    }
    parsed_ip ip = parse_ip(prefix_cidr.substr(0, slash));
    if (!ip.ok) {
        throw std::invalid_argument{"bad prefix address"};
    }
    int len = std::stoi(std::string{prefix_cidr.substr(slash + 1)});
    if (len < 0 || len > ip.max_bits()) {
        throw std::invalid_argument{"bad prefix length"};
    }
    family_table &fam = ip.v6 ? v6_ : v4_;
    fam.by_len[len][masked_key(ip.bytes, len)] = asn;
}

std::string asn_table::lookup(std::string_view ip_text) const {
    parsed_ip ip = parse_ip(ip_text);
    if (ip.ok) {
        const family_table &fam = ip.v6 ? v6_ : v4_;
        for (const auto &[len, entries] : fam.by_len) {
            auto it = entries.find(masked_key(ip.bytes, len));
            if (it != entries.end()) {
                return "AS" + std::to_string(it->second);
            }
        }
    }
    return "AS0";
}

asn_table asn_table::from_string(std::string_view text) {
    std::istringstream in{std::string{text}};
    return from_stream(in);
}

asn_table asn_table::from_stream(std::istream &in) {
    asn_table table;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        line_number++;
        std::string_view l = trim(line);
        if (l.empty() || l.starts_with("#")) {
            continue;
        }
        auto comma = l.find(',');
        if (comma == std::string_view::npos) {
            throw std::runtime_error{"asn csv line " + std::to_string(line_number) +
                                     ": expected prefix,asn"};
        }
        std::string_view asn_text = trim(l.substr(comma + 1));
        if (asn_text.starts_with("AS") || asn_text.starts_with("as")) {
            asn_text.remove_prefix(2);
        }
        try {
            table.add(trim(l.substr(0, comma)),
                      static_cast<std::uint32_t>(std::stoul(std::string{asn_text})));
        } catch (const std::exception &) {
            throw std::runtime_error{"asn csv line " + std::to_string(line_number) +
                                     ": bad prefix or asn"};
        }
    }
    return table;
}

port_classes port_classes::defaults() {
    port_classes pc;
    pc.classes_ = {
        {443, "https"}, {8443, "https"},
        {993, "email"}, {995, "email"}, {465, "email"}, {26, "email"},
        {80, "http-alt"}, {8080, "http-alt"},
    };
    return pc;
}

port_classes port_classes::from_stream(std::istream &in) {
    port_classes pc;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        line_number++;
        std::string_view l = trim(line);
        if (l.empty() || l.starts_with("#")) {
            continue;
        }
        auto comma = l.find(',');
        if (comma == std::string_view::npos) {
            throw std::runtime_error{"port csv line " + std::to_string(line_number) +
                                     ": expected port,label"};
        }
        try {
            int port = std::stoi(std::string{trim(l.substr(0, comma))});
            if (port < 0 || port > 65535) {
                throw std::out_of_range{"port"};
            }
            pc.classes_[static_cast<std::uint16_t>(port)] =
                std::string{trim(l.substr(comma + 1))};
        } catch (const std::exception &) {
            throw std::runtime_error{"port csv line " + std::to_string(line_number) +
                                     ": bad port"};
        }
    }
    return pc;
}

std::string port_classes::class_of(std::uint16_t port) const {
    auto it = classes_.find(port);
    return it == classes_.end() ? "unknown" : it->second;
}

std::string asn_of(std::string_view ip, const equivalence_tables &tables) {
    return tables.asn.lookup(ip);
}

std::string port_class(std::uint16_t port, const equivalence_tables &tables) {
    return tables.ports.class_of(port);
}

} // namespace tlsfp
