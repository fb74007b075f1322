// equivalence.hpp
//
// destination feature equivalence classes: server_name -> domain/TLD via
// public suffix rules, IP -> autonomous system, port -> port class
//
// Copyright (c) 2026 the tlsfp authors.  License: Apache-2.0; see LICENSE.

#ifndef TLSFP_EQUIVALENCE_HPP
#define TLSFP_EQUIVALENCE_HPP

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace tlsfp {

// Public suffix rules in the standard PSL text format: one rule per line,
// "!"-prefixed exceptions, "*." wildcards, "//" comments.  When the ICANN
// section markers are present only that section is honored; otherwise the
// whole file is read.
class suffix_rules {
public:
    static suffix_rules from_stream(std::istream &in);
    static suffix_rules from_string(std::string_view text);

    bool empty() const {
        return exact_.empty() && wildcard_.empty() && exception_.empty();
    }

    // Label count of the public suffix of `labels`, plus whether an explicit
    // rule matched.  With no explicit match the implicit "*" rule applies
    // and the suffix is the final label.
    struct match {
        std::size_t suffix_labels;
        bool explicit_rule;
    };
    match match_suffix(const std::vector<std::string> &labels) const;

private:
    std::unordered_set<std::string> exact_;
    std::unordered_set<std::string> wildcard_;   // "*.foo" stored as "foo"
    std::unordered_set<std::string> exception_;  // "!bar.foo" stored as "bar.foo"
};

// Longest-prefix-match table from IP prefixes to AS numbers, loaded from a
// "prefix,asn" CSV ("8.8.8.0/24,15169" or "...,AS15169").
class asn_table {
public:
    static asn_table from_stream(std::istream &in);
    static asn_table from_string(std::string_view text);

    void add(std::string_view prefix_cidr, std::uint32_t asn);

    // "AS15169", or "AS0" when nothing matches (including unparseable input)
    std::string lookup(std::string_view ip) const;

private:
    struct family_table {
        // by prefix length, masked address bytes -> asn
        std::map<int, std::unordered_map<std::string, std::uint32_t>, std::greater<int>> by_len;
    };
    family_table v4_;
    family_table v6_;
};

// Port to application-class labels; unlisted ports are "unknown".
class port_classes {
public:
    static port_classes defaults();
    static port_classes from_stream(std::istream &in);  // "port,label" CSV

    std::string class_of(std::uint16_t port) const;

private:
    std::map<std::uint16_t, std::string> classes_;
};

struct equivalence_tables {
    suffix_rules psl;
    asn_table asn;
    port_classes ports = port_classes::defaults();
};

// Registrable domain of a server name: the public suffix plus one label.
// Returns nothing when the name itself is a public suffix (or is not a
// usable host name); a name of at most two labels matching no rule is
// returned unchanged.
std::optional<std::string> domain_of(std::string_view server_name,
                                     const equivalence_tables &tables);

// Matched public suffix ("com", "co.uk"); the final label when no rule
// matches.
std::string tld_of(std::string_view server_name, const equivalence_tables &tables);

std::string asn_of(std::string_view ip, const equivalence_tables &tables);

std::string port_class(std::uint16_t port, const equivalence_tables &tables);

} // namespace tlsfp

#endif // TLSFP_EQUIVALENCE_HPP
