// knowledge_base.hpp
//
// fingerprint knowledge bases: build from fused records, merge, window,
// and a line-delimited persistence format
//
// Copyright (c) 2026 the tlsfp authors.  License: Apache-2.0; see LICENSE.

#ifndef TLSFP_KNOWLEDGE_BASE_HPP
#define TLSFP_KNOWLEDGE_BASE_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tlsfp/equivalence.hpp"
#include "tlsfp/records.hpp"

namespace tlsfp {

// The seven destination feature kinds the classifier sees.
enum class feature_kind : int {
    server_name = 0,
    domain,
    tld,
    ip,
    asn,
    port,
    port_class,
};

constexpr int feature_kind_count = 7;

std::string_view feature_kind_name(feature_kind kind);
feature_kind feature_kind_from_name(std::string_view name);  // throws std::invalid_argument

struct schema_mismatch : std::runtime_error {
    explicit schema_mismatch(const std::string &what) : std::runtime_error(what) {}
};

struct kb_parse_error : std::runtime_error {
    kb_parse_error(const std::string &what, std::size_t line)
        : std::runtime_error(what + " at line " + std::to_string(line)), line_number{line} {}
    std::size_t line_number;
};

// Session and per-destination-feature counts for one process under one
// fingerprint.
struct process_entry {
    std::string name;
    std::string family;
    bool malware = false;
    std::uint64_t session_count = 0;
    std::map<feature_kind, std::map<std::string, std::uint64_t>> feature_counts;
};

struct fingerprint_entry {
    std::uint64_t total = 0;  // sum of session_count over processes
    std::map<std::string, process_entry> processes;
};

// Optional process-name normalization ("chrome.exe" -> "chrome") and
// process-family assignment, both with identity fallback.
class name_maps {
public:
    static name_maps from_csv(std::istream &normalized, std::istream &families);
    static name_maps identity() { return {}; }

    void add_normalization(std::string raw, std::string normalized);
    void add_family(std::string normalized, std::string family);

    std::string normalize(const std::string &raw) const;
    std::string family_of(const std::string &normalized) const;

private:
    std::map<std::string, std::string> normalized_;
    std::map<std::string, std::string> families_;
};

class knowledge_base {
public:
    knowledge_base();
    knowledge_base(const knowledge_base &other);
    knowledge_base(knowledge_base &&other) noexcept;
    knowledge_base &operator=(const knowledge_base &other);
    knowledge_base &operator=(knowledge_base &&other) noexcept;

    std::map<std::string, fingerprint_entry> entries;
    std::string first_day;  // ISO dates; empty for an empty base
    std::string last_day;
    std::string schema_version = "1";

    bool empty() const { return entries.empty(); }
    std::uint64_t total_sessions() const;

    // Distinguishes bases for result caching; fresh on every construction.
    std::uint64_t identity() const { return identity_; }

private:
    std::uint64_t identity_;
};

// Aggregates one day of fused records.  Feature counts use the equivalence
// tables; records without a server_name contribute no server_name, domain,
// or tld counts.
knowledge_base build_daily(std::span<const fused_record> records, const std::string &day,
                           const equivalence_tables &tables,
                           const name_maps &names = name_maps::identity());

// Pointwise sum of counts with malware flags OR-ed; the date range is the
// hull of the inputs.  All inputs must share a schema version.
knowledge_base merge(std::span<const knowledge_base> bases);

// Merge of the daily bases whose date range lies within [start, end].
knowledge_base filter_window(std::span<const std::pair<std::string, knowledge_base>> daily,
                             const std::string &start, const std::string &end);

// One header line, then one fingerprint entry per line, keys sorted; two
// serializations of equal bases are byte-identical and round-trip exactly.
void serialize(const knowledge_base &kb, std::ostream &out);
std::string serialize(const knowledge_base &kb);
knowledge_base deserialize(std::istream &in);  // throws kb_parse_error

// Publishable copy: keeps only the ten most prevalent processes per
// fingerprint and drops the raw server_name and ip counts, leaving the
// equivalence mappings.  Entry totals are recomputed from the survivors.
knowledge_base redact(const knowledge_base &kb);

} // namespace tlsfp

#endif // TLSFP_KNOWLEDGE_BASE_HPP
