// approx_match.hpp
//
// nearest known fingerprint by token-level edit distance
//
// Copyright (c) 2026 the tlsfp authors.  License: Apache-2.0; see LICENSE.

#ifndef TLSFP_APPROX_MATCH_HPP
#define TLSFP_APPROX_MATCH_HPP

#include <cstddef>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>

#include "tlsfp/fingerprint.hpp"
#include "tlsfp/knowledge_base.hpp"

namespace tlsfp {

struct empty_knowledge_base : std::runtime_error {
    empty_knowledge_base() : std::runtime_error{"knowledge base has no fingerprints"} {}
};

enum class match_kind { exact, approximate };

struct match_result {
    std::string fingerprint;
    std::size_t distance = 0;
    match_kind kind = match_kind::exact;

    bool operator==(const match_result &) const = default;
};

// Edit distance over [version, ciphers..., extensions...] with unit-cost
// insertions, deletions, and substitutions; tokens compare by exact string
// equality.
std::size_t token_levenshtein(const fingerprint_tokens &a, const fingerprint_tokens &b);

// Sequence form.  When the running minimum of a row exceeds `cutoff` the
// scan stops and any value > cutoff is returned.
std::size_t token_levenshtein(std::span<const std::string_view> a,
                              std::span<const std::string_view> b,
                              std::size_t cutoff = SIZE_MAX);

// Exact lookup, else the known fingerprint with minimal distance; ties go
// to the more prevalent fingerprint (larger total), then to the
// lexicographically smaller text.  Throws empty_knowledge_base.
match_result nearest_fingerprint(const knowledge_base &kb, const std::string &query);

// Memo of nearest_fingerprint results, keyed by query; cleared whenever it
// sees a different knowledge base identity.  Insertions are synchronized.
class match_cache {
public:
    std::size_t hits() const { return hits_; }
    std::size_t misses() const { return misses_; }
    std::size_t size() const { return results_.size(); }

private:
    friend match_result cached_nearest(const knowledge_base &kb, match_cache &cache,
                                       const std::string &query);
    std::mutex mutex_;
    std::uint64_t kb_identity_ = 0;
    std::unordered_map<std::string, match_result> results_;
    std::size_t hits_ = 0;
    std::size_t misses_ = 0;
};

match_result cached_nearest(const knowledge_base &kb, match_cache &cache,
                            const std::string &query);

} // namespace tlsfp

#endif // TLSFP_APPROX_MATCH_HPP
