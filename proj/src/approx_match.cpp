// approx_match.cpp
//
// Copyright (c) 2026 the tlsfp authors.  License: Apache-2.0; see LICENSE.

#include "tlsfp/approx_match.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace tlsfp {

std::size_t token_levenshtein(std::span<const std::string_view> a,
                              std::span<const std::string_view> b,
                              std::size_t cutoff) {
    if (a.size() > b.size()) {
        std::swap(a, b);
    }
    std::vector<std::size_t> row(a.size() + 1);
    std::iota(row.begin(), row.end(), std::size_t{0});

    for (std::size_t j = 0; j < b.size(); j++) {
        std::size_t diagonal = row[0];
        row[0] = j + 1;
        std::size_t row_min = row[0];
        for (std::size_t i = 0; i < a.size(); i++) {
            std::size_t up = row[i + 1];
            if (a[i] == b[j]) {
                row[i + 1] = diagonal;
            } else {
                row[i + 1] = std::min({row[i], up, diagonal}) + 1;
            }
            diagonal = up;
            row_min = std::min(row_min, row[i + 1]);
        }
        if (row_min > cutoff) {
            return row_min;
        }
    }
    return row[a.size()];
}

std::size_t token_levenshtein(const fingerprint_tokens &a, const fingerprint_tokens &b) {
    auto sa = a.sequence();
    auto sb = b.sequence();
    return token_levenshtein(sa, sb);
}

match_result nearest_fingerprint(const knowledge_base &kb, const std::string &query) {
    if (kb.empty()) {
        throw empty_knowledge_base{};
    }
    if (kb.entries.contains(query)) {
        return {query, 0, match_kind::exact};
    }

    fingerprint_tokens query_tokens = tokenize_fingerprint(query);
    auto query_seq = query_tokens.sequence();

    const std::string *best_fp = nullptr;
    std::size_t best_distance = SIZE_MAX;
    std::uint64_t best_total = 0;

    // entries iterate in lexicographic order, so on full ties the smaller
    // text is kept by never replacing an equal candidate
    for (const auto &[fp, entry] : kb.entries) {
        fingerprint_tokens tokens = tokenize_fingerprint(fp);
        auto seq = tokens.sequence();
        std::size_t cutoff = best_distance == SIZE_MAX ? SIZE_MAX : best_distance;
        std::size_t d = token_levenshtein(seq, query_seq, cutoff);
        if (d < best_distance ||
            (d == best_distance && entry.total > best_total)) {
            best_fp = &fp;
            best_distance = d;
            best_total = entry.total;
        }
    }
    return {*best_fp, best_distance, match_kind::approximate};
}

match_result cached_nearest(const knowledge_base &kb, match_cache &cache,
                            const std::string &query) {
    {
        std::lock_guard lock{cache.mutex_};
        if (cache.kb_identity_ != kb.identity()) {
            cache.results_.clear();
            cache.kb_identity_ = kb.identity();
        }
        auto it = cache.results_.find(query);
        if (it != cache.results_.end()) {
            cache.hits_++;
            return it->second;
        }
        cache.misses_++;
    }
    match_result result = nearest_fingerprint(kb, query);
    {
        std::lock_guard lock{cache.mutex_};
        if (cache.kb_identity_ == kb.identity()) {
            cache.results_.emplace(query, result);
        }
    }
    return result;
}

} // namespace tlsfp
