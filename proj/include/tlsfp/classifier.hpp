// classifier.hpp
//
// weighted naive Bayes process inference over fingerprint knowledge bases,
// information-gain-ratio feature weights, baselines, and evaluation metrics
//
// Copyright (c) 2026 the tlsfp authors.  License: Apache-2.0; see LICENSE.

#ifndef TLSFP_CLASSIFIER_HPP
#define TLSFP_CLASSIFIER_HPP

#include <array>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tlsfp/approx_match.hpp"
#include "tlsfp/equivalence.hpp"
#include "tlsfp/knowledge_base.hpp"

namespace tlsfp {

struct no_candidates : std::runtime_error {
    no_candidates() : std::runtime_error{"matched fingerprint entry has no processes"} {}
};

// Per-feature-kind weights for the log-likelihood terms.
struct feature_weights {
    std::array<double, feature_kind_count> w{};

    double &operator[](feature_kind kind) { return w[static_cast<int>(kind)]; }
    double operator[](feature_kind kind) const { return w[static_cast<int>(kind)]; }

    static feature_weights zeros() { return {}; }
    static feature_weights ones();

    // Weights found on real-world traffic; used when no base is available
    // to fit them.
    static feature_weights defaults();

    // seven-row "kind,weight" CSV
    static feature_weights from_csv(std::istream &in);
    void to_csv(std::ostream &out) const;
};

struct candidate_score {
    std::string process_name;
    std::string process_family;
    bool malware = false;
    double log_score = 0;    // q of the scoring loop
    double probability = 0;  // softmax of q over the candidate set
};

struct classification_result {
    std::vector<candidate_score> candidates;  // by descending probability
    match_result match;
    double malware_probability = 0;

    const candidate_score *top() const {
        return candidates.empty() ? nullptr : &candidates.front();
    }
};

struct classify_options {
    // feature kinds to include; masking is how feature-subset runs work
    std::array<bool, feature_kind_count> enabled;
    match_cache *cache = nullptr;

    classify_options() { enabled.fill(true); }

    bool is_enabled(feature_kind kind) const { return enabled[static_cast<int>(kind)]; }

    static classify_options with_kinds(std::span<const feature_kind> kinds);
};

// Information gain ratio (H(Z) - H(Z|F)) / H(F) per feature kind, over the
// session-weighted joint distribution of (process, feature value) pooled
// across all fingerprints.  Sessions lacking a feature contribute a
// distinguished absent value; a kind with H(F) = 0 gets weight 0.
feature_weights compute_weights(const knowledge_base &kb);

// Weighted naive Bayes over the processes of the matched fingerprint entry:
//   q(z) = log P(z) + sum_f w_f log P(f|z) + sum_g w_g log P(g(f)|z)
// with empirical estimates from the entry and a 1/total prior replacing any
// zero estimate.  The fingerprint resolves exactly when known, otherwise by
// nearest_fingerprint.  Absent server_name skips the server_name, domain,
// and tld terms.
classification_result classify(const knowledge_base &kb, const feature_weights &weights,
                               const std::string &fingerprint,
                               const destination_context &dest,
                               const equivalence_tables &tables,
                               const classify_options &options = {});

// Baseline: rank by session count alone (ties by name).  Equals classify
// with all-zero weights.
classification_result top_process(const knowledge_base &kb, const std::string &fingerprint,
                                  const classify_options &options = {});

// Baseline: ignore the fingerprint and rank processes by pooled session
// counts for the given destination value across the whole base.  An
// unobserved value yields a result with no candidates.
classification_result destination_only(const knowledge_base &kb, feature_kind kind,
                                       const destination_context &dest);

// Passes the result through iff its top probability reaches min_probability;
// otherwise abstains (empty optional).
std::optional<classification_result> apply_threshold(const classification_result &result,
                                                     double min_probability);

struct label_metrics {
    double precision = 0;
    double recall = 0;
};

struct evaluation_metrics {
    double micro_f1 = 0;
    double micro_precision = 0;
    double micro_recall = 0;
    std::map<std::string, label_metrics> per_label;
};

// Micro-averaged F1 and per-label precision/recall over (predicted, true)
// label pairs.
evaluation_metrics evaluate(std::span<const std::pair<std::string, std::string>> predictions);

// Binary precision/recall over (predicted, true) malware flags.
label_metrics evaluate_malware(std::span<const std::pair<bool, bool>> predictions);

} // namespace tlsfp

#endif // TLSFP_CLASSIFIER_HPP
