// fusion.hpp
//
// joins host process events with network fingerprint records
//
// Copyright (c) 2026 the tlsfp authors.  License: Apache-2.0; see LICENSE.

#ifndef TLSFP_FUSION_HPP
#define TLSFP_FUSION_HPP

#include <map>
#include <span>
#include <string>
#include <vector>

#include "tlsfp/records.hpp"

namespace tlsfp {

// Pairs each network record with at most one host record sharing its
// 5-tuple.  Within a 5-tuple group, pairs are taken greedily by ascending
// timestamp delta; pairs further apart than max_delta_seconds are discarded.
// Ties on the delta are broken by earlier network start_time, then by
// lexicographic process sha256, so the output does not depend on input
// order.  Results are sorted by (start_time, fingerprint, sha256).
std::vector<fused_record> join_records(std::span<const host_record> hosts,
                                       std::span<const network_record> nets,
                                       double max_delta_seconds = 5.0);

// Marks a record as malware iff at least five anti-virus engines flagged
// its process sha256.  Records whose sha256 is absent from the verdict map
// are left untouched.
std::vector<fused_record> label_malware(std::vector<fused_record> records,
                                        const std::map<std::string, int> &verdicts);

} // namespace tlsfp

#endif // TLSFP_FUSION_HPP
