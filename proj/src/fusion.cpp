// fusion.cpp
//
// Copyright (c) 2026 the tlsfp authors.  License: Apache-2.0; see LICENSE.

#include "tlsfp/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace tlsfp {

namespace {

constexpr int malware_engine_threshold = 5;

struct candidate_pair {
    double delta;
    const network_record *net;
    const host_record *host;
    std::size_t net_index;  // within the group
    std::size_t host_index;
};

} // namespace

std::vector<fused_record> join_records(std::span<const host_record> hosts,
                                       std::span<const network_record> nets,
                                       double max_delta_seconds) {
    std::map<five_tuple, std::pair<std::vector<const host_record *>,
                                   std::vector<const network_record *>>>
        groups;
    for (const auto &h : hosts) {
        groups[h.flow].first.push_back(&h);
    }
    for (const auto &n : nets) {
        groups[n.flow].second.push_back(&n);
    }

    std::vector<fused_record> fused;
    for (auto &[flow, group] : groups) {
        auto &[group_hosts, group_nets] = group;
        if (group_hosts.empty() || group_nets.empty()) {
            continue;
        }
        // Canonical in-group order keeps the greedy pass independent of the
        // caller's record order.
        auto host_key = [](const host_record *h) {
            return std::tie(h->start_time, h->process_sha256, h->process_name);
        };
        auto net_key = [](const network_record *n) {
            return std::tie(n->start_time, n->fingerprint);
        };
        std::sort(group_hosts.begin(), group_hosts.end(),
                  [&](auto *a, auto *b) { return host_key(a) < host_key(b); });
        std::sort(group_nets.begin(), group_nets.end(),
                  [&](auto *a, auto *b) { return net_key(a) < net_key(b); });

        std::vector<candidate_pair> candidates;
        for (std::size_t ni = 0; ni < group_nets.size(); ni++) {
            for (std::size_t hi = 0; hi < group_hosts.size(); hi++) {
                double delta = std::fabs(group_nets[ni]->start_time -
                                         group_hosts[hi]->start_time);
                if (delta <= max_delta_seconds) {
                    candidates.push_back({delta, group_nets[ni], group_hosts[hi], ni, hi});
                }
            }
        }
        std::sort(candidates.begin(), candidates.end(), [](const auto &a, const auto &b) {
            return std::tie(a.delta, a.net->start_time, a.host->process_sha256,
                            a.host->start_time, a.net->fingerprint, a.net_index,
                            a.host_index) <
                   std::tie(b.delta, b.net->start_time, b.host->process_sha256,
                            b.host->start_time, b.net->fingerprint, b.net_index,
                            b.host_index);
        });

        std::vector<bool> net_used(group_nets.size(), false);
        std::vector<bool> host_used(group_hosts.size(), false);
        for (const auto &c : candidates) {
            if (net_used[c.net_index] || host_used[c.host_index]) {
                continue;
            }
            net_used[c.net_index] = true;
            host_used[c.host_index] = true;
            fused_record r;
            r.fingerprint = c.net->fingerprint;
            r.destination = c.net->destination;
            r.process_name = c.host->process_name;
            r.process_sha256 = c.host->process_sha256;
            r.os = c.host->os;
            r.start_time = c.net->start_time;
            fused.push_back(std::move(r));
        }
    }

    std::sort(fused.begin(), fused.end(), [](const fused_record &a, const fused_record &b) {
        return std::tie(a.start_time, a.fingerprint, a.process_sha256,
                        a.destination.dst_ip, a.destination.dst_port) <
               std::tie(b.start_time, b.fingerprint, b.process_sha256,
                        b.destination.dst_ip, b.destination.dst_port);
    });
    return fused;
}

std::vector<fused_record> label_malware(std::vector<fused_record> records,
                                        const std::map<std::string, int> &verdicts) {
    for (auto &r : records) {
        auto it = verdicts.find(r.process_sha256);
        if (it != verdicts.end()) {
            r.malware = it->second >= malware_engine_threshold;
        }
    }
    return records;
}

} // namespace tlsfp
