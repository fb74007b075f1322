// helpers.cpp — shared test utilities

#include "helpers.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <map>
#include <stdexcept>
#include <tuple>

#include "tlsfp/bytes.hpp"
#include "tlsfp/equivalence.hpp"

namespace testutil {

namespace {

void push_u16(std::vector<std::uint8_t> &out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
}

void push_u24(std::vector<std::uint8_t> &out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 16 & 0xff));
    out.push_back(static_cast<std::uint8_t>(v >> 8 & 0xff));
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
}

} // namespace

std::vector<std::uint8_t> build_client_hello(const tlsfp::client_hello_summary &summary,
                                             std::uint16_t record_version,
                                             std::uint8_t session_id_len) {
    std::vector<std::uint8_t> body;
    push_u16(body, summary.legacy_version);
    for (int i = 0; i < 32; i++) {
        body.push_back(static_cast<std::uint8_t>(0x40 + i));  // fixed "random"
    }
    body.push_back(session_id_len);
    for (int i = 0; i < session_id_len; i++) {
        body.push_back(static_cast<std::uint8_t>(0x80 + i));
    }
    push_u16(body, static_cast<std::uint16_t>(summary.cipher_suites.size() * 2));
    for (std::uint16_t c : summary.cipher_suites) {
        push_u16(body, c);
    }
    body.push_back(1);     // one compression method
    body.push_back(0x00);  // null

    if (!summary.extensions.empty()) {
        std::vector<std::uint8_t> ext_block;
        for (const auto &ext : summary.extensions) {
            push_u16(ext_block, ext.type);
            push_u16(ext_block, static_cast<std::uint16_t>(ext.data.size()));
            ext_block.insert(ext_block.end(), ext.data.begin(), ext.data.end());
        }
        push_u16(body, static_cast<std::uint16_t>(ext_block.size()));
        body.insert(body.end(), ext_block.begin(), ext_block.end());
    }

    std::vector<std::uint8_t> out;
    out.push_back(0x16);
    push_u16(out, record_version);
    push_u16(out, static_cast<std::uint16_t>(body.size() + 4));
    out.push_back(0x01);
    push_u24(out, static_cast<std::uint32_t>(body.size()));
    out.insert(out.end(), body.begin(), body.end());
    return out;
}

std::vector<std::uint8_t> sni_body(std::string_view host) {
    std::vector<std::uint8_t> body;
    push_u16(body, static_cast<std::uint16_t>(host.size() + 3));  // server_name_list length
    body.push_back(0x00);                                         // host_name
    push_u16(body, static_cast<std::uint16_t>(host.size()));
    body.insert(body.end(), host.begin(), host.end());
    return body;
}

tlsfp::tls_extension sni_extension(std::string_view host) {
    return {0x0000, sni_body(host)};
}

tlsfp::tls_extension supported_versions_extension(std::span<const std::uint16_t> codes) {
    tlsfp::tls_extension ext{0x002b, {}};
    ext.data.push_back(static_cast<std::uint8_t>(codes.size() * 2));
    for (std::uint16_t c : codes) {
        push_u16(ext.data, c);
    }
    return ext;
}

tlsfp::tls_extension supported_groups_extension(std::span<const std::uint16_t> codes) {
    tlsfp::tls_extension ext{0x000a, {}};
    push_u16(ext.data, static_cast<std::uint16_t>(codes.size() * 2));
    for (std::uint16_t c : codes) {
        push_u16(ext.data, c);
    }
    return ext;
}

tlsfp::client_hello_summary random_summary(std::mt19937_64 &rng) {
    auto random_code = [&rng]() {
        return static_cast<std::uint16_t>(rng() & 0xffff);
    };
    std::uniform_int_distribution<int> cipher_count(0, 12);
    std::uniform_int_distribution<int> ext_count(0, 8);
    std::uniform_int_distribution<int> data_len(0, 24);
    std::uniform_int_distribution<int> percent(0, 99);

    tlsfp::client_hello_summary s;
    s.legacy_version = percent(rng) < 80 ? 0x0303 : random_code();
    int ciphers = cipher_count(rng);
    for (int i = 0; i < ciphers; i++) {
        s.cipher_suites.push_back(percent(rng) < 15 ? 0x3a3a : random_code());
    }
    int exts = ext_count(rng);
    for (int i = 0; i < exts; i++) {
        tlsfp::tls_extension ext;
        int roll = percent(rng);
        if (roll < 10) {
            std::vector<std::uint16_t> codes{0x7a7a, 0x0017, 0x0018};
            ext = supported_groups_extension(codes);
        } else if (roll < 20) {
            std::vector<std::uint16_t> codes{0xdada, 0x0304, 0x0303};
            ext = supported_versions_extension(codes);
        } else {
            // avoid type 0000 so server_name stays consistent
            do {
                ext.type = percent(rng) < 15 ? 0xbaba : random_code();
            } while (ext.type == 0x0000);
            int len = data_len(rng);
            for (int b = 0; b < len; b++) {
                ext.data.push_back(static_cast<std::uint8_t>(rng() & 0xff));
            }
        }
        s.extensions.push_back(std::move(ext));
    }
    if (percent(rng) < 60) {
        std::string host = "host" + std::to_string(rng() % 1000) + ".example.com";
        s.extensions.insert(s.extensions.begin() + static_cast<long>(rng() % (s.extensions.size() + 1)),
                            sni_extension(host));
        s.server_name = host;
    }
    return s;
}

namespace {

void push_u32le(std::vector<std::uint8_t> &out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
    out.push_back(static_cast<std::uint8_t>(v >> 8 & 0xff));
    out.push_back(static_cast<std::uint8_t>(v >> 16 & 0xff));
    out.push_back(static_cast<std::uint8_t>(v >> 24 & 0xff));
}

std::array<std::uint8_t, 4> parse_ipv4(const std::string &ip) {
    std::array<std::uint8_t, 4> out{};
    unsigned a, b, c, d;
    if (std::sscanf(ip.c_str(), "%u.%u.%u.%u", &a, &b, &c, &d) != 4) {
        throw std::invalid_argument{"test packet needs an IPv4 address"};
    }
    out = {static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(b),
           static_cast<std::uint8_t>(c), static_cast<std::uint8_t>(d)};
    return out;
}

} // namespace

std::vector<std::uint8_t> build_pcap(std::span<const synthetic_packet> packets) {
    std::vector<std::uint8_t> out;
    push_u32le(out, 0xa1b2c3d4);
    out.push_back(2); out.push_back(0);  // version 2.4
    out.push_back(4); out.push_back(0);
    push_u32le(out, 0);       // thiszone
    push_u32le(out, 0);       // sigfigs
    push_u32le(out, 65535);   // snaplen
    push_u32le(out, 1);       // ethernet

    for (const auto &pkt : packets) {
        std::vector<std::uint8_t> frame;
        // ethernet
        for (int i = 0; i < 6; i++) frame.push_back(0x02);
        for (int i = 0; i < 6; i++) frame.push_back(0x04);
        push_u16(frame, 0x0800);
        // ipv4
        std::uint8_t proto = pkt.udp ? 17 : 6;
        std::size_t l4_header = pkt.udp ? 8 : 20;
        std::uint16_t total_len = static_cast<std::uint16_t>(20 + l4_header + pkt.payload.size());
        frame.push_back(0x45);
        frame.push_back(0);
        push_u16(frame, total_len);
        push_u16(frame, 0x1234);  // id
        push_u16(frame, 0x4000);  // don't fragment
        frame.push_back(64);      // ttl
        frame.push_back(proto);
        push_u16(frame, 0);       // checksum unchecked
        auto src = parse_ipv4(pkt.flow.src_ip);
        auto dst = parse_ipv4(pkt.flow.dst_ip);
        frame.insert(frame.end(), src.begin(), src.end());
        frame.insert(frame.end(), dst.begin(), dst.end());
        // l4
        push_u16(frame, pkt.flow.src_port);
        push_u16(frame, pkt.flow.dst_port);
        if (pkt.udp) {
            push_u16(frame, static_cast<std::uint16_t>(8 + pkt.payload.size()));
            push_u16(frame, 0);
        } else {
            push_u32le(frame, 0);     // seq (value irrelevant)
            push_u32le(frame, 0);     // ack
            frame.push_back(0x50);    // data offset 5
            frame.push_back(0x18);    // psh|ack
            push_u16(frame, 0xffff);  // window
            push_u16(frame, 0);       // checksum
            push_u16(frame, 0);       // urgent
        }
        frame.insert(frame.end(), pkt.payload.begin(), pkt.payload.end());

        std::uint32_t sec = static_cast<std::uint32_t>(pkt.timestamp);
        std::uint32_t usec = static_cast<std::uint32_t>((pkt.timestamp - sec) * 1e6 + 0.5);
        push_u32le(out, sec);
        push_u32le(out, usec);
        push_u32le(out, static_cast<std::uint32_t>(frame.size()));
        push_u32le(out, static_cast<std::uint32_t>(frame.size()));
        out.insert(out.end(), frame.begin(), frame.end());
    }
    return out;
}

std::size_t levenshtein_recursive(std::span<const std::string> a,
                                  std::span<const std::string> b) {
    if (a.empty()) {
        return b.size();
    }
    if (b.empty()) {
        return a.size();
    }
    std::size_t subst = levenshtein_recursive(a.subspan(1), b.subspan(1)) +
                        (a.front() == b.front() ? 0 : 1);
    std::size_t del = levenshtein_recursive(a.subspan(1), b) + 1;
    std::size_t ins = levenshtein_recursive(a, b.subspan(1)) + 1;
    return std::min({subst, del, ins});
}

namespace {

std::size_t memo_rec(std::span<const std::string> a, std::span<const std::string> b,
                     std::size_t i, std::size_t j,
                     std::map<std::pair<std::size_t, std::size_t>, std::size_t> &memo) {
    if (i == a.size()) {
        return b.size() - j;
    }
    if (j == b.size()) {
        return a.size() - i;
    }
    auto key = std::make_pair(i, j);
    auto it = memo.find(key);
    if (it != memo.end()) {
        return it->second;
    }
    std::size_t subst = memo_rec(a, b, i + 1, j + 1, memo) + (a[i] == b[j] ? 0 : 1);
    std::size_t del = memo_rec(a, b, i + 1, j, memo) + 1;
    std::size_t ins = memo_rec(a, b, i, j + 1, memo) + 1;
    std::size_t best = std::min({subst, del, ins});
    memo.emplace(key, best);
    return best;
}

} // namespace

std::size_t levenshtein_recursive_memo(std::span<const std::string> a,
                                       std::span<const std::string> b) {
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> memo;
    return memo_rec(a, b, 0, 0, memo);
}

double naive_bayes_score(const tlsfp::fingerprint_entry &entry,
                         const tlsfp::process_entry &pe, const tlsfp::feature_weights &weights,
                         const tlsfp::destination_context &dest,
                         const tlsfp::equivalence_tables &tables) {
    double total = static_cast<double>(entry.total);
    double n = static_cast<double>(pe.session_count);
    double q = std::log(n / total);

    auto lookup = [&pe](tlsfp::feature_kind kind, const std::string &value) -> std::uint64_t {
        auto kit = pe.feature_counts.find(kind);
        if (kit == pe.feature_counts.end()) {
            return 0;
        }
        auto vit = kit->second.find(value);
        return vit == kit->second.end() ? 0 : vit->second;
    };
    auto term = [&](tlsfp::feature_kind kind, const std::string &value) {
        std::uint64_t c = lookup(kind, value);
        double p = c > 0 ? static_cast<double>(c) / n : 1.0 / total;
        q += weights[kind] * std::log(p);
    };

    if (dest.server_name && !dest.server_name->empty()) {
        term(tlsfp::feature_kind::server_name, *dest.server_name);
        if (auto dom = tlsfp::domain_of(*dest.server_name, tables)) {
            term(tlsfp::feature_kind::domain, *dom);
        }
        term(tlsfp::feature_kind::tld, tlsfp::tld_of(*dest.server_name, tables));
    }
    if (!dest.dst_ip.empty()) {
        term(tlsfp::feature_kind::ip, dest.dst_ip);
        term(tlsfp::feature_kind::asn, tlsfp::asn_of(dest.dst_ip, tables));
    }
    term(tlsfp::feature_kind::port, std::to_string(dest.dst_port));
    term(tlsfp::feature_kind::port_class, tlsfp::port_class(dest.dst_port, tables));
    return q;
}

double igr_from_table(const std::vector<std::vector<std::uint64_t>> &counts) {
    std::size_t rows = counts.size();          // processes
    std::size_t cols = counts.empty() ? 0 : counts[0].size();  // values
    double total = 0;
    std::vector<double> row_sum(rows, 0), col_sum(cols, 0);
    for (std::size_t r = 0; r < rows; r++) {
        for (std::size_t c = 0; c < cols; c++) {
            row_sum[r] += static_cast<double>(counts[r][c]);
            col_sum[c] += static_cast<double>(counts[r][c]);
            total += static_cast<double>(counts[r][c]);
        }
    }
    auto plogp = [](double p) { return p > 0 ? -p * std::log(p) : 0.0; };
    double h_z = 0, h_f = 0, h_z_given_f = 0;
    for (double s : row_sum) {
        h_z += plogp(s / total);
    }
    for (double s : col_sum) {
        h_f += plogp(s / total);
    }
    for (std::size_t c = 0; c < cols; c++) {
        if (col_sum[c] == 0) {
            continue;
        }
        double h = 0;
        for (std::size_t r = 0; r < rows; r++) {
            h += plogp(static_cast<double>(counts[r][c]) / col_sum[c]);
        }
        h_z_given_f += col_sum[c] / total * h;
    }
    if (h_f == 0) {
        return 0;
    }
    return (h_z - h_z_given_f) / h_f;
}

std::vector<std::pair<std::size_t, std::size_t>> brute_force_join(
    std::span<const tlsfp::host_record> hosts, std::span<const tlsfp::network_record> nets,
    double max_delta) {
    std::vector<bool> host_used(hosts.size(), false);
    std::vector<bool> net_used(nets.size(), false);
    std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (host, net)

    while (true) {
        double best_delta = -1;
        std::size_t best_h = 0, best_n = 0;
        bool found = false;
        for (std::size_t h = 0; h < hosts.size(); h++) {
            if (host_used[h]) continue;
            for (std::size_t n = 0; n < nets.size(); n++) {
                if (net_used[n]) continue;
                if (hosts[h].flow != nets[n].flow) continue;
                double delta = std::fabs(hosts[h].start_time - nets[n].start_time);
                if (delta > max_delta) continue;
                bool better = !found || delta < best_delta;
                if (!better && delta == best_delta) {
                    // same ties as production: earlier network time, then sha256
                    auto cur = std::tie(nets[n].start_time, hosts[h].process_sha256,
                                        hosts[h].start_time, nets[n].fingerprint);
                    auto best = std::tie(nets[best_n].start_time, hosts[best_h].process_sha256,
                                         hosts[best_h].start_time, nets[best_n].fingerprint);
                    better = cur < best;
                }
                if (better) {
                    best_delta = delta;
                    best_h = h;
                    best_n = n;
                    found = true;
                }
            }
        }
        if (!found) {
            break;
        }
        host_used[best_h] = true;
        net_used[best_n] = true;
        pairs.emplace_back(best_h, best_n);
    }
    return pairs;
}

namespace {

// appends the parts of `hex` that are required to appear in the packet,
// splitting around 0a0a (a possible GREASE normalization spot)
void collect_segments(const std::string &hex, std::vector<std::string> &out) {
    std::size_t start = 0;
    while (start < hex.size()) {
        std::size_t g = hex.find("0a0a", start);
        std::size_t end = g == std::string::npos ? hex.size() : g;
        if (end > start) {
            out.push_back(hex.substr(start, end - start));
        }
        if (g == std::string::npos) {
            break;
        }
        start = g + 4;
    }
}

} // namespace

std::vector<std::string> missing_hex_segments(const std::string &fingerprint,
                                              const std::string &packet_hex) {
    auto tokens = tlsfp::tokenize_fingerprint(fingerprint);
    std::vector<std::string> required;
    collect_segments(tokens.version, required);
    for (const auto &c : tokens.ciphers) {
        collect_segments(c, required);
    }
    for (const auto &e : tokens.extensions) {
        // type code and data are separated by the length field on the wire
        collect_segments(e.substr(0, 4), required);
        if (e.size() > 4) {
            collect_segments(e.substr(4), required);
        }
    }
    std::vector<std::string> missing;
    for (const auto &segment : required) {
        if (packet_hex.find(segment) == std::string::npos) {
            missing.push_back(segment);
        }
    }
    return missing;
}

std::vector<std::string> random_token_sequence(std::mt19937_64 &rng, std::size_t max_len,
                                               int alphabet) {
    std::uniform_int_distribution<std::size_t> len_dist(0, max_len);
    std::uniform_int_distribution<int> sym_dist(0, alphabet - 1);
    std::vector<std::string> seq;
    std::size_t len = len_dist(rng);
    for (std::size_t i = 0; i < len; i++) {
        seq.push_back("t" + std::to_string(sym_dist(rng)));
    }
    return seq;
}

std::vector<tlsfp::fused_record> random_fused_records(std::mt19937_64 &rng, std::size_t count,
                                                      int fingerprints, int processes,
                                                      int values) {
    std::uniform_int_distribution<int> fp_dist(0, fingerprints - 1);
    std::uniform_int_distribution<int> proc_dist(0, processes - 1);
    std::uniform_int_distribution<int> value_dist(0, values - 1);
    std::uniform_int_distribution<int> percent(0, 99);
    std::vector<std::string> fps;
    for (int i = 0; i < fingerprints; i++) {
        fps.push_back("(0303)(13011302)((000b0201" + std::string(1, static_cast<char>('a' + i % 6)) +
                      "0)(0023))");
    }

    std::vector<tlsfp::fused_record> records;
    for (std::size_t i = 0; i < count; i++) {
        tlsfp::fused_record r;
        r.fingerprint = fps[static_cast<std::size_t>(fp_dist(rng))];
        int v = value_dist(rng);
        r.destination.dst_ip = "10.0." + std::to_string(v) + ".1";
        r.destination.dst_port = percent(rng) < 70 ? 443 : 8080;
        if (percent(rng) < 75) {
            r.destination.server_name = "v" + std::to_string(v) + ".example.com";
        }
        int p = proc_dist(rng);
        r.process_name = "proc" + std::to_string(p);
        r.process_sha256 = std::string(63, '0') + std::to_string(p % 10);
        r.os = "TestOS";
        r.start_time = 1'000'000 + static_cast<double>(i);
        r.malware = p == 0 && percent(rng) < 50;
        records.push_back(std::move(r));
    }
    return records;
}

} // namespace testutil
