// pcap.cpp
//
// Copyright (c) 2026 the tlsfp authors.  License: Apache-2.0; see LICENSE.

#include "tlsfp/pcap.hpp"

#include <array>
#include <cstring>
#include <istream>
#include <set>

#include <arpa/inet.h>

#include "tlsfp/fingerprint.hpp"
#include "tlsfp/tls_parser.hpp"

namespace tlsfp {

namespace {

constexpr std::uint32_t magic_usec = 0xa1b2c3d4;
constexpr std::uint32_t magic_usec_swapped = 0xd4c3b2a1;
constexpr std::uint32_t magic_nsec = 0xa1b23c4d;
constexpr std::uint32_t magic_nsec_swapped = 0x4d3cb2a1;

constexpr std::uint32_t linktype_ethernet = 1;
constexpr std::uint32_t linktype_raw_ip = 101;

std::uint32_t swap32(std::uint32_t v) {
    return v << 24 | (v & 0xff00) << 8 | (v >> 8 & 0xff00) | v >> 24;
}

std::uint16_t read_u16be(std::span<const std::uint8_t> b, std::size_t off) {
    return static_cast<std::uint16_t>(b[off] << 8 | b[off + 1]);
}

std::string ipv4_text(std::span<const std::uint8_t> b, std::size_t off) {
    char buf[INET_ADDRSTRLEN];
    in_addr addr;
    std::memcpy(&addr, b.data() + off, 4);
    return inet_ntop(AF_INET, &addr, buf, sizeof(buf)) ? buf : "";
}

std::string ipv6_text(std::span<const std::uint8_t> b, std::size_t off) {
    char buf[INET6_ADDRSTRLEN];
    in6_addr addr;
    std::memcpy(&addr, b.data() + off, 16);
    return inet_ntop(AF_INET6, &addr, buf, sizeof(buf)) ? buf : "";
}

std::optional<tcp_segment> decode_tcp_from_ip(std::span<const std::uint8_t> ip) {
    if (ip.empty()) {
        return std::nullopt;
    }
    five_tuple flow;
    std::size_t l4_offset;
    std::size_t l4_end = ip.size();

    std::uint8_t version = ip[0] >> 4;
    if (version == 4) {
        if (ip.size() < 20) {
            return std::nullopt;
        }
        std::size_t ihl = static_cast<std::size_t>(ip[0] & 0x0f) * 4;
        if (ihl < 20 || ihl > ip.size()) {
            return std::nullopt;
        }
        std::uint16_t total_len = read_u16be(ip, 2);
        if (total_len >= ihl && total_len <= ip.size()) {
            l4_end = total_len;
        }
        std::uint16_t frag = read_u16be(ip, 6);
        if ((frag & 0x1fff) != 0) {
            return std::nullopt;  // non-first fragment
        }
        if (ip[9] != 6) {
            return std::nullopt;
        }
        flow.src_ip = ipv4_text(ip, 12);
        flow.dst_ip = ipv4_text(ip, 16);
        l4_offset = ihl;
    } else if (version == 6) {
        if (ip.size() < 40) {
            return std::nullopt;
        }
        if (ip[6] != 6) {
            return std::nullopt;  // extension header chains are not chased
        }
        std::uint16_t payload_len = read_u16be(ip, 4);
        if (40 + static_cast<std::size_t>(payload_len) <= ip.size()) {
            l4_end = 40 + payload_len;
        }
        flow.src_ip = ipv6_text(ip, 8);
        flow.dst_ip = ipv6_text(ip, 24);
        l4_offset = 40;
    } else {
        return std::nullopt;
    }

    if (l4_offset + 20 > l4_end) {
        return std::nullopt;
    }
    auto tcp = ip.subspan(l4_offset, l4_end - l4_offset);
    flow.src_port = read_u16be(tcp, 0);
    flow.dst_port = read_u16be(tcp, 2);
    std::size_t data_offset = static_cast<std::size_t>(tcp[12] >> 4) * 4;
    if (data_offset < 20 || data_offset > tcp.size()) {
        return std::nullopt;
    }
    return tcp_segment{std::move(flow), tcp.subspan(data_offset)};
}

} // namespace

pcap_reader::pcap_reader(std::istream &in) : in_{in} {
    std::array<std::uint8_t, 24> header;
    in_.read(reinterpret_cast<char *>(header.data()), header.size());
    if (in_.gcount() != static_cast<std::streamsize>(header.size())) {
        throw pcap_error{"file shorter than a pcap global header"};
    }
    std::uint32_t magic;
    std::memcpy(&magic, header.data(), 4);
    switch (magic) {
    case magic_usec: break;
    case magic_nsec: nanos_ = true; break;
    case magic_usec_swapped: swap_ = true; break;
    case magic_nsec_swapped: swap_ = true; nanos_ = true; break;
    default: throw pcap_error{"not a classic pcap file"};
    }
    std::memcpy(&link_type_, header.data() + 20, 4);
    if (swap_) {
        link_type_ = swap32(link_type_);
    }
    if (link_type_ != linktype_ethernet && link_type_ != linktype_raw_ip) {
        throw pcap_error{"unsupported link type " + std::to_string(link_type_)};
    }
}

bool pcap_reader::next(pcap_packet &packet) {
    std::array<std::uint8_t, 16> header;
    in_.read(reinterpret_cast<char *>(header.data()), header.size());
    if (in_.gcount() == 0) {
        return false;
    }
    if (in_.gcount() != static_cast<std::streamsize>(header.size())) {
        throw pcap_error{"cut-off packet header"};
    }
    std::uint32_t fields[4];
    std::memcpy(fields, header.data(), 16);
    if (swap_) {
        for (auto &f : fields) {
            f = swap32(f);
        }
    }
    double subsec = nanos_ ? fields[1] / 1e9 : fields[1] / 1e6;
    packet.timestamp = static_cast<double>(fields[0]) + subsec;
    std::uint32_t incl_len = fields[2];
    packet.data.resize(incl_len);
    in_.read(reinterpret_cast<char *>(packet.data.data()), incl_len);
    if (in_.gcount() != static_cast<std::streamsize>(incl_len)) {
        throw pcap_error{"cut-off packet body"};
    }
    return true;
}

std::optional<tcp_segment> decode_tcp(std::span<const std::uint8_t> frame,
                                      std::uint32_t link_type) {
    if (link_type == linktype_raw_ip) {
        return decode_tcp_from_ip(frame);
    }
    if (link_type != linktype_ethernet || frame.size() < 14) {
        return std::nullopt;
    }
    std::size_t offset = 12;
    std::uint16_t ethertype = read_u16be(frame, offset);
    offset += 2;
    // up to two VLAN tags
    for (int i = 0; i < 2 && ethertype == 0x8100; i++) {
        if (frame.size() < offset + 4) {
            return std::nullopt;
        }
        ethertype = read_u16be(frame, offset + 2);
        offset += 4;
    }
    if (ethertype != 0x0800 && ethertype != 0x86dd) {
        return std::nullopt;
    }
    return decode_tcp_from_ip(frame.subspan(offset));
}

std::vector<network_record> extract_client_hellos(std::istream &in, extract_stats &stats) {
    pcap_reader reader{in};
    std::vector<network_record> records;
    std::set<five_tuple> seen_flows;

    pcap_packet packet;
    while (reader.next(packet)) {
        stats.packets++;
        auto segment = decode_tcp(packet.data, reader.link_type());
        if (!segment || segment->payload.empty()) {
            continue;
        }
        stats.tcp_payloads++;
        // only the first data-bearing packet per flow direction
        if (!seen_flows.insert(segment->flow).second) {
            continue;
        }
        if (!identify_client_hello(segment->payload)) {
            continue;
        }
        try {
            client_hello_summary summary = parse_client_hello(segment->payload);
            network_record rec;
            rec.flow = segment->flow;
            rec.start_time = packet.timestamp;
            rec.fingerprint = encode_fingerprint(summary);
            rec.destination.dst_ip = segment->flow.dst_ip;
            rec.destination.dst_port = segment->flow.dst_port;
            rec.destination.server_name = summary.server_name;
            records.push_back(std::move(rec));
            stats.client_hellos++;
        } catch (const truncated_error &) {
            stats.parse_errors++;
        } catch (const malformed_error &) {
            stats.parse_errors++;
        }
    }
    return records;
}

} // namespace tlsfp
