// pcap.hpp
//
// classic pcap reading and client_hello record extraction
//
// Copyright (c) 2026 the tlsfp authors.  License: Apache-2.0; see LICENSE.

#ifndef TLSFP_PCAP_HPP
#define TLSFP_PCAP_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tlsfp/records.hpp"

namespace tlsfp {

struct pcap_error : std::runtime_error {
    explicit pcap_error(const std::string &what) : std::runtime_error(what) {}
};

struct pcap_packet {
    double timestamp = 0;
    std::vector<std::uint8_t> data;
};

// Classic pcap only (both byte orders, microsecond and nanosecond stamps).
// Link types: Ethernet (1) and raw IP (101).
class pcap_reader {
public:
    explicit pcap_reader(std::istream &in);  // throws pcap_error on a bad header

    std::uint32_t link_type() const { return link_type_; }

    // False at end of stream; throws pcap_error on a cut-off packet header.
    bool next(pcap_packet &packet);

private:
    std::istream &in_;
    bool swap_ = false;
    bool nanos_ = false;
    std::uint32_t link_type_ = 0;
};

struct tcp_segment {
    five_tuple flow;
    std::span<const std::uint8_t> payload;
};

// Decodes Ethernet(+VLAN)/IPv4/IPv6 framing down to a TCP payload; anything
// else (non-TCP, fragments, malformed framing) yields nothing.
std::optional<tcp_segment> decode_tcp(std::span<const std::uint8_t> frame,
                                      std::uint32_t link_type);

struct extract_stats {
    std::uint64_t packets = 0;
    std::uint64_t tcp_payloads = 0;
    std::uint64_t client_hellos = 0;
    std::uint64_t parse_errors = 0;
};

// One network record per detected client_hello, taking the first
// data-bearing packet per flow direction.  Per-packet parse problems are
// counted, never fatal.
std::vector<network_record> extract_client_hellos(std::istream &in, extract_stats &stats);

} // namespace tlsfp

#endif // TLSFP_PCAP_HPP
