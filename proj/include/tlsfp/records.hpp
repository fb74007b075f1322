// records.hpp
//
// host, network, and fused telemetry records with line-delimited JSON I/O
//
// Copyright (c) 2026 the tlsfp authors.  License: Apache-2.0; see LICENSE.

#ifndef TLSFP_RECORDS_HPP
#define TLSFP_RECORDS_HPP

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "tlsfp/tls_parser.hpp"

namespace tlsfp {

struct five_tuple {
    std::string src_ip;
    std::string dst_ip;
    std::uint16_t src_port = 0;
    std::uint16_t dst_port = 0;
    std::string transport_protocol = "tcp";

    auto operator<=>(const five_tuple &) const = default;
};

// One process event reported by a host agent.
struct host_record {
    five_tuple flow;
    double start_time = 0;          // seconds since epoch, fractional allowed
    std::string process_name;
    std::string process_sha256;     // 64 hex chars
    std::string os;
};

// One observed client_hello on the wire.
struct network_record {
    five_tuple flow;
    double start_time = 0;
    std::string fingerprint;
    destination_context destination;
};

// A network session attributed to the host process that started it.
struct fused_record {
    std::string fingerprint;
    destination_context destination;
    std::string process_name;
    std::string process_sha256;
    std::string os;
    double start_time = 0;
    bool malware = false;
};

struct record_parse_error : std::runtime_error {
    record_parse_error(const std::string &what, std::size_t line)
        : std::runtime_error(what + " at line " + std::to_string(line)), line_number{line} {}
    std::size_t line_number;
};

std::string to_json_line(const host_record &r);
std::string to_json_line(const network_record &r);
std::string to_json_line(const fused_record &r);

std::vector<host_record> read_host_records(std::istream &in);
std::vector<network_record> read_network_records(std::istream &in);
std::vector<fused_record> read_fused_records(std::istream &in);

// sha256 -> engine count, from a two-column "sha256,engine_count" CSV
std::map<std::string, int> read_verdicts_csv(std::istream &in);

} // namespace tlsfp

#endif // TLSFP_RECORDS_HPP
