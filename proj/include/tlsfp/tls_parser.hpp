// tls_parser.hpp
//
// TLS client_hello identification and decoding
//
// Copyright (c) 2026 the tlsfp authors.  License: Apache-2.0; see LICENSE.

#ifndef TLSFP_TLS_PARSER_HPP
#define TLSFP_TLS_PARSER_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tlsfp/bytes.hpp"

namespace tlsfp {

struct tls_extension {
    std::uint16_t type = 0;
    std::vector<std::uint8_t> data;

    bool operator==(const tls_extension &) const = default;
};

// Everything the fingerprint schema needs from a client_hello, in wire order.
struct client_hello_summary {
    std::uint16_t legacy_version = 0;
    std::vector<std::uint16_t> cipher_suites;   // wire order, never sorted
    std::vector<tls_extension> extensions;      // wire order, never sorted
    std::optional<std::string> server_name;     // host_name of extension 0000

    bool operator==(const client_hello_summary &) const = default;
};

struct destination_context {
    std::string dst_ip;
    std::uint16_t dst_port = 0;
    std::optional<std::string> server_name;

    bool operator==(const destination_context &) const = default;
};

// True iff the first 8 bytes look like a TLS handshake record carrying a
// client_hello: record type 0x16, record version 0x0300..0x0303, handshake
// type 0x01, and handshake length bytes consistent with a hello that fills
// the record.  Never reads past the first 8 bytes; returns false for inputs
// shorter than 8.
bool identify_client_hello(std::span<const std::uint8_t> payload);

// Decodes a single-record client_hello.  Throws truncated_error when a
// declared length needs bytes beyond the captured payload (or the hello
// spans records), malformed_error when length fields contradict each other.
// Every length field is checked before use; no input can cause a read out
// of bounds.
client_hello_summary parse_client_hello(std::span<const std::uint8_t> payload);

} // namespace tlsfp

#endif // TLSFP_TLS_PARSER_HPP
