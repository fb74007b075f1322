// tls_parser.cpp
//
// Copyright (c) 2026 the tlsfp authors.  License: Apache-2.0; see LICENSE.

#include "tlsfp/tls_parser.hpp"

namespace tlsfp {

namespace {

constexpr std::uint8_t record_type_handshake = 0x16;
constexpr std::uint8_t handshake_type_client_hello = 0x01;
constexpr std::uint16_t ext_type_server_name = 0x0000;
constexpr std::size_t client_random_len = 32;

bool printable_ascii(std::span<const std::uint8_t> bytes) {
    for (std::uint8_t b : bytes) {
        if (b < 0x21 || b > 0x7e) {
            return false;
        }
    }
    return true;
}

// server_name extension body: a server_name_list of (type, length, bytes)
// entries.  Returns the first host_name (type 0) entry, or nothing if the
// list is inconsistent or the name is not clean ASCII.  A bad SNI body does
// not fail the whole parse; the name is simply absent.
std::optional<std::string> decode_server_name(std::span<const std::uint8_t> data) {
    if (data.size() < 2) {
        return std::nullopt;
    }
    std::size_t list_len = static_cast<std::size_t>(data[0]) << 8 | data[1];
    if (list_len != data.size() - 2) {
        return std::nullopt;
    }
    std::size_t pos = 2;
    while (pos < data.size()) {
        if (pos + 3 > data.size()) {
            return std::nullopt;
        }
        std::uint8_t entry_type = data[pos];
        std::size_t entry_len = static_cast<std::size_t>(data[pos + 1]) << 8 | data[pos + 2];
        pos += 3;
        if (pos + entry_len > data.size()) {
            return std::nullopt;
        }
        if (entry_type == 0) {
            auto name = data.subspan(pos, entry_len);
            if (entry_len == 0 || !printable_ascii(name)) {
                return std::nullopt;
            }
            return std::string{reinterpret_cast<const char *>(name.data()), name.size()};
        }
        pos += entry_len;
    }
    return std::nullopt;
}

} // namespace

bool identify_client_hello(std::span<const std::uint8_t> payload) {
    if (payload.size() < 8) {
        return false;
    }
    if (payload[0] != record_type_handshake) {
        return false;
    }
    if (payload[1] != 0x03 || payload[2] > 0x03) {
        return false;
    }
    if (payload[5] != handshake_type_client_hello) {
        return false;
    }
    std::size_t record_len = static_cast<std::size_t>(payload[3]) << 8 | payload[4];
    if (record_len < 4) {
        return false;
    }
    // Handshake length is 3 bytes; only the first two are within reach.  For
    // a hello filling the record they must equal the record length minus the
    // 4-byte handshake header.
    std::size_t hello_len = record_len - 4;
    return payload[6] == 0x00 && payload[7] == static_cast<std::uint8_t>(hello_len >> 8);
}

client_hello_summary parse_client_hello(std::span<const std::uint8_t> payload) {
    byte_cursor cur{payload};

    if (cur.u8("record type") != record_type_handshake) {
        throw malformed_error{"record type is not handshake"};
    }
    cur.u16("record version");
    std::uint16_t record_len = cur.u16("record length");
    byte_cursor record = cur.sub(record_len, "record body");

    if (record.u8("handshake type") != handshake_type_client_hello) {
        throw malformed_error{"handshake type is not client_hello"};
    }
    std::uint32_t hello_len = record.u24("handshake length");
    if (hello_len > record.remaining()) {
        // hello continues in the next record; out of scope for a
        // single-record parser
        throw truncated_error{"client_hello spans multiple records"};
    }
    byte_cursor hello = record.sub(hello_len, "client_hello body");

    client_hello_summary summary;
    summary.legacy_version = hello.u16("legacy version");
    hello.skip(client_random_len, "client random");
    std::uint8_t session_id_len = hello.u8("session id length");
    hello.skip(session_id_len, "session id");

    std::uint16_t cipher_len = hello.u16("cipher suites length");
    if (cipher_len % 2 != 0) {
        throw malformed_error{"cipher suites length is odd"};
    }
    byte_cursor ciphers = hello.sub(cipher_len, "cipher suites");
    summary.cipher_suites.reserve(cipher_len / 2);
    while (ciphers.remaining() > 0) {
        summary.cipher_suites.push_back(ciphers.u16("cipher suite"));
    }

    std::uint8_t compression_len = hello.u8("compression methods length");
    hello.skip(compression_len, "compression methods");

    if (hello.remaining() > 0) {
        std::uint16_t ext_block_len = hello.u16("extensions length");
        byte_cursor exts = hello.sub(ext_block_len, "extensions block");
        if (hello.remaining() != 0) {
            throw malformed_error{"bytes after extensions block inside client_hello"};
        }
        while (exts.remaining() > 0) {
            tls_extension ext;
            ext.type = exts.u16("extension type");
            std::uint16_t ext_len = exts.u16("extension length");
            auto data = exts.take(ext_len, "extension data");
            ext.data.assign(data.begin(), data.end());
            if (ext.type == ext_type_server_name && !summary.server_name) {
                summary.server_name = decode_server_name(data);
            }
            summary.extensions.push_back(std::move(ext));
        }
    }

    return summary;
}

} // namespace tlsfp
