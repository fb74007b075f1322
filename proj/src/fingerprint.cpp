// fingerprint.cpp
//
// Copyright (c) 2026 the tlsfp authors.  License: Apache-2.0; see LICENSE.

#include "tlsfp/fingerprint.hpp"

#include <algorithm>
#include <array>

#include "tlsfp/bytes.hpp"

namespace tlsfp {

namespace {

constexpr std::uint16_t ext_supported_groups = 0x000a;
constexpr std::uint16_t ext_supported_versions = 0x002b;

// Extension types whose data is kept in the fingerprint.  Everything else
// contributes its type code only; session-specific data such as server_name
// and key_share never enters the fingerprint.
constexpr std::array<std::uint16_t, 21> data_extensions = {
    0x0001, // max_fragment_length
    0x0005, // status_request
    0x0007, // client_authz
    0x0008, // server_authz
    0x0009, // cert_type
    0x000a, // supported_groups
    0x000b, // ec_point_formats
    0x000d, // signature_algorithms
    0x000f, // heartbeat
    0x0010, // application_layer_protocol_negotiation
    0x0011, // status_request_v2
    0x0013, // client_certificate_type
    0x0014, // server_certificate_type
    0x0018, // token_binding
    0x001b, // compress_certificate
    0x001c, // record_size_limit
    0x002b, // supported_versions
    0x002d, // psk_key_exchange_modes
    0x0032, // signature_algorithms_cert
    0x5500, // channel_id
    0x0a0a, // GREASE
};

// GREASE normalization of the two-byte code list inside supported_groups
// (2-byte list length prefix) and supported_versions (1-byte prefix).  Data
// that does not match the list layout is copied verbatim.
void append_code_list_hex(std::string &out, std::span<const std::uint8_t> data,
                          std::size_t length_prefix) {
    bool well_formed = data.size() >= length_prefix;
    if (well_formed) {
        std::size_t declared = 0;
        for (std::size_t i = 0; i < length_prefix; i++) {
            declared = declared << 8 | data[i];
        }
        well_formed = declared == data.size() - length_prefix && declared % 2 == 0;
    }
    if (!well_formed) {
        out += to_hex(data);
        return;
    }
    out += to_hex(data.first(length_prefix));
    for (std::size_t i = length_prefix; i + 1 < data.size(); i += 2) {
        std::uint16_t code = static_cast<std::uint16_t>(data[i] << 8 | data[i + 1]);
        out += hex4(normalize_grease(code));
    }
}

} // namespace

std::string normalize_grease(std::string_view code) {
    long v = parse_hex4(code);
    if (v < 0) {
        throw std::invalid_argument{"normalize_grease: expected 4 lowercase hex chars"};
    }
    return hex4(normalize_grease(static_cast<std::uint16_t>(v)));
}

bool extension_keeps_data(std::uint16_t type) {
    return std::find(data_extensions.begin(), data_extensions.end(), type) !=
           data_extensions.end();
}

std::string encode_fingerprint(const client_hello_summary &summary) {
    std::string out;
    out.push_back('(');
    out += hex4(summary.legacy_version);
    out += ")(";
    for (std::uint16_t cipher : summary.cipher_suites) {
        out += hex4(normalize_grease(cipher));
    }
    out += ")(";
    if (summary.extensions.empty()) {
        out += "()";
    }
    for (const tls_extension &ext : summary.extensions) {
        out.push_back('(');
        if (is_grease(ext.type)) {
            // normalized type code only; GREASE data is random filler
            out += "0a0a";
        } else {
            out += hex4(ext.type);
            if (extension_keeps_data(ext.type)) {
                if (ext.type == ext_supported_groups) {
                    append_code_list_hex(out, ext.data, 2);
                } else if (ext.type == ext_supported_versions) {
                    append_code_list_hex(out, ext.data, 1);
                } else {
                    out += to_hex(ext.data);
                }
            }
        }
        out.push_back(')');
    }
    out.push_back(')');
    return out;
}

std::vector<std::string_view> fingerprint_tokens::sequence() const {
    std::vector<std::string_view> seq;
    seq.reserve(1 + ciphers.size() + extensions.size());
    seq.emplace_back(version);
    for (const auto &c : ciphers) {
        seq.emplace_back(c);
    }
    for (const auto &e : extensions) {
        seq.emplace_back(e);
    }
    return seq;
}

namespace {

// Reads "(" hex* ")" starting at pos; returns the hex content.
std::string_view read_group(std::string_view fp, std::size_t &pos, const char *what) {
    if (pos >= fp.size() || fp[pos] != '(') {
        throw malformed_fingerprint{std::string{what} + ": expected '('"};
    }
    std::size_t start = ++pos;
    while (pos < fp.size() && is_hex_char(fp[pos])) {
        pos++;
    }
    if (pos >= fp.size() || fp[pos] != ')') {
        throw malformed_fingerprint{std::string{what} + ": expected hex then ')'"};
    }
    std::string_view content = fp.substr(start, pos - start);
    pos++;
    return content;
}

} // namespace

fingerprint_tokens tokenize_fingerprint(std::string_view fp) {
    fingerprint_tokens tokens;
    std::size_t pos = 0;

    std::string_view version = read_group(fp, pos, "version");
    if (version.size() != 4) {
        throw malformed_fingerprint{"version is not 4 hex chars"};
    }
    tokens.version = std::string{version};

    std::string_view ciphers = read_group(fp, pos, "cipher suites");
    if (ciphers.size() % 4 != 0) {
        throw malformed_fingerprint{"cipher field length is not a multiple of 4"};
    }
    for (std::size_t i = 0; i < ciphers.size(); i += 4) {
        tokens.ciphers.emplace_back(ciphers.substr(i, 4));
    }

    if (pos >= fp.size() || fp[pos] != '(') {
        throw malformed_fingerprint{"extensions: expected '('"};
    }
    pos++;
    bool saw_empty_marker = false;
    while (pos < fp.size() && fp[pos] == '(') {
        std::string_view element = read_group(fp, pos, "extension element");
        if (element.empty()) {
            // "(())" is the canonical empty extension list
            if (!tokens.extensions.empty() || pos >= fp.size() || fp[pos] != ')') {
                throw malformed_fingerprint{"empty extension element"};
            }
            saw_empty_marker = true;
            break;
        }
        if (element.size() < 4 || element.size() % 2 != 0) {
            throw malformed_fingerprint{"extension element lacks a 4-hex type code"};
        }
        tokens.extensions.emplace_back(element);
    }
    if (tokens.extensions.empty() && !saw_empty_marker) {
        throw malformed_fingerprint{"extensions: expected at least one element or '()'"};
    }
    if (pos >= fp.size() || fp[pos] != ')') {
        throw malformed_fingerprint{"extensions: expected ')'"};
    }
    pos++;
    if (pos != fp.size()) {
        throw malformed_fingerprint{"trailing characters after fingerprint"};
    }
    return tokens;
}

std::string detokenize(const fingerprint_tokens &tokens) {
    std::string out;
    out.push_back('(');
    out += tokens.version;
    out += ")(";
    for (const auto &c : tokens.ciphers) {
        out += c;
    }
    out += ")(";
    if (tokens.extensions.empty()) {
        out += "()";
    }
    for (const auto &e : tokens.extensions) {
        out.push_back('(');
        out += e;
        out.push_back(')');
    }
    out.push_back(')');
    return out;
}

} // namespace tlsfp
