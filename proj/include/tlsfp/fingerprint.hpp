// fingerprint.hpp
//
// the (version)(ciphers)((ext)...) fingerprint schema: GREASE normalization,
// encoding, and tokenization
//
// Copyright (c) 2026 the tlsfp authors.  License: Apache-2.0; see LICENSE.

#ifndef TLSFP_FINGERPRINT_HPP
#define TLSFP_FINGERPRINT_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tlsfp/tls_parser.hpp"

namespace tlsfp {

struct malformed_fingerprint : std::runtime_error {
    explicit malformed_fingerprint(const std::string &what) : std::runtime_error(what) {}
};

// The 16 reserved GREASE code points: 0x0a0a, 0x1a1a, ..., 0xfafa.
constexpr bool is_grease(std::uint16_t code) {
    return (code & 0x0f0f) == 0x0a0a && (code >> 8) == (code & 0xff);
}

constexpr std::uint16_t normalize_grease(std::uint16_t code) {
    return is_grease(code) ? 0x0a0a : code;
}

// String form: code must be 4 lowercase hex chars.
std::string normalize_grease(std::string_view code);

// True for the extension types whose data is client-specific and kept in
// the fingerprint (supported_groups, supported_versions, alpn, ...).
bool extension_keeps_data(std::uint16_t type);

// Encodes a summary into the normalized fingerprint text.  Deterministic;
// wire order preserved; GREASE code points rewritten to 0a0a in cipher
// suites, extension types, and the code lists inside supported_groups and
// supported_versions data.
std::string encode_fingerprint(const client_hello_summary &summary);

// One token per edit unit: the version, each cipher suite code, and each
// extension element (type code plus retained data, as a single token).
struct fingerprint_tokens {
    std::string version;
    std::vector<std::string> ciphers;
    std::vector<std::string> extensions;

    bool operator==(const fingerprint_tokens &) const = default;

    // [version, ciphers..., extensions...] for distance computation
    std::vector<std::string_view> sequence() const;
};

// Splits a fingerprint along its grammar.  Throws malformed_fingerprint on
// anything that does not match it.
fingerprint_tokens tokenize_fingerprint(std::string_view fp);

// Inverse of tokenize_fingerprint: reproduces the text exactly.
std::string detokenize(const fingerprint_tokens &tokens);

} // namespace tlsfp

#endif // TLSFP_FINGERPRINT_HPP
