// bytes.hpp
//
// bounded cursor over untrusted bytes, plus hex helpers
//
// Copyright (c) 2026 the tlsfp authors.  License: Apache-2.0; see LICENSE.

#ifndef TLSFP_BYTES_HPP
#define TLSFP_BYTES_HPP

#include <cstdint>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tlsfp {

// A declared length runs past the end of the captured payload.
struct truncated_error : std::runtime_error {
    explicit truncated_error(const std::string &what) : std::runtime_error(what) {}
};

// Length fields are inconsistent with each other, though the bytes exist.
struct malformed_error : std::runtime_error {
    explicit malformed_error(const std::string &what) : std::runtime_error(what) {}
};

// Cursor over a byte buffer that never reads past its bounds.  Each cursor
// carries two limits: the end of the enclosing structure (limit) and the end
// of the captured payload (hard_end).  A read past hard_end means the input
// was cut short (truncated_error); a read past limit while bytes still exist
// means the length fields disagree (malformed_error).
class byte_cursor {
public:
    explicit byte_cursor(std::span<const std::uint8_t> buf)
        : pos_{buf.data()}, limit_{buf.data() + buf.size()}, hard_end_{limit_} {}

    std::size_t remaining() const { return static_cast<std::size_t>(limit_ - pos_); }

    std::uint8_t u8(const char *what) {
        require(1, what);
        return *pos_++;
    }

    std::uint16_t u16(const char *what) {
        require(2, what);
        std::uint16_t v = static_cast<std::uint16_t>(pos_[0] << 8 | pos_[1]);
        pos_ += 2;
        return v;
    }

    std::uint32_t u24(const char *what) {
        require(3, what);
        std::uint32_t v = static_cast<std::uint32_t>(pos_[0]) << 16 |
                          static_cast<std::uint32_t>(pos_[1]) << 8 |
                          static_cast<std::uint32_t>(pos_[2]);
        pos_ += 3;
        return v;
    }

    std::span<const std::uint8_t> take(std::size_t n, const char *what) {
        require(n, what);
        std::span<const std::uint8_t> s{pos_, n};
        pos_ += n;
        return s;
    }

    void skip(std::size_t n, const char *what) {
        require(n, what);
        pos_ += n;
    }

    // Child cursor over the next n bytes; the parent advances past them.
    byte_cursor sub(std::size_t n, const char *what) {
        require(n, what);
        byte_cursor child{pos_, pos_ + n, hard_end_};
        pos_ += n;
        return child;
    }

private:
    byte_cursor(const std::uint8_t *pos, const std::uint8_t *limit, const std::uint8_t *hard_end)
        : pos_{pos}, limit_{limit}, hard_end_{hard_end} {}

    void require(std::size_t n, const char *what) {
        if (n > static_cast<std::size_t>(hard_end_ - pos_)) {
            throw truncated_error{std::string{what} + ": needs more bytes than captured"};
        }
        if (n > static_cast<std::size_t>(limit_ - pos_)) {
            throw malformed_error{std::string{what} + ": overruns enclosing length field"};
        }
    }

    const std::uint8_t *pos_;
    const std::uint8_t *limit_;
    const std::uint8_t *hard_end_;
};

// lowercase hex

inline char hex_digit(unsigned v) { return "0123456789abcdef"[v & 0xf]; }

inline void append_hex(std::string &out, std::uint8_t byte) {
    out.push_back(hex_digit(byte >> 4));
    out.push_back(hex_digit(byte));
}

inline std::string to_hex(std::span<const std::uint8_t> bytes) {
    std::string out;
    out.reserve(bytes.size() * 2);
    for (std::uint8_t b : bytes) {
        append_hex(out, b);
    }
    return out;
}

inline std::string hex4(std::uint16_t code) {
    std::string out;
    append_hex(out, static_cast<std::uint8_t>(code >> 8));
    append_hex(out, static_cast<std::uint8_t>(code & 0xff));
    return out;
}

inline bool is_hex_char(char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
}

inline int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    return -1;
}

// Parses exactly 4 lowercase hex chars; returns -1 on anything else.
inline long parse_hex4(std::string_view s) {
    if (s.size() != 4) return -1;
    long v = 0;
    for (char c : s) {
        int d = hex_value(c);
        if (d < 0) return -1;
        v = v << 4 | d;
    }
    return v;
}

inline std::vector<std::uint8_t> from_hex(std::string_view s) {
    std::vector<std::uint8_t> out;
    out.reserve(s.size() / 2);
    for (std::size_t i = 0; i + 1 < s.size(); i += 2) {
        out.push_back(static_cast<std::uint8_t>(hex_value(s[i]) << 4 | hex_value(s[i + 1])));
    }
    return out;
}

} // namespace tlsfp

#endif // TLSFP_BYTES_HPP
