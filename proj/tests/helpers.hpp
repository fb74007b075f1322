// helpers.hpp — shared test utilities: hello building, pcap writing,
// random generators, and independent oracles

#ifndef TLSFP_TESTS_HELPERS_HPP
#define TLSFP_TESTS_HELPERS_HPP

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tlsfp/classifier.hpp"
#include "tlsfp/knowledge_base.hpp"
#include "tlsfp/records.hpp"
#include "tlsfp/tls_parser.hpp"

namespace testutil {

// --- client_hello construction ---------------------------------------

// Assembles record + handshake framing around a hello body built from the
// summary.  Extensions are emitted exactly as given; server_name in the
// summary is NOT materialized into bytes (callers add an SNI extension via
// sni_extension when they want one).
std::vector<std::uint8_t> build_client_hello(const tlsfp::client_hello_summary &summary,
                                             std::uint16_t record_version = 0x0301,
                                             std::uint8_t session_id_len = 32);

std::vector<std::uint8_t> sni_body(std::string_view host);
tlsfp::tls_extension sni_extension(std::string_view host);
tlsfp::tls_extension supported_versions_extension(std::span<const std::uint16_t> codes);
tlsfp::tls_extension supported_groups_extension(std::span<const std::uint16_t> codes);

// Random summary whose parse(build(s)) round-trips; SNI handled
// consistently.
tlsfp::client_hello_summary random_summary(std::mt19937_64 &rng);

// --- pcap construction ------------------------------------------------

struct synthetic_packet {
    double timestamp = 0;
    tlsfp::five_tuple flow;
    std::vector<std::uint8_t> payload;
    bool udp = false;
};

// classic pcap bytes, Ethernet link type, IPv4/TCP (or UDP) framing
std::vector<std::uint8_t> build_pcap(std::span<const synthetic_packet> packets);

// --- oracles ----------------------------------------------------------

// Plain recursive edit distance straight from the definition; exponential,
// use only on short sequences.
std::size_t levenshtein_recursive(std::span<const std::string> a,
                                  std::span<const std::string> b);

// Same recursion with memoization; usable up to moderate lengths.
std::size_t levenshtein_recursive_memo(std::span<const std::string> a,
                                       std::span<const std::string> b);

// Direct scoring of one candidate from the stored counts: log prior plus
// weighted log likelihoods with the 1/total fallback.  Written against the
// formula, not the classifier internals.
double naive_bayes_score(const tlsfp::fingerprint_entry &entry,
                         const tlsfp::process_entry &pe, const tlsfp::feature_weights &weights,
                         const tlsfp::destination_context &dest,
                         const tlsfp::equivalence_tables &tables);

// Information gain ratio from an explicit (process x value) contingency
// table, computed by summing plain -p*log(p) terms.
double igr_from_table(const std::vector<std::vector<std::uint64_t>> &counts);

// Greedy minimal-delta matcher, written as a repeated global scan over all
// remaining same-flow pairs; independent of the production grouping/sorting.
std::vector<std::pair<std::size_t, std::size_t>> brute_force_join(
    std::span<const tlsfp::host_record> hosts, std::span<const tlsfp::network_record> nets,
    double max_delta);

// --- misc ---------------------------------------------------------------

// Reversibility check: returns the fingerprint hex segments that do NOT
// occur verbatim in the packet.  The version and each cipher code must
// appear whole; each extension's type code and data bytes are separate
// wire components and are checked separately, skipping normalized GREASE
// spots.  Empty result = reversible.
std::vector<std::string> missing_hex_segments(const std::string &fingerprint,
                                              const std::string &packet_hex);

std::vector<std::string> random_token_sequence(std::mt19937_64 &rng, std::size_t max_len,
                                               int alphabet);

// random fused records over small process/destination pools
std::vector<tlsfp::fused_record> random_fused_records(std::mt19937_64 &rng, std::size_t count,
                                                      int fingerprints = 5, int processes = 6,
                                                      int values = 8);

} // namespace testutil

#endif // TLSFP_TESTS_HELPERS_HPP
