// records.cpp
//
// Copyright (c) 2026 the tlsfp authors.  License: Apache-2.0; see LICENSE.

#include "tlsfp/records.hpp"

#include <istream>
#include <map>

#include <json.hpp>

namespace tlsfp {

using nlohmann::json;

namespace {

json flow_to_json(const five_tuple &t) {
    return json{{"src_ip", t.src_ip},
                {"dst_ip", t.dst_ip},
                {"src_port", t.src_port},
                {"dst_port", t.dst_port},
                {"transport_protocol", t.transport_protocol}};
}

five_tuple flow_from_json(const json &j) {
    five_tuple t;
    t.src_ip = j.at("src_ip").get<std::string>();
    t.dst_ip = j.at("dst_ip").get<std::string>();
    t.src_port = j.at("src_port").get<std::uint16_t>();
    t.dst_port = j.at("dst_port").get<std::uint16_t>();
    t.transport_protocol = j.at("transport_protocol").get<std::string>();
    return t;
}

json destination_to_json(const destination_context &d) {
    json j{{"dst_ip", d.dst_ip}, {"dst_port", d.dst_port}};
    if (d.server_name) {
        j["server_name"] = *d.server_name;
    }
    return j;
}

destination_context destination_from_json(const json &j) {
    destination_context d;
    d.dst_ip = j.at("dst_ip").get<std::string>();
    d.dst_port = j.at("dst_port").get<std::uint16_t>();
    if (j.contains("server_name") && !j.at("server_name").is_null()) {
        d.server_name = j.at("server_name").get<std::string>();
    }
    return d;
}

// Applies fn to each non-empty input line, converting json errors into
// record_parse_error with the offending line number.
template <typename Fn>
void for_each_json_line(std::istream &in, Fn fn) {
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        line_number++;
        if (line.empty()) {
            continue;
        }
        try {
            fn(json::parse(line));
        } catch (const json::exception &e) {
            throw record_parse_error{e.what(), line_number};
        }
    }
}

} // namespace

std::string to_json_line(const host_record &r) {
    json j{{"five_tuple", flow_to_json(r.flow)},
           {"start_time", r.start_time},
           {"process_name", r.process_name},
           {"process_sha256", r.process_sha256},
           {"os", r.os}};
    return j.dump();
}

std::string to_json_line(const network_record &r) {
    json j{{"five_tuple", flow_to_json(r.flow)},
           {"start_time", r.start_time},
           {"fingerprint", r.fingerprint},
           {"destination", destination_to_json(r.destination)}};
    return j.dump();
}

std::string to_json_line(const fused_record &r) {
    json j{{"fingerprint", r.fingerprint},
           {"destination", destination_to_json(r.destination)},
           {"process_name", r.process_name},
           {"process_sha256", r.process_sha256},
           {"os", r.os},
           {"start_time", r.start_time},
           {"malware", r.malware}};
    return j.dump();
}

std::vector<host_record> read_host_records(std::istream &in) {
    std::vector<host_record> out;
    for_each_json_line(in, [&](const json &j) {
        host_record r;
        r.flow = flow_from_json(j.at("five_tuple"));
        r.start_time = j.at("start_time").get<double>();
        r.process_name = j.at("process_name").get<std::string>();
        r.process_sha256 = j.at("process_sha256").get<std::string>();
        r.os = j.at("os").get<std::string>();
        out.push_back(std::move(r));
    });
    return out;
}

std::vector<network_record> read_network_records(std::istream &in) {
    std::vector<network_record> out;
    for_each_json_line(in, [&](const json &j) {
        network_record r;
        r.flow = flow_from_json(j.at("five_tuple"));
        r.start_time = j.at("start_time").get<double>();
        r.fingerprint = j.at("fingerprint").get<std::string>();
        r.destination = destination_from_json(j.at("destination"));
        out.push_back(std::move(r));
    });
    return out;
}

std::vector<fused_record> read_fused_records(std::istream &in) {
    std::vector<fused_record> out;
    for_each_json_line(in, [&](const json &j) {
        fused_record r;
        r.fingerprint = j.at("fingerprint").get<std::string>();
        r.destination = destination_from_json(j.at("destination"));
        r.process_name = j.at("process_name").get<std::string>();
        r.process_sha256 = j.at("process_sha256").get<std::string>();
        r.os = j.at("os").get<std::string>();
        r.start_time = j.at("start_time").get<double>();
        r.malware = j.value("malware", false);
        out.push_back(std::move(r));
    });
    return out;
}

std::map<std::string, int> read_verdicts_csv(std::istream &in) {
    std::map<std::string, int> verdicts;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        line_number++;
        if (line.empty() || line[0] == '#') {
            continue;
        }
        auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw record_parse_error{"expected sha256,engine_count", line_number};
        }
        try {
            verdicts[line.substr(0, comma)] = std::stoi(line.substr(comma + 1));
        } catch (const std::exception &) {
            throw record_parse_error{"bad engine count", line_number};
        }
    }
    return verdicts;
}

} // namespace tlsfp
