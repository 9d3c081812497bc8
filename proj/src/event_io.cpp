#include "lobkin/event_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

namespace lobkin {

namespace {

std::int64_t parse_int(std::string_view field, std::int64_t line) {
    std::int64_t value = 0;
    const auto* first = field.data();
    const auto* last = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || field.empty()) {
        throw Error(Errc::malformed_row,
                    "line " + std::to_string(line) + ": not an integer: '" +
                        std::string(field) + "'", line);
    }
    return value;
}

}  // namespace

std::vector<OrderEvent> parse_event_log(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw Error(Errc::malformed_row, "line 1: empty input, header expected", 1);
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kEventLogHeader) {
        throw Error(Errc::malformed_row, "line 1: bad header '" + line + "'", 1);
    }

    std::vector<OrderEvent> events;
    std::int64_t line_no = 1;
    std::int64_t prev_ts = std::numeric_limits<std::int64_t>::min();
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        std::string_view rest(line);
        std::string_view field[5];
        for (int i = 0; i < 5; ++i) {
            const auto comma = rest.find(',');
            if (i < 4) {
                if (comma == std::string_view::npos) {
                    throw Error(Errc::malformed_row,
                                "line " + std::to_string(line_no) + ": expected 5 fields",
                                line_no);
                }
                field[i] = rest.substr(0, comma);
                rest.remove_prefix(comma + 1);
            } else {
                if (comma != std::string_view::npos) {
                    throw Error(Errc::malformed_row,
                                "line " + std::to_string(line_no) + ": expected 5 fields",
                                line_no);
                }
                field[i] = rest;
            }
        }

        OrderEvent ev;
        ev.ts_ms = parse_int(field[0], line_no);
        if (ev.ts_ms < prev_ts) {
            throw Error(Errc::non_monotonic_timestamp,
                        "line " + std::to_string(line_no) + ": timestamp decreases", line_no);
        }
        prev_ts = ev.ts_ms;

        if (field[1] == "B") ev.side = Side::minus_side;
        else if (field[1] == "S") ev.side = Side::plus_side;
        else {
            throw Error(Errc::malformed_row,
                        "line " + std::to_string(line_no) + ": side must be B or S", line_no);
        }

        ev.price = parse_int(field[2], line_no);

        if (field[3] == "A") ev.action = Action::add;
        else if (field[3] == "C") ev.action = Action::cancel;
        else if (field[3] == "X") ev.action = Action::execute;
        else {
            throw Error(Errc::unknown_action,
                        "line " + std::to_string(line_no) + ": action must be A, C or X",
                        line_no);
        }

        ev.volume = parse_int(field[4], line_no);
        if (ev.volume <= 0) {
            throw Error(Errc::malformed_row,
                        "line " + std::to_string(line_no) + ": volume must be positive",
                        line_no);
        }
        events.push_back(ev);
    }
    return events;
}

std::vector<OrderEvent> load_event_log(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(Errc::malformed_row, "cannot open event log: " + path);
    }
    return parse_event_log(in);
}

void write_event_log(std::ostream& out, const std::vector<OrderEvent>& events) {
    out << kEventLogHeader << '\n';
    for (const auto& ev : events) {
        out << ev.ts_ms << ',' << (ev.side == Side::minus_side ? 'B' : 'S') << ','
            << ev.price << ','
            << (ev.action == Action::add ? 'A' : ev.action == Action::cancel ? 'C' : 'X')
            << ',' << ev.volume << '\n';
    }
}

void save_event_log(const std::string& path, const std::vector<OrderEvent>& events) {
    std::ofstream out(path);
    if (!out) {
        throw Error(Errc::malformed_row, "cannot open output: " + path);
    }
    write_event_log(out, events);
}

namespace {

void put_kn(nlohmann::json& j, const std::string& key, const KnVal& kn) {
    if (kn.infinite) j[key] = "inf";
    else if (kn.value) j[key] = *kn.value;
    else j[key] = nullptr;
    j[key + "_infinite"] = kn.infinite;
}

void put_opt(nlohmann::json& j, const std::string& key, const std::optional<double>& v) {
    if (v) j[key] = *v;
    else j[key] = nullptr;
}

}  // namespace

void write_indicator_ndjson(std::ostream& out, const std::vector<IndicatorRecord>& records,
                            const std::string& symbol,
                            const std::string& config_fingerprint) {
    for (const auto& r : records) {
        nlohmann::json j;
        j["tick"] = r.tick;
        j["ts_ms"] = r.ts_ms;
        j["symbol"] = symbol;
        j["config"] = config_fingerprint;
        put_opt(j, "l_minus", r.L_minus);
        put_opt(j, "l_plus", r.L_plus);
        put_opt(j, "l_sym", r.L_sym);
        put_kn(j, "kn_minus", r.kn_minus);
        put_kn(j, "kn_plus", r.kn_plus);
        put_kn(j, "kn_sym", r.kn_sym);
        j["i_bar_minus"] = r.i_bar_minus;
        j["i_bar_plus"] = r.i_bar_plus;
        j["f_bar_minus"] = r.f_bar_minus;
        j["f_bar_plus"] = r.f_bar_plus;
        put_opt(j, "lambda_minus", r.lambda_minus);
        put_opt(j, "lambda_plus", r.lambda_plus);
        if (r.mid_half) j["mid_half_ticks"] = *r.mid_half;
        else j["mid_half_ticks"] = nullptr;
        j["one_sided_book"] = r.one_sided_book;
        j["minus_regime"] = r.minus_regime;
        j["plus_regime"] = r.plus_regime;
        out << j.dump() << '\n';
    }
}

std::string config_fingerprint(const MarketSpec& market, const KineticParams& params,
                               double theta_lambda) {
    std::ostringstream text;
    text << market.symbol << '|' << market.tick_size << '|' << market.unit_size << '|'
         << params.gamma_c_minus << '|' << params.gamma_c_plus << '|' << params.k << '|'
         << params.S << '|' << params.theta_kn << '|' << params.gamma_min << '|'
         << params.gamma_max << '|' << theta_lambda;
    const std::string s = text.str();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

}  // namespace lobkin
