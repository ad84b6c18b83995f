#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <istream>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "degprop/ratio.hpp"

namespace degprop {

/// Hard input bounds. They keep every downstream computation (cross
/// products of populations, divisor denominators, power-of-ten multiples)
/// inside 64/128-bit exact arithmetic.
inline constexpr std::int64_t kMaxPopulation = 10'000'000'000'000;  // 10^13
inline constexpr std::int64_t kMaxCapSeats = 10'000;

struct MemberState {
    std::string code;
    std::string name;
    std::int64_t population = 0;
    std::int64_t seats_status_quo = 0;
};

struct RegistryParams {
    std::int64_t base_seats = 5;
    std::int64_t floor_seats = 6;
    std::int64_t cap_seats = 96;
};

/// States sorted by strictly decreasing population; equal populations are
/// ordered by code ascending and the earlier state counts as the more
/// populous one in every degressivity comparison.
struct Registry {
    std::vector<MemberState> states;
    std::int64_t base_seats = 5;
    std::int64_t floor_seats = 6;
    std::int64_t cap_seats = 96;
};

class ParseError : public std::runtime_error {
  public:
    ParseError(int line, const std::string& message)
        : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}
    int line() const { return line_; }

  private:
    int line_;
};

class InvariantError : public std::runtime_error {
  public:
    explicit InvariantError(const std::string& message) : std::runtime_error(message) {}
};

/// Population per seat, rounded to the nearest whole number with exact
/// halves away from zero. Pure integer arithmetic: round(p/s) <= m iff
/// 2p < s*(2m+1), and the rounded value itself is floor((2p+s)/(2s)).
inline std::int64_t representation_ratio(std::int64_t population, std::int64_t seats) {
    if (population < 0 || seats < 1)
        throw std::domain_error("representation_ratio: population >= 0 and seats >= 1 required");
    return (2 * population + seats) / (2 * seats);
}

/// Sorts and validates; the canonical way to build a Registry from parts.
inline Registry make_registry(std::vector<MemberState> states, const RegistryParams& params = {}) {
    if (states.empty()) throw InvariantError("registry must contain at least one state");
    if (params.base_seats < 0) throw InvariantError("base_seats must be non-negative");
    if (params.floor_seats < 1) throw InvariantError("floor_seats must be positive");
    if (params.cap_seats < 1 || params.cap_seats > kMaxCapSeats)
        throw InvariantError("cap_seats must lie in [1, " + std::to_string(kMaxCapSeats) + "]");
    if (params.floor_seats > params.cap_seats)
        throw InvariantError("floor_seats must not exceed cap_seats");
    if (params.base_seats >= params.floor_seats)
        throw InvariantError("base_seats must be smaller than floor_seats");

    std::sort(states.begin(), states.end(), [](const MemberState& a, const MemberState& b) {
        if (a.population != b.population) return a.population > b.population;
        return a.code < b.code;
    });

    std::set<std::string> codes;
    for (const MemberState& s : states) {
        if (s.code.empty()) throw InvariantError("state code must be non-empty");
        if (!codes.insert(s.code).second) throw InvariantError("duplicate state code '" + s.code + "'");
        if (s.population < 1 || s.population > kMaxPopulation)
            throw InvariantError("state '" + s.code + "': population must lie in [1, " +
                                 std::to_string(kMaxPopulation) + "]");
        if (s.seats_status_quo < 1)
            throw InvariantError("state '" + s.code + "': seats_status_quo must be positive");
        if (s.seats_status_quo > params.cap_seats)
            throw InvariantError("state '" + s.code + "': seats_status_quo exceeds cap_seats");
    }

    Registry reg;
    reg.states = std::move(states);
    reg.base_seats = params.base_seats;
    reg.floor_seats = params.floor_seats;
    reg.cap_seats = params.cap_seats;
    return reg;
}

namespace detail {

inline std::int64_t parse_int_field(std::string_view field, int line, const std::string& what) {
    std::int64_t value = 0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last)
        throw ParseError(line, what + ": expected a base-10 integer, got '" + std::string(field) + "'");
    return value;
}

}  // namespace detail

/// Registry CSV format: UTF-8, header row `code,name,population,seats_status_quo`,
/// `#` comment lines, blank lines ignored. Populations and seats are plain
/// base-10 integers with no separators.
inline Registry parse_registry(std::istream& in, const RegistryParams& params = {}) {
    std::vector<MemberState> states;
    std::set<std::string> seen;
    std::string raw;
    int line_no = 0;
    bool header_seen = false;
    static constexpr std::string_view kHeader = "code,name,population,seats_status_quo";

    while (std::getline(in, raw)) {
        ++line_no;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        if (raw.empty() || raw[0] == '#') continue;
        if (!header_seen) {
            if (raw != kHeader)
                throw ParseError(line_no, "expected header '" + std::string(kHeader) + "'");
            header_seen = true;
            continue;
        }
        std::vector<std::string_view> fields;
        std::string_view rest = raw;
        while (true) {
            auto comma = rest.find(',');
            if (comma == std::string_view::npos) {
                fields.push_back(rest);
                break;
            }
            fields.push_back(rest.substr(0, comma));
            rest.remove_prefix(comma + 1);
        }
        if (fields.size() != 4)
            throw ParseError(line_no, "expected 4 comma-separated fields, got " +
                                          std::to_string(fields.size()));
        MemberState s;
        s.code = std::string(fields[0]);
        s.name = std::string(fields[1]);
        if (s.code.empty()) throw ParseError(line_no, "state code must be non-empty");
        if (!seen.insert(s.code).second) throw ParseError(line_no, "duplicate state code '" + s.code + "'");
        s.population = detail::parse_int_field(fields[2], line_no, "population of '" + s.code + "'");
        s.seats_status_quo =
            detail::parse_int_field(fields[3], line_no, "seats_status_quo of '" + s.code + "'");
        states.push_back(std::move(s));
    }
    if (!header_seen && states.empty())
        throw InvariantError("registry must contain at least one state");
    return make_registry(std::move(states), params);
}

/// Inverse of parse_registry on valid registries (canonical order, no comments).
inline std::string serialize_registry(const Registry& reg) {
    std::string out = "code,name,population,seats_status_quo\n";
    for (const MemberState& s : reg.states) {
        out += s.code;
        out += ',';
        out += s.name;
        out += ',';
        out += std::to_string(s.population);
        out += ',';
        out += std::to_string(s.seats_status_quo);
        out += '\n';
    }
    return out;
}

}  // namespace degprop
