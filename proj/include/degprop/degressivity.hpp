#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "degprop/domain.hpp"

namespace degprop {

enum class BreachMark {
    none,
    primary_breach,    // rendered '*': ratio exceeds that of a more populous predecessor
    collateral_breach  // rendered '†': repaired only because earlier repairs lowered the bar
};

struct StateRepair {
    std::int64_t ratio_before = 0;  // representation ratio of the status-quo seats
    std::int64_t ratio_after = 0;   // representation ratio of the repaired seats
    std::int64_t add_on = 0;
    std::int64_t seats_dp = 0;      // seats_status_quo + add_on
    BreachMark mark = BreachMark::none;
};

/// Stage A+B output, aligned with registry order.
struct RepairResult {
    std::vector<StateRepair> states;
    std::int64_t total_add_on = 0;
    std::int64_t total_seats_dp = 0;
};

class RepairInfeasibleError : public std::runtime_error {
  public:
    RepairInfeasibleError(std::string code, std::int64_t needed_seats, std::int64_t cap_seats)
        : std::runtime_error("cannot repair degressivity for state '" + code + "': " +
                             std::to_string(needed_seats) + " seats needed but cap is " +
                             std::to_string(cap_seats)),
          state_code(std::move(code)),
          needed(needed_seats),
          cap(cap_seats) {}

    std::string state_code;
    std::int64_t needed;
    std::int64_t cap;
};

namespace detail {

/// Smallest s >= 1 with representation_ratio(population, s) <= bound.
/// round(p/s) <= m iff 2p < s*(2m+1), so the threshold is closed-form.
inline std::int64_t smallest_seats_within(std::int64_t population, std::int64_t bound) {
    return (2 * population) / (2 * bound + 1) + 1;
}

}  // namespace detail

/// Codes of the states whose status-quo representation ratio strictly
/// exceeds the minimum ratio over all more populous predecessors. Equality
/// is not a breach. Registry order.
inline std::vector<std::string> scan_breaches(const Registry& reg) {
    std::vector<std::string> out;
    std::optional<std::int64_t> running_min;
    for (const MemberState& s : reg.states) {
        std::int64_t ratio = representation_ratio(s.population, s.seats_status_quo);
        if (running_min && ratio > *running_min) out.push_back(s.code);
        running_min = running_min ? std::min(*running_min, ratio) : ratio;
    }
    return out;
}

/// Single pass in decreasing-population order. Each state receives the
/// minimal number of add-on seats that brings its ratio down to the running
/// minimum of the already repaired column; seats are never removed. States
/// flagged by scan_breaches carry primary_breach; states that only need
/// seats because earlier repairs lowered the running minimum carry
/// collateral_breach.
inline RepairResult repair(const Registry& reg) {
    const std::vector<std::string> primary = scan_breaches(reg);
    auto is_primary = [&primary](const std::string& code) {
        for (const std::string& c : primary)
            if (c == code) return true;
        return false;
    };

    RepairResult result;
    result.states.reserve(reg.states.size());
    std::optional<std::int64_t> running_min;
    for (const MemberState& s : reg.states) {
        StateRepair r;
        r.ratio_before = representation_ratio(s.population, s.seats_status_quo);
        r.seats_dp = s.seats_status_quo;
        if (running_min && r.ratio_before > *running_min) {
            r.seats_dp = std::max(s.seats_status_quo,
                                  detail::smallest_seats_within(s.population, *running_min));
            if (r.seats_dp > reg.cap_seats)
                throw RepairInfeasibleError(s.code, r.seats_dp, reg.cap_seats);
        }
        r.add_on = r.seats_dp - s.seats_status_quo;
        r.ratio_after = representation_ratio(s.population, r.seats_dp);
        if (r.add_on > 0)
            r.mark = is_primary(s.code) ? BreachMark::primary_breach : BreachMark::collateral_breach;
        result.total_add_on += r.add_on;
        result.total_seats_dp += r.seats_dp;
        running_min = running_min ? std::min(*running_min, r.ratio_after) : r.ratio_after;
        result.states.push_back(r);
    }
    return result;
}

}  // namespace degprop
