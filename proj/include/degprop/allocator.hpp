#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "degprop/degressivity.hpp"
#include "degprop/domain.hpp"
#include "degprop/ratio.hpp"

namespace degprop {

/// Per-state lower bounds fed into the divisor method, aligned with
/// registry order. Usually the repaired "DP" seat counts.
struct MinimumRestrictions {
    std::vector<std::int64_t> min_seats;
};

inline MinimumRestrictions restrictions_from(const RepairResult& repair) {
    MinimumRestrictions r;
    r.min_seats.reserve(repair.states.size());
    for (const StateRepair& s : repair.states) r.min_seats.push_back(s.seats_dp);
    return r;
}

enum class ClampState { proportional, clamped_to_min, capped };

struct StateSeats {
    std::int64_t seats = 0;
    ClampState clamp = ClampState::proportional;
};

/// Half-open divisor interval [lo, hi). Divisors are strictly positive, so
/// lo == 0 means the interval is open at zero; hi == nullopt means it is
/// unbounded above (every sufficiently large divisor yields the same
/// allocation).
struct DivisorInterval {
    Ratio lo;
    std::optional<Ratio> hi;

    bool contains(const Ratio& d) const {
        if (d.numerator() <= 0) return false;
        if (d < lo) return false;
        return !hi || d < *hi;
    }

    std::string to_string() const {
        std::string out = lo.is_zero() ? "(0" : "[" + lo.decimal_string();
        out += ", ";
        out += hi ? hi->decimal_string() : std::string("inf");
        out += ")";
        return out;
    }
};

class InfeasibleHouseError : public std::runtime_error {
  public:
    InfeasibleHouseError(std::int64_t requested_size, std::int64_t min_size, std::int64_t max_size)
        : std::runtime_error("house size " + std::to_string(requested_size) +
                             " is infeasible: achievable totals range from " + std::to_string(min_size) +
                             " to " + std::to_string(max_size)),
          requested(requested_size),
          min_feasible(min_size),
          max_feasible(max_size) {}

    std::int64_t requested;
    std::int64_t min_feasible;
    std::int64_t max_feasible;
};

class DivisorTieError : public std::runtime_error {
  public:
    DivisorTieError(std::int64_t requested_size, std::vector<std::string> codes, Ratio at,
                    std::int64_t above, std::int64_t below)
        : std::runtime_error(make_message(requested_size, codes, at, above, below)),
          requested(requested_size),
          state_codes(std::move(codes)),
          critical(at),
          total_at_critical(above),
          total_below_critical(below) {}

    std::int64_t requested;
    std::vector<std::string> state_codes;  // states stepping simultaneously
    Ratio critical;
    std::int64_t total_at_critical;     // total for divisors >= critical
    std::int64_t total_below_critical;  // total just below critical

  private:
    static std::string make_message(std::int64_t requested, const std::vector<std::string>& codes,
                                    const Ratio& at, std::int64_t above, std::int64_t below) {
        std::string msg = "house size " + std::to_string(requested) + " is skipped: states";
        for (const std::string& c : codes) msg += " '" + c + "'";
        msg += " step together at divisor " + at.to_string() + " (total jumps from " +
               std::to_string(above) + " to " + std::to_string(below) + ")";
        return msg;
    }
};

namespace detail {

inline void require_aligned(const Registry& reg, const MinimumRestrictions& mins) {
    if (mins.min_seats.size() != reg.states.size())
        throw InvariantError("minimum restrictions must cover every registry state");
    for (std::size_t i = 0; i < mins.min_seats.size(); ++i) {
        if (mins.min_seats[i] < 1 || mins.min_seats[i] > reg.cap_seats)
            throw InvariantError("state '" + reg.states[i].code +
                                 "': minimum restriction outside [1, cap_seats]");
    }
}

}  // namespace detail

/// One seat per `divisor` citizens or part thereof, on top of the base
/// seats, clamped into [min_seats, cap_seats]. Boundary semantics: at
/// d = population/k exactly, ceil(population/d) = k — an exact division
/// leaves no part, so each constancy interval of the seat function is
/// closed at its lower critical divisor and open at the upper one.
inline std::vector<StateSeats> seats_at_divisor(const Registry& reg, const MinimumRestrictions& mins,
                                                const Ratio& divisor) {
    if (divisor.numerator() <= 0) throw std::domain_error("divisor must be positive");
    detail::require_aligned(reg, mins);
    std::vector<StateSeats> out;
    out.reserve(reg.states.size());
    for (std::size_t i = 0; i < reg.states.size(); ++i) {
        const MemberState& s = reg.states[i];
        // Quotients above the cap are all equivalent; bound them before the
        // int64 narrowing instead of computing huge exact ceilings.
        Ratio step_to_cap(s.population, reg.cap_seats - reg.base_seats + 1);
        std::int64_t q = (reg.base_seats + 1 <= reg.cap_seats && divisor < step_to_cap)
                             ? reg.cap_seats - reg.base_seats + 1
                             : ceil_div(s.population, divisor);
        std::int64_t unclamped = reg.base_seats + q;
        StateSeats ss;
        if (unclamped > reg.cap_seats) {
            ss.seats = reg.cap_seats;
            ss.clamp = ClampState::capped;
        } else if (unclamped < mins.min_seats[i]) {
            ss.seats = mins.min_seats[i];
            ss.clamp = ClampState::clamped_to_min;
        } else {
            ss.seats = unclamped;
            ss.clamp = ClampState::proportional;
        }
        out.push_back(ss);
    }
    return out;
}

/// Non-increasing in the divisor.
inline std::int64_t total_at_divisor(const Registry& reg, const MinimumRestrictions& mins,
                                     const Ratio& divisor) {
    std::int64_t total = 0;
    for (const StateSeats& s : seats_at_divisor(reg, mins, divisor)) total += s.seats;
    return total;
}

/// Every divisor population/k at which some state's outcome changes within
/// its feasible range, deduplicated, sorted descending. k runs from the
/// first step above the minimum restriction up to the step into the cap;
/// a state pinned at min == cap contributes nothing. total_at_divisor is
/// constant between consecutive values and changes only at (some of) them.
inline std::vector<Ratio> critical_divisors(const Registry& reg, const MinimumRestrictions& mins) {
    detail::require_aligned(reg, mins);
    std::vector<Ratio> crit;
    for (std::size_t i = 0; i < reg.states.size(); ++i) {
        const MemberState& s = reg.states[i];
        if (mins.min_seats[i] == reg.cap_seats) continue;
        std::int64_t k_lo = std::max<std::int64_t>(1, mins.min_seats[i] - reg.base_seats);
        std::int64_t k_hi = reg.cap_seats - reg.base_seats;
        for (std::int64_t k = k_lo; k <= k_hi; ++k) crit.emplace_back(s.population, k);
    }
    std::sort(crit.begin(), crit.end(), std::greater<>());
    crit.erase(std::unique(crit.begin(), crit.end()), crit.end());
    return crit;
}

/// Maximal half-open interval of divisors dealing out exactly `house_size`
/// seats, found by binary search over the critical divisors with exact
/// rational comparisons throughout.
inline DivisorInterval find_divisor_interval(const Registry& reg, const MinimumRestrictions& mins,
                                             std::int64_t house_size) {
    detail::require_aligned(reg, mins);
    std::int64_t min_total = 0;
    std::int64_t max_total = 0;
    for (std::int64_t m : mins.min_seats) {
        // Any finite divisor yields at least one proportional seat.
        min_total += std::max(m, reg.base_seats + 1);
        max_total += reg.cap_seats;
    }
    if (house_size < min_total || house_size > max_total)
        throw InfeasibleHouseError(house_size, min_total, max_total);

    std::vector<Ratio> crit = critical_divisors(reg, mins);
    std::sort(crit.begin(), crit.end());  // ascending for region indexing
    const std::size_t m = crit.size();
    if (m == 0) return DivisorInterval{Ratio(0), std::nullopt};  // every state pinned

    // Region j holds divisors in [crit[j-1], crit[j]); region 0 is (0, crit[0])
    // and region m is [crit[m-1], inf). Totals are non-increasing in j.
    auto probe = [&crit](std::size_t j) {
        return j == 0 ? crit[0] / Ratio(2) : crit[j - 1];
    };
    std::vector<std::int64_t> memo(m + 1, -1);
    auto total_in = [&](std::size_t j) {
        if (memo[j] < 0) memo[j] = total_at_divisor(reg, mins, probe(j));
        return memo[j];
    };

    // First region whose total has dropped to (or below) the target.
    std::size_t lo = 0, hi = m;
    while (lo < hi) {
        std::size_t mid = lo + (hi - lo) / 2;
        if (total_in(mid) <= house_size)
            hi = mid;
        else
            lo = mid + 1;
    }
    std::size_t first = lo;
    if (total_in(first) != house_size) {
        // Simultaneous steps at crit[first-1] jump past the target. first >= 1
        // because region 0 carries the maximal total and that was checked above.
        const Ratio& at = crit[first - 1];
        std::vector<StateSeats> above = seats_at_divisor(reg, mins, at);
        std::vector<StateSeats> below = seats_at_divisor(reg, mins, probe(first - 1));
        std::vector<std::string> steppers;
        for (std::size_t i = 0; i < reg.states.size(); ++i)
            if (above[i].seats != below[i].seats) steppers.push_back(reg.states[i].code);
        throw DivisorTieError(house_size, std::move(steppers), at, total_in(first),
                              total_in(first - 1));
    }

    // Last region still matching the target.
    lo = first;
    hi = m;
    while (lo < hi) {
        std::size_t mid = lo + (hi - lo + 1) / 2;
        if (total_in(mid) == house_size)
            lo = mid;
        else
            hi = mid - 1;
    }
    std::size_t last = lo;

    DivisorInterval interval;
    interval.lo = first == 0 ? Ratio(0) : crit[first - 1];
    if (last < m) interval.hi = crit[last];
    return interval;
}

/// Deterministic "allocation key": the roundest value in the interval.
/// Largest power of ten with a multiple inside, then the multiple closest
/// to the midpoint, then the smaller on an exact tie. Intervals unbounded
/// above take the smallest power of ten at or above the lower end.
inline Ratio pick_representative_divisor(const DivisorInterval& interval) {
    auto pow10 = [](int e) {
        std::int64_t p = 1;
        for (int i = 0; i < (e < 0 ? -e : e); ++i) p *= 10;
        return e < 0 ? Ratio(1, p) : Ratio(p);
    };

    if (!interval.hi) {
        if (interval.lo.is_zero()) return Ratio(1);
        for (int e = -12; e <= 18; ++e) {
            Ratio g = pow10(e);
            if (g >= interval.lo) return g;
        }
        throw std::overflow_error("divisor interval lower end out of supported range");
    }

    const Ratio& lo = interval.lo;
    const Ratio& hi = *interval.hi;
    if (!(lo < hi)) throw std::domain_error("empty divisor interval");
    Ratio mid = (lo + hi) / Ratio(2);

    for (int e = 14; e >= -12; --e) {
        Ratio g = pow10(e);
        std::int64_t k_lo = std::max<std::int64_t>(1, (lo / g).ceil_int());
        Ratio q_hi = hi / g;
        std::int64_t k_hi = q_hi.is_integer() ? q_hi.numerator() - 1 : q_hi.floor_int();
        if (k_lo > k_hi) continue;
        std::int64_t k = std::clamp((mid / g).floor_int(), k_lo, k_hi);
        std::int64_t k_up = std::min(k + 1, k_hi);
        Ratio d_down = Ratio(k) * g;
        Ratio d_up = Ratio(k_up) * g;
        // closest to the midpoint; exact tie -> the smaller multiple
        return ((mid - d_down).abs() <= (d_up - mid).abs()) ? d_down : d_up;
    }
    throw std::overflow_error("no power-of-ten multiple found in divisor interval");
}

/// Final per-state seats plus the divisor evidence.
struct Allocation {
    std::vector<StateSeats> states;  // registry order
    std::int64_t house_size = 0;
    DivisorInterval interval;
    Ratio divisor;  // representative divisor within `interval`
};

inline Allocation allocate(const Registry& reg, const MinimumRestrictions& mins,
                           std::int64_t house_size) {
    Allocation a;
    a.house_size = house_size;
    a.interval = find_divisor_interval(reg, mins, house_size);
    a.divisor = pick_representative_divisor(a.interval);
    a.states = seats_at_divisor(reg, mins, a.divisor);
    return a;
}

}  // namespace degprop
