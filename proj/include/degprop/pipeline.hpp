#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "degprop/allocator.hpp"
#include "degprop/degressivity.hpp"
#include "degprop/domain.hpp"
#include "degprop/ratio.hpp"

namespace degprop {

struct VerificationCheck {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct VerificationReport {
    std::vector<VerificationCheck> checks;
    bool pass = false;  // true iff every individual check passes
};

/// Diagnostic only: the seat index before upward rounding and the ratio of
/// the population to that index as displayed (one decimal). Only states
/// whose seats actually came from the rounding step carry a value.
struct BeforeRounding {
    bool applicable = false;
    Ratio index;                    // base_seats + population/divisor, exact
    std::int64_t index_tenths = 0;  // one-decimal rendering of index, in tenths
    std::int64_t ratio = 0;         // population / (index_tenths/10), rounded
};

struct PipelineResult {
    Registry registry;
    RepairResult repair;
    Allocation allocation;
    std::vector<std::int64_t> ratio_final;  // representation ratios of the final seats
    std::vector<std::int64_t> diff;         // final seats minus status quo
    VerificationReport verification;
};

inline VerificationReport verify(const Registry& reg, const Allocation& alloc) {
    VerificationReport report;
    auto add = [&report](const std::string& name, bool pass, const std::string& detail) {
        report.checks.push_back({name, pass, detail});
    };

    std::string bad;
    for (std::size_t i = 0; i < reg.states.size(); ++i) {
        if (alloc.states[i].seats < reg.states[i].seats_status_quo) {
            bad = "state '" + reg.states[i].code + "': " + std::to_string(alloc.states[i].seats) +
                  " < status quo " + std::to_string(reg.states[i].seats_status_quo);
            break;
        }
    }
    add("no_loss", bad.empty(), bad.empty() ? "no state falls below its status-quo seats" : bad);

    bad.clear();
    for (std::size_t i = 0; i < reg.states.size(); ++i) {
        if (alloc.states[i].seats < reg.floor_seats) {
            bad = "state '" + reg.states[i].code + "': " + std::to_string(alloc.states[i].seats) +
                  " < floor " + std::to_string(reg.floor_seats);
            break;
        }
    }
    add("floor", bad.empty(),
        bad.empty() ? "every state has at least " + std::to_string(reg.floor_seats) + " seats" : bad);

    bad.clear();
    for (std::size_t i = 0; i < reg.states.size(); ++i) {
        if (alloc.states[i].seats > reg.cap_seats) {
            bad = "state '" + reg.states[i].code + "': " + std::to_string(alloc.states[i].seats) +
                  " > cap " + std::to_string(reg.cap_seats);
            break;
        }
    }
    add("cap", bad.empty(),
        bad.empty() ? "no state exceeds " + std::to_string(reg.cap_seats) + " seats" : bad);

    bad.clear();
    std::optional<std::int64_t> prev;
    for (std::size_t i = 0; i < reg.states.size(); ++i) {
        std::int64_t r = representation_ratio(reg.states[i].population, alloc.states[i].seats);
        if (prev && r > *prev) {
            bad = "state '" + reg.states[i].code + "': ratio " + std::to_string(r) +
                  " exceeds predecessor's " + std::to_string(*prev);
            break;
        }
        prev = r;
    }
    add("degressivity_after_rounding", bad.empty(),
        bad.empty() ? "rounded representation ratios are non-increasing" : bad);

    std::int64_t total = 0;
    for (const StateSeats& s : alloc.states) total += s.seats;
    add("total", total == alloc.house_size,
        std::to_string(total) + " seats dealt out for house size " +
            std::to_string(alloc.house_size));

    report.pass = true;
    for (const VerificationCheck& c : report.checks) report.pass = report.pass && c.pass;
    return report;
}

namespace detail {

inline PipelineResult assemble(const Registry& reg, const RepairResult& rep, Allocation alloc) {
    PipelineResult result;
    result.registry = reg;
    result.repair = rep;
    result.allocation = std::move(alloc);
    result.ratio_final.reserve(reg.states.size());
    result.diff.reserve(reg.states.size());
    for (std::size_t i = 0; i < reg.states.size(); ++i) {
        result.ratio_final.push_back(
            representation_ratio(reg.states[i].population, result.allocation.states[i].seats));
        result.diff.push_back(result.allocation.states[i].seats - reg.states[i].seats_status_quo);
    }
    result.verification = verify(reg, result.allocation);
    return result;
}

}  // namespace detail

/// Stages A+B (repair), then Stage C (divisor search and allocation), then
/// the legal checks. A failed verification is returned, not thrown;
/// infeasible house sizes and divisor ties propagate as exceptions.
inline PipelineResult run_pipeline(const Registry& reg, std::int64_t house_size) {
    RepairResult rep = repair(reg);
    MinimumRestrictions mins = restrictions_from(rep);
    return detail::assemble(reg, rep, allocate(reg, mins, house_size));
}

/// Seat indices before upward rounding, for the states whose seat count
/// came out of the rounding step. Clamped and capped states involve no
/// rounding and are marked not applicable. Never gates verification.
inline std::vector<BeforeRounding> quotients_before_rounding(const Registry& reg,
                                                             const Allocation& alloc) {
    std::vector<BeforeRounding> out(reg.states.size());
    for (std::size_t i = 0; i < reg.states.size(); ++i) {
        if (alloc.states[i].clamp != ClampState::proportional) continue;
        BeforeRounding& b = out[i];
        b.applicable = true;
        b.index = Ratio(reg.base_seats) + Ratio(reg.states[i].population) / alloc.divisor;
        b.index_tenths = b.index.tenths_half_away();
        // Ratio against the index as displayed (tenths), not the exact index:
        // that is the comparison the one-decimal report invites.
        b.ratio = (Ratio(reg.states[i].population) * Ratio(10) / Ratio(b.index_tenths))
                      .round_half_away();
    }
    return out;
}

struct SweepEntry {
    std::int64_t house_size = 0;
    std::optional<PipelineResult> result;
    std::string error;  // set iff result is empty
};

/// One pipeline run per house size; the repair is computed once and
/// reused. Per-entry failures are recorded and the sweep continues.
inline std::vector<SweepEntry> sweep(const Registry& reg, std::int64_t house_from,
                                     std::int64_t house_to) {
    if (house_from > house_to) throw InvariantError("sweep: house_from must not exceed house_to");
    RepairResult rep = repair(reg);
    MinimumRestrictions mins = restrictions_from(rep);
    std::vector<SweepEntry> entries;
    entries.reserve(static_cast<std::size_t>(house_to - house_from + 1));
    for (std::int64_t h = house_from; h <= house_to; ++h) {
        SweepEntry e;
        e.house_size = h;
        try {
            e.result = detail::assemble(reg, rep, allocate(reg, mins, h));
        } catch (const std::exception& ex) {
            e.error = ex.what();
        }
        entries.push_back(std::move(e));
    }
    return entries;
}

enum class ReportStyle { table1, table2, json, csv };

namespace detail {

/// Locale-free thousands grouping with spaces, table styles only.
inline std::string grouped(std::int64_t v) {
    std::string digits = std::to_string(v < 0 ? -v : v);
    std::string out;
    int count = 0;
    for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
        if (count != 0 && count % 3 == 0) out.insert(out.begin(), ' ');
        out.insert(out.begin(), *it);
        ++count;
    }
    if (v < 0) out.insert(out.begin(), '-');
    return out;
}

inline std::string one_decimal(std::int64_t tenths) {
    std::string sign = tenths < 0 ? "-" : "";
    std::int64_t t = tenths < 0 ? -tenths : tenths;
    return sign + std::to_string(t / 10) + "." + std::to_string(t % 10);
}

inline std::string mark_suffix(BreachMark m) {
    switch (m) {
        case BreachMark::primary_breach: return "*";
        case BreachMark::collateral_breach: return "†";  // dagger
        default: return "";
    }
}

inline std::string mark_name(BreachMark m) {
    switch (m) {
        case BreachMark::primary_breach: return "primary_breach";
        case BreachMark::collateral_breach: return "collateral_breach";
        default: return "none";
    }
}

inline std::string clamp_name(ClampState c) {
    switch (c) {
        case ClampState::capped: return "capped";
        case ClampState::clamped_to_min: return "clamped_to_min";
        default: return "proportional";
    }
}

/// Fixed-width table writer. Column widths come from the content, so the
/// output is byte-deterministic for a given input. Cell widths are counted
/// in code points to keep the dagger aligned.
class TableWriter {
  public:
    explicit TableWriter(std::vector<bool> right_align) : right_(std::move(right_align)) {}

    void row(std::vector<std::string> cells) {
        widths_.resize(std::max(widths_.size(), cells.size()), 0);
        for (std::size_t i = 0; i < cells.size(); ++i)
            widths_[i] = std::max(widths_[i], display_width(cells[i]));
        rows_.push_back(std::move(cells));
    }

    std::string str() const {
        std::string out;
        for (const auto& cells : rows_) {
            std::string line;
            for (std::size_t i = 0; i < cells.size(); ++i) {
                std::size_t pad = widths_[i] - display_width(cells[i]);
                if (i > 0) line += "  ";
                if (right_.size() > i && right_[i]) line += std::string(pad, ' ');
                line += cells[i];
                if (!(right_.size() > i && right_[i]) && i + 1 < cells.size())
                    line += std::string(pad, ' ');
            }
            while (!line.empty() && line.back() == ' ') line.pop_back();
            out += line;
            out += '\n';
        }
        return out;
    }

  private:
    static std::size_t display_width(const std::string& s) {
        std::size_t w = 0;
        for (unsigned char c : s)
            if ((c & 0xC0) != 0x80) ++w;  // count UTF-8 lead bytes
        return w;
    }

    std::vector<bool> right_;
    std::vector<std::size_t> widths_;
    std::vector<std::vector<std::string>> rows_;
};

inline nlohmann::ordered_json ratio_json(const Ratio& r) {
    return {{"numerator", r.numerator()},
            {"denominator", r.denominator()},
            {"decimal", r.decimal_string()}};
}

}  // namespace detail

/// Stage A+B table: status-quo seats, breach marks, add-ons and the
/// repaired seat counts with their representation ratios.
inline std::string render_table1(const Registry& reg, const RepairResult& rep) {
    detail::TableWriter t({false, true, true, true, true, true, true});
    t.row({"State", "Population", "Seats", "Ratio", "Add-on", "SeatsDP", "RatioDP"});
    std::int64_t pop_total = 0;
    std::int64_t seats_total = 0;
    for (std::size_t i = 0; i < reg.states.size(); ++i) {
        const MemberState& s = reg.states[i];
        const StateRepair& r = rep.states[i];
        pop_total += s.population;
        seats_total += s.seats_status_quo;
        t.row({s.name, detail::grouped(s.population), std::to_string(s.seats_status_quo),
               detail::grouped(r.ratio_before) + detail::mark_suffix(r.mark),
               std::to_string(r.add_on), std::to_string(r.seats_dp),
               detail::grouped(r.ratio_after)});
    }
    t.row({"Total", detail::grouped(pop_total), std::to_string(seats_total), "",
           std::to_string(rep.total_add_on), std::to_string(rep.total_seats_dp), ""});
    return t.str();
}

inline std::string render_table2(const PipelineResult& res) {
    const Registry& reg = res.registry;
    detail::TableWriter t({false, true, false, true, true, true, true});
    t.row({"State", "Population", "Range", "Quotient", "Seats", "Ratio", "Diff"});
    std::int64_t pop_total = 0;
    std::int64_t seats_total = 0;
    std::int64_t diff_total = 0;
    for (std::size_t i = 0; i < reg.states.size(); ++i) {
        const MemberState& s = reg.states[i];
        pop_total += s.population;
        seats_total += res.allocation.states[i].seats;
        diff_total += res.diff[i];
        std::int64_t min_seats = res.repair.states[i].seats_dp;
        std::int64_t k_lo = std::max<std::int64_t>(1, min_seats - reg.base_seats);
        std::int64_t k_hi = reg.cap_seats - reg.base_seats;
        std::string range = std::to_string(reg.base_seats) + "+[" + std::to_string(k_lo) + ".." +
                            std::to_string(k_hi) + "]";
        Ratio quotient = Ratio(s.population) / res.allocation.divisor;
        t.row({s.name, detail::grouped(s.population), range,
               detail::one_decimal(quotient.tenths_half_away()),
               std::to_string(res.allocation.states[i].seats), detail::grouped(res.ratio_final[i]),
               std::to_string(res.diff[i])});
    }
    t.row({"Total", detail::grouped(pop_total), "", "", std::to_string(seats_total), "",
           std::to_string(diff_total)});
    std::string out = t.str();
    out += "\n";
    out += "Divisor: " + res.allocation.divisor.decimal_string() + "  (seats total " +
           std::to_string(res.allocation.house_size) + " on " +
           res.allocation.interval.to_string() + ")\n";
    out += "Verification: ";
    if (res.verification.pass) {
        out += "PASS\n";
    } else {
        out += "FAIL (";
        bool first = true;
        for (const VerificationCheck& c : res.verification.checks) {
            if (c.pass) continue;
            if (!first) out += ", ";
            out += c.name;
            first = false;
        }
        out += ")\n";
    }
    return out;
}

inline nlohmann::ordered_json report_json(const PipelineResult& res) {
    const Registry& reg = res.registry;
    std::vector<BeforeRounding> before = quotients_before_rounding(reg, res.allocation);

    nlohmann::ordered_json j;
    j["house_size"] = res.allocation.house_size;
    j["divisor"] = detail::ratio_json(res.allocation.divisor);
    nlohmann::ordered_json interval;
    interval["lo"] = detail::ratio_json(res.allocation.interval.lo);
    interval["hi"] = res.allocation.interval.hi
                         ? detail::ratio_json(*res.allocation.interval.hi)
                         : nlohmann::ordered_json(nullptr);
    j["divisor_interval"] = interval;

    nlohmann::ordered_json states = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < reg.states.size(); ++i) {
        const MemberState& s = reg.states[i];
        const StateRepair& r = res.repair.states[i];
        nlohmann::ordered_json st;
        st["code"] = s.code;
        st["name"] = s.name;
        st["population"] = s.population;
        st["seats_status_quo"] = s.seats_status_quo;
        st["ratio_status_quo"] = r.ratio_before;
        st["mark"] = detail::mark_name(r.mark);
        st["add_on"] = r.add_on;
        st["seats_dp"] = r.seats_dp;
        st["ratio_dp"] = r.ratio_after;
        st["min_seats"] = r.seats_dp;
        st["cap_seats"] = reg.cap_seats;
        Ratio quotient = Ratio(s.population) / res.allocation.divisor;
        st["quotient"] = detail::one_decimal(quotient.tenths_half_away());
        st["seats"] = res.allocation.states[i].seats;
        st["clamp"] = detail::clamp_name(res.allocation.states[i].clamp);
        st["ratio"] = res.ratio_final[i];
        st["diff"] = res.diff[i];
        if (before[i].applicable) {
            st["before_rounding"] = {{"index", detail::one_decimal(before[i].index_tenths)},
                                     {"index_exact", before[i].index.to_string()},
                                     {"ratio", before[i].ratio}};
        } else {
            st["before_rounding"] = nullptr;
        }
        states.push_back(std::move(st));
    }
    j["states"] = std::move(states);

    nlohmann::ordered_json checks = nlohmann::ordered_json::array();
    for (const VerificationCheck& c : res.verification.checks)
        checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    j["verification"] = {{"pass", res.verification.pass}, {"checks", std::move(checks)}};
    return j;
}

inline std::string render_csv(const PipelineResult& res) {
    const Registry& reg = res.registry;
    std::string out = "code,name,population,min_seats,cap_seats,quotient,seats,ratio,diff\n";
    for (std::size_t i = 0; i < reg.states.size(); ++i) {
        const MemberState& s = reg.states[i];
        Ratio quotient = Ratio(s.population) / res.allocation.divisor;
        out += s.code + "," + s.name + "," + std::to_string(s.population) + "," +
               std::to_string(res.repair.states[i].seats_dp) + "," +
               std::to_string(reg.cap_seats) + "," +
               detail::one_decimal(quotient.tenths_half_away()) + "," +
               std::to_string(res.allocation.states[i].seats) + "," +
               std::to_string(res.ratio_final[i]) + "," + std::to_string(res.diff[i]) + "\n";
    }
    return out;
}

/// Byte-deterministic report in the requested style.
inline std::string render_report(const PipelineResult& res, ReportStyle style) {
    switch (style) {
        case ReportStyle::table1: return render_table1(res.registry, res.repair);
        case ReportStyle::table2: return render_table2(res);
        case ReportStyle::json: return report_json(res).dump(2) + "\n";
        case ReportStyle::csv: return render_csv(res);
    }
    throw std::logic_error("unknown report style");
}

}  // namespace degprop
