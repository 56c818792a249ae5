#pragma once

// Ground-truth implementations the fast path is checked against. The
// iterative fixed point recomputes the whole exact layout every round and
// promotes anything out of range, which is quadratic in the worst case but
// obviously correct. The brute-force oracle enumerates every assignment.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "jasm/encoder.hpp"
#include "jasm/ir.hpp"

namespace jasm {

class TooManyJumps : public std::runtime_error {
public:
    TooManyJumps(size_t jumps, size_t max_jumps)
        : std::runtime_error("brute force limited to " + std::to_string(max_jumps) +
                             " jumps, program has " + std::to_string(jumps)),
          jumps(jumps),
          max_jumps(max_jumps) {}

    size_t jumps;
    size_t max_jumps;
};

struct OracleReport {
    SizeAssignment assignment;
    uint64_t iterations = 0;         // promoting rounds (fixed point)
    uint64_t assignments_tried = 0;  // enumerated assignments (brute force)
    int64_t total_size = 0;
    bool least_witness = false;  // long-set is contained in every feasible one
};

namespace detail {

// Exact per-jump displacement under the given sizes, program order.
inline std::vector<int64_t> exact_displacements(const SourceProgram& program,
                                                const FinalLayout& layout) {
    std::vector<int64_t> disp;
    disp.reserve(layout.jump_offsets.size());
    size_t ordinal = 0;
    for (const Item& item : program.items) {
        if (const Jump* j = std::get_if<Jump>(&item)) {
            const int64_t end = layout.jump_offsets[ordinal] + layout.jump_sizes[ordinal];
            disp.push_back(layout.labels.at(j->target) - end);
            ++ordinal;
        }
    }
    return disp;
}

}  // namespace detail

// True iff every jump's exact displacement under this assignment fits the
// form the assignment gives it.
inline bool feasible(const SourceProgram& program, const SizeAssignment& assignment) {
    const FinalLayout layout = final_layout(program, assignment);
    const std::vector<int64_t> disp = detail::exact_displacements(program, layout);
    for (size_t k = 0; k < disp.size(); ++k) {
        if (assignment.is_long[k] ? !long_fits(disp[k], program.mode) : !short_fits(disp[k]))
            return false;
    }
    return true;
}

// Start all short; promote every out-of-range short jump; relayout; repeat
// until a full pass promotes nothing. Promotions are never undone, so this
// reaches the least fixed point.
inline OracleReport iterative_fixpoint(const SourceProgram& program) {
    if (!validate(program).empty())
        throw std::invalid_argument("iterative_fixpoint: program does not validate");

    const size_t n = program.jump_count();
    OracleReport report;
    report.assignment.is_long.assign(n, false);

    uint64_t passes = 0;
    FinalLayout layout;
    while (true) {
        ++passes;
        layout = final_layout(program, report.assignment);
        const std::vector<int64_t> disp = detail::exact_displacements(program, layout);
        size_t promoted = 0;
        for (size_t k = 0; k < n; ++k) {
            if (!report.assignment.is_long[k] && !short_fits(disp[k])) {
                report.assignment.is_long[k] = true;
                ++promoted;
            }
        }
        if (promoted == 0) {
            for (size_t k = 0; k < n; ++k) {
                if (report.assignment.is_long[k] && !long_fits(disp[k], program.mode))
                    throw EncodeError(EncodeError::Kind::LongRangeExceeded, k, disp[k]);
            }
            break;
        }
    }
    report.iterations = passes > 1 ? passes - 1 : 1;
    report.total_size = layout.total_size;
    return report;
}

// Enumerates all 2^n assignments, keeps the smallest feasible one (ties go to
// the lexicographically least long-set), and records whether that long-set is
// contained in every feasible assignment's long-set.
inline OracleReport brute_force_minimal(const SourceProgram& program, size_t max_jumps = 12) {
    if (!validate(program).empty())
        throw std::invalid_argument("brute_force_minimal: program does not validate");
    const size_t n = program.jump_count();
    if (n > max_jumps)
        throw TooManyJumps(n, max_jumps);

    OracleReport report;
    report.assignments_tried = uint64_t{1} << n;

    bool found = false;
    uint64_t best_mask = 0;
    int64_t best_size = 0;
    uint64_t feasible_and = ~uint64_t{0};

    SizeAssignment candidate;
    candidate.is_long.assign(n, false);
    for (uint64_t mask = 0; mask < (uint64_t{1} << n); ++mask) {
        for (size_t k = 0; k < n; ++k)
            candidate.is_long[k] = (mask >> k) & 1;
        const FinalLayout layout = final_layout(program, candidate);
        const std::vector<int64_t> disp = detail::exact_displacements(program, layout);
        bool ok = true;
        for (size_t k = 0; ok && k < n; ++k)
            ok = candidate.is_long[k] ? long_fits(disp[k], program.mode) : short_fits(disp[k]);
        if (!ok)
            continue;
        feasible_and &= mask;
        // Lexicographic tie-break on is_long[0..]: mask bit k is jump k, so
        // the least long-set is the numerically smallest bit-reversed mask;
        // compare directly on the vectors to keep it readable.
        bool better = !found || layout.total_size < best_size;
        if (!better && layout.total_size == best_size) {
            for (size_t k = 0; k < n; ++k) {
                const bool b = (best_mask >> k) & 1;
                const bool c = (mask >> k) & 1;
                if (b != c) {
                    better = b && !c;
                    break;
                }
            }
        }
        if (better) {
            found = true;
            best_mask = mask;
            best_size = layout.total_size;
        }
    }

    if (!found) {
        // Even all-long did not fit: surface the first failing long jump.
        SizeAssignment all_long;
        all_long.is_long.assign(n, true);
        const FinalLayout layout = final_layout(program, all_long);
        const std::vector<int64_t> disp = detail::exact_displacements(program, layout);
        for (size_t k = 0; k < n; ++k)
            if (!long_fits(disp[k], program.mode))
                throw EncodeError(EncodeError::Kind::LongRangeExceeded, k, disp[k]);
        throw std::logic_error("brute_force_minimal: no feasible assignment");
    }

    report.assignment.is_long.assign(n, false);
    for (size_t k = 0; k < n; ++k)
        report.assignment.is_long[k] = (best_mask >> k) & 1;
    const FinalLayout layout = final_layout(program, report.assignment);
    report.total_size = layout.total_size;
    report.least_witness = (best_mask & ~feasible_and) == 0;
    return report;
}

}  // namespace jasm
