#pragma once

// Queue-driven marking of long jumps. Starting from the all-short layout,
// every jump whose tracked displacement leaves [-128, 127] is marked long and
// enqueued; processing a marked jump bumps the tracked displacement of the
// unmarked jumps that span it, which live within 128 bytes of it. Each jump
// is enqueued at most once, and each dequeue scans a bounded byte window, so
// the whole pass is linear in the number of jumps.

#include <cstdint>
#include <cstdlib>
#include <deque>
#include <stdexcept>
#include <vector>

#include "jasm/ir.hpp"
#include "jasm/layout.hpp"
#include "jasm/rng.hpp"

namespace jasm {

enum class QueuePolicy : uint8_t {
    Fifo,
    Lifo,
    SeededShuffle,
};

struct RelaxStats {
    uint64_t dequeue_count = 0;
    uint64_t neighbor_check_count = 0;
    uint64_t max_neighbors_per_dequeue = 0;
};

struct RelaxationResult {
    SizeAssignment assignment;
    std::vector<int64_t> final_distances;  // current_distance at termination
    RelaxStats stats;
};

// True when J's growth changes K's displacement. Extra long-form bytes are
// modeled as inserted at p_J = J.all_short_start + 2, and a label exactly at
// an insertion point is bound to the content after it, so it shifts. All
// coordinates are all-short: the relative order of jumps and labels is the
// same in the initial and final layouts, which is what makes the original
// offsets usable throughout.
inline bool spans(const JumpRecord& k, const JumpRecord& j) {
    if (k.original_distance > 0)
        return k.all_short_start < j.all_short_start &&
               k.target_offset() >= j.all_short_start + kShortSize;
    if (k.original_distance < 0)
        return k.all_short_start > j.all_short_start &&
               k.target_offset() <= j.all_short_start;
    return false;  // zero-length span covers nothing
}

namespace detail {

// Worklist with selectable removal order. Everything enters through the back;
// the policy only decides which element leaves next.
class JumpQueue {
public:
    JumpQueue(QueuePolicy policy, uint64_t shuffle_seed)
        : policy_(policy), rng_(shuffle_seed) {}

    void push(size_t i) { q_.push_back(i); }
    bool empty() const { return q_.empty(); }

    size_t pop() {
        switch (policy_) {
        case QueuePolicy::Fifo: {
            size_t v = q_.front();
            q_.pop_front();
            return v;
        }
        case QueuePolicy::Lifo: {
            size_t v = q_.back();
            q_.pop_back();
            return v;
        }
        case QueuePolicy::SeededShuffle: {
            size_t at = static_cast<size_t>(rng_.below(q_.size()));
            std::swap(q_[at], q_.back());
            size_t v = q_.back();
            q_.pop_back();
            return v;
        }
        }
        std::abort();
    }

private:
    QueuePolicy policy_;
    SplitMix64 rng_;
    std::deque<size_t> q_;
};

}  // namespace detail

struct RelaxOptions {
    QueuePolicy policy = QueuePolicy::Fifo;
    uint64_t shuffle_seed = 1;
    // When set, every dequeue additionally scans the whole table and checks
    // that no unmarked spanning jump sits outside the 128-byte window.
    bool exhaustive_window_check = false;
};

inline RelaxationResult relax_with_order(JumpTable& table, const RelaxOptions& options) {
    const size_t n = table.records.size();
    RelaxationResult result;
    result.assignment.is_long.assign(n, false);
    result.final_distances.assign(n, 0);

    detail::JumpQueue queue(options.policy, options.shuffle_seed);

    // Seed: anything already out of rel8 range can never come back.
    for (size_t i = 0; i < n; ++i) {
        JumpRecord& rec = table.records[i];
        if (rec.current_distance >= 128 || rec.current_distance < -128) {
            rec.marked = true;
            queue.push(i);
        }
    }

    auto& recs = table.records;
    while (!queue.empty()) {
        const size_t j = queue.pop();
        result.stats.dequeue_count++;
        uint64_t checks_this_dequeue = 0;

        if (options.exhaustive_window_check) {
            for (size_t i = 0; i < n; ++i) {
                if (i == j || recs[i].marked || !spans(recs[i], recs[j]))
                    continue;
                if (std::abs(recs[i].all_short_start - recs[j].all_short_start) > 128)
                    throw std::logic_error("relax: spanning jump outside the 128-byte window");
            }
        }

        const int64_t growth = recs[j].long_size - kShortSize;
        auto visit = [&](size_t i) {
            ++checks_this_dequeue;
            JumpRecord& k = recs[i];
            if (k.marked || !spans(k, recs[j]))
                return;
            // Growth moves the displacement away from zero on both sides.
            k.current_distance += k.original_distance > 0 ? growth : -growth;
            if (k.current_distance >= 128 || k.current_distance < -128) {
                k.marked = true;
                queue.push(i);
            }
        };

        for (size_t i = j; i-- > 0;) {
            if (recs[j].all_short_start - recs[i].all_short_start > 128)
                break;
            visit(i);
        }
        for (size_t i = j + 1; i < n; ++i) {
            if (recs[i].all_short_start - recs[j].all_short_start > 128)
                break;
            visit(i);
        }

        result.stats.neighbor_check_count += checks_this_dequeue;
        if (checks_this_dequeue > result.stats.max_neighbors_per_dequeue)
            result.stats.max_neighbors_per_dequeue = checks_this_dequeue;
    }

    for (size_t i = 0; i < n; ++i) {
        result.assignment.is_long[i] = recs[i].marked;
        result.final_distances[i] = recs[i].current_distance;
    }
    return result;
}

inline RelaxationResult relax(JumpTable& table) {
    return relax_with_order(table, RelaxOptions{});
}

}  // namespace jasm
