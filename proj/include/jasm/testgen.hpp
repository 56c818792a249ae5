#pragma once

// Deterministic program generators for property tests and benchmarks.

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "jasm/ir.hpp"
#include "jasm/rng.hpp"

namespace jasm {

struct GenParams {
    uint64_t seed = 1;
    size_t jump_count = 16;
    double blob_mean = 16.0;           // mean bytes of padding around a jump
    double backward_fraction = 0.5;    // chance a jump targets an earlier label
    double conditional_fraction = 0.5;
    Mode mode = Mode::Bits32;
};

// Random program with the displacement distribution skewed toward the
// rel8 boundary: every third jump targets its nearest label across padding
// sized to land the all-short displacement within 8 bytes of +-127/128,
// so at least a quarter of all jumps probe the threshold. The remaining
// jumps target a uniformly chosen label on the chosen side, across
// geometric padding.
inline SourceProgram gen_random(const GenParams& params) {
    SplitMix64 rng(params.seed);
    SourceProgram program;
    program.mode = params.mode;

    size_t label_counter = 0;
    auto fresh_label = [&] { return "L" + std::to_string(label_counter++); };

    auto emit_padding = [&](int64_t size) {
        if (size <= 0)
            return;
        Blob blob{std::vector<uint8_t>(static_cast<size_t>(size), 0)};
        if (size <= 32 && rng.chance(0.1)) {
            for (uint8_t& b : blob.bytes)
                b = static_cast<uint8_t>(rng.below(256));
        }
        program.items.push_back(std::move(blob));
    };

    program.items.push_back(Label{fresh_label()});

    struct PendingJump {
        size_t item_index;
        bool backward;
    };
    std::vector<PendingJump> pending;

    for (size_t i = 1; i <= params.jump_count; ++i) {
        const bool conditional = rng.chance(params.conditional_fraction);
        const JumpKind kind = conditional
                                  ? JumpKind::condition(static_cast<uint8_t>(rng.below(16)))
                                  : JumpKind::unconditional();
        const bool backward = rng.chance(params.backward_fraction);

        if (i % 3 == 1) {
            if (backward) {
                const int64_t magnitude = rng.range(120, 136);  // |displacement|
                std::string name = fresh_label();
                program.items.push_back(Label{name});
                emit_padding(magnitude - 2);
                program.items.push_back(Jump{kind, std::move(name)});
            } else {
                const int64_t displacement = rng.range(119, 135);
                std::string name = fresh_label();
                program.items.push_back(Jump{kind, name});
                emit_padding(displacement);
                program.items.push_back(Label{std::move(name)});
            }
        } else {
            emit_padding(rng.geometric(params.blob_mean));
            pending.push_back({program.items.size(), backward});
            program.items.push_back(Jump{kind, std::string()});
            emit_padding(rng.geometric(params.blob_mean));
            program.items.push_back(Label{fresh_label()});
        }
    }
    emit_padding(rng.geometric(params.blob_mean));
    program.items.push_back(Label{fresh_label()});

    std::vector<size_t> label_positions;
    for (size_t i = 0; i < program.items.size(); ++i)
        if (std::holds_alternative<Label>(program.items[i]))
            label_positions.push_back(i);

    for (const PendingJump& pj : pending) {
        auto split = std::lower_bound(label_positions.begin(), label_positions.end(), pj.item_index);
        const size_t before = static_cast<size_t>(split - label_positions.begin());
        const size_t after = label_positions.size() - before;
        size_t pick;
        if (pj.backward && before > 0)
            pick = static_cast<size_t>(rng.below(before));
        else if (after > 0)
            pick = before + static_cast<size_t>(rng.below(after));
        else
            pick = static_cast<size_t>(rng.below(before));
        const Label& target = std::get<Label>(program.items[label_positions[pick]]);
        std::get<Jump>(program.items[pj.item_index]).target = target.name;
    }
    return program;
}

// Chain of k forward unconditional jumps, 65 bytes apart, each spanning
// exactly its successor. Only the last jump starts out of rel8 range
// (displacement 128); every earlier one sits close enough to the limit that
// its successor going long pushes it over, so the marking cascades one jump
// per dequeue all the way back to the first.
inline SourceProgram gen_cascade(size_t k, Mode mode = Mode::Bits32) {
    if (k < 1)
        throw std::invalid_argument("gen_cascade: k must be >= 1");

    const int64_t growth = long_size(mode, JumpKind::unconditional()) - kShortSize;
    const int64_t near_limit = std::min<int64_t>(127, 129 - growth);
    const int64_t spacing = 65;

    struct Event {
        int64_t offset;
        bool is_label;  // labels sort before jumps at equal offsets
        size_t ordinal;
    };
    std::vector<Event> events;
    events.reserve(2 * k);
    for (size_t i = 1; i <= k; ++i) {
        const int64_t start = spacing * static_cast<int64_t>(i - 1);
        const int64_t distance = i == k ? 128 : near_limit;
        events.push_back({start, false, i});
        events.push_back({start + kShortSize + distance, true, i});
    }
    std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
        if (a.offset != b.offset)
            return a.offset < b.offset;
        return a.is_label && !b.is_label;
    });

    SourceProgram program;
    program.mode = mode;
    int64_t cursor = 0;
    for (const Event& ev : events) {
        if (ev.offset < cursor)
            throw std::logic_error("gen_cascade: event inside a jump");
        if (ev.offset > cursor) {
            program.items.push_back(Blob{std::vector<uint8_t>(static_cast<size_t>(ev.offset - cursor), 0)});
            cursor = ev.offset;
        }
        const std::string name = "L" + std::to_string(ev.ordinal);
        if (ev.is_label) {
            program.items.push_back(Label{name});
        } else {
            program.items.push_back(Jump{JumpKind::unconditional(), name});
            cursor += kShortSize;
        }
    }
    return program;
}

// The two mutually dependent jumps that motivate the whole problem.
inline SourceProgram gen_paper_mutual() {
    SourceProgram program;
    program.mode = Mode::Bits32;
    program.items = {
        Label{"LabelA"},
        Jump{JumpKind::unconditional(), "LabelB"},
        Jump{JumpKind::unconditional(), "LabelA"},
        Label{"LabelB"},
    };
    return program;
}

}  // namespace jasm
