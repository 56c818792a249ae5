#pragma once

// All-short layout: label offsets and the jump-record table computed as if
// every jump took its 2-byte form. These coordinates never change afterwards;
// relaxation tracks displacement growth against them.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "jasm/ir.hpp"

namespace jasm {

using LabelTable = std::unordered_map<std::string, int64_t>;

struct JumpRecord {
    size_t index = 0;        // position in the sorted table
    size_t item_index = 0;   // index into SourceProgram::items
    JumpKind kind;
    int64_t all_short_start = 0;   // first byte of the 2-byte form
    int64_t src_point = 0;         // all_short_start + 2, displacement base
    int64_t original_distance = 0; // target offset - src_point, all-short
    int64_t current_distance = 0;  // mutated by relaxation
    bool marked = false;
    int64_t long_size = 0;

    int64_t target_offset() const { return src_point + original_distance; }
};

struct JumpTable {
    std::vector<JumpRecord> records;
    Mode mode = Mode::Bits32;
};

struct AllShortLayout {
    LabelTable labels;
    JumpTable jumps;
    int64_t total_size = 0;
};

// Prefix-sums item sizes with every jump at 2 bytes. A label's offset is the
// offset of the byte that follows it, so a trailing label sits at total_size.
// Distances are measured from src_point (the byte after the short form),
// making them the rel8 displacement the jump would carry if nothing grew.
inline AllShortLayout layout_all_short(const SourceProgram& program) {
    if (!validate(program).empty())
        throw std::invalid_argument("layout_all_short: program does not validate");

    AllShortLayout out;
    out.jumps.mode = program.mode;

    int64_t offset = 0;
    for (size_t i = 0; i < program.items.size(); ++i) {
        const Item& item = program.items[i];
        if (const Label* l = std::get_if<Label>(&item)) {
            out.labels.emplace(l->name, offset);
        } else if (const Jump* j = std::get_if<Jump>(&item)) {
            JumpRecord rec;
            rec.index = out.jumps.records.size();
            rec.item_index = i;
            rec.kind = j->kind;
            rec.all_short_start = offset;
            rec.src_point = offset + kShortSize;
            rec.long_size = long_size(program.mode, j->kind);
            out.jumps.records.push_back(rec);
            offset += kShortSize;
        } else {
            offset += static_cast<int64_t>(std::get<Blob>(item).bytes.size());
        }
    }
    out.total_size = offset;

    for (JumpRecord& rec : out.jumps.records) {
        const Jump& j = std::get<Jump>(program.items[rec.item_index]);
        rec.original_distance = out.labels.at(j.target) - rec.src_point;
        rec.current_distance = rec.original_distance;
    }
    return out;
}

}  // namespace jasm
