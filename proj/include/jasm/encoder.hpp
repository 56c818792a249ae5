#pragma once

// Final two-pass encoding. Pass one places every item using the chosen
// short/long sizes and records label offsets; pass two emits real x86 bytes
// with displacements relative to the byte after each instruction. Nothing
// moves between the passes, so every displacement is exact.
//
// Byte forms:
//   short unconditional     EB rel8
//   short conditional       70+cc rel8
//   long  unconditional     E9 rel32          (E9 rel16 in 16-bit mode)
//   long  conditional       0F 80+cc rel32    (0F 80+cc rel16 in 16-bit mode)
//
// Displacements are little-endian two's complement.

#include <cstdint>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "jasm/ir.hpp"
#include "jasm/layout.hpp"
#include "jasm/parser.hpp"

namespace jasm {

class EncodeError : public std::runtime_error {
public:
    enum class Kind { ShortRangeViolation, LongRangeExceeded };

    EncodeError(Kind kind, size_t jump_ordinal, int64_t displacement)
        : std::runtime_error(describe(kind, jump_ordinal, displacement)),
          kind(kind),
          jump_ordinal(jump_ordinal),
          displacement(displacement) {}

    Kind kind;
    size_t jump_ordinal;  // program-order jump index
    int64_t displacement;

private:
    static std::string describe(Kind kind, size_t ordinal, int64_t disp) {
        std::string what = kind == Kind::ShortRangeViolation
                               ? "short jump out of rel8 range"
                               : "long jump out of range for mode";
        return what + ": jump #" + std::to_string(ordinal) +
               ", displacement " + std::to_string(disp);
    }
};

struct FinalLayout {
    LabelTable labels;
    std::vector<int64_t> jump_offsets;  // first byte of each jump, program order
    std::vector<int64_t> jump_sizes;
    int64_t total_size = 0;
};

inline FinalLayout final_layout(const SourceProgram& program, const SizeAssignment& assignment) {
    if (assignment.is_long.size() != program.jump_count())
        throw std::invalid_argument("final_layout: assignment length does not match jump count");

    FinalLayout out;
    int64_t offset = 0;
    size_t jump_ordinal = 0;
    for (const Item& item : program.items) {
        if (const Label* l = std::get_if<Label>(&item)) {
            out.labels.emplace(l->name, offset);
        } else if (const Jump* j = std::get_if<Jump>(&item)) {
            int64_t size = assignment.is_long[jump_ordinal]
                               ? long_size(program.mode, j->kind)
                               : kShortSize;
            out.jump_offsets.push_back(offset);
            out.jump_sizes.push_back(size);
            offset += size;
            ++jump_ordinal;
        } else {
            offset += static_cast<int64_t>(std::get<Blob>(item).bytes.size());
        }
    }
    out.total_size = offset;
    return out;
}

struct ListingEntry {
    int64_t offset = 0;
    std::vector<uint8_t> bytes;
    std::string source;
};

struct EncodedProgram {
    std::vector<uint8_t> bytes;
    LabelTable label_offsets;
    std::vector<ListingEntry> listing;  // one entry per item
};

namespace detail {

inline void append_le(std::vector<uint8_t>& out, int64_t value, int width) {
    for (int i = 0; i < width; ++i)
        out.push_back(static_cast<uint8_t>((value >> (8 * i)) & 0xff));
}

}  // namespace detail

inline EncodedProgram encode(const SourceProgram& program, const SizeAssignment& assignment) {
    const FinalLayout layout = final_layout(program, assignment);

    EncodedProgram out;
    out.label_offsets = layout.labels;
    out.bytes.reserve(static_cast<size_t>(layout.total_size));

    size_t jump_ordinal = 0;
    for (const Item& item : program.items) {
        ListingEntry entry;
        entry.offset = static_cast<int64_t>(out.bytes.size());
        entry.source = render_item(item);
        const size_t byte_start = out.bytes.size();

        if (const Jump* j = std::get_if<Jump>(&item)) {
            const bool is_long = assignment.is_long[jump_ordinal];
            const int64_t size = layout.jump_sizes[jump_ordinal];
            const int64_t end = layout.jump_offsets[jump_ordinal] + size;
            const int64_t disp = layout.labels.at(j->target) - end;

            if (!is_long) {
                if (!short_fits(disp))
                    throw EncodeError(EncodeError::Kind::ShortRangeViolation, jump_ordinal, disp);
                out.bytes.push_back(j->kind.conditional ? static_cast<uint8_t>(0x70 + j->kind.cc)
                                                        : static_cast<uint8_t>(0xEB));
                detail::append_le(out.bytes, disp, 1);
            } else {
                if (!long_fits(disp, program.mode))
                    throw EncodeError(EncodeError::Kind::LongRangeExceeded, jump_ordinal, disp);
                if (j->kind.conditional) {
                    out.bytes.push_back(0x0F);
                    out.bytes.push_back(static_cast<uint8_t>(0x80 + j->kind.cc));
                } else {
                    out.bytes.push_back(0xE9);
                }
                detail::append_le(out.bytes, disp, program.mode == Mode::Bits16 ? 2 : 4);
            }
            ++jump_ordinal;
        } else if (const Blob* b = std::get_if<Blob>(&item)) {
            out.bytes.insert(out.bytes.end(), b->bytes.begin(), b->bytes.end());
        }

        entry.bytes.assign(out.bytes.begin() + byte_start, out.bytes.end());
        out.listing.push_back(std::move(entry));
    }
    return out;
}

struct VerifyReport {
    bool ok = true;
    std::optional<size_t> failing_jump;  // program-order jump index
    std::string message;
};

namespace detail {

inline int64_t read_le_signed(const std::vector<uint8_t>& bytes, size_t at, int width) {
    uint64_t v = 0;
    for (int i = 0; i < width; ++i)
        v |= static_cast<uint64_t>(bytes[at + i]) << (8 * i);
    const uint64_t sign = 1ull << (8 * width - 1);
    return static_cast<int64_t>((v ^ sign)) - static_cast<int64_t>(sign);
}

}  // namespace detail

// Independent check of the final image: walks the items, re-derives every
// offset from the bytes themselves (instruction lengths come from decoded
// opcodes, not from the layout), and confirms that each decoded displacement
// lands on its target label and each blob was copied verbatim.
inline VerifyReport decode_verify(const EncodedProgram& encoded,
                                  const SourceProgram& program,
                                  const SizeAssignment& assignment) {
    VerifyReport report;
    auto fail = [&](std::optional<size_t> jump, std::string message) {
        report.ok = false;
        report.failing_jump = jump;
        report.message = std::move(message);
        return report;
    };

    if (assignment.is_long.size() != program.jump_count())
        return fail(std::nullopt, "assignment length does not match jump count");

    const std::vector<uint8_t>& bytes = encoded.bytes;
    const int disp_width_long = program.mode == Mode::Bits16 ? 2 : 4;

    struct DecodedJump {
        size_t ordinal;
        int64_t end;   // offset of the byte after the instruction
        int64_t disp;
        std::string target;
    };
    std::vector<DecodedJump> jumps;
    LabelTable walked_labels;

    int64_t offset = 0;
    size_t ordinal = 0;
    for (const Item& item : program.items) {
        if (const Label* l = std::get_if<Label>(&item)) {
            walked_labels.emplace(l->name, offset);
            continue;
        }
        if (const Blob* b = std::get_if<Blob>(&item)) {
            if (offset + static_cast<int64_t>(b->bytes.size()) > static_cast<int64_t>(bytes.size()))
                return fail(std::nullopt, "image truncated inside blob at offset " + std::to_string(offset));
            for (size_t i = 0; i < b->bytes.size(); ++i) {
                if (bytes[offset + i] != b->bytes[i])
                    return fail(std::nullopt, "blob byte mismatch at offset " + std::to_string(offset + i));
            }
            offset += static_cast<int64_t>(b->bytes.size());
            continue;
        }

        const Jump& j = std::get<Jump>(item);
        const bool want_long = assignment.is_long[ordinal];
        if (offset >= static_cast<int64_t>(bytes.size()))
            return fail(ordinal, "image truncated at jump #" + std::to_string(ordinal));
        const uint8_t op = bytes[offset];

        int64_t size = 0;
        int64_t disp = 0;
        bool form_ok = false;
        if (!want_long) {
            const uint8_t expect = j.kind.conditional ? static_cast<uint8_t>(0x70 + j.kind.cc) : 0xEB;
            form_ok = op == expect;
            size = 2;
            if (form_ok && offset + size <= static_cast<int64_t>(bytes.size()))
                disp = detail::read_le_signed(bytes, offset + 1, 1);
        } else if (j.kind.conditional) {
            form_ok = op == 0x0F &&
                      offset + 1 < static_cast<int64_t>(bytes.size()) &&
                      bytes[offset + 1] == static_cast<uint8_t>(0x80 + j.kind.cc);
            size = 2 + disp_width_long;
            if (form_ok && offset + size <= static_cast<int64_t>(bytes.size()))
                disp = detail::read_le_signed(bytes, offset + 2, disp_width_long);
        } else {
            form_ok = op == 0xE9;
            size = 1 + disp_width_long;
            if (form_ok && offset + size <= static_cast<int64_t>(bytes.size()))
                disp = detail::read_le_signed(bytes, offset + 1, disp_width_long);
        }
        if (!form_ok)
            return fail(ordinal, "opcode mismatch at jump #" + std::to_string(ordinal) +
                                     " (offset " + std::to_string(offset) + ")");
        if (offset + size > static_cast<int64_t>(bytes.size()))
            return fail(ordinal, "image truncated inside jump #" + std::to_string(ordinal));

        jumps.push_back({ordinal, offset + size, disp, j.target});
        offset += size;
        ++ordinal;
    }

    if (offset != static_cast<int64_t>(bytes.size()))
        return fail(std::nullopt, "image size " + std::to_string(bytes.size()) +
                                      " does not match decoded size " + std::to_string(offset));

    for (const DecodedJump& dj : jumps) {
        const int64_t want = walked_labels.at(dj.target);
        const int64_t got = dj.end + dj.disp;
        if (got != want)
            return fail(dj.ordinal, "jump #" + std::to_string(dj.ordinal) + " lands at " +
                                        std::to_string(got) + ", target '" + dj.target +
                                        "' is at " + std::to_string(want));
    }

    for (const auto& [name, off] : walked_labels) {
        auto it = encoded.label_offsets.find(name);
        if (it == encoded.label_offsets.end() || it->second != off)
            return fail(std::nullopt, "label table disagrees on '" + name + "'");
    }
    return report;
}

// Text listing, one line per item: offset, emitted bytes, source.
inline std::string render_listing(const EncodedProgram& encoded) {
    std::string out;
    char head[16];
    for (const ListingEntry& entry : encoded.listing) {
        std::snprintf(head, sizeof(head), "%08llx",
                      static_cast<unsigned long long>(entry.offset));
        std::string hex;
        static const char* digits = "0123456789ABCDEF";
        for (size_t i = 0; i < entry.bytes.size(); ++i) {
            if (i)
                hex += ' ';
            hex += digits[entry.bytes[i] >> 4];
            hex += digits[entry.bytes[i] & 0xf];
        }
        if (hex.size() < 14)
            hex.resize(14, ' ');
        out += head;
        out += "  ";
        out += hex;
        out += "  ";
        out += entry.source;
        out += '\n';
    }
    return out;
}

}  // namespace jasm
