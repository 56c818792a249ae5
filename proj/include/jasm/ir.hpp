#pragma once

// Core domain model: assembly modes, jump kinds, program items, and the
// size/range tables that drive short-vs-long encoding decisions.

#include <cstdint>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <variant>
#include <vector>

namespace jasm {

enum class Mode : uint8_t {
    Bits16,
    Bits32,
    Bits64,
};

inline const char* mode_name(Mode m) {
    switch (m) {
    case Mode::Bits16: return "16";
    case Mode::Bits32: return "32";
    case Mode::Bits64: return "64";
    }
    return "?";
}

// A jump is either unconditional (JMP) or conditional with a condition-code
// index 0-15, the low nibble of the 0x70-family opcodes.
struct JumpKind {
    bool conditional = false;
    uint8_t cc = 0;

    static JumpKind unconditional() { return {}; }
    static JumpKind condition(uint8_t cc) { return {true, cc}; }

    bool operator==(const JumpKind&) const = default;
};

struct Label {
    std::string name;
    bool operator==(const Label&) const = default;
};

struct Jump {
    JumpKind kind;
    std::string target;
    bool operator==(const Jump&) const = default;
};

// Opaque non-jump content. The byte count is fixed and layout-independent,
// which is what keeps relaxation monotone.
struct Blob {
    std::vector<uint8_t> bytes;
    bool operator==(const Blob&) const = default;
};

using Item = std::variant<Label, Jump, Blob>;

struct SourceProgram {
    Mode mode = Mode::Bits32;
    std::vector<Item> items;

    bool operator==(const SourceProgram&) const = default;

    size_t jump_count() const {
        size_t n = 0;
        for (const Item& it : items)
            if (std::holds_alternative<Jump>(it))
                ++n;
        return n;
    }
};

// One short/long decision per jump, in program order.
struct SizeAssignment {
    std::vector<bool> is_long;
    bool operator==(const SizeAssignment&) const = default;
};

constexpr int64_t kShortSize = 2;
constexpr int64_t kShortMin = -128;
constexpr int64_t kShortMax = 127;

inline int64_t long_size(Mode mode, JumpKind kind) {
    if (mode == Mode::Bits16)
        return kind.conditional ? 4 : 3;
    return kind.conditional ? 6 : 5;  // Bits32 and Bits64 encode identically
}

inline bool short_fits(int64_t displacement) {
    return displacement >= kShortMin && displacement <= kShortMax;
}

inline bool long_fits(int64_t displacement, Mode mode) {
    if (mode == Mode::Bits16)
        return displacement >= -32768 && displacement <= 32767;
    return displacement >= -2147483648LL && displacement <= 2147483647LL;
}

struct SemanticError {
    enum class Kind { DuplicateLabel, UndefinedTarget };
    Kind kind;
    std::string name;
    size_t item_index;

    bool operator==(const SemanticError&) const = default;
};

// Checks the program invariants: unique label names, every jump target
// defined. Reports every violation with the offending item's index.
inline std::vector<SemanticError> validate(const SourceProgram& program) {
    std::vector<SemanticError> errors;
    std::unordered_set<std::string> labels;
    for (size_t i = 0; i < program.items.size(); ++i) {
        if (const Label* l = std::get_if<Label>(&program.items[i])) {
            if (!labels.insert(l->name).second)
                errors.push_back({SemanticError::Kind::DuplicateLabel, l->name, i});
        }
    }
    for (size_t i = 0; i < program.items.size(); ++i) {
        if (const Jump* j = std::get_if<Jump>(&program.items[i])) {
            if (!labels.contains(j->target))
                errors.push_back({SemanticError::Kind::UndefinedTarget, j->target, i});
        }
    }
    return errors;
}

}  // namespace jasm
