#pragma once

// Text front end for the jump dialect. One statement per line, `;` starts a
// comment:
//
//   .mode 16|32|64        at most once, before any item (default 32)
//   name:                 label (may share a line with an instruction)
//   jmp name              unconditional jump
//   jo jno jb jae je jne jbe ja js jns jp jnp jl jge jle jg   conditional
//   db <hex pairs>        blob with literal bytes
//   space N               blob of N zero bytes

#include <array>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "jasm/ir.hpp"

namespace jasm {

struct ParseError {
    size_t line = 0;    // 1-based
    size_t column = 0;  // 1-based
    std::string message;
};

struct ParseResult {
    SourceProgram program;
    std::vector<ParseError> errors;
    bool ok() const { return errors.empty(); }
};

// Condition-code mnemonics, indexed by the low nibble of the 0x70 opcodes.
inline const std::array<std::string_view, 16>& condition_mnemonics() {
    static const std::array<std::string_view, 16> table = {
        "jo", "jno", "jb", "jae", "je", "jne", "jbe", "ja",
        "js", "jns", "jp", "jnp", "jl", "jge", "jle", "jg"};
    return table;
}

namespace detail {

inline bool is_ident_start(char c) {
    return c == '_' || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

inline bool is_ident_char(char c) {
    return is_ident_start(c) || (c >= '0' && c <= '9');
}

inline int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

struct LineScanner {
    std::string_view text;
    size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t'))
            ++pos;
    }
    bool at_end() {
        skip_ws();
        return pos >= text.size();
    }
    // Next whitespace-delimited token, also split before ':' so `A: jmp B`
    // and `A:jmp B` tokenize the same way.
    std::string_view token() {
        skip_ws();
        size_t start = pos;
        while (pos < text.size() && text[pos] != ' ' && text[pos] != '\t' && text[pos] != ':')
            ++pos;
        if (pos == start && pos < text.size() && text[pos] == ':')
            ++pos;  // lone ':'
        return text.substr(start, pos - start);
    }
    bool eat_colon() {
        if (pos < text.size() && text[pos] == ':') {
            ++pos;
            return true;
        }
        return false;
    }
};

}  // namespace detail

inline ParseResult parse(std::string_view text) {
    ParseResult result;
    bool saw_item = false;
    bool saw_mode = false;

    size_t line_no = 0;
    size_t cursor = 0;
    while (cursor <= text.size()) {
        if (cursor == text.size() && line_no > 0)
            break;
        size_t eol = text.find('\n', cursor);
        if (eol == std::string_view::npos)
            eol = text.size();
        std::string_view line = text.substr(cursor, eol - cursor);
        cursor = eol + 1;
        ++line_no;

        if (size_t sc = line.find(';'); sc != std::string_view::npos)
            line = line.substr(0, sc);
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t'))
            line.remove_suffix(1);
        if (line.find_first_not_of(" \t") == std::string_view::npos)
            continue;

        detail::LineScanner scan{line};
        auto fail = [&](size_t col0, std::string msg) {
            result.errors.push_back({line_no, col0 + 1, std::move(msg)});
        };

        scan.skip_ws();
        size_t tok_col = scan.pos;
        std::string_view tok = scan.token();

        if (tok.starts_with('.')) {
            if (tok != ".mode") {
                fail(tok_col, "unknown directive '" + std::string(tok) + "'");
                continue;
            }
            scan.skip_ws();
            size_t arg_col = scan.pos;
            std::string_view arg = scan.token();
            if (saw_mode) {
                fail(tok_col, "duplicate .mode directive");
                continue;
            }
            if (saw_item) {
                fail(tok_col, ".mode must precede all items");
                continue;
            }
            if (arg == "16")
                result.program.mode = Mode::Bits16;
            else if (arg == "32")
                result.program.mode = Mode::Bits32;
            else if (arg == "64")
                result.program.mode = Mode::Bits64;
            else {
                fail(arg.empty() ? tok_col : arg_col, "expected 16, 32 or 64 after .mode");
                continue;
            }
            saw_mode = true;
            if (!scan.at_end())
                fail(scan.pos, "trailing characters after .mode");
            continue;
        }

        // Optional `ident:` label prefix.
        if (!tok.empty() && detail::is_ident_start(tok[0])) {
            detail::LineScanner peek = scan;
            if (peek.eat_colon()) {
                bool ident_ok = true;
                for (char c : tok)
                    ident_ok = ident_ok && detail::is_ident_char(c);
                if (!ident_ok) {
                    fail(tok_col, "invalid label name '" + std::string(tok) + "'");
                    continue;
                }
                scan = peek;
                result.program.items.push_back(Label{std::string(tok)});
                saw_item = true;
                if (scan.at_end())
                    continue;
                tok_col = scan.pos;
                tok = scan.token();
            }
        }

        auto parse_jump = [&](JumpKind kind) {
            scan.skip_ws();
            size_t arg_col = scan.pos;
            std::string_view target = scan.token();
            if (target.empty() || !detail::is_ident_start(target[0])) {
                fail(target.empty() ? tok_col : arg_col, "expected label after '" + std::string(tok) + "'");
                return;
            }
            for (char c : target) {
                if (!detail::is_ident_char(c)) {
                    fail(arg_col, "invalid label name '" + std::string(target) + "'");
                    return;
                }
            }
            if (!scan.at_end()) {
                fail(scan.pos, "trailing characters after jump");
                return;
            }
            result.program.items.push_back(Jump{kind, std::string(target)});
            saw_item = true;
        };

        if (tok == "jmp") {
            parse_jump(JumpKind::unconditional());
            continue;
        }
        if (auto& ccs = condition_mnemonics(); true) {
            bool matched = false;
            for (size_t cc = 0; cc < ccs.size(); ++cc) {
                if (tok == ccs[cc]) {
                    parse_jump(JumpKind::condition(static_cast<uint8_t>(cc)));
                    matched = true;
                    break;
                }
            }
            if (matched)
                continue;
        }
        if (tok == "db") {
            Blob blob;
            bool bad = false;
            while (!scan.at_end()) {
                size_t col = scan.pos;
                std::string_view pair = scan.token();
                int hi = -1, lo = -1;
                if (pair.size() == 2) {
                    hi = detail::hex_value(pair[0]);
                    lo = detail::hex_value(pair[1]);
                }
                if (hi < 0 || lo < 0) {
                    fail(col, "expected two-hex-digit byte, got '" + std::string(pair) + "'");
                    bad = true;
                    break;
                }
                blob.bytes.push_back(static_cast<uint8_t>(hi * 16 + lo));
            }
            if (!bad) {
                result.program.items.push_back(std::move(blob));
                saw_item = true;
            }
            continue;
        }
        if (tok == "space") {
            scan.skip_ws();
            size_t arg_col = scan.pos;
            std::string_view arg = scan.token();
            uint64_t n = 0;
            auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), n);
            if (arg.empty() || ec != std::errc{} || ptr != arg.data() + arg.size()) {
                fail(arg.empty() ? tok_col : arg_col, "expected a non-negative byte count after 'space'");
                continue;
            }
            if (n > (1ull << 30)) {
                fail(arg_col, "space count too large");
                continue;
            }
            if (!scan.at_end()) {
                fail(scan.pos, "trailing characters after space");
                continue;
            }
            result.program.items.push_back(Blob{std::vector<uint8_t>(n, 0)});
            saw_item = true;
            continue;
        }
        if (tok.empty())
            fail(scan.pos, "expected instruction");
        else
            fail(tok_col, "unknown mnemonic '" + std::string(tok) + "'");
    }
    return result;
}

inline std::string render_item(const Item& item) {
    if (const Label* l = std::get_if<Label>(&item))
        return l->name + ":";
    if (const Jump* j = std::get_if<Jump>(&item)) {
        std::string mnem = j->kind.conditional
                               ? std::string(condition_mnemonics()[j->kind.cc])
                               : std::string("jmp");
        return mnem + " " + j->target;
    }
    const Blob& b = std::get<Blob>(item);
    bool all_zero = true;
    for (uint8_t byte : b.bytes)
        all_zero = all_zero && byte == 0;
    if (all_zero)
        return "space " + std::to_string(b.bytes.size());
    std::string out = "db";
    static const char* digits = "0123456789abcdef";
    for (uint8_t byte : b.bytes) {
        out += ' ';
        out += digits[byte >> 4];
        out += digits[byte & 0xf];
    }
    return out;
}

// Inverse of parse up to blob spelling: parse(format(p)) == p for every
// valid program.
inline std::string format(const SourceProgram& program) {
    std::string out = ".mode ";
    out += mode_name(program.mode);
    out += '\n';
    for (const Item& item : program.items) {
        out += render_item(item);
        out += '\n';
    }
    return out;
}

}  // namespace jasm
