#include <catch2/catch_amalgamated.hpp>

#include <string>
#include <string_view>

#include "jasm/parser.hpp"
#include "jasm/testgen.hpp"

using namespace jasm;

namespace {

SourceProgram parse_ok(std::string_view text) {
    ParseResult result = parse(text);
    for (const ParseError& e : result.errors)
        UNSCOPED_INFO("parse error " << e.line << ":" << e.column << ": " << e.message);
    REQUIRE(result.ok());
    return result.program;
}

}  // namespace

TEST_CASE("parses the mutual-jump program") {
    SourceProgram p = parse_ok("LabelA:\njmp LabelB\njmp LabelA\nLabelB:");
    REQUIRE(p.items.size() == 4);
    CHECK(p.mode == Mode::Bits32);
    CHECK(p.items[0] == Item{Label{"LabelA"}});
    CHECK(p.items[1] == Item{Jump{JumpKind::unconditional(), "LabelB"}});
    CHECK(p.items[2] == Item{Jump{JumpKind::unconditional(), "LabelA"}});
    CHECK(p.items[3] == Item{Label{"LabelB"}});
}

TEST_CASE("empty input is an empty 32-bit program") {
    SourceProgram p = parse_ok("");
    CHECK(p.items.empty());
    CHECK(p.mode == Mode::Bits32);
}

TEST_CASE("je maps to condition index 4") {
    SourceProgram p = parse_ok("je X\nspace 130\nX:");
    REQUIRE(p.items.size() == 3);
    CHECK(p.items[0] == Item{Jump{JumpKind::condition(4), "X"}});
    CHECK(p.items[1] == Item{Blob{std::vector<uint8_t>(130, 0)}});
    CHECK(p.items[2] == Item{Label{"X"}});
}

TEST_CASE("all sixteen condition mnemonics map to their table position") {
    for (size_t cc = 0; cc < 16; ++cc) {
        std::string text = std::string(condition_mnemonics()[cc]) + " X\nX:";
        SourceProgram p = parse_ok(text);
        CHECK(p.items[0] == Item{Jump{JumpKind::condition(static_cast<uint8_t>(cc)), "X"}});
    }
}

TEST_CASE("mode directive selects 16, 32 or 64") {
    CHECK(parse_ok(".mode 16").mode == Mode::Bits16);
    CHECK(parse_ok(".mode 32").mode == Mode::Bits32);
    CHECK(parse_ok(".mode 64").mode == Mode::Bits64);
}

TEST_CASE("label and instruction share a line") {
    SourceProgram p = parse_ok("A: jmp B\nB:jmp A");
    REQUIRE(p.items.size() == 4);
    CHECK(p.items[0] == Item{Label{"A"}});
    CHECK(p.items[1] == Item{Jump{JumpKind::unconditional(), "B"}});
    CHECK(p.items[2] == Item{Label{"B"}});
    CHECK(p.items[3] == Item{Jump{JumpKind::unconditional(), "A"}});
}

TEST_CASE("comments and blank lines are skipped") {
    SourceProgram p = parse_ok("; leading comment\n\n  \nA: ; trailing\njmp A ; jump back\n");
    REQUIRE(p.items.size() == 2);
}

TEST_CASE("db takes two-digit hex bytes") {
    SourceProgram p = parse_ok("db 00 fF 7a");
    REQUIRE(p.items.size() == 1);
    CHECK(p.items[0] == Item{Blob{{0x00, 0xFF, 0x7A}}});
}

TEST_CASE("space takes a decimal zero-byte count") {
    SourceProgram p = parse_ok("space 0\nspace 3");
    REQUIRE(p.items.size() == 2);
    CHECK(std::get<Blob>(p.items[0]).bytes.empty());
    CHECK(std::get<Blob>(p.items[1]).bytes == std::vector<uint8_t>(3, 0));
}

TEST_CASE("parse errors carry 1-based positions inside the input") {
    struct Case {
        const char* text;
        size_t line;
    };
    for (const Case& c : {Case{"nop", 1}, Case{"jmp", 1}, Case{"A:\ndb 1", 2},
                          Case{"space -1", 1}, Case{".mode 33", 1}, Case{"jmp A extra", 1},
                          Case{".weird", 1}, Case{"jmp 9bad", 1}}) {
        ParseResult r = parse(c.text);
        CAPTURE(c.text);
        REQUIRE_FALSE(r.ok());
        CHECK(r.errors[0].line == c.line);
        CHECK(r.errors[0].column >= 1);
        // Column points inside the offending line.
        std::string_view text = c.text;
        size_t start = 0;
        for (size_t l = 1; l < c.line; ++l)
            start = text.find('\n', start) + 1;
        size_t eol = text.find('\n', start);
        size_t len = (eol == std::string_view::npos ? text.size() : eol) - start;
        CHECK(r.errors[0].column <= len);
    }
}

TEST_CASE("mode directive is rejected twice or after an item") {
    CHECK_FALSE(parse(".mode 32\n.mode 16").ok());
    CHECK_FALSE(parse("A:\n.mode 16").ok());
}

TEST_CASE("one error per malformed line, good lines still parse") {
    ParseResult r = parse("garbage here\nA:\nalso bad\njmp A");
    CHECK(r.errors.size() == 2);
    CHECK(r.errors[0].line == 1);
    CHECK(r.errors[1].line == 3);
}

TEST_CASE("format of the empty program is just the mode line") {
    CHECK(format(SourceProgram{}) == ".mode 32\n");
}

TEST_CASE("format round-trips the mutual program") {
    SourceProgram p = gen_paper_mutual();
    CHECK(parse(format(p)).program == p);
}

TEST_CASE("format round-trips cascades") {
    for (size_t k : {1, 3, 7}) {
        SourceProgram p = gen_cascade(k);
        CAPTURE(k);
        CHECK(parse(format(p)).program == p);
    }
    SourceProgram p16 = gen_cascade(3, Mode::Bits16);
    CHECK(parse(format(p16)).program == p16);
}

TEST_CASE("format round-trips a generated corpus") {
    for (uint64_t seed = 1; seed <= 100; ++seed) {
        GenParams params;
        params.seed = seed;
        params.jump_count = 1 + seed % 40;
        params.blob_mean = static_cast<double>(seed % 50);
        params.backward_fraction = (seed % 5) / 4.0;
        params.conditional_fraction = (seed % 3) / 2.0;
        params.mode = seed % 3 == 0 ? Mode::Bits16 : (seed % 3 == 1 ? Mode::Bits32 : Mode::Bits64);
        SourceProgram p = gen_random(params);
        ParseResult r = parse(format(p));
        CAPTURE(seed);
        REQUIRE(r.ok());
        CHECK(r.program == p);
    }
}

TEST_CASE("non-zero blobs format as db lines") {
    SourceProgram p;
    p.items = {Blob{{0xDE, 0xAD, 0x00}}};
    CHECK(format(p) == ".mode 32\ndb de ad 00\n");
    CHECK(parse(format(p)).program == p);
}
