#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>

#include "jasm/layout.hpp"
#include "jasm/oracles.hpp"
#include "jasm/parser.hpp"
#include "jasm/relax.hpp"
#include "jasm/testgen.hpp"

using namespace jasm;

namespace {

JumpRecord make_record(int64_t start, int64_t distance, int64_t lsize = 5) {
    JumpRecord rec;
    rec.all_short_start = start;
    rec.src_point = start + kShortSize;
    rec.original_distance = distance;
    rec.current_distance = distance;
    rec.long_size = lsize;
    return rec;
}

GenParams corpus_params(uint64_t seed) {
    GenParams params;
    params.seed = seed;
    params.jump_count = 1 + seed % 48;
    params.blob_mean = static_cast<double>(seed % 40);
    params.backward_fraction = (seed % 5) / 4.0;
    params.conditional_fraction = (seed % 3) / 2.0;
    params.mode = seed % 4 == 0 ? Mode::Bits16 : (seed % 4 == 1 ? Mode::Bits64 : Mode::Bits32);
    if (params.mode == Mode::Bits16)
        params.blob_mean = static_cast<double>(seed % 12);
    return params;
}

}  // namespace

TEST_CASE("spans: forward jump over a later jump's expansion point") {
    JumpRecord j = make_record(2, 128);
    JumpRecord k = make_record(0, 126);  // target 128 >= p_j = 4
    CHECK(spans(k, j));
}

TEST_CASE("spans boundary: backward target exactly at the other jump's start") {
    // The label just before j stays put when j grows; k's source moves.
    JumpRecord j = make_record(10, 128);
    JumpRecord k = make_record(40, 10 - 42);  // target exactly 10
    REQUIRE(k.target_offset() == j.all_short_start);
    CHECK(spans(k, j));
}

TEST_CASE("spans boundary: forward target exactly at the other jump's start") {
    // Nothing between k's source and its target changes when j grows.
    JumpRecord j = make_record(30, 128);
    JumpRecord k = make_record(0, 28);  // target exactly 30
    REQUIRE(k.target_offset() == j.all_short_start);
    CHECK_FALSE(spans(k, j));
}

TEST_CASE("spans boundary: forward target exactly at the expansion point") {
    // A label at p_j is bound to the content after the insertion, so it moves.
    JumpRecord j = make_record(30, 128);
    JumpRecord k = make_record(0, 30);  // target 32 == p_j
    CHECK(spans(k, j));
}

TEST_CASE("spans: zero-distance jumps never span") {
    JumpRecord j = make_record(10, 128);
    JumpRecord k = make_record(0, 0);
    CHECK_FALSE(spans(k, j));
}

TEST_CASE("spans is one-directional in table position") {
    // A forward jump positioned after j moves rigidly with it.
    JumpRecord j = make_record(0, 128);
    JumpRecord forward_after = make_record(10, 100);
    CHECK_FALSE(spans(forward_after, j));
    // A backward jump positioned before j never crosses it.
    JumpRecord backward_before = make_record(4, -4);
    JumpRecord j2 = make_record(20, 128);
    CHECK_FALSE(spans(backward_before, j2));
}

TEST_CASE("mutual program needs no long jumps") {
    AllShortLayout layout = layout_all_short(gen_paper_mutual());
    RelaxationResult result = relax(layout.jumps);
    CHECK(result.assignment.is_long == std::vector<bool>{false, false});
    CHECK(result.stats.dequeue_count == 0);
    CHECK(result.stats.neighbor_check_count == 0);
    CHECK(result.final_distances == std::vector<int64_t>{2, -4});
}

TEST_CASE("cascade pair: the seed mark ripples to the earlier jump") {
    SourceProgram p = gen_cascade(2);
    AllShortLayout layout = layout_all_short(p);
    REQUIRE(layout.jumps.records[0].original_distance == 126);
    REQUIRE(layout.jumps.records[1].original_distance == 128);

    RelaxationResult result = relax(layout.jumps);
    CHECK(result.assignment.is_long == std::vector<bool>{true, true});
    CHECK(result.final_distances == std::vector<int64_t>{129, 128});
    CHECK(result.stats.dequeue_count == 2);
}

TEST_CASE("single in-range jump stays short") {
    SourceProgram p = parse("jmp X\nspace 126\nX:").program;
    AllShortLayout layout = layout_all_short(p);
    RelaxationResult result = relax(layout.jumps);
    CHECK(result.assignment.is_long == std::vector<bool>{false});
}

TEST_CASE("displacement 128 is long, 127 is short") {
    SourceProgram at_limit = parse("jmp X\nspace 127\nX:").program;
    AllShortLayout l1 = layout_all_short(at_limit);
    CHECK(relax(l1.jumps).assignment.is_long == std::vector<bool>{false});

    SourceProgram over = parse("jmp X\nspace 128\nX:").program;
    AllShortLayout l2 = layout_all_short(over);
    CHECK(relax(l2.jumps).assignment.is_long == std::vector<bool>{true});

    SourceProgram back_at_limit = parse("X:\nspace 126\njmp X").program;  // -128
    AllShortLayout l3 = layout_all_short(back_at_limit);
    REQUIRE(l3.jumps.records[0].original_distance == -128);
    CHECK(relax(l3.jumps).assignment.is_long == std::vector<bool>{false});

    SourceProgram back_over = parse("X:\nspace 127\njmp X").program;  // -129
    AllShortLayout l4 = layout_all_short(back_over);
    CHECK(relax(l4.jumps).assignment.is_long == std::vector<bool>{true});
}

TEST_CASE("queue policies agree on the marked set") {
    SECTION("cascade pair under LIFO") {
        SourceProgram p = gen_cascade(2);
        AllShortLayout fifo_layout = layout_all_short(p);
        RelaxationResult fifo = relax(fifo_layout.jumps);

        AllShortLayout lifo_layout = layout_all_short(p);
        RelaxOptions options;
        options.policy = QueuePolicy::Lifo;
        RelaxationResult lifo = relax_with_order(lifo_layout.jumps, options);
        CHECK(fifo.assignment == lifo.assignment);
        CHECK(fifo.final_distances == lifo.final_distances);
    }

    SECTION("empty seed set stays empty under every policy") {
        for (QueuePolicy policy : {QueuePolicy::Fifo, QueuePolicy::Lifo, QueuePolicy::SeededShuffle}) {
            AllShortLayout layout = layout_all_short(gen_paper_mutual());
            RelaxOptions options;
            options.policy = policy;
            RelaxationResult result = relax_with_order(layout.jumps, options);
            CHECK(result.assignment.is_long == std::vector<bool>{false, false});
        }
    }

    SECTION("random corpus: FIFO, LIFO and shuffle give identical results") {
        for (uint64_t seed = 1; seed <= 200; ++seed) {
            SourceProgram p = gen_random(corpus_params(seed));
            AllShortLayout a = layout_all_short(p);
            RelaxationResult fifo = relax(a.jumps);

            AllShortLayout b = layout_all_short(p);
            RelaxOptions lifo_options;
            lifo_options.policy = QueuePolicy::Lifo;
            RelaxationResult lifo = relax_with_order(b.jumps, lifo_options);

            AllShortLayout c = layout_all_short(p);
            RelaxOptions shuffle_options;
            shuffle_options.policy = QueuePolicy::SeededShuffle;
            shuffle_options.shuffle_seed = seed * 31 + 7;
            RelaxationResult shuffle = relax_with_order(c.jumps, shuffle_options);

            CAPTURE(seed);
            REQUIRE(fifo.assignment == lifo.assignment);
            REQUIRE(fifo.assignment == shuffle.assignment);
            REQUIRE(fifo.final_distances == lifo.final_distances);
            REQUIRE(fifo.final_distances == shuffle.final_distances);
        }
    }
}

TEST_CASE("work counters respect the linear bounds on a random corpus") {
    for (uint64_t seed = 300; seed <= 500; ++seed) {
        SourceProgram p = gen_random(corpus_params(seed));
        AllShortLayout layout = layout_all_short(p);
        const size_t n = layout.jumps.records.size();
        RelaxationResult result = relax(layout.jumps);
        CAPTURE(seed);
        REQUIRE(result.stats.dequeue_count <= n);
        REQUIRE(result.stats.neighbor_check_count <= 130 * result.stats.dequeue_count);
        REQUIRE(result.stats.max_neighbors_per_dequeue <= 130);
    }
}

TEST_CASE("distances only move away from zero") {
    for (uint64_t seed = 600; seed <= 700; ++seed) {
        SourceProgram p = gen_random(corpus_params(seed));
        AllShortLayout layout = layout_all_short(p);
        std::vector<int64_t> original;
        for (const JumpRecord& rec : layout.jumps.records)
            original.push_back(rec.original_distance);
        RelaxationResult result = relax(layout.jumps);
        CAPTURE(seed);
        for (size_t k = 0; k < original.size(); ++k) {
            if (original[k] >= 0)
                REQUIRE(result.final_distances[k] >= original[k]);
            else
                REQUIRE(result.final_distances[k] <= original[k]);
        }
    }
}

TEST_CASE("every spanning jump lives inside the 128-byte scan window") {
    // The exhaustive check inside relax throws if the window ever misses an
    // unmarked spanning jump.
    for (uint64_t seed = 800; seed <= 1000; ++seed) {
        SourceProgram p = gen_random(corpus_params(seed));
        AllShortLayout layout = layout_all_short(p);
        RelaxOptions options;
        options.exhaustive_window_check = true;
        REQUIRE_NOTHROW(relax_with_order(layout.jumps, options));
    }
    for (size_t k : {1, 2, 3, 17, 64}) {
        AllShortLayout layout = layout_all_short(gen_cascade(k));
        RelaxOptions options;
        options.exhaustive_window_check = true;
        REQUIRE_NOTHROW(relax_with_order(layout.jumps, options));
    }
}

TEST_CASE("unmarked jumps' tracked distances equal the exact encoder displacements") {
    for (uint64_t seed = 1100; seed <= 1300; ++seed) {
        SourceProgram p = gen_random(corpus_params(seed));
        AllShortLayout layout = layout_all_short(p);
        RelaxationResult result = relax(layout.jumps);
        FinalLayout final = final_layout(p, result.assignment);

        size_t ordinal = 0;
        CAPTURE(seed);
        for (const Item& item : p.items) {
            if (const Jump* j = std::get_if<Jump>(&item)) {
                if (!result.assignment.is_long[ordinal]) {
                    const int64_t exact = final.labels.at(j->target) -
                                          (final.jump_offsets[ordinal] + final.jump_sizes[ordinal]);
                    REQUIRE(result.final_distances[ordinal] == exact);
                }
                ++ordinal;
            }
        }
    }
}

TEST_CASE("relax agrees with the iterative fixed point on a random corpus") {
    for (uint64_t seed = 1400; seed <= 1700; ++seed) {
        SourceProgram p = gen_random(corpus_params(seed));
        AllShortLayout layout = layout_all_short(p);
        RelaxationResult fast = relax(layout.jumps);
        OracleReport slow = iterative_fixpoint(p);
        CAPTURE(seed);
        REQUIRE(fast.assignment == slow.assignment);
    }
}
