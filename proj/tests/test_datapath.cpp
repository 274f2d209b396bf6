#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <set>

#include "origami/datapath.hpp"
#include "origami/golden.hpp"
#include "origami/rng.hpp"

using namespace origami;

namespace {

const QFormat kQ12_9{};

ChipParams default_chip() {
    ChipParams p;
    p.h_in_max = 512;
    return p;  // 8 channels, 7x7, 250 MHz, Q12.9
}

FeatureMap random_stripe(const ChipParams& p, int h, int w, std::uint64_t seed) {
    FeatureMap m = FeatureMap::zeros_fixed(p.n_ch, h, w, p.fmt);
    Rng rng(seed);
    for (auto& c : m.codes) c = rng.code(p.fmt);
    return m;
}

FilterSet random_block_filters(const ChipParams& p, std::uint64_t seed) {
    FilterSet f = FilterSet::zeros_fixed(p.n_ch, p.n_ch, p.h_k, p.w_k, p.fmt);
    Rng rng(seed);
    for (auto& v : f.weight_codes) v = rng.code(p.fmt);
    return f;
}

}  // namespace

TEST_CASE("chip parameter validation") {
    CHECK_THROWS(ChipSim(ChipParams{3, 7, 7, 512, 250.0, kQ12_9}));   // odd n_ch
    CHECK_THROWS(ChipSim(ChipParams{8, 6, 7, 512, 250.0, kQ12_9}));   // even kernel
    CHECK_THROWS(ChipSim(ChipParams{8, 7, 7, 3, 250.0, kQ12_9}));     // h_in_max < kernel
    CHECK_THROWS(ChipSim(ChipParams{8, 7, 7, 512, 0.0, kQ12_9}));     // zero clock
    // bus/trace model holds words in 16-bit containers
    CHECK_THROWS(ChipSim(ChipParams{8, 7, 7, 512, 250.0, QFormat{20, 9, Overflow::wrap}}));
    CHECK_THROWS(tile_cycles_closed_form(ChipParams{}, 3, 100));
}

TEST_CASE("sram organization matches the modeled capacity") {
    const SramSpec s = sram_spec(default_chip());
    CHECK(s.banks == 4);
    CHECK(s.rows_per_bank == 1024);
    CHECK(s.row_bits == 84);
    CHECK(s.total_bits == 344064);  // 344 kbit
}

TEST_CASE("filter loading cycle counts") {
    SUBCASE("defaults take 3136 cycles") {
        ChipSim sim(default_chip());
        std::vector<std::int32_t> w(8 * 8 * 49, 0);
        CHECK(sim.load_filters(w) == 3136);
    }
    SUBCASE("2 channels with 3x3 kernels take 36 cycles") {
        ChipParams p;
        p.n_ch = 2;
        p.h_k = p.w_k = 3;
        p.h_in_max = 64;
        ChipSim sim(p);
        CHECK(sim.load_filters(std::vector<std::int32_t>(2 * 2 * 9, 0)) == 36);
    }
    SUBCASE("wrong shape rejected") {
        ChipSim sim(default_chip());
        CHECK_THROWS(sim.load_filters(std::vector<std::int32_t>(100, 0)));
    }
    SUBCASE("zero filters produce all-zero outputs") {
        ChipParams p = default_chip();
        ChipSim sim(p);
        sim.load_filters(std::vector<std::int32_t>(std::size_t(p.filter_words()), 0));
        const TileResult t = sim.simulate_tile(random_stripe(p, 10, 11, 5));
        for (auto v : t.outputs) CHECK(v == 0);
        CHECK(t.cycles.total == tile_cycles_closed_form(p, 10, 11).total);
    }
}

TEST_CASE("simulate_tile preconditions") {
    ChipParams p = default_chip();
    ChipSim sim(p);
    const FeatureMap stripe = random_stripe(p, 10, 10, 7);
    CHECK_THROWS(sim.simulate_tile(stripe));  // filters not loaded
    sim.load_filters(std::vector<std::int32_t>(std::size_t(p.filter_words()), 0));
    CHECK_THROWS(sim.simulate_tile(random_stripe(p, 513, 10, 8)));  // taller than h_in_max
    CHECK_THROWS(sim.simulate_tile(random_stripe(p, 10, 5, 9)));    // narrower than kernel
    FeatureMap bad = stripe;
    bad.channels = 4;
    bad.codes.resize(std::size_t(4) * 10 * 10);
    CHECK_THROWS(sim.simulate_tile(bad));  // wrong channel count
    sim.simulate_tile(stripe);
    CHECK_THROWS(sim.simulate_tile(stripe));  // configuration consumed by the previous tile
    sim.load_filters(std::vector<std::int32_t>(std::size_t(p.filter_words()), 0));
    // the bank is read-only while a loaded configuration is pending
    CHECK_THROWS(sim.load_filters(std::vector<std::int32_t>(std::size_t(p.filter_words()), 0)));
}

TEST_CASE("delta filters reproduce the interior crop of each channel") {
    ChipParams p = default_chip();
    FilterSet f = FilterSet::zeros_fixed(8, 8, 7, 7, kQ12_9);
    for (int o = 0; o < 8; ++o) f.wq(o, o, 3, 3) = 512;  // center tap = 1.0
    ChipSim sim(p);
    sim.load_filters(f, 0, 0);
    const FeatureMap stripe = random_stripe(p, 16, 13, 17);
    const TileResult t = sim.simulate_tile(stripe);
    for (int o = 0; o < 8; ++o)
        for (int j = 0; j < t.out_rows; ++j)
            for (int i = 0; i < t.out_cols; ++i)
                CHECK(t.at(o, j, i) == stripe.q(o, j + 3, i + 3));
}

TEST_CASE("cycle breakdown follows the closed form") {
    Rng rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        ChipParams p;
        p.n_ch = 2 << rng.uniform(0, 2);
        p.h_k = p.w_k = 3 + 2 * int(rng.uniform(0, 2));
        p.h_in_max = 96;
        const int h = int(rng.uniform(p.h_k, 40));
        const int w = int(rng.uniform(p.w_k, 40));
        const CyclesBreakdown c = tile_cycles_closed_form(p, h, w);
        CHECK(c.total == c.filter_load + c.stripe_preload + c.column_preload_total + c.compute);
        CHECK(c.total == std::int64_t(p.n_ch) * h * w +
                             std::int64_t(p.n_ch) * p.n_ch * p.h_k * p.w_k);

        ChipSim sim(p);
        sim.load_filters(random_block_filters(p, 1000 + trial), 0, 0);
        const TileResult t = sim.simulate_tile(random_stripe(p, h, w, 2000 + trial), false);
        CHECK(t.cycles.total == c.total);
        CHECK(t.cycles.compute == c.compute);
        CHECK(t.cycles.stripe_preload == c.stripe_preload);
    }
}

TEST_CASE("published tile timing: 55x75 stripe at defaults") {
    ChipParams p = default_chip();
    ChipSim sim(p);
    sim.load_filters(random_block_filters(p, 31), 0, 0);
    const TileResult t = sim.simulate_tile(random_stripe(p, 55, 75, 32), false);
    CHECK(t.cycles.total == 36136);
    // 256 such tiles at 250 MHz: within 0.3% of the published 36.94 ms
    const double ms = double(t.cycles.total) * 256 / (p.f_mhz * 1e6) * 1e3;
    CHECK(std::abs(ms - 36.94) / 36.94 < 0.003);
}

TEST_CASE("bus trace invariants") {
    ChipParams p;
    p.n_ch = 4;
    p.h_k = p.w_k = 3;
    p.h_in_max = 32;
    const int h = 9, w = 11;
    ChipSim sim(p);
    const FilterSet f = random_block_filters(p, 41);
    sim.load_filters(f, 0, 0);
    const FeatureMap stripe = random_stripe(p, h, w, 42);
    const TileResult t = sim.simulate_tile(stripe, true);

    std::int64_t filter_words = 0, pixel_words = 0, result_words = 0;
    std::map<std::uint64_t, int> in_per_cycle, out_per_cycle;
    for (const BusRecord& r : t.trace) {
        if (r.dir == BusDir::in)
            ++in_per_cycle[r.cycle];
        else
            ++out_per_cycle[r.cycle];
        if (r.tag == BusTag::filter) ++filter_words;
        if (r.tag == BusTag::pixel) ++pixel_words;
        if (r.tag == BusTag::result) ++result_words;
    }
    CHECK(filter_words == p.filter_words());
    CHECK(pixel_words == std::int64_t(p.n_ch) * h * w);
    CHECK(result_words == std::int64_t(p.n_ch) * t.out_rows * t.out_cols);
    for (const auto& [cycle, count] : in_per_cycle) CHECK(count == 1);
    for (const auto& [cycle, count] : out_per_cycle) CHECK(count == 1);
    for (const auto& [cycle, count] : out_per_cycle) CHECK(cycle < std::uint64_t(t.cycles.total));

    // every input pixel word appears exactly once, in value
    std::map<std::uint16_t, std::int64_t> want_hist, got_hist;
    const std::uint16_t mask = (1u << p.fmt.total_bits) - 1;
    for (auto c : stripe.codes) ++want_hist[std::uint16_t(c) & mask];
    for (const BusRecord& r : t.trace)
        if (r.tag == BusTag::pixel) ++got_hist[r.word];
    CHECK(want_hist == got_hist);

    // trace is cycle-sorted
    for (std::size_t k = 1; k < t.trace.size(); ++k)
        CHECK(t.trace[k - 1].cycle <= t.trace[k].cycle);
}

TEST_CASE("determinism: identical runs give identical traces") {
    ChipParams p;
    p.n_ch = 4;
    p.h_k = p.w_k = 5;
    p.h_in_max = 32;
    const FilterSet f = random_block_filters(p, 51);
    const FeatureMap stripe = random_stripe(p, 12, 9, 52);
    ChipSim a(p), b(p);
    a.load_filters(f, 0, 0);
    b.load_filters(f, 0, 0);
    const TileResult ta = a.simulate_tile(stripe, true);
    const TileResult tb = b.simulate_tile(stripe, true);
    CHECK(ta.outputs == tb.outputs);
    REQUIRE(ta.trace.size() == tb.trace.size());
    for (std::size_t k = 0; k < ta.trace.size(); ++k) {
        CHECK(ta.trace[k].cycle == tb.trace[k].cycle);
        CHECK(ta.trace[k].dir == tb.trace[k].dir);
        CHECK(ta.trace[k].tag == tb.trace[k].tag);
        CHECK(ta.trace[k].word == tb.trace[k].word);
    }
}

TEST_CASE("oracle equivalence against the behavioral chain") {
    Rng rng(61);
    for (int trial = 0; trial < 25; ++trial) {
        ChipParams p;
        p.n_ch = 2 << rng.uniform(0, 2);
        p.h_k = p.w_k = 3 + 2 * int(rng.uniform(0, 2));
        p.h_in_max = 64;
        const int h = int(rng.uniform(p.h_k, 30));
        const int w = int(rng.uniform(p.w_k, 30));
        const FeatureMap stripe = random_stripe(p, h, w, 6000 + trial);
        const FilterSet f = random_block_filters(p, 7000 + trial);
        ChipSim sim(p);
        sim.load_filters(f, 0, 0);
        const TileResult t = sim.simulate_tile(stripe, false);
        const FeatureMap want = conv_fixed_chain(stripe, f, p, p.fmt);
        REQUIRE(t.outputs.size() == want.codes.size());
        for (int o = 0; o < p.n_ch; ++o)
            for (int j = 0; j < t.out_rows; ++j)
                for (int i = 0; i < t.out_cols; ++i) CHECK(t.at(o, j, i) == want.q(o, j, i));
    }
}

TEST_CASE("cross-module oracle: 16-in/8-out tile set matches the chain") {
    // two input blocks combined off-chip equal the 16-channel chain
    ChipParams p = default_chip();
    const int h = 20, w = 20;
    FeatureMap x = FeatureMap::zeros_fixed(16, h, w, kQ12_9);
    Rng rng(71);
    for (auto& c : x.codes) c = rng.code(kQ12_9);
    FilterSet f = FilterSet::zeros_fixed(8, 16, 7, 7, kQ12_9);
    for (auto& v : f.weight_codes) v = rng.code(kQ12_9);

    const FeatureMap want = conv_fixed_chain(x, f, p, kQ12_9);

    std::vector<std::int64_t> acc(want.codes.size(), 0);
    for (int block = 0; block < 2; ++block) {
        FeatureMap stripe = FeatureMap::zeros_fixed(8, h, w, kQ12_9);
        for (int c = 0; c < 8; ++c)
            for (int j = 0; j < h; ++j)
                for (int i = 0; i < w; ++i) stripe.q(c, j, i) = x.q(block * 8 + c, j, i);
        ChipSim sim(p);
        sim.load_filters(f, 0, block);
        const TileResult t = sim.simulate_tile(stripe, false);
        for (int o = 0; o < 8; ++o)
            for (int j = 0; j < t.out_rows; ++j)
                for (int i = 0; i < t.out_cols; ++i)
                    acc[(std::size_t(o) * t.out_rows + j) * t.out_cols + i] += t.at(o, j, i);
    }
    for (std::size_t k = 0; k < acc.size(); ++k)
        CHECK(narrow_raw(acc[k], kQ12_9) == want.codes[k]);
}

TEST_CASE("dual clock accounting") {
    SUBCASE("defaults: 4 units cover 8 channels") {
        ChipParams p = default_chip();
        ChipSim sim(p);
        sim.load_filters(random_block_filters(p, 81), 0, 0);
        const TileResult t = sim.simulate_tile(random_stripe(p, 10, 10, 82), false);
        const DualClockReport rep = dual_clock_check(p, t);
        CHECK(rep.ok);
        CHECK(rep.n_units == 4);
        CHECK(rep.channels_covered == 8);
    }
    SUBCASE("n_ch=2: one unit serves two channels") {
        ChipParams p;
        p.n_ch = 2;
        p.h_k = p.w_k = 3;
        p.h_in_max = 16;
        ChipSim sim(p);
        sim.load_filters(random_block_filters(p, 83), 0, 0);
        const TileResult t = sim.simulate_tile(random_stripe(p, 8, 8, 84), false);
        const DualClockReport rep = dual_clock_check(p, t);
        CHECK(rep.ok);
        CHECK(rep.n_units == 1);
        CHECK(rep.channels_covered == 2);
    }
    SUBCASE("per-unit result counts equal twice the compute cycles") {
        ChipParams p;
        p.n_ch = 4;
        p.h_k = p.w_k = 5;
        p.h_in_max = 40;
        ChipSim sim(p);
        sim.load_filters(random_block_filters(p, 85), 0, 0);
        const TileResult t = sim.simulate_tile(random_stripe(p, 21, 17, 86), false);
        CHECK(t.dual_clock.compute_cycles == t.cycles.compute);
        for (auto cnt : t.dual_clock.unit_results) CHECK(cnt == 2 * t.cycles.compute);
    }
}
