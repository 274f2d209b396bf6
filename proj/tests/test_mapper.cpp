#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "origami/mapper.hpp"
#include "origami/rng.hpp"

using namespace origami;

namespace {

const QFormat kQ12_9{};

ChipParams chip_with(int n_ch, int k, int h_in_max) {
    ChipParams p;
    p.n_ch = n_ch;
    p.h_k = p.w_k = k;
    p.h_in_max = h_in_max;
    return p;
}

FeatureMap random_fixed(int c, int h, int w, std::uint64_t seed, const QFormat& fmt = kQ12_9) {
    FeatureMap m = FeatureMap::zeros_fixed(c, h, w, fmt);
    Rng rng(seed);
    for (auto& v : m.codes) v = rng.code(fmt);
    return m;
}

FilterSet random_fixed_filters(int out, int in, int hk, int wk, std::uint64_t seed,
                               const QFormat& fmt = kQ12_9) {
    FilterSet f = FilterSet::zeros_fixed(out, in, hk, wk, fmt);
    Rng rng(seed);
    for (auto& v : f.weight_codes) v = rng.code(fmt);
    for (auto& v : f.bias_codes) v = rng.code(fmt);
    return f;
}

// conv_fixed_chain on a layer whose channels need padding first
FeatureMap padded_chain(const FeatureMap& x, const FilterSet& f, const ChipParams& chip) {
    FeatureMap xp = pad_channels(x, chip.n_ch);
    FilterSet fp = f;
    if (xp.channels != f.in_channels) {
        fp = FilterSet::zeros_fixed(f.out_channels, xp.channels, f.h_k, f.w_k, f.fmt);
        for (int o = 0; o < f.out_channels; ++o) {
            for (int c = 0; c < f.in_channels; ++c)
                for (int r = 0; r < f.h_k; ++r)
                    for (int s = 0; s < f.w_k; ++s) fp.wq(o, c, r, s) = f.wq(o, c, r, s);
            fp.bias_codes[o] = f.bias_codes[o];
        }
    }
    return conv_fixed_chain(xp, fp, chip, chip.fmt);
}

}  // namespace

TEST_CASE("plan_layer job counts for the reference stages") {
    const ChipParams chip = chip_with(8, 7, 512);
    SUBCASE("stage 1: 3->16 channels on 240x320") {
        const LayerSpec layer{3, 16, 7, 7, 240, 320, Activation::relu, PoolSpec{2, 2}};
        const LayerPlan plan = plan_layer(layer, chip);
        CHECK(plan.in_blocks == 1);
        CHECK(plan.out_blocks == 2);
        CHECK(plan.stripes.size() == 1);
        CHECK(plan.decomp.part_count() == 1);
        CHECK(plan.jobs.size() == 2);
    }
    SUBCASE("stage 3: 64->256 channels on 55x75") {
        const LayerSpec layer{64, 256, 7, 7, 55, 75, Activation::relu, std::nullopt};
        const LayerPlan plan = plan_layer(layer, chip);
        CHECK(plan.jobs.size() == 256);
    }
    SUBCASE("job enumeration is out_block-major, then in_block, stripe, part") {
        const LayerSpec layer{16, 16, 7, 7, 600, 40, Activation::none, std::nullopt};
        const LayerPlan plan = plan_layer(layer, chip);
        REQUIRE(plan.stripes.size() == 2);
        int id = 0;
        for (int ob = 0; ob < 2; ++ob)
            for (int ib = 0; ib < 2; ++ib)
                for (int st = 0; st < 2; ++st) {
                    const TileJob& j = plan.jobs[std::size_t(id)];
                    CHECK(j.job_id == id);
                    CHECK(j.out_block == ob);
                    CHECK(j.in_block == ib);
                    CHECK(j.stripe == st);
                    ++id;
                }
    }
}

TEST_CASE("stripes overlap by exactly h_k-1 rows and cover every output row once") {
    const ChipParams chip = chip_with(8, 7, 512);
    SUBCASE("1000-row input splits as (0,512) and (506,494)") {
        const LayerSpec layer{8, 8, 7, 7, 1000, 20, Activation::none, std::nullopt};
        const LayerPlan plan = plan_layer(layer, chip);
        REQUIRE(plan.stripes.size() == 2);
        CHECK(plan.stripes[0].in_row_start == 0);
        CHECK(plan.stripes[0].h_in == 512);
        CHECK(plan.stripes[1].in_row_start == 506);
        CHECK(plan.stripes[1].h_in == 494);
    }
    SUBCASE("coverage and overlap for random heights") {
        Rng rng(5);
        for (int trial = 0; trial < 30; ++trial) {
            ChipParams p = chip_with(4, 5, int(rng.uniform(8, 64)));
            const int H = int(rng.uniform(p.h_k, 700));
            const LayerSpec layer{4, 4, 5, 5, H, 12, Activation::none, std::nullopt};
            const LayerPlan plan = plan_layer(layer, p);
            int next_row = 0;
            for (std::size_t s = 0; s < plan.stripes.size(); ++s) {
                const StripeSpec& st = plan.stripes[s];
                CHECK(st.out_row_start == next_row);
                CHECK(st.h_in <= p.h_in_max);
                CHECK(st.h_in == st.out_rows + p.h_k - 1);
                if (s + 1 < plan.stripes.size()) {
                    const StripeSpec& nx = plan.stripes[s + 1];
                    // input overlap between consecutive stripes
                    CHECK(st.in_row_start + st.h_in - nx.in_row_start == p.h_k - 1);
                }
                next_row += st.out_rows;
            }
            CHECK(next_row == layer.conv_out_h());
        }
    }
}

TEST_CASE("prepare_kernel padding and decomposition") {
    const ChipParams chip = chip_with(8, 7, 512);
    SUBCASE("5x5 becomes one 7x7 part with a zero ring at offset (0,0)") {
        std::vector<double> k(25);
        Rng rng(6);
        for (auto& v : k) v = 2.0 * rng.real01() - 1.0;
        const auto parts = prepare_kernel(k, 5, 5, chip);
        REQUIRE(parts.size() == 1);
        CHECK(parts[0].dy == 0);
        CHECK(parts[0].dx == 0);
        for (int r = 0; r < 7; ++r)
            for (int s = 0; s < 7; ++s) {
                const double tap = parts[0].taps[std::size_t(r) * 7 + s];
                if (r == 0 || r == 6 || s == 0 || s == 6)
                    CHECK(tap == 0.0);
                else
                    CHECK(tap == k[std::size_t(r - 1) * 5 + (s - 1)]);
            }
    }
    SUBCASE("7x7 passes through unchanged") {
        std::vector<double> k(49);
        Rng rng(7);
        for (auto& v : k) v = 2.0 * rng.real01() - 1.0;
        const auto parts = prepare_kernel(k, 7, 7, chip);
        REQUIRE(parts.size() == 1);
        CHECK(parts[0].taps == k);
    }
    SUBCASE("11x11: summed shifted part convolutions equal the direct convolution") {
        Rng rng(8);
        std::vector<double> k(121);
        for (auto& v : k) v = 2.0 * rng.real01() - 1.0;
        const auto parts = prepare_kernel(k, 11, 11, chip);
        CHECK(parts.size() == 4);

        const int H = 24, W = 26;
        FeatureMap x = FeatureMap::zeros_real(1, H, W);
        for (auto& v : x.real) v = 2.0 * rng.real01() - 1.0;

        FilterSet direct = FilterSet::zeros_real(1, 1, 11, 11);
        direct.weights = k;
        const FeatureMap want = conv_real(x, direct);

        // padded input so every part window stays in range
        const KernelDecomp d = decompose_kernel(11, 11, chip);
        FeatureMap xp = FeatureMap::zeros_real(1, H + d.pad_bottom, W + d.pad_right);
        for (int j = 0; j < H; ++j)
            for (int i = 0; i < W; ++i) xp.r(0, j, i) = x.r(0, j, i);

        FeatureMap sum = FeatureMap::zeros_real(1, want.height, want.width);
        for (const KernelPart& part : parts) {
            FilterSet pf = FilterSet::zeros_real(1, 1, 7, 7);
            pf.weights = part.taps;
            // shift the input by the part offset, then convolve
            FeatureMap shifted =
                FeatureMap::zeros_real(1, want.height + 6, want.width + 6);
            for (int j = 0; j < shifted.height; ++j)
                for (int i = 0; i < shifted.width; ++i)
                    shifted.r(0, j, i) = xp.r(0, j + part.dy, i + part.dx);
            const FeatureMap partial = conv_real(shifted, pf);
            for (std::size_t q = 0; q < sum.real.size(); ++q) sum.real[q] += partial.real[q];
        }
        for (std::size_t q = 0; q < sum.real.size(); ++q)
            CHECK(sum.real[q] ==
                  doctest::Approx(want.real[q]).epsilon(1e-9));
    }
}

TEST_CASE("accumulate_offchip") {
    SUBCASE("single block with zero bias passes chip outputs through") {
        const ChipParams chip = chip_with(4, 3, 32);
        const LayerSpec layer{4, 4, 3, 3, 10, 10, Activation::none, std::nullopt};
        const FeatureMap x = random_fixed(4, 10, 10, 9);
        FilterSet f = random_fixed_filters(4, 4, 3, 3, 10);
        for (auto& b : f.bias_codes) b = 0;
        const LayerRunResult run = run_layer(x, layer, f, chip);
        const FeatureMap chain = conv_fixed_chain(x, f, chip, kQ12_9);
        CHECK(run.output.codes == chain.codes);
    }
    SUBCASE("opposite input blocks with identical filters cancel to zero") {
        const ChipParams chip = chip_with(4, 3, 32);
        const LayerSpec layer{8, 4, 3, 3, 9, 9, Activation::none, std::nullopt};
        // codes that are multiples of 2^frac_bits keep every SoP exact,
        // so the signs cancel exactly in the off-chip sum
        FeatureMap x = FeatureMap::zeros_fixed(8, 9, 9, kQ12_9);
        Rng rng(11);
        for (int c = 0; c < 4; ++c)
            for (int j = 0; j < 9; ++j)
                for (int i = 0; i < 9; ++i) {
                    const std::int32_t v = 512 * std::int32_t(rng.uniform(-3, 3));
                    x.q(c, j, i) = v;
                    x.q(c + 4, j, i) = narrow_raw(-std::int64_t(v), kQ12_9);
                }
        FilterSet f = FilterSet::zeros_fixed(4, 8, 3, 3, kQ12_9);
        for (int o = 0; o < 4; ++o)
            for (int c = 0; c < 4; ++c)
                for (int r = 0; r < 3; ++r)
                    for (int s = 0; s < 3; ++s) {
                        const std::int32_t w = rng.code(kQ12_9);
                        f.wq(o, c, r, s) = w;
                        f.wq(o, c + 4, r, s) = w;
                    }
        const LayerRunResult run = run_layer(x, layer, f, chip);
        for (auto v : run.output.codes) CHECK(v == 0);
    }
    SUBCASE("missing job output is rejected naming the job") {
        const ChipParams chip = chip_with(4, 3, 32);
        const LayerSpec layer{4, 4, 3, 3, 8, 8, Activation::none, std::nullopt};
        const LayerPlan plan = plan_layer(layer, chip);
        std::vector<std::vector<std::int32_t>> streams(plan.jobs.size());
        std::vector<std::int32_t> bias(4, 0);
        try {
            accumulate_offchip(plan, streams, bias);
            FAIL("expected missing-job rejection");
        } catch (const std::invalid_argument& e) {
            CHECK(std::string(e.what()).find("job 0") != std::string::npos);
        }
    }
}

TEST_CASE("pipeline equals the behavioral chain bit-exactly") {
    SUBCASE("reference stage-2 shape (16->64) with bias") {
        const ChipParams chip = chip_with(8, 7, 64);
        const LayerSpec layer{16, 64, 7, 7, 20, 20, Activation::none, std::nullopt};
        const FeatureMap x = random_fixed(16, 20, 20, 12);
        const FilterSet f = random_fixed_filters(64, 16, 7, 7, 13);
        const LayerRunResult run = run_layer(x, layer, f, chip);
        const FeatureMap chain = conv_fixed_chain(x, f, chip, kQ12_9);
        CHECK(run.output.codes == chain.codes);
    }
    SUBCASE("channel padding: 3->5 channels on a 4-wide chip") {
        const ChipParams chip = chip_with(4, 3, 32);
        const LayerSpec layer{3, 5, 3, 3, 11, 13, Activation::none, std::nullopt};
        const FeatureMap x = random_fixed(3, 11, 13, 14);
        const FilterSet f = random_fixed_filters(5, 3, 3, 3, 15);
        const LayerRunResult run = run_layer(x, layer, f, chip);
        const FeatureMap chain = padded_chain(x, f, chip);
        CHECK(run.output.codes == chain.codes);
    }
    SUBCASE("striping: tall input against the unstriped chain") {
        const ChipParams chip = chip_with(4, 5, 16);
        const LayerSpec layer{4, 4, 5, 5, 45, 12, Activation::none, std::nullopt};
        const FeatureMap x = random_fixed(4, 45, 12, 16);
        const FilterSet f = random_fixed_filters(4, 4, 5, 5, 17);
        const LayerPlan plan = plan_layer(layer, chip);
        CHECK(plan.stripes.size() > 1);
        const LayerRunResult run = run_layer(x, layer, f, chip);
        const FeatureMap chain = conv_fixed_chain(x, f, chip, kQ12_9);
        CHECK(run.output.codes == chain.codes);
    }
    SUBCASE("small kernel on a larger chip kernel (3x3 on 7x7)") {
        const ChipParams chip = chip_with(4, 7, 32);
        const LayerSpec layer{4, 4, 3, 3, 12, 12, Activation::none, std::nullopt};
        const FeatureMap x = random_fixed(4, 12, 12, 18);
        const FilterSet f = random_fixed_filters(4, 4, 3, 3, 19);
        const LayerRunResult run = run_layer(x, layer, f, chip);
        const FeatureMap chain = conv_fixed_chain(x, f, chip, kQ12_9);
        CHECK(run.output.codes == chain.codes);
    }
    SUBCASE("kernel decomposition: 11x11 on a 7x7 chip") {
        const ChipParams chip = chip_with(4, 7, 40);
        const LayerSpec layer{4, 4, 11, 11, 24, 26, Activation::none, std::nullopt};
        const FeatureMap x = random_fixed(4, 24, 26, 20);
        const FilterSet f = random_fixed_filters(4, 4, 11, 11, 21);
        const LayerPlan plan = plan_layer(layer, chip);
        CHECK(plan.decomp.part_count() == 4);
        const LayerRunResult run = run_layer(x, layer, f, chip);
        const FeatureMap chain = conv_fixed_chain(x, f, chip, kQ12_9);
        CHECK(run.output.codes == chain.codes);
    }
    SUBCASE("randomized geometry: blocks, stripes and parts combined") {
        Rng rng(400);
        for (int trial = 0; trial < 12; ++trial) {
            ChipParams chip;
            chip.n_ch = 2 << rng.uniform(0, 1);  // 2 or 4
            chip.h_k = chip.w_k = 3 + 2 * int(rng.uniform(0, 1));
            chip.h_in_max = int(rng.uniform(chip.h_k + 2, 24));
            LayerSpec layer;
            layer.in_channels = 1 + int(rng.uniform(0, 9));
            layer.out_channels = 1 + int(rng.uniform(0, 9));
            layer.kernel_h = layer.kernel_w = 3 + 2 * int(rng.uniform(0, 3));  // up to 9
            layer.input_h = layer.kernel_h + int(rng.uniform(4, 40));
            layer.input_w = layer.kernel_w + int(rng.uniform(4, 20));
            const FeatureMap x =
                random_fixed(layer.in_channels, layer.input_h, layer.input_w, 500 + trial);
            const FilterSet f =
                random_fixed_filters(layer.out_channels, layer.in_channels, layer.kernel_h,
                                     layer.kernel_w, 600 + trial);
            const LayerRunResult run = run_layer(x, layer, f, chip);
            const FeatureMap chain = padded_chain(x, f, chip);
            CHECK(run.output.codes == chain.codes);
        }
    }
    SUBCASE("parallel and serial execution agree") {
        const ChipParams chip = chip_with(4, 3, 20);
        const LayerSpec layer{8, 8, 3, 3, 30, 14, Activation::none, std::nullopt};
        const FeatureMap x = random_fixed(8, 30, 14, 22);
        const FilterSet f = random_fixed_filters(8, 8, 3, 3, 23);
        const LayerRunResult a = run_layer(x, layer, f, chip, false, true);
        const LayerRunResult b = run_layer(x, layer, f, chip, false, false);
        CHECK(a.output.codes == b.output.codes);
        CHECK(a.total_cycles == b.total_cycles);
    }
}

TEST_CASE("pool_and_activate") {
    const LayerSpec layer{2, 2, 3, 3, 10, 10, Activation::relu, PoolSpec{2, 2}};
    SUBCASE("all-negative map pools to zero") {
        FeatureMap x = FeatureMap::zeros_real(2, 6, 6);
        for (auto& v : x.real) v = -1.5;
        const FeatureMap y = pool_and_activate(x, layer);
        for (double v : y.real) CHECK(v == 0.0);
    }
    SUBCASE("constant positive map halves") {
        FeatureMap x = FeatureMap::zeros_real(1, 4, 6);
        for (auto& v : x.real) v = 2.0;
        const FeatureMap y = pool_and_activate(x, layer);
        CHECK(y.height == 2);
        CHECK(y.width == 3);
        for (double v : y.real) CHECK(v == 2.0);
    }
    SUBCASE("streaming equals the batch composition") {
        Rng rng(24);
        for (int trial = 0; trial < 10; ++trial) {
            FeatureMap x = random_fixed(3, 2 * int(rng.uniform(2, 9)),
                                        2 * int(rng.uniform(2, 9)), 300 + trial);
            const FeatureMap got = pool_and_activate(x, layer);
            const FeatureMap want = maxpool2(relu(x));
            CHECK(got.codes == want.codes);
        }
    }
}

TEST_CASE("plan serialization format") {
    const ChipParams chip = chip_with(8, 7, 512);
    const LayerSpec layer{3, 16, 7, 7, 240, 320, Activation::relu, PoolSpec{2, 2}};
    const LayerPlan plan = plan_layer(layer, chip);
    std::ostringstream os;
    write_plan(os, plan);
    CHECK(os.str() == "0,0,0,0,240,0\n1,0,1,0,240,0\n");
}
