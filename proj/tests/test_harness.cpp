#include "doctest.h"

#include "rble/harness.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace rble;
using namespace rble::harness;

namespace {

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

SweepConfig small_sweep()
{
    SweepConfig cfg;
    cfg.ebno_points_db = {0.0, 8.0, kNoiseless};
    cfg.trials_per_point = 3;
    cfg.payload_len = 64;
    return cfg;
}

}  // namespace

TEST_CASE("gen_tag_data")
{
    CHECK(gen_tag_data(DataKind::all0, 200, 4) == Bits(200, 0));
    CHECK(gen_tag_data(DataKind::all1, 200, 4) == Bits(200, 1));

    for (std::uint64_t s = 0; s < 20; ++s) {
        const Bits p = gen_tag_data(DataKind::pairs, 8, s);
        for (std::size_t i = 0; i < p.size(); i += 2) {
            CHECK(p[i] == p[i + 1]);
        }
    }
    const Bits r = gen_tag_data(DataKind::random, 10000, 21);
    const double ones = static_cast<double>(std::count(r.begin(), r.end(), 1)) / 10000.0;
    CHECK(ones >= 0.47);
    CHECK(ones <= 0.53);
    CHECK(gen_tag_data(DataKind::random, 64, 9) == gen_tag_data(DataKind::random, 64, 9));
    CHECK(gen_tag_data(DataKind::random, 64, 9) != gen_tag_data(DataKind::random, 64, 10));

    CHECK_THROWS_AS(gen_tag_data(DataKind::pairs, 7, 1), std::invalid_argument);
    CHECK_THROWS_AS(gen_tag_data(DataKind::all0, 0, 1), std::invalid_argument);
}

TEST_CASE("name parsers")
{
    CHECK(parse_data_kind("pairs") == DataKind::pairs);
    CHECK(to_string(parse_data_kind("random")) == "random");
    CHECK(parse_pipeline("ble-if") == Pipeline::ble_if_only);
    CHECK(to_string(Pipeline::ble_baseband_only) == "ble-bb");
    CHECK(parse_modulation("gmsk") == ble::Modulation::gfsk);
    CHECK(parse_modulation("fsk2") == ble::Modulation::fsk2);
    CHECK(parse_lfsr("paper9") == ble::LfsrKind::paper_9bit);
    CHECK(parse_phase("absolute") == dsp::PhaseMode::absolute_time);
    CHECK_THROWS_AS(parse_data_kind("ones"), std::invalid_argument);
    CHECK_THROWS_AS(parse_pipeline("rf"), std::invalid_argument);
    CHECK_THROWS_AS(parse_modulation("qpsk"), std::invalid_argument);
    CHECK_THROWS_AS(parse_lfsr("x"), std::invalid_argument);
    CHECK_THROWS_AS(parse_phase("x"), std::invalid_argument);
}

TEST_CASE("sweep config validation")
{
    SweepConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.trials_per_point = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = SweepConfig{};
    cfg.ebno_points_db = {4.0, 2.0};
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.ebno_points_db = {};
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = SweepConfig{};
    cfg.payload_len = 201;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = SweepConfig{};
    cfg.target_channel = 40;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("trial seeds are distinct per point and trial")
{
    CHECK(trial_seed(1, 0.0, 0) != trial_seed(1, 0.0, 1));
    CHECK(trial_seed(1, 0.0, 0) != trial_seed(1, 2.0, 0));
    CHECK(trial_seed(1, 0.0, 0) != trial_seed(2, 0.0, 0));
}

TEST_CASE("sweep curve invariants and the noiseless point")
{
    for (Pipeline p : {Pipeline::rble_full, Pipeline::ble_if_only, Pipeline::ble_baseband_only}) {
        SweepConfig cfg = small_sweep();
        cfg.pipeline = p;
        const BerCurve c = run_sweep(cfg);
        REQUIRE(c.points.size() == 3);
        for (const BerPoint& pt : c.points) {
            CHECK(pt.mean_ber >= 0.0);
            CHECK(pt.mean_ber <= 1.0);
            CHECK(pt.total_errors <= pt.total_bits);
            CHECK(pt.total_bits == 3 * 64);
            CHECK(pt.seeds.size() == 3);
            CHECK(pt.min_ber <= pt.mean_ber);
            CHECK(pt.mean_ber <= pt.max_ber);
        }
        CHECK(c.points[2].mean_ber == 0.0);
        CHECK(c.points[0].mean_ber > 0.0);
        CHECK(zero_ber_threshold(c) == kNoiseless);
    }
}

TEST_CASE("sweeps are deterministic and independent of thread count")
{
    SweepConfig cfg = small_sweep();
    cfg.threads = 1;
    const std::string one = ber_csv(run_sweep(cfg));
    CHECK(ber_csv(run_sweep(cfg)) == one);
    cfg.threads = 4;
    CHECK(ber_csv(run_sweep(cfg)) == one);
}

TEST_CASE("aggregation ignores trial order")
{
    SweepConfig cfg = small_sweep();
    std::vector<TrialResult> trials;
    for (std::size_t t = 0; t < 5; ++t) {
        trials.push_back(run_trial(cfg, 4.0, t));
    }
    const BerPoint a = aggregate(4.0, trials);
    std::reverse(trials.begin(), trials.end());
    std::rotate(trials.begin(), trials.begin() + 2, trials.end());
    const BerPoint b = aggregate(4.0, trials);
    CHECK(a.mean_ber == doctest::Approx(b.mean_ber).epsilon(1e-15));
    CHECK(a.total_errors == b.total_errors);
    CHECK(a.min_ber == b.min_ber);
    CHECK(a.max_ber == b.max_ber);
}

TEST_CASE("failed correlate sync counts as BER 0.5")
{
    SweepConfig cfg;
    cfg.pipeline = Pipeline::ble_baseband_only;
    cfg.sync = ble::SyncMode::correlate;
    cfg.payload_len = 64;
    const TrialResult r = run_trial(cfg, -30.0, 0);
    CHECK(r.sync_failed);
    CHECK(r.ber == 0.5);
    const BerPoint p = aggregate(-30.0, std::vector<TrialResult>{r});
    CHECK(p.sync_failures == 1);
}

TEST_CASE("zero-BER threshold")
{
    BerCurve c;
    CHECK_FALSE(zero_ber_threshold(c).has_value());
    for (double e : {0.0, 2.0, 4.0, 6.0}) {
        BerPoint p;
        p.ebno_db = e;
        p.mean_ber = e < 3.0 ? 0.1 : 0.0;
        c.points.push_back(p);
    }
    CHECK(zero_ber_threshold(c) == 4.0);
}

TEST_CASE("BER CSV")
{
    BerCurve empty;
    CHECK(ber_csv(empty) == "ebno_db,mean_ber,min_ber,max_ber,total_bits,total_errors\n");

    BerCurve one;
    BerPoint p;
    p.ebno_db = 2.0;
    p.mean_ber = 0.1234567890123;
    p.min_ber = 0.05;
    p.max_ber = 0.2;
    p.total_bits = 2000;
    p.total_errors = 247;
    one.points.push_back(p);
    const std::string text = ber_csv(one);
    CHECK(std::count(text.begin(), text.end(), '\n') == 2);

    BerPoint q = p;
    q.ebno_db = kNoiseless;
    q.mean_ber = 0.0;
    one.points.push_back(q);
    const BerCurve back = parse_ber_csv(ber_csv(one));
    REQUIRE(back.points.size() == 2);
    CHECK(back.points[0].mean_ber == p.mean_ber);
    CHECK(back.points[0].total_errors == 247);
    CHECK(back.points[1].ebno_db == kNoiseless);
    CHECK(ber_csv(back) == ber_csv(one));

    CHECK_THROWS(parse_ber_csv(""));
    CHECK_THROWS(parse_ber_csv("a,b\n"));
    CHECK_THROWS(parse_ber_csv("ebno_db,mean_ber,min_ber,max_ber,total_bits,total_errors\n1,2\n"));

    const auto dir = std::filesystem::temp_directory_path() / "rble_test_csv";
    std::filesystem::create_directories(dir);
    emit_ber_csv(empty, dir / "e.csv");
    CHECK(slurp(dir / "e.csv") == ber_csv(empty));
    CHECK_THROWS(emit_ber_csv(empty, dir / "no" / "such" / "dir.csv"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("figure recipes")
{
    const auto names = figure_names();
    CHECK(names.size() == 8);
    CHECK(figure_sweep_config("fig12", RecipeOptions{}).phy_mode == ble::Modulation::fsk2);
    CHECK(figure_sweep_config("fig13", RecipeOptions{}).pipeline == Pipeline::ble_if_only);
    CHECK(figure_sweep_config("fig14", RecipeOptions{}).pipeline == Pipeline::ble_baseband_only);
    CHECK_THROWS_AS(figure_sweep_config("fig8", RecipeOptions{}), std::invalid_argument);

    const auto dir = std::filesystem::temp_directory_path() / "rble_test_fig";
    CHECK_THROWS_AS(run_figure("fig99", dir, RecipeOptions{}), std::invalid_argument);

    const auto rows = data_type_table(RecipeOptions{});
    REQUIRE(rows.size() == 4);
    for (const DataTypeRow& r : rows) {
        if (r.kind != DataKind::random) {
            CHECK(r.ber_continuous == 0.0);
        }
    }

    const auto f10 = run_figure("fig10", dir, RecipeOptions{});
    REQUIRE(f10.files.size() == 1);
    const std::string table = slurp(f10.files[0]);
    CHECK(std::count(table.begin(), table.end(), '\n') == 5);

    const auto f7 = run_figure("fig7", dir, RecipeOptions{});
    CHECK(f7.files.size() == 3);
    for (const auto& f : f7.files) {
        CHECK(std::filesystem::exists(f));
    }

    const auto s8 = exciting_spectrogram(RecipeOptions{});
    const double bin = s8.freq_axis_hz[1];
    // The payload tone sits one deviation below the channel centre.
    CHECK(std::abs(dsp::dominant_frequency(s8) - (16e6 - 250e3)) <= bin);
    CHECK(std::abs(dsp::dominant_frequency(s8) - 16e6) <= 1e6);

    const auto s9 = reflected_spectrogram(RecipeOptions{});
    auto peaks = dsp::dominant_peaks(s9, 2, 2e6);
    REQUIRE(peaks.size() == 2);
    std::sort(peaks.begin(), peaks.end());
    CHECK(std::abs(peaks[0] - (8e6 - 250e3)) <= bin);
    CHECK(std::abs(peaks[1] - (24e6 - 250e3)) <= bin);
    std::filesystem::remove_all(dir);
}
