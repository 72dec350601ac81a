#pragma once

#include "rble/backscatter_tag.hpp"
#include "rble/ble_phy.hpp"
#include "rble/channel.hpp"
#include "rble/dsp.hpp"

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

// Seeded BER experiments over Eb/No, tag data classes and pipeline variants.
namespace rble::harness {

using ble::Bits;

enum class DataKind { all0, all1, random, pairs };

// all0/all1 constants, random i.i.d. fair bits, pairs = (00|11)* blocks.
Bits gen_tag_data(DataKind kind, std::size_t len, std::uint64_t seed);

enum class Pipeline {
    rble_full,          // exciting packet, DUC, tag, IF noise, DDC
    ble_if_only,        // plain BLE packet through DUC/DDC with IF noise
    ble_baseband_only,  // plain BLE packet, noise at baseband
};

// Which samples-per-symbol the Eb/No -> SNR conversion uses when noise is
// added at IF.
enum class IfSnrConvention { if_sps, baseband_sps };

inline constexpr double kNoiseless = std::numeric_limits<double>::infinity();

std::vector<double> default_ebno_grid();

struct SweepConfig {
    std::vector<double> ebno_points_db = default_ebno_grid();  // +inf = no noise
    int trials_per_point = 10;
    std::size_t payload_len = 200;
    DataKind data_kind = DataKind::pairs;
    ble::Modulation phy_mode = ble::Modulation::gfsk;
    ble::LfsrKind lfsr_kind = ble::LfsrKind::ble_spec_7bit;
    dsp::PhaseMode phase_mode = dsp::PhaseMode::continuous;
    Pipeline pipeline = Pipeline::rble_full;
    std::uint64_t base_seed = 1;

    ble::SyncMode sync = ble::SyncMode::genie;
    IfSnrConvention if_snr = IfSnrConvention::if_sps;
    int sps = 8;
    int exciting_channel = ble::kAdvertisingChannel37;
    int target_channel = 3;
    std::optional<double> shift0_hz;
    std::optional<double> shift1_hz;
    unsigned threads = 0;  // 0 = hardware concurrency

    void validate() const;
};

struct TrialResult {
    double ber = 0.0;
    std::size_t bits = 0;
    std::size_t errors = 0;
    bool sync_failed = false;
    std::uint64_t seed = 0;
};

std::uint64_t trial_seed(std::uint64_t base_seed, double ebno_db, std::size_t trial);

// One trial at one Eb/No point. A correlate-sync failure yields BER 0.5 with
// the flag set instead of an exception.
TrialResult run_trial(const SweepConfig& cfg, double ebno_db, std::size_t trial);

struct BerPoint {
    double ebno_db = 0.0;
    double mean_ber = 0.0;
    double min_ber = 0.0;
    double max_ber = 0.0;
    std::size_t total_bits = 0;
    std::size_t total_errors = 0;
    std::vector<std::uint64_t> seeds;
    std::size_t sync_failures = 0;
};

struct BerCurve {
    std::vector<BerPoint> points;
};

BerPoint aggregate(double ebno_db, std::span<const TrialResult> trials);

// Trials run in parallel; aggregation does not depend on completion order.
BerCurve run_sweep(const SweepConfig& cfg);

// Smallest grid Eb/No whose mean BER is exactly zero.
std::optional<double> zero_ber_threshold(const BerCurve& curve);

std::string ber_csv(const BerCurve& curve);
BerCurve parse_ber_csv(std::string_view text);
void emit_ber_csv(const BerCurve& curve, const std::filesystem::path& path);

// Name <-> enum helpers shared by the CLI and the config reader.
DataKind parse_data_kind(std::string_view s);
std::string_view to_string(DataKind k);
Pipeline parse_pipeline(std::string_view s);
std::string_view to_string(Pipeline p);
ble::Modulation parse_modulation(std::string_view s);
ble::LfsrKind parse_lfsr(std::string_view s);
dsp::PhaseMode parse_phase(std::string_view s);

// Figure recipes ---------------------------------------------------------

struct RecipeOptions {
    std::uint64_t seed = 1;
    int trials = 10;
    std::size_t payload_len = 200;
    ble::LfsrKind lfsr_kind = ble::LfsrKind::ble_spec_7bit;
    unsigned threads = 0;
};

inline constexpr std::size_t kFigureFftSize = 4096;
inline constexpr std::size_t kFigureHop = 1024;

// Spectrogram of the exciting packet at IF (exciting channel -> 16 MHz).
dsp::Spectrogram exciting_spectrogram(const RecipeOptions& opts);
// Spectrogram of the reflected packet for an all-zeros tag.
dsp::Spectrogram reflected_spectrogram(const RecipeOptions& opts);

struct DataTypeRow {
    DataKind kind;
    double ber_continuous = 0.0;
    double ber_absolute_time = 0.0;
};

// Noiseless RBLE BER per tag data class, both tag phase modes.
std::vector<DataTypeRow> data_type_table(const RecipeOptions& opts);

// Sweep presets for the BER/EbNo figures (fig11 .. fig14).
SweepConfig figure_sweep_config(std::string_view name, const RecipeOptions& opts);

struct FigureOutput {
    std::string name;
    std::vector<std::filesystem::path> files;
    std::string summary;
};

std::vector<std::string> figure_names();
FigureOutput run_figure(std::string_view name, const std::filesystem::path& out_dir, const RecipeOptions& opts);

}  // namespace rble::harness
