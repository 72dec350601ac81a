// rble_sim: command-line front end for the backscatter BLE simulator.

#include "rble/backscatter_tag.hpp"
#include "rble/harness.hpp"
#include "rble/iq_file.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace rble;

enum ExitCode : int {
    kOk = 0,
    kConfigError = 2,
    kIoError = 3,
    kRunError = 4,
};

// Flags shared by every subcommand. Strings are parsed after CLI11 so that the
// same names are accepted from a config file.
struct Options {
    int channel_exciting = ble::kAdvertisingChannel37;
    int channel_target = 3;
    std::optional<double> shift0_hz;
    std::optional<double> shift1_hz;
    int sps = 8;
    std::string mode = "gfsk";
    std::string lfsr = "spec7";
    std::string phase = "continuous";
    std::vector<double> ebno_db;
    int trials = 10;
    std::uint64_t seed = 1;
    std::string data = "pairs";
    std::size_t len = 200;
    std::string pipeline = "rble";
    std::string sync = "genie";
    std::string if_snr = "if";
    unsigned threads = 0;
    std::string out;
};

harness::SweepConfig sweep_config(const Options& o)
{
    harness::SweepConfig cfg;
    if (!o.ebno_db.empty()) {
        cfg.ebno_points_db = o.ebno_db;
    }
    cfg.trials_per_point = o.trials;
    cfg.payload_len = o.len;
    cfg.data_kind = harness::parse_data_kind(o.data);
    cfg.phy_mode = harness::parse_modulation(o.mode);
    cfg.lfsr_kind = harness::parse_lfsr(o.lfsr);
    cfg.phase_mode = harness::parse_phase(o.phase);
    cfg.pipeline = harness::parse_pipeline(o.pipeline);
    cfg.base_seed = o.seed;
    if (o.sync == "genie") {
        cfg.sync = ble::SyncMode::genie;
    } else if (o.sync == "correlate") {
        cfg.sync = ble::SyncMode::correlate;
    } else {
        throw std::invalid_argument("unknown sync mode '" + o.sync + "'");
    }
    if (o.if_snr == "if") {
        cfg.if_snr = harness::IfSnrConvention::if_sps;
    } else if (o.if_snr == "baseband") {
        cfg.if_snr = harness::IfSnrConvention::baseband_sps;
    } else {
        throw std::invalid_argument("unknown IF SNR convention '" + o.if_snr + "'");
    }
    cfg.sps = o.sps;
    cfg.exciting_channel = o.channel_exciting;
    cfg.target_channel = o.channel_target;
    cfg.shift0_hz = o.shift0_hz;
    cfg.shift1_hz = o.shift1_hz;
    cfg.threads = o.threads;
    cfg.validate();
    return cfg;
}

tag::EndToEndKnobs knobs_from(const harness::SweepConfig& cfg)
{
    tag::EndToEndKnobs k;
    k.phy.mode = cfg.phy_mode;
    k.phy.sps = cfg.sps;
    k.lfsr = cfg.lfsr_kind;
    k.phase_mode = cfg.phase_mode;
    k.sync = cfg.sync;
    k.exciting_channel = ble::ChannelIndex(cfg.exciting_channel);
    k.target_channel = ble::ChannelIndex(cfg.target_channel);
    k.shift0_hz = cfg.shift0_hz;
    k.shift1_hz = cfg.shift1_hz;
    return k;
}

std::optional<channel::AwgnConfig> if_noise(const harness::SweepConfig& cfg, double ebno_db, std::uint64_t seed)
{
    if (!std::isfinite(ebno_db)) {
        return std::nullopt;
    }
    channel::AwgnConfig a;
    a.ebno_db = ebno_db;
    a.insertion = channel::Insertion::if_real;
    a.sps = cfg.if_snr == harness::IfSnrConvention::if_sps ? cfg.sps * 8 : cfg.sps;
    a.seed = seed;
    return a;
}

double single_ebno(const Options& o)
{
    if (o.ebno_db.size() > 1) {
        throw std::invalid_argument("this subcommand takes a single --ebno-db value");
    }
    return o.ebno_db.empty() ? harness::kNoiseless : o.ebno_db.front();
}

void warn_geometry(const harness::SweepConfig& cfg, const tag::EndToEndKnobs& k)
{
    auto tc = tag::make_tag_config({}, k.exciting_channel, k.target_channel, k.phy.deviation_hz);
    tc.shift0_hz = cfg.shift0_hz.value_or(tc.shift0_hz);
    tc.shift1_hz = cfg.shift1_hz.value_or(tc.shift1_hz);
    for (const std::string& issue : tag::geometry_issues(tc, k.exciting_channel, k.phy.deviation_hz)) {
        std::cerr << "warning: " << issue << '\n';
    }
}

int cmd_gen(const Options& o, const std::string& signal, bool at_if)
{
    const harness::SweepConfig cfg = sweep_config(o);
    const std::filesystem::path out = o.out.empty() ? std::filesystem::path(signal + ".iq") : std::filesystem::path(o.out);
    if (signal == "exciting") {
        tag::ExcitationSpec spec;
        spec.exciting_channel = ble::ChannelIndex(cfg.exciting_channel);
        spec.payload_len_bits = cfg.payload_len;
        ble::PhyConfig phy;
        phy.mode = cfg.phy_mode;
        phy.sps = cfg.sps;
        dsp::ComplexWaveform w = tag::build_exciting_waveform(spec, phy, cfg.lfsr_kind);
        if (at_if) {
            const double f = ble::rf_to_if(ble::channel_center_freq(spec.exciting_channel));
            dsp::write_iq_file(out, dsp::digital_upconvert(w, f));
        } else {
            w.center_freq_hz = ble::channel_center_freq(spec.exciting_channel);
            dsp::write_iq_file(out, w);
        }
    } else {
        tag::EndToEndKnobs k = knobs_from(cfg);
        warn_geometry(cfg, k);
        const std::uint64_t seed = harness::trial_seed(cfg.base_seed, harness::kNoiseless, 0);
        const auto data = harness::gen_tag_data(cfg.data_kind, cfg.payload_len, channel::derive_seed(seed, 1));
        k.awgn = if_noise(cfg, single_ebno(o), channel::derive_seed(seed, 2));
        tag::EndToEndTrace trace;
        tag::end_to_end(data, k, &trace);
        dsp::write_iq_file(out, trace.received_if);
    }
    std::cout << "wrote " << out.string() << " and " << dsp::sidecar_path(out).string() << '\n';
    return kOk;
}

int cmd_spectrogram(const Options& o, const std::string& input, std::size_t fft, std::size_t hop)
{
    const auto meta = dsp::read_iq_metadata(input);
    const dsp::ComplexWaveform w = dsp::read_iq_file(input);
    dsp::Spectrogram s;
    if (meta.real) {
        s = dsp::stft_spectrogram(dsp::real_part(w), fft, hop);
    } else {
        s = dsp::stft_spectrogram(w, fft, hop);
    }
    const std::filesystem::path out = o.out.empty() ? std::filesystem::path(input).replace_extension(".csv") : std::filesystem::path(o.out);
    dsp::write_spectrogram_csv(out, s);
    std::cout << "wrote " << out.string() << " (" << s.num_frames() << " frames x " << s.freq_axis_hz.size()
              << " bins); strongest component " << dsp::dominant_frequency(s) << " Hz\n";
    return kOk;
}

int cmd_ber_sweep(const Options& o)
{
    const harness::SweepConfig cfg = sweep_config(o);
    const harness::BerCurve curve = harness::run_sweep(cfg);
    if (o.out.empty() || o.out == "-") {
        std::cout << harness::ber_csv(curve);
    } else {
        harness::emit_ber_csv(curve, o.out);
    }
    for (const harness::BerPoint& p : curve.points) {
        if (p.sync_failures > 0) {
            std::cerr << "Eb/No " << p.ebno_db << " dB: " << p.sync_failures << " sync failures\n";
        }
    }
    return kOk;
}

int cmd_e2e(const Options& o)
{
    const harness::SweepConfig cfg = sweep_config(o);
    const double ebno = single_ebno(o);
    tag::EndToEndKnobs k = knobs_from(cfg);
    warn_geometry(cfg, k);
    const std::uint64_t seed = harness::trial_seed(cfg.base_seed, ebno, 0);
    const auto data = harness::gen_tag_data(cfg.data_kind, cfg.payload_len, channel::derive_seed(seed, 1));
    k.awgn = if_noise(cfg, ebno, channel::derive_seed(seed, 2));

    tag::EndToEndTrace t;
    const tag::EndToEndResult r = tag::end_to_end(data, k, &t);
    auto power_db = [](auto const& v) { return 10.0 * std::log10(dsp::mean_power(v)); };
    std::cout << "exciting channel " << cfg.exciting_channel << " -> target channel " << cfg.target_channel << '\n'
              << "tag shifts: header " << t.tag.header_shift_hz << " Hz, bit0 " << t.tag.shift0_hz << " Hz, bit1 "
              << t.tag.shift1_hz << " Hz\n"
              << "exciting baseband: " << t.exciting_baseband.size() << " samples @ "
              << t.exciting_baseband.sample_rate_hz << " Hz, " << power_db(t.exciting_baseband.samples) << " dB\n"
              << "exciting IF:       " << t.exciting_if.size() << " samples @ " << t.exciting_if.sample_rate_hz
              << " Hz, " << power_db(t.exciting_if.samples) << " dB\n"
              << "reflected IF:      " << power_db(t.reflected_if.samples) << " dB\n"
              << "received IF:       " << power_db(t.received_if.samples) << " dB"
              << (k.awgn ? " (Eb/No " + std::to_string(ebno) + " dB)" : std::string(" (noiseless)")) << '\n'
              << "received baseband: " << t.received_baseband.size() << " samples\n"
              << "sync: start sample " << t.sync_start_sample << ", metric " << t.sync_metric << '\n'
              << "bit errors " << r.bit_errors << " / " << r.sent_bits.size() << ", BER " << r.ber << '\n';

    if (!o.out.empty()) {
        const std::filesystem::path dir = o.out;
        std::filesystem::create_directories(dir);
        dsp::write_iq_file(dir / "exciting_baseband.iq", t.exciting_baseband);
        dsp::write_iq_file(dir / "exciting_if.iq", t.exciting_if);
        dsp::write_iq_file(dir / "reflected_if.iq", t.reflected_if);
        dsp::write_iq_file(dir / "received_if.iq", t.received_if);
        dsp::write_iq_file(dir / "received_baseband.iq", t.received_baseband);
        std::cout << "stage dumps in " << dir.string() << '\n';
    }
    return kOk;
}

int cmd_figure(const Options& o, const std::string& name)
{
    harness::RecipeOptions ro;
    ro.seed = o.seed;
    ro.trials = o.trials;
    ro.payload_len = o.len;
    ro.lfsr_kind = harness::parse_lfsr(o.lfsr);
    ro.threads = o.threads;
    const std::filesystem::path dir = o.out.empty() ? std::filesystem::path("figures") : std::filesystem::path(o.out);
    const harness::FigureOutput fig = harness::run_figure(name, dir, ro);
    std::cout << fig.name << ":\n" << fig.summary;
    for (const auto& f : fig.files) {
        std::cout << "wrote " << f.string() << '\n';
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Backscatter BLE (RBLE) link simulator"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "TOML/INI file with option values; command-line flags win");

    Options o;
    app.add_option("--channel-exciting", o.channel_exciting, "BLE channel of the exciting packet")->capture_default_str();
    app.add_option("--channel-target", o.channel_target, "BLE channel the tag shifts onto")->capture_default_str();
    app.add_option("--shift0-hz", o.shift0_hz, "tag shift for a 0 bit (default from the channel plan)");
    app.add_option("--shift1-hz", o.shift1_hz, "tag shift for a 1 bit (default from the channel plan)");
    app.add_option("--sps", o.sps, "baseband samples per symbol")->capture_default_str()->check(CLI::Range(2, 64));
    app.add_option("--mode", o.mode, "gfsk | fsk2 | gmsk")->capture_default_str();
    app.add_option("--lfsr", o.lfsr, "whitening register: spec7 | paper9")->capture_default_str();
    app.add_option("--phase", o.phase, "tag mixer phase: continuous | absolute")->capture_default_str();
    app.add_option("--ebno-db", o.ebno_db, "Eb/No point(s) in dB; 'inf' = noiseless")->delimiter(',');
    app.add_option("--trials", o.trials, "trials per Eb/No point")->capture_default_str()->check(CLI::PositiveNumber);
    app.add_option("--seed", o.seed, "base seed")->capture_default_str();
    app.add_option("--data", o.data, "tag data: all0 | all1 | random | pairs")->capture_default_str();
    app.add_option("--len", o.len, "tag payload length in bits")->capture_default_str();
    app.add_option("--pipeline", o.pipeline, "rble | ble-if | ble-bb")->capture_default_str();
    app.add_option("--sync", o.sync, "receiver timing: genie | correlate")->capture_default_str();
    app.add_option("--if-snr", o.if_snr, "samples/symbol used for IF noise: if | baseband")->capture_default_str();
    app.add_option("--threads", o.threads, "worker threads (0 = all cores)")->capture_default_str();
    app.add_option("--out", o.out, "output file or directory");

    auto* gen = app.add_subcommand("gen", "write the exciting or reflected waveform as an IQ file");
    std::string signal = "exciting";
    bool at_if = false;
    gen->add_option("signal", signal, "exciting | reflected")
        ->check(CLI::IsMember({"exciting", "reflected"}))
        ->capture_default_str();
    gen->add_flag("--if", at_if, "exciting: write the real IF waveform instead of baseband");

    auto* spec = app.add_subcommand("spectrogram", "STFT of an IQ file to CSV");
    std::string input;
    std::size_t fft = harness::kFigureFftSize;
    std::size_t hop = harness::kFigureHop;
    spec->add_option("input", input, "IQ file (with .meta sidecar)")->required();
    spec->add_option("--fft", fft, "FFT size (power of two)")->capture_default_str();
    spec->add_option("--hop", hop, "hop in samples")->capture_default_str();

    auto* sweep = app.add_subcommand("ber-sweep", "BER over Eb/No, CSV to --out or stdout");
    auto* e2e = app.add_subcommand("e2e", "one verbose end-to-end trial");

    auto* figure = app.add_subcommand("figure", "run a named figure recipe");
    std::string figure_name;
    figure->add_option("name", figure_name, "fig7 .. fig14")->required()->check(CLI::IsMember(harness::figure_names()));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        if (gen->parsed()) {
            return cmd_gen(o, signal, at_if);
        }
        if (spec->parsed()) {
            return cmd_spectrogram(o, input, fft, hop);
        }
        if (sweep->parsed()) {
            return cmd_ber_sweep(o);
        }
        if (e2e->parsed()) {
            return cmd_e2e(o);
        }
        if (figure->parsed()) {
            return cmd_figure(o, figure_name);
        }
    } catch (const ble::SyncError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRunError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return kIoError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIoError;
    }
    return kConfigError;
}
