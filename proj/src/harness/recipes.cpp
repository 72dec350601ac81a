#include "rble/harness.hpp"
#include "rble/iq_file.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

namespace rble::harness {

namespace {

std::string fmt(double v)
{
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), end);
}

std::ofstream open_out(const std::filesystem::path& path)
{
    std::ofstream os(path);
    if (!os) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    return os;
}

tag::EndToEndKnobs default_knobs(const RecipeOptions& opts)
{
    tag::EndToEndKnobs knobs;
    knobs.lfsr = opts.lfsr_kind;
    return knobs;
}

tag::EndToEndTrace trace_all_zeros_tag(const RecipeOptions& opts)
{
    tag::EndToEndTrace trace;
    tag::end_to_end(Bits(opts.payload_len, 0), default_knobs(opts), &trace);
    return trace;
}

std::string describe_curve(const BerCurve& curve)
{
    std::ostringstream os;
    for (const BerPoint& p : curve.points) {
        os << "  Eb/No " << fmt(p.ebno_db) << " dB: mean BER " << fmt(p.mean_ber) << " (" << p.total_errors << "/"
           << p.total_bits << ")";
        if (p.sync_failures > 0) {
            os << ", " << p.sync_failures << " sync failures";
        }
        os << '\n';
    }
    const auto zero = zero_ber_threshold(curve);
    os << "  first zero-BER point: " << (zero ? fmt(*zero) + " dB" : std::string("none")) << '\n';
    return os.str();
}

}  // namespace

dsp::Spectrogram exciting_spectrogram(const RecipeOptions& opts)
{
    return dsp::stft_spectrogram(trace_all_zeros_tag(opts).exciting_if, kFigureFftSize, kFigureHop);
}

dsp::Spectrogram reflected_spectrogram(const RecipeOptions& opts)
{
    return dsp::stft_spectrogram(trace_all_zeros_tag(opts).reflected_if, kFigureFftSize, kFigureHop);
}

std::vector<DataTypeRow> data_type_table(const RecipeOptions& opts)
{
    std::vector<DataTypeRow> rows;
    for (DataKind kind : {DataKind::random, DataKind::all1, DataKind::all0, DataKind::pairs}) {
        const Bits data = gen_tag_data(kind, opts.payload_len, channel::derive_seed(opts.seed, 10));
        tag::EndToEndKnobs knobs = default_knobs(opts);
        DataTypeRow row{kind};
        knobs.phase_mode = dsp::PhaseMode::continuous;
        row.ber_continuous = tag::end_to_end(data, knobs).ber;
        knobs.phase_mode = dsp::PhaseMode::absolute_time;
        row.ber_absolute_time = tag::end_to_end(data, knobs).ber;
        rows.push_back(row);
    }
    return rows;
}

SweepConfig figure_sweep_config(std::string_view name, const RecipeOptions& opts)
{
    SweepConfig cfg;
    cfg.trials_per_point = opts.trials;
    cfg.payload_len = opts.payload_len;
    cfg.data_kind = DataKind::pairs;
    cfg.lfsr_kind = opts.lfsr_kind;
    cfg.base_seed = opts.seed;
    cfg.threads = opts.threads;
    if (name == "fig11") {
        cfg.pipeline = Pipeline::rble_full;
        cfg.phy_mode = ble::Modulation::gfsk;
    } else if (name == "fig12") {
        cfg.pipeline = Pipeline::rble_full;
        cfg.phy_mode = ble::Modulation::fsk2;
    } else if (name == "fig13") {
        cfg.pipeline = Pipeline::ble_if_only;
    } else if (name == "fig14") {
        cfg.pipeline = Pipeline::ble_baseband_only;
    } else {
        throw std::invalid_argument("no sweep preset named '" + std::string(name) + "'");
    }
    return cfg;
}

std::vector<std::string> figure_names()
{
    return {"fig7", "fig8", "fig9", "fig10", "fig11", "fig12", "fig13", "fig14"};
}

FigureOutput run_figure(std::string_view name, const std::filesystem::path& out_dir, const RecipeOptions& opts)
{
    const auto names = figure_names();
    if (std::find(names.begin(), names.end(), name) == names.end()) {
        throw std::invalid_argument("unknown figure '" + std::string(name) + "'");
    }
    std::filesystem::create_directories(out_dir);
    FigureOutput out;
    out.name = std::string(name);
    std::ostringstream summary;

    if (name == "fig7") {
        tag::ExcitationSpec spec;
        spec.payload_len_bits = opts.payload_len;
        const auto w = tag::build_exciting_waveform(spec, ble::PhyConfig{}, opts.lfsr_kind);
        const auto iq = out_dir / "fig7_exciting_baseband.iq";
        dsp::write_iq_file(iq, w);
        const auto csv = out_dir / "fig7_single_tone.csv";
        auto os = open_out(csv);
        const auto freq = ble::instantaneous_frequency(w);
        os << "time_s,i,q,inst_freq_hz\n";
        for (std::size_t n = 0; n < w.size(); ++n) {
            os << fmt(static_cast<double>(n) / w.sample_rate_hz) << ',' << fmt(w.samples[n].real()) << ','
               << fmt(w.samples[n].imag()) << ',' << fmt(freq[n]) << '\n';
        }
        out.files = {iq, dsp::sidecar_path(iq), csv};
        const std::size_t payload_start = ble::kHeaderBits * 8;
        summary << "exciting baseband packet, " << w.size() << " samples; payload tone "
                << fmt(freq[w.size() - 1]) << " Hz (from sample " << payload_start << ")\n";
    } else if (name == "fig8" || name == "fig9") {
        const bool exciting = name == "fig8";
        const auto s = exciting ? exciting_spectrogram(opts) : reflected_spectrogram(opts);
        const auto csv = out_dir / (exciting ? "fig8_exciting_spectrogram.csv" : "fig9_reflected_spectrogram.csv");
        dsp::write_spectrogram_csv(csv, s);
        out.files = {csv};
        const auto peaks = dsp::dominant_peaks(s, exciting ? 1 : 2, 2e6);
        summary << (exciting ? "exciting" : "reflected") << " signal peaks:";
        for (double f : peaks) {
            summary << ' ' << fmt(f / 1e6) << " MHz IF (" << fmt(ble::if_to_rf(f) / 1e6) << " MHz RF)";
        }
        summary << '\n';
    } else if (name == "fig10") {
        const auto rows = data_type_table(opts);
        const auto csv = out_dir / "fig10_ber_by_data.csv";
        auto os = open_out(csv);
        os << "data_type,ber_continuous,ber_absolute_time\n";
        for (const DataTypeRow& r : rows) {
            os << to_string(r.kind) << ',' << fmt(r.ber_continuous) << ',' << fmt(r.ber_absolute_time) << '\n';
            summary << "  " << to_string(r.kind) << ": BER " << fmt(r.ber_continuous) << " (continuous phase), "
                    << fmt(r.ber_absolute_time) << " (absolute-time phase)\n";
        }
        out.files = {csv};
    } else {
        const SweepConfig cfg = figure_sweep_config(name, opts);
        const BerCurve curve = run_sweep(cfg);
        const auto csv = out_dir / (std::string(name) + "_ber.csv");
        emit_ber_csv(curve, csv);
        out.files = {csv};
        summary << describe_curve(curve);
    }
    out.summary = summary.str();
    return out;
}

}  // namespace rble::harness
