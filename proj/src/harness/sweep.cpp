#include "rble/harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace rble::harness {

namespace {

constexpr int kInterpolation = 8;
constexpr std::uint64_t kDataStream = 1;
constexpr std::uint64_t kNoiseStream = 2;

struct Outcome {
    std::size_t errors = 0;
    std::size_t bits = 0;
};

Outcome run_ble_only(const SweepConfig& cfg, const Bits& data, const std::optional<channel::AwgnConfig>& noise,
                     const ble::PhyConfig& phy)
{
    const ble::ChannelIndex ch(cfg.exciting_channel);
    const ble::BlePacket packet =
        ble::assemble_packet(data, ble::kAdvertisingAccessAddress, ble::Whitening{ch, cfg.lfsr_kind});
    const dsp::ComplexWaveform tx = ble::modulate(packet, phy);

    dsp::ComplexWaveform baseband;
    if (cfg.pipeline == Pipeline::ble_if_only) {
        const double if_hz = ble::rf_to_if(ble::channel_center_freq(ch));
        const dsp::RealWaveform if_wave = dsp::digital_upconvert(tx, if_hz, kInterpolation);
        baseband = dsp::digital_downconvert(noise ? channel::add_awgn(if_wave, *noise) : if_wave, if_hz);
    } else {
        baseband = noise ? channel::add_awgn(tx, *noise) : tx;
    }

    ble::ReceiverConfig rx;
    rx.sync = cfg.sync;
    rx.num_bits = ble::kHeaderBits + data.size();
    const ble::Reception r = ble::receive(baseband, phy, rx);
    const Bits on_air(r.bits.begin() + static_cast<std::ptrdiff_t>(ble::kHeaderBits), r.bits.end());
    const Bits decoded = ble::whiten(on_air, ch, cfg.lfsr_kind);
    return {ble::bit_errors(data, decoded), data.size()};
}

Outcome run_rble(const SweepConfig& cfg, const Bits& data, const std::optional<channel::AwgnConfig>& noise,
                 const ble::PhyConfig& phy)
{
    tag::EndToEndKnobs knobs;
    knobs.phy = phy;
    knobs.lfsr = cfg.lfsr_kind;
    knobs.phase_mode = cfg.phase_mode;
    knobs.awgn = noise;
    knobs.sync = cfg.sync;
    knobs.exciting_channel = ble::ChannelIndex(cfg.exciting_channel);
    knobs.target_channel = ble::ChannelIndex(cfg.target_channel);
    knobs.shift0_hz = cfg.shift0_hz;
    knobs.shift1_hz = cfg.shift1_hz;
    knobs.interpolation = kInterpolation;
    const tag::EndToEndResult r = tag::end_to_end(data, knobs);
    return {r.bit_errors, data.size()};
}

}  // namespace

std::vector<double> default_ebno_grid()
{
    std::vector<double> grid;
    for (int e = 0; e <= 20; e += 2) {
        grid.push_back(e);
    }
    return grid;
}

void SweepConfig::validate() const
{
    if (trials_per_point < 1) {
        throw std::invalid_argument("sweep: trials_per_point must be >= 1");
    }
    if (ebno_points_db.empty()) {
        throw std::invalid_argument("sweep: no Eb/No points");
    }
    if (!std::is_sorted(ebno_points_db.begin(), ebno_points_db.end())) {
        throw std::invalid_argument("sweep: Eb/No points must be sorted ascending");
    }
    if (std::any_of(ebno_points_db.begin(), ebno_points_db.end(), [](double e) { return std::isnan(e); })) {
        throw std::invalid_argument("sweep: Eb/No point is NaN");
    }
    if (payload_len == 0 || payload_len > ble::kMaxPayloadBits) {
        throw std::invalid_argument("sweep: payload length must be in 1..2080");
    }
    if (data_kind == DataKind::pairs && payload_len % 2 != 0) {
        throw std::invalid_argument("sweep: (00|11)* data needs an even payload length");
    }
    ble::ChannelIndex{exciting_channel};
    ble::ChannelIndex{target_channel};
}

std::uint64_t trial_seed(std::uint64_t base_seed, double ebno_db, std::size_t trial)
{
    return channel::derive_seed(base_seed, std::bit_cast<std::uint64_t>(ebno_db), trial);
}

TrialResult run_trial(const SweepConfig& cfg, double ebno_db, std::size_t trial)
{
    TrialResult out;
    out.seed = trial_seed(cfg.base_seed, ebno_db, trial);
    const Bits data = gen_tag_data(cfg.data_kind, cfg.payload_len, channel::derive_seed(out.seed, kDataStream));

    ble::PhyConfig phy;
    phy.mode = cfg.phy_mode;
    phy.sps = cfg.sps;

    std::optional<channel::AwgnConfig> noise;
    if (std::isfinite(ebno_db)) {
        channel::AwgnConfig awgn;
        awgn.ebno_db = ebno_db;
        awgn.seed = channel::derive_seed(out.seed, kNoiseStream);
        if (cfg.pipeline == Pipeline::ble_baseband_only) {
            awgn.insertion = channel::Insertion::baseband_complex;
            awgn.sps = cfg.sps;
        } else {
            awgn.insertion = channel::Insertion::if_real;
            awgn.sps = cfg.if_snr == IfSnrConvention::if_sps ? cfg.sps * kInterpolation : cfg.sps;
        }
        noise = awgn;
    }

    try {
        const Outcome o = cfg.pipeline == Pipeline::rble_full ? run_rble(cfg, data, noise, phy)
                                                             : run_ble_only(cfg, data, noise, phy);
        out.bits = o.bits;
        out.errors = o.errors;
        out.ber = static_cast<double>(o.errors) / static_cast<double>(o.bits);
    } catch (const ble::SyncError&) {
        out.sync_failed = true;
        out.bits = data.size();
        out.errors = data.size() / 2;
        out.ber = 0.5;
    }
    return out;
}

BerPoint aggregate(double ebno_db, std::span<const TrialResult> trials)
{
    BerPoint p;
    p.ebno_db = ebno_db;
    if (trials.empty()) {
        return p;
    }
    p.min_ber = 1.0;
    double sum = 0.0;
    for (const TrialResult& t : trials) {
        sum += t.ber;
        p.min_ber = std::min(p.min_ber, t.ber);
        p.max_ber = std::max(p.max_ber, t.ber);
        p.total_bits += t.bits;
        p.total_errors += t.errors;
        p.sync_failures += t.sync_failed ? 1 : 0;
        p.seeds.push_back(t.seed);
    }
    p.mean_ber = sum / static_cast<double>(trials.size());
    return p;
}

BerCurve run_sweep(const SweepConfig& cfg)
{
    cfg.validate();
    const std::size_t trials = static_cast<std::size_t>(cfg.trials_per_point);
    const std::size_t jobs = cfg.ebno_points_db.size() * trials;
    std::vector<TrialResult> results(jobs);

    unsigned workers = cfg.threads != 0 ? cfg.threads : std::max(1U, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, jobs));

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (std::size_t j = next++; j < jobs; j = next++) {
            try {
                results[j] = run_trial(cfg, cfg.ebno_points_db[j / trials], j % trials);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back(work);
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    BerCurve curve;
    for (std::size_t p = 0; p < cfg.ebno_points_db.size(); ++p) {
        curve.points.push_back(aggregate(cfg.ebno_points_db[p], std::span(results).subspan(p * trials, trials)));
    }
    return curve;
}

std::optional<double> zero_ber_threshold(const BerCurve& curve)
{
    for (const BerPoint& p : curve.points) {
        if (p.mean_ber == 0.0) {
            return p.ebno_db;
        }
    }
    return std::nullopt;
}

}  // namespace rble::harness
