#include "rble/iq_file.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>

namespace rble::dsp {

namespace {

static_assert(sizeof(float) == 4);

void put_le_float(std::ostream& os, float v)
{
    auto bits = std::bit_cast<std::uint32_t>(v);
    std::array<char, 4> bytes{};
    for (std::size_t i = 0; i < 4; ++i) {
        bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xFFU);
    }
    os.write(bytes.data(), 4);
}

float get_le_float(const unsigned char* p)
{
    std::uint32_t bits = 0;
    for (std::size_t i = 0; i < 4; ++i) {
        bits |= static_cast<std::uint32_t>(p[i]) << (8 * i);
    }
    return std::bit_cast<float>(bits);
}

std::string format_double(double v)
{
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), end);
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out)
{
    std::ofstream os(path, mode);
    if (!os) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    return os;
}

void write_sidecar(const std::filesystem::path& iq_path, const IqFileInfo& info)
{
    auto os = open_out(sidecar_path(iq_path));
    os << "sample_rate_hz:" << format_double(info.sample_rate_hz) << '\n'
       << "center_freq_hz:" << format_double(info.center_freq_hz) << '\n'
       << "num_samples:" << info.num_samples << '\n'
       << "sample_format:" << (info.real ? "real" : "complex") << '\n';
    if (!os) {
        throw std::runtime_error("failed writing " + sidecar_path(iq_path).string());
    }
}

template <typename Fn>
void write_samples(const std::filesystem::path& path, std::size_t n, Fn&& sample_at)
{
    auto os = open_out(path, std::ios::out | std::ios::binary);
    for (std::size_t i = 0; i < n; ++i) {
        const Complex s = sample_at(i);
        put_le_float(os, static_cast<float>(s.real()));
        put_le_float(os, static_cast<float>(s.imag()));
    }
    if (!os) {
        throw std::runtime_error("failed writing " + path.string());
    }
}

std::string trim(std::string s)
{
    const auto first = s.find_first_not_of(" \t\r");
    const auto last = s.find_last_not_of(" \t\r");
    if (first == std::string::npos) {
        return {};
    }
    return s.substr(first, last - first + 1);
}

}  // namespace

std::filesystem::path sidecar_path(const std::filesystem::path& iq_path)
{
    auto p = iq_path;
    p += ".meta";
    return p;
}

void write_iq_file(const std::filesystem::path& path, const ComplexWaveform& w)
{
    write_samples(path, w.size(), [&](std::size_t i) { return w.samples[i]; });
    write_sidecar(path, {w.sample_rate_hz, w.center_freq_hz, w.size(), false});
}

void write_iq_file(const std::filesystem::path& path, const RealWaveform& w)
{
    write_samples(path, w.size(), [&](std::size_t i) { return Complex(w.samples[i], 0.0); });
    write_sidecar(path, {w.sample_rate_hz, 0.0, w.size(), true});
}

IqFileInfo read_iq_metadata(const std::filesystem::path& iq_path)
{
    const auto meta = sidecar_path(iq_path);
    std::ifstream is(meta);
    if (!is) {
        throw std::runtime_error("cannot open " + meta.string());
    }
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(is, line)) {
        const auto colon = line.find(':');
        if (colon == std::string::npos) {
            continue;
        }
        kv[trim(line.substr(0, colon))] = trim(line.substr(colon + 1));
    }
    auto need = [&](const std::string& key) -> const std::string& {
        auto it = kv.find(key);
        if (it == kv.end()) {
            throw std::runtime_error(meta.string() + ": missing key " + key);
        }
        return it->second;
    };
    IqFileInfo info;
    try {
        info.sample_rate_hz = std::stod(need("sample_rate_hz"));
        info.center_freq_hz = std::stod(need("center_freq_hz"));
        info.num_samples = std::stoull(need("num_samples"));
    } catch (const std::logic_error&) {
        throw std::runtime_error(meta.string() + ": malformed numeric value");
    }
    if (auto it = kv.find("sample_format"); it != kv.end()) {
        info.real = it->second == "real";
    }
    return info;
}

ComplexWaveform read_iq_file(const std::filesystem::path& path)
{
    const IqFileInfo info = read_iq_metadata(path);
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::vector<unsigned char> raw((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    if (raw.size() != info.num_samples * 8) {
        throw std::runtime_error(path.string() + ": size does not match num_samples in sidecar");
    }
    ComplexWaveform w;
    w.sample_rate_hz = info.sample_rate_hz;
    w.center_freq_hz = info.center_freq_hz;
    w.samples.resize(info.num_samples);
    for (std::size_t i = 0; i < info.num_samples; ++i) {
        w.samples[i] = Complex(get_le_float(&raw[8 * i]), get_le_float(&raw[8 * i + 4]));
    }
    return w;
}

void write_spectrogram_csv(const std::filesystem::path& path, const Spectrogram& s)
{
    auto os = open_out(path);
    os << "time_s\\freq_hz";
    for (double f : s.freq_axis_hz) {
        os << ',' << format_double(f);
    }
    os << '\n';
    for (std::size_t r = 0; r < s.magnitudes_db.size(); ++r) {
        os << format_double(s.time_axis_s[r]);
        for (double m : s.magnitudes_db[r]) {
            os << ',' << format_double(m);
        }
        os << '\n';
    }
    if (!os) {
        throw std::runtime_error("failed writing " + path.string());
    }
}

}  // namespace rble::dsp
