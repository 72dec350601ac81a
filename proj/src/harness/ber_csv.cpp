#include "rble/harness.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

namespace rble::harness {

namespace {

constexpr std::string_view kHeader = "ebno_db,mean_ber,min_ber,max_ber,total_bits,total_errors";

// Shortest representation that parses back to the same double.
std::string fmt(double v)
{
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), end);
}

template <typename T>
T parse_field(std::string_view field, std::size_t line_no)
{
    T value{};
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
        throw std::runtime_error("BER CSV line " + std::to_string(line_no) + ": bad field '" +
                                 std::string(field) + "'");
    }
    return value;
}

std::vector<std::string_view> split(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return out;
}

}  // namespace

std::string ber_csv(const BerCurve& curve)
{
    std::string out(kHeader);
    out += '\n';
    for (const BerPoint& p : curve.points) {
        out += fmt(p.ebno_db) + ',' + fmt(p.mean_ber) + ',' + fmt(p.min_ber) + ',' + fmt(p.max_ber) + ',' +
               std::to_string(p.total_bits) + ',' + std::to_string(p.total_errors) + '\n';
    }
    return out;
}

BerCurve parse_ber_csv(std::string_view text)
{
    BerCurve curve;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (line_no == 1) {
            if (line != kHeader) {
                throw std::runtime_error("BER CSV: unexpected header '" + std::string(line) + "'");
            }
            continue;
        }
        if (line.empty()) {
            continue;
        }
        const auto f = split(line);
        if (f.size() != 6) {
            throw std::runtime_error("BER CSV line " + std::to_string(line_no) + ": expected 6 fields");
        }
        BerPoint p;
        p.ebno_db = parse_field<double>(f[0], line_no);
        p.mean_ber = parse_field<double>(f[1], line_no);
        p.min_ber = parse_field<double>(f[2], line_no);
        p.max_ber = parse_field<double>(f[3], line_no);
        p.total_bits = parse_field<std::size_t>(f[4], line_no);
        p.total_errors = parse_field<std::size_t>(f[5], line_no);
        curve.points.push_back(p);
    }
    if (line_no == 0) {
        throw std::runtime_error("BER CSV: empty input");
    }
    return curve;
}

void emit_ber_csv(const BerCurve& curve, const std::filesystem::path& path)
{
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    os << ber_csv(curve);
    if (!os) {
        throw std::runtime_error("failed writing " + path.string());
    }
}

DataKind parse_data_kind(std::string_view s)
{
    if (s == "all0") return DataKind::all0;
    if (s == "all1") return DataKind::all1;
    if (s == "random") return DataKind::random;
    if (s == "pairs") return DataKind::pairs;
    throw std::invalid_argument("unknown data kind '" + std::string(s) + "'");
}

std::string_view to_string(DataKind k)
{
    switch (k) {
    case DataKind::all0: return "all0";
    case DataKind::all1: return "all1";
    case DataKind::random: return "random";
    case DataKind::pairs: return "pairs";
    }
    return "?";
}

Pipeline parse_pipeline(std::string_view s)
{
    if (s == "rble" || s == "rble_full") return Pipeline::rble_full;
    if (s == "ble-if" || s == "ble_if_only") return Pipeline::ble_if_only;
    if (s == "ble-bb" || s == "ble_baseband_only") return Pipeline::ble_baseband_only;
    throw std::invalid_argument("unknown pipeline '" + std::string(s) + "'");
}

std::string_view to_string(Pipeline p)
{
    switch (p) {
    case Pipeline::rble_full: return "rble";
    case Pipeline::ble_if_only: return "ble-if";
    case Pipeline::ble_baseband_only: return "ble-bb";
    }
    return "?";
}

ble::Modulation parse_modulation(std::string_view s)
{
    // GMSK is GFSK at h = 0.5, the LE1M operating point.
    if (s == "gfsk" || s == "gmsk") return ble::Modulation::gfsk;
    if (s == "fsk2" || s == "fsk") return ble::Modulation::fsk2;
    throw std::invalid_argument("unknown modulation '" + std::string(s) + "'");
}

ble::LfsrKind parse_lfsr(std::string_view s)
{
    if (s == "spec7") return ble::LfsrKind::ble_spec_7bit;
    if (s == "paper9") return ble::LfsrKind::paper_9bit;
    throw std::invalid_argument("unknown LFSR kind '" + std::string(s) + "'");
}

dsp::PhaseMode parse_phase(std::string_view s)
{
    if (s == "continuous") return dsp::PhaseMode::continuous;
    if (s == "absolute") return dsp::PhaseMode::absolute_time;
    throw std::invalid_argument("unknown phase mode '" + std::string(s) + "'");
}

}  // namespace rble::harness
