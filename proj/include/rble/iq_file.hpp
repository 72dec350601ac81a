#pragma once

#include "rble/dsp.hpp"

#include <filesystem>
#include <string>

namespace rble::dsp {

// Sample data is interleaved little-endian float32 (I, Q). The sidecar at
// `<path>.meta` holds key:value lines: sample_rate_hz, center_freq_hz,
// num_samples and sample_format (complex | real). Real waveforms are written
// with Q = 0.
struct IqFileInfo {
    double sample_rate_hz = 0.0;
    double center_freq_hz = 0.0;
    std::size_t num_samples = 0;
    bool real = false;
};

std::filesystem::path sidecar_path(const std::filesystem::path& iq_path);

void write_iq_file(const std::filesystem::path& path, const ComplexWaveform& w);
void write_iq_file(const std::filesystem::path& path, const RealWaveform& w);

IqFileInfo read_iq_metadata(const std::filesystem::path& iq_path);
ComplexWaveform read_iq_file(const std::filesystem::path& path);

// First row: corner label then the frequency axis; each following row starts
// with the frame time.
void write_spectrogram_csv(const std::filesystem::path& path, const Spectrogram& s);

}  // namespace rble::dsp
