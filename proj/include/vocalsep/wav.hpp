#pragma once

#include "vocalsep/spectrogram.hpp"

#include <filesystem>

namespace vocalsep {

struct WavReadOptions {
  bool mixdown = false;  // average channels instead of rejecting multichannel input
};

/// Reads 16-bit PCM or 32-bit float RIFF/WAVE files (WAVE_FORMAT_EXTENSIBLE included).
AudioSignal read_wav(const std::filesystem::path& path, const WavReadOptions& options = {});

enum class WavSampleFormat { float32, pcm16 };

void write_wav(const std::filesystem::path& path, const AudioSignal& signal,
               WavSampleFormat format = WavSampleFormat::float32);

}  // namespace vocalsep
