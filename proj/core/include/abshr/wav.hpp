#pragma once

#include <filesystem>

#include "abshr/audio.hpp"

namespace abshr {

enum class WavEncoding { pcm16, float32 };

/// Mono WAV reader. PCM16 is scaled by 1/32768; IEEE float32 is taken as is.
/// Multi-channel or other encodings throw IoError naming the file.
AudioSegment read_wav(const std::filesystem::path& path);

void write_wav(const std::filesystem::path& path, const AudioSegment& segment,
               WavEncoding encoding = WavEncoding::float32);

}  // namespace abshr
