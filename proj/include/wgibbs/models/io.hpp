#pragma once

// File formats for model inputs and artifacts.
//
//   PGM        plain (P2) or raw (P5) graymaps, maxval <= 65535. Spin images
//              are written as P5 with -1 -> 0 and +1 -> 255.
//   F32 image  16-byte header: 8-byte magic "WGIBF32\0", uint32 height,
//              uint32 width (little-endian), then height*width little-endian
//              IEEE float32 values in row-major order.
//   Corpus     one document per line, whitespace-separated integer word ids;
//              blank lines are empty documents.
//   Vocabulary one "<id> <token>" pair per line.

#include <filesystem>
#include <string>
#include <vector>

#include "wgibbs/models/image.hpp"
#include "wgibbs/models/lda.hpp"

namespace wgibbs {

inline constexpr char kFloatImageMagic[8] = {'W', 'G', 'I', 'B', 'F', '3', '2', '\0'};

// Pixel intensities as stored (0..maxval).
Image read_pgm(const std::filesystem::path& path, std::size_t* maxval = nullptr);
// Writes P5; values are rounded and clamped to [0, maxval].
void write_pgm(const std::filesystem::path& path, const Image& gray, int maxval = 255);
void write_spin_pgm(const std::filesystem::path& path, const Image& spins);
// Inverse of write_spin_pgm: intensities above maxval/2 map to +1.
Image read_spin_pgm(const std::filesystem::path& path);

void write_float_image(const std::filesystem::path& path, const Image& image);
Image read_float_image(const std::filesystem::path& path);

// vocabulary_size is max id + 1 unless a larger value is given.
Corpus read_corpus(const std::filesystem::path& path, std::size_t vocabulary_size = 0);
void write_corpus(const std::filesystem::path& path, const Corpus& corpus);
std::vector<std::string> read_vocabulary(const std::filesystem::path& path);

}  // namespace wgibbs
