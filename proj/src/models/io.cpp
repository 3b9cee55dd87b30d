#include "wgibbs/models/io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "wgibbs/error.hpp"

namespace wgibbs {
namespace {

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_io("cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw_io("cannot open '" + path.string() + "' for writing");
  return out;
}

// Next header token, skipping whitespace and '#' comments.
std::string pgm_token(std::istream& in) {
  std::string tok;
  int ch;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {
      while ((ch = in.get()) != EOF && ch != '\n') {
      }
      continue;
    }
    if (std::isspace(ch)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(ch));
  }
  return tok;
}

std::size_t pgm_number(std::istream& in, const std::filesystem::path& path) {
  const auto tok = pgm_token(in);
  if (tok.empty() || !std::all_of(tok.begin(), tok.end(), ::isdigit))
    throw_io("malformed PGM header in '" + path.string() + "'");
  return std::stoul(tok);
}

void put_u32(std::ostream& out, std::uint32_t v) {
  const std::array<unsigned char, 4> b{static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                                       static_cast<unsigned char>(v >> 16),
                                       static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b.data()), 4);
}

std::uint32_t get_u32(const unsigned char* b) {
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace

Image read_pgm(const std::filesystem::path& path, std::size_t* maxval_out) {
  auto in = open_in(path);
  const auto magic = pgm_token(in);
  if (magic != "P2" && magic != "P5") throw_io("'" + path.string() + "' is not a PGM file");
  const std::size_t width = pgm_number(in, path);
  const std::size_t height = pgm_number(in, path);
  const std::size_t maxval = pgm_number(in, path);
  if (width == 0 || height == 0 || maxval == 0 || maxval > 65535)
    throw_io("unsupported PGM dimensions in '" + path.string() + "'");
  if (maxval_out) *maxval_out = maxval;
  Image img(height, width);
  if (magic == "P2") {
    for (auto& v : img.pixels) {
      const auto tok = pgm_token(in);
      if (tok.empty()) throw_io("truncated PGM data in '" + path.string() + "'");
      v = std::stod(tok);
    }
  } else {
    const std::size_t bytes = maxval < 256 ? 1 : 2;
    std::vector<unsigned char> raw(img.size() * bytes);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size())
      throw_io("truncated PGM data in '" + path.string() + "'");
    for (std::size_t i = 0; i < img.size(); ++i)
      img.pixels[i] = bytes == 1 ? raw[i] : (raw[2 * i] << 8) | raw[2 * i + 1];
  }
  return img;
}

void write_pgm(const std::filesystem::path& path, const Image& gray, int maxval) {
  if (maxval <= 0 || maxval > 65535) throw_invalid("write_pgm: maxval out of range");
  auto out = open_out(path);
  out << "P5\n" << gray.width << ' ' << gray.height << '\n' << maxval << '\n';
  const bool wide = maxval > 255;
  for (double v : gray.pixels) {
    const auto q = static_cast<unsigned>(std::clamp(std::lround(v), 0L, static_cast<long>(maxval)));
    if (wide) out.put(static_cast<char>(q >> 8));
    out.put(static_cast<char>(q & 0xff));
  }
  if (!out) throw_io("write failed for '" + path.string() + "'");
}

void write_spin_pgm(const std::filesystem::path& path, const Image& spins) {
  Image gray = spins;
  for (auto& v : gray.pixels) v = v > 0.0 ? 255.0 : 0.0;
  write_pgm(path, gray, 255);
}

Image read_spin_pgm(const std::filesystem::path& path) {
  std::size_t maxval = 0;
  Image img = read_pgm(path, &maxval);
  const double mid = static_cast<double>(maxval) / 2.0;
  for (auto& v : img.pixels) v = v > mid ? 1.0 : -1.0;
  return img;
}

void write_float_image(const std::filesystem::path& path, const Image& image) {
  if (image.height > UINT32_MAX || image.width > UINT32_MAX)
    throw_invalid("write_float_image: image too large");
  auto out = open_out(path);
  out.write(kFloatImageMagic, sizeof kFloatImageMagic);
  put_u32(out, static_cast<std::uint32_t>(image.height));
  put_u32(out, static_cast<std::uint32_t>(image.width));
  for (double v : image.pixels) {
    const auto f = static_cast<float>(v);
    std::uint32_t bits;
    std::memcpy(&bits, &f, 4);
    put_u32(out, bits);
  }
  if (!out) throw_io("write failed for '" + path.string() + "'");
}

Image read_float_image(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::array<unsigned char, 16> header{};
  in.read(reinterpret_cast<char*>(header.data()), 16);
  if (in.gcount() != 16 || std::memcmp(header.data(), kFloatImageMagic, 8) != 0)
    throw_io("'" + path.string() + "' is not a float image container");
  Image img(get_u32(header.data() + 8), get_u32(header.data() + 12));
  std::vector<unsigned char> raw(img.size() * 4);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in.gcount()) != raw.size())
    throw_io("truncated float image '" + path.string() + "'");
  for (std::size_t i = 0; i < img.size(); ++i) {
    const std::uint32_t bits = get_u32(raw.data() + 4 * i);
    float f;
    std::memcpy(&f, &bits, 4);
    img.pixels[i] = f;
  }
  return img;
}

Corpus read_corpus(const std::filesystem::path& path, std::size_t vocabulary_size) {
  auto in = open_in(path);
  Corpus corpus;
  std::string line;
  std::size_t max_id = 0;
  bool any = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream words(line);
    std::vector<std::uint32_t> doc;
    std::string tok;
    while (words >> tok) {
      if (!std::all_of(tok.begin(), tok.end(), ::isdigit))
        throw_io("corpus '" + path.string() + "' line " + std::to_string(line_no) +
                 ": word ids must be nonnegative integers");
      const auto id = std::stoul(tok);
      if (id > UINT32_MAX) throw_io("corpus word id too large");
      doc.push_back(static_cast<std::uint32_t>(id));
      max_id = std::max<std::size_t>(max_id, id);
      any = true;
    }
    corpus.documents.push_back(std::move(doc));
  }
  corpus.vocabulary_size = std::max(vocabulary_size, any ? max_id + 1 : std::size_t{0});
  return corpus;
}

void write_corpus(const std::filesystem::path& path, const Corpus& corpus) {
  auto out = open_out(path);
  for (const auto& doc : corpus.documents) {
    for (std::size_t i = 0; i < doc.size(); ++i) out << (i ? " " : "") << doc[i];
    out << '\n';
  }
  if (!out) throw_io("write failed for '" + path.string() + "'");
}

std::vector<std::string> read_vocabulary(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::vector<std::string> vocab;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::size_t id;
    std::string token;
    if (!(fields >> id)) continue;
    if (!(fields >> token)) throw_io("vocabulary '" + path.string() + "': missing token");
    if (id >= vocab.size()) vocab.resize(id + 1);
    vocab[id] = token;
  }
  return vocab;
}

}  // namespace wgibbs
