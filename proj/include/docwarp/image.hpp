#pragma once

// Binary/grayscale document images with Netpbm (PBM P1/P4, PGM P2/P5) I/O.
// Foreground = ink = PBM value 1. Pixels are row-major, top-left origin.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace docwarp {

class ImageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class FileNotFoundError : public ImageError {
public:
  explicit FileNotFoundError(const std::string& path)
      : ImageError("file not found: " + path) {}
};

class MalformedHeaderError : public ImageError {
public:
  explicit MalformedHeaderError(const std::string& what)
      : ImageError("malformed PNM header: " + what) {}
};

class TruncatedPayloadError : public ImageError {
public:
  explicit TruncatedPayloadError(const std::string& what)
      : ImageError("truncated PNM payload: " + what) {}
};

class IoError : public ImageError {
public:
  explicit IoError(const std::string& what) : ImageError("I/O error: " + what) {}
};

class BinaryImage {
public:
  BinaryImage(int rows, int cols, bool foreground = false)
      : rows_(rows), cols_(cols),
        pix_(static_cast<std::size_t>(rows) * cols, foreground ? 1 : 0) {
    if (rows < 1 || cols < 1)
      throw std::invalid_argument("BinaryImage: rows and cols must be >= 1");
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  bool foreground(int r, int c) const { return pix_[idx(r, c)] != 0; }
  void set(int r, int c, bool fg) { pix_[idx(r, c)] = fg ? 1 : 0; }

  bool in_bounds(int r, int c) const {
    return r >= 0 && r < rows_ && c >= 0 && c < cols_;
  }

  std::size_t foreground_count() const {
    std::size_t n = 0;
    for (auto p : pix_) n += p;
    return n;
  }

  bool operator==(const BinaryImage&) const = default;

private:
  std::size_t idx(int r, int c) const {
    return static_cast<std::size_t>(r) * cols_ + c;
  }

  int rows_;
  int cols_;
  std::vector<std::uint8_t> pix_;
};

class GrayImage {
public:
  GrayImage(int rows, int cols, std::uint8_t value = 0)
      : rows_(rows), cols_(cols),
        pix_(static_cast<std::size_t>(rows) * cols, value) {
    if (rows < 1 || cols < 1)
      throw std::invalid_argument("GrayImage: rows and cols must be >= 1");
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  std::uint8_t at(int r, int c) const {
    return pix_[static_cast<std::size_t>(r) * cols_ + c];
  }
  void set(int r, int c, std::uint8_t v) {
    pix_[static_cast<std::size_t>(r) * cols_ + c] = v;
  }

  bool operator==(const GrayImage&) const = default;

private:
  int rows_;
  int cols_;
  std::vector<std::uint8_t> pix_;
};

using AnyImage = std::variant<BinaryImage, GrayImage>;

/// Fixed-threshold binarization: intensity < t becomes ink.
inline BinaryImage threshold(const GrayImage& img, int t = 128) {
  BinaryImage out(img.rows(), img.cols());
  for (int r = 0; r < img.rows(); ++r)
    for (int c = 0; c < img.cols(); ++c)
      out.set(r, c, img.at(r, c) < t);
  return out;
}

namespace detail {

// Skips whitespace and '#' comments, then reads one unsigned decimal token.
inline int next_pnm_int(std::istream& in, const char* what) {
  for (;;) {
    int ch = in.peek();
    if (ch == EOF)
      throw MalformedHeaderError(std::string("unexpected EOF before ") + what);
    if (ch == '#') {
      std::string line;
      std::getline(in, line);
    } else if (std::isspace(ch)) {
      in.get();
    } else {
      break;
    }
  }
  long long v = 0;
  if (!(in >> v) || v < 0)
    throw MalformedHeaderError(std::string("expected nonnegative integer for ") + what);
  if (v > 1'000'000)
    throw MalformedHeaderError(std::string("implausibly large value for ") + what);
  return static_cast<int>(v);
}

}  // namespace detail

/// Loads a PBM (P1/P4) as BinaryImage or a PGM (P2/P5) as GrayImage.
inline AnyImage load_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileNotFoundError(path.string());

  std::string magic;
  in >> magic;
  if (magic != "P1" && magic != "P4" && magic != "P2" && magic != "P5")
    throw MalformedHeaderError("unsupported magic '" + magic + "'");

  const bool bitmap = (magic == "P1" || magic == "P4");
  const bool ascii = (magic == "P1" || magic == "P2");

  int cols = detail::next_pnm_int(in, "width");
  int rows = detail::next_pnm_int(in, "height");
  if (cols < 1 || rows < 1) throw MalformedHeaderError("zero image dimension");

  int maxval = 255;
  if (!bitmap) {
    maxval = detail::next_pnm_int(in, "maxval");
    if (maxval < 1 || maxval > 255)
      throw MalformedHeaderError("unsupported maxval " + std::to_string(maxval));
  }

  if (bitmap) {
    BinaryImage img(rows, cols);
    if (ascii) {
      for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
          int ch;
          do {
            ch = in.get();
            if (ch == '#') {
              std::string line;
              std::getline(in, line);
              ch = '\n';
            }
          } while (ch != EOF && std::isspace(ch));
          if (ch == EOF) throw TruncatedPayloadError("P1 pixel data ended early");
          if (ch != '0' && ch != '1')
            throw TruncatedPayloadError("P1 pixel must be 0 or 1");
          img.set(r, c, ch == '1');
        }
      // extra payload tokens mean the header lied about the size
      int ch = in.get();
      while (ch != EOF && std::isspace(ch)) ch = in.get();
      if (ch == '0' || ch == '1')
        throw TruncatedPayloadError("P1 payload longer than header dimensions");
    } else {
      // single whitespace byte after the header, then packed rows MSB-first
      int ch = in.get();
      if (ch == EOF || !std::isspace(ch))
        throw MalformedHeaderError("missing separator after P4 header");
      const int row_bytes = (cols + 7) / 8;
      std::vector<char> buf(row_bytes);
      for (int r = 0; r < rows; ++r) {
        in.read(buf.data(), row_bytes);
        if (in.gcount() != row_bytes)
          throw TruncatedPayloadError("P4 row " + std::to_string(r) + " incomplete");
        for (int c = 0; c < cols; ++c) {
          const unsigned byte = static_cast<unsigned char>(buf[c / 8]);
          img.set(r, c, (byte >> (7 - c % 8)) & 1u);
        }
      }
    }
    return img;
  }

  GrayImage img(rows, cols);
  if (ascii) {
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) {
        long long v;
        if (!(in >> v)) throw TruncatedPayloadError("P2 pixel data ended early");
        if (v < 0 || v > maxval)
          throw TruncatedPayloadError("P2 pixel out of range");
        img.set(r, c, static_cast<std::uint8_t>(v * 255 / maxval));
      }
  } else {
    int ch = in.get();
    if (ch == EOF || !std::isspace(ch))
      throw MalformedHeaderError("missing separator after P5 header");
    std::vector<char> buf(cols);
    for (int r = 0; r < rows; ++r) {
      in.read(buf.data(), cols);
      if (in.gcount() != cols)
        throw TruncatedPayloadError("P5 row " + std::to_string(r) + " incomplete");
      for (int c = 0; c < cols; ++c) {
        const int v = static_cast<unsigned char>(buf[c]);
        img.set(r, c, static_cast<std::uint8_t>(v * 255 / maxval));
      }
    }
  }
  return img;
}

inline BinaryImage load_binary_image(const std::filesystem::path& path) {
  AnyImage any = load_image(path);
  if (auto* bin = std::get_if<BinaryImage>(&any)) return *bin;
  return threshold(std::get<GrayImage>(any));
}

/// Writes a P4 PBM with a single-space-separated header.
inline void save_image(const BinaryImage& img, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << "P4 " << img.cols() << " " << img.rows() << "\n";
  const int row_bytes = (img.cols() + 7) / 8;
  std::vector<char> buf(row_bytes);
  for (int r = 0; r < img.rows(); ++r) {
    std::fill(buf.begin(), buf.end(), 0);
    for (int c = 0; c < img.cols(); ++c)
      if (img.foreground(r, c)) buf[c / 8] |= static_cast<char>(0x80u >> (c % 8));
    out.write(buf.data(), row_bytes);
  }
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace docwarp
