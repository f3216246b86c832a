#include "posecal/mask.hpp"

#include <fstream>
#include <sstream>

#include "posecal/errors.hpp"

namespace posecal {

SilhouetteMask SilhouetteMask::zeros(int width, int height) {
  if (width < 1 || height < 1) {
    throw InvalidInputError("mask dimensions must be positive");
  }
  SilhouetteMask mask;
  mask.width = width;
  mask.height = height;
  mask.bits.assign(static_cast<std::size_t>(width) * height, 0);
  return mask;
}

namespace {

// Reads the next whitespace/comment-delimited token of a PBM header.
std::string next_token(std::istream& in) {
  std::string token;
  char c;
  while (in.get(c)) {
    if (c == '#') {
      std::string comment;
      std::getline(in, comment);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!token.empty()) return token;
      continue;
    }
    token.push_back(c);
  }
  return token;
}

}  // namespace

SilhouetteMask load_mask_pbm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ParseError("cannot open mask file: " + path);
  }
  const std::string magic = next_token(in);
  if (magic != "P1" && magic != "P4") {
    throw ParseError("not a PBM file (P1/P4): " + path);
  }
  int width = 0, height = 0;
  try {
    width = std::stoi(next_token(in));
    height = std::stoi(next_token(in));
  } catch (const std::exception&) {
    throw ParseError("malformed PBM header: " + path);
  }
  SilhouetteMask mask = SilhouetteMask::zeros(width, height);

  if (magic == "P1") {
    std::size_t i = 0;
    char c;
    while (i < mask.bits.size() && in.get(c)) {
      if (c == '#') {
        std::string comment;
        std::getline(in, comment);
        continue;
      }
      if (c == '0' || c == '1') {
        mask.bits[i++] = (c == '1') ? 1 : 0;
      } else if (!std::isspace(static_cast<unsigned char>(c))) {
        throw ParseError("unexpected character in P1 data: " + path);
      }
    }
    if (i != mask.bits.size()) {
      throw ParseError("truncated P1 data: " + path);
    }
  } else {
    // P4: the header ends with exactly one whitespace byte (consumed by
    // next_token), rows are packed MSB-first and padded to whole bytes.
    const int row_bytes = (width + 7) / 8;
    std::vector<char> row(static_cast<std::size_t>(row_bytes));
    for (int y = 0; y < height; ++y) {
      if (!in.read(row.data(), row_bytes)) {
        throw ParseError("truncated P4 data: " + path);
      }
      for (int x = 0; x < width; ++x) {
        const auto byte = static_cast<unsigned char>(row[x / 8]);
        mask.set(x, y, (byte >> (7 - x % 8)) & 1);
      }
    }
  }
  return mask;
}

void save_mask_pbm(const SilhouetteMask& mask, const std::string& path,
                   bool ascii) {
  if (mask.width < 1 || mask.height < 1 ||
      mask.bits.size() !=
          static_cast<std::size_t>(mask.width) * mask.height) {
    throw InvalidInputError("cannot save malformed mask");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ParseError("cannot write mask file: " + path);
  }
  if (ascii) {
    out << "P1\n" << mask.width << " " << mask.height << "\n";
    for (int y = 0; y < mask.height; ++y) {
      for (int x = 0; x < mask.width; ++x) {
        out << (mask.at(x, y) ? '1' : '0');
        out << (x + 1 == mask.width ? '\n' : ' ');
      }
    }
  } else {
    out << "P4\n" << mask.width << " " << mask.height << "\n";
    const int row_bytes = (mask.width + 7) / 8;
    std::vector<char> row(static_cast<std::size_t>(row_bytes));
    for (int y = 0; y < mask.height; ++y) {
      std::fill(row.begin(), row.end(), 0);
      for (int x = 0; x < mask.width; ++x) {
        if (mask.at(x, y)) {
          row[x / 8] |= static_cast<char>(1 << (7 - x % 8));
        }
      }
      out.write(row.data(), row_bytes);
    }
  }
}

}  // namespace posecal
