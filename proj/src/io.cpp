#include "subfreq/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace subfreq {

std::string format_g17(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

namespace {

void require_2d(const GridDomain& domain, const char* what) {
  if (domain.dim() != 2) {
    throw std::invalid_argument(std::string(what) + ": requires a 2D domain");
  }
}

void write_pgm(std::ostream& os, const std::vector<unsigned char>& pixels,
               std::size_t width, std::size_t height, bool binary) {
  os << (binary ? "P5" : "P2") << "\n" << width << " " << height << "\n255\n";
  if (binary) {
    os.write(reinterpret_cast<const char*>(pixels.data()),
             static_cast<std::streamsize>(pixels.size()));
  } else {
    for (std::size_t r = 0; r < height; ++r) {
      for (std::size_t c = 0; c < width; ++c) {
        if (c) os << ' ';
        os << static_cast<int>(pixels[r * width + c]);
      }
      os << '\n';
    }
  }
}

} // namespace

void write_mask_pgm(const GridDomain& domain, const std::string& path,
                    bool binary) {
  require_2d(domain, "write_mask_pgm");
  const std::size_t height = domain.shape()[0];
  const std::size_t width = domain.shape()[1];
  std::vector<unsigned char> pixels(width * height);
  for (std::size_t r = 0; r < height; ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      pixels[r * width + c] =
          domain.interior(r * domain.stride(0) + c) ? 255 : 0;
    }
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("write_mask_pgm: cannot open " + path);
  write_pgm(os, pixels, width, height, binary);
}

DomainPtr read_mask_pgm(const std::string& path,
                        std::vector<std::array<double, 2>> bounds) {
  if (bounds.size() != 2) {
    throw std::invalid_argument("read_mask_pgm: need 2D bounds");
  }
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("read_mask_pgm: cannot open " + path);

  std::string magic;
  is >> magic;
  if (magic != "P2" && magic != "P5") {
    throw std::runtime_error("read_mask_pgm: not a P2/P5 greymap");
  }
  auto next_token = [&is]() {
    std::string tok;
    while (is >> tok) {
      if (tok[0] == '#') {
        std::string line;
        std::getline(is, line);
        continue;
      }
      return tok;
    }
    throw std::runtime_error("read_mask_pgm: truncated header");
  };
  const std::size_t width = std::stoul(next_token());
  const std::size_t height = std::stoul(next_token());
  const int maxval = std::stoi(next_token());
  if (maxval <= 0 || maxval > 255) {
    throw std::runtime_error("read_mask_pgm: unsupported maxval");
  }

  std::vector<int> pixels(width * height);
  if (magic == "P5") {
    is.get(); // single whitespace after maxval
    std::vector<unsigned char> raw(width * height);
    is.read(reinterpret_cast<char*>(raw.data()),
            static_cast<std::streamsize>(raw.size()));
    if (!is) throw std::runtime_error("read_mask_pgm: truncated raster");
    for (std::size_t i = 0; i < raw.size(); ++i) pixels[i] = raw[i];
  } else {
    for (auto& px : pixels) {
      px = std::stoi(next_token());
    }
  }

  std::vector<std::uint8_t> mask(width * height, 0);
  for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = pixels[i] > 127;
  return std::make_shared<GridDomain>(std::move(bounds),
                                      std::vector<std::size_t>{height, width},
                                      std::move(mask));
}

void write_function_pgm(const GridFunction& f, const std::string& path,
                        bool binary) {
  const GridDomain& domain = *f.domain();
  if (domain.dim() != 2 && domain.dim() != 3) {
    throw std::invalid_argument("write_function_pgm: requires a 2D or 3D domain");
  }
  const std::size_t height = domain.shape()[0];
  const std::size_t width = domain.shape()[1];
  const std::size_t slice =
      domain.dim() == 3 ? domain.shape()[2] / 2 : 0;

  double lo = 0.0, hi = 0.0;
  bool first = true;
  auto value_at = [&](std::size_t r, std::size_t c) {
    std::size_t flat = r * domain.stride(0) + c * domain.stride(1);
    if (domain.dim() == 3) flat += slice * domain.stride(2);
    return f[flat];
  };
  for (std::size_t r = 0; r < height; ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      const double v = value_at(r, c);
      lo = first ? v : std::min(lo, v);
      hi = first ? v : std::max(hi, v);
      first = false;
    }
  }
  const double span = hi - lo;

  std::vector<unsigned char> pixels(width * height, 0);
  for (std::size_t r = 0; r < height; ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      const double v = value_at(r, c);
      const double t = span > 0.0 ? (v - lo) / span : 0.0;
      pixels[r * width + c] =
          static_cast<unsigned char>(std::lround(255.0 * t));
    }
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("write_function_pgm: cannot open " + path);
  write_pgm(os, pixels, width, height, binary);
}

void write_function_csv(const GridFunction& f, const std::string& path) {
  const GridDomain& domain = *f.domain();
  const std::size_t d = domain.dim();
  if (d < 1 || d > 3) {
    throw std::invalid_argument("write_function_csv: supports 1D..3D");
  }
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_function_csv: cannot open " + path);

  static const char* kIndexNames[] = {"i", "j", "k"};
  for (std::size_t j = 0; j < d; ++j) os << kIndexNames[j] << ',';
  for (std::size_t j = 0; j < d; ++j) os << 'x' << (j + 1) << ',';
  os << "value\n";

  std::vector<std::size_t> idx(d);
  for (std::size_t flat = 0; flat < domain.num_nodes(); ++flat) {
    domain.unflatten(flat, idx);
    for (std::size_t j = 0; j < d; ++j) os << idx[j] << ',';
    for (std::size_t j = 0; j < d; ++j) {
      os << format_g17(domain.coordinate(j, idx[j])) << ',';
    }
    os << format_g17(f[flat]) << '\n';
  }
}

} // namespace subfreq
