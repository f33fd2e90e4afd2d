#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "scramble/image_io.hpp"
#include "scramble/raster.hpp"

namespace testsupport {

inline std::filesystem::path data_dir() { return SCRAMBLE_TEST_DATA; }

inline scramble::RasterImage random_image(std::mt19937& rng, int w, int h, int channels) {
  scramble::RasterImage img(w, h, channels);
  std::uniform_int_distribution<int> dist(0, 255);
  for (auto& s : img.mutable_samples()) s = static_cast<std::uint8_t>(dist(rng));
  return img;
}

// Smooth synthetic content: gradients plus a few sinusoids.
inline scramble::RasterImage smooth_image(std::mt19937& rng, int w, int h, int channels) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  scramble::RasterImage img(w, h, channels);
  for (int c = 0; c < channels; ++c) {
    const double fx = 0.02 + 0.1 * u(rng);
    const double fy = 0.02 + 0.1 * u(rng);
    const double phase = 6.28 * u(rng);
    const double base = 60 + 120 * u(rng);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const double v = base + 50 * std::sin(fx * x + phase) * std::cos(fy * y) + 0.3 * (x - y);
        img.set(x, y, c, static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0)));
      }
    }
  }
  return img;
}

inline std::vector<std::filesystem::path> corpus(const std::string& name) {
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(data_dir() / name)) {
    if (e.path().extension() == ".png") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace testsupport
