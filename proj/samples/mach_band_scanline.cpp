// Prints a scanline with a smooth ramp and a step edge, the perceived values
// the model predicts for it (Mach bands at the ramp ends, halos at the step),
// and the compensated excitation that cancels them.
//
//   ./mach_band_scanline > scanline.csv

#include <cmath>
#include <cstdio>

#include "latcomp/latcomp.hpp"

int main() {
  using namespace latcomp;

  constexpr std::size_t width = 400, height = 8;
  PixelPlane luminance(width, height);
  for (std::size_t x = 0; x < width; ++x) {
    double v = 0.1;
    if (x >= 80 && x < 160) v = 0.1 + 0.4 * double(x - 80) / 80.0;
    else if (x >= 160 && x < 280) v = 0.5;
    else if (x >= 280) v = 0.9;
    for (std::size_t y = 0; y < height; ++y) luminance(x, y) = v;
  }

  InhibitionParams params;
  params.sigma_px = sigma_from_geometry({30.0, 94.0}) / 2.0;
  const DiscreteKernel k = build_kernel(params);

  const CompressionFn phi{1e-4};
  const PixelPlane target = compress(luminance, phi);
  const PixelPlane perceived = perceive_achromatic(target, k);
  const PixelPlane compensated = compensate_achromatic(target, k);
  const PixelPlane check = perceive_achromatic(compensated, k);

  std::printf("x,input,perceived,compensated,perceived_compensated\n");
  const std::size_t y = height / 2;
  for (std::size_t x = 0; x < width; ++x)
    std::printf("%zu,%.8f,%.8f,%.8f,%.8f\n", x, target(x, y), perceived(x, y),
                compensated(x, y), check(x, y));
  return 0;
}
