#include "tvcs/phantom.hpp"

#include <cmath>
#include <stdexcept>

namespace tvcs {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

struct Ellipse {
  double value, a, b, x0, y0, phi_deg;
};

struct Ellipsoid {
  double value, a, b, c, x0, y0, z0, phi_deg;
};

// Classical ten-ellipse table; intensities sum to 2 at the brightest shell.
constexpr Ellipse k2d[10] = {
    {2.00, 0.6900, 0.9200, 0.00, 0.0000, 0},
    {-0.98, 0.6624, 0.8740, 0.00, -0.0184, 0},
    {-0.02, 0.1100, 0.3100, 0.22, 0.0000, -18},
    {-0.02, 0.1600, 0.4100, -0.22, 0.0000, 18},
    {0.01, 0.2100, 0.2500, 0.00, 0.3500, 0},
    {0.01, 0.0460, 0.0460, 0.00, 0.1000, 0},
    {0.01, 0.0460, 0.0460, 0.00, -0.1000, 0},
    {0.01, 0.0460, 0.0230, -0.08, -0.6050, 0},
    {0.01, 0.0230, 0.0230, 0.00, -0.6060, 0},
    {0.01, 0.0230, 0.0460, 0.06, -0.6050, 0},
};

// Standard extrusion of the same table with z semi-axes and offsets.
constexpr Ellipsoid k3d[10] = {
    {2.00, 0.6900, 0.9200, 0.810, 0.00, 0.0000, 0.000, 0},
    {-0.98, 0.6624, 0.8740, 0.780, 0.00, -0.0184, 0.000, 0},
    {-0.02, 0.1100, 0.3100, 0.220, 0.22, 0.0000, 0.000, -18},
    {-0.02, 0.1600, 0.4100, 0.280, -0.22, 0.0000, 0.000, 18},
    {0.01, 0.2100, 0.2500, 0.410, 0.00, 0.3500, -0.150, 0},
    {0.01, 0.0460, 0.0460, 0.050, 0.00, 0.1000, 0.250, 0},
    {0.01, 0.0460, 0.0460, 0.050, 0.00, -0.1000, 0.250, 0},
    {0.01, 0.0460, 0.0230, 0.050, -0.08, -0.6050, 0.000, 0},
    {0.01, 0.0230, 0.0230, 0.020, 0.00, -0.6060, 0.000, 0},
    {0.01, 0.0230, 0.0460, 0.020, 0.06, -0.6050, 0.000, 0},
};

// Pixel centers at -1 + (2j+1)/n: index j and n-1-j map to +-x exactly.
double center(int j, int n) { return -1.0 + (2.0 * j + 1.0) / n; }

void normalize_to_unit_max(Image<double>& u) {
  double m = 0;
  for (double x : u.v) m = std::max(m, x);
  if (m > 0)
    for (double& x : u.v) x /= m;
}

}  // namespace

Phantom shepp_logan(const GridShape& shape) {
  if (shape.d != 2 && shape.d != 3)
    throw std::invalid_argument("shepp_logan: d must be 2 or 3");
  Phantom ph;
  ph.image = Image<double>(shape);
  ph.name = shape.d == 2 ? "shepp-logan-2d" : "shepp-logan-3d";
  ph.variant = shape.d == 2 ? "classical-10-ellipse-max1" : "classical-10-ellipsoid-max1";

  if (shape.d == 2) {
    for (int j1 = 0; j1 < shape.n[1]; ++j1) {
      double y = center(j1, shape.n[1]);
      for (int j0 = 0; j0 < shape.n[0]; ++j0) {
        double x = center(j0, shape.n[0]);
        double val = 0;
        for (const Ellipse& e : k2d) {
          double phi = e.phi_deg * kPi / 180.0;
          double dx = x - e.x0, dy = y - e.y0;
          double xr = dx * std::cos(phi) + dy * std::sin(phi);
          double yr = -dx * std::sin(phi) + dy * std::cos(phi);
          if (xr * xr / (e.a * e.a) + yr * yr / (e.b * e.b) <= 1.0) val += e.value;
        }
        ph.image.v[shape.flat(j0, j1)] = val;
      }
    }
  } else {
    for (int j2 = 0; j2 < shape.n[2]; ++j2) {
      double z = center(j2, shape.n[2]);
      for (int j1 = 0; j1 < shape.n[1]; ++j1) {
        double y = center(j1, shape.n[1]);
        for (int j0 = 0; j0 < shape.n[0]; ++j0) {
          double x = center(j0, shape.n[0]);
          double val = 0;
          for (const Ellipsoid& e : k3d) {
            double phi = e.phi_deg * kPi / 180.0;
            double dx = x - e.x0, dy = y - e.y0, dz = z - e.z0;
            double xr = dx * std::cos(phi) + dy * std::sin(phi);
            double yr = -dx * std::sin(phi) + dy * std::cos(phi);
            if (xr * xr / (e.a * e.a) + yr * yr / (e.b * e.b) + dz * dz / (e.c * e.c) <= 1.0)
              val += e.value;
          }
          ph.image.v[shape.flat(j0, j1, j2)] = val;
        }
      }
    }
  }
  normalize_to_unit_max(ph.image);
  return ph;
}

Phantom staircase_1d(int n) {
  if (n < 4) throw std::invalid_argument("staircase_1d: n must be at least 4");
  GridShape s({n});
  Phantom ph;
  ph.image = Image<double>(s);
  ph.name = "staircase-1d";
  ph.variant = "four-plateaus";
  const double levels[4] = {0.0, 1.0, 0.25, 0.75};
  for (int j = 0; j < n; ++j) ph.image.v[j] = levels[(4 * j) / n];
  return ph;
}

}  // namespace tvcs
