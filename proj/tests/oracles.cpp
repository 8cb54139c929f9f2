#include "oracles.hpp"

#include <cmath>
#include <vector>

namespace oracles {

namespace {

using Complex = std::complex<double>;
constexpr double kPi = 3.14159265358979323846;

// FS density of a graph point (x, y, 1) with tangent (1, yp, 0),
// from ds^2 = [(1+|z|^2)|t|^2 - |<t,z>|^2]/(1+|z|^2)^2 with our
// normalization vol(CP^1) = pi.
double fs_graph_density(Complex x, Complex y, Complex yp) {
  double zz = 1.0 + std::norm(x) + std::norm(y);
  double tt = 1.0 + std::norm(yp);
  Complex tz = std::conj(x) + yp * std::conj(y);  // t.conj(z), t=(1,yp,0), z=(x,y,1)
  return (zz * tt - std::norm(tz)) / (zz * zz);
}

double smoothstep(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * t * (t * (t * 6.0 - 15.0) + 10.0);
}

}  // namespace

double fermat_curve_area(int d, double sign) {
  // curve y^d = w(x), w = -sign - x^d; branch points x_k = (-sign)^{1/d} zeta_d^k
  std::vector<Complex> branch;
  for (int k = 0; k < d; ++k) {
    Complex root = std::pow(Complex(-sign, 0.0), 1.0 / d) *
                   std::polar(1.0, 2.0 * kPi * k / d);
    branch.push_back(root);
  }
  const double r1 = 0.25, r2 = 0.45;
  const double Kcoef = std::pow(static_cast<double>(d), 2.0 / d) / (2.0 * d);
  const double sing_pow = 2.0 / d - 2.0;

  auto cutoff = [&](double rho) { return 1.0 - smoothstep((rho - r1) / (r2 - r1)); };

  auto branch_sum = [&](Complex x) {
    Complex w = Complex(-sign, 0.0) - std::pow(x, d);
    double total = 0.0;
    Complex y0 = std::pow(w, 1.0 / d);
    for (int b = 0; b < d; ++b) {
      Complex y = y0 * std::polar(1.0, 2.0 * kPi * b / d);
      Complex yp;
      if (std::abs(y) < 1e-14) {
        return 1e30;  // exactly at a branch point; the grid never lands here
      }
      yp = -std::pow(x / y, d - 1);
      total += fs_graph_density(x, y, yp);
    }
    return total;
  };

  auto regularized = [&](Complex x) {
    double f = branch_sum(x);
    if (d >= 2) {
      for (const auto& bk : branch) {
        double rho = std::abs(x - bk);
        if (rho < r2 && rho > 1e-14)
          f -= cutoff(rho) * Kcoef * std::pow(rho, sing_pow);
      }
    }
    return f;
  };

  // near field: polar midpoint grid on [0, 3]
  double total = 0.0;
  {
    const int nr = 2400, nt = 720;
    const double rmax = 3.0;
    for (int i = 0; i < nr; ++i) {
      double rho = rmax * (i + 0.5) / nr;
      double row = 0.0;
      for (int j = 0; j < nt; ++j) {
        double th = 2.0 * kPi * (j + 0.5) / nt;
        row += regularized(std::polar(rho, th));
      }
      total += row * rho * (rmax / nr) * (2.0 * kPi / nt);
    }
  }
  // far field: tau = 1/rho substitution on [3, 200]
  {
    const int nr = 500, nt = 240;
    const double R = 200.0;
    for (int i = 0; i < nr; ++i) {
      double tau = 1.0 / R + (1.0 / 3.0 - 1.0 / R) * (i + 0.5) / nr;
      double rho = 1.0 / tau;
      double row = 0.0;
      for (int j = 0; j < nt; ++j) {
        double th = 2.0 * kPi * (j + 0.5) / nt;
        row += branch_sum(std::polar(rho, th));
      }
      total += row * (1.0 / (tau * tau * tau)) * ((1.0 / 3.0 - 1.0 / R) / nr) * (2.0 * kPi / nt);
    }
  }
  // analytic tail beyond R: f ~ d/(2 rho^4)
  total += kPi * d / (2.0 * 200.0 * 200.0);

  // add back the subtracted singular parts (radial closed form + 1-D Simpson)
  if (d >= 2) {
    double radial = (d / 2.0) * std::pow(r1, 2.0 / d);
    const int ns = 4000;
    double h = (r2 - r1) / ns;
    double acc = 0.0;
    for (int i = 0; i <= ns; ++i) {
      double rho = r1 + h * i;
      double v = cutoff(rho) * std::pow(rho, 2.0 / d - 1.0);
      double wgt = (i == 0 || i == ns) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      acc += wgt * v;
    }
    radial += acc * h / 3.0;
    total += d * Kcoef * 2.0 * kPi * radial;
  }
  return total;
}

double line_area() {
  // y = 1 - x in the z = 1 chart; smooth graph, yp = -1
  double total = 0.0;
  const int nr = 1500, nt = 480;
  const double rmax = 3.0;
  for (int i = 0; i < nr; ++i) {
    double rho = rmax * (i + 0.5) / nr;
    double row = 0.0;
    for (int j = 0; j < nt; ++j) {
      double th = 2.0 * kPi * (j + 0.5) / nt;
      Complex x = std::polar(rho, th);
      row += fs_graph_density(x, 1.0 - x, Complex(-1.0, 0.0));
    }
    total += row * rho * (rmax / nr) * (2.0 * kPi / nt);
  }
  const int nr2 = 500, nt2 = 240;
  const double R = 400.0;
  for (int i = 0; i < nr2; ++i) {
    double tau = 1.0 / R + (1.0 / 3.0 - 1.0 / R) * (i + 0.5) / nr2;
    double rho = 1.0 / tau;
    double row = 0.0;
    for (int j = 0; j < nt2; ++j) {
      double th = 2.0 * kPi * (j + 0.5) / nt2;
      Complex x = std::polar(rho, th);
      row += fs_graph_density(x, 1.0 - x, Complex(-1.0, 0.0));
    }
    total += row * (1.0 / (tau * tau * tau)) * ((1.0 / 3.0 - 1.0 / R) / nr2) * (2.0 * kPi / nt2);
  }
  total += kPi * 1.0 / (2.0 * 400.0 * 400.0);
  return total;
}

double quartic_oval_length(std::size_t nodes) {
  // r(theta) = (cos^4 + sin^4)^{-1/4}; FS speed of (r cos, r sin, 1)
  auto speed = [&](double th) {
    double c = std::cos(th), s = std::sin(th);
    double q = c * c * c * c + s * s * s * s;
    double r = std::pow(q, -0.25);
    double dq = 4.0 * (c * c * c * (-s) + s * s * s * c);
    double dr = -0.25 * std::pow(q, -1.25) * dq;
    double vx = dr * c - r * s;
    double vy = dr * s + r * c;
    // ambient FS norm of v = (vx, vy, 0) at z = (r c, r s, 1)
    double zz = 1.0 + r * r;
    double vv = vx * vx + vy * vy;
    double vz = vx * r * c + vy * r * s;
    return std::sqrt((zz * vv - vz * vz) / (zz * zz));
  };
  double acc = 0.0;
  double h = 2.0 * kPi / nodes;
  for (std::size_t i = 0; i <= nodes; ++i) {
    double wgt = (i == 0 || i == nodes) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    acc += wgt * speed(h * i);
  }
  return acc * h / 3.0;
}

long riemann_roch_curve(long genus, int m) {
  if (m == 1) return genus;
  return (2 * m - 1) * (genus - 1);
}

long plane_curve_genus(int d) { return static_cast<long>(d - 1) * (d - 2) / 2; }

}  // namespace oracles
