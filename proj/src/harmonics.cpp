#include "isogap/harmonics.hpp"

#include <cmath>
#include <stdexcept>

namespace isogap {

namespace {

// sqrt(binom(n, k)) via lgamma; exact to ~1e-15 for the small orders used.
double sqrt_binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  return std::exp(0.5 * (std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                         std::lgamma(n - k + 1.0)));
}

// Jacobi polynomial P_k^{(a,b)}(x) by the three-term recurrence in the
// degree, stable on [-1, 1] for a, b >= 0.
double jacobi_p(int k, int a, int b, double x) {
  if (k == 0) return 1.0;
  double p0 = 1.0;
  double p1 = 0.5 * (a - b) + 0.5 * (a + b + 2.0) * x;
  for (int n = 2; n <= k; ++n) {
    double c = 2.0 * n + a + b;
    double a1 = 2.0 * n * (n + a + b) * (c - 2.0);
    double a2 = (c - 1.0) * (c * (c - 2.0) * x + static_cast<double>(a) * a -
                             static_cast<double>(b) * b);
    double a3 = 2.0 * (n + a - 1.0) * (n + b - 1.0) * c;
    double p2 = (a2 * p1 - a3 * p0) / a1;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

}  // namespace

Eigen::MatrixXd wigner_little_d(int l, double beta) {
  if (l < 0) throw std::invalid_argument("negative degree");
  int dim = 2 * l + 1;
  Eigen::MatrixXd d(dim, dim);
  double ch = std::cos(0.5 * beta);
  double sh = std::sin(0.5 * beta);
  for (int mp = -l; mp <= l; ++mp) {
    for (int m = -l; m <= l; ++m) {
      // Reduce to the Jacobi form with nonnegative exponents a, b.
      int k = std::min(std::min(l + m, l - m), std::min(l + mp, l - mp));
      int a, lambda;
      if (k == l + m) {
        a = mp - m;
        lambda = mp - m;
      } else if (k == l - m) {
        a = m - mp;
        lambda = 0;
      } else if (k == l + mp) {
        a = m - mp;
        lambda = 0;
      } else {
        a = mp - m;
        lambda = mp - m;
      }
      int b = 2 * l - 2 * k - a;
      double sign = (lambda % 2 == 0) ? 1.0 : -1.0;
      double coeff = sqrt_binom(2 * l - k, k + a) / sqrt_binom(k + b, b);
      d(mp + l, m + l) = sign * coeff * std::pow(sh, a) * std::pow(ch, b) *
                         jacobi_p(k, a, b, std::cos(beta));
    }
  }
  return d;
}

MatrixXcd wigner_d(int l, const EulerZyz& e) {
  Eigen::MatrixXd little = wigner_little_d(l, e.beta);
  int dim = 2 * l + 1;
  MatrixXcd out(dim, dim);
  for (int mp = -l; mp <= l; ++mp) {
    Complex row_phase = std::polar(1.0, -mp * e.alpha);
    for (int m = -l; m <= l; ++m) {
      out(mp + l, m + l) =
          row_phase * little(mp + l, m + l) * std::polar(1.0, -m * e.gamma);
    }
  }
  return out;
}

MatrixXcd wigner_d(int l, const Mat3& rotation) {
  return wigner_d(l, euler_zyz(rotation));
}

std::vector<MatrixXcd> wigner_d_stack(int band_limit, const Mat3& rotation) {
  EulerZyz e = euler_zyz(rotation);
  std::vector<MatrixXcd> stack;
  stack.reserve(band_limit + 1);
  for (int l = 0; l <= band_limit; ++l) stack.push_back(wigner_d(l, e));
  return stack;
}

void sh_eval(int band_limit, const Vec3& dir, Complex* out) {
  const int L = band_limit;
  double x = dir.z();
  double s = std::hypot(dir.x(), dir.y());
  double phi = (s > 0.0) ? std::atan2(dir.y(), dir.x()) : 0.0;

  // Fully normalized associated Legendre values Q_lm for m >= 0, scaled so
  // that (1/2) int_{-1}^{1} Q_lm^2 = 1; includes the Condon-Shortley sign.
  std::vector<double> q((L + 1) * (L + 2) / 2, 0.0);
  auto qi = [L](int l, int m) { return l * (l + 1) / 2 + m; };
  q[qi(0, 0)] = 1.0;
  for (int m = 1; m <= L; ++m) {
    q[qi(m, m)] =
        -std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s * q[qi(m - 1, m - 1)];
  }
  for (int m = 0; m < L; ++m) {
    q[qi(m + 1, m)] = std::sqrt(2.0 * m + 3.0) * x * q[qi(m, m)];
  }
  for (int m = 0; m <= L; ++m) {
    for (int l = m + 2; l <= L; ++l) {
      double a = std::sqrt((4.0 * l * l - 1.0) /
                           (static_cast<double>(l) * l - static_cast<double>(m) * m));
      double b = std::sqrt(((2.0 * l + 1.0) * ((l - 1.0) * (l - 1.0) - static_cast<double>(m) * m)) /
                           ((2.0 * l - 3.0) * (static_cast<double>(l) * l - static_cast<double>(m) * m)));
      q[qi(l, m)] = a * x * q[qi(l - 1, m)] - b * q[qi(l - 2, m)];
    }
  }

  for (int l = 0; l <= L; ++l) {
    out[sh_index(l, 0)] = Complex(q[qi(l, 0)], 0.0);
    for (int m = 1; m <= l; ++m) {
      Complex e = std::polar(1.0, m * phi);
      Complex val = q[qi(l, m)] * e;
      out[sh_index(l, m)] = val;
      double parity = (m % 2 == 0) ? 1.0 : -1.0;
      out[sh_index(l, -m)] = parity * std::conj(val);
    }
  }
}

std::vector<Complex> sh_eval(int band_limit, const Vec3& dir) {
  std::vector<Complex> out(sh_count(band_limit));
  sh_eval(band_limit, dir, out.data());
  return out;
}

double legendre_p(int l, double x) {
  if (l == 0) return 1.0;
  double p0 = 1.0, p1 = x;
  for (int n = 2; n <= l; ++n) {
    double p2 = ((2.0 * n - 1.0) * x * p1 - (n - 1.0) * p0) / n;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

double bessel_j(int l, double t) {
  if (l < 0) throw std::invalid_argument("negative Bessel order");
  double sign = 1.0;
  if (t < 0.0) {
    t = -t;
    if (l % 2 == 1) sign = -1.0;
  }
  if (t == 0.0) return l == 0 ? 1.0 : 0.0;
  if (l == 0) return sign * std::sin(t) / t;
  if (l == 1) {
    if (t < 1e-4) {
      // Series keeps full relative accuracy where sin/cos cancel.
      double t2 = t * t;
      return sign * (t / 3.0) * (1.0 - t2 / 10.0 * (1.0 - t2 / 28.0));
    }
    return sign * (std::sin(t) / (t * t) - std::cos(t) / t);
  }
  return sign * std::sph_bessel(static_cast<unsigned>(l), t);
}

}  // namespace isogap
