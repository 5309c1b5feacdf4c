#pragma once

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <stdexcept>
#include <vector>

namespace relq {

// Real polynomial in theta, coefficients in ascending degree. Coefficient
// families restrict the degree to <= 4 so derivative roots stay closed-form.
class Polynomial {
 public:
  Polynomial() : coeffs_{0.0} {}
  Polynomial(std::initializer_list<double> c) : coeffs_(c) { normalize(); }
  explicit Polynomial(std::vector<double> c) : coeffs_(std::move(c)) {
    normalize();
  }

  static Polynomial constant(double c) { return Polynomial{c}; }

  double operator()(double x) const {
    double acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it)
      acc = acc * x + *it;
    return acc;
  }

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<double>& coefficients() const { return coeffs_; }

  bool is_constant() const { return coeffs_.size() == 1; }

  Polynomial derivative() const {
    if (coeffs_.size() <= 1) return Polynomial{0.0};
    std::vector<double> d(coeffs_.size() - 1);
    for (std::size_t i = 1; i < coeffs_.size(); ++i)
      d[i - 1] = coeffs_[i] * static_cast<double>(i);
    return Polynomial(std::move(d));
  }

  // Real roots in [lo, hi], used to add stationary points of the coefficient
  // polynomials to assumption-check grids. Degree <= 3 only.
  std::vector<double> real_roots_in(double lo, double hi) const;

 private:
  void normalize() {
    while (coeffs_.size() > 1 && coeffs_.back() == 0.0) coeffs_.pop_back();
    if (coeffs_.empty()) coeffs_.push_back(0.0);
  }

  std::vector<double> coeffs_;
};

inline std::vector<double> Polynomial::real_roots_in(double lo,
                                                     double hi) const {
  std::vector<double> roots;
  auto keep = [&](double r) {
    if (std::isfinite(r) && r >= lo && r <= hi) roots.push_back(r);
  };
  const auto& c = coeffs_;
  switch (degree()) {
    case 0:
      break;
    case 1:
      keep(-c[0] / c[1]);
      break;
    case 2: {
      const double disc = c[1] * c[1] - 4.0 * c[2] * c[0];
      if (disc >= 0.0) {
        const double sq = std::sqrt(disc);
        keep((-c[1] + sq) / (2.0 * c[2]));
        keep((-c[1] - sq) / (2.0 * c[2]));
      }
      break;
    }
    case 3: {
      // Depressed-cubic trigonometric/Cardano solution.
      const double a = c[2] / c[3], b = c[1] / c[3], d = c[0] / c[3];
      const double p = b - a * a / 3.0;
      const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + d;
      const double shift = -a / 3.0;
      const double disc = q * q / 4.0 + p * p * p / 27.0;
      if (disc > 0.0) {
        const double sq = std::sqrt(disc);
        const double u = std::cbrt(-q / 2.0 + sq);
        const double v = std::cbrt(-q / 2.0 - sq);
        keep(u + v + shift);
      } else {
        const double r = std::sqrt(std::max(0.0, -p * p * p / 27.0));
        const double phi =
            std::acos(std::clamp(-q / (2.0 * std::max(r, 1e-300)), -1.0, 1.0));
        const double m = 2.0 * std::sqrt(std::max(0.0, -p / 3.0));
        for (int k = 0; k < 3; ++k)
          keep(m * std::cos((phi + 2.0 * M_PI * k) / 3.0) + shift);
      }
      break;
    }
    default:
      throw std::invalid_argument(
          "Polynomial::real_roots_in supports degree <= 3");
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

}  // namespace relq
