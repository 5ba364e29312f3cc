#include "cycle_census/planar_field.hpp"

#include <cmath>
#include <string>

#include <json.hpp>

#include "cycle_census/error.hpp"
#include "cycle_census/sampling.hpp"

namespace cycle_census {

namespace {

void require_degree(int degree) {
  if (degree < 1) throw Error(ErrorCode::kInvalidArgument, "field degree must be >= 1, got " + std::to_string(degree));
}

// Coefficients (indexed by power of U) of (alpha U + beta V)^n.
std::vector<double> linear_power(double alpha, double beta, int n) {
  std::vector<double> out{1.0};
  for (int m = 0; m < n; ++m) {
    std::vector<double> next(out.size() + 1, 0.0);
    for (std::size_t j = 0; j < out.size(); ++j) {
      next[j] += beta * out[j];
      next[j + 1] += alpha * out[j];
    }
    out = std::move(next);
  }
  return out;
}

std::vector<double> convolve(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> out(x.size() + y.size() - 1, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j) out[i + j] += x[i] * y[j];
  return out;
}

// Homogeneous degree-k row c[i] (x^i y^{k-i}) after x = aU + bV, y = cU + dV.
std::vector<double> substitute_row(std::span<const double> row, int k, double a, double b, double c, double d) {
  std::vector<double> out(static_cast<std::size_t>(k) + 1, 0.0);
  for (int i = 0; i <= k; ++i) {
    const double coeff = row[static_cast<std::size_t>(i)];
    if (coeff == 0.0) continue;
    const auto term = convolve(linear_power(a, b, i), linear_power(c, d, k - i));
    for (std::size_t j = 0; j < term.size(); ++j) out[j] += coeff * term[j];
  }
  return out;
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

}  // namespace

PlanarField::PlanarField(int degree) : degree_(degree) {
  require_degree(degree);
  coeffs_.assign(dimension(degree), 0.0);
}

PlanarField::PlanarField(int degree, std::vector<double> coefficients)
    : degree_(degree), coeffs_(std::move(coefficients)) {
  require_degree(degree);
  if (coeffs_.size() != dimension(degree)) {
    throw Error(ErrorCode::kInvalidArgument, "degree " + std::to_string(degree) + " needs " +
                                                 std::to_string(dimension(degree)) + " coefficients, got " +
                                                 std::to_string(coeffs_.size()));
  }
  for (double c : coeffs_) {
    if (!std::isfinite(c)) throw Error(ErrorCode::kInvalidArgument, "field coefficients must be finite");
  }
}

std::size_t PlanarField::index_a(int k, int i) const {
  if (k < 1 || k > degree_ || i < 0 || i > k) {
    throw Error(ErrorCode::kInvalidArgument, "coefficient index (" + std::to_string(k) + "," + std::to_string(i) + ") out of range");
  }
  return row_offset(k) + static_cast<std::size_t>(i);
}

std::size_t PlanarField::index_b(int k, int i) const { return index_a(k, i) + dimension(degree_) / 2; }

std::span<const double> PlanarField::a_row(int k) const {
  return std::span<const double>(coeffs_).subspan(index_a(k, 0), static_cast<std::size_t>(k) + 1);
}

std::span<const double> PlanarField::b_row(int k) const {
  return std::span<const double>(coeffs_).subspan(index_b(k, 0), static_cast<std::size_t>(k) + 1);
}

double PlanarField::row_norm_f(int k) const {
  double s = 0.0;
  for (double c : a_row(k)) s += c * c;
  return std::sqrt(s);
}

double PlanarField::row_norm_g(int k) const {
  double s = 0.0;
  for (double c : b_row(k)) s += c * c;
  return std::sqrt(s);
}

double PlanarField::norm() const {
  double s = 0.0;
  for (double c : coeffs_) s += c * c;
  return std::sqrt(s);
}

double PlanarField::eval_f(double x, double y) const {
  double total = 0.0;
  for (int k = 1; k <= degree_; ++k) {
    const auto row = a_row(k);
    for (int i = 0; i <= k; ++i) total += row[static_cast<std::size_t>(i)] * std::pow(x, i) * std::pow(y, k - i);
  }
  return total;
}

double PlanarField::eval_g(double x, double y) const {
  double total = 0.0;
  for (int k = 1; k <= degree_; ++k) {
    const auto row = b_row(k);
    for (int i = 0; i <= k; ++i) total += row[static_cast<std::size_t>(i)] * std::pow(x, i) * std::pow(y, k - i);
  }
  return total;
}

ComplexVector PlanarField::complex_coefficients() const {
  return ComplexVector(coeffs_.begin(), coeffs_.end());
}

PlanarField PlanarField::scaled(double factor) const {
  std::vector<double> c = coeffs_;
  for (double& x : c) x *= factor;
  return PlanarField(degree_, std::move(c));
}

PlanarField PlanarField::operator+(const PlanarField& other) const {
  if (other.degree_ != degree_) throw Error(ErrorCode::kDegreeMismatch, "cannot add fields of different degree");
  std::vector<double> c = coeffs_;
  for (std::size_t i = 0; i < c.size(); ++i) c[i] += other.coeffs_[i];
  return PlanarField(degree_, std::move(c));
}

void Ellipsoid::validate() const {
  if (!(a > 0.0) || !(norm_budget > 0.0) || degree < 1) {
    throw Error(ErrorCode::kInvalidArgument, "ellipsoid needs a > 0, N > 0, degree >= 1");
  }
}

double Ellipsoid::theorem_a_budget(int degree) noexcept {
  return 1.0 / (192.0 * kPi * static_cast<double>(degree) * static_cast<double>(degree));
}

bool ellipsoid_membership(const PlanarField& field, const Ellipsoid& ellipsoid) {
  ellipsoid.validate();
  if (field.degree() != ellipsoid.degree) {
    throw Error(ErrorCode::kDegreeMismatch, "field degree " + std::to_string(field.degree()) +
                                                " vs ellipsoid degree " + std::to_string(ellipsoid.degree));
  }
  double total = 0.0;
  for (int k = 1; k <= field.degree(); ++k) {
    const double w = std::pow(ellipsoid.a, k - 1);
    const double fk = w * field.row_norm_f(k);
    const double gk = w * field.row_norm_g(k);
    total += fk * fk + gk * gk;
  }
  return total <= ellipsoid.norm_budget * ellipsoid.norm_budget;
}

PlanarField sample_ellipsoid(const Ellipsoid& ellipsoid, std::uint64_t seed) {
  ellipsoid.validate();
  Rng rng(seed);
  const int d = ellipsoid.degree;
  std::vector<double> x = uniform_real_ball(PlanarField::dimension(d), rng);
  const std::size_t half = x.size() / 2;
  for (int k = 1; k <= d; ++k) {
    const double scale = ellipsoid.norm_budget * std::pow(ellipsoid.a, -(k - 1));
    for (int i = 0; i <= k; ++i) {
      const std::size_t idx = PlanarField::row_offset(k) + static_cast<std::size_t>(i);
      x[idx] *= scale;
      x[idx + half] *= scale;
    }
  }
  return PlanarField(d, std::move(x));
}

PlanarField rescale_to_unit(const PlanarField& field, double a) {
  if (!(a > 0.0)) throw Error(ErrorCode::kInvalidArgument, "rescale factor must be positive");
  PlanarField out = field;
  for (int k = 1; k <= field.degree(); ++k) {
    const double w = std::pow(a, k - 1);
    for (int i = 0; i <= k; ++i) {
      out.set_a(k, i, field.a(k, i) * w);
      out.set_b(k, i, field.b(k, i) * w);
    }
  }
  return out;
}

PolarSystem::PolarSystem(int degree, ComplexVector coefficients)
    : degree_(degree), coeffs_(std::move(coefficients)) {
  require_degree(degree);
  if (coeffs_.size() != PlanarField::dimension(degree)) {
    throw Error(ErrorCode::kInvalidArgument, "polar system coefficient vector has wrong length");
  }
}

bool PolarSystem::is_real() const noexcept {
  for (const Complex& c : coeffs_)
    if (c.imag() != 0.0) return false;
  return true;
}

double PolarSystem::coefficient_norm() const noexcept { return euclidean_norm(coeffs_); }

void PolarSystem::radial_angular_terms(double theta, std::span<Complex> f_out, std::span<Complex> g_out) const {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const std::size_t half = coeffs_.size() / 2;
  // Powers of cos and sin by repeated multiplication.
  std::vector<double> cpow(static_cast<std::size_t>(degree_) + 1, 1.0);
  std::vector<double> spow(static_cast<std::size_t>(degree_) + 1, 1.0);
  for (int m = 1; m <= degree_; ++m) {
    cpow[static_cast<std::size_t>(m)] = cpow[static_cast<std::size_t>(m - 1)] * c;
    spow[static_cast<std::size_t>(m)] = spow[static_cast<std::size_t>(m - 1)] * s;
  }
  for (int k = 1; k <= degree_; ++k) {
    Complex fk{0.0, 0.0};
    Complex gk{0.0, 0.0};
    const std::size_t off = PlanarField::row_offset(k);
    for (int i = 0; i <= k; ++i) {
      const double mono = cpow[static_cast<std::size_t>(i)] * spow[static_cast<std::size_t>(k - i)];
      fk += coeffs_[off + static_cast<std::size_t>(i)] * mono;
      gk += coeffs_[half + off + static_cast<std::size_t>(i)] * mono;
    }
    f_out[static_cast<std::size_t>(k - 1)] = fk * c + gk * s;
    g_out[static_cast<std::size_t>(k - 1)] = -fk * s + gk * c;
  }
}

Complex PolarSystem::f(int k, double theta) const {
  std::vector<Complex> fs(static_cast<std::size_t>(degree_)), gs(static_cast<std::size_t>(degree_));
  radial_angular_terms(theta, fs, gs);
  return fs.at(static_cast<std::size_t>(k - 1));
}

Complex PolarSystem::g(int k, double theta) const {
  std::vector<Complex> fs(static_cast<std::size_t>(degree_)), gs(static_cast<std::size_t>(degree_));
  radial_angular_terms(theta, fs, gs);
  return gs.at(static_cast<std::size_t>(k - 1));
}

Complex PolarSystem::P(Complex r, double theta) const {
  std::vector<Complex> fs(static_cast<std::size_t>(degree_)), gs(static_cast<std::size_t>(degree_));
  radial_angular_terms(theta, fs, gs);
  Complex acc{0.0, 0.0};
  for (int k = degree_; k >= 1; --k) acc = acc * r + fs[static_cast<std::size_t>(k - 1)];
  return acc;
}

Complex PolarSystem::Q(Complex r, double theta) const {
  std::vector<Complex> fs(static_cast<std::size_t>(degree_)), gs(static_cast<std::size_t>(degree_));
  radial_angular_terms(theta, fs, gs);
  Complex acc{0.0, 0.0};
  for (int k = degree_; k >= 1; --k) acc = acc * r + gs[static_cast<std::size_t>(k - 1)];
  return acc;
}

Complex PolarSystem::rhs(Complex r, double theta) const {
  std::vector<Complex> fs(static_cast<std::size_t>(degree_)), gs(static_cast<std::size_t>(degree_));
  radial_angular_terms(theta, fs, gs);
  Complex p{0.0, 0.0};
  Complex q{0.0, 0.0};
  for (int k = degree_; k >= 1; --k) {
    p = p * r + fs[static_cast<std::size_t>(k - 1)];
    q = q * r + gs[static_cast<std::size_t>(k - 1)];
  }
  return r * p / (1.0 + q);
}

PolarSystem PolarSystem::scaled(Complex factor) const {
  ComplexVector c = coeffs_;
  for (Complex& x : c) x *= factor;
  return PolarSystem(degree_, std::move(c));
}

PolarSystem polar_reduce(const PlanarField& field) {
  return PolarSystem(field.degree(), field.complex_coefficients());
}

double trig_norm_check(const PlanarField& field, std::size_t theta_points) {
  const double norm = field.norm();
  if (norm == 0.0) throw Error(ErrorCode::kZeroField, "trig norm ratio undefined for the zero field");
  double worst = 0.0;
  for (std::size_t j = 0; j < theta_points; ++j) {
    const double theta = kTwoPi * static_cast<double>(j) / static_cast<double>(theta_points);
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    for (int k = 1; k <= field.degree(); ++k) {
      double fk = 0.0;
      double gk = 0.0;
      double cp = 1.0;
      const auto arow = field.a_row(k);
      const auto brow = field.b_row(k);
      for (int i = 0; i <= k; ++i) {
        const double mono = cp * std::pow(s, k - i);
        fk += arow[static_cast<std::size_t>(i)] * mono;
        gk += brow[static_cast<std::size_t>(i)] * mono;
        cp *= c;
      }
      worst = std::max({worst, std::abs(fk), std::abs(gk)});
    }
  }
  return worst / norm;
}

PlanarField rigid_field(std::span<const double> poly, int degree) {
  const int l = static_cast<int>(poly.size()) - 1;
  if (l < 0) throw Error(ErrorCode::kInvalidArgument, "rigid field needs a nonempty polynomial");
  if (degree < 2 * l + 1) {
    throw Error(ErrorCode::kInvalidArgument, "rigid field with deg f = " + std::to_string(l) +
                                                 " needs degree >= " + std::to_string(2 * l + 1));
  }
  PlanarField field(degree);
  // x (x^2+y^2)^j = sum_m C(j,m) x^{2m+1} y^{2(j-m)};  y (x^2+y^2)^j = sum_m C(j,m) x^{2m} y^{2(j-m)+1}.
  for (int j = 0; j <= l; ++j) {
    const int k = 2 * j + 1;
    for (int m = 0; m <= j; ++m) {
      const double c = poly[static_cast<std::size_t>(j)] * binomial(j, m);
      field.set_a(k, 2 * m + 1, c);
      field.set_b(k, 2 * m, c);
    }
  }
  return field;
}

std::vector<double> poly_from_real_roots(std::span<const double> roots, double scale) {
  std::vector<double> c{scale};
  for (double root : roots) {
    std::vector<double> next(c.size() + 1, 0.0);
    for (std::size_t i = 0; i < c.size(); ++i) {
      next[i + 1] += c[i];
      next[i] -= root * c[i];
    }
    c = std::move(next);
  }
  return c;
}

PlanarField v0_field(int degree, double norm_budget) {
  PlanarField field(degree);
  field.set_a(1, 1, 0.5 * norm_budget);
  field.set_b(1, 0, 0.5 * norm_budget);
  return field;
}

PlanarField rotate_field(const PlanarField& field, double phi) {
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  PlanarField out(field.degree());
  for (int k = 1; k <= field.degree(); ++k) {
    // Old coordinates in terms of new: x = c U + s V, y = -s U + c V.
    const auto fk = substitute_row(field.a_row(k), k, c, s, -s, c);
    const auto gk = substitute_row(field.b_row(k), k, c, s, -s, c);
    for (int i = 0; i <= k; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      out.set_a(k, i, c * fk[ui] - s * gk[ui]);
      out.set_b(k, i, s * fk[ui] + c * gk[ui]);
    }
  }
  return out;
}

std::string field_to_json(const PlanarField& field, int indent) {
  nlohmann::json j;
  j["degree"] = field.degree();
  nlohmann::json a = nlohmann::json::array();
  nlohmann::json b = nlohmann::json::array();
  for (int k = 1; k <= field.degree(); ++k) {
    const auto ar = field.a_row(k);
    const auto br = field.b_row(k);
    a.push_back(std::vector<double>(ar.begin(), ar.end()));
    b.push_back(std::vector<double>(br.begin(), br.end()));
  }
  j["a"] = std::move(a);
  j["b"] = std::move(b);
  return j.dump(indent);
}

PlanarField field_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("field JSON: ") + e.what());
  }
  if (!j.contains("degree") || !j.contains("a") || !j.contains("b")) {
    throw Error(ErrorCode::kInvalidArgument, "field JSON needs keys degree, a, b");
  }
  const int d = j.at("degree").get<int>();
  PlanarField field(d);
  const auto& a = j.at("a");
  const auto& b = j.at("b");
  if (!a.is_array() || !b.is_array() || a.size() != static_cast<std::size_t>(d) || b.size() != static_cast<std::size_t>(d)) {
    throw Error(ErrorCode::kInvalidArgument, "field JSON: a and b need one row per degree 1..d");
  }
  for (int k = 1; k <= d; ++k) {
    const auto& ar = a[static_cast<std::size_t>(k - 1)];
    const auto& br = b[static_cast<std::size_t>(k - 1)];
    if (ar.size() != static_cast<std::size_t>(k) + 1 || br.size() != static_cast<std::size_t>(k) + 1) {
      throw Error(ErrorCode::kInvalidArgument, "field JSON: row " + std::to_string(k) + " needs " +
                                                   std::to_string(k + 1) + " entries");
    }
    for (int i = 0; i <= k; ++i) {
      field.set_a(k, i, ar[static_cast<std::size_t>(i)].get<double>());
      field.set_b(k, i, br[static_cast<std::size_t>(i)].get<double>());
    }
  }
  return PlanarField(d, std::vector<double>(field.coefficients().begin(), field.coefficients().end()));
}

}  // namespace cycle_census
