#include "cycle_census/family_registry.hpp"

#include <cmath>
#include <memory>
#include <string>

#include <json.hpp>

#include "cycle_census/error.hpp"
#include "cycle_census/ode_flow.hpp"
#include "cycle_census/planar_field.hpp"
#include "cycle_census/poincare.hpp"
#include "cycle_census/sampling.hpp"

namespace cycle_census {

namespace {

using Json = nlohmann::json;

Json parse_params(const std::string& text, const std::string& what) {
  if (text.empty()) return Json::object();
  try {
    Json j = Json::parse(text);
    if (!j.is_object()) throw Error(ErrorCode::kInvalidArgument, what + " parameters must be a JSON object");
    return j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, what + " parameters: " + e.what());
  }
}

Complex get_complex(const Json& j, const char* key, Complex fallback) {
  if (!j.contains(key)) return fallback;
  const Json& v = j.at(key);
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2) return {v[0].get<double>(), v[1].get<double>()};
  throw Error(ErrorCode::kInvalidArgument, std::string("'") + key + "' must be a number or [re, im]");
}

double get_double(const Json& j, const char* key, double fallback) {
  return j.contains(key) ? j.at(key).get<double>() : fallback;
}

constexpr double kDefaultRadius = 2.0;
constexpr double kDefaultDisk = 2.0 / 3.0;
const double kE = std::exp(1.0);

ParametricFamily affine_family(const std::string& name, const Json& p, int power) {
  const Complex value = get_complex(p, "value", 1.0);
  const Complex coef = get_complex(p, "coef", 0.0);
  const double r = get_double(p, "r", kDefaultRadius);
  const double s = get_double(p, "s", kDefaultDisk);
  const double m = get_double(p, "M", std::max(std::abs(value) + r * std::abs(coef), kE));
  auto factory = [value, coef, power](std::span<const Complex> v) -> AnalyticFunction {
    const Complex a = value + coef * v[0];
    if (power == 0) return [a](Complex) { return a; };
    return [a, power](Complex z) { return a * std::pow(z, power); };
  };
  return ParametricFamily(name, 1, m, r, s, std::move(factory));
}

ParametricFamily linear_root_family(const std::string& name, double lambda, const Json& p) {
  const double r = get_double(p, "r", kDefaultRadius);
  const double s = get_double(p, "s", kDefaultDisk);
  const double m = get_double(p, "M", 1.0 + std::abs(lambda) * r);
  auto factory = [lambda](std::span<const Complex> v) -> AnalyticFunction {
    const Complex root = lambda * v[0];
    return [root](Complex z) { return z - root; };
  };
  return ParametricFamily(name, 1, m, r, s, std::move(factory));
}

struct Component {
  enum class Kind { kBlaschke, kLinear, kZero } kind = Kind::kZero;
  double weight = 0.0;
  ComplexVector zeros;
};

Complex eval_component(const Component& c, Complex z) {
  switch (c.kind) {
    case Component::Kind::kZero:
      return {0.0, 0.0};
    case Component::Kind::kLinear:
      return c.weight * z;
    case Component::Kind::kBlaschke: {
      Complex b{1.0, 0.0};
      for (const Complex& a : c.zeros) b *= (z - a) / (1.0 - std::conj(a) * z);
      return c.weight * b;
    }
  }
  return {0.0, 0.0};
}

ParametricFamily blaschke_hyperplane_family(const Json& p) {
  const double s = get_double(p, "s", kDefaultDisk);
  if (!p.contains("components") || !p.at("components").is_array() || p.at("components").empty()) {
    throw Error(ErrorCode::kInvalidArgument, "blaschke-hyperplane needs a nonempty 'components' array");
  }
  auto components = std::make_shared<std::vector<Component>>();
  double weight2 = 0.0;
  for (const Json& cj : p.at("components")) {
    Component c;
    const std::string kind = cj.value("kind", std::string("zero"));
    if (kind == "zero") {
      c.kind = Component::Kind::kZero;
    } else if (kind == "linear") {
      c.kind = Component::Kind::kLinear;
      c.weight = get_double(cj, "weight", 1.0);
    } else if (kind == "blaschke") {
      c.kind = Component::Kind::kBlaschke;
      c.weight = get_double(cj, "weight", 1.0);
      if (cj.contains("zeros")) {
        for (const Json& zj : cj.at("zeros")) {
          Json wrap = {{"z", zj}};
          c.zeros.push_back(get_complex(wrap, "z", 0.0));
        }
      } else {
        const int degree = cj.value("degree", 1);
        const double rho = get_double(cj, "zero_radius", 0.5 * s);
        for (int j = 0; j < degree; ++j) {
          c.zeros.push_back(std::polar(rho, kTwoPi * (static_cast<double>(j) + 0.25) / degree));
        }
      }
      for (const Complex& a : c.zeros) {
        if (!(std::abs(a) < 1.0)) throw Error(ErrorCode::kInvalidArgument, "Blaschke zeros must lie in the unit disk");
      }
    } else {
      throw Error(ErrorCode::kInvalidArgument, "unknown component kind '" + kind + "'");
    }
    weight2 += c.weight * c.weight;
    components->push_back(std::move(c));
  }
  if (weight2 > 1.0 + 1e-12) {
    throw Error(ErrorCode::kInvalidArgument, "component weights must satisfy sum w^2 <= 1 (map into the unit ball)");
  }
  const std::size_t n = components->size();
  auto factory = [components, n](std::span<const Complex> a) -> AnalyticFunction {
    ComplexVector coeffs(a.begin(), a.end());
    return [components, coeffs, n](Complex z) {
      Complex total = coeffs[n];
      for (std::size_t i = 0; i < n; ++i) {
        if (coeffs[i] != Complex{0.0, 0.0}) total += coeffs[i] * eval_component((*components)[i], z);
      }
      return total;
    };
  };
  return ParametricFamily("blaschke-hyperplane", n + 1, 3.0, 2.0, s, std::move(factory));
}

ParametricFamily ode_flow_registry_family(const Json& p) {
  const Json field = p.contains("field") ? p.at("field") : Json::object();
  const OdeFieldSpec spec = ode_field_from_json(field.dump());
  const double t = get_double(p, "t", 0.5 * ode_flow_geometry(spec, p.value("seed", std::uint64_t{0})).R);
  return ode_flow_family(spec, t, p.value("seed", std::uint64_t{0}));
}

ParametricFamily displacement_registry_family(const Json& p) {
  const int degree = p.value("degree", 3);
  const double budget = get_double(p, "N", Ellipsoid::theorem_a_budget(degree));
  return displacement_family(degree, budget);
}

}  // namespace

std::vector<std::string> registry_names() {
  return {"constant", "monomial", "linear-root", "bernoulli", "blaschke-hyperplane", "ode-flow", "displacement"};
}

ParametricFamily make_family(const std::string& name, const std::string& params_json) {
  const Json p = parse_params(params_json, "family '" + name + "'");
  try {
    if (name == "constant") return affine_family(name, p, 0);
    if (name == "monomial") return affine_family(name, p, p.value("k", 1));
    if (name == "linear-root") return linear_root_family(name, get_double(p, "lambda", 1.0), p);
    if (name == "bernoulli") {
      const double s = get_double(p, "s", kDefaultDisk);
      Json q = p;
      q["s"] = s;
      return linear_root_family(name, s * std::sqrt(2.0), q);
    }
    if (name == "blaschke-hyperplane") return blaschke_hyperplane_family(p);
    if (name == "ode-flow") return ode_flow_registry_family(p);
    if (name == "displacement") return displacement_registry_family(p);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, "family '" + name + "' parameters: " + e.what());
  }
  std::string known;
  for (const auto& n : registry_names()) known += (known.empty() ? "" : ", ") + n;
  throw Error(ErrorCode::kInvalidArgument, "unknown family '" + name + "' (known: " + known + ")");
}

FamilySequence make_sequence(const std::string& spec_json) {
  const Json p = parse_params(spec_json, "sequence");
  const std::string kind = p.value("kind", std::string("repeat"));
  FamilySequence seq;
  seq.description = p.dump();
  try {
    if (kind == "repeat") {
      const std::string name = p.value("family", std::string("constant"));
      const std::string params = p.contains("params") ? p.at("params").dump() : "{}";
      make_family(name, params);  // validate eagerly
      seq.member = [name, params](std::size_t) { return make_family(name, params); };
      return seq;
    }
    if (kind == "hyperplane-sections") {
      const double c = get_double(p, "c", 0.6);
      const double beta = get_double(p, "beta", 0.7);
      const int period = p.value("period", 4);
      const double s = get_double(p, "s", kDefaultDisk);
      if (c == 0.0) throw Error(ErrorCode::kInvalidArgument, "hyperplane-sections needs c != 0");
      if (period < 1) throw Error(ErrorCode::kInvalidArgument, "hyperplane-sections needs period >= 1");
      seq.member = [c, beta, period, s](std::size_t k) {
        const int m = 1 + static_cast<int>((k - 1) % static_cast<std::size_t>(period));
        Json params = {{"s", s},
                       {"components",
                        {{{"kind", "linear"}, {"weight", c}}, {{"kind", "blaschke"}, {"weight", beta}, {"degree", m}}}}};
        return make_family("blaschke-hyperplane", params.dump());
      };
      seq.member(1);
      return seq;
    }
    if (kind == "ode-flow") {
      const int dimension = p.value("dimension", 3);
      const double norm = get_double(p, "norm", 0.5);
      const double t_frac = get_double(p, "t_fraction", 0.5);
      const std::uint64_t seed = p.value("seed", std::uint64_t{1});
      seq.member = [dimension, norm, t_frac, seed](std::size_t k) {
        OdeFieldSpec spec;
        spec.kind = OdeFieldSpec::Kind::kRandomLinear;
        spec.dimension = dimension;
        spec.norm = norm;
        const std::uint64_t member_seed = mix_seed(seed, k);
        const double t = t_frac * ode_flow_geometry(spec, member_seed).R;
        return ode_flow_family(spec, t, member_seed);
      };
      seq.member(1);
      return seq;
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("sequence parameters: ") + e.what());
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown sequence kind '" + kind + "'");
}

}  // namespace cycle_census
