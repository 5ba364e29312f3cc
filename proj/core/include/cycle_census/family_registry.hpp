#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "cycle_census/parametric_family.hpp"

namespace cycle_census {

// Built-in families by name, configured by a JSON object (may be "" or "{}"):
//   constant            f_v = value + coef v_1                      {value, coef, M, r, s}
//   monomial            f_v = (value + coef v_1) z^k                {k, value, coef, M, r, s}
//   linear-root         f_v = z - lambda v_1                        {lambda, M, r, s}
//   bernoulli           linear-root with lambda = s sqrt 2, so P(count = 1) = 1/2   {s}
//   blaschke-hyperplane l(a, f(z)) = sum_i a_i f_i(z) + a_{N+1}     {components, s}
//       components: [{"kind": "blaschke", "weight": w, "degree": m, "zero_radius": rho}
//                    | {"kind": "blaschke", "weight": w, "zeros": [[re, im], ...]}
//                    | {"kind": "linear", "weight": c} | {"kind": "zero"}], sum w^2 <= 1
//   ode-flow            first coordinate of a linear flow           {field, t, seed}
//   displacement        normalized displacement family              {degree, N}
// Complex scalars may be given as numbers or [re, im] pairs.
ParametricFamily make_family(const std::string& name, const std::string& params_json = "{}");

std::vector<std::string> registry_names();

// f_k for k = 1, 2, ...
struct FamilySequence {
  std::string description;
  std::function<ParametricFamily(std::size_t k)> member;
};

// {"kind": "repeat", "family": name, "params": {...}}
// {"kind": "hyperplane-sections", "c": 0.6, "beta": 0.7, "period": 4}
//     f_k = (c z, beta B_{m(k)}(z)), m(k) = 1 + ((k - 1) mod period)
// {"kind": "ode-flow", "dimension": N, "norm": x, "t": t, "seed": s}
//     random linear flows, one matrix per k
FamilySequence make_sequence(const std::string& spec_json);

}  // namespace cycle_census
