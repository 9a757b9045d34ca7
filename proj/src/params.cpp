#include "biharm/params.hpp"

#include <stdexcept>
#include <string>

namespace biharm::params {

void OperatorParams::validate() const {
  if (N < 5) {
    throw std::invalid_argument("OperatorParams: N >= 5 required, got N=" + std::to_string(N));
  }
  if (!(alpha >= 0.0)) {
    throw std::invalid_argument("OperatorParams: alpha >= 0 required");
  }
  const double floor = std::max(alpha - 2.0, 0.0);
  if (!(beta > floor)) {
    throw std::invalid_argument("OperatorParams: beta > max(alpha-2, 0) required, got beta=" +
                                std::to_string(beta) + " with alpha=" + std::to_string(alpha));
  }
  if (!(lambda >= 0.0)) {
    throw std::invalid_argument("OperatorParams: lambda >= 0 required");
  }
  if (lambda0 && !(*lambda0 >= 0.0)) {
    throw std::invalid_argument("OperatorParams: lambda0 >= 0 required");
  }
}

void OperatorParams::require_dimension(int n_min, const char* what) const {
  if (N < n_min) {
    throw std::invalid_argument(std::string(what) + ": requires N >= " + std::to_string(n_min) +
                                ", got N=" + std::to_string(N));
  }
}

LemmaConstants lemma_constant_k(double gamma, int N) {
  if (!(gamma > 0.0)) {
    throw std::invalid_argument("lemma_constant_k: gamma > 0 required");
  }
  if (N < 5) {
    throw std::invalid_argument("lemma_constant_k: N >= 5 required");
  }
  LemmaConstants c;
  c.gamma = gamma;
  c.c1 = gamma * (gamma - 2.0 + N);
  c.c2 = gamma * (gamma - 2.0) * (gamma - 2.0 + N) * (gamma - 4.0 + N);
  c.c3 = 2.0 * gamma * (std::abs(gamma - 2.0) + 1.0) + 1.0;
  c.c4 = c.c3 * (gamma - 2.0) * (gamma - 4.0 + N) / 2.0;
  c.c5 = 1.0 / std::sqrt(2.0);
  c.c6 = c.c3 / (2.0 * c.c5);
  c.k = c.c2 / 2.0 - c.c4 - c.c6 * c.c6;
  return c;
}

RellichConstants RellichConstants::for_dimension(int N) {
  if (N < 5) {
    throw std::invalid_argument("RellichConstants: N >= 5 required");
  }
  RellichConstants rc;
  const double n = static_cast<double>(N);
  rc.c0_sharp = std::pow(n * (n - 4.0) / 4.0, 2.0);
  rc.c_hardy = std::pow((n - 2.0) / 2.0, 2.0);
  return rc;
}

WeightDerivatives weight_derivatives(double gamma, int N, double r) {
  if (!(r > 0.0)) {
    throw std::invalid_argument("weight_derivatives: r > 0 required");
  }
  WeightDerivatives w;
  const double rg2 = std::pow(r, gamma - 2.0);
  const double rg4 = std::pow(r, gamma - 4.0);
  w.grad_coeff = gamma * rg2;
  w.hess_rank1 = gamma * (gamma - 2.0) * rg4;
  w.hess_radial = gamma * (gamma - 1.0) * rg2;
  w.hess_tangent = gamma * rg2;
  w.lap = gamma * (gamma - 2.0 + N) * rg2;
  w.bilap = gamma * (gamma - 2.0) * (gamma - 2.0 + N) * (gamma - 4.0 + N) * rg4;
  return w;
}

}  // namespace biharm::params
