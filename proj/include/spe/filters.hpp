#pragma once
#include <string>
#include <vector>

#include "spe/eig.hpp"
#include "spe/matrix.hpp"

namespace spe {

// Spectral filter: either a free coefficient per eigenvalue index (basis- and
// ordering-sensitive by design) or a scalar function of the eigenvalue
// (basis invariant).
struct FilterSpec {
  enum class Kind { FreeTheta, Named, Heat, Poly };
  Kind kind = Kind::Named;
  std::vector<double> theta;   // FreeTheta
  std::string name;            // Named
  double t = 1.0;              // Heat
  std::vector<double> coeffs;  // Poly, ascending powers

  bool parametric() const { return kind != Kind::FreeTheta; }
  double eval(double lambda) const;  // parametric kinds only
};

FilterSpec filter_free(std::vector<double> theta);
// low-pass, high-pass, band-pass, band-rejection, comb
FilterSpec filter_named(const std::string& name);
FilterSpec filter_heat(double t);
FilterSpec filter_poly(std::vector<double> coeffs);

// the five named filters, in the order above
std::vector<FilterSpec> filter_bank();

// V diag(theta) V' x, accumulated one rank-one term at a time
Matrix spectral_conv(const EigDecomp& e, const FilterSpec& f, const Matrix& x);

std::string filter_to_json(const FilterSpec& f);
FilterSpec filter_from_json_text(const std::string& text);

}  // namespace spe
