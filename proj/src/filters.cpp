#include "spe/filters.hpp"

#include <cmath>

#include <json.hpp>

#include "spe/error.hpp"

namespace spe {

double FilterSpec::eval(double lambda) const {
  switch (kind) {
    case Kind::Named: {
      if (name == "low-pass") return std::exp(-10.0 * lambda * lambda);
      if (name == "high-pass") return 1.0 - std::exp(-10.0 * lambda * lambda);
      if (name == "band-pass") return std::exp(-10.0 * (lambda - 1.0) * (lambda - 1.0));
      if (name == "band-rejection") return 1.0 - std::exp(-10.0 * (lambda - 1.0) * (lambda - 1.0));
      if (name == "comb") return std::fabs(std::sin(3.14159265358979323846 * lambda));
      fail(Err::UnknownFilter, name);
    }
    case Kind::Heat:
      return std::exp(-t * lambda);
    case Kind::Poly: {
      double acc = 0.0;
      for (size_t i = coeffs.size(); i-- > 0;) acc = acc * lambda + coeffs[i];
      return acc;
    }
    case Kind::FreeTheta:
      fail(Err::BadParams, "free-coefficient filter has no pointwise form");
  }
  fail(Err::BadParams, "bad filter kind");
}

FilterSpec filter_free(std::vector<double> theta) {
  check(!theta.empty(), Err::BadParams, "empty coefficient vector");
  FilterSpec f;
  f.kind = FilterSpec::Kind::FreeTheta;
  f.theta = std::move(theta);
  return f;
}

FilterSpec filter_named(const std::string& name) {
  FilterSpec f;
  f.kind = FilterSpec::Kind::Named;
  f.name = name;
  f.eval(0.0);  // validates the name
  return f;
}

FilterSpec filter_heat(double t) {
  FilterSpec f;
  f.kind = FilterSpec::Kind::Heat;
  f.t = t;
  return f;
}

FilterSpec filter_poly(std::vector<double> coeffs) {
  check(!coeffs.empty(), Err::BadParams, "empty polynomial");
  FilterSpec f;
  f.kind = FilterSpec::Kind::Poly;
  f.coeffs = std::move(coeffs);
  return f;
}

std::vector<FilterSpec> filter_bank() {
  std::vector<FilterSpec> bank;
  for (const char* n : {"low-pass", "high-pass", "band-pass", "band-rejection", "comb"})
    bank.push_back(filter_named(n));
  return bank;
}

Matrix spectral_conv(const EigDecomp& e, const FilterSpec& f, const Matrix& x) {
  int n = e.n();
  check(x.rows == n, Err::ShapeMismatch, "signal rows != n");
  if (f.kind == FilterSpec::Kind::FreeTheta)
    check(int(f.theta.size()) == n, Err::BadParams, "free filter needs one coefficient per eigenvalue");

  Matrix out(n, x.cols);
  for (int i = 0; i < n; ++i) {
    double th = f.kind == FilterSpec::Kind::FreeTheta ? f.theta[i] : f.eval(e.values[i]);
    if (th == 0.0) continue;
    // out += th * v_i (v_i' x)
    for (int c = 0; c < x.cols; ++c) {
      double dot = 0.0;
      for (int r = 0; r < n; ++r) dot += e.vectors.at(r, i) * x.at(r, c);
      double w = th * dot;
      for (int r = 0; r < n; ++r) out.at(r, c) += w * e.vectors.at(r, i);
    }
  }
  return out;
}

std::string filter_to_json(const FilterSpec& f) {
  nlohmann::ordered_json j;
  switch (f.kind) {
    case FilterSpec::Kind::FreeTheta:
      j["kind"] = "free";
      j["theta"] = f.theta;
      break;
    case FilterSpec::Kind::Named:
      j["kind"] = "named";
      j["name"] = f.name;
      break;
    case FilterSpec::Kind::Heat:
      j["kind"] = "heat";
      j["t"] = f.t;
      break;
    case FilterSpec::Kind::Poly:
      j["kind"] = "poly";
      j["coeffs"] = f.coeffs;
      break;
  }
  return j.dump();
}

FilterSpec filter_from_json_text(const std::string& text) {
  try {
    auto j = nlohmann::json::parse(text);
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "free") return filter_free(j.at("theta").get<std::vector<double>>());
    if (kind == "named") return filter_named(j.at("name").get<std::string>());
    if (kind == "heat") return filter_heat(j.at("t").get<double>());
    if (kind == "poly") return filter_poly(j.at("coeffs").get<std::vector<double>>());
    fail(Err::UnknownFilter, kind);
  } catch (const nlohmann::json::exception& e) {
    fail(Err::ParseError, std::string("bad filter JSON: ") + e.what());
  }
}

}  // namespace spe
