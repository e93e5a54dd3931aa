#include "spe/params.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <json.hpp>

#include "spe/error.hpp"
#include "spe/rng.hpp"

namespace spe {

namespace {

uint64_t fnv1a(const std::string& s) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace

Tensor& ParamSet::declare(const std::string& name, Shape shape, Init init, int fan_in) {
  auto it = items.find(name);
  if (it != items.end()) {
    check(it->second.value.shape == shape, Err::ShapeMismatch,
          "parameter " + name + " redeclared with shape " + shape.str());
    return it->second.value;
  }
  Param p;
  p.value = Tensor(shape);
  p.grad = Tensor(shape);
  p.adam_m = Tensor(shape);
  p.adam_v = Tensor(shape);
  if (init != Init::Zeros) {
    // initialization depends only on (set seed, name), not declaration order
    Rng rng(Rng::derive(seed, fnv1a(name)));
    double sd = init == Init::GaussianSmall ? 0.1 : std::sqrt(1.0 / std::max(1, fan_in));
    for (double& x : p.value.data) x = sd * rng.gaussian();
  }
  return items.emplace(name, std::move(p)).first->second.value;
}

Param& ParamSet::at(const std::string& name) {
  auto it = items.find(name);
  check(it != items.end(), Err::BadParams, "unknown parameter " + name);
  return it->second;
}

const Param& ParamSet::at(const std::string& name) const {
  auto it = items.find(name);
  check(it != items.end(), Err::BadParams, "unknown parameter " + name);
  return it->second;
}

void ParamSet::zero_grads() {
  for (auto& [_, p] : items) std::fill(p.grad.data.begin(), p.grad.data.end(), 0.0);
}

void ParamSet::adam_step(double lr, double beta1, double beta2, double eps) {
  ++steps;
  double c1 = 1.0 - std::pow(beta1, double(steps));
  double c2 = 1.0 - std::pow(beta2, double(steps));
  for (auto& [_, p] : items) {
    for (size_t i = 0; i < p.value.data.size(); ++i) {
      double g = p.grad.data[i];
      p.adam_m.data[i] = beta1 * p.adam_m.data[i] + (1.0 - beta1) * g;
      p.adam_v.data[i] = beta2 * p.adam_v.data[i] + (1.0 - beta2) * g * g;
      double mhat = p.adam_m.data[i] / c1;
      double vhat = p.adam_v.data[i] / c2;
      p.value.data[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
  }
}

size_t ParamSet::scalar_count() const {
  size_t n = 0;
  for (auto& [_, p] : items) n += p.value.data.size();
  return n;
}

std::string ParamSet::to_json_str() const {
  nlohmann::ordered_json j;
  j["seed"] = seed;
  j["steps"] = steps;
  auto items_j = nlohmann::ordered_json::object();
  for (auto& [name, p] : items) {
    nlohmann::ordered_json pj;
    std::vector<int> dims(p.value.shape.d, p.value.shape.d + p.value.shape.nd);
    pj["shape"] = dims;
    pj["data"] = p.value.data;
    items_j[name] = std::move(pj);
  }
  j["params"] = std::move(items_j);
  return j.dump();
}

ParamSet ParamSet::from_json_str(const std::string& text) {
  try {
    auto j = nlohmann::json::parse(text);
    ParamSet ps;
    ps.seed = j.value("seed", uint64_t(0));
    ps.steps = j.value("steps", int64_t(0));
    for (auto& [name, pj] : j.at("params").items()) {
      auto dims = pj.at("shape").get<std::vector<int>>();
      check(dims.size() >= 1 && dims.size() <= 3, Err::ParseError, "bad param shape");
      Shape s;
      s.nd = int(dims.size());
      for (size_t i = 0; i < dims.size(); ++i) s.d[i] = dims[i];
      Tensor& t = ps.declare(name, s, Init::Zeros);
      auto data = pj.at("data").get<std::vector<double>>();
      check(data.size() == t.data.size(), Err::ParseError, "param " + name + " data size");
      t.data = std::move(data);
    }
    return ps;
  } catch (const nlohmann::json::exception& e) {
    fail(Err::ParseError, std::string("bad params JSON: ") + e.what());
  }
}

GradCheckResult grad_check(const std::function<double(ParamSet&, bool)>& loss, ParamSet& ps,
                           double h, uint64_t seed, int coords) {
  ps.zero_grads();
  loss(ps, true);

  // (name, flat index) pairs in deterministic order
  std::vector<std::pair<std::string, size_t>> all;
  for (auto& [name, p] : ps.items)
    for (size_t i = 0; i < p.value.data.size(); ++i) all.emplace_back(name, i);
  check(!all.empty(), Err::BadParams, "grad_check: no parameters");

  std::vector<size_t> picked;
  if (int(all.size()) <= coords) {
    picked.resize(all.size());
    for (size_t i = 0; i < all.size(); ++i) picked[i] = i;
  } else {
    Rng rng(Rng::derive(seed, 0x67726164));
    std::set<size_t> seen;
    while (int(seen.size()) < coords) seen.insert(size_t(rng.uniform_int(0, int(all.size()) - 1)));
    picked.assign(seen.begin(), seen.end());
  }

  GradCheckResult res;
  res.coords_checked = int(picked.size());
  for (size_t k : picked) {
    auto& [name, idx] = all[k];
    double analytic = ps.at(name).grad.data[idx];
    double saved = ps.at(name).value.data[idx];
    ps.at(name).value.data[idx] = saved + h;
    double up = loss(ps, false);
    ps.at(name).value.data[idx] = saved - h;
    double dn = loss(ps, false);
    ps.at(name).value.data[idx] = saved;
    double numeric = (up - dn) / (2.0 * h);
    double rel = std::fabs(analytic - numeric) /
                 std::max({1.0, std::fabs(analytic), std::fabs(numeric)});
    res.max_rel_err = std::max(res.max_rel_err, rel);
  }
  return res;
}

}  // namespace spe
