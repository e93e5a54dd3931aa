#include "spe/graph_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "spe/error.hpp"

namespace spe {

namespace {

struct TokenReader {
  std::istringstream in;
  explicit TokenReader(const std::string& s) : in(s) {}

  long long next_int(const char* what) {
    long long v;
    if (!(in >> v)) fail(Err::ParseError, std::string("expected integer for ") + what);
    return v;
  }
  double next_double(const char* what) {
    double v;
    if (!(in >> v)) fail(Err::ParseError, std::string("expected number for ") + what);
    return v;
  }
  bool peek_feature_block() {
    char c;
    if (!(in >> c)) return false;
    if (c == 'F') return true;
    in.putback(c);
    return false;
  }
  void expect_end() {
    char c;
    if (in >> c) fail(Err::ParseError, std::string("trailing content starting with '") + c + "'");
  }
};

}  // namespace

Graph parse_edge_list(const std::string& text) {
  TokenReader r(text);
  long long n = r.next_int("node count");
  long long m = r.next_int("edge count");
  check(n >= 1 && n <= 1 << 20, Err::ParseError, "node count out of range");
  check(m >= 0, Err::ParseError, "negative edge count");
  std::vector<std::pair<int, int>> edges;
  edges.reserve(size_t(m));
  for (long long i = 0; i < m; ++i) {
    int u = int(r.next_int("edge endpoint"));
    int v = int(r.next_int("edge endpoint"));
    edges.emplace_back(u, v);
  }
  Matrix feats;
  if (r.peek_feature_block()) {
    long long d = r.next_int("feature width");
    check(d >= 1 && d <= 1 << 16, Err::ParseError, "feature width out of range");
    feats = Matrix(int(n), int(d));
    for (long long i = 0; i < n; ++i)
      for (long long j = 0; j < d; ++j) feats.at(int(i), int(j)) = r.next_double("feature");
  }
  r.expect_end();
  return build_graph(int(n), std::move(edges), std::move(feats));
}

static void append_double(std::string& out, double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  out += buf;
}

std::string emit_edge_list(const Graph& g) {
  std::string out = std::to_string(g.n) + " " + std::to_string(g.m()) + "\n";
  for (auto& [u, v] : g.edges) out += std::to_string(u) + " " + std::to_string(v) + "\n";
  if (g.has_features()) {
    out += "F " + std::to_string(g.features.cols) + "\n";
    for (int i = 0; i < g.n; ++i) {
      for (int j = 0; j < g.features.cols; ++j) {
        if (j) out += ' ';
        append_double(out, g.features.at(i, j));
      }
      out += '\n';
    }
  }
  return out;
}

Graph parse_graph_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(Err::ParseError, std::string("bad JSON: ") + e.what());
  }
  try {
    check(j.contains("n"), Err::ParseError, "missing \"n\"");
    int n = j.at("n").get<int>();
    std::vector<std::pair<int, int>> edges;
    for (auto& e : j.value("edges", nlohmann::json::array())) {
      check(e.is_array() && e.size() == 2, Err::ParseError, "edge must be [u,v]");
      edges.emplace_back(e[0].get<int>(), e[1].get<int>());
    }
    Matrix feats;
    if (j.contains("features") && !j["features"].is_null()) {
      auto& f = j["features"];
      check(f.is_array() && !f.empty(), Err::ParseError, "features must be a non-empty array");
      int d = int(f[0].size());
      feats = Matrix(int(f.size()), d);
      for (size_t i = 0; i < f.size(); ++i) {
        check(int(f[i].size()) == d, Err::ParseError, "ragged feature rows");
        for (int c = 0; c < d; ++c) feats.at(int(i), c) = f[i][c].get<double>();
      }
    }
    return build_graph(n, std::move(edges), std::move(feats));
  } catch (const nlohmann::json::exception& e) {
    fail(Err::ParseError, std::string("bad graph JSON: ") + e.what());
  }
}

std::string emit_graph_json(const Graph& g) {
  nlohmann::ordered_json j;
  j["n"] = g.n;
  auto edges = nlohmann::ordered_json::array();
  for (auto& [u, v] : g.edges) edges.push_back({u, v});
  j["edges"] = std::move(edges);
  if (g.has_features()) {
    auto feats = nlohmann::ordered_json::array();
    for (int i = 0; i < g.n; ++i) {
      auto row = nlohmann::ordered_json::array();
      for (int c = 0; c < g.features.cols; ++c) row.push_back(g.features.at(i, c));
      feats.push_back(std::move(row));
    }
    j["features"] = std::move(feats);
  }
  return j.dump();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Err::IoError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Err::IoError, "cannot write " + path);
  out << content;
}

Graph load_graph(const std::string& path) {
  std::string text = read_file(path);
  size_t i = text.find_first_not_of(" \t\r\n");
  if (i != std::string::npos && text[i] == '{') return parse_graph_json(text);
  return parse_edge_list(text);
}

}  // namespace spe
