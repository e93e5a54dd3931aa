#pragma once
#include <string>

#include "spe/graph.hpp"

namespace spe {

// Edge-list text format:
//   n m
//   u v            (m lines)
//   F d            (optional feature block header)
//   x1 ... xd      (n rows)
Graph parse_edge_list(const std::string& text);
std::string emit_edge_list(const Graph& g);

// JSON form: {"n": int, "edges": [[u,v],...], "features": [[...],...]?}
Graph parse_graph_json(const std::string& text);
std::string emit_graph_json(const Graph& g);

// Sniffs the format: leading '{' means JSON, anything else is an edge list.
Graph load_graph(const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace spe
