#include "spe/error.hpp"

namespace spe {

const char* err_name(Err e) {
  switch (e) {
    case Err::SelfLoop: return "self_loop";
    case Err::IndexOutOfRange: return "index_out_of_range";
    case Err::FeatureRowMismatch: return "feature_row_mismatch";
    case Err::IsolatedNode: return "isolated_node";
    case Err::ParseError: return "parse_error";
    case Err::BadParams: return "bad_params";
    case Err::ShapeMismatch: return "shape_mismatch";
    case Err::NotSquare: return "not_square";
    case Err::RankDeficient: return "rank_deficient";
    case Err::NoConvergence: return "no_convergence";
    case Err::NonInteger: return "non_integer";
    case Err::TooLarge: return "too_large";
    case Err::UnknownFilter: return "unknown_filter";
    case Err::GraphRequired: return "graph_required";
    case Err::IoError: return "io_error";
  }
  return "unknown";
}

}  // namespace spe
