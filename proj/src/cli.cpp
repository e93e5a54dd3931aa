#include "spe/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "spe/encodings.hpp"
#include "spe/error.hpp"
#include "spe/filters.hpp"
#include "spe/generators.hpp"
#include "spe/graph_io.hpp"
#include "spe/harness.hpp"
#include "spe/invariants.hpp"
#include "spe/kernels.hpp"

namespace spe {

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void emit(const std::string& out_path, std::string text) {
  if (text.empty() || text.back() != '\n') text += '\n';
  if (out_path.empty())
    std::cout << text;
  else
    write_file(out_path, text);
}

std::string csv_matrix(const Matrix& m, const std::vector<std::string>& col_names) {
  std::string s = "node";
  for (const std::string& c : col_names) s += "," + c;
  s += '\n';
  for (int r = 0; r < m.rows; ++r) {
    s += std::to_string(r);
    for (int c = 0; c < m.cols; ++c) s += "," + fmt17(m.at(r, c));
    s += '\n';
  }
  return s;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    try {
      out.push_back(std::stod(text.substr(pos, comma - pos)));
    } catch (const std::exception&) {
      fail(Err::ParseError, "bad number in list: " + text);
    }
    pos = comma + 1;
  }
  check(!out.empty(), Err::ParseError, "empty list");
  return out;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  for (double v : parse_double_list(text)) {
    check(v == (long long)v, Err::ParseError, "expected integers: " + text);
    out.push_back(int(v));
  }
  return out;
}

// "5..12" or "7"
std::pair<int, int> parse_range(const std::string& text) {
  size_t dots = text.find("..");
  try {
    if (dots == std::string::npos) {
      int v = std::stoi(text);
      return {v, v};
    }
    return {std::stoi(text.substr(0, dots)), std::stoi(text.substr(dots + 2))};
  } catch (const std::exception&) {
    fail(Err::ParseError, "bad range: " + text);
  }
}

// "16" or "16x20"
std::pair<int, int> parse_grid(const std::string& text) {
  size_t x = text.find('x');
  try {
    if (x == std::string::npos) {
      int v = std::stoi(text);
      return {v, v};
    }
    return {std::stoi(text.substr(0, x)), std::stoi(text.substr(x + 1))};
  } catch (const std::exception&) {
    fail(Err::ParseError, "bad grid size: " + text);
  }
}

GraphSampler parse_sampler(const std::string& name) {
  if (name == "random") return GraphSampler::Random;
  if (name == "degenerate") return GraphSampler::DegenerateRich;
  if (name == "simple") return GraphSampler::SimpleSpectrum;
  fail(Err::BadParams, "unknown sampler: " + name);
}

struct PeOpts {
  std::string path, out, kind = "heat";
  std::string ts = "1.0", ks = "1";
  double gamma = 0.5;
  int p = 1, k = 1;
  std::string gammas = "1.0,0.5";
};

int cmd_pe(const PeOpts& o) {
  Graph g = load_graph(o.path);
  EigDecomp e = eigh(normalized_laplacian(g));
  Matrix m;
  std::vector<std::string> names;
  if (o.kind == "heat") {
    std::vector<double> ts = parse_double_list(o.ts);
    m = heat_pe(e, ts);
    for (double t : ts) names.push_back("t=" + fmt17(t));
  } else if (o.kind == "rwpe") {
    std::vector<int> ks = parse_int_list(o.ks);
    m = rwpe(g, e, ks);
    for (int k : ks) names.push_back("k=" + std::to_string(k));
  } else {
    PEConfig cfg;
    if (o.kind == "diffusion") {
      cfg.kind = KernelKind::Diffusion;
      cfg.t = parse_double_list(o.ts)[0];
    } else if (o.kind == "pstep") {
      cfg.kind = KernelKind::PStep;
      cfg.gamma = o.gamma;
      cfg.p = o.p;
    } else if (o.kind == "gpr") {
      cfg.kind = KernelKind::Gpr;
      cfg.gammas = parse_double_list(o.gammas);
    } else if (o.kind == "landing") {
      cfg.kind = KernelKind::Landing;
      cfg.k = o.k;
    } else {
      fail(Err::BadParams, "unknown encoding kind: " + o.kind);
    }
    m = kernel_matrix(g, e, cfg);
    for (int c = 0; c < m.cols; ++c) names.push_back(std::to_string(c));
  }
  emit(o.out, csv_matrix(m, names));
  return 0;
}

int cmd_spectrum(const std::string& path, const std::string& out, double tol_abs,
                 double tol_rel) {
  Graph g = load_graph(path);
  EigDecomp e = eigh(normalized_laplacian(g));
  EigenspacePartition part = partition_eigenspaces(e, tol_abs, tol_rel);
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["values"] = e.values;
  std::vector<int> groups;
  std::vector<double> mus;
  for (const Eigenspace& sp : part.groups) {
    groups.push_back(sp.dim());
    mus.push_back(sp.mu);
  }
  j["groups"] = groups;
  j["group_means"] = mus;
  j["tau"] = part.tau;
  emit(out, j.dump());
  return 0;
}

int cmd_angles(const std::string& path, const std::string& out) {
  Graph g = load_graph(path);
  EigDecomp e = eigh(adjacency_matrix(g));
  AngleTable at = graph_angles(partition_eigenspaces(e));
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["mu"] = at.mu;
  j["mult"] = at.mult;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (int i = 0; i < at.alpha.rows; ++i) {
    std::vector<double> row(at.alpha.a.begin() + size_t(i) * at.alpha.cols,
                            at.alpha.a.begin() + size_t(i + 1) * at.alpha.cols);
    rows.push_back(row);
  }
  j["alpha"] = rows;
  emit(out, j.dump());
  return 0;
}

int cmd_cycles(const std::string& path, const std::string& out) {
  Graph g = load_graph(path);
  EigDecomp e = eigh(adjacency_matrix(g));
  CycleCounts c = cycle_counts_from_spectrum(graph_angles(partition_eigenspaces(e)));
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["c3"] = c.c3;
  j["c4"] = c.c4;
  j["c5"] = c.c5;
  emit(out, j.dump());
  return 0;
}

struct StatsOpts {
  std::string path, out, family;
  int n = 8, h = 4, w = 4;
  double p = 0.3;
  uint64_t seed = 0;
  double tol_abs = 1e-8, tol_rel = 1e-8;
};

int cmd_stats(const StatsOpts& o) {
  std::vector<Graph> gs;
  if (!o.family.empty()) {
    gs.push_back(generate(o.family, o.n, o.h, o.w, o.p, o.seed));
  } else {
    check(!o.path.empty(), Err::BadParams, "stats needs a path or --family");
    namespace fs = std::filesystem;
    if (fs::is_directory(o.path))
      gs = load_graph_dir(o.path);
    else
      gs.push_back(load_graph(o.path));
  }
  emit(o.out, eigenspace_stats_json(eigenspace_stats(gs, o.tol_abs, o.tol_rel)));
  return 0;
}

struct InvOpts {
  std::string model_path, out, claim = "sign", sampler;
  int trials = 100;
  uint64_t seed = 0;
  bool ablate_mirror = false;
  bool basis_models = false;
};

int cmd_invariance(const InvOpts& o) {
  GraphSampler s = parse_sampler(!o.sampler.empty() ? o.sampler
                                 : o.claim == "basis" ? "degenerate"
                                                      : "random");
  InvarianceReport r;
  if (o.model_path.empty()) {
    if (o.claim == "sign")
      r = check_sign_invariance_random(s, o.trials, o.seed, o.ablate_mirror);
    else if (o.claim == "basis")
      r = check_basis_invariance_random(s, o.trials, o.seed);
    else if (o.claim == "perm")
      r = check_perm_equivariance_random(s, o.trials, o.seed, o.basis_models);
    else
      fail(Err::BadParams, "unknown claim: " + o.claim);
  } else {
    ModelCheckpoint ck = model_from_json(read_file(o.model_path));
    if (ck.kind == "signnet") {
      if (o.ablate_mirror) ck.sign.mirror = false;
      if (o.claim == "sign")
        r = check_sign_invariance(ck.sign, s, o.trials, o.seed);
      else if (o.claim == "basis")
        r = check_basis_invariance(ck.sign, s, o.trials, o.seed);
      else if (o.claim == "perm")
        r = check_perm_equivariance(ck.sign, s, o.trials, o.seed);
      else
        fail(Err::BadParams, "unknown claim: " + o.claim);
    } else {
      if (o.claim == "basis")
        r = check_basis_invariance(ck.basis, s, o.trials, o.seed);
      else if (o.claim == "perm")
        r = check_perm_equivariance(ck.basis, s, o.trials, o.seed);
      else
        fail(Err::BadParams, "claim '" + o.claim + "' applies to signnet checkpoints");
    }
  }
  emit(o.out, invariance_report_json(r));
  return r.applicable && !r.passed ? 2 : 0;
}

int cmd_pair(const std::string& range, const std::string& out) {
  auto [lo, hi] = parse_range(range);
  std::vector<PairRow> rows = bipartite_pair_experiment(lo, hi);
  emit(out, pair_report_json(rows));
  for (const PairRow& r : rows)
    if (!r.passed) return 2;
  return 0;
}

struct TrainOpts {
  std::string grid = "16", filters = "low-pass", model = "signnet-deepsets", out;
  int epochs = 2000, cheb = 15, width = 32;
  double lr = 0.02;
  uint64_t seed = 0;
};

int cmd_train(const TrainOpts& o) {
  RegressionConfig cfg;
  auto [h, w] = parse_grid(o.grid);
  cfg.grid_h = h;
  cfg.grid_w = w;
  cfg.filters.clear();
  size_t pos = 0;
  while (pos < o.filters.size()) {
    size_t comma = o.filters.find(',', pos);
    if (comma == std::string::npos) comma = o.filters.size();
    cfg.filters.push_back(o.filters.substr(pos, comma - pos));
    pos = comma + 1;
  }
  cfg.model = o.model;
  cfg.epochs = o.epochs;
  cfg.seed = o.seed;
  cfg.lr = o.lr;
  cfg.cheb_degree = o.cheb;
  cfg.width = o.width;
  emit(o.out, regression_results_json(filter_regression_experiment(cfg)));
  return 0;
}

struct PcaOpts {
  std::string path, model_path, out;
  int index = 0;
  uint64_t seed = 0;
};

int cmd_pca(const PcaOpts& o) {
  Graph g = load_graph(o.path);
  EigDecomp e = eigh(normalized_laplacian(g));
  SignNetModel m;
  if (!o.model_path.empty()) {
    ModelCheckpoint ck = model_from_json(read_file(o.model_path));
    check(ck.kind == "signnet", Err::BadParams, "pca expects a signnet checkpoint");
    m = ck.sign;
  } else {
    m.params.seed = o.seed;
  }
  const Matrix* xp = nullptr;
  if (m.uses_features) {
    check(g.has_features(), Err::BadParams, "model uses features but the graph has none");
    xp = &g.features;
  }
  Matrix feats = signnet_phi_features(m, e.vectors, e.values, xp, &g, o.index);
  std::vector<double> proj = pca_top_component(feats);
  std::string s = "node,pc1\n";
  for (size_t r = 0; r < proj.size(); ++r)
    s += std::to_string(r) + "," + fmt17(proj[r]) + "\n";
  emit(o.out, s);
  return 0;
}

int dispatch(std::vector<std::string>& args) {
  CLI::App app{"spectral positional encodings and invariant models"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "cap worker threads (0 = default)");

  PeOpts pe;
  CLI::App* c_pe = app.add_subcommand("pe", "positional encodings as CSV");
  c_pe->add_option("graph", pe.path, "edge-list or json graph file")->required();
  c_pe->add_option("--kind", pe.kind, "heat|rwpe|diffusion|pstep|gpr|landing");
  c_pe->add_option("--t", pe.ts, "time(s), comma separated");
  c_pe->add_option("--k", pe.ks, "walk length(s), comma separated");
  c_pe->add_option("--gamma", pe.gamma, "p-step gamma");
  c_pe->add_option("--p", pe.p, "p-step power");
  c_pe->add_option("--steps", pe.k, "landing walk length");
  c_pe->add_option("--gammas", pe.gammas, "gpr coefficients from k=0");
  c_pe->add_option("--out", pe.out, "output path (default stdout)");

  std::string sp_path, sp_out;
  double sp_ta = 1e-8, sp_tr = 1e-8;
  CLI::App* c_sp = app.add_subcommand("spectrum", "eigenvalues and eigenspace group sizes");
  c_sp->add_option("graph", sp_path)->required();
  c_sp->add_option("--tol-abs", sp_ta);
  c_sp->add_option("--tol-rel", sp_tr);
  c_sp->add_option("--out", sp_out);

  std::string an_path, an_out;
  CLI::App* c_an = app.add_subcommand("angles", "adjacency eigenspace angle table");
  c_an->add_option("graph", an_path)->required();
  c_an->add_option("--out", an_out);

  std::string cy_path, cy_out;
  CLI::App* c_cy = app.add_subcommand("cycles", "3/4/5-cycle counts from the spectrum");
  c_cy->add_option("graph", cy_path)->required();
  c_cy->add_option("--out", cy_out);

  StatsOpts st;
  CLI::App* c_st = app.add_subcommand("stats", "eigenspace statistics for graphs");
  c_st->add_option("path", st.path, "graph file or directory of graphs");
  c_st->add_option("--family", st.family, "generate instead: cycle|path|grid|complete|erdos_renyi");
  c_st->add_option("--n", st.n);
  c_st->add_option("--height", st.h);
  c_st->add_option("--width", st.w);
  c_st->add_option("--p", st.p);
  c_st->add_option("--seed", st.seed);
  c_st->add_option("--tol-abs", st.tol_abs);
  c_st->add_option("--tol-rel", st.tol_rel);
  c_st->add_option("--out", st.out);

  InvOpts inv;
  CLI::App* c_in = app.add_subcommand("invariance", "randomized invariance certification");
  c_in->add_option("--model", inv.model_path, "model checkpoint json");
  c_in->add_option("--claim", inv.claim, "sign|basis|perm")->required();
  c_in->add_option("--trials", inv.trials);
  c_in->add_option("--seed", inv.seed);
  c_in->add_option("--sampler", inv.sampler, "random|degenerate|simple");
  c_in->add_flag("--ablate-mirror", inv.ablate_mirror, "drop the mirrored term (negative control)");
  c_in->add_flag("--basis-models", inv.basis_models, "perm claim: sample basis models");
  c_in->add_option("--out", inv.out);

  std::string pr_range = "5..12", pr_out;
  CLI::App* c_pr = app.add_subcommand("pair-experiment", "same-spectrum bipartite pair checks");
  c_pr->add_option("--n", pr_range, "size or range, e.g. 5..12");
  c_pr->add_option("--out", pr_out);

  TrainOpts tr;
  CLI::App* c_tr = app.add_subcommand("train-filters", "filter regression on a grid");
  c_tr->add_option("--grid", tr.grid, "side or HxW");
  c_tr->add_option("--filter", tr.filters, "comma-separated filter names");
  c_tr->add_option("--model", tr.model,
                   "signnet-deepsets|basisnet|mlp-signflip-baseline|mlp-absval-baseline");
  c_tr->add_option("--epochs", tr.epochs);
  c_tr->add_option("--lr", tr.lr);
  c_tr->add_option("--cheb", tr.cheb, "spectral feature order");
  c_tr->add_option("--width", tr.width, "baseline hidden width");
  c_tr->add_option("--seed", tr.seed);
  c_tr->add_option("--out", tr.out);

  PcaOpts pc;
  CLI::App* c_pc = app.add_subcommand("pca", "first principal component of branch features");
  c_pc->add_option("graph", pc.path)->required();
  c_pc->add_option("--model", pc.model_path, "signnet checkpoint json");
  c_pc->add_option("--index", pc.index, "eigenvector branch");
  c_pc->add_option("--seed", pc.seed, "fresh-model parameter seed");
  c_pc->add_option("--out", pc.out);

  std::vector<char*> argv;
  argv.reserve(args.size());
  for (std::string& a : args) argv.push_back(a.data());
  try {
    app.parse(int(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  }

  if (threads > 0) kern::set_thread_cap(threads);

  if (app.got_subcommand(c_pe)) return cmd_pe(pe);
  if (app.got_subcommand(c_sp)) return cmd_spectrum(sp_path, sp_out, sp_ta, sp_tr);
  if (app.got_subcommand(c_an)) return cmd_angles(an_path, an_out);
  if (app.got_subcommand(c_cy)) return cmd_cycles(cy_path, cy_out);
  if (app.got_subcommand(c_st)) return cmd_stats(st);
  if (app.got_subcommand(c_in)) return cmd_invariance(inv);
  if (app.got_subcommand(c_pr)) return cmd_pair(pr_range, pr_out);
  if (app.got_subcommand(c_tr)) return cmd_train(tr);
  if (app.got_subcommand(c_pc)) return cmd_pca(pc);
  fail(Err::BadParams, "no subcommand");
}

void emit_error(const std::string& code, const std::string& message) {
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["error"] = {{"code", code}, {"message", message}};
  std::cerr << j.dump() << "\n";
}

}  // namespace

int run_cli(std::vector<std::string> args) {
  try {
    return dispatch(args);
  } catch (const CLI::ParseError& e) {
    emit_error("usage", e.what());
    return 1;
  } catch (const Error& e) {
    emit_error(err_name(e.code()), e.what());
    return 1;
  } catch (const std::exception& e) {
    emit_error("internal", e.what());
    return 1;
  }
}

}  // namespace spe
