// matrixchaos: build the energy-dependent unitary edge map of a Hermitian
// matrix, its stochastic counterpart, and the Lyapunov/OTOC diagnostics.
//
// Subcommands: inspect, sweep, spectrum, markov, otoc, ensemble.
// Exit codes: 0 success, 2 usage, 3 input validation, 4 numerical failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "matrixchaos/ensembles.hpp"
#include "matrixchaos/graph.hpp"
#include "matrixchaos/lyapunov.hpp"
#include "matrixchaos/markov.hpp"
#include "matrixchaos/matrix_io.hpp"
#include "matrixchaos/otoc.hpp"
#include "matrixchaos/parallel.hpp"
#include "matrixchaos/quantum_map.hpp"

using json = nlohmann::ordered_json;

namespace {

struct Options {
  std::string input;
  std::string ensemble;
  std::string kind = "complete";
  int d = 3;
  int v = 0;
  double beta = 2.0;
  double alpha = 1.0;
  std::vector<std::string> couplings;
  bool mean_field = false;

  std::string energy_single;
  std::string egrid;
  std::uint64_t seed = 12345;
  int threads = mxc::default_thread_count();
  long long mc_samples = 0;
  int mc_steps = 1000;
  bool bipartite_reduce = false;
  std::string out;
  std::string format;
  double zero_threshold = 1e-14;
  bool symmetrize = false;

  // spectrum
  std::string secular_out;
  // otoc
  int edge_a = 0;
  int edge_b = 1;
  int t_max = 8;
};

int classify_exit(const mxc::Error& e) {
  if (dynamic_cast<const mxc::EigensolveFailure*>(&e) ||
      dynamic_cast<const mxc::DegenerateSpectrum*>(&e) ||
      dynamic_cast<const mxc::ZeroAmplitude*>(&e) ||
      dynamic_cast<const mxc::InconsistentAmplitudes*>(&e))
    return 4;
  return 3;
}

std::vector<double> parse_grid(const std::string& spec) {
  // a:b:n -> n points from a to b inclusive
  const auto first = spec.find(':');
  const auto second = spec.find(':', first + 1);
  if (first == std::string::npos || second == std::string::npos)
    throw mxc::ParseError("--egrid expects start:stop:count");
  double a = 0.0, b = 0.0;
  long n = 0;
  try {
    a = std::stod(spec.substr(0, first));
    b = std::stod(spec.substr(first + 1, second - first - 1));
    n = std::stol(spec.substr(second + 1));
  } catch (const std::exception&) {
    throw mxc::ParseError("--egrid expects numeric start:stop:count");
  }
  if (n < 1) throw mxc::ParseError("--egrid needs at least one point");
  std::vector<double> grid(n);
  for (long i = 0; i < n; ++i)
    grid[i] = n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return grid;
}

mxc::SpinCoupling parse_coupling(const std::string& text) {
  const auto first = text.find(':');
  const auto second = text.find(':', first + 1);
  if (first == std::string::npos || second == std::string::npos)
    throw mxc::ParseError("--j expects spin:spin:value");
  try {
    return {std::stoi(text.substr(0, first)), std::stoi(text.substr(first + 1, second - first - 1)),
            std::stod(text.substr(second + 1))};
  } catch (const std::exception&) {
    throw mxc::ParseError("--j expects numeric spin:spin:value");
  }
}

mxc::HermitianMatrix build_ensemble_from_options(const Options& o) {
  if (o.ensemble == "regular") {
    mxc::RegularGraphSpec spec;
    spec.degree = o.d;
    spec.vertices = o.v > 0 ? o.v : o.d + 1;
    spec.seed = o.seed;
    if (o.kind == "complete")
      spec.kind = mxc::RegularGraphSpec::Kind::complete;
    else if (o.kind == "circulant")
      spec.kind = mxc::RegularGraphSpec::Kind::circulant;
    else if (o.kind == "random")
      spec.kind = mxc::RegularGraphSpec::Kind::random;
    else
      throw mxc::ParseError("--kind must be complete, circulant or random");
    return mxc::build_regular(spec);
  }
  if (o.ensemble == "spin") {
    mxc::SpinGraphSpec spec;
    spec.spins = o.v > 0 ? o.v : 4;
    spec.alpha = o.alpha;
    for (const auto& text : o.couplings) spec.couplings.push_back(parse_coupling(text));
    return mxc::build_spin_hamiltonian(spec);
  }
  if (o.ensemble == "gbe") {
    if (o.mean_field) return mxc::gbe_mean_field(o.v > 0 ? o.v : 50, o.beta);
    mxc::GbetaESpec spec;
    spec.size = o.v > 0 ? o.v : 50;
    spec.beta = o.beta;
    spec.seed = o.seed;
    return mxc::gbe_sample(spec);
  }
  throw mxc::ParseError("--ensemble must be regular, spin or gbe");
}

mxc::HermitianMatrix matrix_from_spec_document(const json& doc, const Options& o) {
  const std::string kind = doc.at("ensemble").get<std::string>();
  if (kind == "regular") {
    mxc::RegularGraphSpec spec;
    spec.degree = doc.at("d").get<int>();
    spec.vertices = doc.at("v").get<int>();
    spec.seed = doc.value("seed", o.seed);
    const std::string name = doc.value("kind", "complete");
    spec.kind = name == "circulant"  ? mxc::RegularGraphSpec::Kind::circulant
                : name == "random"   ? mxc::RegularGraphSpec::Kind::random
                : name == "complete" ? mxc::RegularGraphSpec::Kind::complete
                                     : throw mxc::ParseError("unknown regular kind " + name);
    return mxc::build_regular(spec);
  }
  if (kind == "spin") {
    mxc::SpinGraphSpec spec;
    spec.spins = doc.at("spins").get<int>();
    spec.alpha = doc.at("alpha").get<double>();
    for (const auto& item : doc.at("couplings"))
      spec.couplings.push_back({item.at(0).get<int>(), item.at(1).get<int>(), item.at(2).get<double>()});
    return mxc::build_spin_hamiltonian(spec);
  }
  if (kind == "gbe") {
    if (doc.value("mode", "sample") == std::string("mean-field"))
      return mxc::gbe_mean_field(doc.at("v").get<int>(), doc.at("beta").get<double>());
    mxc::GbetaESpec spec;
    spec.size = doc.at("v").get<int>();
    spec.beta = doc.at("beta").get<double>();
    spec.seed = doc.value("seed", o.seed);
    return mxc::gbe_sample(spec);
  }
  throw mxc::ParseError("unknown ensemble kind in spec document: " + kind);
}

std::string slurp(const std::string& path) {
  if (path == "-") {
    std::ostringstream buffer;
    buffer << std::cin.rdbuf();
    return buffer.str();
  }
  std::ifstream in(path);
  if (!in) throw mxc::ParseError("cannot open input file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

mxc::HermitianMatrix resolve_matrix(const Options& o) {
  if (!o.input.empty() && !o.ensemble.empty())
    throw mxc::ParseError("give either --input or --ensemble, not both");
  if (!o.ensemble.empty()) return build_ensemble_from_options(o);
  if (o.input.empty()) throw mxc::ParseError("an input matrix is required (--input or --ensemble)");

  json doc;
  try {
    doc = json::parse(slurp(o.input));
  } catch (const nlohmann::json::exception& e) {
    throw mxc::ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (doc.is_object() && doc.contains("ensemble")) return matrix_from_spec_document(doc, o);
  // re-apply CLI-level matrix options unless the document pins them
  if (doc.is_object() && !doc.contains("zero_threshold") && o.zero_threshold != 1e-14)
    doc["zero_threshold"] = o.zero_threshold;
  if (doc.is_object() && !doc.contains("symmetrize") && o.symmetrize) doc["symmetrize"] = true;
  return mxc::load_matrix_document(doc);
}

/// Semantic run configuration echoed into every output. The parallelism
/// degree is deliberately excluded: it affects scheduling, never results.
json config_echo(const std::string& command, const Options& o) {
  json cfg;
  cfg["command"] = command;
  if (!o.input.empty()) cfg["input"] = o.input;
  if (!o.ensemble.empty()) {
    json ens;
    ens["name"] = o.ensemble;
    if (o.ensemble == "regular") {
      ens["d"] = o.d;
      ens["v"] = o.v > 0 ? o.v : o.d + 1;
      ens["kind"] = o.kind;
      ens["seed"] = o.seed;
    } else if (o.ensemble == "spin") {
      ens["spins"] = o.v > 0 ? o.v : 4;
      ens["alpha"] = o.alpha;
      ens["j"] = o.couplings;
    } else if (o.ensemble == "gbe") {
      ens["v"] = o.v > 0 ? o.v : 50;
      ens["beta"] = o.beta;
      ens["mean_field"] = o.mean_field;
      if (!o.mean_field) ens["seed"] = o.seed;
    }
    cfg["ensemble"] = ens;
  }
  if (!o.energy_single.empty()) cfg["energy"] = o.energy_single;
  if (!o.egrid.empty()) cfg["egrid"] = o.egrid;
  cfg["seed"] = o.seed;
  if (o.mc_samples > 0) {
    cfg["mc_samples"] = o.mc_samples;
    cfg["mc_steps"] = o.mc_steps;
  }
  if (o.bipartite_reduce) cfg["bipartite_reduce"] = true;
  if (o.zero_threshold != 1e-14) cfg["zero_threshold"] = o.zero_threshold;
  if (o.symmetrize) cfg["symmetrize"] = true;
  return cfg;
}

void write_text(const std::string& text, const std::string& out_path) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw mxc::ParseError("cannot open output file: " + out_path);
  out << text;
}

std::vector<double> energies_from_options(const Options& o, bool allow_single_only = false) {
  if (!o.energy_single.empty() && !o.egrid.empty())
    throw mxc::ParseError("give either --energy or --egrid, not both");
  if (!o.energy_single.empty()) {
    try {
      return {std::stod(o.energy_single)};
    } catch (const std::exception&) {
      throw mxc::ParseError("--energy expects a number");
    }
  }
  if (!o.egrid.empty()) {
    if (allow_single_only) throw mxc::ParseError("this command takes a single --energy");
    return parse_grid(o.egrid);
  }
  throw mxc::ParseError("an energy is required (--energy or --egrid)");
}

// ---------------------------------------------------------------------------
// inspect
// ---------------------------------------------------------------------------

int cmd_inspect(const Options& o) {
  const auto h = resolve_matrix(o);
  const auto g = mxc::build_graph(h);
  const auto gd = mxc::gershgorin(h);
  const bool bipartite = g.bipartition().has_value();
  const json cfg = config_echo("inspect", o);

  if (o.format == "json") {
    json doc;
    doc["config"] = cfg;
    doc["vertices"] = g.vertex_count();
    doc["directed_edges"] = g.edge_count();
    doc["degrees"] = g.degrees();
    auto gamma = json::array();
    for (int v = 0; v < h.size(); ++v) gamma.push_back(gd.gamma[v]);
    doc["gershgorin"] = gamma;
    doc["connected"] = true;
    doc["bipartite"] = bipartite;
    write_text(doc.dump(2) + "\n", o.out);
    return 0;
  }

  std::ostringstream text;
  text << "# config " << cfg.dump() << "\n";
  text << "vertices: " << g.vertex_count() << "\n";
  text << "directed_edges: " << g.edge_count() << "\n";
  text << "degrees:";
  for (int v = 0; v < g.vertex_count(); ++v) text << ' ' << g.degree(v);
  text << "\ngershgorin:";
  for (int v = 0; v < h.size(); ++v) text << ' ' << mxc::format_g17(gd.gamma[v]);
  text << "\nconnected: true\n";
  text << "bipartite: " << (bipartite ? "true" : "false") << "\n";
  write_text(text.str(), o.out);
  return 0;
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

struct SweepRow {
  double energy = 0.0;
  bool ok = false;
  std::string error;
  double lambda_mean = 0.0;
  double lambda_thermo = 0.0;
  double var_thermo = 0.0;
  double var_spectral = 0.0;
  double var_literal = 0.0;
  double local_min = 0.0;
  double local_max = 0.0;
  double gap = 0.0;
  bool minus_one = false;
  double abs_zeta = 0.0;
  std::vector<double> per_edge;
  std::vector<double> per_vertex;
  std::optional<mxc::McResult> mc;
};

int cmd_sweep(const Options& o) {
  const auto h = resolve_matrix(o);
  const auto g = mxc::build_graph(h);
  const auto energies = energies_from_options(o);
  const bool want_json = o.format == "json";

  std::vector<SweepRow> rows(energies.size());
  mxc::parallel_for(static_cast<int>(energies.size()), o.threads, [&](int i) {
    SweepRow& row = rows[i];
    row.energy = energies[i];
    try {
      const auto u = mxc::assemble_u(h, g, row.energy);
      const auto b = mxc::build_b(u);
      row.lambda_mean = mxc::mean_lyapunov(b);
      const auto local = mxc::local_lyapunov(b, g);
      row.local_min = local.per_edge.minCoeff();
      row.local_max = local.per_edge.maxCoeff();
      const auto thermo = mxc::thermo_lyapunov(b);
      row.lambda_thermo = thermo.lambda;
      row.var_thermo = thermo.variance;
      const auto spec = mxc::spectrum_b(b);
      row.gap = spec.gap;
      row.minus_one = spec.minus_one_present;
      row.abs_zeta = std::abs(mxc::secular(h, g, row.energy).zeta);
      if (want_json) {
        const auto var = mxc::variance_lyapunov(b, spec);
        row.var_spectral = var.spectral;
        row.var_literal = var.literal;
        row.per_edge.assign(local.per_edge.data(), local.per_edge.data() + local.per_edge.size());
        row.per_vertex.assign(local.per_vertex.data(),
                              local.per_vertex.data() + local.per_vertex.size());
        if (o.mc_samples > 0)
          row.mc = mxc::mc_lyapunov(b, o.mc_steps, o.mc_samples, o.seed, 1);
      }
      row.ok = true;
    } catch (const mxc::Error& e) {
      row.error = e.what();
    }
  });

  const json cfg = config_echo("sweep", o);
  if (want_json) {
    const auto bounds = mxc::lyapunov_bounds(g);
    json doc;
    doc["config"] = cfg;
    json jbounds;
    jbounds["global"] = bounds.global;
    auto edge_bounds = json::array();
    for (int e = 0; e < bounds.per_edge.size(); ++e) edge_bounds.push_back(bounds.per_edge[e]);
    auto vertex_bounds = json::array();
    for (int v = 0; v < bounds.per_vertex.size(); ++v) vertex_bounds.push_back(bounds.per_vertex[v]);
    jbounds["per_edge"] = edge_bounds;
    jbounds["per_vertex"] = vertex_bounds;
    doc["bounds"] = jbounds;
    auto jrows = json::array();
    for (const SweepRow& row : rows) {
      json r;
      r["E"] = row.energy;
      if (!row.ok) {
        r["error"] = row.error;
        jrows.push_back(r);
        continue;
      }
      r["lambda_mean"] = row.lambda_mean;
      r["lambda_thermo"] = row.lambda_thermo;
      r["lambda_var_thermo"] = row.var_thermo;
      r["lambda_var_spectral"] = row.var_spectral;
      r["lambda_var_spectral_literal"] = row.var_literal;
      if (row.mc) {
        r["lambda_mc"] = row.mc->mean;
        r["mc_stderr"] = row.mc->std_error;
        r["mc_variance"] = row.mc->variance;
      }
      r["per_edge"] = row.per_edge;
      r["per_vertex"] = row.per_vertex;
      r["gap"] = row.gap;
      r["minus_one_present"] = row.minus_one;
      r["abs_zeta"] = row.abs_zeta;
      json methods;
      methods["lambda_mean"] = "closed-form";
      methods["lambda_thermo"] = "thermo";
      methods["lambda_var_thermo"] = "thermo";
      methods["lambda_var_spectral"] = "spectral";
      if (row.mc) methods["lambda_mc"] = "monte-carlo";
      r["methods"] = methods;
      jrows.push_back(r);
    }
    doc["rows"] = jrows;
    write_text(doc.dump(2) + "\n", o.out);
    return 0;
  }

  std::ostringstream text;
  text << "# config " << cfg.dump() << "\n";
  text << "E,lambda_mean,lambda_var,local_min,local_max,gap,abs_zeta,error\n";
  for (const SweepRow& row : rows) {
    text << mxc::format_g17(row.energy) << ',';
    if (row.ok) {
      text << mxc::format_g17(row.lambda_mean) << ',' << mxc::format_g17(row.var_thermo) << ','
           << mxc::format_g17(row.local_min) << ',' << mxc::format_g17(row.local_max) << ','
           << mxc::format_g17(row.gap) << ',' << mxc::format_g17(row.abs_zeta) << ",\n";
    } else {
      std::string msg = row.error;
      for (char& c : msg)
        if (c == ',' || c == '\n') c = ';';
      text << ",,,,,," << msg << "\n";
    }
  }
  write_text(text.str(), o.out);
  return 0;
}

// ---------------------------------------------------------------------------
// spectrum
// ---------------------------------------------------------------------------

int cmd_spectrum(const Options& o) {
  const auto h = resolve_matrix(o);
  const auto g = mxc::build_graph(h);

  double lo = 0.0, hi = 0.0, step = 0.0;
  if (!o.egrid.empty()) {
    const auto grid = parse_grid(o.egrid);
    if (grid.size() < 2) throw mxc::ParseError("--egrid for spectrum needs at least two points");
    lo = grid.front();
    hi = grid.back();
    step = (hi - lo) / static_cast<double>(grid.size() - 1);
  } else {
    const auto hull = mxc::spectral_hull(h);
    const double margin = 0.05 * (hull.second - hull.first) + 0.1;
    lo = hull.first - margin;
    hi = hull.second + margin;
    const int points = std::max(201, 25 * h.size());
    step = (hi - lo) / points;
  }

  mxc::FindSpectrumOptions fopts;
  fopts.bipartite_reduce = o.bipartite_reduce;
  fopts.threads = o.threads;
  const auto result = mxc::find_spectrum(h, g, lo, hi, step, fopts);

  if (!o.secular_out.empty()) {
    std::ostringstream csv;
    csv << "# config " << config_echo("spectrum", o).dump() << "\n";
    csv << "E,re_zeta,im_zeta,abs_zeta\n";
    const int n = static_cast<int>(std::ceil((hi - lo) / step)) + 1;
    std::vector<mxc::SecularValue> values(n);
    mxc::parallel_for(n, o.threads, [&](int i) {
      const double e = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
      values[i] = mxc::secular(h, g, e);
    });
    for (const auto& s : values)
      csv << mxc::format_g17(s.energy.real()) << ',' << mxc::format_g17(s.zeta.real()) << ','
          << mxc::format_g17(s.zeta.imag()) << ',' << mxc::format_g17(std::abs(s.zeta)) << "\n";
    write_text(csv.str(), o.secular_out);
  }

  const json cfg = config_echo("spectrum", o);
  if (o.format == "json") {
    json doc;
    doc["config"] = cfg;
    auto roots = json::array();
    for (const auto& r : result.roots) {
      json jr;
      jr["root"] = r.value;
      jr["multiplicity"] = r.multiplicity;
      jr["residual"] = r.residual;
      roots.push_back(jr);
    }
    doc["roots"] = roots;
    doc["warnings"] = result.warnings;
    write_text(doc.dump(2) + "\n", o.out);
    return 0;
  }

  std::ostringstream text;
  text << "# config " << cfg.dump() << "\n";
  text << "root,multiplicity,residual\n";
  for (const auto& r : result.roots)
    text << mxc::format_g17(r.value) << ',' << r.multiplicity << ',' << mxc::format_g17(r.residual)
         << "\n";
  for (const auto& w : result.warnings) text << "# warning: " << w << "\n";
  write_text(text.str(), o.out);
  return 0;
}

// ---------------------------------------------------------------------------
// markov
// ---------------------------------------------------------------------------

int cmd_markov(const Options& o, const std::string& b_out) {
  const auto h = resolve_matrix(o);
  const auto g = mxc::build_graph(h);
  const double energy = energies_from_options(o, /*allow_single_only=*/true)[0];

  auto u = mxc::assemble_u(h, g, energy);
  if (o.bipartite_reduce) u = mxc::bipartite_reduce(u, g);
  const auto b = mxc::build_b(u);
  const auto spec = mxc::spectrum_b(b);
  const json cfg = config_echo("markov", o);

  if (!b_out.empty()) {
    std::ostringstream csv;
    csv << "# config " << cfg.dump() << "\n";
    for (int r = 0; r < b.dimension(); ++r) {
      for (int c = 0; c < b.dimension(); ++c)
        csv << (c ? "," : "") << mxc::format_g17(b.matrix(r, c));
      csv << "\n";
    }
    write_text(csv.str(), b_out);
  }

  json doc;
  doc["config"] = cfg;
  doc["energy"] = energy;
  doc["dimension"] = b.dimension();
  doc["reduced"] = u.reduced;
  doc["gap"] = spec.gap;
  doc["mixing"] = spec.mixing;
  doc["minus_one_present"] = spec.minus_one_present;
  auto eigs = json::array();
  for (Eigen::Index k = 0; k < spec.eigenvalues.size(); ++k)
    eigs.push_back({spec.eigenvalues[k].real(), spec.eigenvalues[k].imag()});
  doc["eigenvalues"] = eigs;

  if (o.format == "text") {
    std::ostringstream text;
    text << "# config " << cfg.dump() << "\n";
    text << "energy: " << mxc::format_g17(energy) << "\n";
    text << "dimension: " << b.dimension() << "\n";
    text << "gap: " << mxc::format_g17(spec.gap) << "\n";
    text << "mixing: " << (spec.mixing ? "true" : "false") << "\n";
    text << "minus_one_present: " << (spec.minus_one_present ? "true" : "false") << "\n";
    write_text(text.str(), o.out);
  } else {
    write_text(doc.dump(2) + "\n", o.out);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// otoc
// ---------------------------------------------------------------------------

int cmd_otoc(const Options& o) {
  const auto h = resolve_matrix(o);
  const auto g = mxc::build_graph(h);
  const double energy = energies_from_options(o, /*allow_single_only=*/true)[0];
  const auto u = mxc::assemble_u(h, g, energy);
  const auto b = mxc::build_b(u);

  if (o.edge_a < 0 || o.edge_a >= g.edge_count() || o.edge_b < 0 || o.edge_b >= g.edge_count())
    throw mxc::PreconditionError("edge indices must lie in [0, D)");

  std::ostringstream csv;
  csv << "# config " << config_echo("otoc", o).dump() << "\n";
  csv << "t,a,b,lhs,rhs_formula,u_abs2,n_trajectories,coef_lhs,coef_rhs\n";
  for (int t = 1; t <= o.t_max; ++t) {
    const auto value = mxc::otoc_norm(u, t, o.edge_a, o.edge_b);
    const auto set = mxc::enumerate_trajectories(g, o.edge_a, o.edge_b, t);
    csv << t << ',' << o.edge_a << ',' << o.edge_b << ',' << mxc::format_g17(value.lhs) << ','
        << mxc::format_g17(value.rhs) << ',' << mxc::format_g17(value.transition_probability) << ','
        << set.count() << ',';
    if (set.count() > 0 && value.transition_probability > 0.0) {
      const auto bound = mxc::coef_bound(b, set, u);
      csv << mxc::format_g17(bound.lhs) << ',' << mxc::format_g17(bound.rhs);
    } else {
      csv << ',';
    }
    csv << "\n";
  }
  write_text(csv.str(), o.out);
  return 0;
}

// ---------------------------------------------------------------------------
// ensemble
// ---------------------------------------------------------------------------

int cmd_ensemble(const Options& o) {
  if (o.ensemble.empty()) throw mxc::ParseError("--ensemble is required");
  const auto h = build_ensemble_from_options(o);
  json doc = mxc::matrix_document(h);
  json out;
  out["config"] = config_echo("ensemble", o);
  for (auto& [key, value] : doc.items()) out[key] = value;
  write_text(out.dump(2) + "\n", o.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"energy-dependent edge maps, Markov dynamics and Lyapunov exponents of Hermitian matrices"};
  app.require_subcommand(1);

  Options o;
  std::string b_out;

  auto add_matrix_flags = [&](CLI::App* cmd) {
    cmd->add_option("--input", o.input, "matrix or ensemble-spec document (JSON; '-' for stdin)");
    cmd->add_option("--ensemble", o.ensemble, "inline ensemble: regular, spin or gbe");
    cmd->add_option("--d", o.d, "regular ensemble degree");
    cmd->add_option("--v", o.v, "size parameter (vertices, spins, or sites)");
    cmd->add_option("--kind", o.kind, "regular construction: complete, circulant, random");
    cmd->add_option("--beta", o.beta, "tridiagonal ensemble beta");
    cmd->add_option("--alpha", o.alpha, "spin interaction strength");
    cmd->add_option("--j", o.couplings, "spin coupling spin:spin:value (repeatable)");
    cmd->add_flag("--mean-field", o.mean_field, "use the mean-field tridiagonal limit");
    cmd->add_option("--seed", o.seed, "random seed");
    cmd->add_option("--threads", o.threads, "worker threads (default MATRIXCHAOS_THREADS or hardware)");
    cmd->add_option("--out", o.out, "output path (default stdout)");
    cmd->add_option("--format", o.format, "output format: csv, json or text");
    cmd->add_option("--zero-threshold", o.zero_threshold, "magnitude below which entries are not edges");
    cmd->add_flag("--symmetrize", o.symmetrize, "complete missing conjugate triplets");
  };

  auto* inspect = app.add_subcommand("inspect", "graph, degrees and Gershgorin data");
  add_matrix_flags(inspect);

  auto* sweep = app.add_subcommand("sweep", "Lyapunov data over an energy grid");
  add_matrix_flags(sweep);
  sweep->add_option("--energy", o.energy_single, "single energy");
  sweep->add_option("--egrid", o.egrid, "energy grid start:stop:count");
  sweep->add_option("--mc-samples", o.mc_samples, "Monte Carlo trajectories per energy (json format)");
  sweep->add_option("--mc-steps", o.mc_steps, "Monte Carlo trajectory length");

  auto* spectrum = app.add_subcommand("spectrum", "real zeros of the secular determinant");
  add_matrix_flags(spectrum);
  spectrum->add_option("--egrid", o.egrid, "scan window start:stop:count");
  spectrum->add_flag("--bipartite-reduce", o.bipartite_reduce, "scan the halved map of a bipartite graph");
  spectrum->add_option("--secular-out", o.secular_out, "also write the secular sweep CSV here");

  auto* markov = app.add_subcommand("markov", "stochastic map export and spectral report");
  add_matrix_flags(markov);
  markov->add_option("--energy", o.energy_single, "map energy");
  markov->add_flag("--bipartite-reduce", o.bipartite_reduce, "report on the halved bipartite map");
  markov->add_option("--b-out", b_out, "write the dense transition matrix CSV here");

  auto* otoc = app.add_subcommand("otoc", "projector commutator identity and trajectory sums");
  add_matrix_flags(otoc);
  otoc->add_option("--energy", o.energy_single, "map energy");
  otoc->add_option("--edge-a", o.edge_a, "first edge index");
  otoc->add_option("--edge-b", o.edge_b, "second edge index");
  otoc->add_option("--t-max", o.t_max, "largest step count (capped at 12)");

  auto* ensemble = app.add_subcommand("ensemble", "emit a generated matrix document");
  add_matrix_flags(ensemble);

  CLI11_PARSE(app, argc, argv);

  try {
    if (inspect->parsed()) return cmd_inspect(o);
    if (sweep->parsed()) return cmd_sweep(o);
    if (spectrum->parsed()) return cmd_spectrum(o);
    if (markov->parsed()) return cmd_markov(o, b_out);
    if (otoc->parsed()) return cmd_otoc(o);
    if (ensemble->parsed()) return cmd_ensemble(o);
  } catch (const mxc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return classify_exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 2;
}
