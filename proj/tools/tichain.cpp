// tichain: command-line front end for the TI chain library.
//
// Exit status: 0 success or positive verdict, 1 negative verdict, 2 usage or
// input error.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "tichain/bell_polytope.hpp"
#include "tichain/io.hpp"
#include "tichain/marginals.hpp"
#include "tichain/quantum_eval.hpp"
#include "tichain/symmetrize.hpp"
#include "tichain/witnesses.hpp"

using json = nlohmann::json;
using namespace tichain;

namespace {

constexpr int kOk = 0;
constexpr int kNegative = 1;
constexpr int kInputError = 2;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::string format = "json";
  std::string output;
  bool reproducible = false;
};

std::string scalar_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return "";
  return v.dump();
}

// Records under "rows" become a table; otherwise top-level scalars become
// key,value lines.
std::string to_csv(const json& doc) {
  std::ostringstream out;
  if (doc.contains("rows") && doc["rows"].is_array() && !doc["rows"].empty() && doc["rows"][0].is_object()) {
    std::vector<std::string> keys;
    for (const auto& [k, v] : doc["rows"][0].items()) {
      if (!v.is_structured()) keys.push_back(k);
    }
    for (std::size_t i = 0; i < keys.size(); ++i) out << (i ? "," : "") << keys[i];
    out << "\n";
    for (const auto& row : doc["rows"]) {
      for (std::size_t i = 0; i < keys.size(); ++i) {
        out << (i ? "," : "") << (row.contains(keys[i]) ? scalar_text(row[keys[i]]) : "");
      }
      out << "\n";
    }
    return out.str();
  }
  out << "key,value\n";
  for (const auto& [k, v] : doc.items()) {
    if (!v.is_structured()) out << k << "," << scalar_text(v) << "\n";
  }
  return out.str();
}

void emit(const Globals& g, const std::string& command, json payload) {
  json doc = {{"schema", 1}, {"command", command}};
  if (!g.reproducible) {
    doc["timestamp"] = std::chrono::duration_cast<std::chrono::seconds>(
                           std::chrono::system_clock::now().time_since_epoch())
                           .count();
  }
  for (auto& [k, v] : payload.items()) doc[k] = v;
  const std::string text = g.format == "csv" ? to_csv(doc) : doc.dump(2) + "\n";
  if (g.output.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(g.output);
    if (!f) throw InputError("cannot write " + g.output);
    f << text;
  }
}

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InputError("cannot read " + path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

JointDistribution load_distribution(const std::string& path) {
  try {
    return distribution_from_json(json::parse(read_file(path)));
  } catch (const json::exception& e) {
    throw InputError(path + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw InputError(path + ": " + e.what());
  }
}

std::vector<BellInequality> load_inequalities(const std::string& path) {
  std::istringstream in(read_file(path));
  try {
    auto v = read_inequalities(in);
    if (v.empty()) throw InputError(path + ": no inequalities");
    return v;
  } catch (const std::invalid_argument& e) {
    throw InputError(path + ": " + e.what());
  }
}

const BellInequality& builtin(int id) {
  if (id < 1 || id > 11) throw InputError("unknown inequality id " + std::to_string(id) + " (expected 1..11)");
  return table1_inequality(id);
}

int thread_count() {
  if (const char* env = std::getenv("TICHAIN_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n >= 1) return n;
    } catch (const std::exception&) {
    }
    throw InputError("TICHAIN_THREADS must be a positive integer");
  }
  return 1;
}

// Runs f(i) for i in [0, count) on up to TICHAIN_THREADS threads; results
// are stored by index so output order does not depend on scheduling.
template <class F>
std::vector<json> fan_out(int count, F f) {
  std::vector<json> results(count);
  std::vector<std::exception_ptr> errors(count);
  const int workers = std::min(thread_count(), std::max(count, 1));
  std::atomic<int> next{0};
  auto work = [&] {
    for (int i = next++; i < count; i = next++) {
      try {
        results[i] = f(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < workers; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

Eigen::Matrix3d parse_witness(const std::string& spec) {
  if (spec.size() == 2) return CorrelationWitness::from_axes(spec).T;
  std::istringstream in(spec);
  std::vector<double> v;
  for (std::string t; std::getline(in, t, ',');) v.push_back(std::stod(t));
  if (v.size() != 9) throw InputError("--T expects two axis letters or 9 comma-separated numbers");
  Eigen::Matrix3d T;
  for (int i = 0; i < 9; ++i) T(i / 3, i % 3) = v[i];
  return T;
}

json rational_json(const Rational& r) { return to_string(r); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Translation-invariant chains: marginals, witnesses, Bell polytope, quantum values"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("-o,--output", g.output, "Write the report to this file");
  app.add_flag("--reproducible", g.reproducible, "Omit the timestamp field");

  int code = kOk;

  // ---------------------------------------------------------------- marginal
  auto* marginal = app.add_subcommand("marginal", "TI marginals and domino loops");
  marginal->require_subcommand(1);
  std::string dist_file;
  double tol = 1e-10;
  int sites = 0, d = 2, n = 2;
  std::uint64_t max_loops = EnumerationLimits{}.max_loops;

  auto* m_check = marginal->add_subcommand("check", "Test TI consistency of a distribution");
  m_check->add_option("file", dist_file, "Distribution JSON")->required();
  m_check->add_option("--tol", tol, "Tolerance")->check(CLI::PositiveNumber);
  m_check->callback([&] {
    const auto p = load_distribution(dist_file);
    const bool ok = check_ti_consistency(p, tol);
    emit(g, "marginal check", {{"consistent", ok}, {"d", p.d()}, {"n", p.n()}});
    code = ok ? kOk : kNegative;
  });

  auto* m_extend = marginal->add_subcommand("extend", "Extend a TI marginal to more sites");
  m_extend->add_option("file", dist_file, "Distribution JSON")->required();
  m_extend->add_option("--sites", sites, "Target number of sites")->required()->check(CLI::PositiveNumber);
  m_extend->callback([&] {
    const auto p = load_distribution(dist_file);
    try {
      emit(g, "marginal extend", {{"distribution", to_json(extend(p, sites))}});
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
  });

  auto* m_ext = marginal->add_subcommand("extremes", "List the irreducible domino loops");
  m_ext->add_option("--d", d, "Alphabet size")->check(CLI::Range(1, 64));
  m_ext->add_option("--n", n, "Window size")->check(CLI::Range(1, 16));
  m_ext->add_option("--max-loops", max_loops, "Enumeration cap");
  m_ext->callback([&] {
    EnumerationLimits lim;
    lim.max_loops = max_loops;
    const auto loops = enumerate_extreme_points(d, n, lim);
    json rows = json::array();
    for (const auto& l : loops) rows.push_back(to_json(l));
    emit(g, "marginal extremes", {{"d", d}, {"n", n}, {"count", loops.size()}, {"rows", rows}});
  });

  auto* m_dec = marginal->add_subcommand("decompose", "Write a TI marginal as a mixture of loops");
  m_dec->add_option("file", dist_file, "Distribution JSON")->required();
  m_dec->callback([&] {
    const auto p = load_distribution(dist_file);
    LoopDecomposition dec;
    try {
      dec = decompose(p);
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
    json rows = json::array();
    for (const auto& t : dec.terms) {
      json r = to_json(t.loop);
      r["weight"] = t.weight;
      rows.push_back(r);
    }
    emit(g, "marginal decompose",
         {{"terms", dec.terms.size()}, {"reconstruction_error", l1_distance(recombine(dec), p)}, {"rows", rows}});
  });

  // ----------------------------------------------------------------- witness
  auto* witness = app.add_subcommand("witness", "Two-site entanglement witnesses");
  witness->require_subcommand(1);
  std::string tspec = "yx";
  double lambda = 0.0;
  bool threshold = false;

  auto* w_bound = witness->add_subcommand("bound", "TIS bound of a correlation witness");
  w_bound->add_option("--T", tspec, "Axis pair such as yx, or 9 numbers row-major");
  w_bound->callback([&] {
    const auto T = parse_witness(tspec);
    json j = {{"tis_bound", wt_bound(T)}};
    if (tspec == "yx" || tspec == "xy") j["ti_bound"] = ti_sigma_yx_max();
    emit(g, "witness bound", j);
  });

  auto* w_family = witness->add_subcommand("family", "The rho_lambda family");
  auto* lambda_opt = w_family->add_option("--lambda", lambda, "Mixing weight in [0, 1]");
  w_family->add_flag("--threshold", threshold, "Report the PPT threshold");
  w_family->callback([&] {
    json j;
    if (threshold || lambda_opt->count() == 0) {
      j["threshold"] = ppt_threshold();
      j["closed_form"] = ppt_threshold_closed_form();
    }
    if (lambda_opt->count() > 0) {
      try {
        const auto rho = rho_lambda(lambda);
        j["lambda"] = lambda;
        j["ppt"] = is_ppt(rho);
        j["min_pt_eigenvalue"] = min_partial_transpose_eigenvalue(rho, 1);
      } catch (const std::domain_error& e) {
        throw InputError(e.what());
      }
    }
    emit(g, "witness family", j);
  });

  auto* w_report = witness->add_subcommand("report", "Evaluate a witness on rho_lambda");
  w_report->add_option("--lambda", lambda, "Mixing weight in [0, 1]")->required();
  w_report->add_option("--T", tspec, "Axis pair such as yx, or 9 numbers row-major");
  w_report->callback([&] {
    CorrelationWitness w{parse_witness(tspec)};
    try {
      const auto r = evaluate_witness(rho_lambda(lambda), w);
      emit(g, "witness report", to_json(r));
      code = r.violation > 0.0 ? kOk : kNegative;
    } catch (const std::domain_error& e) {
      throw InputError(e.what());
    }
  });

  // -------------------------------------------------------------------- bell
  auto* bell = app.add_subcommand("bell", "Classical TI Bell polytope");
  bell->require_subcommand(1);
  int id = 0;
  bool all_rows = false, count_only = false;
  std::string ineq_file, projection = "nn";
  int box_ring = 6;
  double theta = 0.0, phi = 0.0;

  auto select = [&]() {
    std::vector<BellInequality> v;
    if (!ineq_file.empty()) return load_inequalities(ineq_file);
    if (all_rows) return table1();
    if (id == 0) throw InputError("give --id, --table1 or --file");
    v.push_back(builtin(id));
    return v;
  };
  auto add_selection = [&](CLI::App* c) {
    c->add_option("--id", id, "Builtin inequality id 1..11");
    c->add_flag("--table1", all_rows, "All builtin inequalities");
    c->add_option("--file", ineq_file, "Inequality file");
  };

  auto* b_vert = bell->add_subcommand("vertices", "Vertex behaviors of the polytope");
  b_vert->add_flag("--count-only", count_only, "Only report the count");
  b_vert->callback([&] {
    const auto& v = vertex_behaviors();
    json j = {{"count", v.size()}, {"ambient_dim", affine_dimension(v)}};
    if (!count_only) {
      json rows = json::array();
      for (const auto& b : v) rows.push_back(to_json(b));
      j["vertices"] = rows;
    }
    emit(g, "bell vertices", j);
  });

  auto* b_bound = bell->add_subcommand("bound", "TI local bound");
  add_selection(b_bound);
  b_bound->callback([&] {
    json rows = json::array();
    bool all_match = true;
    for (const auto& q : select()) {
      const Rational L = local_bound(q);
      const bool match = L == q.bound;
      all_match = all_match && match;
      rows.push_back({{"name", q.name}, {"bound", rational_json(L)}, {"stated", rational_json(q.bound)},
                      {"match", match}});
    }
    emit(g, "bell bound", {{"all_match", all_match}, {"rows", rows}});
  });

  auto* b_verify = bell->add_subcommand("verify", "Validity, tightness and facet check");
  add_selection(b_verify);
  b_verify->callback([&] {
    json rows = json::array();
    bool all = true;
    for (const auto& q : select()) {
      const auto f = verify_facet(q);
      all = all && f.is_facet();
      json r = to_json(f);
      r["name"] = q.name;
      rows.push_back(r);
    }
    emit(g, "bell verify", {{"all_facets", all}, {"rows", rows}});
    code = all ? kOk : kNegative;
  });

  auto* b_facets = bell->add_subcommand("facets", "Facets of a projection by double description");
  b_facets->add_option("--projection", projection, "nn, toy or full")->check(CLI::IsMember({"nn", "toy", "full"}));
  b_facets->callback([&] {
    std::vector<ExactBehavior> verts;
    std::vector<int> dims;
    if (projection == "nn") {
      verts = nearest_neighbor_vertices();
      dims = {kE0, kE1, kE12_00, kE12_01, kE12_10, kE12_11};
    } else if (projection == "toy") {
      verts = vertex_behaviors();
      dims = {kE0, kE12_00};
    } else {
      verts = vertex_behaviors();
      for (int i = 0; i < kNumCoords; ++i) dims.push_back(i);
    }
    const auto facets = enumerate_facets(verts, dims);
    json rows = json::array();
    for (const auto& f : facets) rows.push_back(to_json(f));
    const auto classes = symmetry_classes(facets);
    emit(g, "bell facets",
         {{"projection", projection}, {"count", facets.size()}, {"classes", classes.size()}, {"rows", rows}});
  });

  auto* b_gen = bell->add_subcommand("genuine", "Genuine TI nonlocality of the quantum box");
  add_selection(b_gen);
  b_gen->add_option("--ring", box_ring, "Ring size used to compute the quantum box")->check(CLI::Range(3, 10));
  b_gen->add_option("--theta", theta, "Angle theta (file inequalities)");
  b_gen->add_option("--phi", phi, "Angle phi (file inequalities)");
  b_gen->callback([&] {
    const auto ineqs = select();
    std::vector<int> ids;
    if (ineq_file.empty()) {
      if (all_rows) {
        for (int i = 1; i <= 11; ++i) ids.push_back(i);
      } else {
        ids.push_back(id);
      }
    }
    auto rows = fan_out(static_cast<int>(ineqs.size()), [&](int i) {
      const auto& q = ineqs[i];
      MeasurementPair mp{theta, phi};
      if (!ids.empty()) mp = {table2()[ids[i] - 1].theta, table2()[ids[i] - 1].phi};
      const auto gs = ring_ground_state(build_hamiltonian(q, mp), box_ring);
      const auto box = three_site_box(gs.vector, box_ring, mp);
      const auto r = noisy_box_gap(q, box);
      json row = {{"name", q.name},
                  {"quantum_box_value", evaluate(q, box.behavior())},
                  {"best_mixture_value", r.value},
                  {"noise_weight", r.noise_weight},
                  {"gap", r.gap},
                  {"genuine", r.genuine() ? "Y" : "N"},
                  {"relaxation_gap", to_double(genuine_ti_violation_gap(q))}};
      if (!ids.empty()) {
        row["expected"] = table2()[ids[i] - 1].genuine ? "Y" : "N";
      }
      return row;
    });
    bool any = false;
    for (const auto& r : rows) any = any || r["genuine"] == "Y";
    emit(g, "bell genuine", {{"ring", box_ring}, {"rows", rows}});
    if (!all_rows && ineqs.size() == 1) code = any ? kOk : kNegative;
  });

  // ----------------------------------------------------------------- quantum
  auto* quantum = app.add_subcommand("quantum", "Quantum values on periodic rings");
  quantum->require_subcommand(1);
  std::vector<int> rings{6, 8, 10};
  int max_sites = 10, reg_m = 3, ring_n = 9, iters = 30, seed = 0;
  bool random_start = false;

  auto* q_value = quantum->add_subcommand("value", "Ground energy per site at fixed angles");
  q_value->add_option("--id", id, "Builtin inequality id 1..11");
  q_value->add_option("--file", ineq_file, "Inequality file (first record is used)");
  q_value->add_option("--theta", theta, "Angle theta")->required();
  q_value->add_option("--phi", phi, "Angle phi")->required();
  q_value->add_option("--rings", rings, "Ring sizes, increasing")->delimiter(',');
  q_value->add_option("--max-sites", max_sites, "Largest ring allowed");
  q_value->callback([&] {
    const BellInequality q = ineq_file.empty() ? builtin(id) : load_inequalities(ineq_file).front();
    EigenSolverOptions opt;
    opt.max_sites = max_sites;
    GroundResult r;
    try {
      r = quantum_value(q, {theta, phi}, rings, opt);
    } catch (const CapExceeded& e) {
      throw InputError(e.what());
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
    json j = to_json(r);
    j["inequality"] = q.name;
    j["theta"] = theta;
    j["phi"] = phi;
    j["local_bound"] = to_double(q.bound);
    const bool violated = r.extrapolated < to_double(q.bound) - 1e-9;
    j["violation"] = violated;
    emit(g, "quantum value", j);
    code = violated ? kOk : kNegative;
  });

  auto* q_seesaw = quantum->add_subcommand("seesaw", "See-saw over measurements with a register");
  q_seesaw->add_option("--id", id, "Builtin inequality id 1..11")->required();
  q_seesaw->add_option("--m", reg_m, "Register size")->check(CLI::Range(3, 16));
  q_seesaw->add_option("--N", ring_n, "Ring size")->check(CLI::Range(3, 10));
  q_seesaw->add_option("--iters", iters, "Iteration budget")->check(CLI::NonNegativeNumber);
  q_seesaw->add_option("--seed", seed, "Seed for random starts");
  q_seesaw->add_flag("--random-start", random_start, "Random observables instead of the tabulated angles");
  q_seesaw->callback([&] {
    const auto& q = builtin(id);
    SeesawOptions opt;
    opt.m = reg_m;
    opt.N = ring_n;
    opt.max_iters = iters;
    opt.seed = static_cast<std::uint64_t>(seed);
    if (!random_start) opt.init = MeasurementPair{table2()[id - 1].theta, table2()[id - 1].phi};
    const auto r = seesaw(q, opt);
    emit(g, "quantum seesaw", {{"inequality", q.name},
                               {"m", reg_m},
                               {"N", ring_n},
                               {"value", r.value},
                               {"iterations", r.iterations},
                               {"converged", r.converged},
                               {"monotone", r.monotone},
                               {"history", r.history},
                               {"measurements", to_json(r.measurements)}});
    code = r.monotone ? kOk : kNegative;
  });

  auto* q_table = quantum->add_subcommand("table2", "All builtin rows at their tabulated angles");
  q_table->add_option("--rings", rings, "Ring sizes, increasing")->delimiter(',');
  q_table->add_option("--max-sites", max_sites, "Largest ring allowed");
  q_table->callback([&] {
    EigenSolverOptions opt;
    opt.max_sites = max_sites;
    for (int N : rings) {
      if (N > max_sites) throw InputError("ring size exceeds --max-sites");
    }
    auto rows = fan_out(11, [&](int i) {
      const auto& t = table2()[i];
      const auto& q = table1()[i];
      const auto r = quantum_value(q, {t.theta, t.phi}, rings, opt);
      json row = to_json(r);
      row["id"] = i + 1;
      row["reported"] = t.quantum;
      row["difference"] = r.extrapolated - t.quantum;
      row["local_bound"] = to_double(q.bound);
      row["violation"] = r.extrapolated < to_double(q.bound);
      return row;
    });
    emit(g, "quantum table2", {{"rows", rows}});
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInputError;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const CapExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return code;
}
