#pragma once

// Experiment driver behind the ergopt command-line tool. run() executes one
// command, writes JSON (and optional CSV/SVG) artifacts and returns the exit
// status: 0 success, 1 input or budget error, 2 certificate failure.

#include <iostream>
#include <random>

#include "adapt.hpp"
#include "io.hpp"
#include "props.hpp"
#include "svg.hpp"

namespace ergopt {

struct ExperimentConfig {
  std::string command;
  std::string cocycle;     ///< path to a cocycle document
  std::string observable;  ///< builtin name(s) or path
  int max_period = 8;
  int depth = 12;
  int k = 3;
  int directions = 64;
  std::string theta = "auto";  ///< "auto", "none" or comma-separated indices
  std::uint64_t seed = 7;
  int samples = 200;
  int cases = 1000;
  int terms = 30;
  double epsilon = std::numeric_limits<double>::quiet_NaN();  ///< NaN: use the envelope gap
  std::vector<int> depths;                                   ///< domination depths; empty: derived from depth
  std::string necklace;                                      ///< favored-measure diagnostic orbit
  std::string out;
  std::string svg;
  std::string csv;
  std::string support_csv;
  bool deterministic = false;
  int workers = 0;
};

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> c{"birkhoff", "rotation", "fish", "jsr", "morse", "adapt", "homoclinic", "props"};
  return c;
}

/// Outcome of one command before it is written out.
struct RunResult {
  Json json;
  bool certificate_ok = true;
  std::string failure;  ///< names the failed certificate
  std::string svg;
  std::string csv;
  std::string support_csv;
};

namespace detail {

inline Json word_json(const Word& w, int k) { return word_to_string(w, k); }

inline Json vertices_json(const std::vector<InnerVertex>& vs) {
  Json a = Json::array();
  for (const auto& v : vs) {
    Json e;
    e["point"] = v.point;
    e["witness"] = v.witness.str();
    e["period"] = v.witness.period();
    e["sturmian"] = v.sturmian;
    a.push_back(e);
  }
  return a;
}

inline Json convex_json(const ConvexApprox& ca) {
  Json j;
  j["max_period"] = ca.max_period;
  j["depth"] = ca.depth;
  j["inner_vertices"] = vertices_json(ca.inner);
  j["all_sturmian"] = std::all_of(ca.inner.begin(), ca.inner.end(), [](const InnerVertex& v) { return v.sturmian; });
  j["directions"] = ca.directions;
  j["inner_support"] = ca.inner_support;
  j["outer_support"] = ca.outer_support;
  j["hausdorff_gap"] = ca.hausdorff_gap;
  j["min_slack"] = ca.min_slack;
  return j;
}

inline std::vector<int> default_depths(int depth) {
  std::set<int> s{std::max(1, depth / 2), std::max(1, (3 * depth) / 4), std::max(1, depth)};
  return {s.begin(), s.end()};
}

inline ThetaSet parse_theta(const std::string& spec, int dim, const ThetaSet& fallback) {
  if (spec.empty() || spec == "auto") return fallback;
  if (spec == "none") return ThetaSet::empty(dim);
  std::set<int> idx;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      const int i = std::stoi(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
      idx.insert(i);
    } catch (const std::logic_error&) {
      throw InvalidArgument("bad --theta entry '" + tok + "'");
    }
  }
  return ThetaSet(dim, idx);
}

inline Json theta_json(const ThetaSet& t) { return Json(std::vector<int>(t.indices().begin(), t.indices().end())); }

inline Json domination_json(const DominationReport& r) {
  Json j;
  j["depths"] = r.depths;
  j["kappa"] = r.kappa;
  j["rates"] = r.rates;
  j["growth"] = r.growth;
  Json z = Json::array();
  for (const auto& n : r.zero_gap_orbit) z.push_back(n.period() > 0 ? Json(n.str()) : Json(nullptr));
  j["zero_gap_orbit"] = z;
  Json v = Json::array();
  for (auto x : r.verdicts) v.push_back(to_string(x));
  j["verdicts"] = v;
  return j;
}

inline std::vector<std::vector<double>> rows(const std::vector<Vector>& vs) {
  std::vector<std::vector<double>> out;
  for (const auto& v : vs) out.emplace_back(v.data(), v.data() + v.size());
  return out;
}

inline Json spectrum_json(const SpectrumApprox& s, int k) {
  Json j;
  Json lp = Json::array();
  for (const auto& [v, n] : s.lplus) {
    Json e;
    e["vector"] = v.to_std();
    e["witness"] = n.str(k);
    lp.push_back(e);
  }
  j["lplus"] = lp;
  j["theta"] = theta_json(s.theta);
  j["max_period"] = s.max_period;
  j["depth"] = s.depth;
  j["directions"] = rows(s.directions);
  Json inner;
  inner["support"] = s.inner;
  inner["convex"] = s.inner_convex;
  inner["symmetric"] = s.inner_symmetric;
  Json v2 = Json::array();
  for (const auto& v : s.inner_vertices_2d) v2.push_back(v.to_std());
  inner["vertices_2d"] = v2;
  j["inner"] = inner;
  Json outer;
  outer["support"] = s.outer;
  outer["symmetric"] = s.outer_symmetric;
  j["outer"] = outer;
  j["gap"] = s.gap;
  j["min_slack"] = s.min_slack;
  return j;
}

inline std::vector<std::vector<double>> as_points(const std::vector<InnerVertex>& vs) {
  std::vector<std::vector<double>> out;
  for (const auto& v : vs) out.push_back(v.point);
  return out;
}

/// Scatter of all periodic averages with the inner hull.
inline std::string rotation_svg(const VectorObservable& f, const ConvexApprox& ca, const std::string& title) {
  SvgPlot plot;
  plot.title = title;
  plot.points = plot_coordinates(as_points(periodic_averages(f, ca.max_period)));
  plot.hull = plot_coordinates(as_points(ca.inner));
  return render_svg(plot);
}

/// Lyapunov samples of a d = 2 or 3 cocycle in the plane, with their hull.
inline std::string spectrum_svg(const SpectrumApprox& s, const std::string& title) {
  std::vector<std::vector<double>> pts;
  for (const auto& [v, n] : s.lplus) pts.push_back(v.to_std());
  SvgPlot plot;
  plot.title = title;
  plot.points = plot_coordinates(pts);
  std::vector<InnerVertex> proj;
  for (std::size_t i = 0; i < plot.points.size(); ++i)
    proj.push_back({{plot.points[i][0], plot.points[i][1]}, s.lplus[i].second, false});
  for (const auto& v : hull2d(proj)) plot.hull.push_back({v.point[0], v.point[1]});
  return render_svg(plot);
}

inline Cocycle load_cocycle(const ExperimentConfig& c) {
  if (c.cocycle.empty()) throw InvalidArgument(c.command + " needs --cocycle FILE");
  return parse_cocycle(load_json_file(c.cocycle));
}

// ---------------------------------------------------------------------------
// commands

inline RunResult run_birkhoff(const ExperimentConfig& c) {
  const std::string name = c.observable.empty() ? "cos_angle" : c.observable;
  const Observable f = load_observable(name);
  const auto b = beta_bracket(f, c.max_period, c.depth);
  const auto a = alpha_bracket(f, c.max_period, c.depth);
  RunResult r;
  Json& j = r.json;
  j["command"] = "birkhoff";
  j["observable"] = f.name();
  j["max_period"] = c.max_period;
  j["depth"] = c.depth;
  j["beta"] = {{"lower", b.lower}, {"witness", b.lower_witness.str(f.base().alphabet_size())},
               {"upper", b.upper}, {"upper_depth", b.upper_depth}};
  j["alpha"] = {{"lower", a.lower}, {"lower_depth", a.lower_depth},
                {"upper", a.upper}, {"witness", a.upper_witness.str(f.base().alphabet_size())}};
  if (f.is_locally_constant()) {
    const int window = f.window() + 2;
    const auto h = refine_subaction(f, b.lower, b.upper, window, 400);
    Json s;
    s["window"] = h.window;
    s["beta_est"] = h.beta_est;
    s["defect"] = h.defect;
    s["sweeps"] = h.sweeps;
    if (h.defect <= 1e-9) {
      Json m = Json::array();
      for (const auto& w : maximizing_set(f, h, 1e-9)) m.push_back(word_json(w, f.base().alphabet_size()));
      s["maximizing_windows"] = m;
    }
    j["subaction"] = s;
  }
  if (b.lower > b.upper + 1e-12) {
    r.certificate_ok = false;
    r.failure = "beta bracket: periodic lower bound exceeds the envelope upper bound";
  }
  return r;
}

inline RunResult run_rotation_like(const ExperimentConfig& c, bool fish) {
  const VectorObservable f = fish ? VectorObservable::fish() : load_vector_observable(c.observable);
  const ConvexApprox ca = convex_approx(f, c.max_period, c.depth, c.directions);
  RunResult r;
  r.json["command"] = fish ? "fish" : "rotation";
  r.json["dim"] = f.dim();
  const Json body = convex_json(ca);
  for (const auto& [key, v] : body.items()) r.json[key] = v;
  if (ca.min_slack < -1e-9) {
    r.certificate_ok = false;
    r.failure = "rotation set: inner support exceeds the outer bound";
  }
  if (!c.svg.empty()) r.svg = rotation_svg(f, ca, fish ? "fish" : "rotation set");
  if (!c.csv.empty()) r.csv = inner_vertices_csv(ca.inner);
  if (!c.support_csv.empty()) r.support_csv = support_csv(ca.directions, ca.outer_support);
  return r;
}

inline RunResult run_jsr(const ExperimentConfig& c) {
  const Cocycle F = load_cocycle(c);
  const auto b = jsr_bracket(F, c.depth);
  const auto s = subradius_bracket(F, c.depth);
  RunResult r;
  Json& j = r.json;
  j["command"] = "jsr";
  j["depth"] = c.depth;
  j["lower"] = b.lower;
  j["upper"] = b.upper;
  j["witness"] = b.witness.str(F.alphabet_size());
  j["upper_length"] = b.upper_length;
  j["subradius"] = {{"lower", s.lower}, {"upper", s.upper}, {"witness", s.witness.str(F.alphabet_size())},
                    {"lower_length", s.lower_length}, {"one_sided", s.one_sided}};
  if (b.lower > b.upper * (1 + 1e-12)) {
    r.certificate_ok = false;
    r.failure = "jsr bracket: spectral lower bound exceeds the norm upper bound";
  }
  return r;
}

inline RunResult run_morse(const ExperimentConfig& c) {
  const Cocycle F = load_cocycle(c);
  const auto dom = domination_report(F, c.depths.empty() ? default_depths(c.depth) : c.depths);
  const ThetaSet theta = parse_theta(c.theta, F.dim(), dom.theta);
  const auto s = spectrum_approx(F, c.max_period, c.depth, theta, c.directions);
  RunResult r;
  r.json["command"] = "morse";
  r.json["dim"] = F.dim();
  r.json["domination"] = domination_json(dom);
  const Json body = spectrum_json(s, F.alphabet_size());
  for (const auto& [key, v] : body.items()) r.json[key] = v;
  if (s.min_slack < -1e-9) {
    r.certificate_ok = false;
    r.failure = "spectrum: inner support exceeds the outer envelope";
  }
  if (!c.svg.empty()) {
    if (F.dim() != 2 && F.dim() != 3) throw InvalidArgument("--svg needs a cocycle of dimension 2 or 3");
    r.svg = spectrum_svg(s, "Lyapunov spectrum");
  }
  return r;
}

inline RunResult run_adapt(const ExperimentConfig& c) {
  const Cocycle F = load_cocycle(c);
  require(c.k >= 0 && c.k <= 20, "--k must lie in [0, 20]");
  require(c.samples >= 1, "--samples must be >= 1");
  const AdaptedConjugation ac = adapt(F, c.k);

  std::mt19937_64 rng(c.seed);
  const int oba_len = std::max(ac.G.window(), ac.N + F.window() - 1);
  const int tel_len = telescoping_word_length(F, ac.metric);
  std::vector<Word> sample, tel_sample;
  for (int i = 0; i < c.samples; ++i) sample.push_back(random_admissible_word(F.base(), oba_len, rng));
  for (int i = 0; i < c.samples; ++i) tel_sample.push_back(random_admissible_word(F.base(), tel_len, rng));
  const ObaReport oba = verify_oba(F, ac, sample);
  const double tel = c.k > 0 ? verify_telescoping(F, ac.metric, tel_sample) : 0.0;

  const auto dom = domination_report(F, c.depths.empty() ? default_depths(c.depth) : c.depths);
  const ThetaSet theta = parse_theta(c.theta, F.dim(), dom.theta);
  const auto outer = spectrum_approx(F, c.max_period, ac.N, theta, c.directions);
  const double eps = std::isnan(c.epsilon) ? outer.gap : c.epsilon;
  const auto inc = verify_inclusion(ac, outer, eps);
  const auto sym = verify_symmetric_inclusion(ac, outer, eps);

  RunResult r;
  Json& j = r.json;
  j["command"] = "adapt";
  j["k"] = ac.k;
  j["N"] = ac.N;
  j["windows"] = ac.windows.size();
  Json sig = Json::array();
  for (const auto& v : ac.sigma1_G) sig.push_back(v.to_std());
  j["sigma1_G"] = sig;
  j["oba_worst_slack"] = oba.worst_slack;
  j["oba_worst_word"] = word_json(oba.worst_word, F.alphabet_size());
  j["oba_checked"] = oba.checked;
  j["telescoping_worst_slack"] = tel;
  j["domination"] = domination_json(dom);
  j["theta"] = theta_json(theta);
  j["inclusion"] = {{"epsilon", eps}, {"achieved_epsilon", inc.achieved_epsilon}, {"pass", inc.pass},
                    {"outer_depth", outer.depth}};
  j["symmetric_inclusion"] = {{"epsilon", eps}, {"achieved_epsilon", sym.achieved_epsilon}, {"pass", sym.pass}};
  Json gaps = Json::object();
  for (int i = 1; i < F.dim(); ++i) {
    if (!dom.dominated(i)) continue;
    const auto g = one_step_domination_check(ac, dom, i);
    gaps[std::to_string(i)] = {{"min_gap", g.min_gap}, {"positive", g.positive},
                               {"worst_window", word_json(g.worst_window, F.alphabet_size())}};
  }
  j["one_step_gaps"] = gaps;
  if (!c.necklace.empty()) {
    const auto d = favored_measure_diagnostic(F, ac, Necklace::canonical(parse_word(c.necklace)));
    j["favored"] = {{"necklace", c.necklace}, {"lyapunov", d.lyapunov.to_std()}, {"mean_rhs", d.mean_rhs.to_std()},
                    {"mean_lhs", d.mean_lhs.to_std()}, {"l1_rhs", d.l1_rhs}};
  }
  if (!oba.pass) {
    r.certificate_ok = false;
    r.failure = "one-step majorization: worst slack " + std::to_string(oba.worst_slack) + " below -1e-8";
  } else if (tel < -1e-8) {
    r.certificate_ok = false;
    r.failure = "telescoping majorization: worst slack " + std::to_string(tel) + " below -1e-8";
  } else if (!std::isnan(c.epsilon) && !inc.pass) {
    // only an explicitly requested tolerance is asserted
    r.certificate_ok = false;
    r.failure = "inclusion: needs epsilon " + std::to_string(inc.achieved_epsilon) + " > " + std::to_string(eps);
  }
  return r;
}

inline RunResult run_homoclinic(const ExperimentConfig& c) {
  require(c.terms >= 1, "--terms must be >= 1");
  const auto h = homoclinic_sum(c.terms);
  RunResult r;
  Json& j = r.json;
  j["command"] = "homoclinic";
  j["terms"] = c.terms;
  j["sum"] = {{"re", h.sum.real()}, {"im", h.sum.imag()}};
  j["tail"] = h.tail;
  j["certified"] = h.certified;
  if (!h.certified) {
    r.certificate_ok = false;
    r.failure = "homoclinic sum: imaginary part does not exceed the tail bound";
  }
  return r;
}

inline RunResult run_props(const ExperimentConfig& c) {
  require(c.cases >= 1, "--cases must be >= 1");
  const auto res = run_properties(c.seed, c.cases);
  RunResult r;
  Json& j = r.json;
  j["command"] = "props";
  j["seed"] = c.seed;
  j["cases"] = c.cases;
  Json suites = Json::array();
  bool all = true;
  for (const auto& p : res) {
    suites.push_back({{"suite", p.suite}, {"property", p.name}, {"cases", p.cases},
                      {"kind", p.is_slack ? "slack" : "error"}, {"worst", p.worst},
                      {"tolerance", p.tolerance}, {"pass", p.pass}});
    if (!p.pass && all) {
      all = false;
      r.failure = "property " + p.suite + "/" + p.name + " failed";
    }
  }
  j["properties"] = suites;
  j["pass"] = all;
  r.certificate_ok = all;
  return r;
}

}  // namespace detail

/// Runs one experiment. JSON goes to config.out, or to `out` when no path
/// is given; diagnostics go to `err`.
inline int run(const ExperimentConfig& config, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  try {
    if (config.deterministic)
      set_worker_count(1);
    else if (config.workers > 0)
      set_worker_count(static_cast<unsigned>(config.workers));
    require(config.max_period >= 1, "--max-period must be >= 1");
    require(config.depth >= 1, "--depth must be >= 1");
    require(config.directions >= 1, "--directions must be >= 1");

    RunResult r;
    const std::string& cmd = config.command;
    if (cmd == "birkhoff")
      r = detail::run_birkhoff(config);
    else if (cmd == "rotation")
      r = detail::run_rotation_like(config, false);
    else if (cmd == "fish")
      r = detail::run_rotation_like(config, true);
    else if (cmd == "jsr")
      r = detail::run_jsr(config);
    else if (cmd == "morse")
      r = detail::run_morse(config);
    else if (cmd == "adapt")
      r = detail::run_adapt(config);
    else if (cmd == "homoclinic")
      r = detail::run_homoclinic(config);
    else if (cmd == "props")
      r = detail::run_props(config);
    else
      throw InvalidArgument("unknown command '" + cmd + "'");

    const std::string text = to_json_text(r.json);
    if (config.out.empty())
      out << text;
    else
      write_text_file(config.out, text);
    if (!config.svg.empty() && !r.svg.empty()) write_text_file(config.svg, r.svg);
    if (!config.csv.empty() && !r.csv.empty()) write_text_file(config.csv, r.csv);
    if (!config.support_csv.empty() && !r.support_csv.empty()) write_text_file(config.support_csv, r.support_csv);
    if (!r.certificate_ok) {
      err << "certificate failed: " << r.failure << "\n";
      return 2;
    }
    return 0;
  } catch (const BudgetError& e) {
    err << "budget exceeded: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace ergopt
