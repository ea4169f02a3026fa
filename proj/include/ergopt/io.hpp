#pragma once

// JSON and CSV input/output: subshift, cocycle and observable documents, a
// JSON writer that prints every double with 17 significant digits, and CSV
// tables for rotation-set data.

#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "cocycle.hpp"
#include "rotation.hpp"

namespace ergopt {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// writing

namespace detail {
inline void write_number(std::string& out, double v) {
  if (!std::isfinite(v)) {
    out += "null";
    return;
  }
  if (v == 0) v = 0.0;  // no "-0"
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

inline void write_string(std::string& out, const std::string& s) {
  out += Json(s).dump();
}

inline void write_json(std::string& out, const Json& j, int indent, int level) {
  const std::string pad(static_cast<std::size_t>(indent * (level + 1)), ' ');
  const std::string close(static_cast<std::size_t>(indent * level), ' ');
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{";
      out += nl;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) {
          out += ",";
          out += nl;
        }
        first = false;
        out += pad;
        write_string(out, it.key());
        out += indent > 0 ? ": " : ":";
        write_json(out, it.value(), indent, level + 1);
      }
      out += nl;
      out += close;
      out += "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // arrays of scalars stay on one line
      bool flat = true;
      for (const auto& e : j) flat = flat && !e.is_structured();
      out += "[";
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += flat ? ", " : ",";
        if (!flat) {
          out += nl;
          out += pad;
        }
        first = false;
        write_json(out, e, indent, level + 1);
      }
      if (!flat) {
        out += nl;
        out += close;
      }
      out += "]";
      return;
    }
    case Json::value_t::number_float:
      write_number(out, j.get<double>());
      return;
    default:
      out += j.dump();
  }
}
}  // namespace detail

/// Deterministic JSON text with %.17g doubles and non-finite values as null.
inline std::string to_json_text(const Json& j, int indent = 2) {
  std::string out;
  detail::write_json(out, j, indent, 0);
  out += "\n";
  return out;
}

inline Json to_json(const ChamberVector& v) { return Json(v.to_std()); }
inline Json to_json(const Vector& v) { return Json(std::vector<double>(v.data(), v.data() + v.size())); }
inline Json to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<double> r;
    for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
    rows.push_back(r);
  }
  return rows;
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path + " for writing");
  f << text;
  if (!f) throw Error("failed writing " + path);
}

// ---------------------------------------------------------------------------
// reading

inline Json load_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InvalidArgument("cannot open " + path);
  try {
    return Json::parse(f);
  } catch (const Json::exception& e) {
    throw InvalidArgument(path + ": " + e.what());
  }
}

namespace detail {
inline int get_int(const Json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number_integer()) throw InvalidArgument(std::string("missing integer field '") + key + "'");
  return j[key].get<int>();
}

inline std::vector<std::pair<int, int>> get_forbidden(const Json& j) {
  std::vector<std::pair<int, int>> out;
  if (!j.contains("forbidden")) return out;
  if (!j["forbidden"].is_array()) throw InvalidArgument("'forbidden' must be an array of [i, j] pairs");
  for (const auto& p : j["forbidden"]) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number_integer() || !p[1].is_number_integer())
      throw InvalidArgument("'forbidden' entries must be [i, j] integer pairs");
    out.emplace_back(p[0].get<int>(), p[1].get<int>());
  }
  return out;
}

inline Matrix get_matrix(const Json& j, int d) {
  Matrix m(d, d);
  if (!j.is_array()) throw InvalidArgument("matrix must be an array");
  if (j.size() == static_cast<std::size_t>(d) * d && (d == 1 || !j[0].is_array())) {
    for (int i = 0; i < d * d; ++i) {
      if (!j[static_cast<std::size_t>(i)].is_number()) throw InvalidArgument("matrix entries must be numbers");
      m(i / d, i % d) = j[static_cast<std::size_t>(i)].get<double>();
    }
    return m;
  }
  if (j.size() != static_cast<std::size_t>(d)) throw InvalidArgument("matrix must have " + std::to_string(d) + " rows");
  for (int r = 0; r < d; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || row.size() != static_cast<std::size_t>(d))
      throw InvalidArgument("matrix rows must have " + std::to_string(d) + " entries");
    for (int c = 0; c < d; ++c) {
      if (!row[static_cast<std::size_t>(c)].is_number()) throw InvalidArgument("matrix entries must be numbers");
      m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
  }
  return m;
}
}  // namespace detail

/// {"alphabet": k, "forbidden": [[i, j], ...]}
inline SymbolicSystem parse_system(const Json& j) {
  return SymbolicSystem::with_forbidden(detail::get_int(j, "alphabet"), detail::get_forbidden(j));
}

inline Json system_to_json(const SymbolicSystem& s) {
  Json j;
  j["alphabet"] = s.alphabet_size();
  Json f = Json::array();
  for (auto [a, b] : s.forbidden()) f.push_back({a, b});
  j["forbidden"] = f;
  return j;
}

/// {"dim": d, "matrices": [M_0, ...], "forbidden": [...]}, each matrix given
/// row-major either as nested rows or as a flat list of d*d numbers.
inline Cocycle parse_cocycle(const Json& j) {
  const int d = detail::get_int(j, "dim");
  require(d >= 1, "dim must be >= 1");
  if (!j.contains("matrices") || !j["matrices"].is_array() || j["matrices"].empty())
    throw InvalidArgument("missing non-empty 'matrices' array");
  std::vector<Matrix> ms;
  for (const auto& m : j["matrices"]) ms.push_back(detail::get_matrix(m, d));
  const auto base = SymbolicSystem::with_forbidden(static_cast<int>(ms.size()), detail::get_forbidden(j));
  return Cocycle::one_step(ms, base);
}

inline Json cocycle_to_json(const Cocycle& F) {
  Json j;
  j["dim"] = F.dim();
  Json ms = Json::array();
  for (const auto& m : F.letters()) ms.push_back(to_json(m));
  j["matrices"] = ms;
  j["forbidden"] = system_to_json(F.base())["forbidden"];
  return j;
}

/// Named builtin observables.
inline std::optional<Observable> builtin_observable(const std::string& name) {
  if (name == "cos_angle") return Observable::cos_angle();
  if (name == "sin_angle") return Observable::sin_angle();
  if (name == "digit") return Observable::digit();
  if (name == "digit_product") return Observable::digit_product();
  return std::nullopt;
}

/// Locally constant observable: either a bare map word -> value, or
/// {"alphabet": k, "forbidden": [...], "table": {word: value}}.
inline Observable parse_observable(const Json& j) {
  const Json* table = &j;
  SymbolicSystem base = SymbolicSystem::full_shift(2);
  if (j.contains("table")) {
    table = &j["table"];
    if (j.contains("alphabet")) base = parse_system(j);
  }
  if (!table->is_object() || table->empty()) throw InvalidArgument("observable table must be a non-empty object");
  std::map<Word, double> values;
  for (auto it = table->begin(); it != table->end(); ++it) {
    if (!it.value().is_number()) throw InvalidArgument("observable values must be numbers");
    Word w = parse_word(it.key());
    for (Symbol s : w) require(s < base.alphabet_size(), "symbol out of range in observable table");
    values[w] = it.value().get<double>();
  }
  return Observable::from_table(base, values);
}

/// A builtin name or a path to an observable document.
inline Observable load_observable(const std::string& spec) {
  if (auto b = builtin_observable(spec)) return *b;
  return parse_observable(load_json_file(spec));
}

/// Comma-separated builtin names, or a document {"components": [...]} whose
/// entries are builtin names or observable tables.
inline VectorObservable load_vector_observable(const std::string& spec) {
  if (spec.empty() || spec == "fish") return VectorObservable::fish();
  std::vector<Observable> comps;
  if (spec.find(',') != std::string::npos || builtin_observable(spec)) {
    std::stringstream ss(spec);
    std::string name;
    while (std::getline(ss, name, ',')) {
      auto b = builtin_observable(name);
      if (!b) throw InvalidArgument("unknown builtin observable '" + name + "'");
      comps.push_back(*b);
    }
  } else {
    const Json j = load_json_file(spec);
    if (!j.contains("components") || !j["components"].is_array())
      throw InvalidArgument(spec + ": expected a 'components' array");
    for (const auto& c : j["components"]) {
      if (c.is_string()) {
        auto b = builtin_observable(c.get<std::string>());
        if (!b) throw InvalidArgument("unknown builtin observable '" + c.get<std::string>() + "'");
        comps.push_back(*b);
      } else {
        comps.push_back(parse_observable(c));
      }
    }
  }
  bool fish = comps.size() == 2 && comps[0].name() == "cos_angle" && comps[1].name() == "sin_angle";
  return VectorObservable(std::move(comps), fish ? 2 * std::numbers::pi : 0.0);
}

// ---------------------------------------------------------------------------
// CSV

/// One row per inner vertex: coordinates, period, word, sturmian flag.
inline std::string inner_vertices_csv(const std::vector<InnerVertex>& vs) {
  std::string out;
  const std::size_t d = vs.empty() ? 0 : vs[0].point.size();
  for (std::size_t i = 0; i < d; ++i) out += "x" + std::to_string(i + 1) + ",";
  out += "period,word,sturmian\n";
  for (const auto& v : vs) {
    for (double x : v.point) {
      detail::write_number(out, x);
      out += ",";
    }
    out += std::to_string(v.witness.period()) + "," + v.witness.str() + "," + (v.sturmian ? "true" : "false") + "\n";
  }
  return out;
}

/// One row per direction: coordinates of c, then the support bound.
inline std::string support_csv(const std::vector<Point>& dirs, const std::vector<double>& bounds) {
  std::string out;
  const std::size_t d = dirs.empty() ? 0 : dirs[0].size();
  for (std::size_t i = 0; i < d; ++i) out += "c" + std::to_string(i + 1) + ",";
  out += "bound\n";
  for (std::size_t q = 0; q < dirs.size(); ++q) {
    for (double x : dirs[q]) {
      detail::write_number(out, x);
      out += ",";
    }
    detail::write_number(out, bounds[q]);
    out += "\n";
  }
  return out;
}

}  // namespace ergopt
