#pragma once

// JSON bindings: model-file loaders for the CLI and to_json serializers for
// the report structs. Loader errors are thrown as std::runtime_error with
// the offending path in the message; schema violations list the bad field.

#include <fstream>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "spinlab/fda.hpp"
#include "spinlab/gerbe.hpp"
#include "spinlab/grassmann.hpp"
#include "spinlab/oscillator.hpp"
#include "spinlab/quat_reps.hpp"
#include "spinlab/torsor.hpp"
#include "spinlab/witten.hpp"

namespace spinlab {

using Json = nlohmann::json;

// ---------------------------------------------------------------------------
// loaders

inline Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read file: " + path);
  Json j;
  try {
    in >> j;
  } catch (const Json::parse_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  return j;
}

namespace detail {

inline const Json& require_field(const Json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) throw std::runtime_error(where + ": missing field \"" + key + "\"");
  return *it;
}

inline Matrix<double> matrix_from_json(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty() || !j[0].is_array())
    throw std::runtime_error(where + ": expected an array of rows");
  const int rows = static_cast<int>(j.size());
  const int cols = static_cast<int>(j[0].size());
  Matrix<double> m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    if (static_cast<int>(j[r].size()) != cols)
      throw std::runtime_error(where + ": ragged rows");
    for (int c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

}  // namespace detail

// Potential registry for 1-D tame models:
//   {"type": "polynomial", "coefficients": [c0, c1, ...]}      sum c_i x^i
//   {"type": "sin", "amplitude", "frequency", "phase"}         a sin(f x + p)
//   {"type": "clamped_sin", ..., "clamp_radius": r}            held constant
//                                                              outside |x| > r
inline std::function<double(double)> potential_from_json(const Json& j) {
  const std::string where = "potential";
  std::string type = detail::require_field(j, "type", where).get<std::string>();
  if (type == "polynomial") {
    std::vector<double> c =
        detail::require_field(j, "coefficients", where).get<std::vector<double>>();
    if (c.empty()) throw std::runtime_error(where + ": empty coefficient list");
    return [c](double x) {
      double v = 0.0;
      for (size_t i = c.size(); i-- > 0;) v = v * x + c[i];
      return v;
    };
  }
  if (type == "sin" || type == "clamped_sin") {
    double a = detail::require_field(j, "amplitude", where).get<double>();
    double f = detail::require_field(j, "frequency", where).get<double>();
    double p = j.value("phase", 0.0);
    if (type == "sin") return [a, f, p](double x) { return a * std::sin(f * x + p); };
    double r = detail::require_field(j, "clamp_radius", where).get<double>();
    if (!(r > 0)) throw std::runtime_error(where + ": clamp_radius must be positive");
    return [a, f, p, r](double x) {
      double u = std::clamp(x, -r, r);
      return a * std::sin(f * u + p);
    };
  }
  throw std::runtime_error(where + ": unknown type \"" + type + "\"");
}

// Tame model file: {"grid": {"n_cells", "box"}, "potential": {...},
// "F": [[lo, hi], ...], "lambda_bar": number, "T": number (optional, 0 = auto),
// "rho": {"one_until", "zero_from"} (optional)}.
inline TameTupleModel load_tame_model(const std::string& path) {
  Json j = load_json_file(path);
  const Json& grid = detail::require_field(j, "grid", path);
  int n_cells = detail::require_field(grid, "n_cells", path + ": grid").get<int>();
  double box = detail::require_field(grid, "box", path + ": grid").get<double>();
  auto w = potential_from_json(detail::require_field(j, "potential", path));
  const Json& fj = detail::require_field(j, "F", path);
  std::vector<Interval> f_set;
  for (const Json& iv : fj) {
    if (!iv.is_array() || iv.size() != 2)
      throw std::runtime_error(path + ": F entries must be [lo, hi] pairs");
    f_set.push_back(Interval{iv[0].get<double>(), iv[1].get<double>()});
  }
  double lambda_bar = detail::require_field(j, "lambda_bar", path).get<double>();
  double big_t = j.value("T", 0.0);
  try {
    return make_interval_model(n_cells, box, w, f_set, lambda_bar, big_t);
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

// Optional cutoff profile attached to a tame model file; defaults to a
// plateau one unit past F, fading out two units later (clipped to the box).
inline CutoffProfile cutoff_from_json(const Json& j, const TameTupleModel& m) {
  if (j.contains("rho")) {
    const Json& r = j["rho"];
    return CutoffProfile{detail::require_field(r, "one_until", "rho").get<double>(),
                         detail::require_field(r, "zero_from", "rho").get<double>()};
  }
  double far = 0.0;
  for (const Interval& iv : m.f_set) far = std::max({far, std::abs(iv.lo), std::abs(iv.hi)});
  double box = m.grid.box;
  double one_until = std::min(far + 1.0, 0.75 * box);
  return CutoffProfile{one_until, std::min(one_until + 2.0, 0.95 * box)};
}

// FDA model file: {"dims": {"n_vh", "n_vr", "n_wh", "n_wr", "dim_e"},
// "i_map": rows, "d_r": rows, "d_h": rows, "nonlinearity": name or
// {"type": name, ...coefficients}, "orientation": +-1, "stab": int}.
// Registry: sw_quadratic (Clifford + moment terms on), linear (F = D - Delta),
// polynomial (explicit c_cliff, c_moment, c_cubic_h, c_cubic_r, c_skew, c_taut).
inline FdaModel load_fda_model(const std::string& path) {
  Json j = load_json_file(path);
  FdaModel m;
  const Json& dims = detail::require_field(j, "dims", path);
  m.n_vh = detail::require_field(dims, "n_vh", path + ": dims").get<int>();
  m.n_vr = detail::require_field(dims, "n_vr", path + ": dims").get<int>();
  m.n_wh = detail::require_field(dims, "n_wh", path + ": dims").get<int>();
  m.n_wr = detail::require_field(dims, "n_wr", path + ": dims").get<int>();
  m.dim_e = dims.value("dim_e", 3);
  m.i_map = detail::matrix_from_json(detail::require_field(j, "i_map", path), path + ": i_map");
  m.d_r = detail::matrix_from_json(detail::require_field(j, "d_r", path), path + ": d_r");
  m.d_h = detail::matrix_from_json(detail::require_field(j, "d_h", path), path + ": d_h");
  m.orientation = j.value("orientation", 1);
  m.stab = j.value("stab", 0);
  m.label = j.value("label", std::string("custom"));

  const Json& nl = detail::require_field(j, "nonlinearity", path);
  std::string kind = nl.is_string() ? nl.get<std::string>()
                                    : detail::require_field(nl, "type", path).get<std::string>();
  if (kind == "sw_quadratic") {
    m.c_cliff = 1.0;
    m.c_moment = 1.0;
  } else if (kind == "linear") {
    // all cubic/quadratic coefficients stay zero
  } else if (kind == "polynomial") {
    if (nl.is_string())
      throw std::runtime_error(path + ": polynomial nonlinearity needs coefficients");
    m.c_cliff = nl.value("c_cliff", 0.0);
    m.c_moment = nl.value("c_moment", 0.0);
    m.c_cubic_h = nl.value("c_cubic_h", 0.0);
    m.c_cubic_r = nl.value("c_cubic_r", 0.0);
    m.c_skew = nl.value("c_skew", 0.0);
    m.c_taut = nl.value("c_taut", 1.0);
  } else {
    throw std::runtime_error(path + ": unknown nonlinearity \"" + kind + "\"");
  }
  try {
    m.validate();
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  return m;
}

// Nerve file: {"n": int, "pairs": [[i,j],...], "triples": [[i,j,k],...],
// "quadruples": [...] (optional)}. Tables must satisfy FiniteNerve::validate.
inline FiniteNerve load_nerve(const std::string& path) {
  Json j = load_json_file(path);
  FiniteNerve g;
  g.n = detail::require_field(j, "n", path).get<int>();
  auto read = [&](const char* key, auto& out, size_t width, bool required) {
    if (!j.contains(key)) {
      if (required) throw std::runtime_error(path + ": missing field \"" + key + "\"");
      return;
    }
    for (const Json& s : j[key]) {
      if (!s.is_array() || s.size() != width)
        throw std::runtime_error(path + ": " + key + " entries must have " +
                                 std::to_string(width) + " vertices");
      typename std::remove_reference_t<decltype(out)>::value_type simplex;
      for (size_t t = 0; t < width; ++t) simplex[t] = s[t].get<int>();
      out.push_back(simplex);
    }
  };
  read("pairs", g.pairs, 2, true);
  read("triples", g.triples, 3, false);
  read("quadruples", g.quadruples, 4, false);
  try {
    g.validate();
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  return g;
}

// Sign cochain file: either a bare array of +-1 or {"signs": [...]}. The
// length must match the simplex table it is paired with.
inline std::vector<int> load_sign_cochain(const std::string& path) {
  Json j = load_json_file(path);
  const Json& arr = j.is_array() ? j : detail::require_field(j, "signs", path);
  std::vector<int> signs;
  for (const Json& v : arr) {
    int s = v.get<int>();
    if (s != 1 && s != -1) throw std::runtime_error(path + ": signs must be +-1");
    signs.push_back(s);
  }
  return signs;
}

// ---------------------------------------------------------------------------
// report serializers (ADL hooks for nlohmann::json)

inline void to_json(Json& j, const SpectralResult& r) {
  j = Json{{"eigenvalues", r.eigenvalues},
           {"kernel_dim", r.kernel_dim},
           {"gap", r.gap},
           {"grid", Json{{"n", r.grid_n}, {"h", r.grid_h}, {"box", r.box}}},
           {"threshold_t_min", r.threshold_t_min},
           {"diagnostics", r.diagnostics},
           {"certified", r.certified()}};
}

inline void to_json(Json& j, const IntertwinerReport& r) {
  j = Json{{"c_ok", r.c_ok},
           {"h_ok", r.h_ok},
           {"tau_ok", r.tau_ok},
           {"grading_ok", r.grading_ok},
           {"gram_scaled_identity", r.gram_scaled_identity},
           {"gram_scale", Json{{"num", r.gram_scale_num}, {"den", r.gram_scale_den}}},
           {"pass", r.ok()}};
}

inline void to_json(Json& j, const ChernReport& r) {
  j = Json{{"chern", r.chern}, {"residue", r.residue}, {"max_plaquette", r.max_plaquette}};
}

inline void to_json(Json& j, const GrassmannReport& r) {
  std::vector<double> cos(r.cosines.data(), r.cosines.data() + r.cosines.size());
  j = Json{{"cosines", cos},
           {"lower_bound", r.lower_bound},
           {"upper_bound", r.upper_bound},
           {"exact_small_r", r.exact_small_r},
           {"distance", r.distance}};
}

inline void to_json(Json& j, const TameCondition& c) {
  j = Json{{"pass", c.pass}, {"witness", c.witness}};
}

inline void to_json(Json& j, const TameReport& r) {
  j = Json{{"conditions", r.conditions}, {"pass", r.all_pass()}};
}

inline void to_json(Json& j, const LocalizationBounds& b) {
  j = Json{{"A", b.a}, {"B", b.b}};
}

inline void to_json(Json& j, const LocalizationRow& r) {
  j = Json{{"eigenvalue", r.eigenvalue}, {"outside_mass", r.outside_mass},
           {"A", r.a_bound},             {"rho_norm", r.rho_norm},
           {"B", r.b_bound},             {"pass", r.pass}};
}

inline void to_json(Json& j, const LocalizationReport& r) {
  j = Json{{"t", r.t}, {"bounds", r.bounds}, {"rows", r.rows}, {"pass", r.all_pass()}};
}

inline void to_json(Json& j, const PhiReport& r) {
  std::vector<double> sv(r.singular_values.data(),
                         r.singular_values.data() + r.singular_values.size());
  j = Json{{"t", r.t},
           {"lambda", r.lambda},
           {"dim1", r.dim1},
           {"dim2", r.dim2},
           {"dims_match", r.dims_match},
           {"singular_values", sv},
           {"min_singular", r.min_singular},
           {"max_singular", r.max_singular}};
  if (!r.note.empty()) j["note"] = r.note;
}

inline void to_json(Json& j, const T0Search& s) {
  j = Json{{"found", s.found}, {"t0", s.t0}, {"sweep", s.sweep}};
}

inline void to_json(Json& j, const DistanceCertificate& c) {
  j = Json{{"delta", c.delta}, {"per_step", c.per_step}, {"d_bound", c.d_bound}};
}

inline void to_json(Json& j, const ThresholdEstimate& t) {
  j = Json{{"anticommutator_norm", t.anticommutator_norm},
           {"h_inverse_norm_outside", t.h_inverse_norm_outside},
           {"t_min", t.t_min}};
}

inline void to_json(Json& j, const AxiomCheck& c) {
  j = Json{{"index", c.index}, {"pass", c.pass}, {"residual", c.residual}, {"note", c.note}};
}

inline void to_json(Json& j, const AxiomReport& r) {
  j = Json{{"axioms", r.checks}, {"pass", r.all_pass()}};
}

inline void to_json(Json& j, const Hk3Report& r) {
  j = Json{{"rank_ok", r.rank_ok},
           {"orientation_ok", r.orientation_ok},
           {"fiber_degree", r.fiber_degree},
           {"real_sign", r.real_sign},
           {"c_class", r.c_class},
           {"c_direct", r.c_direct},
           {"parity_flags_consistent", r.parity_flags_consistent},
           {"pass", r.pass},
           {"witness", r.witness}};
}

inline void to_json(Json& j, const SplitCheck& s) {
  j = Json{{"pass", s.pass},
           {"gram_residual", s.gram_residual},
           {"rows", s.rows},
           {"cols", s.cols},
           {"note", s.note}};
}

inline void to_json(Json& j, const CocycleReport& r) {
  j = Json{{"pass", r.pass}, {"failing_quadruples", r.failing_quadruples}};
}

inline void to_json(Json& j, const TrivializationResult& r) {
  j = Json{{"trivializable", r.trivializable},
           {"edge_sections", r.edge_sections},
           {"obstruction", r.obstruction}};
}

}  // namespace spinlab
