#include "gensol/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace gensol {

namespace {

const Json& need(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object()) throw InputError(where + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw InputError(where + ": missing \"" + key + "\"");
  return *it;
}

const Json& need_array(const Json& j, const std::string& where, std::size_t size) {
  if (!j.is_array()) throw InputError(where + ": expected an array");
  if (j.size() != size)
    throw InputError(where + ": expected " + std::to_string(size) + " entries, got " + std::to_string(j.size()));
  return j;
}

int int_from_json(const Json& j, const std::string& where) {
  if (!j.is_number_integer()) throw InputError(where + ": expected an integer");
  return j.get<int>();
}

Json vec_to_json(const Vec& v, int dim) {
  Json a = Json::array();
  for (int k = 0; k < dim; ++k) a.push_back(number_to_json(v[k]));
  return a;
}

Vec vec_from_json(const Json& j, int dim, const std::string& where) {
  need_array(j, where, dim);
  Vec v{};
  for (int k = 0; k < dim; ++k) v[k] = number_from_json(j[k], where + "[" + std::to_string(k) + "]");
  return v;
}

Json sym_to_json(const SymMat& m) {
  Json a = Json::array();
  for (int k = 0; k < m.packed_size(); ++k) a.push_back(number_to_json(m.upper()[k]));
  return a;
}

SymMat sym_from_json(const Json& j, int dim, const std::string& where) {
  const int n = dim * (dim + 1) / 2;
  need_array(j, where, n);
  double c[6] = {};
  for (int k = 0; k < n; ++k) c[k] = number_from_json(j[k], where + "[" + std::to_string(k) + "]");
  return SymMat::from_upper(c, dim);
}

Json system_to_json(const SystemSpec& s) {
  return Json{{"system", to_string(s.kind)}, {"gamma", s.gamma}, {"alpha", s.alpha}};
}

SystemSpec system_from_json(const Json& j) {
  SystemSpec s;
  const Json& k = need(j, "system", "system");
  if (!k.is_string()) throw InputError("system.system: expected a string");
  try {
    s.kind = system_kind_from_string(k.get<std::string>());
  } catch (const InputError& e) {
    throw InputError(std::string("system.system: ") + e.what());
  }
  if (j.contains("gamma")) s.gamma = number_from_json(j["gamma"], "system.gamma");
  if (j.contains("alpha")) s.alpha = number_from_json(j["alpha"], "system.alpha");
  s.validate();
  return s;
}

Json grid_to_json(const Grid& g) {
  Json cells = Json::array();
  for (int a = 0; a < g.dim; ++a) cells.push_back(g.cells[a]);
  return Json{{"dim", g.dim}, {"topology", to_string(g.topology)}, {"extent", vec_to_json(g.extent, g.dim)},
              {"cells", cells}};
}

Grid grid_from_json(const Json& j) {
  const int dim = int_from_json(need(j, "dim", "grid"), "grid.dim");
  if (dim < 1 || dim > 3) throw InputError("grid.dim must be 1, 2 or 3");
  const Json& topo = need(j, "topology", "grid");
  if (!topo.is_string()) throw InputError("grid.topology: expected a string");
  Vec extent{1, 1, 1};
  const Vec e = vec_from_json(need(j, "extent", "grid"), dim, "grid.extent");
  for (int a = 0; a < dim; ++a) extent[a] = e[a];
  std::array<int, 3> cells{1, 1, 1};
  const Json& c = need_array(need(j, "cells", "grid"), "grid.cells", dim);
  for (int a = 0; a < dim; ++a) cells[a] = int_from_json(c[a], "grid.cells");
  Grid g(dim, topology_from_string(topo.get<std::string>()), extent, cells);
  g.validate();
  return g;
}

Json time_to_json(const TimeGrid& t) { return Json{{"T", number_to_json(t.T)}, {"steps", t.steps}}; }

TimeGrid time_from_json(const Json& j) {
  TimeGrid t;
  t.T = number_from_json(need(j, "T", "time"), "time.T");
  t.steps = int_from_json(need(j, "steps", "time"), "time.steps");
  t.validate();
  return t;
}

Json sphere_to_json(const SphereMeasure& nu, int dim) {
  Json a = Json::array();
  for (const auto& at : nu) a.push_back(Json{{"w", number_to_json(at.w)}, {"theta", vec_to_json(at.theta, dim)}});
  return a;
}

SphereMeasure sphere_from_json(const Json& j, int dim, const std::string& where) {
  if (!j.is_array()) throw InputError(where + ": expected an array");
  SphereMeasure nu;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string w = where + "[" + std::to_string(i) + "]";
    nu.push_back({number_from_json(need(j[i], "w", w), w + ".w"), vec_from_json(need(j[i], "theta", w), dim, w + ".theta")});
  }
  return nu;
}

// State samples: "m" (all systems) and "rho" (compressible).
void states_to_json(Json& data, const SystemSpec& sys, const Trajectory& tr) {
  Json m = Json::array(), rho = Json::array();
  for (const auto& s : tr.states) {
    Json ms = Json::array();
    for (const auto& v : s.m) ms.push_back(vec_to_json(v, tr.grid.dim));
    m.push_back(std::move(ms));
    if (sys.compressible()) {
      Json rs = Json::array();
      for (double r : s.rho) rs.push_back(number_to_json(r));
      rho.push_back(std::move(rs));
    }
  }
  if (sys.compressible()) data["rho"] = std::move(rho);
  data["m"] = std::move(m);
}

std::vector<State> states_from_json(const Json& data, const SystemSpec& sys, const Grid& g, const TimeGrid& t) {
  const int n = t.count();
  const int cells = g.cell_count();
  const Json& m = need_array(need(data, "m", "data"), "data.m", n);
  std::vector<State> out(n);
  for (int i = 0; i < n; ++i) {
    const std::string w = "data.m[" + std::to_string(i) + "]";
    need_array(m[i], w, cells);
    for (int c = 0; c < cells; ++c) out[i].m.push_back(vec_from_json(m[i][c], g.dim, w));
  }
  if (sys.compressible()) {
    const Json& rho = need_array(need(data, "rho", "data"), "data.rho", n);
    for (int i = 0; i < n; ++i) {
      const std::string w = "data.rho[" + std::to_string(i) + "]";
      need_array(rho[i], w, cells);
      for (int c = 0; c < cells; ++c) out[i].rho.push_back(number_from_json(rho[i][c], w));
    }
  } else if (data.contains("rho")) {
    throw InputError("data.rho: the incompressible system has no density");
  }
  return out;
}

std::vector<double> series_from_json(const Json& j, int n, const std::string& where) {
  need_array(j, where, n);
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(number_from_json(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

Json series_to_json(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(number_to_json(x));
  return a;
}

std::vector<DiscMeasure> measures_from_json(const Json& j, const Grid& g, int n, WeightKind kind,
                                            const std::string& where) {
  need_array(j, where, n);
  std::vector<DiscMeasure> out;
  for (int i = 0; i < n; ++i) out.push_back(measure_from_json(j[i], g, kind, where + "[" + std::to_string(i) + "]"));
  return out;
}

Json measures_to_json(const std::vector<DiscMeasure>& ms) {
  Json a = Json::array();
  for (const auto& m : ms) a.push_back(measure_to_json(m));
  return a;
}

Certificate parse_certificate(const Json& j) {
  if (!j.is_object()) throw InputError("certificate: expected a JSON object");
  const Json& ver = need(j, "version", "certificate");
  if (!ver.is_number_integer() || ver.get<int>() != 1) throw InputError("certificate.version must be 1");
  const Json& kind = need(j, "kind", "certificate");
  if (!kind.is_string()) throw InputError("certificate.kind: expected a string");
  const SystemSpec sys = system_from_json(need(j, "system", "certificate"));
  const Grid g = grid_from_json(need(j, "grid", "certificate"));
  const TimeGrid t = time_from_json(need(j, "time", "certificate"));
  const Json& data = need(j, "data", "certificate");
  const int n = t.count();
  const std::string k = kind.get<std::string>();

  if (k == "envar" || k == "dissweak") {
    EnVarCert base{sys, Trajectory{g, t, states_from_json(data, sys, g, t)}, series_from_json(need(data, "E", "data"), n, "data.E")};
    if (k == "envar") {
      base.validate();
      return base;
    }
    DissWeakCert d{std::move(base), measures_from_json(need(data, "r1", "data"), g, n, WeightKind::Matrix, "data.r1"), {}};
    if (sys.compressible())
      d.r2 = measures_from_json(need(data, "r2", "data"), g, n, WeightKind::Scalar, "data.r2");
    else if (data.contains("r2"))
      throw InputError("data.r2: the incompressible system has a single defect");
    d.validate();
    return d;
  }
  if (k == "mv") {
    if (sys.compressible()) throw InputError("certificate.kind: mv certificates are incompressible only");
    const Json& sl = need_array(need(data, "slices", "data"), "data.slices", n);
    MVCert m{sys, g, t, {}};
    for (int i = 0; i < n; ++i) {
      const std::string w = "data.slices[" + std::to_string(i) + "]";
      MVSlice s;
      const Json& v = need_array(need(sl[i], "v", w), w + ".v", g.cell_count());
      for (const auto& x : v) s.v.push_back(vec_from_json(x, g.dim, w + ".v"));
      const Json& cov = need_array(need(sl[i], "cov", w), w + ".cov", g.cell_count());
      for (const auto& x : cov) s.cov.push_back(sym_from_json(x, g.dim, w + ".cov"));
      s.lambda = measure_from_json(need(sl[i], "lambda", w), g, WeightKind::Scalar, w + ".lambda");
      if (sl[i].contains("angle_cells")) {
        const Json& ac = sl[i]["angle_cells"];
        if (!ac.is_array()) throw InputError(w + ".angle_cells: expected an array");
        for (const auto& x : ac) s.angle_cells.push_back(sphere_from_json(x, g.dim, w + ".angle_cells"));
      }
      if (sl[i].contains("angle_atoms")) {
        const Json& aa = sl[i]["angle_atoms"];
        if (!aa.is_array()) throw InputError(w + ".angle_atoms: expected an array");
        for (const auto& x : aa) s.angle_atoms.push_back(sphere_from_json(x, g.dim, w + ".angle_atoms"));
      }
      m.slices.push_back(std::move(s));
    }
    m.validate();
    return m;
  }
  throw InputError("certificate.kind must be envar, dissweak or mv");
}

}  // namespace

std::string kind_name(const Certificate& c) {
  switch (c.index()) {
    case 0: return "envar";
    case 1: return "dissweak";
    default: return "mv";
  }
}

Json number_to_json(double v) {
  if (std::isnan(v)) throw InputError("NaN cannot be serialized");
  if (std::isinf(v)) return v > 0 ? Json{{"inf", true}} : Json{{"inf", true}, {"negative", true}};
  return v;
}

double number_from_json(const Json& j, const std::string& where) {
  if (j.is_number()) return j.get<double>();
  if (j.is_object() && j.contains("inf") && j["inf"] == true) {
    const bool neg = j.contains("negative") && j["negative"] == true;
    return neg ? -HUGE_VAL : HUGE_VAL;
  }
  throw InputError(where + ": expected a number");
}

Json measure_to_json(const DiscMeasure& mu) {
  Json ac = Json::array(), atoms = Json::array();
  for (const auto& w : mu.ac()) ac.push_back(sym_to_json(w));
  for (const auto& a : mu.atoms())
    atoms.push_back(Json{{"x", vec_to_json(a.x, mu.grid().dim)}, {"w", sym_to_json(a.w)}});
  return Json{{"ac", std::move(ac)}, {"atoms", std::move(atoms)}};
}

DiscMeasure measure_from_json(const Json& j, const Grid& g, WeightKind kind, const std::string& where) {
  DiscMeasure mu(g, kind);
  const int wd = mu.weight_dim();
  const Json& ac = need_array(need(j, "ac", where), where + ".ac", g.cell_count());
  for (int c = 0; c < g.cell_count(); ++c) mu.set_density(c, sym_from_json(ac[c], wd, where + ".ac"));
  if (j.contains("atoms")) {
    const Json& atoms = j["atoms"];
    if (!atoms.is_array()) throw InputError(where + ".atoms: expected an array");
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      const std::string w = where + ".atoms[" + std::to_string(i) + "]";
      mu.add_atom(vec_from_json(need(atoms[i], "x", w), g.dim, w + ".x"), sym_from_json(need(atoms[i], "w", w), wd, w + ".w"));
    }
  }
  mu.validate();
  return mu;
}

Certificate certificate_from_json(const Json& j) {
  try {
    return parse_certificate(j);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("certificate: ") + e.what());
  }
}

Json certificate_to_json(const Certificate& c) {
  Json j;
  j["version"] = 1;
  j["kind"] = kind_name(c);
  Json data;
  if (const auto* mv = std::get_if<MVCert>(&c)) {
    j["system"] = system_to_json(mv->system);
    j["grid"] = grid_to_json(mv->grid);
    j["time"] = time_to_json(mv->time);
    Json slices = Json::array();
    for (const auto& s : mv->slices) {
      Json v = Json::array(), cov = Json::array(), ac = Json::array(), aa = Json::array();
      for (const auto& x : s.v) v.push_back(vec_to_json(x, mv->grid.dim));
      for (const auto& x : s.cov) cov.push_back(sym_to_json(x));
      for (const auto& x : s.angle_cells) ac.push_back(sphere_to_json(x, mv->grid.dim));
      for (const auto& x : s.angle_atoms) aa.push_back(sphere_to_json(x, mv->grid.dim));
      slices.push_back(Json{{"v", std::move(v)},
                            {"cov", std::move(cov)},
                            {"lambda", measure_to_json(s.lambda)},
                            {"angle_cells", std::move(ac)},
                            {"angle_atoms", std::move(aa)}});
    }
    data["slices"] = std::move(slices);
  } else {
    const EnVarCert& b = c.index() == 0 ? std::get<EnVarCert>(c) : std::get<DissWeakCert>(c).base;
    j["system"] = system_to_json(b.system);
    j["grid"] = grid_to_json(b.traj.grid);
    j["time"] = time_to_json(b.traj.time);
    states_to_json(data, b.system, b.traj);
    data["E"] = series_to_json(b.E);
    if (const auto* d = std::get_if<DissWeakCert>(&c)) {
      data["r1"] = measures_to_json(d->r1);
      if (b.system.compressible()) data["r2"] = measures_to_json(d->r2);
    }
  }
  j["data"] = std::move(data);
  return j;
}

Json report_to_json(const Report& r) {
  auto rec = [](const CheckRecord& c) {
    return Json{{"clause", c.clause}, {"test", c.test_id}, {"s", c.s}, {"t", c.t},
                {"value", number_to_json(c.value)}, {"tol", number_to_json(c.tol)}, {"pass", c.pass}};
  };
  Json clauses = Json::array();
  for (const auto& name : r.clauses())
    clauses.push_back(Json{{"clause", name}, {"max_value", number_to_json(r.max_value(name))}, {"failed", r.clause_failed(name)}});
  Json worst = Json::array(), failing = Json::array();
  for (const auto& c : r.worst()) worst.push_back(rec(c));
  for (const auto& c : r.failing()) failing.push_back(rec(c));
  return Json{{"pass", r.pass()},      {"checks", r.checks()}, {"failures", r.failures()},
              {"clauses", clauses},    {"worst", worst},       {"failing", failing}};
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return Json::parse(ss.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(path + ": " + e.what());
  }
}

void write_text_atomic(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + tmp);
    out << text;
    out.flush();
    if (!out) throw InputError("write failed for " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw InputError("cannot rename " + tmp + " to " + path);
  }
}

}  // namespace gensol
