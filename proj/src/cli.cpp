#include "upcfekete/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <thread>

#include "upcfekete/extremal.hpp"
#include "upcfekete/fekete.hpp"
#include "upcfekete/measures.hpp"

namespace upcfekete::cli {

namespace fs = std::filesystem;

namespace {

using Problems = std::vector<std::string>;

// --- small readers that record problems instead of throwing ----------------

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed, Problems& out) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* k) { return key == k; }))
      out.push_back("unknown key '" + key + "' in " + where);
  }
}

std::optional<double> read_number(const json& obj, const char* key, const std::string& where, Problems& out,
                                  bool required = false) {
  if (!obj.contains(key)) {
    if (required) out.push_back("missing key '" + std::string(key) + "' in " + where);
    return std::nullopt;
  }
  const auto& v = obj.at(key);
  if (!v.is_number()) {
    out.push_back(where + "." + key + " must be a number");
    return std::nullopt;
  }
  return v.get<double>();
}

std::optional<int> read_int(const json& obj, const char* key, const std::string& where, Problems& out,
                            bool required = false) {
  if (!obj.contains(key)) {
    if (required) out.push_back("missing key '" + std::string(key) + "' in " + where);
    return std::nullopt;
  }
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) {
    out.push_back(where + "." + key + " must be an integer");
    return std::nullopt;
  }
  return v.get<int>();
}

std::optional<std::array<double, 2>> read_pair(const json& v, const std::string& what, Problems& out) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    out.push_back(what + " must be a pair of numbers");
    return std::nullopt;
  }
  return std::array<double, 2>{v[0].get<double>(), v[1].get<double>()};
}

std::vector<double> read_number_list(const json& v, const std::string& what, Problems& out) {
  std::vector<double> xs;
  if (!v.is_array()) {
    out.push_back(what + " must be a list of numbers");
    return xs;
  }
  for (const auto& x : v) {
    if (!x.is_number()) {
      out.push_back(what + " must be a list of numbers");
      return {};
    }
    xs.push_back(x.get<double>());
  }
  return xs;
}

json pair_json(double a, double b) { return json::array({a, b}); }
json cplx_json(cplx z) { return pair_json(z.real(), z.imag()); }

// Builds the set only when the document was clean; set constructors do the
// geometric validation and their messages are recorded too.
template <class F>
std::optional<geometry::CompactSet> guarded(Problems& out, std::size_t before, const std::string& where, F make) {
  if (out.size() != before) return std::nullopt;
  try {
    return make();
  } catch (const Error& e) {
    out.push_back(where + ": " + e.what());
    return std::nullopt;
  }
}

std::optional<geometry::CompactSet> try_set(const json& doc, const std::string& where, Problems& out) {
  const std::size_t before = out.size();
  if (!doc.is_object() || !doc.contains("type") || !doc.at("type").is_string()) {
    out.push_back(where + " must be an object with a string 'type'");
    return std::nullopt;
  }
  const std::string type = doc.at("type").get<std::string>();
  using geometry::CompactSet;
  if (type == "interval") {
    check_keys(doc, where, {"type", "a", "b"}, out);
    const auto a = read_number(doc, "a", where, out, true), b = read_number(doc, "b", where, out, true);
    return guarded(out, before, where, [&] { return CompactSet::interval(*a, *b); });
  }
  if (type == "box") {
    check_keys(doc, where, {"type", "lo", "hi"}, out);
    std::optional<std::array<double, 2>> lo, hi;
    if (!doc.contains("lo") || !doc.contains("hi"))
      out.push_back("missing key 'lo' or 'hi' in " + where);
    else {
      lo = read_pair(doc.at("lo"), where + ".lo", out);
      hi = read_pair(doc.at("hi"), where + ".hi", out);
    }
    return guarded(out, before, where, [&] { return CompactSet::box(*lo, *hi); });
  }
  if (type == "disk" || type == "circle") {
    if (type == "disk")
      check_keys(doc, where, {"type", "center", "radius"}, out);
    else
      check_keys(doc, where, {"type", "center", "radius", "mesh_points"}, out);
    std::optional<std::array<double, 2>> c = std::array<double, 2>{0.0, 0.0};
    if (doc.contains("center")) c = read_pair(doc.at("center"), where + ".center", out);
    const auto r = read_number(doc, "radius", where, out, true);
    const int mp = read_int(doc, "mesh_points", where, out).value_or(0);
    return guarded(out, before, where, [&] {
      const cplx center((*c)[0], (*c)[1]);
      return type == "disk" ? CompactSet::disk(center, *r) : CompactSet::circle(center, *r, mp);
    });
  }
  if (type == "polygon") {
    check_keys(doc, where, {"type", "vertices"}, out);
    std::vector<std::array<double, 2>> vs;
    if (!doc.contains("vertices") || !doc.at("vertices").is_array())
      out.push_back(where + ".vertices must be a list of [x, y] pairs");
    else
      for (const auto& v : doc.at("vertices"))
        if (auto p = read_pair(v, where + ".vertices[]", out)) vs.push_back(*p);
    return guarded(out, before, where, [&] { return CompactSet::convex_polygon(vs); });
  }
  if (type == "power_cusp") {
    check_keys(doc, where, {"type", "M", "m", "extent"}, out);
    const auto M = read_number(doc, "M", where, out, true);
    const auto m = read_int(doc, "m", where, out, true);
    const auto e = read_number(doc, "extent", where, out, true);
    return guarded(out, before, where, [&] { return CompactSet::power_cusp(*M, *m, *e); });
  }
  if (type == "comb") {
    check_keys(doc, where, {"type", "k_max", "a", "eps"}, out);
    if (doc.contains("k_max")) {
      const auto k = read_int(doc, "k_max", where, out);
      return guarded(out, before, where, [&] { return CompactSet::comb_default(*k); });
    }
    std::vector<double> a, eps;
    if (!doc.contains("a") || !doc.contains("eps"))
      out.push_back(where + " needs 'k_max' or both 'a' and 'eps'");
    else {
      a = read_number_list(doc.at("a"), where + ".a", out);
      eps = read_number_list(doc.at("eps"), where + ".eps", out);
    }
    return guarded(out, before, where, [&] { return CompactSet::comb(a, eps); });
  }
  if (type == "union") {
    check_keys(doc, where, {"type", "parts"}, out);
    std::vector<CompactSet> parts;
    if (!doc.contains("parts") || !doc.at("parts").is_array())
      out.push_back(where + ".parts must be a list of sets");
    else
      for (std::size_t i = 0; i < doc.at("parts").size(); ++i)
        if (auto s = try_set(doc.at("parts")[i], where + ".parts[" + std::to_string(i) + "]", out))
          parts.push_back(*s);
    return guarded(out, before, where, [&] { return CompactSet::union_of(parts); });
  }
  if (type == "ball_clip") {
    check_keys(doc, where, {"type", "base", "center", "radius"}, out);
    std::optional<CompactSet> base;
    if (!doc.contains("base"))
      out.push_back("missing key 'base' in " + where);
    else
      base = try_set(doc.at("base"), where + ".base", out);
    const auto r = read_number(doc, "radius", where, out, true);
    if (!doc.contains("center")) out.push_back("missing key 'center' in " + where);
    return guarded(out, before, where, [&] {
      return CompactSet::ball_clip(*base, point_from_json(doc.at("center"), base->dim()), *r);
    });
  }
  out.push_back(where + ".type '" + type + "' is not a known set type");
  return std::nullopt;
}

std::optional<Point> try_point(const json& doc, int n, const std::string& where, Problems& out) {
  try {
    return point_from_json(doc, n);
  } catch (const Error& e) {
    out.push_back(where + ": " + e.what());
    return std::nullopt;
  }
}

std::vector<int> parse_degrees(const json& v, Problems& out) {
  std::vector<int> ds;
  int lo = 0, hi = -1;
  bool as_range = false;
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    const auto dots = s.find("..");
    try {
      if (dots == std::string::npos) throw std::invalid_argument("no range");
      std::size_t used = 0;
      lo = std::stoi(s.substr(0, dots), &used);
      if (used != dots) throw std::invalid_argument("junk");
      const std::string rest = s.substr(dots + 2);
      hi = std::stoi(rest, &used);
      if (used != rest.size()) throw std::invalid_argument("junk");
      as_range = true;
    } catch (const std::exception&) {
      out.push_back("degrees: '" + s + "' is not of the form lo..hi");
      return ds;
    }
  } else if (v.is_object()) {
    Problems local;
    check_keys(v, "degrees", {"from", "to"}, local);
    const auto a = read_int(v, "from", "degrees", local, true), b = read_int(v, "to", "degrees", local, true);
    out.insert(out.end(), local.begin(), local.end());
    if (!local.empty()) return ds;
    lo = *a;
    hi = *b;
    as_range = true;
  } else if (v.is_array()) {
    for (const auto& x : v) {
      if (!x.is_number_integer()) {
        out.push_back("degrees must be integers");
        return {};
      }
      ds.push_back(x.get<int>());
    }
  } else {
    out.push_back("degrees must be 'lo..hi', {from, to} or a list");
    return ds;
  }
  if (as_range) {
    if (hi < lo) {
      out.push_back("degrees: empty range " + std::to_string(lo) + ".." + std::to_string(hi));
      return {};
    }
    for (int d = lo; d <= hi; ++d) ds.push_back(d);
  }
  if (ds.empty()) out.push_back("degrees: empty list");
  std::sort(ds.begin(), ds.end());
  ds.erase(std::unique(ds.begin(), ds.end()), ds.end());
  if (!ds.empty() && ds.front() < 1) out.push_back("degrees must be >= 1");
  return ds;
}

// --- output helpers --------------------------------------------------------

class Csv {
 public:
  explicit Csv(const fs::path& path) : out_(path, std::ios::binary) {
    if (!out_) throw Error("cli", ErrorKind::Input, "cannot write " + path.string());
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

void write_json(const fs::path& path, const json& doc) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cli", ErrorKind::Input, "cannot write " + path.string());
  f << doc.dump(2) << '\n';
}

std::vector<std::string> point_cells(const Point& p) {
  std::vector<std::string> c;
  for (int i = 0; i < p.n; ++i) {
    c.push_back(format_double(p[i].real()));
    c.push_back(format_double(p[i].imag()));
  }
  return c;
}

std::vector<std::string> point_header(int n) {
  std::vector<std::string> h;
  for (int i = 0; i < n; ++i) {
    h.push_back("re" + std::to_string(i));
    h.push_back("im" + std::to_string(i));
  }
  return h;
}

template <class T>
std::vector<T> concat(std::vector<T> a, const std::vector<T>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

// JSON numbers cannot carry NaN or infinities; store those as strings.
json num(double x) {
  if (std::isfinite(x)) return x;
  return format_double(x);
}

// Runs body(i) under the pool; the first failure (by index) is rethrown.
void parallel_each(const rates::ParallelFor& pool, std::size_t count, const std::function<void(std::size_t)>& body) {
  std::vector<std::exception_ptr> failures(count);
  pool(count, [&](std::size_t i) {
    try {
      body(i);
    } catch (...) {
      failures[i] = std::current_exception();
    }
  });
  for (auto& f : failures)
    if (f) std::rethrow_exception(f);
}

Weight make_weight(const ExperimentPlan& plan, const geometry::CompactSet& set) {
  if (plan.weight_amplitude == 0.0) return {};
  const double amp = plan.weight_amplitude, alpha = plan.alpha;
  Point center = plan.weight_center.value_or(set.dim() == 2 ? Point::real(0.0, 0.0) : Point::real(0.0));
  return [amp, alpha, center](const Point& z) { return amp * std::pow(std::sqrt(dist2(z, center)), alpha); };
}

struct RunContext {
  const ExperimentPlan& plan;
  geometry::CompactSet set;
  fs::path dir;
  std::string stem;
  std::string hash;
  rates::ParallelFor pool;
  bool verbose;
  std::ostream& log;
  std::vector<std::string> artifacts;

  fs::path file(const std::string& suffix) {
    artifacts.push_back(stem + suffix);
    return dir / (stem + suffix);
  }
  json header(const std::string& command) const {
    return {{"command", command}, {"plan_hash", hash}, {"tool_version", kToolVersion}};
  }
};

// --- commands --------------------------------------------------------------

int cmd_fekete(RunContext& ctx) {
  const auto& plan = ctx.plan;
  const auto solver = fekete::parse_solver(plan.solver);
  const Weight weight = make_weight(plan, ctx.set);
  std::vector<fekete::Configuration> configs(plan.degrees.size());
  std::vector<geometry::CandidateMesh> meshes(plan.degrees.size());
  parallel_each(ctx.pool, plan.degrees.size(), [&](std::size_t i) {
    const int d = plan.degrees[i];
    meshes[i] = geometry::generate_mesh(ctx.set, d, plan.density);
    const fekete::Problem problem(meshes[i], poly::Basis::default_for(ctx.set, d), weight);
    configs[i] = fekete::solve(problem, solver, plan.brute_budget);
    if (ctx.verbose) ctx.log << "fekete d=" << d << " objective=" << format_double(configs[i].objective) << '\n';
  });
  Csv csv(ctx.file(".csv"));
  csv.row(concat<std::string>({"d", "j"}, point_header(ctx.set.dim())));
  json summary = ctx.header("fekete");
  summary["solver"] = plan.solver;
  summary["degrees"] = json::array();
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const auto pts = fekete::canonical_points(configs[i]);
    for (std::size_t j = 0; j < pts.size(); ++j)
      csv.row(concat<std::string>({std::to_string(plan.degrees[i]), std::to_string(j)}, point_cells(pts[j])));
    summary["degrees"].push_back({{"d", plan.degrees[i]},
                                  {"N", pts.size()},
                                  {"objective", num(configs[i].objective)},
                                  {"mesh_points", meshes[i].points.size()},
                                  {"mesh_spacing", num(meshes[i].spacing)},
                                  {"provenance", fekete::provenance_name(configs[i].provenance)}});
  }
  write_json(ctx.file(".json"), summary);
  return 0;
}

std::vector<Point> default_eval_points(const geometry::CompactSet& set) {
  std::vector<cplx> offsets{1.5, 2.0, 3.0, cplx(0.0, 2.0)};
  std::vector<Point> out;
  if (const auto* s = std::get_if<geometry::Interval>(&set.kind())) {
    const double c = 0.5 * (s->a + s->b), h = 0.5 * (s->b - s->a);
    for (cplx w : offsets) out.push_back(Point::complex(c + h * w));
  } else if (const auto* s = std::get_if<geometry::Disk>(&set.kind())) {
    for (cplx w : offsets) out.push_back(Point::complex(s->center + s->radius * w));
  } else if (const auto* s = std::get_if<geometry::Circle>(&set.kind())) {
    for (cplx w : offsets) out.push_back(Point::complex(s->center + s->radius * w));
  } else {
    throw Error("cli", ErrorKind::Input, "extremal needs evaluation points ('points') for " + set.kind_name());
  }
  return out;
}

double green_oracle(const geometry::CompactSet& set, const Point& z) {
  if (z.n != 1) return std::numeric_limits<double>::quiet_NaN();
  if (const auto* s = std::get_if<geometry::Interval>(&set.kind()))
    return extremal::interval_green((2.0 * z[0] - s->a - s->b) / (s->b - s->a));
  if (const auto* s = std::get_if<geometry::Disk>(&set.kind()))
    return std::max(0.0, std::log(std::abs(z[0] - s->center) / s->radius));
  if (const auto* s = std::get_if<geometry::Circle>(&set.kind()))
    return std::max(0.0, std::log(std::abs(z[0] - s->center) / s->radius));
  return std::numeric_limits<double>::quiet_NaN();
}

int cmd_extremal(RunContext& ctx) {
  const auto& plan = ctx.plan;
  const auto solver = fekete::parse_solver(plan.solver);
  std::vector<Point> zs = plan.points.empty() ? default_eval_points(ctx.set) : plan.points;
  for (auto& z : zs)
    if (z.n != ctx.set.dim()) throw Error("cli", ErrorKind::Input, "evaluation point dimension differs from the set");
  // complex evaluation points for real sets: promote to C^n
  std::vector<std::optional<extremal::SetEstimate>> est(plan.degrees.size());
  std::vector<std::vector<extremal::Bracket>> brackets(plan.degrees.size());
  parallel_each(ctx.pool, plan.degrees.size(), [&](std::size_t i) {
    est[i].emplace(extremal::estimate_for_set(ctx.set, plan.degrees[i], plan.density, solver));
    for (const auto& z : zs) brackets[i].push_back(est[i]->estimate.bracket(z));
  });
  Csv csv(ctx.file(".csv"));
  csv.row(concat<std::string>(concat<std::string>({"d"}, point_header(ctx.set.dim())),
                              {"lower", "upper", "slack", "oracle"}));
  json summary = ctx.header("extremal");
  summary["degrees"] = json::array();
  for (std::size_t i = 0; i < est.size(); ++i) {
    const auto& se = *est[i];
    for (std::size_t k = 0; k < zs.size(); ++k)
      csv.row(concat<std::string>(
          concat<std::string>({std::to_string(plan.degrees[i])}, point_cells(zs[k])),
          {format_double(brackets[i][k].lower), format_double(brackets[i][k].upper), format_double(se.slack()),
           format_double(green_oracle(ctx.set, zs[k]))}));
    summary["degrees"].push_back({{"d", plan.degrees[i]},
                                  {"N", se.estimate.configuration().points.size()},
                                  {"mesh_points", se.mesh.points.size()},
                                  {"mesh_defect", num(se.mesh_defect)},
                                  {"count_slack", num(se.estimate.count_slack())},
                                  {"max_lagrange_norm", num(se.estimate.max_lagrange_norm())},
                                  {"slack", num(se.slack())}});
  }
  write_json(ctx.file(".json"), summary);
  return 0;
}

int cmd_hcp(RunContext& ctx) {
  const auto& plan = ctx.plan;
  const auto& h = plan.hcp;
  const auto solver = fekete::parse_solver(plan.solver);
  Point anchor;
  if (h.anchor)
    anchor = *h.anchor;
  else if (const auto* s = std::get_if<geometry::Interval>(&ctx.set.kind()))
    anchor = Point::real(s->a);
  else
    throw Error("cli", ErrorKind::Input, "hcp needs hcp.anchor for " + ctx.set.kind_name());
  const int degree = h.degree > 0 ? h.degree : plan.degrees.back();
  std::vector<double> deltas;
  for (int i = 0; i < h.delta_count; ++i)
    deltas.push_back(h.delta_count == 1 ? h.delta_from
                                        : h.delta_from * std::pow(h.delta_to / h.delta_from,
                                                                  static_cast<double>(i) / (h.delta_count - 1)));
  std::vector<extremal::ModulusSamples> samples(h.radii.size());
  parallel_each(ctx.pool, h.radii.size(), [&](std::size_t i) {
    samples[i] = extremal::modulus_of_continuity(ctx.set, anchor, h.radii[i], deltas, degree, solver, plan.density);
  });
  Csv csv(ctx.file(".csv"));
  csv.row({"r", "delta", "value"});
  for (const auto& s : samples)
    for (std::size_t k = 0; k < s.deltas.size(); ++k)
      csv.row({format_double(s.r), format_double(s.deltas[k]), format_double(s.values[k])});
  json summary = ctx.header("hcp");
  summary["anchor"] = point_to_json(anchor, !ctx.set.is_real());
  summary["degree"] = degree;
  try {
    const auto fit = extremal::hcp_fit(samples);
    summary["fit"] = {{"mu", num(fit.mu)},     {"q", num(fit.q)},       {"C", num(fit.C)},
                      {"max_residual", num(fit.max_residual)}, {"used", fit.used}, {"excluded", fit.excluded}};
  } catch (const Error& e) {
    summary["fit"] = {{"error", e.code()}, {"message", e.what()}};
    write_json(ctx.file(".json"), summary);
    throw;
  }
  write_json(ctx.file(".json"), summary);
  return 0;
}

json witness_json(const geometry::Witness& w, bool complex_ambient) {
  return {{"t", num(w.t)},
          {"u", point_to_json(w.u, complex_ambient)},
          {"x", point_to_json(w.x, complex_ambient)},
          {"reason", w.reason}};
}

int cmd_validate_upc(RunContext& ctx) {
  const auto& plan = ctx.plan;
  const UpcSpec spec = plan.upc.value_or(UpcSpec{json{{"type", "builtin"}}});
  const auto u = descriptor_from_json(spec.descriptor, ctx.set);
  const bool cx = !ctx.set.is_real();
  const auto anchors = geometry::generate_mesh(ctx.set, spec.anchor_degree, 1.0).points;
  const auto validation = geometry::validate_upc(u, anchors, {spec.t_points, spec.u_points});
  const auto ws = geometry::unit_cube_grid(u.dim(), u.ambient(), spec.u_points);
  std::vector<geometry::InclusionReport> inclusion(anchors.size());
  parallel_each(ctx.pool, anchors.size(), [&](std::size_t i) {
    inclusion[i] = geometry::check_cusp_inclusion(u, anchors[i], spec.r, anchors, spec.t_points, ws);
  });
  const auto coeffs = geometry::coefficient_bound(u, anchors);

  Csv csv(ctx.file(".csv"));
  csv.row(concat<std::string>(point_header(u.dim()), {"r_prime", "inclusion_ok", "witnesses"}));
  bool inclusion_ok = true;
  std::size_t witness_total = 0;
  json first_witnesses = json::array();
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    const auto& rep = inclusion[i];
    inclusion_ok = inclusion_ok && rep.ok;
    witness_total += rep.witnesses.size();
    for (const auto& w : rep.witnesses)
      if (first_witnesses.size() < 20) first_witnesses.push_back(witness_json(w, cx));
    csv.row(concat<std::string>(point_cells(anchors[i]), {format_double(rep.r_prime), rep.ok ? "1" : "0",
                                                          std::to_string(rep.witnesses.size())}));
  }
  const bool coeff_ok = coeffs.max_roundtrip_error <= 1e-8;
  const bool ok = validation.ok && inclusion_ok && coeff_ok;

  json report = ctx.header("validate-upc");
  report["ok"] = ok;
  report["descriptor"] = descriptor_to_json(u);
  json vw = json::array();
  for (const auto& w : validation.witnesses)
    if (vw.size() < 20) vw.push_back(witness_json(w, cx));
  report["validation"] = {{"ok", validation.ok},
                          {"t_points", validation.t_points},
                          {"anchors_checked", validation.anchors_checked},
                          {"min_ratio", num(validation.min_ratio)},
                          {"witnesses", vw}};
  report["inclusion"] = {{"ok", inclusion_ok},
                         {"r", spec.r},
                         {"grid", {spec.t_points, spec.u_points}},
                         {"witness_count", witness_total},
                         {"witnesses", first_witnesses}};
  report["coefficients"] = {{"per_degree", coeffs.per_degree},
                            {"max_roundtrip_error", num(coeffs.max_roundtrip_error)},
                            {"ok", coeff_ok}};
  write_json(ctx.file(".json"), report);
  return ok ? 0 : 1;
}

rates::RatePlan to_rate_plan(const ExperimentPlan& plan, const geometry::CompactSet& set) {
  rates::RatePlan rp;
  rp.set = set;
  rp.gamma = plan.gamma;
  rp.alpha = plan.alpha;
  rp.cusp_m = plan.cusp_m;
  rp.degrees = plan.degrees;
  rp.solver = fekete::parse_solver(plan.solver);
  rp.density = plan.density;
  rp.surrogate_degree = plan.surrogate_degree;
  rp.dictionary_size = plan.dictionary_size;
  rp.reference_max_intervals = plan.reference_max_intervals;
  rp.weight.amplitude = plan.weight_amplitude;
  if (plan.weight_center) rp.weight.center = *plan.weight_center;
  else rp.weight.center = set.dim() == 2 ? Point::real(0.0, 0.0) : Point::real(0.0);
  return rp;
}

void write_rate_report(RunContext& ctx, const rates::RateReport& rep, const char* status) {
  Csv csv(ctx.file(".csv"));
  csv.row({"d", "N_d", "objective", "dist_lower", "dist_upper", "bound", "in_fit"});
  for (const auto& r : rep.rows)
    csv.row({std::to_string(r.d), std::to_string(r.N), format_double(r.objective), format_double(r.lower),
             format_double(r.upper), format_double(r.bound), r.in_fit ? "1" : "0"});
  const auto& k = rep.constants;
  const auto& v = rep.verdict;
  json doc = ctx.header("rates");
  doc["status"] = status;
  doc["constants"] = {{"alpha", num(k.alpha)}, {"gamma", num(k.gamma)},        {"m", k.m},
                      {"n", k.n},              {"mu", num(k.mu)},              {"q", num(k.q)},
                      {"tau", num(k.tau)},     {"alpha_prime", num(k.alpha_prime)},
                      {"alpha_double_prime", num(k.alpha_double_prime)}};
  doc["calibration"] = {{"d0", v.d0}, {"c", num(v.c)}};
  doc["slope"] = num(v.slope);
  doc["fit_points"] = v.fit_points;
  doc["verdict"] = {{"bound_ok", v.bound_ok}, {"slope_ok", v.slope_ok}, {"pass", v.pass},
                    {"label", v.pass ? "PASS" : "FAIL"}};
  doc["gamma_above_one"] = k.gamma > 1.0;
  doc["reference"] = rep.reference;
  if (rep.reference_quality) {
    const auto& q = *rep.reference_quality;
    doc["reference_quality"] = {{"degree", q.degree},
                                {"half_degree", q.half_degree},
                                {"self_distance", num(q.self_distance)},
                                {"mesh_capped", q.mesh_capped}};
  }
  doc["caveats"] = rep.caveats;
  write_json(ctx.file(".json"), doc);
}

int cmd_rates(RunContext& ctx) {
  try {
    const auto rep = rates::run_experiment(to_rate_plan(ctx.plan, ctx.set), ctx.pool);
    write_rate_report(ctx, rep, "complete");
    if (ctx.verbose) ctx.log << "rates verdict " << (rep.verdict.pass ? "PASS" : "FAIL") << '\n';
  } catch (const rates::ExperimentError& e) {
    write_rate_report(ctx, e.partial(), "partial");
    throw;
  }
  return 0;
}

}  // namespace

// --- public ----------------------------------------------------------------

PlanError::PlanError(std::vector<std::string> problems)
    : Error("cli", ErrorKind::Input,
            [&] {
              std::string msg;
              for (const auto& p : problems) msg += (msg.empty() ? "" : "; ") + p;
              return msg;
            }()),
      problems_(std::move(problems)) {}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json point_to_json(const Point& p, bool complex_ambient) {
  json out = json::array();
  for (int i = 0; i < p.n; ++i) {
    if (complex_ambient)
      out.push_back(cplx_json(p[i]));
    else
      out.push_back(p[i].real());
  }
  return out;
}

Point point_from_json(const json& doc, int n) {
  auto fail = [&] {
    return Error("cli", ErrorKind::Input,
                 "a point needs " + std::to_string(n) + " coordinate(s), each a number or [re, im]");
  };
  if (doc.is_number() && n == 1) return Point::real(doc.get<double>());
  if (!doc.is_array() || static_cast<int>(doc.size()) != n) throw fail();
  Point p;
  p.n = n;
  for (int i = 0; i < n; ++i) {
    const auto& c = doc[static_cast<std::size_t>(i)];
    if (c.is_number())
      p[i] = cplx(c.get<double>(), 0.0);
    else if (c.is_array() && c.size() == 2 && c[0].is_number() && c[1].is_number())
      p[i] = cplx(c[0].get<double>(), c[1].get<double>());
    else
      throw fail();
  }
  return p;
}

json set_to_json(const geometry::CompactSet& set) {
  using namespace geometry;
  return std::visit(
      [&](const auto& s) -> json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Interval>) {
          return {{"type", "interval"}, {"a", s.a}, {"b", s.b}};
        } else if constexpr (std::is_same_v<T, Box>) {
          return {{"type", "box"}, {"lo", pair_json(s.lo[0], s.lo[1])}, {"hi", pair_json(s.hi[0], s.hi[1])}};
        } else if constexpr (std::is_same_v<T, Disk>) {
          return {{"type", "disk"}, {"center", cplx_json(s.center)}, {"radius", s.radius}};
        } else if constexpr (std::is_same_v<T, Circle>) {
          return {{"type", "circle"},
                  {"center", cplx_json(s.center)},
                  {"radius", s.radius},
                  {"mesh_points", s.mesh_points}};
        } else if constexpr (std::is_same_v<T, ConvexPolygon>) {
          json vs = json::array();
          for (const auto& v : s.vertices) vs.push_back(pair_json(v[0], v[1]));
          return {{"type", "polygon"}, {"vertices", vs}};
        } else if constexpr (std::is_same_v<T, PowerCusp>) {
          return {{"type", "power_cusp"}, {"M", s.M}, {"m", s.m}, {"extent", s.extent}};
        } else if constexpr (std::is_same_v<T, Comb>) {
          return {{"type", "comb"}, {"a", s.a}, {"eps", s.eps}};
        } else if constexpr (std::is_same_v<T, Union>) {
          json parts = json::array();
          for (const auto& p : s.parts) parts.push_back(set_to_json(p));
          return {{"type", "union"}, {"parts", parts}};
        } else {
          return {{"type", "ball_clip"},
                  {"base", set_to_json(*s.base)},
                  {"center", point_to_json(s.center, !s.base->is_real())},
                  {"radius", s.radius}};
        }
      },
      set.kind());
}

geometry::CompactSet set_from_json(const json& doc) {
  Problems out;
  auto s = try_set(doc, "set", out);
  if (!out.empty() || !s) throw PlanError(out.empty() ? Problems{"set: invalid"} : out);
  return *s;
}

json descriptor_to_json(const geometry::UpcDescriptor& u) {
  const bool cx = u.ambient() == geometry::Ambient::Complex;
  json terms = json::array();
  for (const auto& t : u.terms()) {
    json lin = json::array();
    for (int r = 0; r < u.dim(); ++r) {
      json row = json::array();
      for (int c = 0; c < u.dim(); ++c) {
        const cplx v = t.linear[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
        row.push_back(cx ? cplx_json(v) : json(v.real()));
      }
      lin.push_back(row);
    }
    terms.push_back({{"linear", lin}, {"offset", point_to_json(t.offset, cx)}});
  }
  return {{"type", "explicit"}, {"M", u.M()},  {"m", u.m()},
          {"n", u.dim()},       {"ambient", cx ? "complex" : "real"}, {"terms", terms}};
}

geometry::UpcDescriptor descriptor_from_json(const json& doc, const geometry::CompactSet& set) {
  Problems out;
  if (!doc.is_object() || !doc.contains("type") || !doc.at("type").is_string())
    throw PlanError({"upc.descriptor must be an object with a string 'type'"});
  const std::string type = doc.at("type").get<std::string>();
  if (type == "builtin") {
    check_keys(doc, "upc.descriptor", {"type", "M"}, out);
    const auto M = read_number(doc, "M", "upc.descriptor", out);
    if (!out.empty()) throw PlanError(out);
    auto u = geometry::builtin_descriptor(set);
    return M ? u.with_M(*M) : u;
  }
  if (type != "explicit") throw PlanError({"upc.descriptor.type '" + type + "' is not 'builtin' or 'explicit'"});
  check_keys(doc, "upc.descriptor", {"type", "M", "m", "n", "ambient", "terms"}, out);
  const auto M = read_number(doc, "M", "upc.descriptor", out, true);
  const auto m = read_int(doc, "m", "upc.descriptor", out, true);
  const auto n = read_int(doc, "n", "upc.descriptor", out, true);
  const std::string amb = doc.value("ambient", std::string("real"));
  if (amb != "real" && amb != "complex") out.push_back("upc.descriptor.ambient must be 'real' or 'complex'");
  if (!doc.contains("terms") || !doc.at("terms").is_array()) out.push_back("upc.descriptor.terms must be a list");
  if (!out.empty()) throw PlanError(out);
  if (*n < 1 || *n > 2) throw PlanError({"upc.descriptor.n must be 1 or 2"});
  std::vector<geometry::AffineTerm> terms;
  for (const auto& t : doc.at("terms")) {
    geometry::AffineTerm term;
    try {
      const auto& lin = t.at("linear");
      for (int r = 0; r < *n; ++r)
        for (int c = 0; c < *n; ++c) {
          const auto& v = lin.at(static_cast<std::size_t>(r)).at(static_cast<std::size_t>(c));
          term.linear[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] =
              v.is_array() ? cplx(v.at(0).get<double>(), v.at(1).get<double>()) : cplx(v.get<double>(), 0.0);
        }
      term.offset = point_from_json(t.at("offset"), *n);
    } catch (const json::exception&) {
      throw PlanError({"upc.descriptor.terms: each term needs an n x n 'linear' matrix and an 'offset' point"});
    }
    terms.push_back(term);
  }
  return geometry::UpcDescriptor(*M, *m, std::move(terms), *n,
                                 amb == "complex" ? geometry::Ambient::Complex : geometry::Ambient::Real,
                                 std::make_shared<const geometry::CompactSet>(set));
}

ExperimentPlan parse_plan(const json& doc) {
  Problems out;
  if (!doc.is_object()) throw PlanError({"plan must be an object"});
  check_keys(doc,
             "plan", {"set", "upc", "gamma", "alpha", "degrees", "solver", "density", "reference", "dictionary_size",
                      "output", "weight", "cusp_m", "points", "hcp", "brute_budget"},
             out);
  ExperimentPlan plan;

  std::optional<geometry::CompactSet> set;
  if (!doc.contains("set"))
    out.push_back("missing key 'set' in plan");
  else if ((set = try_set(doc.at("set"), "set", out)))
    plan.set = set_to_json(*set);
  const int n = set ? set->dim() : 1;

  if (auto g = read_number(doc, "gamma", "plan", out)) {
    plan.gamma = *g;
    if (!(plan.gamma > 0.0 && plan.gamma <= 2.0)) out.push_back("γ must lie in (0,2]");
  }
  if (auto a = read_number(doc, "alpha", "plan", out)) {
    plan.alpha = *a;
    if (!(plan.alpha > 0.0 && plan.alpha <= 1.0)) out.push_back("α must lie in (0,1]");
  }
  if (!doc.contains("degrees"))
    out.push_back("missing key 'degrees' in plan");
  else
    plan.degrees = parse_degrees(doc.at("degrees"), out);

  if (doc.contains("solver")) {
    if (!doc.at("solver").is_string()) {
      out.push_back("solver must be a string");
    } else {
      plan.solver = doc.at("solver").get<std::string>();
      try {
        fekete::parse_solver(plan.solver);
      } catch (const Error& e) {
        out.push_back(std::string("solver: ") + e.what());
      }
    }
  }
  if (auto v = read_number(doc, "density", "plan", out)) {
    plan.density = *v;
    if (!(plan.density > 0.0)) out.push_back("density must be > 0");
  }
  if (auto v = read_int(doc, "dictionary_size", "plan", out)) {
    plan.dictionary_size = *v;
    if (*v < 1 || *v > 4096) out.push_back("dictionary_size must lie in [1, 4096]");
  }
  if (doc.contains("output")) {
    if (doc.at("output").is_string())
      plan.output = doc.at("output").get<std::string>();
    else
      out.push_back("output must be a string");
  }
  if (auto v = read_int(doc, "cusp_m", "plan", out)) {
    plan.cusp_m = *v;
    if (*v < 1) out.push_back("cusp_m must be >= 1");
  }
  if (doc.contains("brute_budget")) {
    const auto& b = doc.at("brute_budget");
    if (!b.is_number_unsigned() || b.get<std::uint64_t>() == 0)
      out.push_back("brute_budget must be a positive integer");
    else
      plan.brute_budget = b.get<std::uint64_t>();
  }

  if (doc.contains("reference")) {
    const auto& r = doc.at("reference");
    if (r.is_string() && r.get<std::string>() == "closed-form") {
    } else if (r.is_object() && r.contains("type") && r.at("type").is_string()) {
      const std::string type = r.at("type").get<std::string>();
      if (type == "closed-form") {
        check_keys(r, "reference", {"type"}, out);
      } else if (type == "surrogate") {
        check_keys(r, "reference", {"type", "degree", "max_intervals"}, out);
        if (auto D = read_int(r, "degree", "reference", out, true)) {
          plan.surrogate_degree = *D;
          if (*D < 2) out.push_back("reference.degree must be >= 2");
        }
        if (auto mi = read_int(r, "max_intervals", "reference", out)) {
          plan.reference_max_intervals = *mi;
          if (*mi < 1) out.push_back("reference.max_intervals must be >= 1");
        }
      } else {
        out.push_back("reference.type must be 'closed-form' or 'surrogate'");
      }
    } else {
      out.push_back("reference must be 'closed-form' or {type: 'surrogate', degree: D}");
    }
  }

  if (doc.contains("weight")) {
    const auto& w = doc.at("weight");
    if (!w.is_object()) {
      out.push_back("weight must be an object");
    } else {
      check_keys(w, "weight", {"amplitude", "center"}, out);
      plan.weight_amplitude = read_number(w, "amplitude", "weight", out).value_or(0.0);
      if (w.contains("center")) plan.weight_center = try_point(w.at("center"), n, "weight.center", out);
    }
  }

  if (doc.contains("points")) {
    if (!doc.at("points").is_array())
      out.push_back("points must be a list of points");
    else
      for (std::size_t i = 0; i < doc.at("points").size(); ++i)
        if (auto p = try_point(doc.at("points")[i], n, "points[" + std::to_string(i) + "]", out))
          plan.points.push_back(*p);
  }

  if (doc.contains("hcp")) {
    const auto& h = doc.at("hcp");
    if (!h.is_object()) {
      out.push_back("hcp must be an object");
    } else {
      check_keys(h, "hcp", {"anchor", "radii", "deltas", "degree"}, out);
      if (h.contains("anchor")) plan.hcp.anchor = try_point(h.at("anchor"), n, "hcp.anchor", out);
      if (h.contains("radii")) {
        plan.hcp.radii = read_number_list(h.at("radii"), "hcp.radii", out);
        if (plan.hcp.radii.empty()) out.push_back("hcp.radii must not be empty");
        for (double r : plan.hcp.radii)
          if (!(r > 0.0)) out.push_back("hcp.radii must be positive");
      }
      if (h.contains("deltas")) {
        const auto& d = h.at("deltas");
        if (!d.is_object()) {
          out.push_back("hcp.deltas must be {from, to, count}");
        } else {
          check_keys(d, "hcp.deltas", {"from", "to", "count"}, out);
          plan.hcp.delta_from = read_number(d, "from", "hcp.deltas", out).value_or(plan.hcp.delta_from);
          plan.hcp.delta_to = read_number(d, "to", "hcp.deltas", out).value_or(plan.hcp.delta_to);
          plan.hcp.delta_count = read_int(d, "count", "hcp.deltas", out).value_or(plan.hcp.delta_count);
          if (!(plan.hcp.delta_from > 0.0 && plan.hcp.delta_to > plan.hcp.delta_from))
            out.push_back("hcp.deltas needs 0 < from < to");
          if (plan.hcp.delta_count < 2) out.push_back("hcp.deltas.count must be >= 2");
        }
      }
      if (auto dg = read_int(h, "degree", "hcp", out)) {
        plan.hcp.degree = *dg;
        if (*dg < 0) out.push_back("hcp.degree must be >= 0 (0: largest plan degree)");
      }
    }
  }

  if (doc.contains("upc")) {
    const auto& u = doc.at("upc");
    UpcSpec spec{json{{"type", "builtin"}}};
    if (u.is_string() && u.get<std::string>() == "builtin") {
    } else if (u.is_object()) {
      check_keys(u, "upc", {"descriptor", "t_points", "u_points", "anchor_degree", "r"}, out);
      if (u.contains("descriptor")) {
        const auto& d = u.at("descriptor");
        spec.descriptor = d.is_string() ? json{{"type", d.get<std::string>()}} : d;
      }
      spec.t_points = read_int(u, "t_points", "upc", out).value_or(spec.t_points);
      spec.u_points = read_int(u, "u_points", "upc", out).value_or(spec.u_points);
      spec.anchor_degree = read_int(u, "anchor_degree", "upc", out).value_or(spec.anchor_degree);
      spec.r = read_number(u, "r", "upc", out).value_or(spec.r);
      if (spec.t_points < 1 || spec.u_points < 1) out.push_back("upc.t_points and upc.u_points must be >= 1");
      if (spec.anchor_degree < 1) out.push_back("upc.anchor_degree must be >= 1");
      if (!(spec.r > 0.0)) out.push_back("upc.r must be > 0");
    } else {
      out.push_back("upc must be 'builtin' or an object");
    }
    if (set && out.empty()) {
      try {
        // explicit descriptors are stored canonically; "builtin" stays short
        const auto u = descriptor_from_json(spec.descriptor, *set);
        if (spec.descriptor.value("type", "") == "explicit") spec.descriptor = descriptor_to_json(u);
      } catch (const PlanError& e) {
        out.insert(out.end(), e.problems().begin(), e.problems().end());
      } catch (const Error& e) {
        out.push_back(std::string("upc: ") + e.what());
      }
    }
    plan.upc = spec;
  }

  if (!out.empty()) throw PlanError(out);
  return plan;
}

json serialize(const ExperimentPlan& plan) {
  json doc{{"set", plan.set},
           {"gamma", plan.gamma},
           {"alpha", plan.alpha},
           {"degrees", plan.degrees},
           {"solver", plan.solver},
           {"density", plan.density},
           {"dictionary_size", plan.dictionary_size},
           {"output", plan.output},
           {"brute_budget", plan.brute_budget}};
  if (plan.surrogate_degree)
    doc["reference"] = {{"type", "surrogate"},
                        {"degree", *plan.surrogate_degree},
                        {"max_intervals", plan.reference_max_intervals}};
  else
    doc["reference"] = {{"type", "closed-form"}};
  if (plan.weight_amplitude != 0.0 || plan.weight_center) {
    doc["weight"] = {{"amplitude", plan.weight_amplitude}};
    if (plan.weight_center) doc["weight"]["center"] = point_to_json(*plan.weight_center, true);
  }
  if (plan.cusp_m) doc["cusp_m"] = *plan.cusp_m;
  if (!plan.points.empty()) {
    json pts = json::array();
    for (const auto& p : plan.points) pts.push_back(point_to_json(p, true));
    doc["points"] = pts;
  }
  json h{{"radii", plan.hcp.radii},
         {"deltas", {{"from", plan.hcp.delta_from}, {"to", plan.hcp.delta_to}, {"count", plan.hcp.delta_count}}},
         {"degree", plan.hcp.degree}};
  if (plan.hcp.anchor) h["anchor"] = point_to_json(*plan.hcp.anchor, true);
  doc["hcp"] = h;
  if (plan.upc)
    doc["upc"] = {{"descriptor", plan.upc->descriptor},
                  {"t_points", plan.upc->t_points},
                  {"u_points", plan.upc->u_points},
                  {"anchor_degree", plan.upc->anchor_degree},
                  {"r", plan.upc->r}};
  return doc;
}

std::uint64_t plan_hash(const ExperimentPlan& plan) {
  json doc = serialize(plan);
  doc.erase("output");
  const std::string text = doc.dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string plan_hash_hex(const ExperimentPlan& plan) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(plan_hash(plan)));
  return buf;
}

rates::ParallelFor thread_pool(unsigned workers) {
  if (workers <= 1) return rates::sequential_for;
  return [workers](std::size_t count, const std::function<void(std::size_t)>& body) {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> threads;
    const unsigned used = static_cast<unsigned>(std::min<std::size_t>(workers, count));
    for (unsigned t = 0; t < used; ++t)
      threads.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) body(i);
      });
    for (auto& th : threads) th.join();
  };
}

bool is_command(const std::string& name) {
  for (const char* c : {"fekete", "extremal", "hcp", "rates", "constants", "validate-upc"})
    if (name == c) return true;
  return false;
}

std::string usage() {
  return "usage: upcfekete <command> [options]\n"
         "commands:\n"
         "  fekete        Fekete configurations for each plan degree\n"
         "  extremal      Lagrange brackets for the extremal function\n"
         "  hcp           modulus of continuity samples and HCP fit\n"
         "  rates         equidistribution experiment against the rate bound\n"
         "  constants     rate constants for --alpha --gamma --m --n\n"
         "  validate-upc  check a UPC descriptor for the plan's set\n"
         "options:\n"
         "  --plan <path>   plan document (JSON); required except for constants\n"
         "  --out <dir>     output directory (overrides the plan)\n"
         "  --workers <k>   worker threads (default: logical cores)\n"
         "  --verbose       progress on stderr\n";
}

int run_constants(const ConstantsArgs& a, std::ostream& out, std::ostream& err) {
  try {
    const auto k = rates::rate_constants(a.alpha, a.gamma, a.m, a.n);
    out << "alpha=" << format_double(k.alpha) << '\n'
        << "gamma=" << format_double(k.gamma) << '\n'
        << "m=" << k.m << '\n'
        << "n=" << k.n << '\n'
        << "mu=" << format_double(k.mu) << '\n'
        << "q=" << format_double(k.q) << '\n'
        << "tau=" << format_double(k.tau) << '\n'
        << "alpha_prime=" << format_double(k.alpha_prime) << '\n'
        << "alpha_double_prime=" << format_double(k.alpha_double_prime) << '\n';
    if (a.gamma <= 1.0) out << "dmn_alpha_prime=" << format_double(rates::dmn_alpha_prime(a.gamma, a.alpha)) << '\n';
    return 0;
  } catch (const Error& e) {
    err << json{{"code", e.code()}, {"message", e.what()}}.dump() << '\n';
    return 2;
  }
}

int dispatch(const std::string& command, const ExperimentPlan& plan, const RunOptions& options, std::ostream& out,
             std::ostream& err) {
  if (!is_command(command) || command == "constants") {
    err << usage();
    return 2;
  }
  const auto t0 = std::chrono::steady_clock::now();
  const std::string hash = plan_hash_hex(plan);
  const fs::path dir = options.out_dir.value_or(plan.output);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    err << json{{"code", "cli.input"}, {"message", "cannot create " + dir.string() + ": " + ec.message()}}.dump()
        << '\n';
    return 1;
  }
  const std::string stem = command + "-" + hash;
  RunContext ctx{plan, geometry::CompactSet::interval(-1, 1), dir, stem, hash, thread_pool(options.workers),
                 options.verbose, err, {}};
  write_json(dir / (stem + ".plan.json"), serialize(plan));
  ctx.artifacts.push_back(stem + ".plan.json");

  int status = 1;
  json error;
  try {
    ctx.set = set_from_json(plan.set);
    if (command == "fekete") status = cmd_fekete(ctx);
    else if (command == "extremal") status = cmd_extremal(ctx);
    else if (command == "hcp") status = cmd_hcp(ctx);
    else if (command == "rates") status = cmd_rates(ctx);
    else status = cmd_validate_upc(ctx);
  } catch (const Error& e) {
    error = {{"code", e.code()}, {"message", e.what()}};
    if (const auto* pe = dynamic_cast<const PlanError*>(&e)) error["problems"] = pe->problems();
  } catch (const std::exception& e) {
    error = {{"code", "cli.internal"}, {"message", e.what()}};
  }
  if (!error.is_null()) {
    status = 1;
    write_json(ctx.file(".error.json"), error);
    err << error.dump() << '\n';
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  json manifest{{"command", command},
                {"plan_hash", hash},
                {"tool_version", kToolVersion},
                {"wall_seconds", seconds},
                {"exit_status", status},
                {"artifacts", ctx.artifacts}};
  write_json(dir / (stem + ".manifest.json"), manifest);
  out << (dir / (stem + ".manifest.json")).string() << '\n';
  return status;
}

}  // namespace upcfekete::cli
