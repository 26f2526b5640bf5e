#include "measfem/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>

namespace measfem
{

using nlohmann::json;

namespace
{

constexpr double pi = M_PI;

Point point_from_json(const json &j, const std::string &field)
{
  if (!j.is_array() || j.size() < 2 || j.size() > 3)
    throw ConfigError(field, "expected an array of 2 or 3 numbers");
  Point p{0.0, 0.0, 0.0};
  for (std::size_t k = 0; k < j.size(); ++k)
  {
    if (!j[k].is_number())
      throw ConfigError(field + "/" + std::to_string(k), "expected a number");
    p[k] = j[k].get<double>();
  }
  return p;
}

json point_to_json(const Point &p, int dim)
{
  json a = json::array();
  for (int k = 0; k < dim; ++k)
    a.push_back(p[k]);
  return a;
}

template <typename T>
T get_field(const json &obj, const std::string &key, const std::string &path)
{
  if (!obj.contains(key))
    throw ConfigError(path + "/" + key, "missing required field");
  try
  {
    return obj.at(key).get<T>();
  }
  catch (const json::exception &e)
  {
    throw ConfigError(path + "/" + key, std::string("wrong type (") + e.what() + ")");
  }
}

template <typename T>
T get_or(const json &obj, const std::string &key, const std::string &path, T fallback)
{
  if (!obj.contains(key) || obj.at(key).is_null())
    return fallback;
  return get_field<T>(obj, key, path);
}

DomainSpec::Kind domain_kind_from_string(const std::string &s, const std::string &field)
{
  if (s == "lshape")
    return DomainSpec::Kind::lshape;
  if (s == "hexagon")
    return DomainSpec::Kind::hexagon;
  if (s == "cube")
    return DomainSpec::Kind::cube;
  if (s == "unit_square")
    return DomainSpec::Kind::unit_square;
  throw ConfigError(field, "unknown domain type '" + s + "'");
}

std::string scheme_choice_string(SchemeChoice s)
{
  switch (s)
  {
  case SchemeChoice::standard:
    return "standard";
  case SchemeChoice::berggren:
    return "berggren";
  case SchemeChoice::both:
    return "both";
  }
  return "?";
}

NamedRegion named(const std::string &name, RegionPredicate r) { return {name, r}; }

} // namespace

std::string to_string(DomainSpec::Kind kind)
{
  switch (kind)
  {
  case DomainSpec::Kind::lshape:
    return "lshape";
  case DomainSpec::Kind::hexagon:
    return "hexagon";
  case DomainSpec::Kind::cube:
    return "cube";
  case DomainSpec::Kind::unit_square:
    return "unit_square";
  }
  return "?";
}

std::string to_string(Norm norm) { return norm == Norm::L2 ? "L2" : "H1seminorm"; }

Norm norm_from_string(const std::string &name)
{
  if (name == "L2")
    return Norm::L2;
  if (name == "H1seminorm" || name == "H1")
    return Norm::H1seminorm;
  throw std::invalid_argument("unknown norm '" + name + "'");
}

double smooth_exact(const SmoothSpec &, int dim, const Point &x)
{
  double u = 1.0;
  for (int k = 0; k < dim; ++k)
    u *= std::sin(pi * x[k]);
  return u;
}

Point smooth_exact_gradient(const SmoothSpec &, int dim, const Point &x)
{
  Point g{0.0, 0.0, 0.0};
  for (int k = 0; k < dim; ++k)
  {
    double v = pi * std::cos(pi * x[k]);
    for (int l = 0; l < dim; ++l)
      if (l != k)
        v *= std::sin(pi * x[l]);
    g[k] = v;
  }
  return g;
}

double smooth_load(const SmoothSpec &spec, int dim, const Point &x)
{
  return dim * pi * pi * smooth_exact(spec, dim, x);
}

void validate(const ExperimentConfig &c)
{
  if (c.degree < 1 || c.degree > 3)
    throw ConfigError("/degree", "must be 1, 2 or 3");
  if (c.reference_degree && (*c.reference_degree < 1 || *c.reference_degree > 3))
    throw ConfigError("/reference_degree", "must be 1, 2 or 3");
  if (c.level_min < 0 || c.level_max < c.level_min)
    throw ConfigError("/levels", "need 0 <= first <= last");
  if (c.reference == ErrorReference::discrete && c.reference_level < c.level_max + 1)
    throw ConfigError("/reference_level", "must be at least the last study level + 1");
  if (c.domain.param < (c.domain.kind == DomainSpec::Kind::hexagon ? 0 : 1))
    throw ConfigError("/domain", "invalid size parameter");
  if (c.measure.has_value() == c.smooth.has_value())
    throw ConfigError("/measure", "exactly one of 'measure' and 'smooth_rhs' must be given");
  if (c.reference == ErrorReference::exact && !c.smooth)
    throw ConfigError("/reference", "'exact' needs a smooth_rhs with known solution");
  if (c.smooth && c.domain.kind != DomainSpec::Kind::unit_square && c.domain.kind != DomainSpec::Kind::cube)
    throw ConfigError("/smooth_rhs", "the sine solution vanishes on the boundary of unit_square/cube only");
  if (c.regions.empty())
    throw ConfigError("/regions", "at least one region is required");
  if (c.norms.empty())
    throw ConfigError("/norms", "at least one norm is required");
  if (!(c.solver_tol > 0.0 && c.solver_tol < 1.0))
    throw ConfigError("/solver_tol", "must lie in (0, 1)");
  if (c.threads < 1)
    throw ConfigError("/threads", "must be >= 1");
  if (c.measure)
    for (std::size_t i = 0; i < c.measure->curves.size(); ++i)
    {
      const CurveSpec &cs = c.measure->curves[i];
      const std::string f = "/measure/curves/" + std::to_string(i);
      if (!cs.preset.empty() && !is_curve_preset(cs.preset))
        throw ConfigError(f + "/curve", "unknown curve preset '" + cs.preset + "'");
      if (cs.preset.empty() && cs.samples.size() < 2)
        throw ConfigError(f + "/samples", "explicit curves need at least two samples");
      if (!cs.preset.empty() && (cs.segments < 1 || !(cs.t1 > cs.t0)))
        throw ConfigError(f, "need segments >= 1 and t1 > t0");
    }
}

ExperimentConfig preset(const std::string &name)
{
  ExperimentConfig c;
  c.name = name;
  if (name == "example1")
  {
    const Point src{-0.5, 0.5, 0.0};
    c.domain = {DomainSpec::Kind::lshape, 4};
    c.measure = MeasureSpec{{{src, 1.0}}, {}};
    c.regions = {named("Omega", RegionPredicate::whole()),
                 named("Omega\\B1", RegionPredicate::outside_ball(src, 1.0 / 6.0)),
                 named("Omega\\B2", RegionPredicate::outside_ball(src, 1.0 / 10.0)),
                 named("B3", RegionPredicate::ball_at({0.0, 0.0, 0.0}, 1.0 / 6.0))};
    c.level_min = 0;
    c.level_max = 4;
    c.reference_level = 6;
  }
  else if (name == "example2")
  {
    const Point origin{0.0, 0.0, 0.0};
    c.domain = {DomainSpec::Kind::hexagon, 2};
    c.measure = MeasureSpec{{{origin, 1.0}}, {}};
    c.regions = {named("Omega", RegionPredicate::whole()),
                 named("Omega\\B1", RegionPredicate::outside_ball(origin, 1.0 / 6.0)),
                 named("Omega\\B2", RegionPredicate::outside_ball(origin, 1.0 / 10.0)),
                 named("B3", RegionPredicate::ball_at(hexagon_vertices()[5], 1.0 / 6.0))};
    c.level_min = 0;
    c.level_max = 4;
    c.reference_level = 6;
  }
  else if (name == "example3")
  {
    const Point center{0.5, 0.5, 0.5};
    c.domain = {DomainSpec::Kind::cube, 2};
    MeasureSpec mu;
    const std::array<std::pair<const char *, double>, 3> curves{{{"cube_s1", 1.6}, {"cube_s2", 0.8}, {"cube_s3", 1.2}}};
    for (auto [curve, w] : curves)
    {
      CurveSpec cs;
      cs.preset = curve;
      cs.weight = w;
      mu.curves.push_back(cs);
    }
    c.measure = mu;
    c.regions = {named("Omega", RegionPredicate::whole()),
                 named("Omega\\B1", RegionPredicate::outside_ball(center, 0.3)),
                 named("Omega\\B2", RegionPredicate::outside_ball(center, 0.4))};
    c.level_min = 0;
    c.level_max = 3;
    c.reference_level = 5;
    c.solver_tol = 1e-10;
  }
  else if (name == "calibration")
  {
    c.domain = {DomainSpec::Kind::unit_square, 2};
    c.smooth = SmoothSpec{};
    c.reference = ErrorReference::exact;
    c.regions = {named("Omega", RegionPredicate::whole())};
    c.level_min = 1;
    c.level_max = 5;
    c.reference_level = 7;
    c.solver_tol = 1e-10;
  }
  else
  {
    throw ConfigError("preset", "unknown preset '" + name + "' (expected example1, example2, example3, calibration)");
  }
  return c;
}

std::vector<std::string> preset_names() { return {"example1", "example2", "example3", "calibration"}; }

void set_degree(ExperimentConfig &config, int degree)
{
  config.degree = degree;
  // The P2/P3 reference on the cube is capped one level lower.
  if (config.name == "example3")
    config.reference_level = degree == 1 ? 5 : 4;
}

SimplicialMesh build_initial_mesh(const DomainSpec &d)
{
  switch (d.kind)
  {
  case DomainSpec::Kind::lshape:
    return generate_lshape(d.param);
  case DomainSpec::Kind::hexagon:
    return generate_hexagon(d.param);
  case DomainSpec::Kind::cube:
    return generate_cube(d.param);
  case DomainSpec::Kind::unit_square:
    return generate_unit_square(d.param);
  }
  throw ConfigError("/domain", "unknown domain");
}

MeasureData build_measure(const MeasureSpec &spec)
{
  MeasureData mu;
  mu.points = spec.points;
  for (const CurveSpec &cs : spec.curves)
  {
    CurveAtom atom;
    atom.weight = cs.weight;
    if (cs.preset.empty())
    {
      atom.name = "explicit";
      atom.polyline = cs.samples;
    }
    else
    {
      atom.name = cs.preset;
      const Parametrization s = curve_preset(cs.preset);
      atom.polyline = cs.adaptive ? sample_curve_adaptive(s, cs.t0, cs.t1, cs.segments)
                                  : sample_curve(s, cs.t0, cs.t1, cs.segments);
    }
    mu.curves.push_back(std::move(atom));
  }
  return mu;
}

json to_json(const ExperimentConfig &c)
{
  const int dim = c.domain.dim();
  json j;
  j["name"] = c.name;
  json domain{{"type", to_string(c.domain.kind)}};
  domain[c.domain.kind == DomainSpec::Kind::hexagon ? "pre_refinements" : "n"] = c.domain.param;
  j["domain"] = domain;
  j["degree"] = c.degree;
  j["scheme"] = scheme_choice_string(c.scheme);
  j["levels"] = {c.level_min, c.level_max};
  j["reference_level"] = c.reference_level;
  j["reference_degree"] = c.reference_degree ? json(*c.reference_degree) : json(nullptr);
  j["reference"] = c.reference == ErrorReference::exact ? "exact" : "discrete";
  if (c.measure)
  {
    json points = json::array();
    for (const PointAtom &a : c.measure->points)
      points.push_back({{"x", point_to_json(a.x, dim)}, {"w", a.weight}});
    json curves = json::array();
    for (const CurveSpec &cs : c.measure->curves)
    {
      json cj{{"w", cs.weight}};
      if (!cs.preset.empty())
      {
        cj["curve"] = cs.preset;
        cj["t"] = {cs.t0, cs.t1};
        cj["segments"] = cs.segments;
        cj["adaptive"] = cs.adaptive;
      }
      else
      {
        json samples = json::array();
        for (const CurveSample &s : cs.samples)
        {
          json row = {s.t};
          for (int k = 0; k < dim; ++k)
            row.push_back(s.x[k]);
          samples.push_back(row);
        }
        cj["curve"] = samples;
      }
      curves.push_back(cj);
    }
    j["measure"] = {{"points", points}, {"curves", curves}};
  }
  if (c.smooth)
    j["smooth_rhs"] = {{"type", c.smooth->kind}};
  json regions = json::array();
  for (const NamedRegion &r : c.regions)
  {
    json rj{{"name", r.name}, {"kind", to_string(r.region.kind)}};
    if (r.region.kind != RegionPredicate::Kind::whole_domain)
    {
      rj["center"] = point_to_json(r.region.center, dim);
      rj["radius"] = r.region.radius;
    }
    regions.push_back(rj);
  }
  j["regions"] = regions;
  json norms = json::array();
  for (Norm n : c.norms)
    norms.push_back(to_string(n));
  j["norms"] = norms;
  j["solver_tol"] = c.solver_tol;
  j["output"] = {{"dir", c.output_dir}};
  j["threads"] = c.threads;
  return j;
}

ExperimentConfig config_from_json(const json &j)
{
  if (!j.is_object())
    throw ConfigError("", "top level must be a JSON object");
  ExperimentConfig c;
  c.name = get_or<std::string>(j, "name", "", "");

  if (!j.contains("domain") || !j["domain"].is_object())
    throw ConfigError("/domain", "missing or not an object");
  const json &d = j["domain"];
  c.domain.kind = domain_kind_from_string(get_field<std::string>(d, "type", "/domain"), "/domain/type");
  c.domain.param = c.domain.kind == DomainSpec::Kind::hexagon ? get_or<int>(d, "pre_refinements", "/domain", 1)
                                                              : get_field<int>(d, "n", "/domain");
  const int dim = c.domain.dim();

  c.degree = get_field<int>(j, "degree", "");
  const std::string scheme = get_or<std::string>(j, "scheme", "", "standard");
  if (scheme == "standard")
    c.scheme = SchemeChoice::standard;
  else if (scheme == "berggren")
    c.scheme = SchemeChoice::berggren;
  else if (scheme == "both")
    c.scheme = SchemeChoice::both;
  else
    throw ConfigError("/scheme", "expected standard, berggren or both");

  if (!j.contains("levels") || !j["levels"].is_array() || j["levels"].size() != 2 || !j["levels"][0].is_number_integer() ||
      !j["levels"][1].is_number_integer())
    throw ConfigError("/levels", "expected [first, last]");
  c.level_min = j["levels"][0].get<int>();
  c.level_max = j["levels"][1].get<int>();
  c.reference_level = get_or<int>(j, "reference_level", "", c.level_max + 2);
  if (j.contains("reference_degree") && !j["reference_degree"].is_null())
    c.reference_degree = get_field<int>(j, "reference_degree", "");
  const std::string reference = get_or<std::string>(j, "reference", "", "discrete");
  if (reference == "exact")
    c.reference = ErrorReference::exact;
  else if (reference == "discrete")
    c.reference = ErrorReference::discrete;
  else
    throw ConfigError("/reference", "expected discrete or exact");

  if (j.contains("measure"))
  {
    const json &m = j["measure"];
    if (!m.is_object())
      throw ConfigError("/measure", "expected an object");
    MeasureSpec spec;
    if (m.contains("points"))
    {
      if (!m["points"].is_array())
        throw ConfigError("/measure/points", "expected an array");
      for (std::size_t i = 0; i < m["points"].size(); ++i)
      {
        const std::string f = "/measure/points/" + std::to_string(i);
        const json &pj = m["points"][i];
        if (!pj.is_object() || !pj.contains("x"))
          throw ConfigError(f, "expected {x: [...], w: ...}");
        spec.points.push_back({point_from_json(pj["x"], f + "/x"), get_or<double>(pj, "w", f, 1.0)});
      }
    }
    if (m.contains("curves"))
    {
      if (!m["curves"].is_array())
        throw ConfigError("/measure/curves", "expected an array");
      for (std::size_t i = 0; i < m["curves"].size(); ++i)
      {
        const std::string f = "/measure/curves/" + std::to_string(i);
        const json &cj = m["curves"][i];
        if (!cj.is_object() || !cj.contains("curve"))
          throw ConfigError(f, "expected {curve: name | samples, w: ...}");
        CurveSpec cs;
        cs.weight = get_or<double>(cj, "w", f, 1.0);
        if (cj["curve"].is_string())
        {
          cs.preset = cj["curve"].get<std::string>();
          if (cj.contains("t"))
          {
            if (!cj["t"].is_array() || cj["t"].size() != 2)
              throw ConfigError(f + "/t", "expected [t0, t1]");
            cs.t0 = cj["t"][0].get<double>();
            cs.t1 = cj["t"][1].get<double>();
          }
          cs.segments = get_or<int>(cj, "segments", f, 512);
          cs.adaptive = get_or<bool>(cj, "adaptive", f, true);
        }
        else if (cj["curve"].is_array())
        {
          for (std::size_t s = 0; s < cj["curve"].size(); ++s)
          {
            const json &row = cj["curve"][s];
            const std::string rf = f + "/curve/" + std::to_string(s);
            if (!row.is_array() || static_cast<int>(row.size()) != dim + 1)
              throw ConfigError(rf, "expected [t, x, y" + std::string(dim == 3 ? ", z]" : "]"));
            CurveSample sample;
            sample.t = row[0].get<double>();
            for (int k = 0; k < dim; ++k)
              sample.x[k] = row[k + 1].get<double>();
            cs.samples.push_back(sample);
          }
        }
        else
          throw ConfigError(f + "/curve", "expected a preset name or a sample list");
        spec.curves.push_back(cs);
      }
    }
    c.measure = spec;
  }
  if (j.contains("smooth_rhs"))
  {
    const json &s = j["smooth_rhs"];
    SmoothSpec spec;
    spec.kind = get_or<std::string>(s, "type", "/smooth_rhs", "sine");
    if (spec.kind != "sine")
      throw ConfigError("/smooth_rhs/type", "only 'sine' is available");
    c.smooth = spec;
  }

  if (!j.contains("regions") || !j["regions"].is_array())
    throw ConfigError("/regions", "missing or not an array");
  for (std::size_t i = 0; i < j["regions"].size(); ++i)
  {
    const std::string f = "/regions/" + std::to_string(i);
    const json &rj = j["regions"][i];
    NamedRegion r;
    r.name = get_field<std::string>(rj, "name", f);
    try
    {
      r.region.kind = region_kind_from_string(get_field<std::string>(rj, "kind", f));
    }
    catch (const std::invalid_argument &e)
    {
      throw ConfigError(f + "/kind", e.what());
    }
    if (r.region.kind != RegionPredicate::Kind::whole_domain)
    {
      if (!rj.contains("center"))
        throw ConfigError(f + "/center", "missing required field");
      r.region.center = point_from_json(rj["center"], f + "/center");
      r.region.radius = get_field<double>(rj, "radius", f);
      if (r.region.radius < 0.0)
        throw ConfigError(f + "/radius", "must be nonnegative");
    }
    c.regions.push_back(r);
  }

  if (j.contains("norms"))
  {
    if (!j["norms"].is_array())
      throw ConfigError("/norms", "expected an array");
    c.norms.clear();
    for (std::size_t i = 0; i < j["norms"].size(); ++i)
    {
      try
      {
        c.norms.push_back(norm_from_string(j["norms"][i].get<std::string>()));
      }
      catch (const std::exception &e)
      {
        throw ConfigError("/norms/" + std::to_string(i), e.what());
      }
    }
  }
  c.solver_tol = get_or<double>(j, "solver_tol", "", 1e-12);
  if (j.contains("output"))
    c.output_dir = get_or<std::string>(j["output"], "dir", "/output", ".");
  c.threads = get_or<int>(j, "threads", "", 1);

  validate(c);
  return c;
}

ExperimentConfig load_config(const std::string &path)
{
  std::ifstream in(path);
  if (!in)
    throw ConfigError("", "cannot open config file '" + path + "'");
  json j;
  try
  {
    j = json::parse(in);
  }
  catch (const json::parse_error &e)
  {
    throw ConfigError("", std::string("JSON parse error: ") + e.what());
  }
  return config_from_json(j);
}

int thread_count_from_env(int fallback)
{
  const char *env = std::getenv("MEASFEM_THREADS");
  if (!env)
    return fallback;
  char *end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (end == env || *end != '\0' || n < 1 || n > 1024)
    return fallback;
  return static_cast<int>(n);
}

} // namespace measfem
