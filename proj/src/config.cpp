#include <hfvdd/config.hpp>

#include <hfvdd/mesh_io.hpp>

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace hfvdd {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

Real to_real(const std::string& text, const std::string& where) {
  std::size_t used = 0;
  Real v = 0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw InvalidInput(where + ": not a number: '" + text + "'");
  }
  if (used != text.size())
    throw InvalidInput(where + ": trailing characters in '" + text + "'");
  return v;
}

int to_int(const std::string& text, const std::string& where) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(text, &used);
  } catch (const std::exception&) {
    throw InvalidInput(where + ": not an integer: '" + text + "'");
  }
  if (used != text.size())
    throw InvalidInput(where + ": trailing characters in '" + text + "'");
  return v;
}

std::vector<Real> to_real_list(const std::string& text,
                               const std::string& where) {
  std::vector<Real> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty())
      throw InvalidInput(where + ": empty entry in list '" + text + "'");
    out.push_back(to_real(item, where));
  }
  return out;
}

}  // namespace

RunConfig parse_config(std::istream& in, const std::string& origin) {
  RunConfig cfg;
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = origin + ":" + std::to_string(lineno);
    if (line.front() == '[') {
      if (line.back() != ']')
        throw InvalidInput(where + ": malformed section header '" + line + "'");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "mesh" && section != "physics" && section != "boundary" &&
          section != "initial" && section != "stepper" && section != "output")
        throw InvalidInput(where + ": unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw InvalidInput(where + ": expected key = value, got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw InvalidInput(where + ": empty key or value");
    if (section.empty())
      throw InvalidInput(where + ": key '" + key + "' outside any section");

    const std::string slot = section + "." + key;
    if (slot == "mesh.source") cfg.mesh_source = value;
    else if (slot == "mesh.layout") cfg.layout = value;
    else if (slot == "mesh.contact_fraction")
      cfg.contact_fraction = to_real(value, where);
    else if (slot == "physics.statistics") cfg.statistics = value;
    else if (slot == "physics.mean") cfg.mean = value;
    else if (slot == "physics.lambda") cfg.lambda = to_real(value, where);
    else if (slot == "physics.b") cfg.b = to_real(value, where);
    else if (slot == "physics.doping") cfg.doping = value;
    else if (slot == "physics.n_region_x_max")
      cfg.n_region_x_max = to_real(value, where);
    else if (slot == "physics.n_region_y_min")
      cfg.n_region_y_min = to_real(value, where);
    else if (slot == "physics.recombination") cfg.recombination = value;
    else if (slot == "physics.eta") cfg.eta = to_real(value, where);
    else if (slot == "boundary.N0") cfg.N0 = to_real(value, where);
    else if (slot == "boundary.N1") cfg.N1 = to_real(value, where);
    else if (slot == "boundary.alpha0") cfg.alpha0 = to_real(value, where);
    else if (slot == "initial.profile") cfg.initial = value;
    else if (slot == "stepper.dt") cfg.dt = to_real(value, where);
    else if (slot == "stepper.t_end") cfg.t_end = to_real(value, where);
    else if (slot == "stepper.eps") cfg.eps = to_real(value, where);
    else if (slot == "stepper.max_newton") cfg.max_newton = to_int(value, where);
    else if (slot == "stepper.tol") cfg.tol = to_real(value, where);
    else if (slot == "stepper.growth") cfg.growth = to_real(value, where);
    else if (slot == "stepper.shrink") cfg.shrink = to_real(value, where);
    else if (slot == "stepper.min_dt") cfg.min_dt = to_real(value, where);
    else if (slot == "output.dir") cfg.out_dir = value;
    else if (slot == "output.snapshots")
      cfg.snapshots = to_real_list(value, where);
    else if (slot == "output.format") cfg.format = value;
    else
      throw InvalidInput(where + ": unknown key '" + key + "' in section [" +
                         section + "]");
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  return parse_config(in, path);
}

ProblemSetup make_problem(const RunConfig& config) {
  auto mesh = std::make_shared<Mesh>(load_mesh_source(config.mesh_source));
  if (config.layout == "pn_diode") {
    if (!(config.contact_fraction > 0.0 && config.contact_fraction <= 1.0))
      throw InvalidInput("config: contact_fraction must be in (0, 1]");
    apply_boundary_layout(*mesh, BoundaryLayout::PnDiode,
                          config.contact_fraction);
  } else if (config.layout == "all_dirichlet") {
    apply_boundary_layout(*mesh, BoundaryLayout::AllDirichlet);
  } else if (config.layout != "from_file") {
    throw InvalidInput("config: unknown layout '" + config.layout +
                       "' (expected pn_diode | all_dirichlet | from_file)");
  }

  SetupSpec spec;
  spec.mesh = mesh;
  spec.model = stats::parse_model(config.statistics);
  spec.mean = stats::parse_mean(config.mean);
  spec.eta = config.eta;
  spec.lam_N = electron_tensor(config.b);
  spec.lam_P = hole_tensor(config.b);
  spec.lam_phi = potential_tensor(config.lambda);
  spec.rec = parse_recombination(config.recombination);

  const Real ub = spec.model.upper_bound();
  const auto check_density = [&](Real v, const char* what) {
    if (!(v > 0.0) || !(v < ub))
      throw InvalidInput(std::string("config: ") + what +
                         " must lie strictly inside the admissible density "
                         "range of the statistics");
    return v;
  };
  check_density(config.N0, "N0");
  check_density(config.N1, "N1");

  if (config.doping == "pn_diode") {
    const Real xm = config.n_region_x_max;
    const Real ym = config.n_region_y_min;
    spec.doping = [xm, ym](const Vec2& x) {
      return (x.x() <= xm && x.y() >= ym) ? 1.0 : -1.0;
    };
  } else if (config.doping.rfind("constant:", 0) == 0) {
    const Real v = to_real(config.doping.substr(9), "doping");
    spec.doping = [v](const Vec2&) { return v; };
  } else {
    throw InvalidInput("config: unknown doping '" + config.doping +
                       "' (expected pn_diode | constant:<value>)");
  }

  spec.alpha_N = 0.5 * config.alpha0;
  spec.alpha_P = 0.5 * config.alpha0;

  // Boundary density: interpolate the h potential linearly between the
  // contact values along y, which keeps the datum inside the admissible
  // range for every statistics model.
  const stats::Model model = spec.model;
  const Real h0 = stats::h(model, config.N0);
  const Real h1 = stats::h(model, config.N1);
  const Real y0 = mesh->bbox.y0, y1 = mesh->bbox.y1;
  spec.ND = [model, h0, h1, y0, y1](const Vec2& x) {
    const Real w = (x.y() - y0) / (y1 - y0);
    return stats::g(model, h0 + (h1 - h0) * w);
  };

  if (config.initial == "equilibrium") {
    spec.initial.from_equilibrium = true;
  } else if (config.initial == "diode_sqrt") {
    const Real n0 = config.N0, n1 = config.N1;
    const Real p0 = stats::g(model, config.alpha0 - h0);
    const Real p1 = stats::g(model, config.alpha0 - h1);
    spec.initial.N0 = [n0, n1, y0, y1](const Vec2& x) {
      const Real w = (x.y() - y0) / (y1 - y0);
      return n1 + (n0 - n1) * (1.0 - std::sqrt(w));
    };
    spec.initial.P0 = [p0, p1, y0, y1](const Vec2& x) {
      const Real w = (x.y() - y0) / (y1 - y0);
      return p1 + (p0 - p1) * (1.0 - std::sqrt(w));
    };
  } else if (config.initial.rfind("constant:", 0) == 0) {
    const auto vals = to_real_list(config.initial.substr(9), "initial");
    if (vals.size() != 2)
      throw InvalidInput("config: initial constant profile needs two values "
                         "'constant:<n>,<p>'");
    const Real n = check_density(vals[0], "initial N");
    const Real p = check_density(vals[1], "initial P");
    spec.initial.N0 = [n](const Vec2&) { return n; };
    spec.initial.P0 = [p](const Vec2&) { return p; };
  } else {
    throw InvalidInput("config: unknown initial profile '" + config.initial +
                       "' (expected diode_sqrt | equilibrium | "
                       "constant:<n>,<p>)");
  }

  if (config.format != "vtk" && config.format != "csv")
    throw InvalidInput("config: unknown output format '" + config.format +
                       "' (expected vtk | csv)");

  return build_setup(spec);
}

StepperConfig make_stepper(const RunConfig& config) {
  StepperConfig st;
  st.dt = config.dt;
  st.t_end = config.t_end;
  st.eps = config.eps;
  st.max_newton = config.max_newton;
  st.tol = config.tol;
  st.growth = config.growth;
  st.shrink = config.shrink;
  st.min_dt = config.min_dt;
  if (!(st.dt > 0.0) || !(st.t_end > 0.0))
    throw InvalidInput("config: dt and t_end must be positive");
  if (!(st.eps > 0.0) || !(st.tol > 0.0) || !(st.min_dt > 0.0))
    throw InvalidInput("config: eps, tol, min_dt must be positive");
  if (!(st.growth >= 1.0))
    throw InvalidInput("config: growth must be at least 1");
  if (!(st.shrink > 1.0)) throw InvalidInput("config: shrink must exceed 1");
  if (st.max_newton < 1)
    throw InvalidInput("config: max_newton must be at least 1");
  return st;
}

}  // namespace hfvdd
