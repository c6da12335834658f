#include "pxlap/cli.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>

#include "pxlap/closed_form.hpp"
#include "pxlap/error.hpp"
#include "pxlap/exponent_field.hpp"
#include "pxlap/harness.hpp"
#include "pxlap/inf_convolution.hpp"
#include "pxlap/restoration.hpp"
#include "pxlap/solver.hpp"
#include "pxlap/source.hpp"
#include "pxlap/variable_lebesgue.hpp"

namespace pxlap::cli {

namespace fs = std::filesystem;

namespace {

const std::vector<std::pair<Command, std::string>> kCommands = {
    {Command::Norm, "norm"},
    {Command::Infconv, "infconv"},
    {Command::Solve, "solve"},
    {Command::CheckWeak, "check-weak"},
    {Command::CheckViscosity, "check-viscosity"},
    {Command::Pipeline, "pipeline"},
    {Command::Compare, "compare"},
    {Command::Denoise, "denoise"},
};

const std::vector<std::string> kPresetSections = {"exponent", "source", "boundary",
                                                  "u",        "v",      "exact"};

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::string fmt(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

double to_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const auto r = std::from_chars(text.data(), text.data() + text.size(), v);
  if (r.ec != std::errc() || r.ptr != text.data() + text.size() || text.empty()) {
    throw ConfigError(key + ": expected a number, got '" + text + "'");
  }
  return v;
}

int to_int(const std::string& key, const std::string& text) {
  long long v = 0;
  const auto r = std::from_chars(text.data(), text.data() + text.size(), v);
  if (r.ec != std::errc() || r.ptr != text.data() + text.size() || text.empty() ||
      v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    throw ConfigError(key + ": expected an integer, got '" + text + "'");
  }
  return static_cast<int>(v);
}

bool to_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "yes" || text == "1") return true;
  if (text == "false" || text == "no" || text == "0") return false;
  throw ConfigError(key + ": expected true or false, got '" + text + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(key, trim(item)));
  if (out.empty()) throw ConfigError(key + ": expected a comma-separated list");
  return out;
}

std::string list_text(const std::vector<double>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + fmt(v[k]);
  return s;
}

std::string opt_text(const std::optional<double>& v) { return v ? fmt(*v) : "auto"; }

struct KeySpec {
  std::string key;  // section.key
  std::string help;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

#define PX_DOUBLE(name, field, help)                                                     \
  KeySpec {                                                                              \
    name, help, [](ExperimentConfig& c, const std::string& t) { c.field = to_double(name, t); }, \
        [](const ExperimentConfig& c) { return fmt(c.field); }                          \
  }
#define PX_INT(name, field, help)                                                     \
  KeySpec {                                                                           \
    name, help, [](ExperimentConfig& c, const std::string& t) { c.field = to_int(name, t); }, \
        [](const ExperimentConfig& c) { return std::to_string(c.field); }            \
  }
#define PX_OPT(name, field, help)                                                        \
  KeySpec {                                                                              \
    name, help, [](ExperimentConfig& c, const std::string& t) { c.field = to_double(name, t); }, \
        [](const ExperimentConfig& c) { return opt_text(c.field); }                     \
  }
#define PX_LIST(name, field, help)                                                     \
  KeySpec {                                                                            \
    name, help, [](ExperimentConfig& c, const std::string& t) { c.field = to_list(name, t); }, \
        [](const ExperimentConfig& c) { return list_text(c.field); }                  \
  }
#define PX_STRING(name, field, help)                                              \
  KeySpec {                                                                       \
    name, help, [](ExperimentConfig& c, const std::string& t) { c.field = t; },   \
        [](const ExperimentConfig& c) { return c.field; }                         \
  }

const std::vector<KeySpec>& key_specs() {
  static const std::vector<KeySpec> specs = {
      KeySpec{"command", "experiment to run (may also be given on the command line)",
              [](ExperimentConfig& c, const std::string& t) { c.command = parse_command(t); },
              [](const ExperimentConfig& c) { return command_name(c.command); }},
      KeySpec{"seed", "seed for sampled checks",
              [](ExperimentConfig& c, const std::string& t) {
                const int v = to_int("seed", t);
                if (v < 0) throw ConfigError("seed: seed must be >= 0");
                c.seed = static_cast<std::uint64_t>(v);
              },
              [](const ExperimentConfig& c) { return std::to_string(c.seed); }},
      PX_INT("grid.dim", grid.dim, "1 or 2"),
      PX_INT("grid.n", grid.n, "nodes per axis"),
      PX_DOUBLE("grid.lo", grid.lo, "lower x bound (and y bound unless y_lo is set)"),
      PX_DOUBLE("grid.hi", grid.hi, "upper x bound (and y bound unless y_hi is set)"),
      PX_OPT("grid.y_lo", grid.y_lo, "lower y bound"),
      PX_OPT("grid.y_hi", grid.y_hi, "upper y bound"),
      PX_DOUBLE("solver.tol", tol, "max nodal Euler-Lagrange residual"),
      PX_INT("solver.max_iterations", max_iterations, "descent iteration limit"),
      PX_DOUBLE("solver.delta", delta, "regularization (delta^2 + |Du|^2)^{p/2}"),
      PX_INT("solver.max_outer", max_outer, "fixed-point iteration limit"),
      PX_DOUBLE("solver.omega", omega, "fixed-point relaxation weight"),
      PX_DOUBLE("solver.outer_tol", outer_tol, "fixed-point tolerance on max |u_{k+1} - u_k|"),
      PX_INT("growth.samples", growth_samples, "random samples for the growth check"),
      PX_DOUBLE("growth.t_bound", t_bound, "|t| range of the growth check"),
      PX_DOUBLE("growth.eta_radius", eta_radius, "|eta| range of the growth check"),
      PX_DOUBLE("norm.tol", norm_tol, "bisection tolerance on |rho - 1|"),
      PX_LIST("infconv.epsilons", infconv_epsilons, "strictly decreasing epsilons"),
      PX_OPT("infconv.q", q, "convolution power (auto: max(2, p-/(p- - 1)))"),
      PX_OPT("infconv.tol", infconv_tol, "difference-check tolerance (auto: 10 h)"),
      PX_OPT("check.tol", check_tol, "tolerance (auto: 10 h^2 weak, 10 h viscosity)"),
      PX_STRING("check.kind", kind, "super, sub or both"),
      PX_INT("check.lattice", lattice, "bump centres per axis"),
      PX_LIST("pipeline.epsilons", pipeline_epsilons, "strictly decreasing epsilons"),
      PX_OPT("pipeline.tol", pipeline_tol, "margin tolerance (auto: 10 h)"),
      PX_INT("compare.boxes", boxes, "number of shrinking centred boxes"),
      PX_OPT("compare.tol", compare_tol, "ordering tolerance (auto: 10 h^2)"),
      PX_STRING("denoise.input", input, "PGM image (relative to the config file)"),
      PX_DOUBLE("denoise.beta", beta, "density seam"),
      PX_DOUBLE("denoise.sigma", sigma, "blur width for the exponent map"),
      PX_DOUBLE("denoise.k", k, "contrast parameter of the exponent map"),
      PX_DOUBLE("denoise.dt", dt, "time step"),
      PX_INT("denoise.steps", steps, "number of steps"),
      KeySpec{"denoise.dirichlet", "keep boundary pixels fixed (default Neumann)",
              [](ExperimentConfig& c, const std::string& t) {
                c.dirichlet = to_bool("denoise.dirichlet", t);
              },
              [](const ExperimentConfig& c) { return std::string(c.dirichlet ? "true" : "false"); }},
      PX_STRING("denoise.scheme", scheme, "semi-implicit or explicit"),
  };
  return specs;
}

#undef PX_DOUBLE
#undef PX_INT
#undef PX_OPT
#undef PX_LIST
#undef PX_STRING

PresetSpec* preset_section(ExperimentConfig& c, const std::string& section) {
  if (section == "exponent") return &c.exponent;
  if (section == "source") return &c.source;
  if (section == "boundary") return &c.boundary;
  if (section == "u") return &c.u;
  if (section == "v") return &c.v;
  if (section == "exact") {
    if (!c.exact) c.exact = PresetSpec{"", {}};
    return &*c.exact;
  }
  return nullptr;
}

void assign(ExperimentConfig& c, const std::string& key, const std::string& value) {
  const auto dot = key.find('.');
  if (dot != std::string::npos) {
    const std::string section = key.substr(0, dot);
    const std::string name = key.substr(dot + 1);
    if (PresetSpec* ps = preset_section(c, section)) {
      if (name == "preset") {
        // A new preset starts from its own defaults.
        ps->preset = value;
        ps->params = Params{};
      } else {
        ps->params.set(name, to_double(key, value));
      }
      c.given[key] = value;
      return;
    }
  }
  for (const auto& spec : key_specs()) {
    if (spec.key == key) {
      spec.set(c, value);
      c.given[key] = value;
      return;
    }
  }
  throw ConfigError("unknown key '" + key + "'");
}

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) {
    const auto dot = key.find('.');
    throw ConfigError(key + ": " + (dot == std::string::npos ? key : key.substr(dot + 1)) + " " +
                      what);
  }
}

void require_epsilons(const std::vector<double>& eps, const std::string& key) {
  require(!eps.empty(), key, "must not be empty");
  for (std::size_t k = 0; k < eps.size(); ++k) {
    require(eps[k] > 0.0, key, "must be > 0");
    if (k > 0) require(eps[k] < eps[k - 1], key, "must be strictly decreasing");
  }
}

Grid make_grid(const GridSpec& g) {
  if (g.dim == 1) return Grid::line_nodes(g.lo, g.hi, g.n);
  const double y_lo = g.y_lo.value_or(g.lo), y_hi = g.y_hi.value_or(g.hi);
  if (y_lo == g.lo && y_hi == g.hi) return Grid::square_nodes(g.lo, g.hi, g.n);
  return Grid::rect(g.lo, g.hi, y_lo, y_hi, (g.hi - g.lo) / (g.n - 1));
}

// Splits an additive `shift` parameter off a preset.
std::pair<Params, double> split_shift(const PresetSpec& spec) {
  Params rest;
  double shift = 0.0;
  for (const auto& [k, v] : spec.params.all()) {
    if (k == "shift" && spec.preset == "solution") {
      shift = v;
    } else {
      rest.set(k, v);
    }
  }
  return {rest, shift};
}

ExponentField make_exponent(const ExperimentConfig& c, const Grid& grid) {
  const ClosedForm cf = make_closed_form(c.exponent.preset, c.exponent.params, grid);
  return ExponentField::build(cf.value, grid);
}

struct Setup {
  Grid grid;
  ExponentField p;
  SourceSpec f;
  ClosedForm g;
};

Setup make_setup(const ExperimentConfig& c) {
  Setup s;
  s.grid = make_grid(c.grid);
  s.p = make_exponent(c, s.grid);
  s.f = make_source(c.source.preset, c.source.params);
  s.g = make_closed_form(c.boundary.preset, c.boundary.params, s.grid);
  return s;
}

SolverOptions solver_options(const ExperimentConfig& c) {
  SolverOptions o;
  o.tol = c.tol;
  o.max_iterations = c.max_iterations;
  o.delta = c.delta;
  return o;
}

SolveOutcome solve_problem(const ExperimentConfig& c, const Setup& s) {
  if (s.f.depends_on_x_only()) {
    return solve_variational(s.p, s.g.value, evaluate_source(s.f, GridFunction(s.grid, 0.0)),
                             solver_options(c));
  }
  return solve_fixed_point(s.p, s.g.value, s.f, c.outer_tol, c.max_outer, c.omega,
                           solver_options(c));
}

GridFunction make_field(const ExperimentConfig& c, const Setup& s, const PresetSpec& spec) {
  const auto [params, shift] = split_shift(spec);
  if (spec.preset == "solution") return solve_problem(c, s).u.shifted(shift);
  return make_closed_form(spec.preset, params, s.grid).sample(s.grid);
}

class Artifacts {
 public:
  explicit Artifacts(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  std::ofstream open(const std::string& name) {
    names_.push_back(name);
    std::ofstream out(dir_ / name, std::ios::binary);
    if (!out) throw IoError("cannot write '" + (dir_ / name).string() + "'");
    return out;
  }

  void report(const CheckReport& r, const std::string& stem = "report") {
    {
      auto out = open(stem + ".txt");
      r.write_text(out);
    }
    auto out = open(stem + ".csv");
    r.write_csv(out);
  }

  const fs::path& dir() const { return dir_; }
  const std::vector<std::string>& names() const { return names_; }

 private:
  fs::path dir_;
  std::vector<std::string> names_;
};

void log_report(std::ostream& log, const CheckReport& r) {
  log << r.name() << ": " << r.passed() << "/" << r.items().size() << " passed";
  if (r.skipped()) log << ", " << r.skipped() << " skipped";
  log << (r.all_pass() ? " PASS" : " FAIL") << '\n';
}

std::vector<std::pair<std::string, std::string>> resolved(const ExperimentConfig& c) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& spec : key_specs()) out.emplace_back(spec.key, spec.get(c));
  auto preset = [&](const std::string& name, const PresetSpec& p) {
    out.emplace_back(name + ".preset", p.preset);
    for (const auto& [k, v] : p.params.all()) out.emplace_back(name + "." + k, fmt(v));
  };
  preset("exponent", c.exponent);
  preset("source", c.source);
  preset("boundary", c.boundary);
  preset("u", c.u);
  preset("v", c.v);
  if (c.exact) preset("exact", *c.exact);
  std::sort(out.begin(), out.end());
  return out;
}

int run_norm(const ExperimentConfig& c, Artifacts& art, std::ostream& log) {
  const Setup s = make_setup(c);
  const GridFunction u = make_field(c, s, c.u);
  const double norm = luxemburg_norm(u, s.p, c.norm_tol);
  const double rho = modular(u, s.p);
  const double sob = sobolev_norm(u, s.p, c.norm_tol);
  {
    auto out = art.open("norm.csv");
    out << "quantity,value\n" << std::setprecision(17) << "luxemburg," << norm << "\nmodular,"
        << rho << "\nsobolev," << sob << "\np_minus," << s.p.p_minus() << "\np_plus,"
        << s.p.p_plus() << '\n';
  }
  log << std::setprecision(12) << "luxemburg=" << norm << " modular=" << rho
      << " sobolev=" << sob << '\n';
  if (u.is_zero()) return 0;
  const CheckReport r = check_modular_norm_relations(u, s.p, c.norm_tol);
  art.report(r);
  log_report(log, r);
  return r.all_pass() ? 0 : 1;
}

int run_infconv(const ExperimentConfig& c, Artifacts& art, std::ostream& log) {
  const Setup s = make_setup(c);
  const GridFunction u = make_field(c, s, c.u);
  const double q = c.q ? *c.q : choose_q(s.p.p_minus());
  for (std::size_t k = 0; k < c.infconv_epsilons.size(); ++k) {
    const ConvolutionResult res = inf_convolve(u, c.infconv_epsilons[k], q);
    auto out = art.open("infconv_" + std::to_string(k) + ".csv");
    res.write_csv(out, u);
  }
  const CheckReport r = convolution_lemma_suite(u, c.infconv_epsilons, q, c.infconv_tol);
  art.report(r);
  log << "q=" << q << '\n';
  log_report(log, r);
  return r.all_pass() ? 0 : 1;
}

int run_solve(const ExperimentConfig& c, Artifacts& art, std::ostream& log) {
  const Setup s = make_setup(c);
  if (!s.f.depends_on_x_only()) {
    const CheckReport growth =
        validate_growth(s.f, s.p, c.growth_samples, c.seed, c.t_bound, c.eta_radius);
    art.report(growth, "growth");
    log_report(log, growth);
    if (!growth.all_pass()) return 1;
  }
  const SolveOutcome out = solve_problem(c, s);
  std::optional<ClosedForm> exact;
  if (c.exact) exact = make_closed_form(c.exact->preset, c.exact->params, s.grid);
  double max_error = 0.0;
  {
    auto csv = art.open("solution.csv");
    const bool two_d = s.grid.dim() == 2;
    csv << (two_d ? "x,y,u" : "x,u") << (exact ? ",exact,error\n" : "\n") << std::setprecision(17);
    for (std::size_t k = 0; k < s.grid.size(); ++k) {
      const Point x = s.grid.node(k);
      csv << x.x() << ',';
      if (two_d) csv << x.y() << ',';
      csv << out.u[k];
      if (exact) {
        const double e = exact->value(x);
        max_error = std::max(max_error, std::abs(out.u[k] - e));
        csv << ',' << e << ',' << out.u[k] - e;
      }
      csv << '\n';
    }
    if (exact) csv << "# max_error," << max_error << '\n';
  }
  {
    auto csv = art.open("energy.csv");
    csv << "iteration,energy,decrement\n" << std::setprecision(17);
    for (std::size_t k = 0; k < out.energy_history.size(); ++k) {
      csv << k << ',' << out.energy_history[k] << ','
          << (k == 0 ? 0.0 : out.energy_decrements[k - 1]) << '\n';
    }
  }
  if (!out.outer_residuals.empty() && !s.f.depends_on_x_only()) {
    auto csv = art.open("outer.csv");
    csv << "outer,max_update\n" << std::setprecision(17);
    for (std::size_t k = 0; k < out.outer_residuals.size(); ++k) {
      csv << k + 1 << ',' << out.outer_residuals[k] << '\n';
    }
  }
  std::ostringstream summary;
  summary << std::setprecision(17) << "iterations=" << out.iterations
          << "\nouter_iterations=" << out.outer_residuals.size()
          << "\nenergy_initial=" << out.energy_history.front()
          << "\nenergy_final=" << out.energy_history.back()
          << "\nfinal_residual=" << out.final_residual << '\n';
  if (exact) summary << "max_error=" << max_error << '\n';
  {
    auto txt = art.open("summary.txt");
    txt << summary.str();
  }
  log << summary.str();
  return 0;
}

CheckReport combined(const std::string& name, double tol, const std::vector<CheckReport>& parts) {
  CheckReport r(name, tol);
  for (const auto& p : parts) {
    r.append(p, p.name() + ":");
    r.count_skipped(p.skipped());
    for (const auto& n : p.notes()) r.add_note(p.name() + ": " + n);
  }
  return r;
}

int run_check(const ExperimentConfig& c, Artifacts& art, std::ostream& log, bool weak) {
  const Setup s = make_setup(c);
  const GridFunction u = make_field(c, s, c.u);
  std::vector<CheckReport> parts;
  const auto battery = bump_battery(s.grid, c.lattice);
  const bool super = c.kind != "sub", sub = c.kind != "super";
  if (weak) {
    if (super) parts.push_back(check_weak_supersolution(u, s.p, s.f, battery, c.check_tol));
    if (sub) parts.push_back(check_weak_subsolution(u, s.p, s.f, battery, c.check_tol));
  } else {
    if (super) parts.push_back(check_viscosity_supersolution(u, s.p, s.f, c.check_tol));
    if (sub) parts.push_back(check_viscosity_subsolution(u, s.p, s.f, c.check_tol));
  }
  const CheckReport r = combined(weak ? "check-weak" : "check-viscosity",
                                 parts.front().tolerance(), parts);
  art.report(r);
  for (const auto& p : parts) log_report(log, p);
  return r.all_pass() ? 0 : 1;
}

int run_pipeline(const ExperimentConfig& c, Artifacts& art, std::ostream& log) {
  const Setup s = make_setup(c);
  const GridFunction u = make_field(c, s, c.u);
  const PipelineResult res = pipeline_viscosity_to_weak(u, s.p, s.f, c.pipeline_epsilons,
                                                        c.pipeline_tol);
  {
    auto csv = art.open("stages.csv");
    csv << "epsilon,r_eps,margin,deficit,worst_weak,sobolev_distance,nodes\n"
        << std::setprecision(17);
    for (const auto& st : res.stages) {
      csv << st.epsilon << ',' << st.r_eps << ',' << st.margin << ',' << st.deficit << ','
          << st.worst_weak << ',' << st.sobolev_distance << ',' << st.nodes << '\n';
    }
  }
  art.report(res.report);
  log << "q=" << res.q << '\n';
  log_report(log, res.report);
  return res.report.all_pass() ? 0 : 1;
}

int run_compare(const ExperimentConfig& c, Artifacts& art, std::ostream& log) {
  const Setup s = make_setup(c);
  const GridFunction u = make_field(c, s, c.u);
  const GridFunction v = make_field(c, s, c.v);
  const auto boxes = shrinking_boxes(s.grid, c.boxes);
  const ComparisonSweep sweep = comparison_sweep(u, v, s.p, s.f, boxes, c.compare_tol);
  {
    auto csv = art.open("boxes.csv");
    csv << "box,measure,preconditions_ok,ordered\n" << std::setprecision(17);
    for (std::size_t b = 0; b < sweep.boxes.size(); ++b) {
      csv << b << ',' << sweep.measures[b] << ',' << sweep.boxes[b].preconditions_ok << ','
          << sweep.boxes[b].ordered << '\n';
    }
  }
  CheckReport r = sweep.summary;
  for (std::size_t b = 0; b < sweep.boxes.size(); ++b) {
    const auto& br = sweep.boxes[b].report;
    for (const auto& n : br.notes()) r.add_note("box" + std::to_string(b) + ": " + n);
  }
  art.report(r);
  for (std::size_t b = 0; b < sweep.boxes.size(); ++b) {
    art.report(sweep.boxes[b].report, "box" + std::to_string(b));
  }
  log << std::setprecision(6) << "empirical_delta=" << sweep.empirical_delta << '\n';
  log_report(log, r);
  return r.all_pass() ? 0 : 1;
}

int run_denoise(const ExperimentConfig& c, Artifacts& art, std::ostream& log) {
  fs::path input = c.input;
  if (input.is_relative()) input = c.base_dir / input;
  const ImageGrid image = read_pgm(input.string());
  const ExponentField p = build_exponent_from_image(image, c.sigma, c.k);
  FlowOptions o;
  o.beta = c.beta;
  o.dt = c.dt;
  o.steps = c.steps;
  o.dirichlet = c.dirichlet;
  o.scheme = c.scheme == "explicit" ? FlowScheme::Explicit : FlowScheme::SemiImplicit;
  const FlowResult flow = evolve_flow(image, image, p, o);
  if (flow.stability_warning) {
    log << "warning: dt=" << c.dt << " exceeds the explicit stability estimate "
        << flow.stable_dt << '\n';
  }
  {
    auto out = art.open("denoised.pgm");
    write_pgm(out, flow.u, true);
  }
  {
    auto out = art.open("energy.csv");
    flow.write_energy_csv(out);
  }
  {
    auto out = art.open("exponent.csv");
    p.write_csv(out);
  }
  CheckReport r("denoise", 0.0);
  for (std::size_t k = 1; k < flow.energy.size(); ++k) {
    r.add_le("energy:step" + std::to_string(k), flow.energy[k], flow.energy[k - 1],
             1e-12 * std::abs(flow.energy[k - 1]));
  }
  std::size_t clamped = 0;
  for (auto n : flow.clamped) clamped += n;
  r.add_note("clamped pixel updates " + std::to_string(clamped));
  art.report(r);
  log << std::setprecision(12) << "energy " << flow.energy.front() << " -> "
      << flow.energy.back() << ", p in [" << p.p_minus() << ", " << p.p_plus() << "]\n";
  log_report(log, r);
  return r.all_pass() ? 0 : 1;
}

}  // namespace

Command parse_command(const std::string& name) {
  for (const auto& [c, n] : kCommands) {
    if (n == name) return c;
  }
  std::string known;
  for (const auto& n : command_names()) known += (known.empty() ? "" : ", ") + n;
  throw ConfigError("unknown command '" + name + "' (expected one of " + known + ")");
}

std::string command_name(Command c) {
  for (const auto& [k, n] : kCommands) {
    if (k == c) return n;
  }
  return "?";
}

std::vector<std::string> command_names() {
  std::vector<std::string> out;
  for (const auto& kv : kCommands) out.push_back(kv.second);
  return out;
}

void validate(const ExperimentConfig& c) {
  require(c.grid.dim == 1 || c.grid.dim == 2, "grid.dim", "must be 1 or 2");
  require(c.grid.n >= 3, "grid.n", "must be >= 3");
  require(c.grid.hi > c.grid.lo, "grid.hi", "must be > grid.lo");
  if (c.grid.dim == 2) {
    require(c.grid.y_hi.value_or(c.grid.hi) > c.grid.y_lo.value_or(c.grid.lo), "grid.y_hi",
            "must be > grid.y_lo");
  }
  require(c.tol > 0.0, "solver.tol", "must be > 0");
  require(c.max_iterations >= 1, "solver.max_iterations", "must be >= 1");
  require(c.delta >= 0.0, "solver.delta", "must be >= 0");
  require(c.max_outer >= 1, "solver.max_outer", "must be >= 1");
  require(c.omega > 0.0 && c.omega <= 1.0, "solver.omega", "must lie in (0, 1]");
  require(c.outer_tol > 0.0, "solver.outer_tol", "must be > 0");
  require(c.growth_samples >= 1, "growth.samples", "must be >= 1");
  require(c.t_bound >= 0.0, "growth.t_bound", "must be >= 0");
  require(c.eta_radius >= 0.0, "growth.eta_radius", "must be >= 0");
  require(c.norm_tol > 0.0, "norm.tol", "must be > 0");
  require_epsilons(c.infconv_epsilons, "infconv.epsilons");
  require(!c.q || *c.q >= 2.0, "infconv.q", "must be >= 2");
  require(!c.infconv_tol || *c.infconv_tol > 0.0, "infconv.tol", "must be > 0");
  require(!c.check_tol || *c.check_tol > 0.0, "check.tol", "must be > 0");
  require(c.kind == "super" || c.kind == "sub" || c.kind == "both", "check.kind",
          "must be super, sub or both");
  require(c.lattice >= 1, "check.lattice", "must be >= 1");
  require_epsilons(c.pipeline_epsilons, "pipeline.epsilons");
  require(!c.pipeline_tol || *c.pipeline_tol > 0.0, "pipeline.tol", "must be > 0");
  require(c.boxes >= 1, "compare.boxes", "must be >= 1");
  require(!c.compare_tol || *c.compare_tol > 0.0, "compare.tol", "must be > 0");
  require(c.beta > 0.0, "denoise.beta", "must be > 0");
  require(c.sigma >= 0.0, "denoise.sigma", "must be >= 0");
  require(c.k > 0.0, "denoise.k", "must be > 0");
  require(c.dt > 0.0, "denoise.dt", "must be > 0");
  require(c.steps >= 1, "denoise.steps", "must be >= 1");
  require(c.scheme == "semi-implicit" || c.scheme == "explicit", "denoise.scheme",
          "must be semi-implicit or explicit");
  if (c.command == Command::Denoise) {
    require(!c.input.empty(), "denoise.input", "is required for denoise");
    return;
  }

  // Presets are validated by building them on the configured grid.
  try {
    const Grid grid = make_grid(c.grid);
    make_exponent(c, grid);
    make_source(c.source.preset, c.source.params);
    make_closed_form(c.boundary.preset, c.boundary.params, grid);
    for (const PresetSpec* ps : {&c.u, &c.v}) {
      if (ps->preset != "solution") make_closed_form(ps->preset, split_shift(*ps).first, grid);
    }
    if (c.exact) make_closed_form(c.exact->preset, c.exact->params, grid);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin) {
  ExperimentConfig c;
  std::istringstream in(text);
  std::string line, section;
  int number = 0;
  std::map<std::string, int> seen;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = origin + ":" + std::to_string(number) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + "malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) throw ConfigError(where + "empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(where + "missing key");
    const std::string full = section.empty() ? key : section + "." + key;
    if (seen.count(full)) {
      throw ConfigError(where + "duplicate key '" + full + "' (first on line " +
                        std::to_string(seen[full]) + ")");
    }
    seen[full] = number;
    try {
      assign(c, full, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  try {
    validate(c);
  } catch (const ConfigError& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  return c;
}

ExperimentConfig parse_config_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  ExperimentConfig c = parse_config_text(text.str(), path.string());
  c.base_dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  return c;
}

void apply_override(ExperimentConfig& c, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw ConfigError("--set " + assignment + ": expected section.key=value");
  }
  const std::string key = trim(assignment.substr(0, eq));
  try {
    assign(c, key, trim(assignment.substr(eq + 1)));
  } catch (const ConfigError& e) {
    throw ConfigError("--set: " + std::string(e.what()));
  }
  validate(c);
}

std::string config_reference() {
  const ExperimentConfig defaults;
  std::ostringstream os;
  os << "Config file: flat 'key = value' lines under [section] headers, '#' comments.\n"
     << "Keys and defaults:\n";
  for (const auto& spec : key_specs()) {
    os << "  " << std::left << std::setw(24) << spec.key << std::setw(20) << spec.get(defaults)
       << spec.help << '\n';
  }
  os << "Preset sections [exponent] [source] [boundary] [u] [v] [exact]: 'preset = NAME'\n"
     << "followed by numeric parameters. Defaults: exponent constant c=2, source zero,\n"
     << "boundary constant c=0, u and v 'solution' (the solve result; accepts shift).\n"
     << "Function presets:";
  for (const auto& n : closed_form_presets()) os << ' ' << n;
  os << "\nSource presets:";
  for (const auto& n : source_presets()) os << ' ' << n;
  os << '\n';
  return os.str();
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(ctx);
    throw IoError("sha256 unavailable");
  }
  char buf[1 << 15];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int k = 0; k < len; ++k) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[k]);
  }
  return hex.str();
}

RunResult run(const ExperimentConfig& config, const fs::path& outdir, std::ostream& log,
              const std::string& config_origin) {
  validate(config);
  Artifacts art(outdir);
  RunResult result;
  switch (config.command) {
    case Command::Norm: result.status = run_norm(config, art, log); break;
    case Command::Infconv: result.status = run_infconv(config, art, log); break;
    case Command::Solve: result.status = run_solve(config, art, log); break;
    case Command::CheckWeak: result.status = run_check(config, art, log, true); break;
    case Command::CheckViscosity: result.status = run_check(config, art, log, false); break;
    case Command::Pipeline: result.status = run_pipeline(config, art, log); break;
    case Command::Compare: result.status = run_compare(config, art, log); break;
    case Command::Denoise: result.status = run_denoise(config, art, log); break;
  }
  result.artifacts = art.names();

  std::ofstream m(outdir / "manifest.txt", std::ios::binary);
  if (!m) throw IoError("cannot write manifest in '" + outdir.string() + "'");
  m << "command=" << command_name(config.command) << '\n';
  if (!config_origin.empty()) {
    m << "config=" << fs::path(config_origin).filename().string() << '\n';
    m << "config.sha256=" << sha256_file(config_origin) << '\n';
  }
  if (config.command == Command::Denoise) {
    fs::path input = config.input;
    if (input.is_relative()) input = config.base_dir / input;
    m << "input=" << fs::path(config.input).filename().string() << '\n';
    m << "input.sha256=" << sha256_file(input) << '\n';
  }
  for (const auto& [k, v] : resolved(config)) m << "param." << k << '=' << v << '\n';
  m << "status=" << (result.status == 0 ? "pass" : "fail") << '\n';
  std::vector<std::string> names = art.names();
  std::sort(names.begin(), names.end());
  for (const auto& n : names) m << "artifact." << n << ".sha256=" << sha256_file(outdir / n) << '\n';
  if (!m) throw IoError("manifest write failed");
  return result;
}

}  // namespace pxlap::cli
