#include "blowuplab/config.hpp"

#include "blowuplab/error.hpp"

#include <toml.hpp>

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <set>
#include <sstream>
#include <thread>

namespace blowuplab {
namespace {

/// Reads the keys of one table and remembers which were consumed.
class Section {
public:
  Section(const toml::table* table, std::string name) : table_(table), name_(std::move(name)) {}

  template <typename T>
  void read(const char* key, T& out)
  {
    const toml::node* node = find(key);
    if (node == nullptr) {
      return;
    }
    if constexpr (std::is_same_v<T, bool>) {
      out = as<bool>(*node, key);
    } else if constexpr (std::is_same_v<T, std::string>) {
      out = as<std::string>(*node, key);
    } else if constexpr (std::is_floating_point_v<T>) {
      out = as<double>(*node, key);
    } else if constexpr (std::is_same_v<T, std::uint64_t>) {
      const std::int64_t v = as<std::int64_t>(*node, key);
      require(v >= 0, ErrorKind::Config, path(key) + " must be nonnegative");
      out = static_cast<std::uint64_t>(v);
    } else if constexpr (std::is_same_v<T, std::size_t>) {
      const std::int64_t v = as<std::int64_t>(*node, key);
      require(v >= 0, ErrorKind::Config, path(key) + " must be nonnegative");
      out = static_cast<std::size_t>(v);
    } else {
      const std::int64_t v = as<std::int64_t>(*node, key);
      require(v >= std::numeric_limits<int>::min() && v <= std::numeric_limits<int>::max(), ErrorKind::Config,
              path(key) + " is out of range");
      out = static_cast<int>(v);
    }
  }

  void read(const char* key, std::optional<double>& out)
  {
    if (const toml::node* node = find(key)) {
      out = as<double>(*node, key);
    }
  }

  void read_pair(const char* key, std::array<double, 2>& out)
  {
    const toml::node* node = find(key);
    if (node == nullptr) {
      return;
    }
    const toml::array* arr = node->as_array();
    require(arr != nullptr && arr->size() >= 1 && arr->size() <= 2, ErrorKind::Config,
            path(key) + " must be an array of one or two numbers");
    out = {0.0, 0.0};
    for (std::size_t i = 0; i < arr->size(); ++i) {
      const auto v = (*arr)[i].value<double>();
      require(v.has_value(), ErrorKind::Config, path(key) + " must contain numbers");
      out[i] = *v;
    }
  }

  void read_list(const char* key, std::vector<double>& out)
  {
    const toml::node* node = find(key);
    if (node == nullptr) {
      return;
    }
    const toml::array* arr = node->as_array();
    require(arr != nullptr, ErrorKind::Config, path(key) + " must be an array");
    out.clear();
    for (const toml::node& item : *arr) {
      const auto v = item.value<double>();
      require(v.has_value(), ErrorKind::Config, path(key) + " must contain numbers");
      out.push_back(*v);
    }
  }

  [[nodiscard]] Section sub(const char* key)
  {
    const toml::node* node = find(key);
    if (node == nullptr) {
      return {nullptr, path(key)};
    }
    require(node->is_table(), ErrorKind::Config, path(key) + " must be a table");
    return {node->as_table(), path(key)};
  }

  [[nodiscard]] bool present() const { return table_ != nullptr; }

  /// Throws ErrorKind::Config naming the first key that was never read.
  void finish() const
  {
    if (table_ == nullptr) {
      return;
    }
    for (const auto& [key, node] : *table_) {
      if (used_.count(std::string(key.str())) == 0) {
        throw Error(ErrorKind::Config, "unknown config key '" + path(std::string(key.str())) + "'");
      }
    }
  }

private:
  const toml::node* find(const std::string& key)
  {
    if (table_ == nullptr) {
      return nullptr;
    }
    used_.insert(key);
    return table_->get(key);
  }

  template <typename T>
  T as(const toml::node& node, const std::string& key) const
  {
    const auto v = node.value<T>();
    require(v.has_value(), ErrorKind::Config, path(key) + " has the wrong type");
    return *v;
  }

  [[nodiscard]] std::string path(const std::string& key) const { return name_.empty() ? key : name_ + "." + key; }

  const toml::table* table_;
  std::string name_;
  std::set<std::string> used_;
};

void merge(toml::table& dst, const toml::table& src)
{
  for (const auto& [key, node] : src) {
    toml::node* existing = dst.get(key);
    if (node.is_table() && existing != nullptr && existing->is_table()) {
      merge(*existing->as_table(), *node.as_table());
    } else {
      dst.insert_or_assign(key, node);
    }
  }
}

void read_region(Section s, std::optional<Region>& out)
{
  if (!s.present()) {
    return;
  }
  Region r;
  s.read_pair("lo", r.lo);
  s.read_pair("hi", r.hi);
  s.finish();
  out = r;
}

RunConfig from_table(const toml::table& root)
{
  RunConfig cfg;
  Section top(&root, "");

  Section problem = top.sub("problem");
  problem.read("dim", cfg.problem.dim);
  problem.read("length_x", cfg.problem.length_x);
  problem.read("length_y", cfg.problem.length_y);
  problem.read("p", cfg.problem.p);
  std::string gamma0;
  problem.read("gamma0", gamma0);
  if (!gamma0.empty()) {
    if (cfg.problem.dim == 1) {
      cfg.problem.gamma0_side = parse_side(gamma0);
    } else {
      cfg.problem.gamma0_edges = EdgeSet::parse(gamma0);
    }
  }
  problem.finish();

  Section mesh = top.sub("mesh");
  mesh.read("cells_x", cfg.cells_x);
  mesh.read("cells_y", cfg.cells_y);
  mesh.finish();

  Section integ = top.sub("integrator");
  IntegratorConfig& ic = cfg.integrator;
  integ.read("dt0", ic.dt0);
  integ.read("dt_min", ic.dt_min);
  integ.read("safety", ic.safety);
  integ.read("tol_growth", ic.tol_growth);
  integ.read("theta_blowup", ic.theta_blowup);
  integ.read("horizon", ic.horizon);
  integ.read("record_every", ic.record_every);
  integ.read("extrapolation_window", ic.extrapolation_window);
  integ.read("h1_threshold", ic.h1_threshold);
  integ.read("reject_factor", ic.reject_factor);
  integ.read("max_steps", ic.max_steps);
  integ.finish();

  Section init = top.sub("initial");
  InitialConfig& in = cfg.initial;
  std::string kind;
  init.read("kind", kind);
  if (!kind.empty()) {
    in.kind = parse_initial_kind(kind);
  }
  std::string family;
  init.read("family", family);
  if (!family.empty()) {
    in.spec.family = parse_family(family);
  }
  init.read("amplitude", in.spec.amplitude);
  init.read("amplitude2", in.spec.amplitude2);
  init.read("frequency", in.spec.frequency);
  init.read_pair("center", in.spec.center);
  init.read("width", in.spec.width);
  read_region(init.sub("omega1"), in.spec.omega1);
  read_region(init.sub("omega2"), in.spec.omega2);
  init.read("target_energy", in.target_energy);
  init.read("modes", in.random_modes);
  init.read("level", in.level);
  std::string file;
  init.read("path", file);
  in.path = file;
  init.finish();

  Section est = top.sub("estimator");
  EstimatorOptions& eo = cfg.estimator;
  est.read("eigen_tolerance", eo.eigen_tolerance);
  est.read("objective_tolerance", eo.objective_tolerance);
  est.read("max_iterations", eo.max_iterations);
  est.read("ascent_iterations", eo.ascent_iterations);
  est.read("restarts", eo.restarts);
  est.read("seed", eo.seed);
  est.read("richardson", eo.richardson);
  est.finish();

  Section run = top.sub("run");
  run.read("name", cfg.name);
  run.read("seed", cfg.seed);
  run.read("simulate", cfg.simulate);
  run.read("audits", cfg.audits);
  run.read("bounds", cfg.bounds);
  run.read("concavity", cfg.concavity);
  run.read("dump_operators", cfg.dump_operators);
  std::string out;
  run.read("output_dir", out);
  if (!out.empty()) {
    cfg.output_dir = out;
  }
  run.finish();

  Section sweep = top.sub("sweep");
  if (sweep.present()) {
    SweepAxis axis;
    sweep.read("parameter", axis.parameter);
    sweep.read_list("values", axis.values);
    sweep.finish();
    cfg.sweep = axis;
  }
  top.finish();
  return cfg;
}

toml::table load_table(const std::optional<std::filesystem::path>& file, const std::vector<Override>& overrides)
{
  toml::table root;
  if (file) {
    try {
      root = toml::parse_file(file->string());
    } catch (const toml::parse_error& e) {
      const std::string what(e.description());
      if (!std::filesystem::exists(*file)) {
        throw Error(ErrorKind::Io, "cannot read config file " + file->string());
      }
      std::ostringstream os;
      os << file->string() << ':' << e.source().begin.line << ": " << what;
      throw Error(ErrorKind::Config, os.str());
    }
  }
  for (const auto& [key, value] : overrides) {
    toml::table patch;
    try {
      patch = toml::parse(key + " = " + value);
    } catch (const toml::parse_error& e) {
      throw Error(ErrorKind::Config, "bad override '" + key + "=" + value + "': " + std::string(e.description()));
    }
    merge(root, patch);
  }
  return root;
}

toml::array number_array(const std::array<double, 2>& v, int dim)
{
  toml::array a;
  for (int i = 0; i < dim; ++i) {
    a.push_back(v[static_cast<std::size_t>(i)]);
  }
  return a;
}

toml::table region_table(const Region& r, int dim)
{
  return toml::table{{"lo", number_array(r.lo, dim)}, {"hi", number_array(r.hi, dim)}};
}

}  // namespace

const char* to_string(InitialKind kind)
{
  switch (kind) {
    case InitialKind::Family: return "family";
    case InitialKind::EnergyLevel: return "energy_level";
    case InitialKind::RandomB1: return "random_b1";
    case InitialKind::RandomB2: return "random_b2";
    case InitialKind::File: return "file";
  }
  return "family";
}

InitialKind parse_initial_kind(const std::string& name)
{
  for (InitialKind k : {InitialKind::Family, InitialKind::EnergyLevel, InitialKind::RandomB1, InitialKind::RandomB2,
                        InitialKind::File}) {
    if (name == to_string(k)) {
      return k;
    }
  }
  throw Error(ErrorKind::Config, "unknown initial.kind '" + name + "'");
}

void RunConfig::validate() const
{
  try {
    problem.validate();
    integrator.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::Config, e.what());
  }
  require(cells_x >= 1, ErrorKind::Config, "mesh.cells_x must be positive");
  require(problem.dim == 1 || cells_y >= 1, ErrorKind::Config, "mesh.cells_y must be positive in 2D");
  require(!output_dir.empty(), ErrorKind::Config, "run.output_dir must not be empty");
  require(estimator.restarts >= 1, ErrorKind::Config, "estimator.restarts must be positive");
  require(std::isfinite(initial.spec.amplitude), ErrorKind::Config, "initial.amplitude must be finite");
  require(initial.random_modes >= 1, ErrorKind::Config, "initial.modes must be positive");
  const bool needs_blowup_sets = initial.kind == InitialKind::EnergyLevel || initial.kind == InitialKind::RandomB1 ||
                                 initial.kind == InitialKind::RandomB2;
  require(!needs_blowup_sets || problem.p > 2.0, ErrorKind::Config,
          std::string("initial.kind = ") + to_string(initial.kind) + " needs p > 2");
  require(initial.kind != InitialKind::File || !initial.path.empty(), ErrorKind::Config,
          "initial.kind = file needs initial.path");
  if (sweep) {
    require(!sweep->parameter.empty(), ErrorKind::Usage, "sweep.parameter is empty");
    require(!sweep->values.empty(), ErrorKind::Usage, "sweep.values is empty");
  }
}

RunConfig load_config(const std::optional<std::filesystem::path>& file, const std::vector<Override>& overrides)
{
  RunConfig cfg = from_table(load_table(file, overrides));
  cfg.source_file = file;
  cfg.overrides = overrides;
  cfg.validate();
  return cfg;
}

RunConfig with_overrides(const RunConfig& base, const std::vector<Override>& extra)
{
  std::vector<Override> all = base.overrides;
  all.insert(all.end(), extra.begin(), extra.end());
  return load_config(base.source_file, all);
}

Override parse_override(const std::string& text)
{
  const auto eq = text.find('=');
  require(eq != std::string::npos && eq > 0, ErrorKind::Usage, "override '" + text + "' must look like key=value");
  return {text.substr(0, eq), text.substr(eq + 1)};
}

std::string to_toml(const RunConfig& cfg)
{
  const int dim = cfg.problem.dim;
  toml::table problem{{"dim", dim}, {"length_x", cfg.problem.length_x}, {"p", cfg.problem.p}};
  if (dim == 1) {
    problem.insert("gamma0", to_string(cfg.problem.gamma0_side));
  } else {
    problem.insert("length_y", cfg.problem.length_y);
    problem.insert("gamma0", cfg.problem.gamma0_edges.to_string());
  }
  toml::table mesh{{"cells_x", cfg.cells_x}};
  if (dim == 2) {
    mesh.insert("cells_y", cfg.cells_y);
  }
  const IntegratorConfig& ic = cfg.integrator;
  toml::table integ{{"dt0", ic.dt0},
                    {"dt_min", ic.dt_min},
                    {"safety", ic.safety},
                    {"tol_growth", ic.tol_growth},
                    {"theta_blowup", ic.theta_blowup},
                    {"horizon", ic.horizon},
                    {"record_every", ic.record_every},
                    {"extrapolation_window", ic.extrapolation_window},
                    {"h1_threshold", ic.h1_threshold},
                    {"reject_factor", ic.reject_factor},
                    {"max_steps", static_cast<std::int64_t>(ic.max_steps)}};
  const InitialConfig& in = cfg.initial;
  toml::table init{{"kind", to_string(in.kind)},
                   {"family", to_string(in.spec.family)},
                   {"amplitude", in.spec.amplitude},
                   {"amplitude2", in.spec.amplitude2},
                   {"frequency", in.spec.frequency},
                   {"center", number_array(in.spec.center, dim)},
                   {"width", in.spec.width},
                   {"target_energy", in.target_energy},
                   {"modes", in.random_modes}};
  if (in.level) {
    init.insert("level", *in.level);
  }
  if (!in.path.empty()) {
    init.insert("path", in.path.string());
  }
  if (in.spec.omega1) {
    init.insert("omega1", region_table(*in.spec.omega1, dim));
  }
  if (in.spec.omega2) {
    init.insert("omega2", region_table(*in.spec.omega2, dim));
  }
  const EstimatorOptions& eo = cfg.estimator;
  toml::table est{{"eigen_tolerance", eo.eigen_tolerance},
                  {"objective_tolerance", eo.objective_tolerance},
                  {"max_iterations", eo.max_iterations},
                  {"ascent_iterations", eo.ascent_iterations},
                  {"restarts", eo.restarts},
                  {"seed", static_cast<std::int64_t>(eo.seed)},
                  {"richardson", eo.richardson}};
  toml::table run{{"name", cfg.name},
                  {"seed", static_cast<std::int64_t>(cfg.seed)},
                  {"simulate", cfg.simulate},
                  {"audits", cfg.audits},
                  {"bounds", cfg.bounds},
                  {"concavity", cfg.concavity},
                  {"dump_operators", cfg.dump_operators},
                  {"output_dir", cfg.output_dir.generic_string()}};
  toml::table root{{"problem", problem}, {"mesh", mesh},      {"integrator", integ},
                   {"initial", init},    {"estimator", est}, {"run", run}};
  if (cfg.sweep) {
    toml::array values;
    for (double v : cfg.sweep->values) {
      values.push_back(v);
    }
    root.insert("sweep", toml::table{{"parameter", cfg.sweep->parameter}, {"values", values}});
  }
  std::ostringstream os;
  os << root << '\n';
  return os.str();
}

int worker_limit()
{
  if (const char* env = std::getenv("BLOWUPLAB_THREADS")) {
    const std::string text(env);
    int value = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    require(ec == std::errc() && end == text.data() + text.size() && value >= 1, ErrorKind::Config,
            "BLOWUPLAB_THREADS must be a positive integer, got '" + text + "'");
    return value;
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

}  // namespace blowuplab
