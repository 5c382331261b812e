#include "blowuplab/io.hpp"

#include "blowuplab/error.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

namespace blowuplab {
namespace {

template <typename T>
Json optional_json(const std::optional<T>& v)
{
  if (!v) {
    return nullptr;
  }
  if constexpr (std::is_same_v<T, Time>) {
    return static_cast<double>(*v);
  } else {
    return *v;
  }
}

Json vector_json(const Vector& v)
{
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    arr.push_back(v(i));
  }
  return arr;
}

Json triplets(const SparseMatrix& m)
{
  Json arr = Json::array();
  for (Eigen::Index k = 0; k < m.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
      arr.push_back(Json::array({it.row(), it.col(), it.value()}));
    }
  }
  return arr;
}

Json violation_json(const AuditViolation& v)
{
  return Json{{"check", v.check}, {"index", v.index}, {"t", static_cast<double>(v.t)}, {"detail", v.detail}};
}

void marker(std::ostringstream& os, const char* label, std::optional<double> t)
{
  if (t && std::isfinite(*t)) {
    os << "set arrow from " << format_double(*t) << ", graph 0 to " << format_double(*t)
       << ", graph 1 nohead dashtype 2\n";
    os << "set label '" << label << "' at " << format_double(*t) << ", graph 0.95 rotate by 90 right\n";
  }
}

}  // namespace

std::string format_double(double value)
{
  if (std::isnan(value)) {
    return "nan";
  }
  if (std::isinf(value)) {
    return value > 0 ? "inf" : "-inf";
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string format_time(Time value)
{
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.21Lg", value);
  return buf;
}

Json to_json(const ConstantEstimate& est)
{
  Json seeds = Json::array();
  for (std::uint64_t s : est.seeds) {
    seeds.push_back(s);
  }
  return Json{{"value", est.value},
              {"error_estimate", est.error_estimate},
              {"refined_value", optional_json(est.refined_value)},
              {"iterations", est.iterations},
              {"seed_values", est.seed_values},
              {"restart_values", est.restart_values},
              {"unconverged_restarts", est.unconverged_restarts},
              {"seeds", seeds},
              {"empty_trace_warning", est.empty_trace_warning}};
}

Json to_json(const SobolevConstants& consts)
{
  Json j{{"p", consts.p}, {"n", consts.n}, {"S1", to_json(consts.S1)}, {"S2", to_json(consts.S2)}};
  j["B1"] = consts.B1 ? to_json(*consts.B1) : Json(nullptr);
  j["S3"] = consts.S3 ? to_json(*consts.S3) : Json(nullptr);
  j["d"] = consts.has_d() ? Json(consts.d()) : Json(nullptr);
  j["A"] = consts.p > 2.0 ? Json(consts.A()) : Json(nullptr);
  j["b2_threshold"] = consts.p > 2.0 ? Json(consts.b2_threshold()) : Json(nullptr);
  j["sigma_gn"] = consts.derived.sigma_gn;
  j["S4"] = optional_json(consts.derived.S4);
  j["C_tilde"] = optional_json(consts.derived.C_tilde);
  j["options"] = Json{{"eigen_tolerance", consts.options.eigen_tolerance},
                      {"objective_tolerance", consts.options.objective_tolerance},
                      {"max_iterations", consts.options.max_iterations},
                      {"ascent_iterations", consts.options.ascent_iterations},
                      {"restarts", consts.options.restarts},
                      {"seed", consts.options.seed},
                      {"richardson", consts.options.richardson}};
  return j;
}

Json to_json(const Classification& c)
{
  return Json{{"J", c.J},
              {"K", c.K},
              {"rho", c.rho},
              {"X", c.X},
              {"d", optional_json(c.d)},
              {"b2_threshold", c.b2_threshold},
              {"margin_B1", optional_json(c.margin_B1)},
              {"margin_B2", c.margin_B2},
              {"margin_N_minus", c.margin_N_minus},
              {"in_B1", c.in_B1},
              {"in_B2", c.in_B2},
              {"in_N_minus", c.in_N_minus},
              {"boundary_case", c.boundary_case},
              {"notes", c.notes}};
}

Json to_json(const BlowupVerdict& v)
{
  return Json{{"status", to_string(v.status)},
              {"reason", v.reason},
              {"T_est", optional_json(v.T_est)},
              {"T_uncertainty", optional_json(v.T_uncertainty)},
              {"T_upper_B1", optional_json(v.T_upper_B1)},
              {"T_upper_B2", optional_json(v.T_upper_B2)},
              {"T_lower", optional_json(v.T_lower)},
              {"audit_clean", optional_json(v.audit_clean)},
              {"audit_findings", v.audit_findings},
              {"accepted_steps", v.accepted_steps},
              {"rejected_steps", v.rejected_steps},
              {"t_final", static_cast<double>(v.t_final)},
              {"final_sup_norm", v.final_sup_norm},
              {"min_relative_nodal_value", v.min_relative_nodal_value}};
}

Json to_json(const AuditReport& audit)
{
  Json violations = Json::array();
  for (const auto& v : audit.violations) {
    violations.push_back(violation_json(v));
  }
  return Json{{"clean", audit.clean()},
              {"initial_B1", audit.initial_B1},
              {"initial_B2", audit.initial_B2},
              {"initial_N_minus", audit.initial_N_minus},
              {"b1_checked", audit.b1_checked},
              {"b2_checked", audit.b2_checked},
              {"blowup_checked", audit.blowup_checked},
              {"b1_clean", audit.b1_clean},
              {"b2_clean", audit.b2_clean},
              {"energy_monotone", audit.energy_monotone},
              {"necessary_condition_holds", audit.necessary_condition_holds},
              {"n_minus_persistent", audit.n_minus_persistent},
              {"first_violation", audit.first_violation ? violation_json(*audit.first_violation) : Json(nullptr)},
              {"violations", violations}};
}

Json to_json(const ConcavityReport& rep, bool with_steps)
{
  Json j{{"p", rep.p},
         {"beta", rep.beta},
         {"sigma_F", rep.sigma_F},
         {"T", static_cast<double>(rep.T)},
         {"rho0", rep.rho0},
         {"J0", rep.J0},
         {"hypothesis_met", rep.hypothesis_met},
         {"hypothesis_note", rep.hypothesis_note},
         {"sigma_beta", rep.sigma_beta},
         {"predicted_bound", optional_json(rep.predicted_bound)},
         {"optimal_bound", rep.optimal_bound},
         {"beta_max_B1", optional_json(rep.beta_max_B1)},
         {"beta_max_B2", optional_json(rep.beta_max_B2)},
         {"steps_checked", rep.steps.size()},
         {"all_F_positive", rep.all_F_positive},
         {"all_inequalities_hold", rep.all_inequalities_hold},
         {"all_fd_Fp_consistent", rep.all_fd_Fp_consistent},
         {"first_violation", optional_json(rep.first_violation)}};
  if (with_steps) {
    Json steps = Json::array();
    for (const auto& s : rep.steps) {
      steps.push_back(Json{{"index", s.index},
                           {"t", static_cast<double>(s.t)},
                           {"F", s.F},
                           {"Fp", s.Fp},
                           {"Fpp", s.Fpp},
                           {"lhs", s.lhs},
                           {"rhs", s.rhs},
                           {"tol_q", s.tol_q},
                           {"holds", s.inequality_holds}});
    }
    j["steps"] = steps;
  }
  return j;
}

Json to_json(const IdentityResidualReport& rep)
{
  return Json{{"intervals", rep.intervals.size()},
              {"max_energy_rel", rep.max_energy_rel},
              {"max_lp_rel", rep.max_lp_rel},
              {"max_rho_rel", rep.max_rho_rel},
              {"cumulative_energy", rep.cumulative_energy}};
}

Json to_json(const EnergyConstruction& c)
{
  return Json{{"target", c.target},
              {"achieved", c.achieved},
              {"r", c.r},
              {"J_bump", c.J_bump},
              {"s", c.s},
              {"k", c.k},
              {"J_oscillatory", c.J_oscillatory},
              {"classification", to_json(c.classification)}};
}

Json field_to_json(const Field& u, const Mesh& mesh)
{
  return Json{{"mesh", mesh.fingerprint()},
              {"nodes", mesh.node_count()},
              {"time", static_cast<double>(u.time)},
              {"values", vector_json(u.values)}};
}

Field field_from_json(const Json& j, const Mesh& mesh)
{
  try {
    const std::string fp = j.at("mesh").get<std::string>();
    require(fp == mesh.fingerprint(), ErrorKind::Io,
            "field was written for mesh '" + fp + "', not '" + mesh.fingerprint() + "'");
    const auto& values = j.at("values");
    require(values.is_array() && values.size() == mesh.node_count(), ErrorKind::Io,
            "field has the wrong number of values");
    Field u;
    u.values.resize(static_cast<Eigen::Index>(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i) {
      u.values(static_cast<Eigen::Index>(i)) = values[i].get<double>();
    }
    u.time = static_cast<Time>(j.value("time", 0.0));
    return u;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Io, std::string("malformed field file: ") + e.what());
  }
}

Json operators_to_json(const DiscreteOperators& ops)
{
  const Mesh& mesh = ops.mesh();
  Json nodes = Json::array();
  for (const auto& x : mesh.nodes) {
    nodes.push_back(mesh.dim == 1 ? Json::array({x[0]}) : Json::array({x[0], x[1]}));
  }
  return Json{{"mesh", Json{{"fingerprint", mesh.fingerprint()},
                            {"dim", mesh.dim},
                            {"h", mesh.h},
                            {"nodes", nodes},
                            {"gamma0_nodes", mesh.gamma0_nodes},
                            {"gamma1_nodes", mesh.gamma1_nodes}}},
              {"quadrature_points", ops.quadrature_points()},
              {"mass", triplets(ops.mass())},
              {"stiffness", triplets(ops.stiffness())},
              {"boundary_mass", triplets(ops.boundary_mass())}};
}

std::string trajectory_csv(const TrajectoryRecord& traj)
{
  std::ostringstream os;
  os << "index,t,dt,J,K,rho,grad_norm_sq,lp_norm_p,l2_norm_sq,trace_l2_sq,H,energy_residual,sup_norm\n";
  for (std::size_t k = 0; k < traj.reports.size(); ++k) {
    const EnergyReport& r = traj.reports[k];
    os << k << ',' << format_time(r.t) << ',' << format_double(r.dt) << ',' << format_double(r.J) << ','
       << format_double(r.K) << ',' << format_double(r.rho) << ',' << format_double(r.grad_norm_sq) << ','
       << format_double(r.lp_norm_p) << ',' << format_double(r.l2_norm_sq) << ',' << format_double(r.trace_l2_sq)
       << ',' << (r.H ? format_double(*r.H) : std::string("nan")) << ',' << format_double(r.energy_residual) << ','
       << format_double(r.sup_norm) << '\n';
  }
  return os.str();
}

std::string plot_script(const std::string& csv_name, const BlowupVerdict& verdict, const std::string& title)
{
  std::ostringstream os;
  os << "# gnuplot -p plot.gp\n";
  os << "set datafile separator ','\n";
  os << "set datafile missing 'nan'\n";
  os << "set xlabel 't'\n";
  os << "set grid\n";
  if (verdict.T_est) {
    marker(os, "T_est", static_cast<double>(*verdict.T_est));
  }
  marker(os, "upper B1", verdict.T_upper_B1);
  marker(os, "upper B2", verdict.T_upper_B2);
  marker(os, "lower", verdict.T_lower);
  os << "set multiplot layout 2,2 title '" << title << " (" << to_string(verdict.status) << ")'\n";
  const std::string file = "'" + csv_name + "'";
  os << "plot " << file << " using 2:4 with lines title 'J'\n";
  os << "plot " << file << " using 2:5 with lines title 'K'\n";
  os << "set logscale y\n";
  os << "plot " << file << " using 2:6 with lines title 'rho'\n";
  os << "plot " << file << " using 2:13 with lines title 'sup |u|'\n";
  os << "unset logscale y\n";
  os << "unset multiplot\n";
  return os.str();
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

void write_text(const std::filesystem::path& path, const std::string& content)
{
  std::error_code ec;
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
    require(!ec, ErrorKind::Io, "cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.good(), ErrorKind::Io, "cannot open " + path.string() + " for writing");
  out << content;
  out.flush();
  require(out.good(), ErrorKind::Io, "write to " + path.string() + " failed");
}

std::string read_text(const std::filesystem::path& path)
{
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorKind::Io, "cannot read " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace blowuplab
