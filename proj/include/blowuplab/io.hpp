#pragma once

#include "blowuplab/analysis.hpp"
#include "blowuplab/concavity.hpp"
#include "blowuplab/constants.hpp"
#include "blowuplab/dynamics.hpp"
#include "blowuplab/functionals.hpp"
#include "blowuplab/initdata.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>

namespace blowuplab {

/// Insertion-ordered so reports read top-down and serialize byte-identically.
using Json = nlohmann::ordered_json;

/// "%.17g"; "nan", "inf", "-inf" for non-finite values.
std::string format_double(double value);
/// "%.21Lg".
std::string format_time(Time value);

Json to_json(const ConstantEstimate& est);
Json to_json(const SobolevConstants& consts);
Json to_json(const Classification& c);
Json to_json(const BlowupVerdict& v);
Json to_json(const AuditReport& audit);
/// Summary plus per-step values when with_steps is set.
Json to_json(const ConcavityReport& rep, bool with_steps = false);
Json to_json(const IdentityResidualReport& rep);
Json to_json(const EnergyConstruction& c);

/// Nodal values with the mesh fingerprint and time.
Json field_to_json(const Field& u, const Mesh& mesh);
/// Throws ErrorKind::Io when the fingerprint or length does not match the mesh.
Field field_from_json(const Json& j, const Mesh& mesh);

/// Mesh data and the assembled M, A, B as (row, col, value) triplets.
Json operators_to_json(const DiscreteOperators& ops);

/// Columns: index,t,dt,J,K,rho,grad_norm_sq,lp_norm_p,l2_norm_sq,trace_l2_sq,H,energy_residual,sup_norm.
std::string trajectory_csv(const TrajectoryRecord& traj);

/// gnuplot command file plotting J, K, rho and the sup-norm against t from csv_name, with
/// vertical markers at T_est and the available bounds. No terminal is set.
std::string plot_script(const std::string& csv_name, const BlowupVerdict& verdict, const std::string& title);

/// Two-space indented JSON with a trailing newline.
std::string dump(const Json& j);

/// Throws ErrorKind::Io on failure. Parent directories are created.
void write_text(const std::filesystem::path& path, const std::string& content);
std::string read_text(const std::filesystem::path& path);

}  // namespace blowuplab
