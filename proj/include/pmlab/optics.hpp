#pragma once

#include <array>
#include <map>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "pmlab/errors.hpp"
#include "pmlab/pmsquare.hpp"
#include "pmlab/qcore.hpp"

namespace pmlab::optics {

using qcore::Complex;
using qcore::DensityMatrix;
using qcore::Matrix2;
using qcore::Operator4;
using qcore::Vector4;

using MatrixX = Eigen::MatrixXcd;

/// Pass threshold for verify_setting's operator-norm distance.
inline constexpr double kVerifyTol = 1e-8;
/// Isometry tolerance for circuit validation.
inline constexpr double kIsometryTol = 1e-10;

// ---------------------------------------------------------------------------
// Jones calculus
// ---------------------------------------------------------------------------

/// Half-wave plate with fast axis at theta degrees:
/// [[cos 2θ, sin 2θ], [sin 2θ, −cos 2θ]]. Unitary, Hermitian, involutive.
Matrix2 jones_hwp(double theta_deg);

/// Quarter-wave plate with fast axis at theta degrees:
/// R(θ)·diag(1, i)·R(−θ). jones_qwp(0) = diag(1, i); the fourth power at any
/// angle is the identity up to a global phase.
Matrix2 jones_qwp(double theta_deg);

/// For a single-qubit observable M with M² = 1 and eigenvalues {+1, −1},
/// the unitary U = |H⟩⟨m₊| + |V⟩⟨m₋| mapping the +1 eigenvector to H and the
/// −1 eigenvector to V, so U·M·U† = Z. Row phases are fixed by making the
/// first nonvanishing component of each eigenvector real and positive.
/// Degenerate input (M proportional to the identity) → InvalidInput.
Matrix2 basis_rotation(const Matrix2& obs);

// ---------------------------------------------------------------------------
// Mode-space circuits: `rails` spatial rails, each carrying H/V polarization.
// Mode index = 2·rail + (0 for H, 1 for V).
// ---------------------------------------------------------------------------

enum class Pol { H = 0, V = 1 };

struct ModeRef {
  int rail = 0;
  Pol pol = Pol::H;
  bool operator==(const ModeRef&) const = default;
};

enum class StageKind { HWP, QWP, BD, PBS, QC };

/// One optical element. HWP/QWP act on the polarization of every listed rail;
/// BD shifts H-polarized light by `shift` rails (cyclically; bundled templates
/// keep guard rails so wrap never carries amplitude); PBS swaps the V
/// component of each listed rail with the rail `dump_offset` below it,
/// transmitting H in place; QC destroys coherence between distinct listed
/// rails and therefore acts only on density matrices.
struct Stage {
  StageKind kind = StageKind::HWP;
  std::string plate;        // plate name for HWP/QWP (templates); may be empty
  std::vector<int> rails;   // scope for HWP/QWP/PBS/QC
  double angle_deg = 0.0;   // HWP/QWP
  int shift = 0;            // BD
  int dump_offset = 0;      // PBS
  bool optional = false;    // template slot may be bypassed by a table row
};

/// Ordered stages plus the declared logical input/output mode bindings
/// (logical basis order |0⟩, |1⟩, |2⟩, |3⟩).
struct Circuit {
  int rails = 0;
  std::vector<Stage> stages;
  std::array<ModeRef, 4> input{};
  std::array<ModeRef, 4> output{};

  bool has_dephaser() const;
};

/// Mode-space matrix of a single non-QC stage; unitary by construction.
/// QC stages have no matrix form → InvalidInput.
MatrixX stage_matrix(const Stage& stage, int rails);

/// Product of all stage matrices (last stage leftmost). QC present →
/// InvalidInput.
MatrixX circuit_matrix(const Circuit& circuit);

/// Structural checks: positive rail count, scopes and bindings in range,
/// distinct bindings, PBS dump targets in range, and the non-QC composition
/// restricted to the declared inputs is an isometry within 1e-10.
/// Violations → InvalidInput.
void validate(const Circuit& circuit);

/// 4×4 transfer matrix V from logical inputs to the declared logical outputs
/// (the kept branch; unnormalized, QC-free circuits only).
Eigen::Matrix4cd logical_transfer(const Circuit& circuit);

/// Kept branch of a pure state: V·in, expressed over the declared outputs.
/// Circuits with QC stages → InvalidInput (use the density overload).
Vector4 apply_circuit(const Circuit& circuit, const Vector4& in);

/// Stage-by-stage action on a density matrix; QC stages zero the coherence
/// between modes on distinct rails within their scope. The result is the
/// declared-output block (unnormalized when the circuit discards amplitude).
Operator4 apply_circuit(const Circuit& circuit, const Operator4& in);

/// E = V†V where V maps the declared logical inputs to `kept` modes.
/// For an ideal setting E equals the target eigenprojector; keeping every
/// mode gives E = 1; complementary kept sets sum to 1.
Operator4 effective_measurement_operator(const Circuit& circuit,
                                         std::span<const ModeRef> kept);

/// Same with kept = the declared output bindings.
Operator4 effective_measurement_operator(const Circuit& circuit);

// ---------------------------------------------------------------------------
// Setting tables (transcribed plate angles) and circuit templates
// ---------------------------------------------------------------------------

/// Column order of the setting-table CSV after `measurement,outcome`.
std::span<const std::string_view> plate_columns();

struct SettingRow {
  std::string measurement;
  int outcome = +1;
  std::map<std::string, double> angles;  // plate name → degrees; absent = bypassed

  bool has(std::string_view plate) const;
  double angle(std::string_view plate) const;  // InvalidInput when bypassed
};

struct SettingTable {
  std::vector<SettingRow> rows;

  /// nullptr when the (measurement, outcome) row is absent.
  const SettingRow* find(std::string_view measurement, int outcome) const;
};

SettingTable parse_setting_table(std::string_view csv);
SettingTable load_setting_table(const std::string& path);
std::string serialize_setting_table(const SettingTable& table);
void save_setting_table(const SettingTable& table, const std::string& path);

/// A named circuit whose HWP/QWP stages carry plate names instead of angles.
struct CircuitTemplate {
  std::string name;
  Circuit skeleton;
};

struct TemplateSet {
  std::vector<CircuitTemplate> templates;

  const CircuitTemplate* find(std::string_view name) const;
};

TemplateSet parse_templates(std::string_view json_text);
TemplateSet load_templates(const std::string& path);

/// Bundled data files (installed beside the sources).
std::string default_settings_path();
std::string default_templates_path();

/// Template a row belongs to: rows using the two-plate-group polarization
/// device (H18…H25, Q5, Q6) map to "simple", all others to "four_bd".
std::string_view template_name_for(const SettingRow& row);

/// Fill a template's plate slots with the row's angles. Required plates
/// without an angle, or row angles the template never consumes, are data
/// errors → InvalidInput. The instantiated circuit is validated.
Circuit instantiate(const CircuitTemplate& tmpl, const SettingRow& row);

/// Gaussian perturbation of every present angle (diagnostics).
SettingRow with_jitter(const SettingRow& row, double sigma_deg, std::mt19937_64& rng);

// ---------------------------------------------------------------------------
// Verification against the intended projectors
// ---------------------------------------------------------------------------

struct VerifyResult {
  std::string measurement;
  int outcome = +1;
  double metric = 0.0;  // operator norm ‖E − P_outcome‖
  bool pass = false;    // metric < 1e-8
};

/// Build the row's circuit from its template and compare the effective
/// measurement operator against the projector of the named observable.
/// Missing rows or templates → InvalidInput.
VerifyResult verify_setting(std::string_view measurement, int outcome,
                            const SettingTable& table, const TemplateSet& templates);

/// verify_setting over every row of the table, in table order.
std::vector<VerifyResult> verify_all(const SettingTable& table,
                                     const TemplateSet& templates);

/// Joint sequential-outcome distribution of a context obtained by chaining
/// the three instantiated devices (kept-branch transfer operators), for
/// comparison against the closed-form joint distribution.
pmsquare::JointDistribution8 chained_joint_distribution(
    const pmsquare::Context& ctx, const DensityMatrix& rho,
    const SettingTable& table, const TemplateSet& templates);

}  // namespace pmlab::optics
