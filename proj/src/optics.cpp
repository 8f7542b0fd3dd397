#include "pmlab/optics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "json.hpp"

namespace pmlab::optics {

namespace {

constexpr double kUnitaryTol = 1e-12;

constexpr std::array<std::string_view, 28> kPlateColumns = {
    "Q1", "H4",  "H5",  "H6",  "Q2", "H7",  "H8",  "H9",  "H10", "H11",
    "H12", "Q3", "H13", "H14", "H15", "H16", "H17", "Q4",  "H18", "H19",
    "H20", "H21", "Q5",  "H22", "H23", "H24", "H25", "Q6"};

// Plates belonging to the two-rail polarization-only device.
constexpr std::array<std::string_view, 10> kSimplePlates = {
    "H18", "H19", "H20", "H21", "Q5", "H22", "H23", "H24", "H25", "Q6"};

double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

int mode_index(const ModeRef& m) { return 2 * m.rail + static_cast<int>(m.pol); }

std::string format_angle(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

double parse_angle(std::string_view text) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw InvalidInput("malformed angle '" + std::string(text) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    std::size_t pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(text.substr(start));
      return out;
    }
    out.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

bool is_unitary(const MatrixX& m, double tol) {
  MatrixX delta = m.adjoint() * m - MatrixX::Identity(m.rows(), m.cols());
  return delta.cwiseAbs().maxCoeff() < tol;
}

void check_scope(const std::vector<int>& scope, int rails, const char* what) {
  if (scope.empty()) {
    throw InvalidInput(std::string(what) + " stage has an empty rail scope");
  }
  for (int r : scope) {
    if (r < 0 || r >= rails) {
      throw InvalidInput(std::string(what) + " stage addresses rail " +
                         std::to_string(r) + " outside [0," + std::to_string(rails) +
                         ")");
    }
    if (std::count(scope.begin(), scope.end(), r) != 1) {
      throw InvalidInput(std::string(what) + " stage lists rail " +
                         std::to_string(r) + " twice");
    }
  }
}

MatrixX product_skipping_dephasers(const Circuit& circuit) {
  int n = 2 * circuit.rails;
  MatrixX total = MatrixX::Identity(n, n);
  for (const Stage& stage : circuit.stages) {
    if (stage.kind == StageKind::QC) continue;
    total = stage_matrix(stage, circuit.rails) * total;
  }
  return total;
}

void dephase(MatrixX& rho, const Stage& stage, int rails) {
  check_scope(stage.rails, rails, "QC");
  auto in_scope = [&](int rail) {
    return std::find(stage.rails.begin(), stage.rails.end(), rail) !=
           stage.rails.end();
  };
  int n = 2 * rails;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      int ri = i / 2;
      int rj = j / 2;
      if (ri != rj && in_scope(ri) && in_scope(rj)) rho(i, j) = Complex(0, 0);
    }
  }
}

double operator_norm(const Operator4& m) {
  Eigen::JacobiSVD<Operator4> svd(m);
  return svd.singularValues()(0);
}

}  // namespace

Matrix2 jones_hwp(double theta_deg) {
  double t = deg_to_rad(2.0 * theta_deg);
  Matrix2 m;
  m << std::cos(t), std::sin(t), std::sin(t), -std::cos(t);
  return m;
}

Matrix2 jones_qwp(double theta_deg) {
  double t = deg_to_rad(theta_deg);
  Matrix2 rot;
  rot << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
  Matrix2 core = Matrix2::Zero();
  core(0, 0) = Complex(1, 0);
  core(1, 1) = Complex(0, 1);
  return rot * core * rot.transpose();
}

Matrix2 basis_rotation(const Matrix2& obs) {
  if ((obs - obs.adjoint()).cwiseAbs().maxCoeff() > qcore::kHermTol) {
    throw InvalidInput("basis_rotation needs a Hermitian observable");
  }
  Matrix2 square = obs * obs;
  if ((square - Matrix2::Identity()).cwiseAbs().maxCoeff() > qcore::kInvolutionTol) {
    throw InvalidInput("basis_rotation needs an involutive observable");
  }
  Eigen::SelfAdjointEigenSolver<Matrix2> solver(obs);
  // Eigenvalues ascend: index 0 → −1, index 1 → +1. Both must be present.
  if (std::abs(solver.eigenvalues()(0) + 1.0) > 1e-9 ||
      std::abs(solver.eigenvalues()(1) - 1.0) > 1e-9) {
    throw InvalidInput("basis_rotation needs eigenvalues {+1,-1} (degenerate input)");
  }
  auto fixed_phase = [](Eigen::Vector2cd v) {
    int lead = std::abs(v(0)) > 1e-12 ? 0 : 1;
    Complex ph = v(lead) / std::abs(v(lead));
    return Eigen::Vector2cd(v / ph);
  };
  Eigen::Vector2cd plus = fixed_phase(solver.eigenvectors().col(1));
  Eigen::Vector2cd minus = fixed_phase(solver.eigenvectors().col(0));
  Matrix2 u;
  u.row(0) = plus.adjoint();
  u.row(1) = minus.adjoint();
  Matrix2 check = u * obs * u.adjoint();
  if ((check - qcore::pauli('Z')).cwiseAbs().maxCoeff() > 1e-10) {
    throw ContractViolation("basis rotation failed to diagonalize the observable");
  }
  return u;
}

bool Circuit::has_dephaser() const {
  return std::any_of(stages.begin(), stages.end(),
                     [](const Stage& s) { return s.kind == StageKind::QC; });
}

MatrixX stage_matrix(const Stage& stage, int rails) {
  if (rails < 1) throw InvalidInput("circuit needs at least one rail");
  int n = 2 * rails;
  switch (stage.kind) {
    case StageKind::HWP:
    case StageKind::QWP: {
      check_scope(stage.rails, rails, stage.kind == StageKind::HWP ? "HWP" : "QWP");
      Matrix2 jones = stage.kind == StageKind::HWP ? jones_hwp(stage.angle_deg)
                                                   : jones_qwp(stage.angle_deg);
      MatrixX m = MatrixX::Identity(n, n);
      for (int r : stage.rails) m.block<2, 2>(2 * r, 2 * r) = jones;
      return m;
    }
    case StageKind::BD: {
      if (stage.shift == 0) throw InvalidInput("BD stage needs a nonzero shift");
      MatrixX m = MatrixX::Zero(n, n);
      for (int r = 0; r < rails; ++r) {
        int target = ((r + stage.shift) % rails + rails) % rails;
        m(2 * target, 2 * r) = Complex(1, 0);   // H displaced
        m(2 * r + 1, 2 * r + 1) = Complex(1, 0);  // V straight through
      }
      return m;
    }
    case StageKind::PBS: {
      check_scope(stage.rails, rails, "PBS");
      if (stage.dump_offset == 0) throw InvalidInput("PBS stage needs a dump offset");
      MatrixX m = MatrixX::Identity(n, n);
      for (int r : stage.rails) {
        int d = r + stage.dump_offset;
        if (d < 0 || d >= rails) {
          throw InvalidInput("PBS dump rail " + std::to_string(d) +
                             " outside [0," + std::to_string(rails) + ")");
        }
        if (std::find(stage.rails.begin(), stage.rails.end(), d) != stage.rails.end()) {
          throw InvalidInput("PBS dump rail " + std::to_string(d) +
                             " collides with an analyzed rail");
        }
        int v_src = 2 * r + 1;
        int v_dst = 2 * d + 1;
        m(v_src, v_src) = Complex(0, 0);
        m(v_dst, v_dst) = Complex(0, 0);
        m(v_dst, v_src) = Complex(1, 0);
        m(v_src, v_dst) = Complex(1, 0);
      }
      return m;
    }
    case StageKind::QC:
      throw InvalidInput("QC stages have no matrix form; use the density overload");
  }
  throw InvalidInput("unknown stage kind");
}

MatrixX circuit_matrix(const Circuit& circuit) {
  if (circuit.has_dephaser()) {
    throw InvalidInput("circuit contains a QC stage; no unitary matrix exists");
  }
  return product_skipping_dephasers(circuit);
}

void validate(const Circuit& circuit) {
  if (circuit.rails < 1) throw InvalidInput("circuit needs at least one rail");
  auto check_binding = [&](const std::array<ModeRef, 4>& modes, const char* what) {
    for (const ModeRef& m : modes) {
      if (m.rail < 0 || m.rail >= circuit.rails) {
        throw InvalidInput(std::string(what) + " binding addresses rail " +
                           std::to_string(m.rail) + " outside the circuit");
      }
    }
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = i + 1; j < 4; ++j)
        if (modes[i] == modes[j]) {
          throw InvalidInput(std::string(what) + " bindings repeat a mode");
        }
  };
  check_binding(circuit.input, "input");
  check_binding(circuit.output, "output");
  for (const Stage& stage : circuit.stages) {
    if (stage.kind == StageKind::QC) {
      check_scope(stage.rails, circuit.rails, "QC");
      continue;
    }
    MatrixX m = stage_matrix(stage, circuit.rails);
    if (!is_unitary(m, kUnitaryTol)) {
      throw ContractViolation("stage matrix lost unitarity");
    }
  }
  MatrixX total = product_skipping_dephasers(circuit);
  MatrixX v(total.rows(), 4);
  for (int j = 0; j < 4; ++j) v.col(j) = total.col(mode_index(circuit.input[j]));
  MatrixX delta = v.adjoint() * v - MatrixX::Identity(4, 4);
  if (delta.cwiseAbs().maxCoeff() > kIsometryTol) {
    throw InvalidInput("circuit is not an isometry on the declared input modes");
  }
}

Eigen::Matrix4cd logical_transfer(const Circuit& circuit) {
  MatrixX total = circuit_matrix(circuit);
  Eigen::Matrix4cd v;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      v(i, j) = total(mode_index(circuit.output[i]), mode_index(circuit.input[j]));
  return v;
}

Vector4 apply_circuit(const Circuit& circuit, const Vector4& in) {
  return logical_transfer(circuit) * in;
}

Operator4 apply_circuit(const Circuit& circuit, const Operator4& in) {
  int n = 2 * circuit.rails;
  MatrixX rho = MatrixX::Zero(n, n);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      rho(mode_index(circuit.input[i]), mode_index(circuit.input[j])) = in(i, j);
  for (const Stage& stage : circuit.stages) {
    if (stage.kind == StageKind::QC) {
      dephase(rho, stage, circuit.rails);
    } else {
      MatrixX m = stage_matrix(stage, circuit.rails);
      rho = m * rho * m.adjoint();
    }
  }
  Operator4 out;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      out(i, j) = rho(mode_index(circuit.output[i]), mode_index(circuit.output[j]));
  return out;
}

Operator4 effective_measurement_operator(const Circuit& circuit,
                                         std::span<const ModeRef> kept) {
  if (kept.empty()) throw InvalidInput("kept mode set is empty");
  for (const ModeRef& m : kept) {
    if (m.rail < 0 || m.rail >= circuit.rails) {
      throw InvalidInput("kept mode addresses rail " + std::to_string(m.rail) +
                         " outside the circuit");
    }
  }
  for (std::size_t i = 0; i < kept.size(); ++i)
    for (std::size_t j = i + 1; j < kept.size(); ++j)
      if (kept[i] == kept[j]) throw InvalidInput("kept mode set repeats a mode");
  MatrixX total = circuit_matrix(circuit);
  MatrixX v(static_cast<Eigen::Index>(kept.size()), 4);
  for (std::size_t i = 0; i < kept.size(); ++i)
    for (int j = 0; j < 4; ++j)
      v(static_cast<Eigen::Index>(i), j) =
          total(mode_index(kept[i]), mode_index(circuit.input[j]));
  return v.adjoint() * v;
}

Operator4 effective_measurement_operator(const Circuit& circuit) {
  return effective_measurement_operator(
      circuit, std::span<const ModeRef>(circuit.output.data(), circuit.output.size()));
}

// ---------------------------------------------------------------------------
// Setting tables
// ---------------------------------------------------------------------------

std::span<const std::string_view> plate_columns() { return kPlateColumns; }

bool SettingRow::has(std::string_view plate) const {
  return angles.find(std::string(plate)) != angles.end();
}

double SettingRow::angle(std::string_view plate) const {
  auto it = angles.find(std::string(plate));
  if (it == angles.end()) {
    throw InvalidInput("plate '" + std::string(plate) + "' is bypassed in row " +
                       measurement + "," + (outcome > 0 ? "+1" : "-1"));
  }
  return it->second;
}

const SettingRow* SettingTable::find(std::string_view measurement, int outcome) const {
  for (const SettingRow& row : rows) {
    if (row.measurement == measurement && row.outcome == outcome) return &row;
  }
  return nullptr;
}

SettingTable parse_setting_table(std::string_view csv) {
  std::vector<std::string_view> lines = split(csv, '\n');
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  if (lines.empty()) throw InvalidInput("empty setting table");

  std::string expected_header = "measurement,outcome";
  for (std::string_view plate : kPlateColumns) {
    expected_header += ',';
    expected_header += plate;
  }
  if (trim(lines[0]) != expected_header) {
    throw InvalidInput("setting table header does not list the expected plates");
  }

  SettingTable table;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    int row_index = static_cast<int>(i);
    std::string_view line = trim(lines[i]);
    if (line.empty()) continue;
    std::vector<std::string_view> fields = split(line, ',');
    if (fields.size() != kPlateColumns.size() + 2) {
      throw ParseError("expected " + std::to_string(kPlateColumns.size() + 2) +
                           " fields, found " + std::to_string(fields.size()),
                       row_index);
    }
    SettingRow row;
    row.measurement = std::string(trim(fields[0]));
    if (row.measurement.empty()) throw ParseError("empty measurement name", row_index);
    std::string_view outcome = trim(fields[1]);
    if (outcome == "+1") {
      row.outcome = +1;
    } else if (outcome == "-1") {
      row.outcome = -1;
    } else {
      throw ParseError("outcome must be +1 or -1, found '" + std::string(outcome) + "'",
                       row_index);
    }
    for (std::size_t c = 0; c < kPlateColumns.size(); ++c) {
      std::string_view cell = trim(fields[c + 2]);
      if (cell.empty()) continue;
      try {
        row.angles.emplace(std::string(kPlateColumns[c]), parse_angle(cell));
      } catch (const InvalidInput& err) {
        throw ParseError(err.what(), row_index);
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string serialize_setting_table(const SettingTable& table) {
  std::ostringstream out;
  out << "measurement,outcome";
  for (std::string_view plate : kPlateColumns) out << ',' << plate;
  out << "\n";
  for (const SettingRow& row : table.rows) {
    out << row.measurement << ',' << (row.outcome > 0 ? "+1" : "-1");
    for (std::string_view plate : kPlateColumns) {
      out << ',';
      auto it = row.angles.find(std::string(plate));
      if (it != row.angles.end()) out << format_angle(it->second);
    }
    out << "\n";
  }
  return out.str();
}

SettingTable load_setting_table(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open setting table '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_setting_table(buf.str());
}

void save_setting_table(const SettingTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot open '" + path + "' for writing");
  out << serialize_setting_table(table);
  if (!out) throw InvalidInput("failed writing '" + path + "'");
}

// ---------------------------------------------------------------------------
// Templates
// ---------------------------------------------------------------------------

const CircuitTemplate* TemplateSet::find(std::string_view name) const {
  for (const CircuitTemplate& t : templates) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

namespace {

ModeRef parse_mode(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2) {
    throw InvalidInput("mode binding must be [rail, \"H\"|\"V\"]");
  }
  ModeRef m;
  m.rail = j.at(0).get<int>();
  std::string pol = j.at(1).get<std::string>();
  if (pol == "H") {
    m.pol = Pol::H;
  } else if (pol == "V") {
    m.pol = Pol::V;
  } else {
    throw InvalidInput("polarization must be H or V, found '" + pol + "'");
  }
  return m;
}

Stage parse_stage(const nlohmann::json& j) {
  Stage stage;
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "HWP" || kind == "QWP") {
    stage.kind = kind == "HWP" ? StageKind::HWP : StageKind::QWP;
    stage.plate = j.at("plate").get<std::string>();
    stage.rails = j.at("rails").get<std::vector<int>>();
    stage.optional = j.value("optional", false);
  } else if (kind == "BD") {
    stage.kind = StageKind::BD;
    stage.shift = j.at("shift").get<int>();
  } else if (kind == "PBS") {
    stage.kind = StageKind::PBS;
    stage.rails = j.at("rails").get<std::vector<int>>();
    stage.dump_offset = j.at("dump_offset").get<int>();
  } else if (kind == "QC") {
    stage.kind = StageKind::QC;
    stage.rails = j.at("rails").get<std::vector<int>>();
  } else {
    throw InvalidInput("unknown stage kind '" + kind + "'");
  }
  return stage;
}

}  // namespace

TemplateSet parse_templates(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& err) {
    throw InvalidInput(std::string("malformed template file: ") + err.what());
  }
  try {
    TemplateSet set;
    for (const auto& jt : doc.at("templates")) {
      CircuitTemplate tmpl;
      tmpl.name = jt.at("name").get<std::string>();
      tmpl.skeleton.rails = jt.at("rails").get<int>();
      const auto& jin = jt.at("input");
      const auto& jout = jt.at("output");
      if (jin.size() != 4 || jout.size() != 4) {
        throw InvalidInput("templates need exactly four input and output bindings");
      }
      for (std::size_t i = 0; i < 4; ++i) {
        tmpl.skeleton.input[i] = parse_mode(jin.at(i));
        tmpl.skeleton.output[i] = parse_mode(jout.at(i));
      }
      for (const auto& js : jt.at("stages")) {
        tmpl.skeleton.stages.push_back(parse_stage(js));
      }
      set.templates.push_back(std::move(tmpl));
    }
    return set;
  } catch (const nlohmann::json::exception& err) {
    throw InvalidInput(std::string("unexpected template file shape: ") + err.what());
  }
}

TemplateSet load_templates(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open template file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_templates(buf.str());
}

std::string default_settings_path() {
  return std::string(PMLAB_DATA_DIR) + "/waveplate_settings.csv";
}

std::string default_templates_path() {
  return std::string(PMLAB_DATA_DIR) + "/measurement_templates.json";
}

std::string_view template_name_for(const SettingRow& row) {
  for (std::string_view plate : kSimplePlates) {
    if (row.has(plate)) return "simple";
  }
  return "four_bd";
}

Circuit instantiate(const CircuitTemplate& tmpl, const SettingRow& row) {
  Circuit circuit;
  circuit.rails = tmpl.skeleton.rails;
  circuit.input = tmpl.skeleton.input;
  circuit.output = tmpl.skeleton.output;
  std::size_t consumed = 0;
  for (const Stage& slot : tmpl.skeleton.stages) {
    if (slot.kind != StageKind::HWP && slot.kind != StageKind::QWP) {
      circuit.stages.push_back(slot);
      continue;
    }
    if (!row.has(slot.plate)) {
      if (slot.optional) continue;
      throw InvalidInput("row " + row.measurement + "," +
                         (row.outcome > 0 ? "+1" : "-1") + " bypasses plate '" +
                         slot.plate + "' required by template '" + tmpl.name + "'");
    }
    Stage stage = slot;
    stage.angle_deg = row.angle(slot.plate);
    circuit.stages.push_back(std::move(stage));
    ++consumed;
  }
  if (consumed != row.angles.size()) {
    throw InvalidInput("row " + row.measurement + "," +
                       (row.outcome > 0 ? "+1" : "-1") + " sets " +
                       std::to_string(row.angles.size() - consumed) +
                       " plate(s) that template '" + tmpl.name + "' never uses");
  }
  validate(circuit);
  return circuit;
}

SettingRow with_jitter(const SettingRow& row, double sigma_deg, std::mt19937_64& rng) {
  if (sigma_deg < 0.0) throw InvalidInput("jitter sigma must be nonnegative");
  if (sigma_deg == 0.0) return row;  // normal_distribution requires sigma > 0
  SettingRow out = row;
  std::normal_distribution<double> noise(0.0, sigma_deg);
  for (auto& [plate, angle] : out.angles) angle += noise(rng);
  return out;
}

// ---------------------------------------------------------------------------
// Verification
// ---------------------------------------------------------------------------

namespace {

Circuit row_circuit(const SettingRow& row, const TemplateSet& templates) {
  std::string_view name = template_name_for(row);
  const CircuitTemplate* tmpl = templates.find(name);
  if (tmpl == nullptr) {
    throw InvalidInput("template '" + std::string(name) + "' is not defined");
  }
  return instantiate(*tmpl, row);
}

}  // namespace

VerifyResult verify_setting(std::string_view measurement, int outcome,
                            const SettingTable& table, const TemplateSet& templates) {
  const SettingRow* row = table.find(measurement, outcome);
  if (row == nullptr) {
    throw InvalidInput("no table row for (" + std::string(measurement) + ", " +
                       (outcome > 0 ? "+1" : "-1") + ")");
  }
  pmsquare::ObservableId id = pmsquare::observable_from_string(measurement);
  Operator4 target = qcore::projector_pm(pmsquare::observable(id), outcome);
  Operator4 effective = effective_measurement_operator(row_circuit(*row, templates));
  VerifyResult result;
  result.measurement = std::string(measurement);
  result.outcome = outcome;
  result.metric = operator_norm(effective - target);
  result.pass = result.metric < kVerifyTol;
  return result;
}

std::vector<VerifyResult> verify_all(const SettingTable& table,
                                     const TemplateSet& templates) {
  std::vector<VerifyResult> results;
  results.reserve(table.rows.size());
  for (const SettingRow& row : table.rows) {
    results.push_back(verify_setting(row.measurement, row.outcome, table, templates));
  }
  return results;
}

pmsquare::JointDistribution8 chained_joint_distribution(
    const pmsquare::Context& ctx, const DensityMatrix& rho,
    const SettingTable& table, const TemplateSet& templates) {
  std::array<std::array<Eigen::Matrix4cd, 2>, 3> transfer;  // [position][sign index]
  for (int k = 0; k < 3; ++k) {
    std::string name = pmsquare::to_string(ctx.at(k + 1));
    for (int s : {+1, -1}) {
      const SettingRow* row = table.find(name, s);
      if (row == nullptr) {
        throw InvalidInput("no table row for (" + name + ", " +
                           (s > 0 ? "+1" : "-1") + ")");
      }
      transfer[static_cast<std::size_t>(k)][s == 1 ? 0 : 1] =
          logical_transfer(row_circuit(*row, templates));
    }
  }
  pmsquare::JointDistribution8 out;
  for (int s1 : {1, -1}) {
    Operator4 r1 = transfer[0][s1 == 1 ? 0 : 1] * rho.matrix() *
                   transfer[0][s1 == 1 ? 0 : 1].adjoint();
    for (int s2 : {1, -1}) {
      Operator4 r2 = transfer[1][s2 == 1 ? 0 : 1] * r1 *
                     transfer[1][s2 == 1 ? 0 : 1].adjoint();
      for (int s3 : {1, -1}) {
        Operator4 r3 = transfer[2][s3 == 1 ? 0 : 1] * r2 *
                       transfer[2][s3 == 1 ? 0 : 1].adjoint();
        double v = r3.trace().real();
        out.at(s1, s2, s3) = std::max(v, 0.0);
      }
    }
  }
  return out;
}

}  // namespace pmlab::optics
