#pragma once

// File formats: robot description JSON, path config JSON, trace CSV, and the
// metrics report as JSON plus an aligned text table.
//
// All floating-point output uses shortest round-trip decimals, so identical
// runs produce byte-identical files and parsing back reproduces the exact
// doubles.

#include <Eigen/Geometry>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "json.hpp"
#include "slithers/errors.hpp"
#include "slithers/kinematics.hpp"
#include "slithers/metrics.hpp"
#include "slithers/paths.hpp"
#include "slithers/simulator.hpp"

namespace slithers {

using nlohmann::json;

// Shortest decimal that round-trips to the same double.
inline std::string formatDouble(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

inline double parseDouble(const std::string& s) {
  double x = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  const auto res = std::from_chars(begin, end, x);
  if (res.ec != std::errc() || res.ptr != end) {
    throw ParseError("not a number: '" + s + "'");
  }
  return x;
}

namespace detail {

inline json loadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

template <typename T>
T require(const json& j, const std::string& key, const std::string& context) {
  if (!j.contains(key)) {
    throw ParseError(context + ": missing key '" + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(context + ": bad value for '" + key + "': " + e.what());
  }
}

inline Eigen::Vector3d toVector3(const std::vector<double>& v,
                                 const std::string& context) {
  if (v.size() != 3) throw ParseError(context + ": expected 3 numbers");
  return {v[0], v[1], v[2]};
}

}  // namespace detail

inline Pose poseFromJson(const json& j, const std::string& context) {
  const auto rot = detail::require<std::vector<double>>(j, "rotation", context);
  const auto trans =
      detail::require<std::vector<double>>(j, "translation", context);
  if (rot.size() != 9) {
    throw ParseError(context + ": rotation must be 9 numbers (row-major)");
  }
  Pose p;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) p.rotation(r, c) = rot[3 * r + c];
  }
  p.translation = detail::toVector3(trans, context + ".translation");
  return p;
}

inline json poseToJson(const Pose& p) {
  std::vector<double> rot(9);
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) rot[3 * r + c] = p.rotation(r, c);
  }
  return json{{"rotation", rot},
              {"translation", {p.translation.x(), p.translation.y(),
                               p.translation.z()}}};
}

// ---------------------------------------------------------------------------
// Robot description

inline RobotModel loadRobot(const std::string& path) {
  const json j = detail::loadJsonFile(path);
  RobotModel m;
  m.name = detail::require<std::string>(j, "name", path);

  const json jb = detail::require<json>(j, "base", path);
  const auto kind = detail::require<std::string>(jb, "kind", path + ".base");
  if (kind == "nonholonomic") {
    m.base.kind = BaseKind::nonholonomic;
  } else if (kind == "holonomic") {
    m.base.kind = BaseKind::holonomic;
  } else {
    throw ParseError(path + ": unknown base kind '" + kind + "'");
  }
  const json jl = detail::require<json>(jb, "limits", path + ".base");
  const auto channel_limit = [&](const char* key) {
    const auto v = detail::require<std::vector<double>>(jl, key,
                                                        path + ".base.limits");
    if (v.size() != 2) {
      throw ParseError(path + ": limit '" + std::string(key)
                       + "' must be [min, max]");
    }
    return std::make_pair(v[0], v[1]);
  };
  m.base.velocity_limits.clear();
  m.base.velocity_limits.push_back(channel_limit("v_x"));
  if (m.base.kind == BaseKind::holonomic) {
    m.base.velocity_limits.push_back(channel_limit("v_y"));
  }
  m.base.velocity_limits.push_back(channel_limit("omega_z"));

  for (const json& jj : detail::require<json>(j, "joints", path)) {
    JointModel joint;
    const auto jkind = detail::require<std::string>(jj, "kind", path + ".joints");
    if (jkind == "revolute") {
      joint.kind = JointKind::revolute;
    } else if (jkind == "prismatic") {
      joint.kind = JointKind::prismatic;
    } else {
      throw ParseError(path + ": unknown joint kind '" + jkind + "'");
    }
    joint.axis = detail::toVector3(
        detail::require<std::vector<double>>(jj, "axis", path + ".joints"),
        path + ".joints.axis");
    joint.point = detail::toVector3(
        detail::require<std::vector<double>>(jj, "point", path + ".joints"),
        path + ".joints.point");
    const auto lim =
        detail::require<std::vector<double>>(jj, "limits", path + ".joints");
    if (lim.size() != 2) {
      throw ParseError(path + ": joint limits must be [min, max]");
    }
    joint.min_value = lim[0];
    joint.max_value = lim[1];
    m.joints.push_back(joint);
  }

  m.home_pose = poseFromJson(detail::require<json>(j, "home_pose", path),
                             path + ".home_pose");

  if (j.contains("initial_joint_values")) {
    const auto q0 = j.at("initial_joint_values").get<std::vector<double>>();
    m.initial_joint_values =
        Eigen::Map<const Eigen::VectorXd>(q0.data(), q0.size());
  } else {
    m.initial_joint_values = Eigen::VectorXd::Zero(m.jointCount());
  }
  return m;
}

// One named invariant check for the validate command.
struct ValidationItem {
  std::string label;
  bool passed = false;
  std::string detail;
};

inline std::vector<ValidationItem> validateRobot(const RobotModel& m) {
  std::vector<ValidationItem> items;
  const auto add = [&](const std::string& label, bool ok,
                       const std::string& detail = "") {
    items.push_back({label, ok, detail});
  };

  for (int i = 0; i < m.jointCount(); ++i) {
    const auto& jm = m.joints[i];
    const std::string tag = "joint " + std::to_string(i + 1);
    add(tag + " axis is unit", std::abs(jm.axis.norm() - 1.0) <= kStructuralTol,
        "norm = " + formatDouble(jm.axis.norm()));
    add(tag + " limits ordered", jm.min_value < jm.max_value,
        "[" + formatDouble(jm.min_value) + ", " + formatDouble(jm.max_value) + "]");
  }
  for (std::size_t c = 0; c < m.base.velocity_limits.size(); ++c) {
    const auto [lo, hi] = m.base.velocity_limits[c];
    add("base channel " + std::to_string(c) + " limits bracket 0",
        lo < 0.0 && hi > 0.0 && lo < hi,
        "[" + formatDouble(lo) + ", " + formatDouble(hi) + "]");
  }
  add("base limit count matches kind",
      static_cast<int>(m.base.velocity_limits.size()) == m.base.channels());
  add("home pose orthonormal", isValidPose(m.home_pose),
      "det = " + formatDouble(m.home_pose.rotation.determinant()));
  add("initial joint values sized",
      m.initial_joint_values.size() == m.jointCount());
  bool inside = m.initial_joint_values.size() == m.jointCount();
  if (inside) {
    for (int i = 0; i < m.jointCount(); ++i) {
      inside = inside && m.initial_joint_values[i] >= m.joints[i].min_value
               && m.initial_joint_values[i] <= m.joints[i].max_value;
    }
  }
  add("initial joint values within limits", inside);
  return items;
}

// ---------------------------------------------------------------------------
// Path config

inline PathParams loadPathParams(const std::string& path) {
  const json j = detail::loadJsonFile(path);
  PathParams p;
  const auto kind = detail::require<std::string>(j, "kind", path);
  p.name = j.value("name", kind);
  p.dt = detail::require<double>(j, "dt", path);
  p.duration = detail::require<double>(j, "duration", path);
  if (j.contains("origin")) {
    p.origin = poseFromJson(j.at("origin"), path + ".origin");
  }
  if (kind == "vertical_helix") {
    p.kind = PathKind::vertical_helix;
    p.radius = detail::require<double>(j, "radius", path);
    p.turns = detail::require<double>(j, "turns", path);
    p.rise = detail::require<double>(j, "rise", path);
  } else if (kind == "sine_wave") {
    p.kind = PathKind::sine_wave;
    p.forward_speed = detail::require<double>(j, "forward_speed", path);
    p.amplitude = detail::require<double>(j, "amplitude", path);
    p.period = detail::require<double>(j, "period", path);
    p.height = detail::require<double>(j, "height", path);
  } else if (kind == "horizontal_helix") {
    p.kind = PathKind::horizontal_helix;
    p.forward_speed = detail::require<double>(j, "forward_speed", path);
    p.radius = detail::require<double>(j, "radius", path);
    p.height = detail::require<double>(j, "height", path);
    p.turns = detail::require<double>(j, "turns", path);
  } else if (kind == "waypoints") {
    p.kind = PathKind::waypoints;
    for (const json& jw : detail::require<json>(j, "samples", path)) {
      p.waypoint_poses.push_back(poseFromJson(jw, path + ".samples"));
    }
  } else {
    throw ParseError(path + ": unknown path kind '" + kind + "'");
  }
  const auto positive = [&](double v, const char* what) {
    if (!(v > 0.0)) {
      throw ParseError(path + ": " + what + " must be positive");
    }
  };
  positive(p.dt, "dt");
  positive(p.duration, "duration");
  if (p.kind == PathKind::vertical_helix) positive(p.radius, "radius");
  if (p.kind == PathKind::horizontal_helix) positive(p.radius, "radius");
  if (p.kind == PathKind::sine_wave) positive(p.amplitude, "amplitude");
  return p;
}

// ---------------------------------------------------------------------------
// Trace CSV

inline std::string traceCsvHeader(int input_dimension) {
  std::string h = "step,time";
  for (int i = 0; i < input_dimension; ++i) {
    h += ",u_" + std::to_string(i);
  }
  h += ",base_x,base_y,base_yaw,ee_x,ee_y,ee_z,ee_qw,ee_qx,ee_qy,ee_qz,"
       "pos_err,rot_err,cost,iters,solve_time,converged";
  return h;
}

// End-effector orientation as a unit quaternion (w, x, y, z), sign-canonical.
inline Eigen::Vector4d quaternionWxyz(const Eigen::Matrix3d& r) {
  Eigen::Quaterniond q(r);
  q.normalize();
  Eigen::Vector4d wxyz{q.w(), q.x(), q.y(), q.z()};
  for (int i = 0; i < 4; ++i) {
    if (wxyz[i] != 0.0) {
      if (wxyz[i] < 0.0) wxyz = -wxyz;
      break;
    }
  }
  return wxyz;
}

inline void writeTraceCsv(std::ostream& out,
                          const std::vector<TraceRecord>& trace) {
  if (trace.empty()) throw DimensionError("writeTraceCsv: empty trace");
  const int dim = trace.front().input.dimension();
  out << traceCsvHeader(dim) << "\n";
  for (const auto& rec : trace) {
    out << rec.step << ',' << formatDouble(rec.time);
    const Eigen::VectorXd u = rec.input.stacked();
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      out << ',' << formatDouble(u[i]);
    }
    const double yaw = std::atan2(rec.base_pose.rotation(1, 0),
                                  rec.base_pose.rotation(0, 0));
    out << ',' << formatDouble(rec.base_pose.translation.x()) << ','
        << formatDouble(rec.base_pose.translation.y()) << ','
        << formatDouble(yaw);
    const Eigen::Vector4d q = quaternionWxyz(rec.ee_pose.rotation);
    out << ',' << formatDouble(rec.ee_pose.translation.x()) << ','
        << formatDouble(rec.ee_pose.translation.y()) << ','
        << formatDouble(rec.ee_pose.translation.z()) << ','
        << formatDouble(q[0]) << ',' << formatDouble(q[1]) << ','
        << formatDouble(q[2]) << ',' << formatDouble(q[3]);
    out << ',' << formatDouble(rec.position_error) << ','
        << formatDouble(rec.rotation_error) << ',' << formatDouble(rec.cost)
        << ',' << rec.iterations << ',' << formatDouble(rec.solve_time) << ','
        << (rec.converged ? 1 : 0) << "\n";
  }
}

struct ParsedTrace {
  std::vector<TraceRecord> records;
  int input_dimension = 0;
  int base_channels = 0;
};

// Reads a trace back. The CSV does not store the base/joint split, so the
// caller may pass it; the default infers 3 base channels for 9+ inputs
// (holonomic) and 2 otherwise, which covers the bundled models.
inline ParsedTrace readTraceCsv(std::istream& in,
                                std::optional<int> base_channels = {}) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("trace: empty file");
  // Count u_ columns to recover the input dimension.
  int dim = 0;
  {
    std::stringstream header(line);
    std::string col;
    std::vector<std::string> cols;
    while (std::getline(header, col, ',')) cols.push_back(col);
    while (dim < static_cast<int>(cols.size())
           && cols.size() > static_cast<std::size_t>(dim + 2)
           && cols[dim + 2] == "u_" + std::to_string(dim)) {
      ++dim;
    }
    if (dim == 0 || line != traceCsvHeader(dim)) {
      throw ParseError("trace: header does not match the documented schema");
    }
  }
  ParsedTrace parsed;
  parsed.input_dimension = dim;
  parsed.base_channels = base_channels.value_or(dim >= 9 ? 3 : 2);
  if (parsed.base_channels < 2 || parsed.base_channels >= dim) {
    throw ParseError("trace: base channel count "
                     + std::to_string(parsed.base_channels)
                     + " does not fit " + std::to_string(dim) + " inputs");
  }

  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream row(line);
    std::vector<std::string> f;
    std::string cell;
    while (std::getline(row, cell, ',')) f.push_back(cell);
    const std::size_t expected = 2 + dim + 3 + 7 + 2 + 1 + 1 + 1 + 1;
    if (f.size() != expected) {
      throw ParseError("trace line " + std::to_string(line_no) + ": expected "
                       + std::to_string(expected) + " fields, got "
                       + std::to_string(f.size()));
    }
    TraceRecord rec;
    std::size_t i = 0;
    rec.step = static_cast<int>(parseDouble(f[i++]));
    rec.time = parseDouble(f[i++]);
    Eigen::VectorXd u(dim);
    for (int c = 0; c < dim; ++c) u[c] = parseDouble(f[i++]);
    rec.input = InputVector::fromStacked(u, parsed.base_channels);
    const double bx = parseDouble(f[i++]);
    const double by = parseDouble(f[i++]);
    const double yaw = parseDouble(f[i++]);
    rec.base_pose =
        Pose{expSo3(Eigen::Vector3d(0, 0, yaw)), Eigen::Vector3d(bx, by, 0)};
    const double ex = parseDouble(f[i++]);
    const double ey = parseDouble(f[i++]);
    const double ez = parseDouble(f[i++]);
    const double qw = parseDouble(f[i++]);
    const double qx = parseDouble(f[i++]);
    const double qy = parseDouble(f[i++]);
    const double qz = parseDouble(f[i++]);
    rec.ee_pose = Pose{Eigen::Quaterniond(qw, qx, qy, qz).toRotationMatrix(),
                       Eigen::Vector3d(ex, ey, ez)};
    rec.position_error = parseDouble(f[i++]);
    rec.rotation_error = parseDouble(f[i++]);
    rec.cost = parseDouble(f[i++]);
    rec.iterations = static_cast<int>(parseDouble(f[i++]));
    rec.solve_time = parseDouble(f[i++]);
    rec.converged = parseDouble(f[i++]) != 0.0;
    // desired_pose is not part of the schema; errors carry the comparison.
    parsed.records.push_back(rec);
  }
  if (parsed.records.empty()) throw ParseError("trace: no data rows");
  return parsed;
}

// ---------------------------------------------------------------------------
// Metrics report

inline json reportToJson(const MetricsReport& r) {
  json j;
  j["steps"] = r.steps;
  j["base_channels"] = r.base_channels;
  j["joint_count"] = r.joint_count;
  j["holonomic"] = r.holonomic;
  j["differenced_base"] = r.differenced_base;
  j["dt"] = r.dt;
  j["position_rmse"] = r.position_rmse;
  j["rotation_rmse"] = r.rotation_rmse;
  j["mean_solve_time"] = r.mean_solve_time;
  const auto put = [&](const char* key, const std::optional<double>& v) {
    if (v) j[key] = *v;
  };
  put("max_forward_velocity", r.max_forward_velocity);
  put("max_translation_velocity", r.max_translation_velocity);
  put("max_angular_velocity", r.max_angular_velocity);
  put("max_forward_acceleration", r.max_forward_acceleration);
  put("max_translation_acceleration", r.max_translation_acceleration);
  put("max_angular_acceleration", r.max_angular_acceleration);
  put("max_forward_jerk", r.max_forward_jerk);
  put("max_translation_jerk", r.max_translation_jerk);
  put("max_angular_jerk", r.max_angular_jerk);
  put("max_joint_velocity", r.max_joint_velocity);
  put("max_joint_acceleration", r.max_joint_acceleration);
  put("max_joint_jerk", r.max_joint_jerk);
  return j;
}

inline MetricsReport reportFromJson(const json& j) {
  MetricsReport r;
  r.steps = j.at("steps").get<int>();
  r.base_channels = j.at("base_channels").get<int>();
  r.joint_count = j.at("joint_count").get<int>();
  r.holonomic = j.at("holonomic").get<bool>();
  r.differenced_base = j.at("differenced_base").get<bool>();
  r.dt = j.at("dt").get<double>();
  r.position_rmse = j.at("position_rmse").get<double>();
  r.rotation_rmse = j.at("rotation_rmse").get<double>();
  r.mean_solve_time = j.at("mean_solve_time").get<double>();
  const auto get = [&](const char* key) -> std::optional<double> {
    if (j.contains(key)) return j.at(key).get<double>();
    return std::nullopt;
  };
  r.max_forward_velocity = get("max_forward_velocity");
  r.max_translation_velocity = get("max_translation_velocity");
  r.max_angular_velocity = get("max_angular_velocity");
  r.max_forward_acceleration = get("max_forward_acceleration");
  r.max_translation_acceleration = get("max_translation_acceleration");
  r.max_angular_acceleration = get("max_angular_acceleration");
  r.max_forward_jerk = get("max_forward_jerk");
  r.max_translation_jerk = get("max_translation_jerk");
  r.max_angular_jerk = get("max_angular_jerk");
  r.max_joint_velocity = get("max_joint_velocity");
  r.max_joint_acceleration = get("max_joint_acceleration");
  r.max_joint_jerk = get("max_joint_jerk");
  return r;
}

// Aligned text table with one row per metric. Base velocities are commanded
// values unless the report was built with the differenced flag.
inline std::string renderReportText(const MetricsReport& r) {
  std::ostringstream out;
  const auto fixed4 = [](const std::optional<double>& v) -> std::string {
    if (!v) return "-";
    std::ostringstream s;
    s << std::fixed << std::setprecision(4) << *v;
    return s.str();
  };
  const auto row = [&](const std::string& label, const std::string& value) {
    out << std::left << std::setw(38) << label << value << "\n";
  };
  row("Metric", "Value");
  row("Position RMSE (m)", fixed4(r.position_rmse));
  row("Rotation RMSE (rad)", fixed4(r.rotation_rmse));
  row("Computation Time (s)", fixed4(r.mean_solve_time));
  row("Max Forward Velocity (m/s)", fixed4(r.max_forward_velocity));
  row("Max Translation Velocity (m/s)", fixed4(r.max_translation_velocity));
  row("Max Angular Velocity (rad/s)", fixed4(r.max_angular_velocity));
  row("Max Forward Acceleration (m/s^2)", fixed4(r.max_forward_acceleration));
  row("Max Translation Acceleration (m/s^2)",
      fixed4(r.max_translation_acceleration));
  row("Max Angular Acceleration (rad/s^2)", fixed4(r.max_angular_acceleration));
  row("Max Forward Jerk (m/s^3)", fixed4(r.max_forward_jerk));
  row("Max Translation Jerk (m/s^3)", fixed4(r.max_translation_jerk));
  row("Max Angular Jerk (rad/s^3)", fixed4(r.max_angular_jerk));
  row("Max Joint Velocity (rad/s)", fixed4(r.max_joint_velocity));
  row("Max Joint Acceleration (rad/s^2)", fixed4(r.max_joint_acceleration));
  row("Max Joint Jerk (rad/s^3)", fixed4(r.max_joint_jerk));
  return out.str();
}

}  // namespace slithers
