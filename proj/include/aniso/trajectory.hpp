#pragma once

#include <string>
#include <vector>

#include "aniso/io.hpp"
#include "aniso/network.hpp"

namespace aniso {

/// Time-stamped sequence of states: dense for ODE output, piecewise constant
/// for SSA output (state i holds on [times[i], times[i+1])). The optional flux
/// record carries the cumulative net flux w(t) per forward reaction pair.
struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
  std::vector<Vector> fluxes;

  bool has_fluxes() const { return !fluxes.empty(); }

  /// State at time t for piecewise-constant trajectories (last node <= t).
  const State& at(double t) const {
    std::size_t lo = 0, hi = times.size();
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      if (times[mid] <= t)
        lo = mid;
      else
        hi = mid;
    }
    return states[lo];
  }
};

/// CSV emission: header `t,<species...>,theta[,w_<r>...]`, %.12g, LF endings.
inline std::string trajectory_csv(const Network& net, const Trajectory& traj) {
  std::string out = "t";
  for (const auto& s : net.species()) out += "," + s.name;
  out += ",theta";
  if (traj.has_fluxes())
    for (Eigen::Index p = 0; p < net.n_pairs(); ++p) out += ",w_" + std::to_string(p);
  out += "\n";
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    out += io::format_double(traj.times[i]);
    for (Eigen::Index x = 0; x < net.n_species(); ++x)
      out += "," + io::format_double(traj.states[i].rho(x));
    out += "," + io::format_double(traj.states[i].theta);
    if (traj.has_fluxes())
      for (Eigen::Index p = 0; p < net.n_pairs(); ++p)
        out += "," + io::format_double(traj.fluxes[i](p));
    out += "\n";
  }
  return out;
}

/// Parse a trajectory CSV produced by trajectory_csv (the `ldp` CLI input).
inline Trajectory trajectory_from_csv(const Network& net, const std::string& csv) {
  Trajectory traj;
  std::size_t pos = 0;
  auto next_line = [&](std::string& line) {
    if (pos >= csv.size()) return false;
    const std::size_t nl = csv.find('\n', pos);
    line = csv.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
    pos = nl == std::string::npos ? csv.size() : nl + 1;
    return true;
  };
  std::string line;
  if (!next_line(line)) throw semantic_error("trajectory CSV is empty");
  const Eigen::Index X = net.n_species();
  std::size_t n_cols = 1;
  for (char c : line)
    if (c == ',') ++n_cols;
  const bool with_fluxes = n_cols > static_cast<std::size_t>(X) + 2;
  if (n_cols < static_cast<std::size_t>(X) + 2)
    throw semantic_error("trajectory CSV has too few columns for this network");

  while (next_line(line)) {
    if (line.empty()) continue;
    std::vector<double> vals;
    std::size_t start = 0;
    while (start <= line.size()) {
      std::size_t comma = line.find(',', start);
      if (comma == std::string::npos) comma = line.size();
      vals.push_back(std::stod(line.substr(start, comma - start)));
      start = comma + 1;
    }
    if (vals.size() != n_cols) throw semantic_error("trajectory CSV has ragged rows");
    traj.times.push_back(vals[0]);
    State s;
    s.rho.resize(X);
    for (Eigen::Index x = 0; x < X; ++x) s.rho(x) = vals[1 + x];
    s.theta = vals[1 + X];
    traj.states.push_back(std::move(s));
    if (with_fluxes) {
      Vector w(net.n_pairs());
      for (Eigen::Index p = 0; p < net.n_pairs(); ++p) w(p) = vals[2 + X + p];
      traj.fluxes.push_back(std::move(w));
    }
  }
  return traj;
}

}  // namespace aniso
