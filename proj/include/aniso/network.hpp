#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "aniso/errors.hpp"
#include "aniso/linalg.hpp"
#include "aniso/simplex.hpp"

namespace aniso {

/// A chemical species with its energy level per particle.
struct Species {
  std::string name;
  double energy = 0.0;
  bool operator==(const Species&) const = default;
};

/// A complex: multiset of species given as stoichiometric coefficients.
/// Species absent from the map have coefficient 0.
struct Complex {
  std::map<std::string, int> counts;

  int count(const std::string& name) const {
    auto it = counts.find(name);
    return it == counts.end() ? 0 : it->second;
  }
  bool operator==(const Complex& other) const {
    // Zero entries are equivalent to absent entries.
    for (const auto& [k, v] : counts)
      if (v != other.count(k)) return false;
    for (const auto& [k, v] : other.counts)
      if (v != count(k)) return false;
    return true;
  }
};

/// A reversible reaction pair reactants <-> products. kappa_bw = 0 marks an
/// irreversible reaction; both directions share one transition energy.
struct ReactionPair {
  Complex reactants;
  Complex products;
  double kappa_fw = 0.0;
  double kappa_bw = 0.0;
  double transition_energy = 0.0;
  bool operator==(const ReactionPair&) const = default;
};

/// One directed reaction: a pair index plus the direction flag.
struct Direction {
  Eigen::Index pair = 0;
  bool backward = false;
};
inline constexpr Direction fwd(Eigen::Index pair) { return {pair, false}; }
inline constexpr Direction rev(Eigen::Index pair) { return {pair, true}; }
inline constexpr Direction opposite(Direction d) { return {d.pair, !d.backward}; }

/// Concentrations plus solute temperature.
struct State {
  Vector rho;
  double theta = 0.0;
};

/// Stoichiometric matrix: column r equals products - reactants of pair r.
struct StoichMatrix {
  Eigen::MatrixXi columns;  // integer, one column per forward reaction
  Matrix as_double;

  Eigen::Index n_species() const { return columns.rows(); }
  Eigen::Index n_pairs() const { return columns.cols(); }
};

/// Validated anisothermal reaction network. Immutable after construction and
/// safe to share across threads; all derived data (species index, directed
/// complexes, stoichiometric columns, energy barriers) is precomputed here.
class Network {
 public:
  Network(std::vector<Species> species, std::vector<ReactionPair> reactions, double heat_capacity,
          double arrhenius_exponent, double boltzmann_constant = 1.0)
      : species_(std::move(species)),
        reactions_(std::move(reactions)),
        heat_capacity_(heat_capacity),
        arrhenius_exponent_(arrhenius_exponent),
        boltzmann_constant_(boltzmann_constant) {
    validate_and_index();
  }

  const std::vector<Species>& species() const { return species_; }
  const std::vector<ReactionPair>& reactions() const { return reactions_; }
  double heat_capacity() const { return heat_capacity_; }
  double arrhenius_exponent() const { return arrhenius_exponent_; }
  double boltzmann_constant() const { return boltzmann_constant_; }

  Eigen::Index n_species() const { return static_cast<Eigen::Index>(species_.size()); }
  Eigen::Index n_pairs() const { return static_cast<Eigen::Index>(reactions_.size()); }
  Eigen::Index n_directions() const { return 2 * n_pairs(); }

  Eigen::Index species_index(const std::string& name) const {
    auto it = species_index_.find(name);
    if (it == species_index_.end()) throw semantic_error("unknown species '" + name + "'");
    return it->second;
  }

  /// Energy levels e as a vector indexed like concentrations.
  const Vector& energies() const { return energies_; }

  /// Reactant complex alpha of a directed reaction.
  const Eigen::VectorXi& alpha(Direction d) const { return alpha_[flat(d)]; }
  /// Chemical energy e . alpha of the reactant complex.
  double alpha_energy(Direction d) const { return alpha_energy_[flat(d)]; }
  /// |alpha|_1 of the reactant complex.
  int alpha_l1(Direction d) const { return alpha_l1_[flat(d)]; }
  /// Activation energy a_r - e . alpha of the directed reaction.
  double barrier(Direction d) const { return barrier_[flat(d)]; }
  /// Rate constant of the directed reaction.
  double kappa(Direction d) const {
    return d.backward ? reactions_[d.pair].kappa_bw : reactions_[d.pair].kappa_fw;
  }
  double transition_energy(Eigen::Index pair) const { return reactions_[pair].transition_energy; }

  /// Integer stoichiometric column of pair r (products - reactants).
  const Eigen::VectorXi& gamma_pair(Eigen::Index pair) const { return gamma_int_[pair]; }
  /// Signed stoichiometric vector of a directed reaction, as doubles.
  Vector gamma(Direction d) const {
    Vector g = gamma_int_[d.pair].cast<double>();
    return d.backward ? Vector(-g) : g;
  }
  /// Heat released into the solute by one unit of the directed reaction.
  double gamma_energy(Direction d) const {
    return d.backward ? -gamma_energy_[d.pair] : gamma_energy_[d.pair];
  }
  /// Stoichiometric matrix as doubles, one column per pair.
  const Matrix& gamma_matrix() const { return gamma_dbl_; }

  bool reversible() const { return reversible_; }
  void require_reversible(const char* op) const {
    if (!reversible_)
      throw irreversible_network_error(std::string(op) +
                                       ": network has an irreversible reaction (kappa_bw = 0)");
  }

  /// Validation warnings (e.g. negative activation energies); never fatal.
  const std::vector<std::string>& warnings() const { return warnings_; }

  bool operator==(const Network& other) const {
    return species_ == other.species_ && reactions_ == other.reactions_ &&
           heat_capacity_ == other.heat_capacity_ &&
           arrhenius_exponent_ == other.arrhenius_exponent_ &&
           boltzmann_constant_ == other.boltzmann_constant_;
  }

 private:
  Eigen::Index flat(Direction d) const { return d.pair + (d.backward ? n_pairs() : 0); }

  Eigen::VectorXi complex_vector(const Complex& c) const {
    Eigen::VectorXi v = Eigen::VectorXi::Zero(n_species());
    for (const auto& [name, count] : c.counts) {
      if (count < 0) throw semantic_error("negative stoichiometric coefficient for '" + name + "'");
      v(species_index(name)) += count;
    }
    return v;
  }

  void validate_and_index() {
    if (heat_capacity_ <= 0.0) throw semantic_error("heat_capacity must be positive");
    if (!(arrhenius_exponent_ > -1.0 && arrhenius_exponent_ <= 1.0))
      throw semantic_error("arrhenius_exponent out of range (-1, 1]");
    if (boltzmann_constant_ <= 0.0) throw semantic_error("boltzmann_constant must be positive");

    for (std::size_t i = 0; i < species_.size(); ++i) {
      const auto& s = species_[i];
      if (s.name.empty()) throw semantic_error("species name must be non-empty");
      if (!(s.energy >= 0.0)) throw semantic_error("species energy must be >= 0");
      if (!species_index_.emplace(s.name, static_cast<Eigen::Index>(i)).second)
        throw semantic_error("duplicate species '" + s.name + "'");
    }

    energies_.resize(n_species());
    for (Eigen::Index i = 0; i < n_species(); ++i) energies_(i) = species_[i].energy;

    reversible_ = true;
    const Eigen::Index P = n_pairs();
    alpha_.resize(2 * P);
    alpha_energy_.resize(2 * P);
    alpha_l1_.resize(2 * P);
    barrier_.resize(2 * P);
    gamma_int_.resize(P);
    gamma_energy_.resize(P);
    gamma_dbl_.resize(n_species(), P);

    for (Eigen::Index p = 0; p < P; ++p) {
      const auto& r = reactions_[p];
      if (!(r.kappa_fw > 0.0)) throw semantic_error("kappa_fw must be positive");
      if (!(r.kappa_bw >= 0.0)) throw semantic_error("kappa_bw must be >= 0");
      if (r.kappa_bw == 0.0) reversible_ = false;

      alpha_[p] = complex_vector(r.reactants);
      alpha_[p + P] = complex_vector(r.products);
      gamma_int_[p] = alpha_[p + P] - alpha_[p];
      gamma_dbl_.col(p) = gamma_int_[p].cast<double>();
      gamma_energy_[p] = energies_.dot(gamma_dbl_.col(p));
      for (Eigen::Index d : {p, p + P}) {
        alpha_energy_[d] = energies_.dot(alpha_[d].cast<double>());
        alpha_l1_[d] = alpha_[d].sum();
        barrier_[d] = r.transition_energy - alpha_energy_[d];
      }
      const double top = std::max(alpha_energy_[p], alpha_energy_[p + P]);
      if (r.transition_energy < top)
        warnings_.push_back("reaction " + std::to_string(p) +
                            ": transition energy below a complex energy (negative activation "
                            "energy)");
    }
  }

  std::vector<Species> species_;
  std::vector<ReactionPair> reactions_;
  double heat_capacity_;
  double arrhenius_exponent_;
  double boltzmann_constant_;

  std::unordered_map<std::string, Eigen::Index> species_index_;
  Vector energies_;
  std::vector<Eigen::VectorXi> alpha_;
  std::vector<double> alpha_energy_;
  std::vector<int> alpha_l1_;
  std::vector<double> barrier_;
  std::vector<Eigen::VectorXi> gamma_int_;
  std::vector<double> gamma_energy_;
  Matrix gamma_dbl_;
  bool reversible_ = true;
  std::vector<std::string> warnings_;
};

inline StoichMatrix stoichiometric_matrix(const Network& net) {
  StoichMatrix sm;
  sm.columns.resize(net.n_species(), net.n_pairs());
  for (Eigen::Index p = 0; p < net.n_pairs(); ++p) sm.columns.col(p) = net.gamma_pair(p);
  sm.as_double = sm.columns.cast<double>();
  return sm;
}

/// Total energy e . rho + c_H theta, conserved by both dynamics.
inline double total_energy(const Network& net, const State& s) {
  return net.energies().dot(s.rho) + net.heat_capacity() * s.theta;
}

/// Temperature pinned by energy conservation: (E0 - e . rho) / c_H.
inline double temperature_from_energy(const Network& net, const Vector& rho, double E0) {
  const double theta = (E0 - net.energies().dot(rho)) / net.heat_capacity();
  if (theta < 0.0)
    throw negative_temperature_error("temperature_from_energy: e . rho exceeds total energy");
  return theta;
}

/// Membership of rho in the attainable set of (rho0, theta0): rho0 + Ran(Gamma)
/// intersected with {rho >= 0, theta >= 0}, decided by least squares.
inline bool attainable_set_membership(const Network& net, const Vector& rho0, double theta0,
                                      const Vector& rho, double tol = 1e-9) {
  if ((rho.array() < -tol).any()) return false;
  const double E0 = net.energies().dot(rho0) + net.heat_capacity() * theta0;
  const double theta = (E0 - net.energies().dot(rho)) / net.heat_capacity();
  if (theta < -tol) return false;
  return linalg::range_distance(net.gamma_matrix(), rho - rho0) <= tol;
}

namespace detail {

/// Maximize c . (Gamma w) over the attainable set, w free (split into w+ - w-).
/// Returns the optimum of c . rho; throws if the LP is unbounded.
inline double maximize_over_attainable(const Network& net, const Vector& rho0, double E0,
                                       const Vector& c) {
  const Eigen::Index X = net.n_species();
  const Eigen::Index R = net.n_pairs();
  const Matrix& G = net.gamma_matrix();
  Matrix A(X + 1, 2 * R);
  A.block(0, 0, X, R) = -G;
  A.block(0, R, X, R) = G;
  A.row(X).head(R) = net.energies().transpose() * G;
  A.row(X).tail(R) = -A.row(X).head(R);
  Vector b(X + 1);
  b.head(X) = rho0;
  b(X) = E0 - net.energies().dot(rho0);
  Vector obj(2 * R);
  obj.head(R) = G.transpose() * c;
  obj.tail(R) = -obj.head(R);
  auto res = SimplexSolver::maximize(A, b, obj);
  if (res.unbounded)
    throw unbounded_simplex_error("attainable set is unbounded (LP has no finite optimum)");
  return c.dot(rho0) + res.objective;
}

}  // namespace detail

/// Minimal and maximal attainable temperatures over the attainable set,
/// computed by two small dense LPs after a boundedness check.
inline std::pair<double, double> temperature_bounds(const Network& net, const Vector& rho0,
                                                    double theta0) {
  const double E0 = net.energies().dot(rho0) + net.heat_capacity() * theta0;
  // Boundedness of the attainable set == boundedness of total mass on it.
  detail::maximize_over_attainable(net, rho0, E0, Vector::Ones(net.n_species()));
  const double emax = detail::maximize_over_attainable(net, rho0, E0, net.energies());
  const double emin = -detail::maximize_over_attainable(net, rho0, E0, Vector(-net.energies()));
  double theta_minus = (E0 - emax) / net.heat_capacity();
  double theta_plus = (E0 - emin) / net.heat_capacity();
  if (theta_minus < 0.0 && theta_minus > -1e-12) theta_minus = 0.0;
  return {theta_minus, theta_plus};
}

// --- Network document format (JSON) ---

namespace detail {

inline void check_keys(const nlohmann::json& obj, std::initializer_list<const char*> allowed,
                       const char* where) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (std::find_if(allowed.begin(), allowed.end(),
                     [&](const char* a) { return key == a; }) == allowed.end())
      throw semantic_error(std::string("unknown key '") + key + "' in " + where);
  }
}

inline double require_number(const nlohmann::json& obj, const char* key, const char* where) {
  if (!obj.contains(key))
    throw semantic_error(std::string("missing key '") + key + "' in " + where);
  if (!obj[key].is_number())
    throw semantic_error(std::string("key '") + key + "' in " + where + " must be a number");
  return obj[key].get<double>();
}

inline Complex parse_complex(const nlohmann::json& obj, const char* where) {
  if (!obj.is_object()) throw semantic_error(std::string(where) + " must be an object");
  Complex c;
  for (const auto& [name, count] : obj.items()) {
    if (!count.is_number_integer() || count.get<long long>() < 0)
      throw semantic_error(std::string("coefficient of '") + name + "' in " + where +
                           " must be a non-negative integer");
    c.counts[name] = count.get<int>();
  }
  return c;
}

}  // namespace detail

/// Parse a UTF-8 JSON network document. Syntax errors carry line/column;
/// semantic errors name the violated invariant.
inline Network parse_network(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1, col = 1;
    const std::size_t stop = std::min(e.byte, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw parse_error(e.what(), line, col);
  }

  if (!doc.is_object()) throw semantic_error("network document must be a JSON object");
  detail::check_keys(
      doc, {"species", "reactions", "heat_capacity", "arrhenius_exponent", "boltzmann_constant"},
      "network document");
  if (!doc.contains("species") || !doc["species"].is_array())
    throw semantic_error("network document needs a 'species' array");
  if (!doc.contains("reactions") || !doc["reactions"].is_array())
    throw semantic_error("network document needs a 'reactions' array");

  std::vector<Species> species;
  for (const auto& s : doc["species"]) {
    detail::check_keys(s, {"name", "energy"}, "species entry");
    if (!s.contains("name") || !s["name"].is_string())
      throw semantic_error("species entry needs a string 'name'");
    species.push_back({s["name"].get<std::string>(),
                       detail::require_number(s, "energy", "species entry")});
  }

  std::vector<ReactionPair> reactions;
  for (const auto& r : doc["reactions"]) {
    detail::check_keys(r, {"reactants", "products", "kappa_fw", "kappa_bw", "transition_energy"},
                       "reaction entry");
    if (!r.contains("reactants") || !r.contains("products"))
      throw semantic_error("reaction entry needs 'reactants' and 'products'");
    ReactionPair pair;
    pair.reactants = detail::parse_complex(r["reactants"], "reactants");
    pair.products = detail::parse_complex(r["products"], "products");
    pair.kappa_fw = detail::require_number(r, "kappa_fw", "reaction entry");
    pair.kappa_bw = detail::require_number(r, "kappa_bw", "reaction entry");
    pair.transition_energy = detail::require_number(r, "transition_energy", "reaction entry");
    reactions.push_back(std::move(pair));
  }

  const double c_H = detail::require_number(doc, "heat_capacity", "network document");
  const double q = detail::require_number(doc, "arrhenius_exponent", "network document");
  double k_B = 1.0;
  if (doc.contains("boltzmann_constant"))
    k_B = detail::require_number(doc, "boltzmann_constant", "network document");

  return Network(std::move(species), std::move(reactions), c_H, q, k_B);
}

/// Serialize in the documented key order, species and reactions in declaration
/// order, complexes keyed in species declaration order. parse(serialize(n)) == n.
inline std::string serialize_network(const Network& net) {
  nlohmann::ordered_json doc;
  doc["species"] = nlohmann::ordered_json::array();
  for (const auto& s : net.species())
    doc["species"].push_back({{"name", s.name}, {"energy", s.energy}});
  doc["reactions"] = nlohmann::ordered_json::array();
  for (const auto& r : net.reactions()) {
    nlohmann::ordered_json entry;
    auto emit_complex = [&](const Complex& c) {
      nlohmann::ordered_json obj = nlohmann::ordered_json::object();
      for (const auto& s : net.species())
        if (c.count(s.name) != 0) obj[s.name] = c.count(s.name);
      return obj;
    };
    entry["reactants"] = emit_complex(r.reactants);
    entry["products"] = emit_complex(r.products);
    entry["kappa_fw"] = r.kappa_fw;
    entry["kappa_bw"] = r.kappa_bw;
    entry["transition_energy"] = r.transition_energy;
    doc["reactions"].push_back(std::move(entry));
  }
  doc["heat_capacity"] = net.heat_capacity();
  doc["arrhenius_exponent"] = net.arrhenius_exponent();
  doc["boltzmann_constant"] = net.boltzmann_constant();
  return doc.dump(2) + "\n";
}

}  // namespace aniso
