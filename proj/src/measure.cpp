#include "isogap/measure.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "isogap/errors.hpp"

namespace isogap {

namespace {

std::array<double, 12> atom_key(const Isometry& g) {
  std::array<double, 12> k{};
  int idx = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) k[idx++] = g.rotation()(i, j);
  for (int i = 0; i < 3; ++i) k[idx++] = g.translation()(i);
  return k;
}

bool key_less(const std::array<double, 12>& a, const std::array<double, 12>& b) {
  for (int i = 0; i < 12; ++i) {
    if (a[i] < b[i]) return true;
    if (a[i] > b[i]) return false;
  }
  return false;
}

}  // namespace

AtomicMeasure AtomicMeasure::from_atoms(std::vector<Atom> atoms, std::string label) {
  if (atoms.empty()) throw UsageError("empty-measure", "measure needs at least one atom");
  double total = 0.0;
  for (const Atom& a : atoms) {
    if (!(a.weight > 0.0)) {
      throw UsageError("bad-weight", "atom weights must be positive");
    }
    total += a.weight;
  }
  for (Atom& a : atoms) a.weight /= total;

  // Canonical order, then merge near-duplicates.  Distinct group elements
  // in practice sit far apart relative to the merge tolerance, so sorting
  // followed by a clustering sweep is reliable and deterministic.
  std::sort(atoms.begin(), atoms.end(), [](const Atom& x, const Atom& y) {
    return key_less(atom_key(x.g), atom_key(y.g));
  });
  std::vector<Atom> merged;
  merged.reserve(atoms.size());
  for (const Atom& a : atoms) {
    bool joined = false;
    int window = 0;
    for (auto it = merged.rbegin(); it != merged.rend() && window < 64; ++it, ++window) {
      if (isometry_distance(it->g, a.g) <= kMergeTol) {
        it->weight += a.weight;
        joined = true;
        break;
      }
      // Atoms are sorted; once the leading rotation entry is far no earlier
      // atom can be closer.
      if (std::abs(it->g.rotation()(0, 0) - a.g.rotation()(0, 0)) > kMergeTol) break;
    }
    if (!joined) merged.push_back(a);
  }

  AtomicMeasure mu;
  mu.atoms_ = std::move(merged);
  mu.label_ = std::move(label);
  return mu;
}

AtomicMeasure AtomicMeasure::dirac(const Isometry& g, std::string label) {
  return from_atoms({Atom{g, 1.0}}, std::move(label));
}

AtomicMeasure AtomicMeasure::reverse() const {
  std::vector<Atom> rev;
  rev.reserve(atoms_.size());
  for (const Atom& a : atoms_) rev.push_back(Atom{a.g.inverse(), a.weight});
  return from_atoms(std::move(rev), label_);
}

bool AtomicMeasure::is_symmetric(double tol) const {
  return measures_equal(*this, reverse(), tol, 1e-12);
}

MomentSummary AtomicMeasure::moments() const {
  MomentSummary m;
  for (const Atom& a : atoms_) {
    double r = a.g.translation().norm();
    m.second_moment += a.weight * r * r;
    m.mean_translation += a.weight * a.g.translation();
    m.mean_rotation += a.weight * a.g.rotation();
    m.max_radius = std::max(m.max_radius, r);
  }
  return m;
}

bool measures_equal(const AtomicMeasure& a, const AtomicMeasure& b,
                    double atom_tol, double weight_tol) {
  if (a.size() != b.size()) return false;
  std::vector<bool> used(b.size(), false);
  for (const Atom& x : a.atoms()) {
    bool found = false;
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (used[j]) continue;
      if (isometry_distance(x.g, b.atoms()[j].g) <= atom_tol &&
          std::abs(x.weight - b.atoms()[j].weight) <= weight_tol) {
        used[j] = true;
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

AtomicMeasure convolve(const AtomicMeasure& mu, const AtomicMeasure& nu,
                       std::size_t max_atoms) {
  std::size_t pairs = mu.size() * nu.size();
  if (pairs > max_atoms) {
    throw NumericalError("support-blowup",
                         "convolution support exceeds atom cap (" +
                             std::to_string(pairs) + " > " +
                             std::to_string(max_atoms) + ")");
  }
  std::vector<Atom> atoms;
  atoms.reserve(pairs);
  for (const Atom& x : mu.atoms())
    for (const Atom& y : nu.atoms())
      atoms.push_back(Atom{compose(x.g, y.g), x.weight * y.weight});
  return AtomicMeasure::from_atoms(std::move(atoms),
                                   mu.label() + "*" + nu.label());
}

AtomicMeasure convolution_power(const AtomicMeasure& mu, int power,
                                std::size_t max_atoms) {
  if (power < 1) throw UsageError("bad-power", "convolution power must be >= 1");
  AtomicMeasure acc = mu;
  for (int i = 1; i < power; ++i) acc = convolve(acc, mu, max_atoms);
  return AtomicMeasure::from_atoms(
      std::vector<Atom>(acc.atoms().begin(), acc.atoms().end()),
      mu.label() + "^*" + std::to_string(power));
}

AtomicMeasure symmetrize(const AtomicMeasure& mu) {
  std::vector<Atom> atoms;
  atoms.reserve(2 * mu.size());
  for (const Atom& a : mu.atoms()) {
    atoms.push_back(Atom{a.g, 0.5 * a.weight});
    atoms.push_back(Atom{a.g.inverse(), 0.5 * a.weight});
  }
  return AtomicMeasure::from_atoms(std::move(atoms), mu.label());
}

AtomicMeasure truncate_restrict(const AtomicMeasure& mu, double radius,
                                double* dropped_mass) {
  std::vector<Atom> kept;
  double dropped = 0.0;
  for (const Atom& a : mu.atoms()) {
    if (a.g.translation().norm() <= radius) {
      kept.push_back(a);
    } else {
      dropped += a.weight;
    }
  }
  if (kept.empty()) {
    throw PreflightError("empty-truncation",
                         "no atoms with translation length <= " +
                             std::to_string(radius));
  }
  if (dropped_mass) *dropped_mass = dropped;
  return AtomicMeasure::from_atoms(std::move(kept), mu.label());
}

Vec3 fixed_point(const AtomicMeasure& mu) {
  MomentSummary m = mu.moments();
  Mat3 a = Mat3::Identity() - m.mean_rotation;
  Eigen::JacobiSVD<Mat3> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  double smax = svd.singularValues()(0);
  double smin = svd.singularValues()(2);
  if (!(smin > 0.0) || smax / smin > 1e8) {
    throw PreflightError("no-unique-fixed-point",
                         "I - mean_rotation is singular within conditioning "
                         "threshold 1e8; no unique fixed point");
  }
  return svd.solve(m.mean_translation);
}

AtomicMeasure center(const AtomicMeasure& mu) {
  Vec3 a = fixed_point(mu);
  Isometry t = Isometry::translation_only(a);
  Isometry tinv = Isometry::translation_only(-a);
  std::vector<Atom> atoms;
  atoms.reserve(mu.size());
  for (const Atom& x : mu.atoms())
    atoms.push_back(Atom{compose(tinv, compose(x.g, t)), x.weight});
  return AtomicMeasure::from_atoms(std::move(atoms), mu.label() + "~centered");
}

}  // namespace isogap
