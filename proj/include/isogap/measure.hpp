#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "isogap/geometry.hpp"

namespace isogap {

struct Atom {
  Isometry g;
  double weight = 0.0;
};

// Aggregate moments of a finitely supported probability measure on the
// isometry group.  second_moment is the weighted sum of squared
// translation lengths; mean_rotation is the weighted average of the
// rotation parts (a contraction).
struct MomentSummary {
  double second_moment = 0.0;
  Vec3 mean_translation = Vec3::Zero();
  Mat3 mean_rotation = Mat3::Zero();
  double max_radius = 0.0;
};

// Finitely supported probability measure on the isometry group.
// Immutable after construction; all operations return new measures.
//
// Construction normalizes weights to total mass one, merges atoms closer
// than the merge tolerance (1e-10 in isometry_distance), and sorts atoms
// into a canonical deterministic order.
class AtomicMeasure {
public:
  static constexpr double kMergeTol = 1e-10;

  static AtomicMeasure from_atoms(std::vector<Atom> atoms, std::string label);

  static AtomicMeasure dirac(const Isometry& g, std::string label = "dirac");

  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::string& label() const { return label_; }
  std::size_t size() const { return atoms_.size(); }

  // Pushforward under g -> g^-1.
  AtomicMeasure reverse() const;

  bool is_symmetric(double tol = kMergeTol) const;

  MomentSummary moments() const;

private:
  AtomicMeasure() = default;
  std::vector<Atom> atoms_;
  std::string label_;
};

// True when the two measures have the same atoms and weights up to the
// given tolerances (atom sets compared via isometry_distance).
bool measures_equal(const AtomicMeasure& a, const AtomicMeasure& b,
                    double atom_tol = AtomicMeasure::kMergeTol,
                    double weight_tol = 1e-12);

// Convolution: atoms g*h for all pairs, weights multiplied, merged.
// Throws NumericalError("support-blowup") when the pre-merge pair count
// exceeds max_atoms.
AtomicMeasure convolve(const AtomicMeasure& mu, const AtomicMeasure& nu,
                       std::size_t max_atoms = 1000000);

// l-fold convolution power (power >= 1).
AtomicMeasure convolution_power(const AtomicMeasure& mu, int power,
                                std::size_t max_atoms = 1000000);

// (mu + reverse(mu)) / 2.
AtomicMeasure symmetrize(const AtomicMeasure& mu);

// Restriction to atoms with translation length <= radius, renormalized.
// dropped_mass receives the removed weight.  Throws
// PreflightError("empty-truncation") when nothing survives.
AtomicMeasure truncate_restrict(const AtomicMeasure& mu, double radius,
                                double* dropped_mass = nullptr);

// Unique point a with  sum_g w_g (v_g + R_g a) = a,  i.e. the fixed point
// of the barycentric contraction.  Requires I - mean_rotation to be
// invertible; throws PreflightError("no-unique-fixed-point") when its
// condition number exceeds 1e8.
Vec3 fixed_point(const AtomicMeasure& mu);

// Conjugation by the translation to the fixed point: atoms
// t^-1 g t with t = (a, I), which zeroes the mean translation.
AtomicMeasure center(const AtomicMeasure& mu);

}  // namespace isogap
