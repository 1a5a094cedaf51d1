// model.hpp: physical parameters, disorder binning and basis indexing
//
// All energies and times are atomic units. Femtoseconds only enter through
// time_convert() at the configuration boundary.

#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace polariton {

inline constexpr double au_per_fs = 41.341373335;

enum class TimeUnit { fs, au };

// Converts a non-negative time to atomic units.
double time_convert(double value, TimeUnit unit);
// Same, from a unit tag ("fs" or "au"); throws std::invalid_argument otherwise.
double time_convert(double value, std::string_view unit);

struct ModelSpec {
  double omega0{0.10};     // mean exciton frequency
  double omega_nu{0.01};   // vibrational frequency
  double s1{-1.0};         // Huang-Rhys displacement of e1
  double s2{-4.0};         // Huang-Rhys displacement of e2
  double v12{0.0025};      // diabatic e1/e2 coupling
  double delta2{0.0};      // rigid shift of the e2 surface
  double omega_c{0.11};    // cavity frequency
  double kappa{0.006};     // cavity decay rate
  double coupling{0.03};   // collective coupling g*sqrt(N)
  double sigma{0.0};       // Gaussian disorder width

  // Throws std::invalid_argument on the first violated invariant.
  void validate() const;
};

struct Bin {
  double weight;   // P_i
  double omega0;   // bin-conditional mean exciton frequency
  double edge_lo;
  double edge_hi;
};

class BinSet {
 public:
  BinSet() = default;
  // Validates ordering, edge containment and unit total weight.
  explicit BinSet(std::vector<Bin> bins);

  std::size_t size() const { return bins_.size(); }
  const Bin& operator[](std::size_t i) const { return bins_[i]; }
  const std::vector<Bin>& bins() const { return bins_; }
  auto begin() const { return bins_.begin(); }
  auto end() const { return bins_.end(); }

 private:
  std::vector<Bin> bins_;
};

// Equal-width bins over [omega0 - 3 sigma, omega0 + 3 sigma], Gaussian weights
// renormalized to unit sum, bin frequency = conditional mean inside the bin.
BinSet discretize_disorder(const ModelSpec& spec, std::size_t n_bins);

// ceil(6 sigma T_f / 2 pi), at least 1.
std::size_t bin_count_rule(double sigma, double t_final);

// Index of a basis state of the single-coordinate effective Hamiltonian.
enum class StateKind { Photon, E1, E2 };

struct StateLabel {
  StateKind kind{StateKind::Photon};
  std::size_t bin{0};
  std::size_t vib{0};

  friend bool operator==(const StateLabel&, const StateLabel&) = default;
};

// Flat ordering: photon (carrying the Franck-Condon vibrational state) at 0,
// then the E1 block, then the E2 block; bin-major, vibrational level minor.
class Basis {
 public:
  Basis(std::size_t n_bins, std::size_t n_vib);

  std::size_t n_bins() const { return n_bins_; }
  std::size_t n_vib() const { return n_vib_; }
  std::size_t dimension() const { return 1 + 2 * n_bins_ * n_vib_; }

  std::size_t flat(const StateLabel& label) const;
  StateLabel label(std::size_t flat) const;

  std::size_t e1(std::size_t bin, std::size_t vib) const { return 1 + bin * n_vib_ + vib; }
  std::size_t e2(std::size_t bin, std::size_t vib) const {
    return 1 + (n_bins_ + bin) * n_vib_ + vib;
  }

 private:
  std::size_t n_bins_;
  std::size_t n_vib_;
};

}  // namespace polariton
