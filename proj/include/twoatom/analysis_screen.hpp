#pragma once

// Angular maps over the (theta, phi) sphere and the fringe metrics computed
// from them.

#include "twoatom/emission_law.hpp"
#include "twoatom/trajectory_sim.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace twoatom {

/// Cell-centred (theta, phi) grid. theta cells split [0, pi], phi cells
/// split [0, 2 pi). Cell weights are exact solid angles
/// (cos theta_lo - cos theta_hi) dphi, the integrated form of
/// sin(theta) dtheta dphi, so they sum to 4 pi to rounding.
class AngularGrid {
 public:
  AngularGrid(std::size_t n_theta, std::size_t n_phi);

  std::size_t n_theta() const { return n_theta_; }
  std::size_t n_phi() const { return n_phi_; }
  double theta_step() const { return theta_step_; }
  double phi_step() const { return phi_step_; }

  double theta(std::size_t i) const { return (static_cast<double>(i) + 0.5) * theta_step_; }
  double phi(std::size_t j) const { return (static_cast<double>(j) + 0.5) * phi_step_; }
  double theta_edge(std::size_t i) const { return static_cast<double>(i) * theta_step_; }
  double phi_edge(std::size_t j) const { return static_cast<double>(j) * phi_step_; }
  double weight(std::size_t i) const;
  Direction direction(std::size_t i, std::size_t j) const {
    return Direction::from_angles(theta(i), phi(j));
  }
  /// (theta index, phi index) of the cell containing k.
  std::pair<std::size_t, std::size_t> cell_of(const Direction& k) const;

  bool operator==(const AngularGrid& other) const {
    return n_theta_ == other.n_theta_ && n_phi_ == other.n_phi_;
  }

 private:
  std::size_t n_theta_;
  std::size_t n_phi_;
  double theta_step_;
  double phi_step_;
};

enum class MapKind { density, histogram, classical };

const char* to_string(MapKind kind);
MapKind map_kind_from_string(const std::string& name);

struct AngularMap {
  AngularGrid grid;
  Eigen::MatrixXd values;  // n_theta x n_phi
  MapKind kind;

  /// Probability mass per cell: counts for histograms, value * weight
  /// otherwise.
  Eigen::MatrixXd cell_mass() const;
};

using DensityFn = std::function<double(const Direction&)>;

/// Evaluates density at cell centres. Values below -1e-12 throw
/// std::logic_error; smaller negatives clamp to 0.
AngularMap angular_map(const DensityFn& density, const AngularGrid& grid,
                       MapKind kind = MapKind::density);

/// Cell averages of density by a Gauss-Legendre product rule inside every
/// cell (nodes_u in cos theta, nodes_phi in phi). This is the quantity a
/// click histogram estimates when fringes are finer than a cell.
AngularMap cell_averaged_map(const DensityFn& density, const AngularGrid& grid,
                             std::size_t nodes_u = 16, std::size_t nodes_phi = 4,
                             MapKind kind = MapKind::density);

/// Histogram of click directions with t >= burn_in.
AngularMap accumulate_clicks(const ClickStream& stream, const AngularGrid& grid, double burn_in);

/// Sum of two histograms on the same grid.
AngularMap merge_histograms(const AngularMap& a, const AngularMap& b);

/// A one-dimensional scan through a map: along phi at a fixed theta row, or
/// along theta at a fixed phi column.
struct CutSpec {
  enum class Axis { fixed_theta, fixed_phi };
  Axis axis;
  std::size_t index;

  /// Nearest row / column to the given angle.
  static CutSpec at_theta(double theta, const AngularGrid& grid);
  static CutSpec at_phi(double phi, const AngularGrid& grid);
};

/// Samples of a cut in its natural fringe variable: u = cos(theta) for scans
/// over theta (increasing u), phi for scans over phi. Histogram counts are
/// divided by cell solid angle so every kind is profiled as a density.
struct CutProfile {
  std::vector<double> x;
  std::vector<double> y;
  double span;  // full extent of the natural variable covered by the cut
};

CutProfile extract_profile(const AngularMap& map, const CutSpec& cut);

struct FringeOptions {
  /// Moving-average window in cells (odd, 1 = off). 0 picks the default:
  /// 1 for analytic maps, 3 for histograms.
  std::size_t smoothing = 0;
  /// Refine each extremum with a local least-squares sinusoid so fringes
  /// sampled at only a few cells per period are read at their true height.
  bool refine = true;
  /// Histogram cuts need at least this many counts per cell on average.
  double min_mean_count = 10.0;
};

enum class FringeStatus { fringes, no_fringes };

struct Extremum {
  double x;
  double value;
};

struct FringeAnalysis {
  FringeStatus status = FringeStatus::no_fringes;
  std::vector<Extremum> maxima;  // interior, refined when requested
  std::vector<Extremum> minima;
  double period = 0.0;           // fitted fringe period in the natural variable (0 if unknown)
};

/// Extrema of a profile (boundary samples excluded).
FringeAnalysis analyze_fringes(const CutProfile& profile, const FringeOptions& options = {});

struct VisibilityReport {
  FringeStatus status = FringeStatus::no_fringes;
  double visibility = 0.0;  // meaningful only when status == fringes
  double mean_max = 0.0;
  double mean_min = 0.0;
  std::size_t maxima = 0;
  std::size_t minima = 0;
};

/// (Imax - Imin) / (Imax + Imin) from the means of the interior maxima and
/// minima. Fewer than two extrema, or no maximum/minimum pair, reports
/// FringeStatus::no_fringes.
VisibilityReport visibility_along_cut(const AngularMap& map, const CutSpec& cut,
                                      const FringeOptions& options = {});
VisibilityReport visibility_of_profile(const CutProfile& profile, const FringeOptions& options = {});

struct FringeSpacing {
  double mean;
  double stddev;
  std::size_t maxima;
  double periods;  // span / mean: number of fringes across the whole cut
};

/// Mean distance between adjacent maxima in the natural variable. Throws
/// std::runtime_error with fewer than three extrema.
FringeSpacing fringe_spacing(const AngularMap& map, const CutSpec& cut,
                             const FringeOptions& options = {});
FringeSpacing fringe_spacing_of_profile(const CutProfile& profile,
                                        const FringeOptions& options = {});

enum class DistanceMetric { l1_normalized, linf_normalized };

/// Distance between the normalized cell-mass distributions of two maps:
/// sum |p - q| or max |p - q|. Zero iff the maps are proportional. Throws
/// std::invalid_argument on grid mismatch or an all-zero map.
double map_distance(const AngularMap& a, const AngularMap& b, DistanceMetric metric);

/// Histogram of the fringe phase k0 k.(r1 - r2) reduced to [0, 2 pi).
std::vector<double> phase_histogram(std::span<const Direction> directions,
                                    const ExperimentConfig& cfg, std::size_t bins);

struct HarmonicFringe {
  FringeStatus status;
  double visibility;   // first-harmonic amplitude over the mean, bin-width corrected
  double phase;        // location of the fringe maximum
  double noise_level;  // standard error of the visibility for this count
};

/// Visibility of a periodic histogram from its first Fourier harmonic. The
/// fringe counts as present when the amplitude exceeds 3.7 standard errors
/// (false-alarm probability 1e-3).
HarmonicFringe harmonic_visibility(std::span<const double> counts);

}  // namespace twoatom
