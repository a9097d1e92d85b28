#include "twoatom/analysis_screen.hpp"

#include "twoatom/sphere_quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace twoatom {

namespace {

constexpr double kNegativeTolerance = 1e-12;
// Relative height below which neighbouring samples count as equal.
constexpr double kFlatTolerance = 1e-9;
// 3.7 standard errors: Rayleigh false-alarm probability exp(-3.7^2/2) ~ 1e-3.
constexpr double kHarmonicThreshold = 3.7;

double checked_value(double v) {
  if (!std::isfinite(v)) {
    throw std::logic_error("angular_map: density returned a non-finite value");
  }
  if (v < -kNegativeTolerance) {
    throw std::logic_error("angular_map: density is negative beyond rounding (" +
                           std::to_string(v) + ")");
  }
  return v < 0.0 ? 0.0 : v;
}

std::vector<double> smooth(const std::vector<double>& y, std::size_t window) {
  if (window <= 1 || y.size() < 3) {
    return y;
  }
  const std::size_t half = window / 2;
  std::vector<double> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    const std::size_t lo = i >= half ? i - half : 0;
    const std::size_t hi = std::min(y.size() - 1, i + half);
    double s = 0.0;
    for (std::size_t k = lo; k <= hi; ++k) {
      s += y[k];
    }
    out[i] = s / static_cast<double>(hi - lo + 1);
  }
  return out;
}

struct SinusoidFit {
  double offset = 0.0;
  double cos_coeff = 0.0;
  double sin_coeff = 0.0;
  double residual = 0.0;
  bool ok = false;
};

// Linear least squares for y ~ a + b cos(kappa (x - x0)) + c sin(kappa (x - x0))
// over samples [lo, hi).
SinusoidFit fit_sinusoid(const std::vector<double>& x, const std::vector<double>& y,
                         std::size_t lo, std::size_t hi, double kappa, double x0) {
  SinusoidFit fit;
  const auto n = static_cast<Eigen::Index>(hi - lo);
  if (n < 3) {
    return fit;
  }
  Eigen::MatrixXd design(n, 3);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const double arg = kappa * (x[lo + static_cast<std::size_t>(r)] - x0);
    design(r, 0) = 1.0;
    design(r, 1) = std::cos(arg);
    design(r, 2) = std::sin(arg);
    rhs(r) = y[lo + static_cast<std::size_t>(r)];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  qr.setThreshold(1e-10);
  if (qr.rank() < 3) {
    return fit;
  }
  const Eigen::Vector3d coeff = qr.solve(rhs);
  fit.offset = coeff(0);
  fit.cos_coeff = coeff(1);
  fit.sin_coeff = coeff(2);
  fit.residual = (design * coeff - rhs).squaredNorm();
  fit.ok = true;
  return fit;
}

// Fringe wavenumber in the natural variable: coarse scan of the global fit
// residual around the extremum-spacing estimate, then Gauss-Newton on
// (a, b, c, kappa).
double fit_wavenumber(const std::vector<double>& x, const std::vector<double>& y, double kappa0) {
  const double x0 = 0.5 * (x.front() + x.back());
  double best_kappa = kappa0;
  double best_res = std::numeric_limits<double>::infinity();
  constexpr int kScan = 800;
  for (int s = 0; s <= kScan; ++s) {
    const double kappa = kappa0 * (0.9 + 0.2 * s / kScan);
    const SinusoidFit f = fit_sinusoid(x, y, 0, x.size(), kappa, x0);
    if (f.ok && f.residual < best_res) {
      best_res = f.residual;
      best_kappa = kappa;
    }
  }
  SinusoidFit f = fit_sinusoid(x, y, 0, x.size(), best_kappa, x0);
  if (!f.ok) {
    return kappa0;
  }
  Eigen::Vector4d p(f.offset, f.cos_coeff, f.sin_coeff, best_kappa);
  const auto n = static_cast<Eigen::Index>(x.size());
  double res = f.residual;
  for (int iter = 0; iter < 30; ++iter) {
    Eigen::MatrixXd jac(n, 4);
    Eigen::VectorXd r(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double dx = x[static_cast<std::size_t>(i)] - x0;
      const double cs = std::cos(p(3) * dx);
      const double sn = std::sin(p(3) * dx);
      r(i) = p(0) + p(1) * cs + p(2) * sn - y[static_cast<std::size_t>(i)];
      jac(i, 0) = 1.0;
      jac(i, 1) = cs;
      jac(i, 2) = sn;
      jac(i, 3) = dx * (-p(1) * sn + p(2) * cs);
    }
    const Eigen::Vector4d step = jac.colPivHouseholderQr().solve(-r);
    Eigen::Vector4d trial = p + step;
    double trial_res = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double dx = x[static_cast<std::size_t>(i)] - x0;
      const double e = trial(0) + trial(1) * std::cos(trial(3) * dx) +
                       trial(2) * std::sin(trial(3) * dx) - y[static_cast<std::size_t>(i)];
      trial_res += e * e;
    }
    if (!(trial_res <= res)) {
      break;
    }
    const bool converged = std::abs(step(3)) <= 1e-15 * std::abs(p(3));
    p = trial;
    res = trial_res;
    if (converged) {
      break;
    }
  }
  return std::abs(p(3) - kappa0) < 0.2 * kappa0 ? p(3) : best_kappa;
}

double mean_of(const std::vector<Extremum>& v) {
  double s = 0.0;
  for (const auto& e : v) {
    s += e.value;
  }
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

}  // namespace

// ---------------------------------------------------------------- grid ----

AngularGrid::AngularGrid(std::size_t n_theta, std::size_t n_phi)
    : n_theta_(n_theta), n_phi_(n_phi) {
  if (n_theta == 0 || n_phi == 0) {
    throw std::invalid_argument("AngularGrid: cell counts must be positive");
  }
  theta_step_ = kPi / static_cast<double>(n_theta);
  phi_step_ = 2.0 * kPi / static_cast<double>(n_phi);
}

double AngularGrid::weight(std::size_t i) const {
  // cos a - cos b = 2 sin((a+b)/2) sin((b-a)/2), free of cancellation near
  // the poles.
  return 2.0 * std::sin(theta(i)) * std::sin(0.5 * theta_step_) * phi_step_;
}

std::pair<std::size_t, std::size_t> AngularGrid::cell_of(const Direction& k) const {
  const auto i = std::min(n_theta_ - 1, static_cast<std::size_t>(k.theta() / theta_step_));
  const auto j = std::min(n_phi_ - 1, static_cast<std::size_t>(k.phi() / phi_step_));
  return {i, j};
}

const char* to_string(MapKind kind) {
  switch (kind) {
    case MapKind::density:
      return "density";
    case MapKind::histogram:
      return "histogram";
    case MapKind::classical:
      return "classical";
  }
  return "density";
}

MapKind map_kind_from_string(const std::string& name) {
  if (name == "density") return MapKind::density;
  if (name == "histogram") return MapKind::histogram;
  if (name == "classical") return MapKind::classical;
  throw std::invalid_argument("unknown map kind '" + name + "'");
}

Eigen::MatrixXd AngularMap::cell_mass() const {
  if (kind == MapKind::histogram) {
    return values;
  }
  Eigen::MatrixXd mass = values;
  for (std::size_t i = 0; i < grid.n_theta(); ++i) {
    mass.row(static_cast<Eigen::Index>(i)) *= grid.weight(i);
  }
  return mass;
}

// ---------------------------------------------------------------- maps ----

AngularMap angular_map(const DensityFn& density, const AngularGrid& grid, MapKind kind) {
  AngularMap map{grid, Eigen::MatrixXd(grid.n_theta(), grid.n_phi()), kind};
  for (std::size_t i = 0; i < grid.n_theta(); ++i) {
    for (std::size_t j = 0; j < grid.n_phi(); ++j) {
      map.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          checked_value(density(grid.direction(i, j)));
    }
  }
  return map;
}

AngularMap cell_averaged_map(const DensityFn& density, const AngularGrid& grid,
                             std::size_t nodes_u, std::size_t nodes_phi, MapKind kind) {
  const GaussLegendre gu = gauss_legendre(nodes_u);
  const GaussLegendre gp = gauss_legendre(nodes_phi);
  AngularMap map{grid, Eigen::MatrixXd(grid.n_theta(), grid.n_phi()), kind};
  for (std::size_t i = 0; i < grid.n_theta(); ++i) {
    const double u_hi = std::cos(grid.theta_edge(i));
    const double u_lo = std::cos(grid.theta_edge(i + 1));
    const double u_mid = 0.5 * (u_hi + u_lo);
    const double u_half = 0.5 * (u_hi - u_lo);
    for (std::size_t j = 0; j < grid.n_phi(); ++j) {
      const double p_mid = grid.phi(j);
      const double p_half = 0.5 * grid.phi_step();
      double acc = 0.0;
      for (std::size_t a = 0; a < nodes_u; ++a) {
        const double u = u_mid + u_half * gu.nodes[a];
        const double s = std::sqrt(std::max(0.0, 1.0 - u * u));
        for (std::size_t b = 0; b < nodes_phi; ++b) {
          const double p = p_mid + p_half * gp.nodes[b];
          const Direction k = Direction::from_vector(Vec3(s * std::cos(p), s * std::sin(p), u));
          acc += gu.weights[a] * gp.weights[b] * checked_value(density(k));
        }
      }
      // Weights on [-1,1]^2 sum to 4.
      map.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = acc / 4.0;
    }
  }
  return map;
}

AngularMap accumulate_clicks(const ClickStream& stream, const AngularGrid& grid, double burn_in) {
  if (!(burn_in >= 0.0)) {
    throw std::invalid_argument("accumulate_clicks: burn_in must be nonnegative");
  }
  AngularMap map{grid, Eigen::MatrixXd::Zero(grid.n_theta(), grid.n_phi()), MapKind::histogram};
  for (const auto& rec : stream.records) {
    if (rec.t < burn_in) {
      continue;
    }
    const auto [i, j] = grid.cell_of(rec.direction);
    map.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += 1.0;
  }
  return map;
}

AngularMap merge_histograms(const AngularMap& a, const AngularMap& b) {
  if (!(a.grid == b.grid) || a.kind != MapKind::histogram || b.kind != MapKind::histogram) {
    throw std::invalid_argument("merge_histograms: need two histograms on the same grid");
  }
  return AngularMap{a.grid, a.values + b.values, MapKind::histogram};
}

// ---------------------------------------------------------------- cuts ----

CutSpec CutSpec::at_theta(double theta, const AngularGrid& grid) {
  if (!(theta >= 0.0 && theta <= kPi)) {
    throw std::invalid_argument("CutSpec: theta outside [0, pi]");
  }
  const auto i = std::min(grid.n_theta() - 1, static_cast<std::size_t>(theta / grid.theta_step()));
  return CutSpec{Axis::fixed_theta, i};
}

CutSpec CutSpec::at_phi(double phi, const AngularGrid& grid) {
  double p = std::fmod(phi, 2.0 * kPi);
  if (p < 0.0) {
    p += 2.0 * kPi;
  }
  // Nearest cell centre, wrapping around 2 pi.
  const double pos = p / grid.phi_step() - 0.5;
  auto j = static_cast<long long>(std::llround(pos));
  const auto n = static_cast<long long>(grid.n_phi());
  j = ((j % n) + n) % n;
  return CutSpec{Axis::fixed_phi, static_cast<std::size_t>(j)};
}

CutProfile extract_profile(const AngularMap& map, const CutSpec& cut) {
  const AngularGrid& g = map.grid;
  CutProfile prof;
  const bool counts = map.kind == MapKind::histogram;
  if (cut.axis == CutSpec::Axis::fixed_phi) {
    if (cut.index >= g.n_phi()) {
      throw std::out_of_range("CutSpec: phi column outside the grid");
    }
    // Increasing u = cos(theta) runs from the last theta row to the first.
    for (std::size_t r = g.n_theta(); r-- > 0;) {
      double v = map.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(cut.index));
      if (counts) {
        v /= g.weight(r);
      }
      prof.x.push_back(std::cos(g.theta(r)));
      prof.y.push_back(v);
    }
    prof.span = std::cos(g.theta_edge(0)) - std::cos(g.theta_edge(g.n_theta()));
  } else {
    if (cut.index >= g.n_theta()) {
      throw std::out_of_range("CutSpec: theta row outside the grid");
    }
    const double w = g.weight(cut.index);
    for (std::size_t c = 0; c < g.n_phi(); ++c) {
      double v = map.values(static_cast<Eigen::Index>(cut.index), static_cast<Eigen::Index>(c));
      if (counts) {
        v /= w;
      }
      prof.x.push_back(g.phi(c));
      prof.y.push_back(v);
    }
    prof.span = 2.0 * kPi;
  }
  return prof;
}

// ------------------------------------------------------------- fringes ----

FringeAnalysis analyze_fringes(const CutProfile& profile, const FringeOptions& options) {
  FringeAnalysis out;
  const std::size_t n = profile.y.size();
  if (n < 3 || profile.x.size() != n) {
    return out;
  }
  const std::size_t window = options.smoothing == 0 ? 1 : options.smoothing;
  const std::vector<double> y = smooth(profile.y, window);
  const std::vector<double>& x = profile.x;

  double scale = 0.0;
  for (double v : y) {
    scale = std::max(scale, std::abs(v));
  }
  const double eps = kFlatTolerance * scale;
  if (scale == 0.0) {
    return out;
  }

  std::vector<std::size_t> max_idx;
  std::vector<std::size_t> min_idx;
  // Three-point comparison; a two-sample plateau counts once, at its left end.
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double dl = y[i] - y[i - 1];
    const double dr = y[i] - y[i + 1];
    const bool level = std::abs(dr) <= eps && i + 2 < n;
    if (dl > eps && (dr > eps || (level && y[i] - y[i + 2] > eps))) {
      max_idx.push_back(i);
    } else if (dl < -eps && (dr < -eps || (level && y[i] - y[i + 2] < -eps))) {
      min_idx.push_back(i);
    }
  }

  for (std::size_t i : max_idx) {
    out.maxima.push_back({x[i], y[i]});
  }
  for (std::size_t i : min_idx) {
    out.minima.push_back({x[i], y[i]});
  }
  if (out.maxima.empty() || out.minima.empty() || out.maxima.size() + out.minima.size() < 2) {
    out.status = FringeStatus::no_fringes;
    return out;
  }
  out.status = FringeStatus::fringes;

  // Period from the extremum positions.
  double period0 = 0.0;
  {
    double num = 0.0;
    double den = 0.0;
    for (const auto* set : {&out.maxima, &out.minima}) {
      if (set->size() >= 2) {
        num += std::abs(set->back().x - set->front().x);
        den += static_cast<double>(set->size() - 1);
      }
    }
    period0 = den > 0.0 ? num / den
                        : 2.0 * std::abs(out.maxima.front().x - out.minima.front().x);
  }
  if (!options.refine || !(period0 > 0.0)) {
    return out;
  }

  const double kappa = fit_wavenumber(x, y, 2.0 * kPi / period0);
  const double period = 2.0 * kPi / kappa;
  out.period = period;

  auto refine = [&](std::size_t i, bool is_max) -> Extremum {
    const Extremum raw{x[i], y[i]};
    std::size_t lo = i;
    std::size_t hi = i + 1;
    while (lo > 0 && std::abs(x[lo - 1] - x[i]) <= period) {
      --lo;
    }
    while (hi < n && std::abs(x[hi] - x[i]) <= period) {
      ++hi;
    }
    const SinusoidFit f = fit_sinusoid(x, y, lo, hi, kappa, x[i]);
    if (!f.ok) {
      return raw;
    }
    const double amp = std::hypot(f.cos_coeff, f.sin_coeff);
    double arg = std::atan2(f.sin_coeff, f.cos_coeff);
    if (!is_max) {
      arg = arg > 0.0 ? arg - kPi : arg + kPi;
    }
    const double shift = arg / kappa;
    if (std::abs(shift) > 0.5 * period) {
      return raw;
    }
    return Extremum{x[i] + shift, is_max ? f.offset + amp : f.offset - amp};
  };

  for (std::size_t k = 0; k < max_idx.size(); ++k) {
    out.maxima[k] = refine(max_idx[k], true);
  }
  for (std::size_t k = 0; k < min_idx.size(); ++k) {
    out.minima[k] = refine(min_idx[k], false);
  }
  return out;
}

VisibilityReport visibility_of_profile(const CutProfile& profile, const FringeOptions& options) {
  const FringeAnalysis fa = analyze_fringes(profile, options);
  VisibilityReport rep;
  rep.status = fa.status;
  rep.maxima = fa.maxima.size();
  rep.minima = fa.minima.size();
  if (fa.status == FringeStatus::no_fringes) {
    return rep;
  }
  rep.mean_max = mean_of(fa.maxima);
  rep.mean_min = mean_of(fa.minima);
  const double sum = rep.mean_max + rep.mean_min;
  rep.visibility = sum > 0.0 ? std::clamp((rep.mean_max - rep.mean_min) / sum, 0.0, 1.0) : 0.0;
  return rep;
}

namespace {

FringeOptions options_for(const AngularMap& map, const CutSpec& cut, FringeOptions options) {
  if (options.smoothing == 0) {
    options.smoothing = map.kind == MapKind::histogram ? 3 : 1;
  }
  if (map.kind == MapKind::histogram) {
    const CutProfile raw = extract_profile(AngularMap{map.grid, map.values, MapKind::density}, cut);
    const double mean = std::accumulate(raw.y.begin(), raw.y.end(), 0.0) /
                        static_cast<double>(raw.y.size());
    if (mean < options.min_mean_count) {
      throw std::runtime_error("histogram cut has " + std::to_string(mean) +
                               " counts per cell on average; need at least " +
                               std::to_string(options.min_mean_count));
    }
  }
  return options;
}

}  // namespace

VisibilityReport visibility_along_cut(const AngularMap& map, const CutSpec& cut,
                                      const FringeOptions& options) {
  return visibility_of_profile(extract_profile(map, cut), options_for(map, cut, options));
}

FringeSpacing fringe_spacing_of_profile(const CutProfile& profile, const FringeOptions& options) {
  const FringeAnalysis fa = analyze_fringes(profile, options);
  if (fa.maxima.size() + fa.minima.size() < 3 || fa.maxima.size() < 2) {
    throw std::runtime_error("fringe_spacing: fewer than three fringe extrema along the cut");
  }
  std::vector<double> pos;
  for (const auto& e : fa.maxima) {
    pos.push_back(e.x);
  }
  std::sort(pos.begin(), pos.end());
  std::vector<double> gaps;
  for (std::size_t k = 1; k < pos.size(); ++k) {
    gaps.push_back(pos[k] - pos[k - 1]);
  }
  const double mean = std::accumulate(gaps.begin(), gaps.end(), 0.0) / static_cast<double>(gaps.size());
  double var = 0.0;
  for (double g : gaps) {
    var += (g - mean) * (g - mean);
  }
  var = gaps.size() > 1 ? var / static_cast<double>(gaps.size() - 1) : 0.0;
  return FringeSpacing{mean, std::sqrt(var), fa.maxima.size(), profile.span / mean};
}

FringeSpacing fringe_spacing(const AngularMap& map, const CutSpec& cut, const FringeOptions& options) {
  return fringe_spacing_of_profile(extract_profile(map, cut), options_for(map, cut, options));
}

// ------------------------------------------------------------ distance ----

double map_distance(const AngularMap& a, const AngularMap& b, DistanceMetric metric) {
  if (!(a.grid == b.grid)) {
    throw std::invalid_argument("map_distance: grids differ");
  }
  const Eigen::MatrixXd ma = a.cell_mass();
  const Eigen::MatrixXd mb = b.cell_mass();
  const double sa = ma.sum();
  const double sb = mb.sum();
  if (!(sa > 0.0) || !(sb > 0.0)) {
    throw std::invalid_argument("map_distance: a map has no mass");
  }
  const Eigen::MatrixXd diff = (ma / sa - mb / sb).cwiseAbs();
  return metric == DistanceMetric::l1_normalized ? diff.sum() : diff.maxCoeff();
}

// --------------------------------------------------------------- phase ----

std::vector<double> phase_histogram(std::span<const Direction> directions,
                                    const ExperimentConfig& cfg, std::size_t bins) {
  if (bins == 0) {
    throw std::invalid_argument("phase_histogram: need at least one bin");
  }
  std::vector<double> counts(bins, 0.0);
  const double two_pi = 2.0 * kPi;
  for (const auto& k : directions) {
    double ph = std::fmod(relative_phase(k, cfg), two_pi);
    if (ph < 0.0) {
      ph += two_pi;
    }
    const auto b = std::min(bins - 1, static_cast<std::size_t>(ph / two_pi * static_cast<double>(bins)));
    counts[b] += 1.0;
  }
  return counts;
}

HarmonicFringe harmonic_visibility(std::span<const double> counts) {
  const std::size_t bins = counts.size();
  if (bins < 3) {
    throw std::invalid_argument("harmonic_visibility: need at least three bins");
  }
  const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  if (!(total > 0.0)) {
    throw std::invalid_argument("harmonic_visibility: empty histogram");
  }
  const double width = 2.0 * kPi / static_cast<double>(bins);
  cplx z = 0.0;
  for (std::size_t b = 0; b < bins; ++b) {
    z += counts[b] * std::polar(1.0, (static_cast<double>(b) + 0.5) * width);
  }
  // Averaging cos over a bin of width w scales the harmonic by sinc(w/2).
  const double sinc = std::sin(0.5 * width) / (0.5 * width);
  const double vis = 2.0 * std::abs(z) / total / sinc;
  const double noise = std::sqrt(2.0 / total) / sinc;
  HarmonicFringe out;
  out.visibility = vis;
  out.phase = std::arg(z);
  out.noise_level = noise;
  out.status = vis > kHarmonicThreshold * noise ? FringeStatus::fringes : FringeStatus::no_fringes;
  return out;
}

}  // namespace twoatom
