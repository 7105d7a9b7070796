#include "rssd/vgap.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "rssd/error.hpp"
#include "rssd/parallel.hpp"
#include "rssd/sweep.hpp"

namespace rssd {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kArcSamples = 32;
constexpr int kMaxBisection = 48;

int matrix_rank(const CMatrix& m) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  const auto& sv = svd.singularValues();
  const double tol = 1e-10 * std::max(1.0, sv(0));
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i) rank += sv(i) > tol ? 1 : 0;
  return rank;
}

bool is_minimal_mode(const StateSpacePlant& plant, Complex lambda) {
  const int n = plant.states();
  CMatrix shifted = plant.a().cast<Complex>();
  shifted.diagonal().array() -= lambda;
  CMatrix ctrb(n, n + plant.inputs());
  ctrb << shifted, plant.b().cast<Complex>();
  CMatrix obsv(n + plant.outputs(), n);
  obsv << shifted, plant.c().cast<Complex>();
  return matrix_rank(ctrb) == n && matrix_rank(obsv) == n;
}

// Inverse square root of a Hermitian positive definite matrix.
CMatrix inverse_sqrt(const CMatrix& h) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  const Vector inv = es.eigenvalues().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().adjoint();
}

// A point on the upper half of the contour: either an imaginary-axis segment
// parametrized by u = atan(omega) or an indentation arc around j*center.
struct Piece {
  bool arc = false;
  double center = 0.0;
  double radius = 0.0;
  double t0 = 0.0;
  double t1 = 0.0;

  bool at_infinity(double t) const { return !arc && t >= kPi / 2; }
  Complex point(double t) const {
    if (arc) return Complex(0.0, center) + radius * std::polar(1.0, t);
    return Complex(0.0, std::tan(t));
  }
};

class ContourDet {
 public:
  ContourDet(const StateSpacePlant& p1, const StateSpacePlant& p2)
      : p1_(p1), p2_(p2) {
    const int m = p1.inputs();
    const CMatrix dd = p2.d().transpose().cast<Complex>() * p1.d().cast<Complex>();
    at_infinity_ = (CMatrix::Identity(m, m) + dd).determinant();
    infinity_scale_ = 1.0 + p1.d().norm() * p2.d().norm();
  }

  Complex operator()(const Piece& piece, double t) const {
    double scale = infinity_scale_;
    Complex value = at_infinity_;
    if (!piece.at_infinity(t)) {
      const Complex s = piece.point(t);
      const CMatrix g1 = evaluate(p1_, s);
      const CMatrix g2 = evaluate(p2_, -s);
      const int m = p1_.inputs();
      value = (CMatrix::Identity(m, m) + g2.transpose() * g1).determinant();
      scale = 1.0 + g1.norm() * g2.norm();
    }
    if (!(std::abs(value) > 1e-9 * scale)) {
      throw Error(ErrorCode::kDetVanishesOnContour,
                  "det(I + P2~ P1) vanishes on the contour");
    }
    return value;
  }

 private:
  const StateSpacePlant& p1_;
  const StateSpacePlant& p2_;
  Complex at_infinity_;
  double infinity_scale_;
};

// Accumulated phase change between two samples, bisecting until every step
// is below pi/2.
double phase_step(const ContourDet& det, const Piece& piece, double ta,
                  Complex ga, double tb, Complex gb, int depth) {
  const double step = std::arg(gb / ga);
  if (std::abs(step) < kPi / 2) return step;
  if (depth >= kMaxBisection) {
    throw Error(ErrorCode::kPhaseJumpTooLarge,
                "phase step exceeds pi/2 after maximal refinement");
  }
  const double tm = 0.5 * (ta + tb);
  const Complex gm = det(piece, tm);
  return phase_step(det, piece, ta, ga, tm, gm, depth + 1) +
         phase_step(det, piece, tm, gm, tb, gb, depth + 1);
}

std::vector<double> imaginary_axis_frequencies(const StateSpacePlant& p1,
                                               const StateSpacePlant& p2) {
  std::vector<double> out;
  for (const auto* p : {&p1, &p2}) {
    const CVector ev = eigenvalues(p->a());
    for (int i = 0; i < ev.size(); ++i) {
      if (on_imaginary_axis(ev(i))) out.push_back(std::abs(ev(i).imag()));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(),
                        [](double x, double y) {
                          return std::abs(x - y) <=
                                 1e-9 * std::max(1.0, std::abs(y));
                        }),
            out.end());
  return out;
}

std::vector<Piece> upper_contour(const std::vector<double>& poles) {
  std::vector<Piece> pieces;
  double omega = 0.0;
  for (double w0 : poles) {
    const double rho = 1e-6 * std::max(1.0, w0);
    if (w0 == 0.0) {
      pieces.push_back(Piece{true, 0.0, rho, 0.0, kPi / 2});
      omega = rho;
      continue;
    }
    if (w0 - rho > omega) {
      pieces.push_back(Piece{false, 0.0, 0.0, std::atan(omega),
                             std::atan(w0 - rho)});
    }
    pieces.push_back(Piece{true, w0, rho, -kPi / 2, kPi / 2});
    omega = w0 + rho;
  }
  pieces.push_back(Piece{false, 0.0, 0.0, std::atan(omega), kPi / 2});
  return pieces;
}

}  // namespace

PoleCounts pole_counts(const StateSpacePlant& plant, PoleCountMode mode) {
  PoleCounts counts;
  const CVector ev = eigenvalues(plant.a());
  for (int i = 0; i < ev.size(); ++i) {
    if (mode == PoleCountMode::kAssumeMinimal &&
        !is_minimal_mode(plant, ev(i))) {
      continue;
    }
    if (on_imaginary_axis(ev(i))) {
      ++counts.imaginary;
    } else if (ev(i).real() > 0.0) {
      ++counts.rhp;
    }
  }
  return counts;
}

int winding_number_det(const StateSpacePlant& p1, const StateSpacePlant& p2,
                       const FrequencyGrid& grid) {
  if (p1.inputs() != p2.inputs() || p1.outputs() != p2.outputs()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "winding number needs plants of equal dimensions");
  }
  const std::vector<Piece> pieces =
      upper_contour(imaginary_axis_frequencies(p1, p2));
  std::vector<double> samples = grid.points();
  for (const auto* p : {&p1, &p2}) {
    const auto extra = characteristic_frequencies(*p);
    samples.insert(samples.end(), extra.begin(), extra.end());
  }
  std::sort(samples.begin(), samples.end());

  const ContourDet det(p1, p2);
  double total = 0.0;
  bool have_prev = false;
  Complex prev{};
  for (const Piece& piece : pieces) {
    std::vector<double> ts;
    ts.push_back(piece.t0);
    if (piece.arc) {
      for (int k = 1; k < kArcSamples; ++k) {
        ts.push_back(piece.t0 + (piece.t1 - piece.t0) * k / kArcSamples);
      }
    } else {
      for (double w : samples) {
        const double t = std::atan(w);
        if (t > piece.t0 && t < piece.t1) ts.push_back(t);
      }
    }
    ts.push_back(piece.t1);

    Complex ga = det(piece, ts.front());
    if (have_prev) total += std::arg(ga / prev);
    for (std::size_t k = 1; k < ts.size(); ++k) {
      const Complex gb = det(piece, ts[k]);
      total += phase_step(det, piece, ts[k - 1], ga, ts[k], gb, 0);
      ga = gb;
    }
    prev = ga;
    have_prev = true;
  }
  // The lower half mirrors the upper half, so the full contour accumulates
  // 2 * total; the clockwise traversal flips the sign.
  const double turns = -total / kPi;
  const double rounded = std::round(turns);
  if (std::abs(turns - rounded) > 0.25) {
    throw Error(ErrorCode::kComputationFailed,
                "winding number not close to an integer");
  }
  return static_cast<int>(rounded);
}

double chordal_distance(const CMatrix& p1, const CMatrix& p2) {
  if (p1.size() == 1) {
    const Complex a = p1(0, 0), b = p2(0, 0);
    return std::abs(a - b) /
           std::sqrt((1.0 + std::norm(a)) * (1.0 + std::norm(b)));
  }
  const auto r = p1.rows(), m = p1.cols();
  const CMatrix left =
      inverse_sqrt(CMatrix::Identity(r, r) + p2 * p2.adjoint());
  const CMatrix right =
      inverse_sqrt(CMatrix::Identity(m, m) + p1.adjoint() * p1);
  return std::min(1.0, max_singular_value(left * (p1 - p2) * right));
}

VgapResult nu_gap(const StateSpacePlant& p1, const StateSpacePlant& p2,
                  const FrequencyGrid& grid, const VgapOptions& options) {
  if (p1.inputs() != p2.inputs() || p1.outputs() != p2.outputs()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "ν-gap needs plants of equal dimensions ('" + p1.label() +
                    "' vs '" + p2.label() + "')");
  }
  VgapResult result;
  const PoleCounts c1 = pole_counts(p1, options.pole_count_mode);
  const PoleCounts c2 = pole_counts(p2, options.pole_count_mode);
  try {
    result.wno = winding_number_det(p1, p2, grid);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kDimensionMismatch) throw;
    return result;
  }
  if (result.wno + c1.rhp - c2.rhp - c2.imaginary != 0) return result;

  auto psi = [&](double omega) {
    try {
      return chordal_distance(freq_response(p1, omega),
                              freq_response(p2, omega));
    } catch (const Error&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  };
  std::vector<double> extra{0.0};
  for (const auto* p : {&p1, &p2}) {
    const auto f = characteristic_frequencies(*p);
    extra.insert(extra.end(), f.begin(), f.end());
  }
  const double at_inf =
      chordal_distance(p1.d().cast<Complex>(), p2.d().cast<Complex>());
  const Peak peak = find_peak(psi, grid, extra, at_inf);
  result.condition_met = true;
  result.value = std::clamp(peak.value, 0.0, 1.0);
  result.peak_frequency = peak.omega;
  return result;
}

Matrix gap_matrix(const PlantSet& set, const FrequencyGrid& grid,
                  const VgapOptions& options) {
  const int n = set.size();
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  }
  std::vector<double> values(pairs.size());
  parallel_for(static_cast<int>(pairs.size()), [&](int k) {
    values[k] =
        nu_gap(set[pairs[k].first], set[pairs[k].second], grid, options).value;
  });
  Matrix gaps = Matrix::Zero(n, n);
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    gaps(pairs[k].first, pairs[k].second) = values[k];
    gaps(pairs[k].second, pairs[k].first) = values[k];
  }
  return gaps;
}

double max_vgap(int index, const PlantSet& set, const FrequencyGrid& grid,
                const VgapOptions& options) {
  if (index < 0 || index >= set.size()) {
    throw Error(ErrorCode::kInvalidArgument, "plant index out of range");
  }
  double worst = 0.0;
  for (int f = 0; f < set.size(); ++f) {
    if (f == index) continue;
    worst = std::max(worst, nu_gap(set[index], set[f], grid, options).value);
  }
  return worst;
}

CentralPlantResult central_plant_from_gaps(Matrix gaps) {
  CentralPlantResult result;
  const int n = static_cast<int>(gaps.rows());
  result.max_gaps.resize(n);
  for (int i = 0; i < n; ++i) result.max_gaps[i] = gaps.row(i).maxCoeff();
  result.index = 0;
  for (int i = 1; i < n; ++i) {
    if (result.max_gaps[i] < result.max_gaps[result.index]) result.index = i;
  }
  result.epsilon = result.max_gaps[result.index];
  result.gap_matrix = std::move(gaps);
  return result;
}

CentralPlantResult central_plant(const PlantSet& set, const FrequencyGrid& grid,
                                 const VgapOptions& options) {
  return central_plant_from_gaps(gap_matrix(set, grid, options));
}

}  // namespace rssd
