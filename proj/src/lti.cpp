#include "rssd/lti.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "rssd/error.hpp"

namespace rssd {
namespace {

std::string dims(const Matrix& m) {
  std::ostringstream os;
  os << m.rows() << "x" << m.cols();
  return os.str();
}

void require_finite(const Matrix& m, const char* name,
                    const std::string& label) {
  if (!m.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument,
                "plant '" + label + "': matrix " + name +
                    " has non-finite entries");
  }
}

}  // namespace

StateSpacePlant::StateSpacePlant(Matrix a, Matrix b, Matrix c, Matrix d,
                                 std::string label)
    : a_(std::move(a)),
      b_(std::move(b)),
      c_(std::move(c)),
      d_(std::move(d)),
      label_(std::move(label)) {
  const auto n = a_.rows();
  const bool ok = a_.cols() == n && b_.rows() == n && c_.cols() == n &&
                  d_.rows() == c_.rows() && d_.cols() == b_.cols();
  if (!ok) {
    throw Error(ErrorCode::kDimensionMismatch,
                "plant '" + label_ + "': A " + dims(a_) + ", B " + dims(b_) +
                    ", C " + dims(c_) + ", D " + dims(d_));
  }
  require_finite(a_, "A", label_);
  require_finite(b_, "B", label_);
  require_finite(c_, "C", label_);
  require_finite(d_, "D", label_);
}

StateSpacePlant StateSpacePlant::static_gain(Matrix d, std::string label) {
  const auto r = d.rows();
  const auto m = d.cols();
  return StateSpacePlant(Matrix(0, 0), Matrix(0, m), Matrix(r, 0),
                         std::move(d), std::move(label));
}

StateSpacePlant StateSpacePlant::relabeled(std::string label) const {
  return StateSpacePlant(a_, b_, c_, d_, std::move(label));
}

PlantSet::PlantSet(std::vector<StateSpacePlant> plants)
    : plants_(std::move(plants)) {
  if (plants_.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "plant set is empty");
  }
  const int m = plants_.front().inputs();
  const int r = plants_.front().outputs();
  for (const auto& p : plants_) {
    if (p.inputs() != m || p.outputs() != r) {
      std::ostringstream os;
      os << "plant '" << p.label() << "' is " << p.outputs() << "x"
         << p.inputs() << ", set expects " << r << "x" << m;
      throw Error(ErrorCode::kDimensionMismatch, os.str());
    }
  }
}

FrequencyGrid::FrequencyGrid(std::vector<double> points, int refine_depth,
                             double rel_tol)
    : points_(std::move(points)),
      refine_depth_(refine_depth),
      rel_tol_(rel_tol) {
  if (points_.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "frequency grid needs at least 2 points");
  }
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!std::isfinite(points_[i]) || points_[i] < 0.0) {
      throw Error(ErrorCode::kInvalidArgument,
                  "frequency grid points must be finite and >= 0");
    }
    if (i > 0 && points_[i] <= points_[i - 1]) {
      throw Error(ErrorCode::kInvalidArgument,
                  "frequency grid must be strictly increasing");
    }
  }
  if (refine_depth_ < 0 || !(rel_tol_ > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid refinement settings");
  }
}

FrequencyGrid FrequencyGrid::logspace(double lo, double hi, int count,
                                      int refine_depth, double rel_tol) {
  if (!(lo > 0.0) || !(hi > lo) || count < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "logspace grid needs 0 < lo < hi and count >= 2");
  }
  std::vector<double> pts(count);
  const double l0 = std::log10(lo);
  const double l1 = std::log10(hi);
  for (int i = 0; i < count; ++i) {
    pts[i] = std::pow(10.0, l0 + (l1 - l0) * i / (count - 1));
  }
  pts.front() = lo;
  pts.back() = hi;
  return FrequencyGrid(std::move(pts), refine_depth, rel_tol);
}

FrequencyGrid FrequencyGrid::standard() {
  return logspace(1e-3, 1e5, 400);
}

EigenInfo describe_eigenvalue(Complex value) {
  EigenInfo info;
  info.value = value;
  const double mag = std::abs(value);
  info.natural_frequency = mag;
  if (mag == 0.0) {
    info.damping = 1.0;
    info.marginal = true;
  } else {
    info.damping = -value.real() / mag;
  }
  return info;
}

bool on_imaginary_axis(Complex value) {
  return std::abs(value.real()) <= 1e-9 * std::max(1.0, std::abs(value));
}

CVector eigenvalues(const Matrix& a) {
  if (a.rows() == 0) return CVector(0);
  Eigen::EigenSolver<Matrix> solver(a, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::kComputationFailed,
                "eigenvalue solver did not converge");
  }
  return solver.eigenvalues();
}

std::vector<EigenInfo> spectrum(const Matrix& a) {
  const CVector values = eigenvalues(a);
  std::vector<Complex> sorted(values.data(), values.data() + values.size());
  std::sort(sorted.begin(), sorted.end(), [](Complex x, Complex y) {
    if (x.real() != y.real()) return x.real() < y.real();
    if (std::abs(x.imag()) != std::abs(y.imag())) {
      return std::abs(x.imag()) < std::abs(y.imag());
    }
    return x.imag() > y.imag();
  });
  std::vector<EigenInfo> out;
  out.reserve(sorted.size());
  for (const auto& v : sorted) out.push_back(describe_eigenvalue(v));
  return out;
}

std::vector<EigenInfo> spectrum(const StateSpacePlant& plant) {
  return spectrum(plant.a());
}

CMatrix evaluate(const StateSpacePlant& plant, Complex s) {
  CMatrix g = plant.d().cast<Complex>();
  const int n = plant.states();
  if (n == 0) return g;
  CMatrix resolvent = -plant.a().cast<Complex>();
  resolvent.diagonal().array() += s;
  Eigen::PartialPivLU<CMatrix> lu(resolvent);
  if (!(lu.rcond() > 1e-14) || std::abs(lu.determinant()) == 0.0) {
    std::ostringstream os;
    os << "sI - A singular at s = " << s << " (plant '" << plant.label()
       << "')";
    throw Error(ErrorCode::kSingularAtFrequency, os.str());
  }
  g.noalias() += plant.c().cast<Complex>() * lu.solve(plant.b().cast<Complex>());
  return g;
}

CMatrix freq_response(const StateSpacePlant& plant, double omega) {
  return evaluate(plant, Complex(0.0, omega));
}

StateSpacePlant series(const StateSpacePlant& first,
                       const StateSpacePlant& second) {
  if (first.outputs() != second.inputs()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "series connection: " + std::to_string(first.outputs()) +
                    " outputs feed " + std::to_string(second.inputs()) +
                    " inputs");
  }
  const int n1 = first.states();
  const int n2 = second.states();
  Matrix a = Matrix::Zero(n1 + n2, n1 + n2);
  a.topLeftCorner(n1, n1) = first.a();
  a.bottomLeftCorner(n2, n1) = second.b() * first.c();
  a.bottomRightCorner(n2, n2) = second.a();
  Matrix b(n1 + n2, first.inputs());
  b.topRows(n1) = first.b();
  b.bottomRows(n2) = second.b() * first.d();
  Matrix c(second.outputs(), n1 + n2);
  c.leftCols(n1) = second.d() * first.c();
  c.rightCols(n2) = second.c();
  Matrix d = second.d() * first.d();
  return StateSpacePlant(std::move(a), std::move(b), std::move(c),
                         std::move(d), second.label());
}

StateSpacePlant append(const StateSpacePlant& lhs,
                       const StateSpacePlant& rhs) {
  const int n1 = lhs.states(), n2 = rhs.states();
  const int m1 = lhs.inputs(), m2 = rhs.inputs();
  const int r1 = lhs.outputs(), r2 = rhs.outputs();
  Matrix a = Matrix::Zero(n1 + n2, n1 + n2);
  a.topLeftCorner(n1, n1) = lhs.a();
  a.bottomRightCorner(n2, n2) = rhs.a();
  Matrix b = Matrix::Zero(n1 + n2, m1 + m2);
  b.topLeftCorner(n1, m1) = lhs.b();
  b.bottomRightCorner(n2, m2) = rhs.b();
  Matrix c = Matrix::Zero(r1 + r2, n1 + n2);
  c.topLeftCorner(r1, n1) = lhs.c();
  c.bottomRightCorner(r2, n2) = rhs.c();
  Matrix d = Matrix::Zero(r1 + r2, m1 + m2);
  d.topLeftCorner(r1, m1) = lhs.d();
  d.bottomRightCorner(r2, m2) = rhs.d();
  return StateSpacePlant(std::move(a), std::move(b), std::move(c),
                         std::move(d));
}

StateSpacePlant realize_bank(const CompensatorBank& bank) {
  const int channels = bank.channels();
  const int n = bank.states();
  Matrix a = Matrix::Zero(n, n);
  Matrix b = Matrix::Zero(n, channels);
  Matrix c = Matrix::Zero(channels, n);
  Matrix d = Matrix::Zero(channels, channels);
  int state = 0;
  for (int k = 0; k < channels; ++k) {
    const Section& s = bank.sections[k];
    if (s.is_static) {
      if (s.d == 0.0) {
        throw Error(ErrorCode::kImproperSection,
                    "static section " + std::to_string(k) + " has d = 0");
      }
      d(k, k) = s.b / s.d;
      continue;
    }
    if (s.c == 0.0) {
      throw Error(ErrorCode::kImproperSection,
                  "section " + std::to_string(k) +
                      " has zero leading denominator coefficient");
    }
    // (as + b)/(cs + d) = a/c + ((b - a d / c) / c) / (s + d/c)
    const double hf = s.a / s.c;
    a(state, state) = -s.d / s.c;
    b(state, k) = 1.0;
    c(k, state) = (s.b - hf * s.d) / s.c;
    d(k, k) = hf;
    ++state;
  }
  return StateSpacePlant(std::move(a), std::move(b), std::move(c),
                         std::move(d));
}

StateSpacePlant augment_plant(const CompensatorBank& w_out,
                              const StateSpacePlant& plant,
                              const CompensatorBank& w_in) {
  if (w_in.channels() != plant.inputs() ||
      w_out.channels() != plant.outputs()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "compensators are " + std::to_string(w_out.channels()) +
                    "/" + std::to_string(w_in.channels()) +
                    " channels, plant '" + plant.label() + "' is " +
                    std::to_string(plant.outputs()) + "x" +
                    std::to_string(plant.inputs()));
  }
  const StateSpacePlant wi = realize_bank(w_in);
  const StateSpacePlant wo = realize_bank(w_out);
  const int np = plant.states(), ni = wi.states(), no = wo.states();
  const int m = wi.inputs(), r = wo.outputs();
  const int n = np + ni + no;

  Matrix a = Matrix::Zero(n, n);
  a.block(0, 0, np, np) = plant.a();
  a.block(0, np, np, ni) = plant.b() * wi.c();
  a.block(np, np, ni, ni) = wi.a();
  a.block(np + ni, 0, no, np) = wo.b() * plant.c();
  a.block(np + ni, np, no, ni) = wo.b() * plant.d() * wi.c();
  a.block(np + ni, np + ni, no, no) = wo.a();

  Matrix b = Matrix::Zero(n, m);
  b.middleRows(0, np) = plant.b() * wi.d();
  b.middleRows(np, ni) = wi.b();
  b.middleRows(np + ni, no) = wo.b() * plant.d() * wi.d();

  Matrix c = Matrix::Zero(r, n);
  c.middleCols(0, np) = wo.d() * plant.c();
  c.middleCols(np, ni) = wo.d() * plant.d() * wi.c();
  c.middleCols(np + ni, no) = wo.c();

  Matrix d = wo.d() * plant.d() * wi.d();
  return StateSpacePlant(std::move(a), std::move(b), std::move(c),
                         std::move(d), plant.label());
}

double max_singular_value(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  if (m.size() == 1) return std::abs(m(0, 0));
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues()(0);
}

double min_singular_value(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  if (m.size() == 1) return std::abs(m(0, 0));
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

}  // namespace rssd
