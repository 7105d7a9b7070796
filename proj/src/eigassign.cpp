#include "rssd/eigassign.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "rssd/error.hpp"

namespace rssd {
namespace {

// Orthonormal basis of the right null space of m, rank tolerance
// 1e-10 * sigma_max.
Matrix null_space(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double tol = sv.size() > 0 ? 1e-10 * std::max(sv(0), 1e-300) : 0.0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i) rank += sv(i) > tol ? 1 : 0;
  return svd.matrixV().rightCols(m.cols() - rank);
}

void normalize_default(Vector& x) {
  const double norm = x.norm();
  if (norm == 0.0) return;
  x /= norm;
  for (int i = 0; i < x.size(); ++i) {
    if (std::abs(x(i)) > 1e-12) {
      if (x(i) < 0.0) x = -x;
      break;
    }
  }
}

}  // namespace

void validate_target(const EigTarget& target, int states, int outputs) {
  if (!(target.zeta_min > 0.0 && target.zeta_min < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "zeta_min must lie in (0, 1)");
  }
  if (target.assigned_count() != outputs) {
    throw Error(ErrorCode::kInvalidArgument,
                "target assigns " + std::to_string(target.assigned_count()) +
                    " eigenvalues, plant has " + std::to_string(outputs) +
                    " outputs");
  }
  for (const auto& slot : target.slots) {
    if (slot.re_box.lo > slot.re_box.hi ||
        (slot.complex_pair && slot.im_box.lo > slot.im_box.hi)) {
      throw Error(ErrorCode::kInvalidArgument, "empty eigenvalue search box");
    }
    for (const auto& e : slot.entries) {
      if (e.state < 0 || e.state >= states) {
        throw Error(ErrorCode::kInvalidArgument,
                    "constrained entry state index " +
                        std::to_string(e.state) + " out of range");
      }
      if (e.re.lo > e.re.hi || (slot.complex_pair && e.im.lo > e.im.hi)) {
        throw Error(ErrorCode::kInvalidArgument, "empty eigenvector box");
      }
    }
  }
}

SubspaceBasis allowable_subspace(const Matrix& a, const Matrix& b,
                                 Complex lambda) {
  const int n = static_cast<int>(a.rows());
  const int m = static_cast<int>(b.cols());
  if (a.cols() != n || b.rows() != n) {
    throw Error(ErrorCode::kDimensionMismatch,
                "allowable subspace needs square A and matching B");
  }
  SubspaceBasis out;
  out.states = n;
  out.inputs = m;
  out.complex_pair = lambda.imag() != 0.0;
  out.eigenvalue = out.complex_pair
                       ? Complex(lambda.real(), std::abs(lambda.imag()))
                       : lambda;
  const double re = out.eigenvalue.real();
  const double im = out.eigenvalue.imag();
  const Matrix id = Matrix::Identity(n, n);

  Matrix pencil;
  if (!out.complex_pair) {
    pencil.resize(n, n + m);
    pencil << a - re * id, b;
  } else {
    pencil = Matrix::Zero(2 * n, 2 * n + 2 * m);
    pencil.block(0, 0, n, n) = a - re * id;
    pencil.block(0, n, n, n) = im * id;
    pencil.block(0, 2 * n, n, m) = b;
    pencil.block(n, 0, n, n) = -im * id;
    pencil.block(n, n, n, n) = a - re * id;
    pencil.block(n, 2 * n + m, n, m) = b;
  }
  out.basis = null_space(pencil);
  if (out.basis.cols() == 0) {
    std::ostringstream os;
    os << "no allowable eigenvectors for lambda = " << lambda;
    throw Error(ErrorCode::kEmptySubspace, os.str());
  }
  return out;
}

EigenvectorSet select_vectors(
    const std::vector<SubspaceBasis>& subspaces, const EigTarget& target,
    const std::vector<std::vector<Complex>>& entry_values) {
  if (subspaces.size() != target.slots.size() ||
      entry_values.size() != target.slots.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "one subspace and one entry list per slot required");
  }
  const int cols = target.assigned_count();
  const int n = subspaces.empty() ? 0 : subspaces.front().states;
  const int m = subspaces.empty() ? 0 : subspaces.front().inputs;
  EigenvectorSet out;
  out.r = Matrix::Zero(n, cols);
  out.w = Matrix::Zero(m, cols);

  int col = 0;
  for (std::size_t k = 0; k < subspaces.size(); ++k) {
    const SubspaceBasis& sub = subspaces[k];
    const EigSlot& slot = target.slots[k];
    if (sub.complex_pair != slot.complex_pair) {
      throw Error(ErrorCode::kInvalidArgument,
                  "subspace/slot conjugate-pair mismatch");
    }
    const auto& values = entry_values[k];
    if (values.size() != slot.entries.size()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "entry value count does not match constrained entries");
    }
    const Matrix& basis = sub.basis;
    const int parts = slot.complex_pair ? 2 : 1;
    const int rows = parts * static_cast<int>(slot.entries.size());

    Matrix selected(rows, basis.cols());
    Vector wanted(rows);
    for (std::size_t e = 0; e < slot.entries.size(); ++e) {
      const int state = slot.entries[e].state;
      selected.row(parts * e) = basis.row(state);
      wanted(parts * e) = values[e].real();
      if (slot.complex_pair) {
        selected.row(parts * e + 1) = basis.row(n + state);
        wanted(parts * e + 1) = values[e].imag();
      }
    }

    Vector coeff;
    if (rows == 0) {
      coeff = Vector::Unit(basis.cols(), 0);
    } else {
      Eigen::JacobiSVD<Matrix> svd(selected,
                                   Eigen::ComputeThinU | Eigen::ComputeFullV);
      svd.setThreshold(1e-10);
      coeff = svd.solve(wanted);
      const int rank = static_cast<int>(svd.rank());
      const Matrix free = svd.matrixV().rightCols(basis.cols() - rank);
      if (free.cols() > 0) {
        // Fix the remaining scale along the free direction closest to a
        // basis column so the eigenvector does not collapse to zero.
        const Matrix projector = free * free.transpose();
        int best = 0;
        projector.colwise().norm().maxCoeff(&best);
        const Vector direction = projector.col(best);
        coeff += direction / direction.norm();
      }
    }
    Vector x = basis * coeff;
    if (rows == 0) normalize_default(x);

    std::vector<Complex> achieved;
    for (std::size_t e = 0; e < slot.entries.size(); ++e) {
      const EntryConstraint& c = slot.entries[e];
      const Complex value(x(c.state),
                          slot.complex_pair ? x(n + c.state) : 0.0);
      achieved.push_back(value);
      auto outside = [](const Interval& box, double v) {
        const double slack = 1e-2 * box.width() + 1e-12;
        return v < box.lo - slack || v > box.hi + slack;
      };
      if (outside(c.re, value.real()) ||
          (slot.complex_pair && outside(c.im, value.imag()))) {
        std::ostringstream os;
        os << "entry for state " << c.state << " achieved " << value
           << ", outside its box";
        throw Error(ErrorCode::kBoundViolation, os.str());
      }
    }
    out.achieved.push_back(std::move(achieved));

    if (!slot.complex_pair) {
      out.r.col(col) = x.head(n);
      out.w.col(col) = x.tail(m);
      col += 1;
    } else {
      out.r.col(col) = x.segment(0, n);
      out.r.col(col + 1) = x.segment(n, n);
      out.w.col(col) = x.segment(2 * n, m);
      out.w.col(col + 1) = x.segment(2 * n + m, m);
      col += 2;
    }
  }
  return out;
}

double condition_number(const Matrix& m) {
  if (m.size() == 0) return 1.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& sv = svd.singularValues();
  const double smin = sv(sv.size() - 1);
  if (!(smin > 0.0)) return std::numeric_limits<double>::infinity();
  return sv(0) / smin;
}

GainResult compute_gain(const Matrix& w, const Matrix& r, const Matrix& c,
                        double kappa_limit) {
  if (c.cols() != r.rows() || c.rows() != r.cols() || w.cols() != r.cols()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "C R must be square and W must have one column per R column");
  }
  const Matrix cr = c * r;
  GainResult out;
  out.kappa = condition_number(cr);
  if (!(out.kappa < kappa_limit)) {
    std::ostringstream os;
    os << "kappa(CR) = " << out.kappa << " >= " << kappa_limit;
    throw Error(ErrorCode::kIllConditioned, os.str());
  }
  out.gain = cr.transpose().partialPivLu().solve(w.transpose()).transpose();
  return out;
}

bool in_region_s1(Complex value, const EigTarget& target) {
  if (!(value.real() < 0.0)) return false;
  const double zeta = -value.real() / std::abs(value);
  if (zeta < target.zeta_min) return false;
  if (target.sigma_max && value.real() > *target.sigma_max) return false;
  return true;
}

S1Check check_s1(const std::vector<EigenInfo>& spectrum,
                 const EigTarget& target) {
  S1Check out;
  for (const auto& info : spectrum) {
    if (!in_region_s1(info.value, target)) {
      out.pass = false;
      out.offending.push_back(info.value);
    }
  }
  return out;
}

std::vector<SubspaceBasis> slot_subspaces(const StateSpacePlant& plant,
                                          const std::vector<Complex>& values) {
  std::vector<SubspaceBasis> out;
  out.reserve(values.size());
  for (const Complex v : values) {
    out.push_back(allowable_subspace(plant.a(), plant.b(), v));
  }
  return out;
}

}  // namespace rssd
