#include "rssd/scp.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "rssd/error.hpp"

namespace rssd {
namespace {

std::string section_name(int index) {
  return "section " + std::to_string(index);
}

void validate_section(const Section& s, int index) {
  if (!std::isfinite(s.a) || !std::isfinite(s.b) || !std::isfinite(s.c) ||
      !std::isfinite(s.d)) {
    throw Error(ErrorCode::kInvalidSection,
                section_name(index) + " has non-finite coefficients");
  }
  if (s.d == 0.0) {
    throw Error(ErrorCode::kInvalidSection, section_name(index) + " has d = 0");
  }
  if (s.is_static) return;
  if (s.c == 0.0) {
    throw Error(ErrorCode::kImproperSection,
                section_name(index) + " has c = 0 but a != 0");
  }
  if (!(-s.d / s.c < 0.0)) {
    std::ostringstream os;
    os << section_name(index) << " pole " << -s.d / s.c
       << " is not in the open left half plane";
    throw Error(ErrorCode::kUnstableSection, os.str());
  }
}

// Finite generalized eigenvalues of the square pencil [A B; C D] - s[I 0; 0 0].
std::vector<Complex> square_pencil_zeros(const Matrix& a, const Matrix& b,
                                         const Matrix& c, const Matrix& d) {
  const int n = static_cast<int>(a.rows());
  const int p = static_cast<int>(b.cols());
  Matrix m(n + p, n + p);
  m << a, b, c, d;
  Matrix e = Matrix::Zero(n + p, n + p);
  e.topLeftCorner(n, n).setIdentity();
  Eigen::GeneralizedEigenSolver<Matrix> ges(m, e, false);
  if (ges.info() != Eigen::Success) {
    throw Error(ErrorCode::kComputationFailed, "QZ iteration failed");
  }
  std::vector<Complex> out;
  const double scale = std::max(1.0, m.norm());
  for (int i = 0; i < ges.alphas().size(); ++i) {
    const Complex alpha = ges.alphas()(i);
    const double beta = ges.betas()(i);
    if (std::abs(beta) > 1e-10 * std::max(std::abs(alpha), 1e-300) &&
        std::abs(beta) > 1e-13 * scale) {
      out.push_back(alpha / beta);
    }
  }
  return out;
}

bool rank_drops(const StateSpacePlant& plant, Complex z) {
  const int n = plant.states();
  const int m = plant.inputs(), r = plant.outputs();
  CMatrix sys(n + r, n + m);
  CMatrix shifted = plant.a().cast<Complex>();
  shifted.diagonal().array() -= z;
  sys << shifted, plant.b().cast<Complex>(), plant.c().cast<Complex>(),
      plant.d().cast<Complex>();
  Eigen::JacobiSVD<CMatrix> svd(sys);
  const auto& sv = svd.singularValues();
  const int normal_rank = n + std::min(m, r);
  return sv(normal_rank - 1) <= 1e-8 * std::max(1.0, sv(0));
}

bool near(Complex x, Complex y, double tol) {
  return std::abs(x - y) <= tol * std::max(1.0, std::abs(y));
}

double sigma_min_db(const StateSpacePlant& plant, double omega) {
  CMatrix g;
  try {
    g = freq_response(plant, omega);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kSingularAtFrequency) throw;
    g = freq_response(plant, omega + 1e-6 * std::max(1.0, omega));
  }
  const double s = min_singular_value(g);
  return s > 0.0 ? 20.0 * std::log10(s)
                 : -std::numeric_limits<double>::infinity();
}

}  // namespace

void validate_constraints(const ScpConstraints& constraints, int inputs,
                          int outputs) {
  if (static_cast<int>(constraints.input_boxes.size()) != inputs ||
      static_cast<int>(constraints.output_boxes.size()) != outputs) {
    throw Error(ErrorCode::kDimensionMismatch,
                "compensator boxes must match plant inputs/outputs");
  }
  if (!(constraints.band_lo < constraints.band_hi)) {
    throw Error(ErrorCode::kInvalidArgument, "band_lo must be < band_hi");
  }
  if (!std::isfinite(constraints.dc_floor_db)) {
    throw Error(ErrorCode::kInvalidArgument, "DC floor must be finite");
  }
  for (const auto* boxes : {&constraints.input_boxes, &constraints.output_boxes}) {
    for (const auto& box : *boxes) {
      for (const Interval* iv : {&box.a, &box.b, &box.c, &box.d}) {
        if (!(iv->lo <= iv->hi)) {
          throw Error(ErrorCode::kInvalidArgument, "empty coefficient box");
        }
      }
    }
  }
}

void validate_bank(const CompensatorBank& bank) {
  for (int k = 0; k < bank.channels(); ++k) {
    validate_section(bank.sections[k], k);
  }
}

CompensatorBank decode_bank(std::span<const double> genes, BankSide side,
                            std::span<const SectionBox> boxes) {
  if (genes.size() != 4 * boxes.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "expected " + std::to_string(4 * boxes.size()) +
                    " genes, got " + std::to_string(genes.size()));
  }
  CompensatorBank bank;
  bank.side = side;
  for (std::size_t k = 0; k < boxes.size(); ++k) {
    const double* g = genes.data() + 4 * k;
    const SectionBox& box = boxes[k];
    const Interval* ivs[4] = {&box.a, &box.b, &box.c, &box.d};
    for (int j = 0; j < 4; ++j) {
      if (!ivs[j]->contains(g[j])) {
        std::ostringstream os;
        os << section_name(static_cast<int>(k)) << " coefficient "
           << "abcd"[j] << " = " << g[j] << " outside [" << ivs[j]->lo << ", "
           << ivs[j]->hi << "]";
        throw Error(ErrorCode::kOutOfBox, os.str());
      }
    }
    Section s = Section::first_order(g[0], g[1], g[2], g[3]);
    if (g[2] == 0.0 && g[0] == 0.0) s.is_static = true;
    validate_section(s, static_cast<int>(k));
    bank.sections.push_back(s);
  }
  return bank;
}

std::vector<double> encode_bank(const CompensatorBank& bank) {
  std::vector<double> genes;
  for (const auto& s : bank.sections) {
    genes.insert(genes.end(), {s.a, s.b, s.c, s.d});
  }
  return genes;
}

std::vector<Complex> transmission_zeros(const StateSpacePlant& plant) {
  const int n = plant.states();
  const int m = plant.inputs(), r = plant.outputs();
  if (n == 0) return {};
  if (m == r) {
    return square_pencil_zeros(plant.a(), plant.b(), plant.c(), plant.d());
  }
  // Square down with two fixed random projections; true zeros survive both
  // and are confirmed by the rank drop of the full system matrix.
  std::mt19937_64 rng(0x5eedULL);
  std::normal_distribution<double> normal;
  auto project = [&]() {
    const int k = std::min(m, r);
    Matrix q(k, std::max(m, r));
    for (int i = 0; i < q.rows(); ++i)
      for (int j = 0; j < q.cols(); ++j) q(i, j) = normal(rng);
    if (r > m) {
      return square_pencil_zeros(plant.a(), plant.b(), q * plant.c(),
                                 q * plant.d());
    }
    return square_pencil_zeros(plant.a(), plant.b() * q.transpose(),
                               plant.c(), plant.d() * q.transpose());
  };
  const auto first = project();
  const auto second = project();
  std::vector<Complex> out;
  for (const Complex z : first) {
    const bool in_both = std::any_of(second.begin(), second.end(),
                                     [&](Complex w) { return near(z, w, 1e-6); });
    if (in_both && rank_drops(plant, z)) out.push_back(z);
  }
  return out;
}

PlantRoots plant_roots(const PlantSet& set) {
  PlantRoots roots;
  for (const auto& p : set) {
    const CVector ev = eigenvalues(p.a());
    roots.poles.emplace_back(ev.data(), ev.data() + ev.size());
    roots.zeros.push_back(transmission_zeros(p));
  }
  return roots;
}

ConstraintReport check_constraints(const CompensatorBank& w_in,
                                   const CompensatorBank& w_out,
                                   const PlantSet& set,
                                   const ScpConstraints& constraints,
                                   const FrequencyGrid& grid) {
  return check_constraints(w_in, w_out, set, plant_roots(set), constraints,
                           grid);
}

ConstraintReport check_constraints(const CompensatorBank& w_in,
                                   const CompensatorBank& w_out,
                                   const PlantSet& set, const PlantRoots& roots,
                                   const ScpConstraints& constraints,
                                   const FrequencyGrid& grid) {
  if (!constraints.per_plant_band_hi.empty() &&
      static_cast<int>(constraints.per_plant_band_hi.size()) != set.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "per-plant band edges must list one value per plant");
  }
  ConstraintReport report;
  auto fail = [&](std::string reason) {
    report.pass = false;
    ++report.violations;
    report.reasons.push_back(std::move(reason));
  };

  std::vector<std::pair<std::string, Complex>> comp_roots;
  for (const auto* bank : {&w_in, &w_out}) {
    const char* side = bank == &w_in ? "w_in" : "w_out";
    for (int k = 0; k < bank->channels(); ++k) {
      const Section& s = bank->sections[k];
      const std::string tag = std::string(side) + "[" + std::to_string(k) + "]";
      if (auto p = s.pole()) comp_roots.emplace_back(tag + " pole", *p);
      if (auto z = s.zero()) comp_roots.emplace_back(tag + " zero", *z);
    }
  }

  for (int f = 0; f < set.size(); ++f) {
    const StateSpacePlant aug = augment_plant(w_out, set[f], w_in);
    const std::string who = "plant '" + set[f].label() + "'";

    const double dc = sigma_min_db(aug, 0.0);
    if (!(dc > constraints.dc_floor_db)) {
      std::ostringstream os;
      os << who << ": DC sigma_min " << dc << " dB <= floor "
         << constraints.dc_floor_db << " dB";
      fail(os.str());
    }

    const double hi = constraints.per_plant_band_hi.empty()
                          ? constraints.band_hi
                          : constraints.per_plant_band_hi[f];
    std::vector<double> band{constraints.band_lo, hi};
    for (double w : grid.points()) {
      if (w > constraints.band_lo && w < hi) band.push_back(w);
    }
    for (double w : band) {
      const double db = sigma_min_db(aug, w);
      if (!(db > 0.0)) {
        std::ostringstream os;
        os << who << ": sigma_min " << db << " dB at " << w
           << " rad/s inside the crossover band";
        fail(os.str());
        break;
      }
    }

    for (const auto& [tag, root] : comp_roots) {
      for (const auto* list : {&roots.poles[f], &roots.zeros[f]}) {
        for (const Complex target : *list) {
          if (near(root, target, constraints.cancellation_tol)) {
            std::ostringstream os;
            os << who << ": pole-zero cancellation between " << tag << " "
               << root << " and plant "
               << (list == &roots.poles[f] ? "pole " : "zero ") << target;
            fail(os.str());
          }
        }
      }
    }
  }
  return report;
}

PlantSet augment_set(const CompensatorBank& w_out, const PlantSet& set,
                     const CompensatorBank& w_in) {
  std::vector<StateSpacePlant> plants;
  plants.reserve(set.size());
  for (const auto& p : set) plants.push_back(augment_plant(w_out, p, w_in));
  return PlantSet(std::move(plants));
}

J1Result j1_fitness(const CompensatorBank& w_in, const CompensatorBank& w_out,
                    const PlantSet& set, const FrequencyGrid& grid,
                    const VgapOptions& options) {
  const PlantSet augmented = augment_set(w_out, set, w_in);
  CentralPlantResult cp = central_plant(augmented, grid, options);
  return J1Result{cp.epsilon, cp.index, augmented[cp.index],
                  std::move(cp.gap_matrix)};
}

}  // namespace rssd
