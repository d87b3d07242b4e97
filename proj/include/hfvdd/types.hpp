// Scalar and vector aliases shared across the library.
#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace hfvdd {

using Real = double;
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

// One value per cell plus one value per face.
struct HybridVector {
  Vector cell;
  Vector face;

  HybridVector() = default;
  HybridVector(Index n_cells, Index n_faces)
      : cell(Vector::Zero(n_cells)), face(Vector::Zero(n_faces)) {}

  static HybridVector Constant(Index n_cells, Index n_faces, Real v) {
    HybridVector out;
    out.cell = Vector::Constant(n_cells, v);
    out.face = Vector::Constant(n_faces, v);
    return out;
  }

  HybridVector& operator+=(const HybridVector& o) {
    cell += o.cell;
    face += o.face;
    return *this;
  }
  HybridVector& operator-=(const HybridVector& o) {
    cell -= o.cell;
    face -= o.face;
    return *this;
  }
  HybridVector& operator*=(Real s) {
    cell *= s;
    face *= s;
    return *this;
  }

  friend HybridVector operator+(HybridVector a, const HybridVector& b) { return a += b; }
  friend HybridVector operator-(HybridVector a, const HybridVector& b) { return a -= b; }
  friend HybridVector operator*(Real s, HybridVector a) { return a *= s; }

  Real sup_norm() const {
    Real c = cell.size() ? cell.cwiseAbs().maxCoeff() : 0.0;
    Real f = face.size() ? face.cwiseAbs().maxCoeff() : 0.0;
    return std::max(c, f);
  }
  Real min() const {
    Real c = cell.size() ? cell.minCoeff() : std::numeric_limits<Real>::infinity();
    Real f = face.size() ? face.minCoeff() : std::numeric_limits<Real>::infinity();
    return std::min(c, f);
  }
  Real max() const {
    Real c = cell.size() ? cell.maxCoeff() : -std::numeric_limits<Real>::infinity();
    Real f = face.size() ? face.maxCoeff() : -std::numeric_limits<Real>::infinity();
    return std::max(c, f);
  }
};

// Thrown when an input file, config, or mesh is structurally invalid.
struct InvalidInput : std::runtime_error {
  explicit InvalidInput(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown when an iterative solve fails (Newton stall, time step underflow, ...).
struct SolverError : std::runtime_error {
  explicit SolverError(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown when a file cannot be opened, read, or written.
struct IoError : std::runtime_error {
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace hfvdd
