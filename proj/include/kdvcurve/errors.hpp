#pragma once

#include <array>
#include <stdexcept>
#include <string>

namespace kdvcurve {

/// Base class for every domain error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class GridMismatchError : public Error {
 public:
  GridMismatchError(std::size_t a, std::size_t b)
      : Error("grid mismatch: " + std::to_string(a) + " vs " + std::to_string(b) + " points") {}
};

class NonFiniteError : public Error {
 public:
  explicit NonFiniteError(const std::string& where) : Error("non-finite sample in " + where) {}
};

/// D_s^{-1} was asked to act on a function whose mean is not zero.
/// `step` is the index of the failing application inside a power Omega^k (or -1).
class NonZeroMeanError : public Error {
 public:
  explicit NonZeroMeanError(double mean, int step = -1)
      : Error("antiderivative undefined: mean = " + std::to_string(mean) +
              (step >= 0 ? " at step " + std::to_string(step) : std::string{})),
        mean_(mean),
        step_(step) {}

  double mean() const noexcept { return mean_; }
  int step() const noexcept { return step_; }

 private:
  double mean_;
  int step_;
};

class NotTangentError : public Error {
 public:
  explicit NotTangentError(double residual)
      : Error("vector field violates the linearized constraint, residual = " + std::to_string(residual)),
        residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class NotLevelTangentError : public Error {
 public:
  NotLevelTangentError(int order, double value)
      : Error("tangent is not annihilated by dH_" + std::to_string(order) + " (value " + std::to_string(value) + ")"),
        order_(order),
        value_(value) {}
  int order() const noexcept { return order_; }
  double value() const noexcept { return value_; }

 private:
  int order_;
  double value_;
};

class UnsupportedOrderError : public Error {
 public:
  explicit UnsupportedOrderError(int order)
      : Error("unsupported order " + std::to_string(order)), order_(order) {}
  int order() const noexcept { return order_; }

 private:
  int order_;
};

/// The requested curvature does not close up. For the equicentroaffine case the
/// monodromy matrix (row-major) is attached; for the Euclidean case the closure
/// and rotation-index defects are.
class NotClosedError : public Error {
 public:
  explicit NotClosedError(const std::array<double, 4>& monodromy)
      : Error("curve does not close: monodromy = [[" + std::to_string(monodromy[0]) + ", " +
              std::to_string(monodromy[1]) + "], [" + std::to_string(monodromy[2]) + ", " +
              std::to_string(monodromy[3]) + "]]"),
        monodromy_(monodromy) {}
  NotClosedError(double closure_defect, double rotation_defect)
      : Error("curve does not close: closure defect " + std::to_string(closure_defect) +
              ", rotation-index defect " + std::to_string(rotation_defect)),
        closure_defect_(closure_defect),
        rotation_defect_(rotation_defect) {}

  const std::array<double, 4>& monodromy() const noexcept { return monodromy_; }
  double closure_defect() const noexcept { return closure_defect_; }
  double rotation_defect() const noexcept { return rotation_defect_; }

 private:
  std::array<double, 4> monodromy_{1, 0, 0, 1};
  double closure_defect_ = 0;
  double rotation_defect_ = 0;
};

class NotUnimodularError : public Error {
 public:
  explicit NotUnimodularError(double det) : Error("matrix is not unimodular, det = " + std::to_string(det)) {}
};

class NotTraceFreeError : public Error {
 public:
  explicit NotTraceFreeError(double trace) : Error("matrix is not trace-free, trace = " + std::to_string(trace)) {}
};

class NotOrthogonalError : public Error {
 public:
  explicit NotOrthogonalError(double defect)
      : Error("matrix is not orthogonal, defect = " + std::to_string(defect)) {}
};

class DegenerateConstraintError : public Error {
 public:
  explicit DegenerateConstraintError(double condition)
      : Error("constraint Gram matrix is degenerate, condition = " + std::to_string(condition)),
        condition_(condition) {}
  double condition_number() const noexcept { return condition_; }

 private:
  double condition_;
};

class StabilityError : public Error {
 public:
  StabilityError(double dt, double bound)
      : Error("time step " + std::to_string(dt) + " exceeds stability bound " + std::to_string(bound)),
        dt_(dt),
        bound_(bound) {}
  double dt() const noexcept { return dt_; }
  double bound() const noexcept { return bound_; }

 private:
  double dt_;
  double bound_;
};

class BlowupError : public Error {
 public:
  explicit BlowupError(double time) : Error("solution blew up at t = " + std::to_string(time)), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

class ConstraintDriftError : public Error {
 public:
  ConstraintDriftError(double defect, double time)
      : Error("constraint defect " + std::to_string(defect) + " at t = " + std::to_string(time)),
        defect_(defect),
        time_(time) {}
  double defect() const noexcept { return defect_; }
  double time() const noexcept { return time_; }

 private:
  double defect_;
  double time_;
};

}  // namespace kdvcurve
