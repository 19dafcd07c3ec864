#pragma once

#include <stdexcept>
#include <string>

namespace geotomo {

// Input outside the closed unit disc, or an otherwise invalid argument domain.
struct OutsideDomain : std::runtime_error {
  explicit OutsideDomain(const std::string& what) : std::runtime_error(what) {}
};

// A traced segment never crosses the boundary circle.
struct NoIntersection : std::runtime_error {
  explicit NoIntersection(const std::string& what) : std::runtime_error(what) {}
};

struct MaxStepsExceeded : std::runtime_error {
  explicit MaxStepsExceeded(const std::string& what) : std::runtime_error(what) {}
};

// A scalar potential that is supposed to vanish on the boundary does not.
struct BoundaryNonzero : std::runtime_error {
  explicit BoundaryNonzero(const std::string& what) : std::runtime_error(what) {}
};

// Iterative solver ran out of iterations while the residual was still large.
struct NonConvergence : std::runtime_error {
  explicit NonConvergence(const std::string& what) : std::runtime_error(what) {}
};

// Landweber residual grew far beyond its running minimum (step size too large).
struct DivergenceDetected : std::runtime_error {
  explicit DivergenceDetected(const std::string& what) : std::runtime_error(what) {}
};

struct ZeroField : std::runtime_error {
  explicit ZeroField(const std::string& what) : std::runtime_error(what) {}
};

struct UnknownPhantom : std::runtime_error {
  explicit UnknownPhantom(const std::string& what) : std::runtime_error(what) {}
};

struct BadConfig : std::runtime_error {
  explicit BadConfig(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace geotomo
