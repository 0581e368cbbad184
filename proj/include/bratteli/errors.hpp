#pragma once

#include <stdexcept>
#include <string>

namespace bratteli {

// Invalid graph, metric, kernel or configuration input.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A measure whose level distributions are not coherent, or a forward
// kernel that violates the centrality identity on some edge.
class IncoherentMeasureError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A requested computation exceeds a configured size bound.
class ResourceBoundError : public std::length_error {
 public:
  using std::length_error::length_error;
};

}  // namespace bratteli
