#pragma once

#include <stdexcept>
#include <string>

namespace dsfs {

// Root of the toolkit's exception hierarchy. Recoverable outcomes (an
// infeasible LP, an infeasible sample) are statuses, not exceptions; anything
// below means the caller violated a contract or a computation broke down.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Inputs whose shapes do not line up (matrix/vector sizes, horizon counts).
struct DimensionMismatch : Error {
  using Error::Error;
};

// Config values outside their documented domain.
struct InvalidConfig : Error {
  using Error::Error;
};

// Iteration cap hit, singular basis, non-finite arithmetic inside a solver.
struct NumericalFailure : Error {
  using Error::Error;
};

// An LP embedded in a higher-level routine returned a status the routine
// cannot interpret (e.g. an always-feasible slack program came back
// infeasible).
struct SolverFailure : Error {
  using Error::Error;
};

// Feeder line set is not a spanning tree over the buses.
struct DisconnectedFeeder : Error {
  using Error::Error;
};

// Assembled operating set {p : Wp <= z} has no point at all.
struct EmptyInterior : Error {
  using Error::Error;
};

// Assembled operating set is unbounded in some coordinate.
struct UnboundedModel : Error {
  using Error::Error;
};

// Robust box requested on a model whose flexibility set is empty.
struct InfeasibleModel : Error {
  using Error::Error;
};

// Layer size list that cannot form a scalar-output classifier.
struct InvalidArchitecture : Error {
  using Error::Error;
};

// Transfer between networks whose layer sizes differ.
struct ArchitectureMismatch : Error {
  using Error::Error;
};

// Training or scoring invoked on an empty sample set.
struct EmptyDataset : Error {
  using Error::Error;
};

// Loss became NaN or infinite during training.
struct NonFiniteLoss : Error {
  using Error::Error;
};

// Active learning asked to select from an exhausted pool.
struct EmptyPool : Error {
  using Error::Error;
};

// Nonpositive sample count where at least one point is required.
struct InvalidCount : Error {
  using Error::Error;
};

// Scoring invoked on an empty test set.
struct EmptyTestSet : Error {
  using Error::Error;
};

// Index or window outside the valid range.
struct OutOfRange : Error {
  using Error::Error;
};

// File could not be read, written, or parsed.
struct IoError : Error {
  using Error::Error;
};

}  // namespace dsfs
