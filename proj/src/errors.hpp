#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace itsforge {

// Error taxonomy. Three classes matter to callers:
//  - input errors: unreadable/ill-formed templates, parameters or models
//  - infeasibility errors: the inputs admit no consistent system
//  - internal errors: a generator invariant broke (always a bug)
// The C API and the CLI map these onto result/exit codes.
class Error : public std::runtime_error {
public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

private:
  std::string code_;
};

struct InputError : Error {
  explicit InputError(const std::string& m) : Error("input", m) {}
};

struct InternalError : Error {
  explicit InternalError(const std::string& m) : Error("internal", m) {}
};

struct InfeasibleError : Error {
  InfeasibleError(std::string code, const std::string& m) : Error(std::move(code), m) {}
};

// A local-dependency regex of some template matches no template in the catalog.
struct UnsatisfiableDependency : InfeasibleError {
  explicit UnsatisfiableDependency(const std::string& m)
      : InfeasibleError("unsatisfiable_dependency", m) {}
};

// A required network-service group has no providing variant anywhere.
struct NoServerCandidate : InfeasibleError {
  explicit NoServerCandidate(const std::string& m)
      : InfeasibleError("no_server_candidate", m) {}
};

// The selection ILP has no feasible point (e.g. a role requirement nobody provides).
struct InfeasibleSelection : InfeasibleError {
  explicit InfeasibleSelection(const std::string& m)
      : InfeasibleError("infeasible_selection", m) {}
};

// A solver exceeded its search budget; results would not be trustworthy.
struct SizeLimitExceeded : InfeasibleError {
  explicit SizeLimitExceeded(const std::string& m)
      : InfeasibleError("size_limit_exceeded", m) {}
};

// No segment count up to max_segments satisfies the network policies.
struct SegmentationInfeasible : InfeasibleError {
  explicit SegmentationInfeasible(const std::string& m)
      : InfeasibleError("segmentation_infeasible", m) {}
};

// A single installation plus its dependency stack exceeds the hardware quota.
struct QuotaImpossible : InfeasibleError {
  explicit QuotaImpossible(const std::string& m)
      : InfeasibleError("quota_impossible", m) {}
};

// A dataset instance has no installation eligible to act as its primary store.
struct NoEligibleStore : InfeasibleError {
  explicit NoEligibleStore(const std::string& m)
      : InfeasibleError("no_eligible_store", m) {}
};

}  // namespace itsforge
