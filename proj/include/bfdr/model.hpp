#pragma once

// Core value types shared by every stage of the pipeline: per-test records,
// null-proportion estimates, posterior tables, decisions and simulation
// bookkeeping. Nothing in here runs an algorithm beyond invariant checks.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace bfdr {

/// Thrown when an input violates a documented precondition.
class ValidationError : public std::invalid_argument {
public:
    ValidationError(std::size_t index, std::string field, const std::string& what)
        : std::invalid_argument(what), index_(index), field_(std::move(field)) {}

    std::size_t index() const noexcept { return index_; }
    const std::string& field() const noexcept { return field_; }

private:
    std::size_t index_;
    std::string field_;
};

/// Thrown when a computation leaves the representable range.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One hypothesis test. The Bayes factor is kept in natural scale and as its
/// logarithm; `bf` may saturate to +inf when only `log_bf` is representable.
struct TestRecord {
    std::string id;
    double bf = 1.0;
    double log_bf = 0.0;
    std::optional<double> z;
    std::optional<double> se;

    static TestRecord from_bf(std::string id, double bf);
    static TestRecord from_log_bf(std::string id, double log_bf);

    bool operator==(const TestRecord&) const = default;
};

/// Checks every record invariant and returns the input unchanged.
/// Throws ValidationError naming the index and field of the first violation.
const std::vector<TestRecord>& validate_records(const std::vector<TestRecord>& records);

enum class Pi0Method { EBF, QBF, STOREY, FIXED };

std::string_view to_string(Pi0Method method);

/// Upper-bound estimate of the null proportion.
struct Pi0Estimate {
    double pi0_hat = 1.0;
    Pi0Method method = Pi0Method::FIXED;
    std::optional<double> gamma;
    std::optional<std::size_t> d0;
    std::size_t m = 0;
    // EBF only: set when no prefix of the sorted Bayes factors has mean < 1.
    bool empty_prefix = false;

    static Pi0Estimate fixed(double pi0_hat, std::size_t m);
    /// Throws std::invalid_argument if the method-specific invariants fail.
    void check() const;
};

struct PosteriorEntry {
    std::string id;
    double v_hat = 0.0;
};

/// Conservative posteriors Pr(Z_i = 1 | data, pi0_hat), in input order.
struct PosteriorTable {
    std::vector<PosteriorEntry> entries;
    Pi0Estimate pi0;
};

struct DecisionReport {
    double alpha = 0.05;
    double threshold = 1.0;
    std::vector<std::string> rejected;      // input order
    double estimated_bfdr = 0.0;
    std::vector<std::string> auto_rejected; // subset of rejected, input order
};

struct SimParams {
    double pi0 = 1.0;
    std::size_t n = 0;
    double phi_low = 0.5;
    double phi_high = 1.5;
    std::uint64_t seed = 0;
};

/// Ground truth for a simulated data set; `z[i]` is 1 when test i is an alternative.
struct SimTruth {
    std::vector<std::string> ids;
    std::vector<std::uint8_t> z;
    SimParams params;

    std::size_t size() const noexcept { return z.size(); }
    std::size_t n_alternative() const noexcept;
};

struct EvalReport {
    double fdp = 0.0;
    double fnp = 0.0;
    std::size_t n_rejected = 0;
    std::size_t n_true_alt = 0;
};

} // namespace bfdr
