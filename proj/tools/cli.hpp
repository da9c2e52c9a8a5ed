#pragma once

#include <stepwise/algebra.hpp>
#include <stepwise/verify.hpp>

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace stepwise::cli {

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kUsage = 2, kData = 3 };

constexpr int kSchemaVersion = 1;

/// Bad command line, expression or compile request (exit 2).
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Unreadable or malformed input data (exit 3).
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// p-values with the text they were read from, so output can echo them
/// at full input precision.
struct PValueInput {
    std::vector<double> values;
    std::vector<std::string> raw;
};

/// One value per line with an optional "p" header, or the named column of
/// a CSV file whose first line is the header. Blank lines are skipped.
/// Throws DataError naming the offending line.
PValueInput read_pvalues(std::istream& in, const std::optional<std::string>& column = std::nullopt);
PValueInput read_pvalues_file(const std::string& path, const std::optional<std::string>& column = std::nullopt);

struct RankRow {
    std::size_t rank = 0;
    std::string p_value; // as read
    double p = 0.0;
    std::size_t original_index = 0;
    std::optional<double> threshold; // p scale, closed forms only
    bool rejected = false;
};

struct EvalReport {
    std::string expression;
    std::optional<double> alpha;
    std::size_t m = 0;
    std::string strategy;
    std::optional<std::string> kind;
    std::optional<std::string> transform;
    Claim monotonic = Claim::NotGuaranteed;
    Claim well_behaved = Claim::NotGuaranteed;
    std::vector<std::size_t> rejected;
    std::vector<RankRow> ranks;
};

/// Parses and compiles `expr_text`; ParseError and compile failures become UsageError.
CompiledProcedure compile_text(const std::string& expr_text, std::optional<double> alpha,
                               const CompileOptions& base = {});

EvalReport make_eval_report(const std::string& expr_text, const PValueInput& input, std::optional<double> alpha,
                            bool fuse_inexact = false);

std::string render_table(const EvalReport& report);
std::string render_json(const EvalReport& report);

/// Rounds to 6 significant digits for display.
double six_digits(double x);
std::string six_digits_text(double x);

struct PropertyResult {
    PropertyReport report;
    /// Empty when the property has no claim attached (always expected to hold).
    std::optional<Claim> claim;
    bool skipped = false;
    std::string skip_reason;

    /// A Guaranteed or unclaimed property that found a violation.
    bool failed() const { return !skipped && !report.passed() && claim != Claim::NotGuaranteed; }
};

struct CheckSummary {
    std::string expression;
    std::string strategy;
    Claim monotonic = Claim::NotGuaranteed;
    Claim well_behaved = Claim::NotGuaranteed;
    CheckConfig config;
    std::vector<PropertyResult> results;

    bool ok() const;
};

CheckSummary run_checks(const std::string& expr_text, const CheckConfig& cfg, std::optional<double> alpha,
                        bool fuse_inexact = false);

std::string render_check_table(const CheckSummary& summary);
std::string render_check_json(const CheckSummary& summary);

/// CSV rows rank,sorted_pvalue,threshold,rejected. Throws UsageError when
/// the expression has no closed-form threshold.
std::string plot_data_csv(const std::string& expr_text, const PValueInput& input, std::optional<double> alpha,
                          bool fuse_inexact = false);

/// Parses "MIN:MAX" or "N".
std::pair<std::size_t, std::size_t> parse_m_range(const std::string& text);

/// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace stepwise::cli
