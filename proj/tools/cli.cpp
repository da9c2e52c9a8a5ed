#include "cli.hpp"

#include <stepwise/dsl.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace stepwise::cli {
namespace {

using Json = nlohmann::ordered_json;

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::string lower(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::vector<std::string_view> split_csv(std::string_view line)
{
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        fields.push_back(trim(line.substr(start, comma == std::string_view::npos ? comma : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return fields;
}

double parse_pvalue(std::string_view text, std::size_t line)
{
    std::string_view digits = text;
    if (!digits.empty() && digits.front() == '+') digits.remove_prefix(1);
    double value = 0.0;
    const auto res = std::from_chars(digits.data(), digits.data() + digits.size(), value);
    if (digits.empty() || res.ec != std::errc{} || res.ptr != digits.data() + digits.size()) {
        throw DataError("line " + std::to_string(line) + ": '" + std::string(text) + "' is not a number");
    }
    if (!(value >= 0.0 && value <= 1.0)) {
        throw DataError("line " + std::to_string(line) + ": p-value " + std::string(text) + " outside [0,1]");
    }
    return value;
}

std::string caret_line(const std::string& text, SourceSpan span)
{
    const std::size_t start = std::min(span.start, text.size());
    const std::size_t width = std::max<std::size_t>(1, std::min(span.end, text.size() + 1) - start);
    return "  " + text + "\n  " + std::string(start, ' ') + std::string(width, '^');
}

std::string vector_text(const std::vector<double>& v)
{
    std::string out = "(";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += six_digits_text(v[i]);
    }
    return out + ")";
}

std::string witness_text(const Witness& w)
{
    std::ostringstream os;
    os << w.detail << "; p=" << vector_text(w.p) << " alpha=" << six_digits_text(w.alpha);
    if (!w.q.empty()) {
        os << "; q=" << vector_text(w.q) << " alpha'=" << six_digits_text(w.alpha_prime) << "; h(p)="
           << w.at_p.to_string() << " h(q)=" << w.at_q.to_string();
    }
    return os.str();
}

Json witness_json(const Witness& w)
{
    Json j;
    j["detail"] = w.detail;
    j["p"] = w.p;
    j["alpha"] = w.alpha;
    if (!w.q.empty()) {
        j["q"] = w.q;
        j["alpha_prime"] = w.alpha_prime;
        j["at_p"] = w.at_p.indices();
        j["at_q"] = w.at_q.indices();
    }
    return j;
}

std::string strategy_name(const CompiledProcedure& c)
{
    return c.is_closed_form() ? "closed-form" : "output-level";
}

double runtime_level(const CompiledProcedure& c, std::optional<double> alpha)
{
    if (c.info().frozen_alpha) return *c.info().frozen_alpha;
    return alpha.value_or(0.0);
}

ExprPtr parse_text(const std::string& expr_text)
{
    try {
        return parse(expr_text);
    }
    catch (const ParseError& e) {
        throw UsageError(std::string(to_string(e.kind())) + ": " + e.what() + "\n" + caret_line(expr_text, e.span()));
    }
}

void require_binding(const ProcedureExpr& e, std::optional<double> alpha)
{
    if (uses_symbolic_alpha(e) && !alpha) {
        throw UsageError("expression uses 'alpha'; pass --alpha");
    }
}

void warn_claims(const EvalReport& r, std::ostream& err)
{
    if (r.monotonic == Claim::NotGuaranteed) {
        err << "warning: monotonicity is not guaranteed for this composition\n";
    }
    if (r.well_behaved == Claim::NotGuaranteed) {
        err << "warning: well-behavedness is not guaranteed for this composition\n";
    }
}

} // namespace

double six_digits(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return std::strtod(buf, nullptr);
}

std::string six_digits_text(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

PValueInput read_pvalues(std::istream& in, const std::optional<std::string>& column)
{
    PValueInput out;
    std::string line;
    std::size_t lineno = 0;
    std::optional<std::size_t> col_index;
    bool first = true;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string_view text = trim(line);
        if (text.empty()) continue;
        if (column) {
            const auto fields = split_csv(text);
            if (first) {
                first = false;
                const auto it = std::find(fields.begin(), fields.end(), std::string_view(*column));
                if (it == fields.end()) {
                    throw DataError("line " + std::to_string(lineno) + ": no column named '" + *column + "'");
                }
                col_index = static_cast<std::size_t>(it - fields.begin());
                continue;
            }
            if (*col_index >= fields.size()) {
                throw DataError("line " + std::to_string(lineno) + ": missing column '" + *column + "'");
            }
            out.values.push_back(parse_pvalue(fields[*col_index], lineno));
            out.raw.emplace_back(fields[*col_index]);
            continue;
        }
        if (first) {
            first = false;
            if (lower(text) == "p") continue;
        }
        out.values.push_back(parse_pvalue(text, lineno));
        out.raw.emplace_back(text);
    }
    if (in.bad()) throw DataError("read error");
    if (out.values.empty()) throw DataError("no p-values in input");
    return out;
}

PValueInput read_pvalues_file(const std::string& path, const std::optional<std::string>& column)
{
    if (path == "-") return read_pvalues(std::cin, column);
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    try {
        return read_pvalues(in, column);
    }
    catch (const DataError& e) {
        throw DataError(path + ": " + e.what());
    }
}

CompiledProcedure compile_text(const std::string& expr_text, std::optional<double> alpha, const CompileOptions& base)
{
    const ExprPtr e = parse_text(expr_text);
    CompileOptions options = base;
    options.alpha = alpha;
    try {
        return compile(*e, options);
    }
    catch (const ParseError& err) {
        throw UsageError(std::string(to_string(err.kind())) + ": " + err.what() + "\n" +
                         caret_line(expr_text, err.span()));
    }
    catch (const std::invalid_argument& err) {
        throw UsageError(err.what());
    }
}

EvalReport make_eval_report(const std::string& expr_text, const PValueInput& input, std::optional<double> alpha,
                            bool fuse_inexact)
{
    const ExprPtr e = parse_text(expr_text);
    require_binding(*e, alpha);
    CompileOptions options;
    options.fuse_inexact = fuse_inexact;
    const CompiledProcedure c = compile_text(expr_text, alpha, options);

    const PValueVector p(input.values);
    const Level level(runtime_level(c, alpha));
    RejectionSet rejected;
    try {
        rejected = c.evaluate(p, level);
    }
    catch (const std::invalid_argument& err) {
        throw DataError(err.what());
    }

    EvalReport r;
    r.expression = format(*e);
    r.alpha = alpha;
    r.m = p.size();
    r.strategy = strategy_name(c);
    r.monotonic = c.monotonic_claim();
    r.well_behaved = c.well_behaved_claim();
    r.rejected = rejected.indices();

    std::vector<double> thresholds;
    if (const auto* h = c.closed_form()) {
        r.kind = std::string(to_string(h->kind()));
        r.transform = std::string(to_string(h->transform()));
        thresholds = h->p_scale_thresholds(p, level);
    }
    const SortedView view(p);
    for (std::size_t rank = 1; rank <= view.size(); ++rank) {
        RankRow row;
        row.rank = rank;
        row.original_index = view.original_index(rank);
        row.p_value = input.raw.at(row.original_index - 1);
        row.p = view.value(rank);
        if (!thresholds.empty()) row.threshold = thresholds[rank - 1];
        row.rejected = rejected.contains(row.original_index);
        r.ranks.push_back(std::move(row));
    }
    return r;
}

std::string render_table(const EvalReport& r)
{
    std::ostringstream os;
    os << "expression:   " << r.expression << "\n";
    os << "alpha:        " << (r.alpha ? six_digits_text(*r.alpha) : "unbound") << "\n";
    os << "m:            " << r.m << "\n";
    os << "strategy:     " << r.strategy;
    if (r.kind) os << " (" << *r.kind << ", " << *r.transform << ")";
    os << "\n";
    os << "monotonic:    " << to_string(r.monotonic) << "\n";
    os << "well-behaved: " << to_string(r.well_behaved) << "\n";
    os << "rejected:     " << RejectionSet::from_indices(r.rejected, r.m).to_string() << "\n\n";

    std::size_t pw = 7;
    for (const auto& row : r.ranks) pw = std::max(pw, row.p_value.size());
    os << std::left << std::setw(6) << "rank" << std::setw(static_cast<int>(pw) + 2) << "p_value" << std::setw(7)
       << "index" << std::setw(12) << "threshold"
       << "rejected\n";
    for (const auto& row : r.ranks) {
        os << std::left << std::setw(6) << row.rank << std::setw(static_cast<int>(pw) + 2) << row.p_value
           << std::setw(7) << row.original_index << std::setw(12)
           << (row.threshold ? six_digits_text(*row.threshold) : "-") << (row.rejected ? "yes" : "no") << "\n";
    }
    return os.str();
}

std::string render_json(const EvalReport& r)
{
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["expression"] = r.expression;
    j["alpha"] = r.alpha ? Json(*r.alpha) : Json(nullptr);
    j["m"] = r.m;
    j["strategy"] = r.strategy;
    j["kind"] = r.kind ? Json(*r.kind) : Json(nullptr);
    j["transform"] = r.transform ? Json(*r.transform) : Json(nullptr);
    j["claims"] = {{"monotonic", to_string(r.monotonic)}, {"well_behaved", to_string(r.well_behaved)}};
    j["rejected"] = r.rejected;
    Json rows = Json::array();
    for (const auto& row : r.ranks) {
        Json jr;
        jr["rank"] = row.rank;
        jr["p_value"] = row.p;
        jr["index"] = row.original_index;
        jr["threshold"] = row.threshold ? Json(six_digits(*row.threshold)) : Json(nullptr);
        jr["rejected"] = row.rejected;
        rows.push_back(std::move(jr));
    }
    j["ranks"] = std::move(rows);
    return j.dump(2) + "\n";
}

bool CheckSummary::ok() const
{
    return std::none_of(results.begin(), results.end(), [](const PropertyResult& r) { return r.failed(); });
}

CheckSummary run_checks(const std::string& expr_text, const CheckConfig& cfg, std::optional<double> alpha,
                        bool fuse_inexact)
{
    try {
        cfg.validate();
    }
    catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    const ExprPtr e = parse_text(expr_text);
    CompileOptions options;
    options.fuse_inexact = fuse_inexact;
    if (cfg.m_min == cfg.m_max) options.m = cfg.m_min;
    const CompiledProcedure c = compile_text(expr_text, alpha, options);

    CheckSummary s;
    s.expression = format(*e);
    s.strategy = strategy_name(c);
    s.monotonic = c.monotonic_claim();
    s.well_behaved = c.well_behaved_claim();
    s.config = cfg;

    s.results.push_back({check_monotonicity(c, cfg), c.monotonic_claim(), false, {}});
    s.results.push_back({check_condition1_part1(c, cfg), c.well_behaved_claim(), false, {}});
    s.results.push_back({check_condition1_part2(c, cfg), c.well_behaved_claim(), false, {}});

    if (const auto* h = c.closed_form()) {
        PropertyReport merged{"condition2", 0, {}};
        const std::size_t lo = std::max(cfg.m_min, c.info().min_m);
        const std::size_t hi = std::max(cfg.m_max, lo);
        for (std::size_t m = lo; m <= hi; ++m) {
            PropertyReport r = check_condition2(h->threshold(), m, cfg);
            merged.trials_run += r.trials_run;
            for (auto& w : r.violations) merged.violations.push_back(std::move(w));
        }
        s.results.push_back({std::move(merged), c.well_behaved_claim(), false, {}});
        s.results.push_back({oracle_equivalence(*e, cfg, options), std::nullopt, false, {}});
    }
    else {
        const std::string reason = "output-level strategy has no single threshold";
        s.results.push_back({PropertyReport{"condition2", 0, {}}, std::nullopt, true, reason});
        s.results.push_back({PropertyReport{"oracle_equivalence", 0, {}}, std::nullopt, true, reason});
    }
    return s;
}

std::string render_check_table(const CheckSummary& s)
{
    std::ostringstream os;
    os << "expression: " << s.expression << "\n";
    os << "strategy:   " << s.strategy << "\n";
    os << "trials:     " << s.config.trials << "  seed: " << s.config.seed << "  m: " << s.config.m_min << ".."
       << s.config.m_max << "\n\n";
    for (const auto& r : s.results) {
        os << std::left << std::setw(20) << r.report.property;
        const std::string claim = r.claim ? std::string(to_string(*r.claim)) : "exact";
        os << std::setw(16) << claim;
        if (r.skipped) {
            os << "skipped (" << r.skip_reason << ")\n";
            continue;
        }
        if (r.report.passed()) {
            os << "pass (" << r.report.trials_run << " trials)\n";
            continue;
        }
        os << (r.failed() ? "FAIL" : "violated, as claimed") << " (" << r.report.violations.size() << " of "
           << r.report.trials_run << " trials)\n";
        os << "    first witness: " << witness_text(r.report.violations.front()) << "\n";
    }
    os << "\n" << (s.ok() ? "all guaranteed claims hold" : "a guaranteed claim failed") << "\n";
    return os.str();
}

std::string render_check_json(const CheckSummary& s)
{
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["expression"] = s.expression;
    j["strategy"] = s.strategy;
    j["trials"] = s.config.trials;
    j["seed"] = s.config.seed;
    j["m_range"] = {s.config.m_min, s.config.m_max};
    j["claims"] = {{"monotonic", to_string(s.monotonic)}, {"well_behaved", to_string(s.well_behaved)}};
    Json props = Json::array();
    for (const auto& r : s.results) {
        Json p;
        p["property"] = r.report.property;
        p["claim"] = r.claim ? Json(to_string(*r.claim)) : Json("exact");
        p["status"] = r.skipped ? "skipped" : r.report.passed() ? "pass" : r.failed() ? "fail" : "violated-as-claimed";
        p["trials"] = r.report.trials_run;
        p["violations"] = r.report.violations.size();
        p["first_witness"] = r.report.violations.empty() ? Json(nullptr) : witness_json(r.report.violations.front());
        props.push_back(std::move(p));
    }
    j["properties"] = std::move(props);
    j["ok"] = s.ok();
    return j.dump(2) + "\n";
}

std::string plot_data_csv(const std::string& expr_text, const PValueInput& input, std::optional<double> alpha,
                          bool fuse_inexact)
{
    const EvalReport r = make_eval_report(expr_text, input, alpha, fuse_inexact);
    if (r.strategy != "closed-form") {
        throw UsageError("no closed-form threshold: '" + r.expression + "' is evaluated at output level");
    }
    std::ostringstream os;
    os << "rank,sorted_pvalue,threshold,rejected\n";
    for (const auto& row : r.ranks) {
        os << row.rank << ',' << row.p_value << ',' << six_digits_text(*row.threshold) << ','
           << (row.rejected ? 1 : 0) << '\n';
    }
    return os.str();
}

std::pair<std::size_t, std::size_t> parse_m_range(const std::string& text)
{
    auto number = [&](std::string_view s) {
        std::size_t v = 0;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size() || v == 0) {
            throw UsageError("--m-range: expected MIN:MAX or N with positive integers, got '" + text + "'");
        }
        return v;
    };
    const auto colon = text.find(':');
    if (colon == std::string::npos) {
        const std::size_t n = number(text);
        return {n, n};
    }
    const std::size_t lo = number(std::string_view(text).substr(0, colon));
    const std::size_t hi = number(std::string_view(text).substr(colon + 1));
    if (lo > hi) throw UsageError("--m-range: MIN exceeds MAX");
    return {lo, hi};
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Stepwise multiple-testing procedures: evaluate, check and plot compositions"};
    app.require_subcommand(1);

    std::string expr_text;
    std::string input_path;
    std::optional<double> alpha;
    std::string out_format = "table";
    std::optional<std::string> column;
    std::size_t trials = 10000;
    std::uint64_t seed = 0;
    std::string m_range = "1:8";
    bool fuse_inexact = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--expr,-e", expr_text, "Procedure expression, e.g. union(bh(alpha), hochberg(alpha))")
            ->required();
        sub->add_option("--alpha,-a", alpha, "Binding for 'alpha'")->check(CLI::Range(0.0, 1.0));
        sub->add_flag("--fuse-inexact", fuse_inexact,
                      "Fuse every same-kind union/intersection by max/min thresholds");
    };
    auto add_input = [&](CLI::App* sub) {
        sub->add_option("--input,-i", input_path, "p-value file, one per line ('-' for stdin)")->required();
        sub->add_option("--column", column, "CSV column holding the p-values");
    };

    CLI::App* eval_cmd = app.add_subcommand("eval", "Evaluate an expression on a p-value file");
    add_common(eval_cmd);
    add_input(eval_cmd);
    eval_cmd->add_option("--format", out_format, "Output format")->check(CLI::IsMember({"table", "json"}));

    CLI::App* check_cmd = app.add_subcommand("check", "Run randomized property checks on an expression");
    add_common(check_cmd);
    check_cmd->add_option("--trials", trials, "Trials per property")->check(CLI::PositiveNumber);
    check_cmd->add_option("--seed", seed, "Random seed");
    check_cmd->add_option("--m-range", m_range, "Number of hypotheses: MIN:MAX or N");
    check_cmd->add_option("--format", out_format, "Output format")->check(CLI::IsMember({"table", "json"}));

    CLI::App* plot_cmd = app.add_subcommand("plot-data", "Emit the threshold staircase as CSV");
    add_common(plot_cmd);
    add_input(plot_cmd);

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    }
    catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    }
    catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }

    try {
        if (*eval_cmd) {
            const PValueInput input = read_pvalues_file(input_path, column);
            const EvalReport r = make_eval_report(expr_text, input, alpha, fuse_inexact);
            warn_claims(r, err);
            out << (out_format == "json" ? render_json(r) : render_table(r));
            return kOk;
        }
        if (*check_cmd) {
            CheckConfig cfg;
            cfg.trials = trials;
            cfg.seed = seed;
            std::tie(cfg.m_min, cfg.m_max) = parse_m_range(m_range);
            const CheckSummary s = run_checks(expr_text, cfg, alpha, fuse_inexact);
            out << (out_format == "json" ? render_check_json(s) : render_check_table(s));
            return s.ok() ? kOk : kCheckFailed;
        }
        const PValueInput input = read_pvalues_file(input_path, column);
        out << plot_data_csv(expr_text, input, alpha, fuse_inexact);
        return kOk;
    }
    catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }
    catch (const DataError& e) {
        err << "error: " << e.what() << "\n";
        return kData;
    }
}

} // namespace stepwise::cli
