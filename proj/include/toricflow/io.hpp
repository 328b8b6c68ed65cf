#pragma once

// Problem configuration (JSON or a TOML subset) and the JSON/SVG reports of the command-line tool.

#include "toricflow/chart.hpp"
#include "toricflow/flow.hpp"
#include "toricflow/realform.hpp"

#include <json.hpp>

#include <map>
#include <optional>

namespace toricflow {

using Json = nlohmann::ordered_json;

/// ParseError whose message starts with "<source>: <field path or line>: ".
class ConfigError : public ParseError {
public:
    explicit ConfigError(const std::string& what) : ParseError(what) {}
};

struct ConfigOptions {
    std::optional<std::uint64_t> seed;
    std::optional<int> samples;
    std::optional<double> tol;
    std::optional<Rational> tau;
    std::optional<double> box_lo, box_hi;
    bool negative_control = false;
};

struct ProblemConfig {
    std::string source;
    Eigen::Index m = 0;
    std::vector<Facet> facets;
    std::vector<IndexSet> removed_faces;  // 0-based facet indices
    RatMatrix zeta;                       // n x m, possibly n = 0
    RatVector c;
    std::string potential = "flat";
    ConfigOptions options;

    Polytope polytope() const;
};

enum class ConfigFormat { Json, Toml };

ProblemConfig parse_config(std::string_view text, ConfigFormat format, const std::string& source);
/// Format from the extension (.json or .toml).
ProblemConfig load_config(const std::string& path);

/// Parsed TOML document as JSON; `lines` receives the line of every key path ("facets[1].kappa").
Json parse_toml(std::string_view text, const std::string& source, std::map<std::string, int>* lines = nullptr);

Json check_report(const ProblemConfig& config);
Json flow_report(const ProblemConfig& config);
/// Default tau: 0 when 0 ∈ I (or the flow is stationary), otherwise a representative of I.
Json topology_report(const ProblemConfig& config, const std::optional<Rational>& tau);

struct VerifyRun {
    Json report;
    bool pass = false;
};

/// Identity suite at the levels c(tau) on the configured potential.
VerifyRun verify_report(const ProblemConfig& config, const VerifyOptions& options, const std::optional<Rational>& tau);

/// One panel per event and per interval representative; requires m <= 3.
std::string render_svg(const ProblemConfig& config);

/// Two-space indented JSON with a trailing newline.
std::string dump(const Json& j);

}  // namespace toricflow
