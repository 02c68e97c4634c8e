#pragma once

#include <array>
#include <string_view>

#include "codeevo/pyast.hpp"

namespace codeevo {

inline constexpr std::array<std::string_view, 6> kComplexityFeatureNames = {
    "cc_total", "cc_mean", "token_total", "token_mean", "param_total", "param_mean"};

inline constexpr std::array<std::string_view, 2> kNestingFeatureNames = {"nesting_max", "nesting_mean"};

/// Complexity metrics over analysis units. Units are the function and method
/// definitions of the module (nested and async included); a module without
/// any definition is analysed as a single unit.
struct ComplexityMetrics {
    long long cc_total = 0;
    double cc_mean = 0;
    /// Lexical tokens of the whole module, layout tokens and comments excluded.
    long long token_total = 0;
    /// Mean token span of a unit, from its `def` keyword to the end of its body.
    double token_mean = 0;
    long long param_total = 0;
    double param_mean = 0;
    long long nesting_max = 0;
    double nesting_mean = 0;
    long long unit_count = 0;
    long long function_count = 0;

    /// The six canonical values in kComplexityFeatureNames order.
    std::array<double, 6> values() const;
};

/// Cyclomatic complexity of a unit is 1 plus one per `if`/`elif`, loop,
/// comprehension `for` and `if` clause, `except` handler, conditional
/// expression, extra boolean operand and `case` arm after the first. A
/// decision point counts towards its innermost enclosing definition only.
ComplexityMetrics compute_complexity(const pyast::SyntaxTree& tree);

/// Parses `code` and computes its metrics; throws ParseError.
ComplexityMetrics compute_complexity(std::string_view code);

}  // namespace codeevo
