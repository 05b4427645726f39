#pragma once

#include "conceptkit/boolean_algebra.hpp"
#include "conceptkit/errors.hpp"

#include <functional>
#include <string>
#include <string_view>

namespace conceptkit {

class ParseError : public DataError {
public:
    using DataError::DataError;
};

// Grammar:
//   expr    := op '(' expr (',' expr)? ')' | operand
//   op      := AND | OR | NOT | AND_NOT
//   operand := any run of characters other than '(', ')', ',' and whitespace
// AND_NOT(a,b) parses to AND(a,NOT(b)). Leaves hold the operand text.
[[nodiscard]] Expression parse_expression(std::string_view text);

using LeafResolver = std::function<MatrixConceptor(const std::string& operand)>;

// Evaluates bottom-up; each leaf is resolved exactly once per occurrence.
[[nodiscard]] MatrixConceptor evaluate_expression(const Expression& expr, const LeafResolver& resolve);

} // namespace conceptkit
