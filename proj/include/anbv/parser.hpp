#ifndef ANBV_PARSER_HPP
#define ANBV_PARSER_HPP

#include <optional>
#include <string>
#include <vector>

#include "anbv/model.hpp"

namespace anbv {

struct SourceSpec {
  std::string text;
  std::string origin;  // file path or builtin name
};

struct ParseResult {
  std::optional<Protocol> protocol;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return protocol.has_value() && !has_errors(diagnostics); }
};

/// Parses the .anb subset. Sections must appear in the order Protocol,
/// Types, Definitions (optional), Knowledge, Actions, Goals. Syntax errors
/// stop the parse with a single positioned diagnostic; a syntactically valid
/// protocol is returned together with its validate() diagnostics.
ParseResult parse(const SourceSpec& source);

/// Canonical text: two-space indentation, one item per line, action and
/// goal labels as trailing `#label` comments, no Definitions section when
/// there are none.
std::string render(const Protocol& p);

/// Renders a message template as it appears after `:` in an action.
std::string render_term(const Term& t);

/// Reads a file into a SourceSpec; throws std::runtime_error when unreadable.
SourceSpec load_file(const std::string& path);

}  // namespace anbv

#endif  // ANBV_PARSER_HPP
