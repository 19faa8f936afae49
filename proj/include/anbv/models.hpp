#ifndef ANBV_MODELS_HPP
#define ANBV_MODELS_HPP

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "anbv/parser.hpp"
#include "anbv/verifier.hpp"

namespace anbv {

class UnknownModel : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct BuiltinModel {
  std::string name;
  std::string source;
  /// Sessions at which `expected` holds.
  int sessions = 1;
  std::map<std::string, Status> expected;
};

const std::vector<BuiltinModel>& builtin_models();
/// Throws UnknownModel.
const BuiltinModel& builtin_model(const std::string& name);
/// Embedded text as a SourceSpec; throws UnknownModel.
SourceSpec builtin(const std::string& name);

struct ReproConfig {
  int depth = 20;         // sessions=1 rows
  int fixed_depth = 12;   // atp-fixed at two sessions
  int workers = 1;
  std::uint64_t state_budget = 0;        // sessions=1 rows, 0 = none
  std::uint64_t fixed_budget = 8000000;  // per scenario; enough to finish depth 8, depth 12 is out of reach
};

struct ReproRow {
  std::string model;
  int sessions = 1;
  int depth = 0;
  std::string goal;
  std::string expected;  // "safe", "attack" or "no attack"
  Status actual = Status::Safe;
  bool pass = false;
};

struct ReproReport {
  std::vector<ReproRow> rows;
  bool ok() const;
};

/// Every builtin model at its expected session count, plus atp-fixed at two
/// sessions where any non-attack verdict passes.
ReproReport reproduce(const ReproConfig& cfg);

std::string render_text(const ReproReport& r, bool color);
std::string render_json(const ReproReport& r);

}  // namespace anbv

#endif  // ANBV_MODELS_HPP
