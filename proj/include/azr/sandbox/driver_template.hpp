#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "azr/core/types.hpp"

namespace azr::sandbox {

class RenderError : public Error {
 public:
  using Error::Error;
};

enum class DriverKind { Validate, Determinism, AbductionEval, DeductionEval, InductionEval };

inline constexpr std::array<DriverKind, 5> kAllDriverKinds = {
    DriverKind::Validate, DriverKind::Determinism, DriverKind::AbductionEval,
    DriverKind::DeductionEval, DriverKind::InductionEval};

/// File name of the template inside the harness directory.
std::string_view template_file_name(DriverKind kind);

using Bindings = std::map<std::string, std::string, std::less<>>;

/// Replaces every `{slot}` whose name is in `slots` with its binding, in a
/// single pass (inserted text is never re-scanned). Braces around any other
/// text are left alone. Throws RenderError naming the first unbound slot.
std::string render_slots(std::string_view text, const Bindings& bindings,
                         const std::set<std::string, std::less<>>& slots);

/// Slot names recognised in driver templates.
const std::set<std::string, std::less<>>& driver_slots();

struct DriverTemplate {
  DriverKind kind;
  std::string body;

  std::string render(const Bindings& bindings) const;
};

/// Loads the five driver templates from a harness directory.
class DriverTemplates {
 public:
  explicit DriverTemplates(const std::filesystem::path& harness_dir);

  const DriverTemplate& get(DriverKind kind) const;
  const std::filesystem::path& directory() const noexcept { return dir_; }

 private:
  std::filesystem::path dir_;
  std::vector<DriverTemplate> templates_;
};

/// Python string literal whose value is exactly `text`.
std::string python_string_literal(std::string_view text);
/// Python list literal of string literals.
std::string python_string_list(const std::vector<std::string>& items);

/// Contents of a text file; throws azr::Error if unreadable.
std::string read_text_file(const std::filesystem::path& path);

}  // namespace azr::sandbox
