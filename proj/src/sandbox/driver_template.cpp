#include "azr/sandbox/driver_template.hpp"

#include <fmt/format.h>

#include <fstream>
#include <sstream>

namespace azr::sandbox {

std::string_view template_file_name(DriverKind kind) {
  switch (kind) {
    case DriverKind::Validate:
      return "validate.tmpl";
    case DriverKind::Determinism:
      return "determinism.tmpl";
    case DriverKind::AbductionEval:
      return "abduction_eval.tmpl";
    case DriverKind::DeductionEval:
      return "deduction_eval.tmpl";
    case DriverKind::InductionEval:
      return "induction_eval.tmpl";
  }
  return "";
}

const std::set<std::string, std::less<>>& driver_slots() {
  static const std::set<std::string, std::less<>> slots = {
      "code",        "inputs",       "gold_output", "agent_input", "agent_output",
      "gold_inputs", "gold_outputs", "runs"};
  return slots;
}

std::string render_slots(std::string_view text, const Bindings& bindings,
                         const std::set<std::string, std::less<>>& slots) {
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t open = text.find('{', pos);
    if (open == std::string_view::npos) break;
    std::size_t close = text.find('}', open + 1);
    if (close == std::string_view::npos) break;
    std::string_view name = text.substr(open + 1, close - open - 1);
    out.append(text.substr(pos, open - pos));
    if (slots.contains(name)) {
      auto it = bindings.find(name);
      if (it == bindings.end()) throw RenderError(fmt::format("unbound template slot '{}'", name));
      out.append(it->second);
      pos = close + 1;
    } else {
      out.push_back('{');
      pos = open + 1;
    }
  }
  out.append(text.substr(pos));
  return out;
}

std::string DriverTemplate::render(const Bindings& bindings) const {
  return render_slots(body, bindings, driver_slots());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(fmt::format("cannot read {}", path.string()));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

DriverTemplates::DriverTemplates(const std::filesystem::path& harness_dir) : dir_(harness_dir) {
  for (DriverKind kind : kAllDriverKinds) {
    templates_.push_back({kind, read_text_file(harness_dir / template_file_name(kind))});
  }
}

const DriverTemplate& DriverTemplates::get(DriverKind kind) const {
  return templates_.at(static_cast<std::size_t>(kind));
}

std::string python_string_literal(std::string_view text) {
  std::string out = "'";
  for (unsigned char c : text) {
    switch (c) {
      case '\\':
        out += "\\\\";
        break;
      case '\'':
        out += "\\'";
        break;
      case '\n':
        out += "\\n";
        break;
      case '\r':
        out += "\\r";
        break;
      case '\t':
        out += "\\t";
        break;
      default:
        if (c < 0x20 || c == 0x7f) {
          out += fmt::format("\\x{:02x}", c);
        } else {
          out.push_back(static_cast<char>(c));
        }
    }
  }
  out.push_back('\'');
  return out;
}

std::string python_string_list(const std::vector<std::string>& items) {
  std::string out = "[";
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ", ";
    out += python_string_literal(items[i]);
  }
  out += "]";
  return out;
}

}  // namespace azr::sandbox
