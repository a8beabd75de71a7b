#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "conpt/scaling.hpp"

namespace conpt {

inline constexpr std::string_view kVersion = "1.0.0";

/// Locale-independent shortest round-trip formatting. Throws
/// std::runtime_error on NaN or infinity: non-finite values never reach
/// disk.
std::string format_number(double value);

/// Minimal CSV assembly: one leading `# ...` echo line, a header row,
/// data rows. Comma separated, LF line endings.
class CsvWriter {
 public:
  void comment(std::string_view text);
  void header(const std::vector<std::string>& columns);
  void row(const std::vector<std::string>& cells);

  const std::string& text() const { return text_; }

  /// Writes to `path` via a temporary file renamed on success.
  void write_atomic(const std::string& path) const;

 private:
  std::string text_;
  std::size_t columns_ = 0;
};

/// Reads curves from a CSV with a header row. Requires a `label` column;
/// x is taken from the first of {x, w, p, c}, y from the first of
/// {y, value, estimate, mean}, and the size from the first of
/// {L, l, size} or, failing that, the last number inside the label.
std::vector<Curve> read_curves_csv(const std::string& path);

}  // namespace conpt
