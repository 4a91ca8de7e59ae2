#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace biglap::cli {

/// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitIo = 4;

/// Runs one command line (args[0] is the program name). CSV goes to `out`
/// unless --out names a file; diagnostics and the machine-readable error
/// line ("error\t<kind>\t<exit code>\t<message>") go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;
};

/// Minimal SVG line chart with axes, ticks and a legend.
std::string render_svg(const std::vector<Series>& series, const std::string& title, const std::string& xlabel,
                       const std::string& ylabel);

/// Shortest round-trip decimal form.
std::string format_number(double value);

}  // namespace biglap::cli
