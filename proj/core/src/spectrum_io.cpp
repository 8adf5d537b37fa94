#include "nvkin/spectrum_io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

namespace nvkin {

std::string format_number(double v) {
  if (v == 0.0) return "0";  // folds -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

bool parse_double(std::string_view text, double& out) {
  const std::string token(trim(text));
  if (token.empty()) return false;
  char* end = nullptr;
  errno = 0;
  out = std::strtod(token.c_str(), &end);
  return errno == 0 && end == token.c_str() + token.size();
}

}  // namespace

Spectrum read_spectrum_csv(std::istream& in, SpectrumKind kind) {
  Spectrum s;
  s.kind = kind;
  std::string line;
  std::size_t line_no = 0;
  bool seen_data = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = trim(line);
    if (line_no == 1 && view.size() >= 3 && view.substr(0, 3) == "\xEF\xBB\xBF") {
      view = trim(view.substr(3));
    }
    if (view.empty()) continue;
    const auto comma = view.find(',');
    double x = 0.0, y = 0.0;
    const bool ok = comma != std::string_view::npos &&
                    view.find(',', comma + 1) == std::string_view::npos &&
                    parse_double(view.substr(0, comma), x) &&
                    parse_double(view.substr(comma + 1), y);
    if (!ok) {
      if (!seen_data && s.field_t.empty() && line_no == 1) continue;  // header
      throw SpectrumFormatError("malformed spectrum row at line " + std::to_string(line_no));
    }
    seen_data = true;
    s.field_t.push_back(x);
    s.signal.push_back(y);
  }
  if (s.field_t.empty()) throw SpectrumFormatError("spectrum file has no data rows");
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw SpectrumFormatError(e.what());
  }
  return s;
}

Spectrum read_spectrum_csv_file(const std::string& path, SpectrumKind kind) {
  std::ifstream in(path);
  if (!in) throw SpectrumFormatError("cannot open spectrum file " + path);
  return read_spectrum_csv(in, kind);
}

void write_spectrum_csv(std::ostream& out, const Spectrum& s) {
  out << "field_T,signal\n";
  for (std::size_t i = 0; i < s.size(); ++i) {
    out << format_number(s.field_t[i]) << ',' << format_number(s.signal[i]) << '\n';
  }
}

}  // namespace nvkin
