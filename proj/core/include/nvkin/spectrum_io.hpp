#pragma once

// Two-column CSV spectra (field_T, signal). Header line optional on input;
// always written on output.

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "nvkin/spectra.hpp"

namespace nvkin {

class SpectrumFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// %.9g formatting used for every emitted number.
std::string format_number(double v);

Spectrum read_spectrum_csv(std::istream& in, SpectrumKind kind = SpectrumKind::absorption);
Spectrum read_spectrum_csv_file(const std::string& path,
                                SpectrumKind kind = SpectrumKind::absorption);

void write_spectrum_csv(std::ostream& out, const Spectrum& s);

}  // namespace nvkin
