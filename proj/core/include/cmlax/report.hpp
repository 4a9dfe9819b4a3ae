#pragma once

#include <complex>
#include <string>
#include <vector>

namespace cmlax {

/// One verified relation: a numeric value against its closed-form target.
struct BracketEntry {
  std::string label;
  int i = 0;
  int j = 0;
  std::complex<double> value{0.0, 0.0};
  std::complex<double> target{0.0, 0.0};
  double abs_err = 0.0;
};

struct BracketReport {
  std::string check;
  std::vector<BracketEntry> entries;
  double tolerance = 0.0;
  double max_abs_err = 0.0;
  bool pass = false;

  void add(std::string label, int i, int j, std::complex<double> value,
           std::complex<double> target) {
    BracketEntry e;
    e.label = std::move(label);
    e.i = i;
    e.j = j;
    e.value = value;
    e.target = target;
    e.abs_err = std::abs(value - target);
    max_abs_err = std::max(max_abs_err, e.abs_err);
    entries.push_back(std::move(e));
  }

  // Deviation scaled by max(1, |target|); used where targets grow with n.
  void add_relative(std::string label, int i, int j, std::complex<double> value,
                    std::complex<double> target) {
    BracketEntry e;
    e.label = std::move(label);
    e.i = i;
    e.j = j;
    e.value = value;
    e.target = target;
    e.abs_err = std::abs(value - target) / std::max(1.0, std::abs(target));
    max_abs_err = std::max(max_abs_err, e.abs_err);
    entries.push_back(std::move(e));
  }

  void finalize() { pass = max_abs_err <= tolerance; }
};

}  // namespace cmlax
