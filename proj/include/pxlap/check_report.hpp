#pragma once

#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

namespace pxlap {

// One checked inequality. `margin` is signed slack in the direction of the
// inequality (positive means satisfied); the item passes iff
// margin >= -tolerance.
struct CheckItem {
  std::string label;
  double lhs = 0.0;
  double rhs = 0.0;
  char relation = '<';  // '<' for lhs <= rhs, '>' for lhs >= rhs
  double margin = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

class CheckReport {
 public:
  CheckReport() = default;
  CheckReport(std::string name, double tolerance) : name_(std::move(name)), tolerance_(tolerance) {}

  // lhs <= rhs (+ tolerance).
  void add_le(std::string label, double lhs, double rhs);
  void add_le(std::string label, double lhs, double rhs, double tolerance);
  // lhs >= rhs (- tolerance).
  void add_ge(std::string label, double lhs, double rhs);
  void add_ge(std::string label, double lhs, double rhs, double tolerance);
  // Boolean condition recorded as a 0/1 item.
  void add_flag(std::string label, bool ok);

  void append(const CheckReport& other, const std::string& prefix = "");
  void add_note(std::string note) { notes_.push_back(std::move(note)); }
  void count_skipped(std::size_t n = 1) { skipped_ += n; }

  const std::string& name() const { return name_; }
  double tolerance() const { return tolerance_; }
  void set_tolerance(double t) { tolerance_ = t; }
  const std::vector<CheckItem>& items() const { return items_; }
  const std::vector<std::string>& notes() const { return notes_; }
  std::size_t skipped() const { return skipped_; }
  std::size_t passed() const;
  std::size_t failed() const { return items_.size() - passed(); }
  bool all_pass() const { return failed() == 0; }
  // Smallest margin over all items (+inf when empty).
  double worst_margin() const;
  // Largest |margin| over all items (0 when empty).
  double max_abs_margin() const;

  // Structured text: a header, one line per item
  // (label lhs rhs margin PASS|FAIL) and a summary line.
  void write_text(std::ostream& os) const;
  // CSV: label,lhs,relation,rhs,margin,tolerance,pass
  void write_csv(std::ostream& os) const;

 private:
  void add(std::string label, double lhs, double rhs, char relation, double tolerance);

  std::string name_;
  double tolerance_ = 0.0;
  std::vector<CheckItem> items_;
  std::vector<std::string> notes_;
  std::size_t skipped_ = 0;
};

}  // namespace pxlap
