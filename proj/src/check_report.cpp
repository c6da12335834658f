#include "pxlap/check_report.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>

namespace pxlap {

void CheckReport::add(std::string label, double lhs, double rhs, char relation,
                      double tolerance) {
  CheckItem item;
  item.label = std::move(label);
  item.lhs = lhs;
  item.rhs = rhs;
  item.relation = relation;
  item.margin = relation == '<' ? rhs - lhs : lhs - rhs;
  item.tolerance = tolerance;
  // NaN margins fail.
  item.pass = item.margin >= -tolerance;
  items_.push_back(std::move(item));
}

void CheckReport::add_le(std::string label, double lhs, double rhs) {
  add(std::move(label), lhs, rhs, '<', tolerance_);
}

void CheckReport::add_le(std::string label, double lhs, double rhs, double tolerance) {
  add(std::move(label), lhs, rhs, '<', tolerance);
}

void CheckReport::add_ge(std::string label, double lhs, double rhs) {
  add(std::move(label), lhs, rhs, '>', tolerance_);
}

void CheckReport::add_ge(std::string label, double lhs, double rhs, double tolerance) {
  add(std::move(label), lhs, rhs, '>', tolerance);
}

void CheckReport::add_flag(std::string label, bool ok) {
  add(std::move(label), ok ? 1.0 : 0.0, 1.0, '>', 0.0);
}

void CheckReport::append(const CheckReport& other, const std::string& prefix) {
  for (CheckItem item : other.items_) {
    item.label = prefix + item.label;
    items_.push_back(std::move(item));
  }
  for (const auto& n : other.notes_) notes_.push_back(prefix + n);
  skipped_ += other.skipped_;
}

std::size_t CheckReport::passed() const {
  return static_cast<std::size_t>(
      std::count_if(items_.begin(), items_.end(), [](const CheckItem& i) { return i.pass; }));
}

double CheckReport::worst_margin() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& i : items_) m = std::min(m, i.margin);
  return m;
}

double CheckReport::max_abs_margin() const {
  double m = 0.0;
  for (const auto& i : items_) m = std::max(m, std::abs(i.margin));
  return m;
}

void CheckReport::write_text(std::ostream& os) const {
  const auto flags = os.flags();
  os << "# report " << name_ << " tolerance=" << std::setprecision(6) << tolerance_ << '\n';
  os << std::setprecision(12);
  for (const auto& i : items_) {
    os << i.label << ' ' << i.lhs << ' ' << i.rhs << ' ' << i.margin << ' '
       << (i.pass ? "PASS" : "FAIL") << '\n';
  }
  for (const auto& n : notes_) os << "# note " << n << '\n';
  os << "# summary passed=" << passed() << " total=" << items_.size()
     << " skipped=" << skipped_ << ' ' << (all_pass() ? "PASS" : "FAIL") << '\n';
  os.flags(flags);
}

void CheckReport::write_csv(std::ostream& os) const {
  const auto flags = os.flags();
  os << "label,lhs,relation,rhs,margin,tolerance,pass\n" << std::setprecision(17);
  for (const auto& i : items_) {
    os << i.label << ',' << i.lhs << ',' << (i.relation == '<' ? "<=" : ">=") << ',' << i.rhs
       << ',' << i.margin << ',' << i.tolerance << ',' << (i.pass ? 1 : 0) << '\n';
  }
  os.flags(flags);
}

}  // namespace pxlap
