#pragma once

#include <map>
#include <string>
#include <vector>

namespace pxlap {

// Named numeric parameters of a preset ("a", "b", "seed", ...).
class Params {
 public:
  Params() = default;
  Params(std::initializer_list<std::pair<const std::string, double>> init) : values_(init) {}

  void set(const std::string& key, double value) { values_[key] = value; }
  bool has(const std::string& key) const { return values_.count(key) != 0; }
  double get(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }
  const std::map<std::string, double>& all() const { return values_; }

  // Keys not in `allowed`; used to reject misspelled parameters.
  std::vector<std::string> unknown(const std::vector<std::string>& allowed) const;

 private:
  std::map<std::string, double> values_;
};

}  // namespace pxlap
