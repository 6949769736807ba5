#pragma once

#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

namespace dimpute {

// Word-vector store loaded from plain text: one token per line,
// "token v1 v2 ... vd", space separated, one fixed dimension per file.
class EmbeddingStore {
 public:
  static EmbeddingStore load(std::istream& in);
  static EmbeddingStore load_file(const std::string& path);

  void add(const std::string& token, std::vector<float> vec);  // validates dimension

  const std::vector<float>* lookup(const std::string& token) const;
  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return vectors_.size(); }

  // Mean vector of the whitespace-separated tokens of `text`; false when any
  // token is out of vocabulary (callers fall back to syntactic distance).
  bool mean_vector(const std::string& text, std::vector<float>& out) const;

 private:
  std::size_t dimension_ = 0;
  std::unordered_map<std::string, std::vector<float>> vectors_;
};

}  // namespace dimpute
