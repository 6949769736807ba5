#include "dimpute/embeddings.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dimpute {

void EmbeddingStore::add(const std::string& token, std::vector<float> vec) {
  if (vec.empty()) throw std::runtime_error("embedding for '" + token + "' is empty");
  if (dimension_ == 0) {
    dimension_ = vec.size();
  } else if (vec.size() != dimension_) {
    throw std::runtime_error("embedding dimension mismatch for '" + token + "': got " +
                             std::to_string(vec.size()) + ", expected " +
                             std::to_string(dimension_));
  }
  vectors_[token] = std::move(vec);
}

EmbeddingStore EmbeddingStore::load(std::istream& in) {
  EmbeddingStore store;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string token;
    fields >> token;
    std::vector<float> vec;
    float value;
    while (fields >> value) vec.push_back(value);
    if (!fields.eof()) {
      throw std::runtime_error("embedding file: bad number at line " + std::to_string(line_no));
    }
    try {
      store.add(token, std::move(vec));
    } catch (const std::runtime_error& e) {
      throw std::runtime_error(std::string(e.what()) + " (line " + std::to_string(line_no) + ")");
    }
  }
  return store;
}

EmbeddingStore EmbeddingStore::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open embedding file: " + path);
  return load(in);
}

const std::vector<float>* EmbeddingStore::lookup(const std::string& token) const {
  auto it = vectors_.find(token);
  return it == vectors_.end() ? nullptr : &it->second;
}

bool EmbeddingStore::mean_vector(const std::string& text, std::vector<float>& out) const {
  out.assign(dimension_, 0.0f);
  std::istringstream tokens(text);
  std::string token;
  std::size_t count = 0;
  while (tokens >> token) {
    const std::vector<float>* vec = lookup(token);
    if (!vec) return false;
    for (std::size_t i = 0; i < dimension_; ++i) out[i] += (*vec)[i];
    ++count;
  }
  if (count == 0) return false;
  for (auto& v : out) v /= static_cast<float>(count);
  return true;
}

}  // namespace dimpute
