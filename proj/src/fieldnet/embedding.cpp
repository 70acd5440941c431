#include "fieldgen/fieldnet/embedding.hpp"

#include <stdexcept>

namespace fieldgen::fieldnet {

Embedding Embedding::make(int count, int dim, numkit::RngStream& rng) {
  if (count < 1 || dim < 1) throw std::invalid_argument("Embedding: count and dim must be >= 1");
  Embedding e;
  e.count = count;
  e.dim = dim;
  e.table.resize(static_cast<std::size_t>(count) * static_cast<std::size_t>(dim));
  for (double& x : e.table) x = 0.1 * rng.normal();
  return e;
}

numkit::Vec Embedding::row(int i) const {
  if (i < 0 || i >= count) throw std::invalid_argument("Embedding: index out of range");
  const std::size_t off = static_cast<std::size_t>(i) * static_cast<std::size_t>(dim);
  return numkit::Vec(table.begin() + static_cast<long>(off),
                     table.begin() + static_cast<long>(off + static_cast<std::size_t>(dim)));
}

void Embedding::add_to_row(int i, const numkit::Vec& delta) {
  if (i < 0 || i >= count) throw std::invalid_argument("Embedding: index out of range");
  if (static_cast<int>(delta.size()) != dim) {
    throw std::invalid_argument("Embedding: delta has wrong dimension");
  }
  const std::size_t off = static_cast<std::size_t>(i) * static_cast<std::size_t>(dim);
  for (int c = 0; c < dim; ++c) table[off + static_cast<std::size_t>(c)] += delta[static_cast<std::size_t>(c)];
}

}  // namespace fieldgen::fieldnet
