#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mrl/dataset.hpp"

namespace mrl {

// IDX image/label containers: unsigned bytes, big-endian headers, magic
// 0x00000803 for images (dims n, rows, cols) and 0x00000801 for labels.
struct IdxImages {
  std::uint32_t n = 0, rows = 0, cols = 0;
  std::vector<std::uint8_t> pixels;  // n * rows * cols
};

struct IdxLabels {
  std::uint32_t n = 0;
  std::vector<std::uint8_t> labels;
};

IdxImages read_idx_images(const std::string& path);
IdxLabels read_idx_labels(const std::string& path);
void write_idx_images(const IdxImages& imgs, const std::string& path);
void write_idx_labels(const IdxLabels& labs, const std::string& path);

// Count of each label value 0..9 (or up to the max present).
std::vector<std::size_t> label_counts(const IdxLabels& labs);

// Pairs an image file with its labels, scales pixels to [0, 1], and maps
// byte label D to class D + 1. subset_n > 0 keeps a stratified subset with
// equal per-class targets (remainder spread over the lowest classes), chosen
// by seeded draw within each class, emitted in original file order.
// subset_n == 0 keeps everything.
LabeledDataset ingest_idx(const std::string& images_path,
                          const std::string& labels_path,
                          std::size_t subset_n, std::uint64_t seed,
                          DatasetRole role = DatasetRole::Train);

}  // namespace mrl
