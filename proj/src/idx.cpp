#include "mrl/idx.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "mrl/rng.hpp"

namespace mrl {

namespace {

constexpr std::uint32_t kImagesMagic = 0x00000803;
constexpr std::uint32_t kLabelsMagic = 0x00000801;

std::uint32_t read_be32(std::istream& is, const std::string& path) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  if (!is) throw std::runtime_error(path + ": truncated header");
  return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) |
         (std::uint32_t{b[2]} << 8) | std::uint32_t{b[3]};
}

void write_be32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v >> 24),
                        static_cast<unsigned char>(v >> 16),
                        static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

void read_exact(std::istream& is, std::uint8_t* dst, std::size_t n,
                const std::string& path) {
  is.read(reinterpret_cast<char*>(dst),
          static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(is.gcount()) != n)
    throw std::runtime_error(path + ": truncated payload");
}

void expect_eof(std::istream& is, const std::string& path) {
  char extra;
  if (is.read(&extra, 1))
    throw std::runtime_error(path + ": trailing bytes");
}

}  // namespace

IdxImages read_idx_images(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open: " + path);
  if (read_be32(is, path) != kImagesMagic)
    throw std::runtime_error(path + ": bad image magic");
  IdxImages out;
  out.n = read_be32(is, path);
  out.rows = read_be32(is, path);
  out.cols = read_be32(is, path);
  if (out.rows == 0 || out.cols == 0)
    throw std::runtime_error(path + ": zero image dimensions");
  out.pixels.resize(static_cast<std::size_t>(out.n) * out.rows * out.cols);
  read_exact(is, out.pixels.data(), out.pixels.size(), path);
  expect_eof(is, path);
  return out;
}

IdxLabels read_idx_labels(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open: " + path);
  if (read_be32(is, path) != kLabelsMagic)
    throw std::runtime_error(path + ": bad label magic");
  IdxLabels out;
  out.n = read_be32(is, path);
  out.labels.resize(out.n);
  read_exact(is, out.labels.data(), out.labels.size(), path);
  expect_eof(is, path);
  return out;
}

void write_idx_images(const IdxImages& imgs, const std::string& path) {
  if (imgs.pixels.size() !=
      static_cast<std::size_t>(imgs.n) * imgs.rows * imgs.cols)
    throw std::invalid_argument("write_idx_images: size mismatch");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  write_be32(os, kImagesMagic);
  write_be32(os, imgs.n);
  write_be32(os, imgs.rows);
  write_be32(os, imgs.cols);
  os.write(reinterpret_cast<const char*>(imgs.pixels.data()),
           static_cast<std::streamsize>(imgs.pixels.size()));
  if (!os) throw std::runtime_error("write failed: " + path);
}

void write_idx_labels(const IdxLabels& labs, const std::string& path) {
  if (labs.labels.size() != labs.n)
    throw std::invalid_argument("write_idx_labels: size mismatch");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  write_be32(os, kLabelsMagic);
  write_be32(os, labs.n);
  os.write(reinterpret_cast<const char*>(labs.labels.data()),
           static_cast<std::streamsize>(labs.labels.size()));
  if (!os) throw std::runtime_error("write failed: " + path);
}

std::vector<std::size_t> label_counts(const IdxLabels& labs) {
  std::uint8_t mx = 9;
  for (std::uint8_t l : labs.labels) mx = std::max(mx, l);
  std::vector<std::size_t> counts(mx + 1, 0);
  for (std::uint8_t l : labs.labels) ++counts[l];
  return counts;
}

LabeledDataset ingest_idx(const std::string& images_path,
                          const std::string& labels_path,
                          std::size_t subset_n, std::uint64_t seed,
                          DatasetRole role) {
  IdxImages imgs = read_idx_images(images_path);
  IdxLabels labs = read_idx_labels(labels_path);
  if (imgs.n != labs.n)
    throw std::runtime_error("ingest_idx: image/label count mismatch");
  if (imgs.n == 0) throw std::runtime_error("ingest_idx: empty input");
  if (subset_n > imgs.n)
    throw std::runtime_error("ingest_idx: subset larger than input");

  std::uint8_t max_label = 0;
  for (std::uint8_t l : labs.labels) max_label = std::max(max_label, l);
  const int n_classes = std::max<int>(2, max_label + 1);

  std::vector<std::size_t> keep;
  if (subset_n == 0) {
    keep.resize(imgs.n);
    std::iota(keep.begin(), keep.end(), 0);
  } else {
    std::vector<std::vector<std::size_t>> by_class(n_classes);
    for (std::size_t i = 0; i < labs.n; ++i)
      by_class[labs.labels[i]].push_back(i);
    const std::size_t base = subset_n / n_classes;
    const std::size_t rem = subset_n % n_classes;
    for (int c = 0; c < n_classes; ++c) {
      std::size_t want = base + (static_cast<std::size_t>(c) < rem ? 1 : 0);
      auto& pool = by_class[c];
      if (pool.size() < want)
        throw std::runtime_error(
            "ingest_idx: class " + std::to_string(c) +
            " too small for a stratified subset");
      Rng rng = Rng::substream(seed, "subset", static_cast<std::uint64_t>(c));
      rng.shuffle(pool);
      keep.insert(keep.end(), pool.begin(), pool.begin() + want);
    }
    std::sort(keep.begin(), keep.end());
  }

  const std::size_t d =
      static_cast<std::size_t>(imgs.rows) * imgs.cols;
  LabeledDataset ds;
  ds.spec = ingested_spec(static_cast<int>(d), n_classes);
  ds.role = role;
  ds.seed = seed;
  ds.points.reserve(keep.size() * d);
  ds.labels.reserve(keep.size());
  for (std::size_t i : keep) {
    const std::uint8_t* px = imgs.pixels.data() + i * d;
    for (std::size_t j = 0; j < d; ++j)
      ds.points.push_back(static_cast<double>(px[j]) / 255.0);
    ds.labels.push_back(labs.labels[i] + 1);
  }
  return ds;
}

}  // namespace mrl
