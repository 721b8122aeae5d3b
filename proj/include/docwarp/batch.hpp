#pragma once

// Batch corpus generation: every input x type x replicate, seeded by a
// stable hash so corpora are reproducible and extendable without
// reshuffling existing outputs. Images are written to a temp file and
// renamed so a failed run never leaves a partial image.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "docwarp/image.hpp"
#include "docwarp/warper.hpp"

namespace docwarp {

struct BatchConfig {
  std::filesystem::path input_dir;
  std::filesystem::path output_dir;
  std::vector<WarpType> types{WarpType::I, WarpType::II, WarpType::III, WarpType::IV};
  int count = 1;            // replicates per input x type
  std::uint64_t base_seed = 0;
  double lambda = 0.0;
  MapMode mode = MapMode::backward;
  unsigned jobs = std::thread::hardware_concurrency();
};

struct BatchItemResult {
  std::string input;
  std::string output;  // empty on failure
  std::string error;   // empty on success
};

struct BatchResult {
  std::vector<BatchItemResult> items;
  int failures = 0;
};

/// FNV-1a over the job identity; replicate seeds stay stable when new
/// files or types are added.
inline std::uint64_t job_seed(std::uint64_t base_seed, const std::string& filename,
                              WarpType type, int replicate) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const std::string& s) {
    for (unsigned char ch : s) {
      h ^= ch;
      h *= 1099511628211ULL;
    }
    h ^= '|';
    h *= 1099511628211ULL;
  };
  mix(filename);
  mix(to_string(type));
  mix(std::to_string(replicate));
  return base_seed + h;
}

namespace detail {

inline bool is_pnm(const std::filesystem::path& p) {
  const auto ext = p.extension().string();
  return ext == ".pbm" || ext == ".pgm" || ext == ".pnm";
}

}  // namespace detail

inline BatchResult run_batch(const BatchConfig& cfg) {
  namespace fs = std::filesystem;
  if (cfg.count < 1) throw std::invalid_argument("batch: count must be >= 1");
  if (fs::absolute(cfg.input_dir) == fs::absolute(cfg.output_dir))
    throw std::invalid_argument("batch: input and output directories must differ");

  std::vector<fs::path> inputs;
  for (const auto& entry : fs::directory_iterator(cfg.input_dir))
    if (entry.is_regular_file() && detail::is_pnm(entry.path()))
      inputs.push_back(entry.path());
  std::sort(inputs.begin(), inputs.end());
  if (inputs.empty())
    throw std::invalid_argument("batch: no PNM files in " + cfg.input_dir.string());

  fs::create_directories(cfg.output_dir);

  struct Job {
    fs::path input;
    WarpType type;
    int replicate;
  };
  std::vector<Job> jobs;
  for (const auto& in : inputs)
    for (WarpType t : cfg.types)
      for (int k = 0; k < cfg.count; ++k) jobs.push_back({in, t, k});

  BatchResult result;
  result.items.resize(jobs.size());
  std::atomic<std::size_t> next{0};
  std::atomic<int> failures{0};

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      const Job& job = jobs[i];
      BatchItemResult& item = result.items[i];
      item.input = job.input.filename().string();
      try {
        const BinaryImage img = load_binary_image(job.input);
        const std::uint64_t seed =
            job_seed(cfg.base_seed, item.input, job.type, job.replicate);
        auto [warped, manifest] = generate(img, job.type, seed, cfg.lambda,
                                           cfg.mode, item.input);
        const std::string stem = job.input.stem().string() + "_" +
                                 to_string(job.type) + "_" +
                                 std::to_string(job.replicate);
        const fs::path out_img = cfg.output_dir / (stem + ".pbm");
        const fs::path tmp_img = cfg.output_dir / (stem + ".pbm.tmp");
        save_image(warped, tmp_img);
        fs::rename(tmp_img, out_img);

        std::ofstream mf(cfg.output_dir / (stem + ".json"), std::ios::trunc);
        mf << to_json(manifest).dump(2) << '\n';
        if (!mf) throw IoError("manifest write failed for " + stem);
        item.output = out_img.filename().string();
      } catch (const std::exception& e) {
        item.error = e.what();
        failures.fetch_add(1);
      }
    }
  };

  const unsigned n_workers = std::max(1u, cfg.jobs);
  std::vector<std::thread> pool;
  for (unsigned i = 0; i + 1 < n_workers; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  result.failures = failures.load();

  nlohmann::ordered_json summary;
  summary["base_seed"] = cfg.base_seed;
  summary["lambda"] = cfg.lambda;
  summary["mode"] = to_string(cfg.mode);
  summary["count"] = cfg.count;
  summary["failures"] = result.failures;
  auto& outputs = summary["outputs"] = nlohmann::ordered_json::array();
  for (const auto& item : result.items) {
    nlohmann::ordered_json entry{{"input", item.input}};
    if (item.error.empty()) entry["output"] = item.output;
    else entry["error"] = item.error;
    outputs.push_back(entry);
  }
  std::ofstream sf(cfg.output_dir / "batch_summary.json", std::ios::trunc);
  sf << summary.dump(2) << '\n';
  if (!sf) throw IoError("batch summary write failed");

  return result;
}

}  // namespace docwarp
