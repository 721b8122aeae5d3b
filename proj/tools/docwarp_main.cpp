// docwarp: synthetic document warping and evaluation CLI.
//
// Exit codes: 0 success, 1 usage error, 2 I/O error, 3 processing error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "docwarp/docwarp.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;
constexpr int kExitProcessing = 3;

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw docwarp::IoError("cannot read config file: " + path);
  json j;
  in >> j;
  return j;
}

// Precedence: explicit flag > config file value > default.
template <typename T>
void apply_config(const CLI::App& app, const json& cfg, const std::string& flag,
                  T& value) {
  const CLI::Option* opt = app.get_option("--" + flag);
  if (opt && opt->count() > 0) return;
  if (cfg.contains(flag)) value = cfg.at(flag).get<T>();
}

struct GenerateArgs {
  std::string input, output, type_str = "I", mode_str = "backward";
  std::string manifest_path, field_csv, config_path;
  std::uint64_t seed = 0;
  double lambda = 0.0;
  std::map<int, double> p_overrides;  // index 1..10 -> value
};

int run_generate(GenerateArgs& a, const CLI::App& cmd) {
  if (!a.config_path.empty()) {
    const json cfg = load_config(a.config_path);
    apply_config(cmd, cfg, "input", a.input);
    apply_config(cmd, cfg, "output", a.output);
    apply_config(cmd, cfg, "type", a.type_str);
    apply_config(cmd, cfg, "mode", a.mode_str);
    apply_config(cmd, cfg, "seed", a.seed);
    apply_config(cmd, cfg, "lambda", a.lambda);
    for (int i = 1; i <= 10; ++i) {
      const std::string key = "p" + std::to_string(i);
      const CLI::Option* opt = cmd.get_option("--" + key);
      if ((!opt || opt->count() == 0) && cfg.contains(key))
        a.p_overrides[i] = cfg.at(key).get<double>();
    }
  }
  if (a.input.empty()) throw CLI::ValidationError("--input is required");
  if (a.output.empty()) throw CLI::ValidationError("--output is required");
  const docwarp::WarpType type = docwarp::warp_type_from_string(a.type_str);
  const docwarp::MapMode mode = docwarp::map_mode_from_string(a.mode_str);

  const docwarp::BinaryImage img = docwarp::load_binary_image(a.input);
  const double diagonal = std::hypot(img.rows(), img.cols());

  auto [wpp, wcp] = docwarp::sample_params(type, diagonal, a.seed);
  auto get = [&](int i, double fallback) {
    auto it = a.p_overrides.find(i);
    return it == a.p_overrides.end() ? fallback : it->second;
  };
  wpp.p1 = get(1, wpp.p1);
  wpp.p2 = get(2, wpp.p2);
  wcp.p3 = get(3, wcp.p3);
  wcp.p6 = get(6, wcp.p6);
  wcp.p7 = get(7, wcp.p7);
  wcp.p10 = get(10, wcp.p10);
  // inner knots follow the outer ones unless explicitly set
  wcp.p4 = get(4, 0.5 * wcp.p3);
  wcp.p5 = get(5, 0.5 * wcp.p6);
  wcp.p8 = get(8, 0.5 * wcp.p7);
  wcp.p9 = get(9, 0.5 * wcp.p10);

  const docwarp::WarpField field =
      docwarp::build_field(img.rows(), img.cols(), wpp, wcp, a.lambda);
  auto [warped, offset] = docwarp::warp_image(img, field, mode);

  docwarp::save_image(warped, a.output);
  if (!a.field_csv.empty()) docwarp::export_field(field, a.field_csv);

  docwarp::WarpManifest m;
  m.source = a.input;
  m.type = type;
  m.p1 = wpp.p1;  m.p2 = wpp.p2;
  m.p3 = wcp.p3;  m.p4 = wcp.p4;  m.p5 = wcp.p5;  m.p6 = wcp.p6;
  m.p7 = wcp.p7;  m.p8 = wcp.p8;  m.p9 = wcp.p9;  m.p10 = wcp.p10;
  m.lambda = a.lambda;
  m.seed = a.seed;
  m.mode = mode;
  m.offset = offset;
  m.out_rows = warped.rows();
  m.out_cols = warped.cols();

  const fs::path mpath = a.manifest_path.empty()
                             ? fs::path(a.output).replace_extension(".json")
                             : fs::path(a.manifest_path);
  std::ofstream mf(mpath, std::ios::trunc);
  mf << docwarp::to_json(m).dump(2) << '\n';
  if (!mf) throw docwarp::IoError("manifest write failed: " + mpath.string());

  std::cout << "wrote " << a.output << " (" << warped.rows() << "x"
            << warped.cols() << ", offset " << offset << ")\n";
  return kExitOk;
}

struct BatchArgs {
  std::string input_dir, output_dir, mode_str = "backward", config_path;
  std::vector<std::string> type_strs{"I", "II", "III", "IV"};
  int count = 1;
  std::uint64_t seed = 0;
  double lambda = 0.0;
  unsigned jobs = std::thread::hardware_concurrency();
};

int run_batch_cmd(BatchArgs& a, const CLI::App& cmd) {
  if (!a.config_path.empty()) {
    const json cfg = load_config(a.config_path);
    apply_config(cmd, cfg, "input-dir", a.input_dir);
    apply_config(cmd, cfg, "output-dir", a.output_dir);
    apply_config(cmd, cfg, "types", a.type_strs);
    apply_config(cmd, cfg, "count", a.count);
    apply_config(cmd, cfg, "seed", a.seed);
    apply_config(cmd, cfg, "lambda", a.lambda);
    apply_config(cmd, cfg, "mode", a.mode_str);
    apply_config(cmd, cfg, "jobs", a.jobs);
  }
  if (a.input_dir.empty()) throw CLI::ValidationError("--input-dir is required");
  if (a.output_dir.empty()) throw CLI::ValidationError("--output-dir is required");
  docwarp::BatchConfig cfg;
  cfg.input_dir = a.input_dir;
  cfg.output_dir = a.output_dir;
  cfg.types.clear();
  for (const auto& t : a.type_strs)
    cfg.types.push_back(docwarp::warp_type_from_string(t));
  cfg.count = a.count;
  cfg.base_seed = a.seed;
  cfg.lambda = a.lambda;
  cfg.mode = docwarp::map_mode_from_string(a.mode_str);
  cfg.jobs = a.jobs;

  const docwarp::BatchResult result = docwarp::run_batch(cfg);
  for (const auto& item : result.items)
    if (!item.error.empty())
      std::cerr << "failed: " << item.input << ": " << item.error << "\n";
  std::cout << (result.items.size() - result.failures) << "/"
            << result.items.size() << " outputs written to " << a.output_dir
            << "\n";
  return result.failures ? kExitProcessing : kExitOk;
}

std::vector<std::pair<fs::path, fs::path>> pair_inputs(const std::string& real,
                                                       const std::string& synth) {
  std::vector<std::pair<fs::path, fs::path>> pairs;
  if (fs::is_directory(real) != fs::is_directory(synth))
    throw std::invalid_argument("--real and --synth must both be files or both directories");
  if (!fs::is_directory(real)) {
    pairs.emplace_back(real, synth);
    return pairs;
  }
  std::vector<fs::path> reals;
  for (const auto& e : fs::directory_iterator(real))
    if (e.is_regular_file()) reals.push_back(e.path());
  std::sort(reals.begin(), reals.end());
  for (const auto& r : reals) {
    const fs::path s = fs::path(synth) / r.filename();
    if (!fs::exists(s))
      throw std::invalid_argument("no matching synthetic file for " +
                                  r.filename().string());
    pairs.emplace_back(r, s);
  }
  if (pairs.empty()) throw std::invalid_argument("no files to pair");
  return pairs;
}

struct EvalCurvatureArgs {
  std::string real, synth, json_path;
};

int run_eval_curvature(const EvalCurvatureArgs& a) {
  const auto pairs = pair_inputs(a.real, a.synth);
  json all = json::array();
  std::vector<double> per_image_rmse;
  std::vector<double> pooled_real, pooled_synth;
  int pair_errors = 0;
  for (const auto& [rp, sp] : pairs) {
    try {
      const auto real_img = docwarp::load_binary_image(rp);
      const auto synth_img = docwarp::load_binary_image(sp);
      const auto rep = docwarp::curvature_report(real_img, synth_img);
      std::cout << rp.filename().string() << ":\n";
      for (std::size_t i = 0; i < rep.real_curvatures.size(); ++i)
        std::printf("  line %zu  C_r = %+.6e  C_s = %+.6e\n", i + 1,
                    rep.real_curvatures[i], rep.synth_curvatures[i]);
      std::printf("  R_c = %.6e\n", rep.rmse);
      per_image_rmse.push_back(rep.rmse);
      for (double v : rep.real_curvatures) pooled_real.push_back(std::abs(v));
      for (double v : rep.synth_curvatures) pooled_synth.push_back(std::abs(v));
      json entry = docwarp::to_json(rep);
      entry["pair"] = rp.filename().string();
      all.push_back(entry);
    } catch (const std::exception& e) {
      std::cerr << "pair " << rp.filename().string() << " failed: " << e.what()
                << "\n";
      ++pair_errors;
    }
  }
  if (per_image_rmse.empty()) {
    std::cerr << "no evaluable pairs\n";
    return kExitProcessing;
  }
  double mean_rmse = 0.0;
  for (double v : per_image_rmse) mean_rmse += v;
  mean_rmse /= per_image_rmse.size();
  const double pooled = docwarp::curvature_rmse(pooled_real, pooled_synth);
  std::printf("per-image average R_c = %.6e over %zu pairs\n", mean_rmse,
              per_image_rmse.size());
  std::printf("pooled R_c = %.6e over %zu lines\n", pooled, pooled_real.size());

  if (!a.json_path.empty()) {
    json out{{"pairs", all},
             {"per_image_average_rmse", mean_rmse},
             {"pooled_rmse", pooled}};
    std::ofstream jf(a.json_path, std::ios::trunc);
    jf << out.dump(2) << '\n';
    if (!jf) throw docwarp::IoError("report write failed: " + a.json_path);
  }
  return pair_errors ? kExitProcessing : kExitOk;
}

struct EvalBinArgs {
  std::string gt, result, json_path;
  std::optional<int> offset;
};

int run_eval_binmetrics(const EvalBinArgs& a) {
  docwarp::BinaryImage gt = docwarp::load_binary_image(a.gt);
  docwarp::BinaryImage res = docwarp::load_binary_image(a.result);
  if (a.offset &&
      (gt.rows() != res.rows() || gt.cols() != res.cols())) {
    // place the ground truth into the result canvas at the manifest offset
    if (res.rows() < gt.rows() || res.cols() != gt.cols())
      throw std::invalid_argument("--offset alignment needs a taller result canvas of equal width");
    docwarp::BinaryImage aligned(res.rows(), res.cols());
    for (int r = 0; r < gt.rows(); ++r)
      for (int c = 0; c < gt.cols(); ++c)
        if (gt.foreground(r, c)) aligned.set(r + *a.offset, c, true);
    gt = aligned;
  }
  if (gt.rows() != res.rows() || gt.cols() != res.cols())
    throw CLI::ValidationError(
        "images differ in size; pass --offset to align canvases");

  const docwarp::MetricReport rep = docwarp::evaluate_pair(gt, res);
  std::printf("precision  %.6f\n", rep.precision);
  std::printf("recall     %.6f\n", rep.recall);
  std::printf("f_measure  %.6f\n", rep.f_measure);
  if (rep.psnr_infinite()) std::printf("psnr       inf (identical)\n");
  else std::printf("psnr       %.6f dB\n", rep.psnr);
  std::printf("drd        %.6f\n", rep.drd);

  if (!a.json_path.empty()) {
    std::ofstream jf(a.json_path, std::ios::trunc);
    jf << docwarp::to_json(rep).dump(2) << '\n';
    if (!jf) throw docwarp::IoError("report write failed: " + a.json_path);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthetic document image warping and evaluation"};
  app.require_subcommand(1);

  GenerateArgs gen;
  CLI::App* cmd_gen = app.add_subcommand("generate", "Warp a single image");
  // required, but a config file may supply them; validated after the merge
  cmd_gen->add_option("--input", gen.input, "Input PBM/PGM image");
  cmd_gen->add_option("--output", gen.output, "Output PBM image");
  cmd_gen->add_option("--type", gen.type_str, "Warp type: I, II, III, IV");
  cmd_gen->add_option("--seed", gen.seed, "Parameter sampling seed");
  cmd_gen->add_option("--lambda", gen.lambda, "Spline smoothing parameter");
  cmd_gen->add_option("--mode", gen.mode_str, "Mapping mode: forward or backward");
  cmd_gen->add_option("--manifest", gen.manifest_path, "Manifest path (default: beside output)");
  cmd_gen->add_option("--field-csv", gen.field_csv, "Also export the warp field as CSV");
  cmd_gen->add_option("--config", gen.config_path, "JSON config file mirroring flag names");
  for (int i = 1; i <= 10; ++i)
    cmd_gen->add_option_function<double>(
        "--p" + std::to_string(i),
        [&gen, i](double v) { gen.p_overrides[i] = v; },
        "Override parameter P" + std::to_string(i));

  BatchArgs bat;
  CLI::App* cmd_bat = app.add_subcommand("batch", "Generate a corpus from a directory");
  cmd_bat->add_option("--input-dir", bat.input_dir, "Directory of PNM inputs");
  cmd_bat->add_option("--output-dir", bat.output_dir, "Output directory");
  cmd_bat->add_option("--types", bat.type_strs, "Warp types to generate");
  cmd_bat->add_option("--count", bat.count, "Replicates per input and type");
  cmd_bat->add_option("--seed", bat.seed, "Base seed");
  cmd_bat->add_option("--lambda", bat.lambda, "Spline smoothing parameter");
  cmd_bat->add_option("--mode", bat.mode_str, "Mapping mode");
  cmd_bat->add_option("--jobs", bat.jobs, "Worker threads");
  cmd_bat->add_option("--config", bat.config_path, "JSON config file");

  EvalCurvatureArgs evc;
  CLI::App* cmd_evc = app.add_subcommand("eval-curvature", "Headline curvature RMSE");
  cmd_evc->add_option("--real", evc.real, "Real image or directory")->required();
  cmd_evc->add_option("--synth", evc.synth, "Synthetic image or directory")->required();
  cmd_evc->add_option("--json", evc.json_path, "Write JSON report");

  EvalBinArgs evb;
  CLI::App* cmd_evb = app.add_subcommand("eval-binmetrics", "Pixel-wise binarization metrics");
  cmd_evb->add_option("--gt", evb.gt, "Ground-truth image")->required();
  cmd_evb->add_option("--result", evb.result, "Result image")->required();
  cmd_evb->add_option_function<int>(
      "--offset", [&evb](int v) { evb.offset = v; },
      "Canvas offset from the warp manifest");
  cmd_evb->add_option("--json", evb.json_path, "Write JSON report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (cmd_gen->parsed()) return run_generate(gen, *cmd_gen);
    if (cmd_bat->parsed()) return run_batch_cmd(bat, *cmd_bat);
    if (cmd_evc->parsed()) return run_eval_curvature(evc);
    if (cmd_evb->parsed()) return run_eval_binmetrics(evb);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const docwarp::FileNotFoundError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const docwarp::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitProcessing;
  }
  return kExitUsage;
}
