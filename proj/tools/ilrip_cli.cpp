// ilrip command-line front end.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "ilrip/ilrip.hpp"
#include "ilrip/synthetic.hpp"

namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr int kExitError = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void write_text_atomic(const std::string& path, const std::string& text) {
  ilrip::write_file_atomic(path, std::vector<std::uint8_t>(text.begin(), text.end()));
}

void emit_json(const json& j, const std::string& path) {
  if (path.empty())
    std::cout << j.dump(2) << '\n';
  else
    write_text_atomic(path, j.dump(2) + "\n");
}

std::optional<ilrip::Codebook> load_optional_codebook(const std::string& path) {
  if (path.empty()) return std::nullopt;
  return ilrip::read_codebook(path);
}

double bits_per_pixel(std::size_t bytes, const ilrip::PixelGrid& img) {
  return 8.0 * static_cast<double>(bytes) / (static_cast<double>(img.width()) * img.height());
}

struct TrainArgs {
  std::string manifest, output, cost_log;
  std::size_t n = 64;
  int qp = 27;
  ilrip::TrainOptions opts;
};

int run_train(const TrainArgs& a) {
  const auto set = ilrip::load_training_set(a.manifest);
  const auto t0 = Clock::now();
  const auto r = ilrip::train(set, a.n, ilrip::RdParams::from_qp(a.qp), a.opts);
  ilrip::write_codebook(a.output, r.codebook);
  if (!a.cost_log.empty()) {
    std::ostringstream csv;
    csv.precision(17);
    csv << "iteration,total_cost,class_occupancies\n";
    for (const auto& it : r.log) {
      csv << it.iteration << ',' << it.total_cost << ',';
      for (std::size_t i = 0; i < it.occupancy.size(); ++i) csv << (i ? " " : "") << it.occupancy[i];
      csv << '\n';
    }
    write_text_atomic(a.cost_log, csv.str());
  }
  json j{{"codebook", a.output},     {"n", a.n},
         {"qp", a.qp},               {"samples", set.samples.size()},
         {"iterations", r.log.size()}, {"converged", r.converged},
         {"cycled", r.cycled},       {"best_iteration", r.best_iteration},
         {"final_cost", r.log[static_cast<std::size_t>(r.best_iteration - 1)].total_cost}, {"hash", r.codebook.hash()},
         {"train_ms", ms_since(t0)}};
  std::cout << j.dump() << '\n';
  return 0;
}

struct EncodeArgs {
  std::string input, output, codebook, stats;
  int qp = 27;
};

int run_encode(const EncodeArgs& a) {
  const auto img = ilrip::read_pgm(a.input);
  const auto cb = load_optional_codebook(a.codebook);
  const auto p = ilrip::RdParams::from_qp(a.qp);
  auto t0 = Clock::now();
  const auto e = ilrip::encode_image(img, cb ? *cb : ilrip::Codebook{}, p);
  const double encode_ms = ms_since(t0);
  t0 = Clock::now();
  const auto check = ilrip::decode_image(e.bitstream, cb ? &*cb : nullptr);
  const double decode_ms = ms_since(t0);
  if (!(check == e.recon)) throw ilrip::Error("internal: decoder disagrees with encoder reconstruction");
  ilrip::write_file_atomic(a.output, e.bitstream);
  const json j{{"rate_bpp", bits_per_pixel(e.bitstream.size(), img)},
               {"rate_includes_header", true},
               {"psnr_db", finite_or_null(ilrip::psnr(img, e.recon))},
               {"blocks_total", e.trace.blocks.size()},
               {"blocks_ilr", e.blocks_ilr},
               {"blocks_regular", e.blocks_regular},
               {"qp", a.qp},
               {"codebook_n", cb ? cb->size() : 0},
               {"encode_ms", encode_ms},
               {"decode_ms", decode_ms}};
  emit_json(j, a.stats);
  return 0;
}

struct DecodeArgs {
  std::string input, output, codebook;
};

int run_decode(const DecodeArgs& a) {
  const auto bytes = ilrip::read_file(a.input);
  const auto header = ilrip::read_container(bytes).header;
  ilrip::PixelGrid img;
  if (header.mode == ilrip::StreamMode::k1D) {
    img = ilrip::decode_image_1d(bytes);
  } else {
    const auto cb = load_optional_codebook(a.codebook);
    img = ilrip::decode_image(bytes, cb ? &*cb : nullptr);
  }
  ilrip::write_pgm(a.output, img);
  return 0;
}

int run_eval(const std::string& orig, const std::string& rec) {
  const auto a = ilrip::read_pgm(orig);
  const auto b = ilrip::read_pgm(rec);
  const json j{{"psnr_db", finite_or_null(ilrip::psnr(a, b))}, {"ssd", ilrip::ssd(a, b)}};
  std::cout << j.dump() << '\n';
  return 0;
}

struct Experiment1DArgs {
  std::string input, output, bitstream;
  int qp = 27;
  int radius = 2;
};

json branch_report(const ilrip::Encoded1D& e, const ilrip::PixelGrid& img, double ms) {
  return {{"rate_bpp", bits_per_pixel(e.bitstream.size(), img)},
          {"psnr_db", finite_or_null(ilrip::psnr(img, e.recon))},
          {"blocks_total", e.trace.blocks.size()},
          {"blocks_ilr", e.blocks_ilr},
          {"blocks_regular", e.blocks_regular},
          {"total_rd_cost", e.total_cost},
          {"encode_ms", ms}};
}

int run_experiment_1d(const Experiment1DArgs& a) {
  const auto img = ilrip::read_pgm(a.input);
  const auto p = ilrip::RdParams::from_qp(a.qp);
  const ilrip::SearchParams1D s{a.radius};
  auto t0 = Clock::now();
  const auto on = ilrip::encode_image_1d(img, p, s, {true});
  const double on_ms = ms_since(t0);
  t0 = Clock::now();
  const auto off = ilrip::encode_image_1d(img, p, s, {false});
  const double off_ms = ms_since(t0);
  t0 = Clock::now();
  if (!(ilrip::decode_image_1d(on.bitstream) == on.recon))
    throw ilrip::Error("internal: 1D decoder disagrees with encoder reconstruction");
  const double decode_ms = ms_since(t0);
  if (!a.bitstream.empty()) ilrip::write_file_atomic(a.bitstream, on.bitstream);
  const double rate_on = static_cast<double>(on.bitstream.size());
  const double rate_off = static_cast<double>(off.bitstream.size());
  const json j{{"input", a.input},
               {"qp", a.qp},
               {"radius", a.radius},
               {"candidates_per_block", s.candidates()},
               {"width", img.width()},
               {"height", img.height()},
               {"ilr_enabled", branch_report(on, img, on_ms)},
               {"ilr_disabled", branch_report(off, img, off_ms)},
               {"rate_change_percent", (rate_on / rate_off - 1.0) * 100.0},
               {"decode_ms", decode_ms}};
  emit_json(j, a.output);
  return 0;
}

int run_bdrate(const std::string& anchor_path, const std::string& test_path) {
  auto load = [](const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ilrip::IoError("cannot open " + path);
    return ilrip::parse_rd_csv(in);
  };
  const double d = ilrip::bd_rate(load(anchor_path), load(test_path));
  std::cout << json{{"bd_rate_percent", d}}.dump() << '\n';
  return 0;
}

struct SynthArgs {
  std::string kind = "step-edges", output;
  int width = 256, height = 256;
  std::uint64_t seed = 1;
};

int run_synth(const SynthArgs& a) {
  ilrip::PixelGrid img;
  if (a.kind == "gradient")
    img = ilrip::synth::gradient(a.width, a.height, a.seed);
  else if (a.kind == "step-edges")
    img = ilrip::synth::step_edges(a.width, a.height, a.seed);
  else if (a.kind == "noise")
    img = ilrip::synth::noise(a.width, a.height, a.seed);
  else
    img = ilrip::synth::step_rows(a.width, a.height, a.seed);
  ilrip::write_pgm(a.output, img);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ilrip: intra codec with in-loop residual prediction"};
  app.require_subcommand(1);

  TrainArgs ta;
  auto* train = app.add_subcommand("train", "Train a codebook from a PGM manifest");
  train->add_option("-m,--manifest", ta.manifest, "Text file with one PGM path per line")->required();
  train->add_option("-n,--n", ta.n, "Codebook size")->capture_default_str()->check(CLI::Range(1, 65535));
  train->add_option("--qp", ta.qp, "Quantization parameter")->capture_default_str()->check(CLI::Range(0, 255));
  train->add_option("--seed", ta.opts.seed, "Seed for the initial centroid picks")->capture_default_str();
  train->add_option("--iters", ta.opts.max_iters, "Maximum classification passes")->capture_default_str()->check(CLI::PositiveNumber);
  train->add_option("--epsilon", ta.opts.epsilon, "Relative cost change that stops training")->capture_default_str()->check(CLI::NonNegativeNumber);
  train->add_option("--cost-log", ta.cost_log, "Write per-iteration costs as CSV");
  train->add_option("-o,--output", ta.output, "Codebook file")->required();

  EncodeArgs ea;
  auto* encode = app.add_subcommand("encode", "Encode a PGM image (2D codec)");
  encode->add_option("input", ea.input, "Input PGM")->required();
  encode->add_option("-c,--codebook", ea.codebook, "Codebook file; omit to disable ILR");
  encode->add_option("--qp", ea.qp, "Quantization parameter")->capture_default_str()->check(CLI::Range(0, 255));
  encode->add_option("-o,--output", ea.output, "Output bitstream")->required();
  encode->add_option("--stats", ea.stats, "Write JSON statistics here instead of stdout");

  DecodeArgs da;
  auto* decode = app.add_subcommand("decode", "Decode a bitstream (1D or 2D) to PGM");
  decode->add_option("input", da.input, "Input bitstream")->required();
  decode->add_option("-c,--codebook", da.codebook, "Codebook the stream was coded with");
  decode->add_option("-o,--output", da.output, "Output PGM")->required();

  std::string eval_a, eval_b;
  auto* eval = app.add_subcommand("eval", "PSNR and SSD between two PGM images");
  eval->add_option("original", eval_a)->required();
  eval->add_option("reconstruction", eval_b)->required();

  Experiment1DArgs xa;
  auto* exp1d = app.add_subcommand("experiment-1d", "Row-wise 1x4 codec with and without ILR");
  exp1d->add_option("input", xa.input, "Input PGM (width a multiple of 4)")->required();
  exp1d->add_option("--qp", xa.qp, "Quantization parameter")->capture_default_str()->check(CLI::Range(0, 255));
  exp1d->add_option("--radius", xa.radius, "ILR level search radius b")->capture_default_str()->check(CLI::Range(0, 10));
  exp1d->add_option("-o,--output", xa.output, "Write the JSON report here instead of stdout");
  exp1d->add_option("--bitstream", xa.bitstream, "Also write the ILR-enabled 1D bitstream");

  std::string bd_anchor, bd_test;
  auto* bdrate = app.add_subcommand("bdrate", "BD-rate between two RD curves (CSV rate_bpp,psnr_db)");
  bdrate->add_option("anchor", bd_anchor)->required();
  bdrate->add_option("test", bd_test)->required();

  SynthArgs sa;
  auto* synth = app.add_subcommand("synth", "Write a deterministic synthetic test image");
  synth->add_option("--kind", sa.kind, "Content type")
      ->capture_default_str()
      ->check(CLI::IsMember({"gradient", "step-edges", "noise", "step-rows"}));
  synth->add_option("--width", sa.width)->capture_default_str()->check(CLI::Range(1, 65535));
  synth->add_option("--height", sa.height)->capture_default_str()->check(CLI::Range(1, 65535));
  synth->add_option("--seed", sa.seed)->capture_default_str();
  synth->add_option("-o,--output", sa.output, "Output PGM")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*train) return run_train(ta);
    if (*encode) return run_encode(ea);
    if (*decode) return run_decode(da);
    if (*eval) return run_eval(eval_a, eval_b);
    if (*exp1d) return run_experiment_1d(xa);
    if (*bdrate) return run_bdrate(bd_anchor, bd_test);
    if (*synth) return run_synth(sa);
  } catch (const ilrip::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitUsage;
}
