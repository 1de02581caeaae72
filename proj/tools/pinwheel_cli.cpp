#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "pinwheel/pinwheel.hpp"

namespace fs = std::filesystem;
using namespace pw;

namespace {

struct Globals {
  std::string out_dir = ".";
  int threads = 1;
  std::optional<std::uint64_t> seed;
};

std::string quoted(const std::string& s) {
  std::string o = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') o.push_back('\\');
    o.push_back(c == '\n' ? ' ' : c);
  }
  return o + "\"";
}

void write_manifest(const Globals& g, const std::string& name, const std::string& hash, std::uint64_t seed,
                    double seconds, const std::vector<std::string>& outputs) {
  nlohmann::ordered_json j;
  j["config_hash"] = hash;
  j["seed"] = seed;
  j["version"] = kVersion;
  j["wall_seconds"] = seconds;
  j["threads"] = g.threads;
  j["outputs"] = outputs;
  write_file_atomic((fs::path(g.out_dir) / (name + ".manifest.json")).string(), j.dump(2) + "\n");
}

ExperimentConfig load(const std::string& path, const Globals& g) {
  ExperimentConfig cfg = load_experiment_config(path);
  if (g.seed) cfg.process.seed = *g.seed;
  return cfg;
}

std::string out_path(const Globals& g, const std::string& file) { return (fs::path(g.out_dir) / file).string(); }

int cmd_gen_filter(const Globals& g, const std::string& config) {
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentConfig cfg = load(config, g);
  const FilterSpectrum f = experiment_filter(cfg);
  const std::string path = out_path(g, "filter.pwsp");
  write_spectra(path, to_spectra_file(f));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(g, "gen-filter", hex64(config_hash(cfg)), cfg.process.seed, secs, {path});
  std::cout << "wrote " << path << "\n";
  return 0;
}

int cmd_run(const Globals& g, const std::string& config, const std::string& filter_path) {
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentConfig cfg = load(config, g);
  FilterSpectrum filter;
  std::vector<std::string> outputs;
  if (!filter_path.empty()) {
    filter = filter_from_spectra_file(read_spectra(filter_path));
    if (!(filter.config == cfg.freqs)) throw ShapeMismatch("filter file frequencies differ from the config");
  } else {
    filter = experiment_filter(cfg);
    const std::string fp = out_path(g, "filter.pwsp");
    write_spectra(fp, to_spectra_file(filter));
    outputs.push_back(fp);
  }
  const ExperimentResult r = run_experiment(cfg, filter);

  const std::string img = out_path(g, "completion.pgm");
  write_pgm16(img, r.field.data.real());
  const std::string spec = out_path(g, "completion.pwsp");
  write_spectra(spec, to_spectra_file(dft2_forward(r.field)));
  std::ostringstream hist;
  hist << "# iteration forward_norm backward_norm\n";
  for (std::size_t i = 0; i < r.power.forward_norms.size(); ++i) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%zu %.17g %.17g\n", i + 1, r.power.forward_norms[i], r.power.backward_norms[i]);
    hist << buf;
  }
  const std::string norms = out_path(g, "norms.txt");
  write_file_atomic(norms, hist.str());
  outputs.insert(outputs.end(), {img, spec, norms});
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(g, "run", hex64(config_hash(cfg)), cfg.process.seed, secs, outputs);
  std::cout << "wrote " << img << "\n";
  return 0;
}

int cmd_render(const Globals& g, int omega_phi, double omega_rho, double alpha, int n, int crop,
               const std::string& mode) {
  const auto t0 = std::chrono::steady_clock::now();
  const GridSpec grid{n, static_cast<double>(n)};
  const PinwheelFrequency f{omega_phi, alpha, omega_rho};
  Eigen::MatrixXcd img;
  if (mode == "direct") {
    img = sample_pinwheel(grid, f).data;
  } else if (mode == "fourier") {
    SpectralGrid t = fourier_pinwheel_table(f, grid);
    t.coeffs *= grid.n / (grid.p * grid.p);
    img = dft2_inverse(t).data;
  } else {
    throw DomainError("mode must be direct or fourier");
  }
  if (crop > 0 && crop < n) img = img.block(n / 2 - crop / 2, n / 2 - crop / 2, crop, crop).eval();
  const std::string path = out_path(g, "pinwheel_" + mode + ".ppm");
  write_phase_ppm(path, img);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::ostringstream key;
  key << "render " << omega_phi << " " << omega_rho << " " << alpha << " " << n << " " << crop << " " << mode;
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : key.str()) h = (h ^ ch) * 1099511628211ull;
  write_manifest(g, "render-pinwheel", hex64(h), 0, secs, {path});
  std::cout << "wrote " << path << "\n";
  return 0;
}

int cmd_selftest() {
  int failures = 0;
  auto report = [&](const char* name, bool ok, double value) {
    std::cout << (ok ? "PASS " : "FAIL ") << name << " " << value << "\n";
    if (!ok) ++failures;
  };
  const double g = std::abs(complex_gamma(0.5) - std::sqrt(std::numbers::pi));
  report("gamma_half", g < 1e-13, g);

  const GridSpec grid{16, 16.0};
  SpatialGrid f(grid);
  for (int i = 0; i < grid.n; ++i)
    for (int j = 0; j < grid.n; ++j) f.data(i, j) = Complex(std::sin(0.3 * i + 0.1 * j), std::cos(0.7 * j));
  const double rt = (dft2_inverse(dft2_forward(f)).data - f.data).norm() / f.data.norm();
  report("dft_round_trip", rt < 1e-12, rt);

  const PinwheelFrequency pf{5, -1.0, 5.0};
  const double sum = std::abs(fourier_pinwheel_table(pf, {32, 32.0}).coeffs.sum());
  report("pinwheel_table_zero_sum", sum < 1e-10, sum);
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Similarity-equivariant group convolution in a pinwheel basis"};
  app.require_subcommand(1);
  app.fallthrough();  // globals may follow the subcommand
  Globals g;
  std::uint64_t seed = 0;
  app.add_option("--out-dir", g.out_dir, "Directory for outputs")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  auto* seed_opt = app.add_option("--seed", seed, "Override the Monte Carlo seed");

  std::string config, filter_path;
  auto* gen = app.add_subcommand("gen-filter", "Monte Carlo Green's function and its filter spectrum");
  gen->add_option("--config", config, "Experiment config")->required();

  auto* run = app.add_subcommand("run", "Power iteration and completion field");
  run->add_option("--config", config, "Experiment config")->required();
  run->add_option("--filter", filter_path, "Filter spectra file from gen-filter");

  int omega_phi = 5, n = 64, crop = 0;
  double omega_rho = 0.0, alpha = -1.0;
  std::string mode = "direct";
  auto* render = app.add_subcommand("render-pinwheel", "Phase/magnitude image of a pinwheel");
  render->add_option("--omega-phi", omega_phi)->capture_default_str();
  render->add_option("--omega-rho", omega_rho)->capture_default_str();
  render->add_option("--alpha", alpha)->capture_default_str();
  render->add_option("--n", n, "Grid size (unit pixels)")->capture_default_str();
  render->add_option("--crop", crop, "Central crop size, 0 for none")->capture_default_str();
  render->add_option("--mode", mode)->check(CLI::IsMember({"direct", "fourier"}))->capture_default_str();

  auto* self = app.add_subcommand("selftest", "Quick numerical self checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: type=UsageError message=" << quoted(e.what()) << "\n";
    return 64;
  }
  if (*seed_opt) g.seed = seed;

  try {
    set_num_threads(g.threads);
    fs::create_directories(g.out_dir);
    if (*gen) return cmd_gen_filter(g, config);
    if (*run) return cmd_run(g, config, filter_path);
    if (*render) return cmd_render(g, omega_phi, omega_rho, alpha, n, crop, mode);
    if (*self) return cmd_selftest();
  } catch (const ConfigError& e) {
    std::cerr << "error: type=ConfigError key=" << (e.key.empty() ? "-" : e.key) << " line=" << e.line
              << " message=" << quoted(e.what()) << "\n";
    return 2;
  } catch (const DivergenceError& e) {
    std::cerr << "error: type=DivergenceError iteration=" << e.iteration << " message=" << quoted(e.what()) << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: type=RuntimeError message=" << quoted(e.what()) << "\n";
    return 1;
  }
  return 0;
}
