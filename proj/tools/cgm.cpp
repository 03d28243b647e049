// cgm: command-line front end for the corner growth laboratory.

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <string_view>
#include <vector>

#include <CLI11.hpp>

#include "cgm/config.hpp"
#include "cgm/run.hpp"

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : ", ") + x;
  return s;
}

void print_error(const cgm::Error& e) {
  cgm::Json j{{"error", e.code()}, {"message", e.what()}};
  std::cerr << j.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inhomogeneous exponential corner growth: simulation, limit shapes and checks"};
  app.footer("Commands: " + join(cgm::command_names()) + "\nPresets: " + join(cgm::preset_names()));

  std::string command;
  std::string config_path;
  std::string preset;
  std::string grid;
  std::string out;
  std::uint64_t seed = 0;
  int threads = 0;
  double t = 0.0;
  std::size_t replicas = 0;
  std::vector<std::string> options;

  app.add_option("command", command, "what to run");
  auto* o_config = app.add_option("--config", config_path, "run configuration (JSON)");
  auto* o_preset = app.add_option("--preset", preset, "rost | fig1b | fig1c | fig1d | rains-squares");
  auto* o_seed = app.add_option("--seed", seed, "64-bit seed");
  auto* o_threads = app.add_option("--threads", threads, "worker threads (default: hardware count)");
  auto* o_out = app.add_option("--out", out, "output directory");
  auto* o_t = app.add_option("--t", t, "time");
  auto* o_grid = app.add_option("--grid", grid, "extent MxN (or N)");
  auto* o_rep = app.add_option("--replicas", replicas, "Monte Carlo replicas");
  app.add_option("--option", options, "command option key=JSON, repeatable");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : cgm::kExitUsage;
  }

  if (command.empty() && config_path.empty() && preset.empty()) {
    std::cerr << app.help();
    return cgm::kExitUsage;
  }

  try {
    cgm::Json j = cgm::Json::object();
    if (*o_config) {
      std::ifstream in(config_path);
      if (!in) throw cgm::ConfigError("cannot open config file '" + config_path + "'");
      try {
        j = cgm::Json::parse(in);
      } catch (const nlohmann::json::exception& e) {
        throw cgm::ConfigError(std::string("config parse error: ") + e.what());
      }
    }
    if (*o_preset) j["preset"] = preset;
    if (!command.empty()) j["command"] = command;
    cgm::RunConfig c = cgm::config_from_json(j);
    if (*o_seed) c.seed = seed;
    if (*o_threads) c.threads = threads;
    if (*o_out) c.out = out;
    if (*o_t) c.t = t;
    if (*o_rep) c.replicas = replicas;
    if (*o_grid) {
      auto extent = [&](std::string_view s) {
        std::size_t v = 0;
        const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || p != s.data() + s.size() || v == 0) {
          throw cgm::ConfigError("--grid expects MxN or N, got '" + grid + "'");
        }
        return v;
      };
      const auto x = grid.find('x');
      if (x == std::string::npos) {
        c.m = c.n = extent(grid);
      } else {
        c.m = extent(std::string_view(grid).substr(0, x));
        c.n = extent(std::string_view(grid).substr(x + 1));
      }
    }
    for (const auto& kv : options) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw cgm::ConfigError("--option expects key=JSON, got '" + kv + "'");
      try {
        c.options[kv.substr(0, eq)] = cgm::Json::parse(kv.substr(eq + 1));
      } catch (const nlohmann::json::exception&) {
        c.options[kv.substr(0, eq)] = kv.substr(eq + 1);
      }
    }
    if (c.command.empty()) {
      std::cerr << "no command given\n" << app.help();
      return cgm::kExitUsage;
    }
    const cgm::RunResult r = cgm::run(c);
    std::cout << r.manifest.dump(2) << "\n";
    return r.status;
  } catch (const cgm::Error& e) {
    print_error(e);
    return cgm::exit_status_for(e);
  } catch (const std::exception& e) {
    std::cerr << cgm::Json{{"error", "internal"}, {"message", e.what()}}.dump() << "\n";
    return cgm::kExitInternal;
  }
}
