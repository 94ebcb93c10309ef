// Command-line front end. Talks to the library only through the C interface.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <unistd.h>

#include "varsob/varsob.h"

namespace fs = std::filesystem;

namespace {

constexpr int kExitChecksFailed = 1;
constexpr int kExitBadInput = 2;

struct Owned {
  char* p = nullptr;
  ~Owned() { varsob_string_free(p); }
};

int report_error(const std::string& context) {
  std::cerr << "varsob: " << context << ": " << varsob_last_error() << "\n";
  return kExitBadInput;
}

bool read_text(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return true;
}

bool write_atomic(const fs::path& target, const std::string& content) {
  std::error_code ec;
  if (target.has_parent_path()) fs::create_directories(target.parent_path(), ec);
  const fs::path tmp = target.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) return false;
    out << content;
    if (!out.flush()) return false;
  }
  fs::rename(tmp, target, ec);
  if (ec) fs::remove(tmp, ec);
  return !ec;
}

int emit(const std::string& content, const std::string& out_dir, const std::string& file_name) {
  if (out_dir.empty()) {
    std::cout << content;
    return 0;
  }
  const fs::path target = fs::path(out_dir) / file_name;
  if (!write_atomic(target, content)) {
    std::cerr << "varsob: cannot write " << target << "\n";
    return kExitBadInput;
  }
  return 0;
}

std::string json_number(double v) {
  std::ostringstream ss;
  ss.precision(17);
  ss << v;
  return ss.str();
}

std::string json_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

struct RunFlags {
  std::string scenario;
  double tol = 0.0;
  unsigned long long seed = 0;
  double sigma = 0.0;
  double epsilon = 0.0;
  std::string format = "json";
  std::string out;
  unsigned jobs = 1;
  CLI::Option* tol_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* sigma_opt = nullptr;
  CLI::Option* epsilon_opt = nullptr;
};

void add_run_flags(CLI::App* cmd, RunFlags& f, bool reports) {
  cmd->add_option("scenario", f.scenario, "Scenario JSON file (one scenario or {\"scenarios\": [...]})")
      ->required()
      ->check(CLI::ExistingFile);
  f.tol_opt = cmd->add_option("--tol", f.tol, "Norm and solver tolerance (default 1e-9)")->check(CLI::PositiveNumber);
  f.seed_opt = cmd->add_option("--seed", f.seed, "Seed for random function families (default 0)");
  f.sigma_opt = cmd->add_option("--sigma", f.sigma, "Ball dilation factor sigma > 1 (default 2)");
  f.epsilon_opt = cmd->add_option("--epsilon", f.epsilon, "Uniform perfectness resolution (default 0.1)")
                      ->check(CLI::PositiveNumber);
  if (reports) cmd->add_option("--format", f.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--out", f.out, "Output directory; stdout when absent");
  cmd->add_option("--jobs", f.jobs, "Scenarios evaluated in parallel")->check(CLI::Range(1u, 256u));
}

int run_command(const std::string& command, const RunFlags& f) {
  std::string scenario;
  if (!read_text(f.scenario, scenario)) {
    std::cerr << "varsob: cannot read " << f.scenario << "\n";
    return kExitBadInput;
  }
  std::string options = "{\"jobs\": " + std::to_string(f.jobs);
  options += ", \"base_dir\": " + json_string(fs::absolute(f.scenario).parent_path().string());
  if (*f.tol_opt) options += ", \"tol\": " + json_number(f.tol);
  if (*f.seed_opt) options += ", \"seed\": " + std::to_string(f.seed);
  if (*f.sigma_opt) options += ", \"sigma\": " + json_number(f.sigma);
  if (*f.epsilon_opt) options += ", \"epsilon\": " + json_number(f.epsilon);
  options += "}";

  Owned out;
  int all_pass = 0;
  if (varsob_run(command.c_str(), scenario.c_str(), options.c_str(), &out.p, &all_pass) != VARSOB_OK)
    return report_error(f.scenario);
  const std::string stem = fs::path(f.scenario).stem().string() + "." + command;
  int rc = 0;
  if (f.format == "csv") {
    Owned csv;
    if (varsob_reports_to_csv(out.p, &csv.p) != VARSOB_OK) return report_error("csv");
    rc = emit(csv.p, f.out, stem + ".csv");
  } else {
    rc = emit(out.p, f.out, stem + ".json");
  }
  if (rc != 0) return rc;
  return all_pass ? 0 : kExitChecksFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Variable-exponent Hajlasz-Sobolev norms and embedding checks on finite metric measure spaces"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(varsob_version()));

  std::string kind, gen_out;
  std::size_t n = 8, nx = 8, ny = 0, n_dim = 1;
  int level = 3;
  double h = 0.0, atom = 1.0, ratio = 1.0 / 3.0, dim_left = 1.0, dim_right = 2.0;
  auto* gen = app.add_subcommand("space-gen", "Write a generated space as JSON");
  gen->add_option("kind", kind, "Space family")
      ->required()
      ->check(CLI::IsMember({"grid1d", "grid2d", "ball_grid_with_atom", "cantor", "two_zone_glued"}));
  gen->add_option("--n", n, "Points (grid1d) or half-width (two_zone_glued)");
  gen->add_option("--nx", nx, "Grid columns (grid2d)");
  auto* ny_opt = gen->add_option("--ny", ny, "Grid rows (grid2d, default nx)");
  auto* h_opt = gen->add_option("--spacing", h, "Spacing (default 1/n for grids, 1/16 for the atom grid)");
  gen->add_option("--n-dim", n_dim, "Dimension of the atom grid (1-3)");
  gen->add_option("--atom", atom, "Atom mass at the origin");
  gen->add_option("--level", level, "Cantor construction level");
  gen->add_option("--ratio", ratio, "Cantor contraction ratio");
  gen->add_option("--dim-left", dim_left, "Mass exponent left of the origin (two_zone_glued)");
  gen->add_option("--dim-right", dim_right, "Mass exponent right of the origin (two_zone_glued)");
  gen->add_option("--out", gen_out, "Output directory; stdout when absent");

  RunFlags norm_flags, grad_flags, verify_flags, nec_flags;
  auto* norm = app.add_subcommand("norm", "Luxemburg norm of the scenario function");
  add_run_flags(norm, norm_flags, false);
  auto* gradient = app.add_subcommand("gradient", "Minimal scalar or vector gradient of the scenario function");
  add_run_flags(gradient, grad_flags, false);
  auto* verify = app.add_subcommand("verify", "Evaluate the embedding inequalities named in the harness section");
  add_run_flags(verify, verify_flags, true);
  auto* necessity = app.add_subcommand("necessity", "Lower regularity forced by an embedding");
  add_run_flags(necessity, nec_flags, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitBadInput;
  }

  if (*gen) {
    std::string params = "{\"kind\": " + json_string(kind);
    if (kind == "grid1d" || kind == "two_zone_glued") params += ", \"n\": " + std::to_string(n);
    if (kind == "grid2d") {
      params += ", \"nx\": " + std::to_string(nx);
      params += ", \"ny\": " + std::to_string(*ny_opt ? ny : nx);
    }
    if (*h_opt) params += ", \"h\": " + json_number(h);
    if (kind == "ball_grid_with_atom")
      params += ", \"n_dim\": " + std::to_string(n_dim) + ", \"atom\": " + json_number(atom);
    if (kind == "cantor") params += ", \"level\": " + std::to_string(level) + ", \"ratio\": " + json_number(ratio);
    if (kind == "two_zone_glued")
      params += ", \"dim_left\": " + json_number(dim_left) + ", \"dim_right\": " + json_number(dim_right);
    params += "}";
    varsob_space* space = nullptr;
    if (varsob_space_generate(params.c_str(), &space) != VARSOB_OK) return report_error("space-gen");
    std::unique_ptr<varsob_space, void (*)(varsob_space*)> guard(space, varsob_space_free);
    Owned json;
    if (varsob_space_to_json(space, &json.p) != VARSOB_OK) return report_error("space-gen");
    return emit(json.p, gen_out, kind + ".json");
  }
  if (*norm) return run_command("norm", norm_flags);
  if (*gradient) return run_command("gradient", grad_flags);
  if (*verify) return run_command("verify", verify_flags);
  if (*necessity) return run_command("necessity", nec_flags);
  return kExitBadInput;
}
