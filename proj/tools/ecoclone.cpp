// ecoclone: reproducible reports on optimal and economical quantum cloners.
//
// Exit status: 0 when every verdict passes, 1 when any verdict fails or a
// search is indeterminate, 2 on usage or validation errors.

#include "ecoclone/commands.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

struct Options {
  std::string kind = "universal";
  int dim = 2;
  int dmin = 2;
  int dmax = 7;
  double tol = 1e-8;
  std::uint64_t seed = 0;
  int restarts = 100;
  long samples = 100000;
  std::string format = "text";
  bool force = false;
  std::string output;
};

// Writes to a sibling temporary and renames it into place.
void write_atomically(const std::string& path, const std::string& body) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string());
    out << body;
    if (!out.flush()) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

}  // namespace

int main(int argc, char** argv) {
  using namespace ecoclone;
  CLI::App app{"Optimal and economical quantum cloning of qudits"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--tol", o.tol, "Degeneracy tolerance relative to ||R||")->capture_default_str();
    sub->add_option("--seed", o.seed, "Random seed")->capture_default_str();
    sub->add_option("--restarts", o.restarts, "Multistart restarts")->capture_default_str();
    sub->add_option("--samples", o.samples, "Monte-Carlo samples")->capture_default_str();
    sub->add_option("--format", o.format, "Output format")
        ->check(CLI::IsMember({"text", "json", "csv"}))
        ->capture_default_str();
    sub->add_flag("--force", o.force, "Allow d beyond the verified range");
    sub->add_option("--output,-o", o.output, "Write the report to this file");
  };
  auto add_kind_dim = [&](CLI::App* sub) {
    sub->add_option("--kind", o.kind, "universal | phase-covariant | fourier")->capture_default_str();
    sub->add_option("--dim", o.dim, "Qudit dimension d")->capture_default_str();
  };

  auto* spectrum = app.add_subcommand("spectrum", "Spectrum and maximal eigenspace of R");
  auto* feasibility = app.add_subcommand("feasibility", "Search for an optimal economical cloner");
  auto* table = app.add_subcommand("fidelity-table", "Optimal and economical fidelities per dimension");
  auto* oracle = app.add_subcommand("oracle", "Compare closed-form R with an independent estimate");
  auto* ansatz = app.add_subcommand("ansatz", "Bell-basis ansatz machines and their economical constraints");
  for (auto* sub : {spectrum, feasibility, oracle, ansatz}) add_kind_dim(sub);
  table->add_option("--dmin", o.dmin, "Smallest dimension")->capture_default_str();
  table->add_option("--dmax", o.dmax, "Largest dimension")->capture_default_str();
  for (auto* sub : {spectrum, feasibility, table, oracle, ansatz}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  Report rep;
  try {
    const Format fmt = parse_format(o.format);
    if (table->parsed()) {
      rep = cmd_fidelity_table(o.dmin, o.dmax, o.force);
    } else {
      const Family f = parse_family(o.kind);
      if (spectrum->parsed()) rep = cmd_spectrum(f, o.dim, o.tol, o.force);
      else if (feasibility->parsed()) rep = cmd_feasibility(f, o.dim, o.restarts, o.seed, o.force);
      else if (oracle->parsed()) rep = cmd_oracle(f, o.dim, o.samples, o.seed, o.force);
      else rep = cmd_ansatz(f, o.dim, o.restarts, o.seed, o.force);
    }
    for (const auto& w : rep.warnings) std::cerr << "warning: " << w << "\n";
    const std::string body = render(rep, fmt);
    if (o.output.empty()) std::cout << body;
    else write_atomically(o.output, body);
  } catch (const IndeterminateError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return rep.all_passed() ? 0 : 1;
}
