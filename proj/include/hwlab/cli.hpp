#pragma once

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hwlab/alglat.hpp"
#include "hwlab/calkin.hpp"
#include "hwlab/eigensystem.hpp"
#include "hwlab/errors.hpp"
#include "hwlab/scan.hpp"
#include "hwlab/word.hpp"

namespace hwlab {

namespace cli_detail {

// Complex flag syntax: a+bi with optional signs, no whitespace.
inline Complex parse_complex_flag(const std::string& text) {
  const auto malformed = [&text]() {
    fail(errc::invalid_argument,
         "malformed complex value '" + text + "' (expected a+bi, no whitespace)");
  };
  if (text.empty()) malformed();
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) malformed();
  }
  const char* p = text.c_str();
  const auto component = [&](double& value, bool& is_imag) {
    double sign = 1.0;
    if (*p == '+' || *p == '-') {
      if (*p == '-') sign = -1.0;
      ++p;
      if (*p == '+' || *p == '-') malformed();
    }
    if (*p == 'i') {
      ++p;
      value = sign;
      is_imag = true;
      return;
    }
    char* end = nullptr;
    const double magnitude = std::strtod(p, &end);
    if (end == p || !std::isfinite(magnitude)) malformed();
    p = end;
    is_imag = false;
    if (*p == 'i') {
      ++p;
      is_imag = true;
    }
    value = sign * magnitude;
  };
  double first = 0.0;
  bool first_imag = false;
  component(first, first_imag);
  if (*p == '\0') return first_imag ? Complex(0.0, first) : Complex(first, 0.0);
  if (*p != '+' && *p != '-') malformed();
  double second = 0.0;
  bool second_imag = false;
  component(second, second_imag);
  if (*p != '\0' || first_imag || !second_imag) malformed();
  return {first, second};
}

inline std::string format_complex(Complex z) {
  char buffer[80];
  if (z.imag() == 0.0) {
    std::snprintf(buffer, sizeof(buffer), "%.10g", z.real());
  } else {
    std::snprintf(buffer, sizeof(buffer), "%.10g%+.10gi", z.real(), z.imag());
  }
  return buffer;
}

inline std::string format_real(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.6g", value);
  return buffer;
}

inline int exit_code_for(const error& e) {
  switch (e.code()) {
    case errc::not_an_eigenvalue:
    case errc::not_in_l2:
    case errc::not_in_alglat:
      return 3;
    case errc::malformed_csv:
      return 65;
    default:
      return 64;
  }
}

inline nlohmann::json json_complex(Complex z) { return nlohmann::json::array({z.real(), z.imag()}); }

inline int cmd_eigencheck(const std::string& lambda_text, int order, double grading,
                          std::ostream& out) {
  const Complex lambda = parse_complex_flag(lambda_text);
  const ClosedForm f = eigenfunction(lambda);  // throws not-an-eigenvalue outside the lollipop
  const char* verdict = lambda == Complex(0.0, 0.0)       ? "zero"
                        : std::abs(lambda - Complex(1.0, 0.0)) < 1.0 ? "bulb"
                                                                     : "stick";
  const double threshold = std::string(verdict) == "bulb" ? 1e-8 : 1e-6;
  const double residual = eigen_residual(f, lambda, order, 0, grading);
  out << "lambda: " << format_complex(lambda) << "\n";
  out << "verdict: " << verdict << "\n";
  out << "form: " << f.variant_name() << "\n";
  const double endpoint = f.singular_endpoint();
  if (endpoint < 0.0) {
    out << "grid: order " << order << ", uniform gauss\n";
  } else {
    out << "grid: order " << order << ", graded toward " << format_real(endpoint) << " (grading "
        << format_real(grading) << ")\n";
  }
  out << "residual: " << format_real(residual) << " (threshold " << format_real(threshold)
      << ")\n";
  if (!(residual < threshold)) {
    out << "status: residual failure\n";
    return 2;
  }
  out << "status: pass\n";
  return 0;
}

inline int cmd_chain(const std::string& lambda_text, int m, std::ostream& out) {
  const Complex lambda = parse_complex_flag(lambda_text);
  if (lambda.imag() != 0.0 || lambda.real() > 0.0) {
    fail(errc::not_in_l2, "chains exist at lambda = 0 and on the real interval (-2/(2m+1), 0)");
  }
  require(m >= 1, errc::invalid_argument, "chain order m must be >= 1");
  if (lambda == Complex(0.0, 0.0)) {
    const std::vector<ChainPolynomial> polys = chain_zero(m);
    out << "chain at lambda = 0, members f_n(x) = p_n(1/x) exp(-1/x)\n";
    for (int n = 0; n <= m; ++n) {
      out << "p_" << n << " = " << polys[n].to_string() << "\n";
    }
    double worst = 0.0;
    for (int n = 0; n + 1 <= m; ++n) {
      const double r = chain_step_residual(ClosedForm::exp_chain(polys[n + 1]),
                                           ClosedForm::exp_chain(polys[n]), 0.0);
      worst = std::max(worst, r);
      out << "step " << n + 1 << " -> " << n << " residual: " << format_real(r) << "\n";
    }
    if (!(worst < 1e-7)) {
      out << "status: residual failure\n";
      return 2;
    }
    out << "status: pass\n";
    return 0;
  }
  const ChainFamily family = chain_numeric(lambda.real(), m);  // inadmissible -> exit 3
  out << "chain at lambda = " << format_real(lambda.real()) << ", order " << m << "\n";
  out << "base eigen residual: " << format_real(family.eigen_residual0) << "\n";
  double worst = family.eigen_residual0;
  for (size_t n = 0; n < family.step_residuals.size(); ++n) {
    worst = std::max(worst, family.step_residuals[n]);
    out << "step " << n + 1 << " -> " << n << " residual: " << format_real(family.step_residuals[n])
        << "\n";
  }
  out << "growth table (measured sup |f_n|(x-s)^{n+1-1/s} vs recursive bound):\n";
  bool within = true;
  for (const GrowthRow& row : growth_bound_check(family)) {
    within = within && row.within;
    out << "  n=" << row.n << " measured " << format_real(row.measured) << " bound "
        << format_real(row.bound) << (row.within ? "" : "  EXCEEDED") << "\n";
  }
  if (!(worst < 1e-6) || !within) {
    out << "status: residual failure\n";
    return 2;
  }
  out << "status: pass\n";
  return 0;
}

inline int cmd_symbol(const std::string& word_text, const std::vector<std::string>& index_at,
                      std::ostream& out, std::ostream& err) {
  OperatorWord word;
  try {
    word = parse_word(word_text);
  } catch (const parse_error& pe) {
    err << pe.what() << "\n  " << word_text << "\n  " << std::string(pe.position(), ' ') << "^\n";
    return 64;
  }
  const SymbolPair symbol = symbol_of(word);

  nlohmann::json doc;
  doc["word"] = word_to_string(word);
  doc["symbol"]["f_minus"] = nlohmann::json::array();
  for (Complex c : symbol.minus) doc["symbol"]["f_minus"].push_back(json_complex(c));
  doc["symbol"]["f_plus"] = nlohmann::json::array();
  for (Complex c : symbol.plus) doc["symbol"]["f_plus"].push_back(json_complex(c));

  const int samples = 32;
  const std::vector<Complex> boundary = essential_spectrum(symbol, samples);
  doc["essential_spectrum"]["stick"] = nlohmann::json::array();
  doc["essential_spectrum"]["circle"] = nlohmann::json::array();
  for (int j = 0; j < samples; ++j) {
    doc["essential_spectrum"]["stick"].push_back(json_complex(boundary[j]));
    doc["essential_spectrum"]["circle"].push_back(json_complex(boundary[samples + j]));
  }

  doc["index"] = nlohmann::json::array();
  for (const std::string& text : index_at) {
    const Complex lambda = parse_complex_flag(text);
    nlohmann::json entry;
    entry["lambda"] = json_complex(lambda);
    try {
      entry["index"] = fredholm_index(symbol, lambda);
    } catch (const error& e) {
      if (e.code() != errc::index_undefined) throw;
      entry["index"] = "undefined: essential";
    }
    doc["index"].push_back(entry);
  }
  out << doc.dump(2) << "\n";
  return 0;
}

inline int cmd_scan(const ScanGrid& grid, int size, const std::string& out_path, std::ostream& out,
                    std::ostream& err) {
  const bool svg = out_path.size() > 4 && out_path.substr(out_path.size() - 4) == ".svg";
  const bool csv = out_path.size() > 4 && out_path.substr(out_path.size() - 4) == ".csv";
  require(svg || csv, errc::invalid_argument, "output path must end in .csv or .svg");
  const ScanResult result = pseudospectrum(parse_word("H - Mx"), grid, size);
  std::ofstream file(out_path, std::ios::binary);
  if (!file) {
    err << "cannot open '" << out_path << "' for writing\n";
    return 73;
  }
  if (svg) {
    write_scan_svg(result, file);
  } else {
    write_scan_csv(result, file);
  }
  file.flush();
  if (!file.good()) {
    err << "write to '" << out_path << "' failed\n";
    return 73;
  }
  const DistanceProfile profile = lollipop_distance_profile(result);
  out << "wrote " << out_path << ": " << grid.nx << "x" << grid.ny << " points, N = " << size
      << "\n";
  out << "median sigma_min by distance band [0,0.05) [0.05,0.2) [0.2,0.5) [0.5,inf): ";
  for (double median : profile.median) out << format_real(median) << ' ';
  out << (profile.strictly_increasing ? "(strictly increasing)" : "(NOT increasing)") << "\n";
  return 0;
}

inline int cmd_compact_approx(const std::string& kernel_path, int levels, std::ostream& out,
                              std::ostream& err) {
  std::ifstream file(kernel_path);
  if (!file) {
    err << "cannot open '" << kernel_path << "' for reading\n";
    return 66;
  }
  const KernelFunction kernel = load_kernel_csv(file);
  const DyadicApproximation approx = dyadic_approximation(kernel, levels);
  out << "kernel: " << kernel.side() << " x " << kernel.side() << " samples from " << kernel_path
      << "\n";
  out << "level  residual_bound\n";
  for (int level = 1; level <= approx.levels; ++level) {
    out << "  " << level << "    " << format_real(approx.level_bounds[level - 1]) << "\n";
  }
  out << "rank: " << approx.rank() << "\n";
  const double measured =
      Eigen::BDCSVD<Eigen::MatrixXd>(kernel.samples - approx.dense()).singularValues()(0) /
      kernel.side();
  out << "measured error: " << format_real(measured) << " (bound "
      << format_real(approx.residual_bound) << ")\n";
  return 0;
}

inline int cmd_witness_spike(double s, const std::vector<int>& ns, std::ostream& out) {
  out << "spike witness at s = " << format_real(s) << ", predicted moment limit s^2 = "
      << format_real(s * s) << "\n";
  out << "n  moment  limit  error  h_norm\n";
  for (const SpikeRow& row : witness_spike(s, ns)) {
    out << row.n << "  " << format_real(row.moment) << "  " << format_real(row.moment_limit)
        << "  " << format_real(std::fabs(row.moment - row.moment_limit)) << "  "
        << format_real(row.h_norm) << "\n";
  }
  return 0;
}

inline int cmd_witness_upsilon(const std::string& tau_text, double rho,
                               const std::vector<double>& radii, std::ostream& out) {
  const Complex tau = parse_complex_flag(tau_text);
  out << "upsilon witness toward tau = " << format_complex(tau) << ", rho = " << format_real(rho)
      << " (predicted limit 0 as alpha -> tau)\n";
  out << "alpha  quadrature  formula  error  eigen_residual\n";
  for (const UpsilonRow& row : witness_upsilon(tau, radii, rho)) {
    out << format_complex(row.alpha) << "  " << format_real(row.quadrature) << "  "
        << format_real(row.formula) << "  "
        << format_real(std::fabs(row.quadrature - row.formula)) << "  "
        << format_real(row.eigen_residual) << "\n";
  }
  return 0;
}

}  // namespace cli_detail

// In-process entry point: args excludes the program name. Every command
// writes deterministic bytes for fixed flags.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"laboratory for the averaging/position operator algebra on L2[0,1]"};
  app.require_subcommand(0, 1);
  int seed = 0;
  app.add_option("--seed", seed, "seed for randomized schedules (kept for reproducibility)")
      ->capture_default_str();

  std::string eig_lambda;
  int eig_order = 96;
  double eig_grading = 3.0;
  CLI::App* eigencheck =
      app.add_subcommand("eigencheck", "test lambda for point-spectrum membership by residual");
  eigencheck->add_option("--lambda", eig_lambda, "spectral parameter, a+bi syntax")->required();
  eigencheck->add_option("--order", eig_order, "quadrature grid order")->capture_default_str();
  eigencheck->add_option("--grading", eig_grading, "grading exponent toward the singularity")
      ->capture_default_str();

  std::string chain_lambda;
  int chain_m = 2;
  CLI::App* chain =
      app.add_subcommand("chain", "build a generalized eigenvector chain and check residuals");
  chain->add_option("--lambda", chain_lambda, "chain eigenvalue (0 or a stick point)")->required();
  chain->add_option("--m", chain_m, "chain order")->capture_default_str();

  std::string symbol_word;
  std::vector<std::string> symbol_index_at;
  CLI::App* symbol = app.add_subcommand(
      "symbol", "quotient symbol of an operator word as JSON, with optional index queries");
  symbol->add_option("--word", symbol_word, "word in Mx, H, V, I with + - * ^ and scalars")
      ->required();
  symbol->add_option("--index-at", symbol_index_at,
                     "lambda at which to report the winding index (repeatable)");

  ScanGrid scan_grid;
  int scan_size = 64;
  std::string scan_out = "scan.csv";
  CLI::App* scan =
      app.add_subcommand("scan", "sigma_min scan of the difference word over a spectral window");
  scan->add_option("--nx", scan_grid.nx, "grid points along Re")->capture_default_str();
  scan->add_option("--ny", scan_grid.ny, "grid points along Im")->capture_default_str();
  scan->add_option("--re-min", scan_grid.re_min, "window left edge")->capture_default_str();
  scan->add_option("--re-max", scan_grid.re_max, "window right edge")->capture_default_str();
  scan->add_option("--im-min", scan_grid.im_min, "window bottom edge")->capture_default_str();
  scan->add_option("--im-max", scan_grid.im_max, "window top edge")->capture_default_str();
  scan->add_option("--N", scan_size, "compression size")->capture_default_str();
  scan->add_option("--out", scan_out, "output path, .csv or .svg")->capture_default_str();

  std::string kernel_path;
  int kernel_levels = 3;
  CLI::App* compact = app.add_subcommand(
      "compact-approx", "dyadic finite-rank approximation of a triangular kernel");
  compact
      ->add_option("--kernel", kernel_path,
                   "kernel CSV: N rows of N comma-separated reals, row = x index ascending, "
                   "column = s index ascending, midpoint samples")
      ->required();
  compact->add_option("--levels", kernel_levels, "dyadic levels L (side must be a multiple of 2^L)")
      ->capture_default_str();

  std::string witness_kind;
  double witness_s = 0.3;
  std::vector<int> witness_ns;
  std::string witness_tau = "1";
  double witness_rho = 1.0;
  std::vector<double> witness_radii;
  CLI::App* witness =
      app.add_subcommand("witness", "limit tables for the spike and upsilon witness families");
  witness->add_option("--kind", witness_kind, "spike | upsilon")
      ->required()
      ->check(CLI::IsMember({"spike", "upsilon"}));
  witness->add_option("--s", witness_s, "spike center in (0,1)")->capture_default_str();
  witness->add_option("--n", witness_ns, "spike widths (repeatable; default 4 8 16 32 64)");
  witness->add_option("--tau", witness_tau, "upsilon boundary target on the unit circle, not -1")
      ->capture_default_str();
  witness->add_option("--rho", witness_rho, "upsilon moment exponent")->capture_default_str();
  witness->add_option("--radius", witness_radii,
                      "upsilon radii in [0,1) (repeatable; default 0 0.3 0.6 0.9 0.99)");

  try {
    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("hwlab");
    for (const std::string& a : args) argv.push_back(a.c_str());
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 64;
  }

  try {
    if (eigencheck->parsed()) return cli_detail::cmd_eigencheck(eig_lambda, eig_order, eig_grading, out);
    if (chain->parsed()) return cli_detail::cmd_chain(chain_lambda, chain_m, out);
    if (symbol->parsed()) return cli_detail::cmd_symbol(symbol_word, symbol_index_at, out, err);
    if (scan->parsed()) return cli_detail::cmd_scan(scan_grid, scan_size, scan_out, out, err);
    if (compact->parsed()) return cli_detail::cmd_compact_approx(kernel_path, kernel_levels, out, err);
    if (witness->parsed()) {
      if (witness_kind == "spike") {
        if (witness_ns.empty()) witness_ns = {4, 8, 16, 32, 64};
        return cli_detail::cmd_witness_spike(witness_s, witness_ns, out);
      }
      if (witness_radii.empty()) witness_radii = {0.0, 0.3, 0.6, 0.9, 0.99};
      return cli_detail::cmd_witness_upsilon(witness_tau, witness_rho, witness_radii, out);
    }
    out << app.help();
    return 0;
  } catch (const parse_error& pe) {
    err << pe.what() << "\n";
    return 64;
  } catch (const error& e) {
    err << e.what() << "\n";
    return cli_detail::exit_code_for(e);
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 70;
  }
}

}  // namespace hwlab
