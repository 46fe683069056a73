#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oprema/oprema.hpp"

namespace {

using namespace oprema;

enum Exit { kOk = 0, kUser = 1, kLimit = 2, kMismatch = 3 };

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::malformed, "cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

bool has_suffix(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

/// A program file is either an .opimg image or .oprema source.
PlugboardImage load_program(const std::string& path) {
  const image::Bytes bytes = image::read_file(path);
  if (bytes.size() >= 4 && std::equal(bytes.begin(), bytes.begin() + 4, image::kMagic)) return image::load_image(bytes);
  if (has_suffix(path, ".opimg")) return image::load_image(bytes);
  return asm_::assemble(std::string(bytes.begin(), bytes.end()));
}

struct StartOptions {
  std::vector<int> positions;
  std::optional<int> pc;
  std::int64_t max_steps = 10'000'000;
  std::int64_t max_pulses = std::numeric_limits<std::int64_t>::max();
};

void apply_start(PlugboardImage& img, const StartOptions& o) {
  if (o.pc) {
    if (*o.pc < 0 || *o.pc >= kProgramRows) throw Error(Errc::malformed, "start pc must be 0..299");
    img.start.pc = *o.pc;
  }
  if (!o.positions.empty()) {
    if (o.positions.size() != kCyclicUnits) throw Error(Errc::malformed, "--start-positions takes four values");
    for (int k = 0; k < kCyclicUnits; ++k) {
      const int p = o.positions[static_cast<std::size_t>(k)];
      const int size = img.cyclic[static_cast<std::size_t>(k)].size();
      if (p < 0 || (size == 0 ? p != 0 : p >= size))
        throw Error(Errc::malformed, "start position " + std::to_string(p) + " outside Y" + std::to_string(k) + " (" +
                                         std::to_string(size) + " rows)");
      img.start.positions[static_cast<std::size_t>(k)] = p;
    }
  }
}

void add_start_options(CLI::App* cmd, StartOptions& o) {
  cmd->add_option("--start-positions", o.positions, "initial cyclic positions a,b,c,d")->delimiter(',')->expected(4);
  cmd->add_option("--start-pc", o.pc, "initial program row");
  cmd->add_option("--max-steps", o.max_steps, "stop after N instructions")->check(CLI::NonNegativeNumber);
  cmd->add_option("--max-pulses", o.max_pulses, "stop after N clock pulses")->check(CLI::NonNegativeNumber);
}

/// Per-operation counts for the timing summary.
struct TimingTally {
  std::map<std::string, std::pair<std::int64_t, std::int64_t>> by_op;  // mnemonic -> (count, pulses)
  void add(const control::TraceRecord& r) {
    const std::string op = r.mnemonic.substr(0, r.mnemonic.find(' '));
    auto& e = by_op[op];
    ++e.first;
    e.second += r.op_pulses;
  }
  void print(std::ostream& out, std::int64_t steps, std::int64_t pulses) const {
    out << "steps " << steps << ", pulses " << pulses << ", time " << Millis::of_pulses(pulses).str() << " ms\n";
    for (const auto& [op, e] : by_op)
      out << "  " << op << " x" << e.first << ": " << Millis::of_pulses(e.second).str() << " ms ("
          << Millis::of_pulses(e.second / e.first).str() << " ms each)\n";
  }
};

void print_registers(std::ostream& out, const MachineState& st) {
  for (int r = 0; r < kRegisters; ++r) {
    const Number& n = st.registers[static_cast<std::size_t>(r)];
    if (n.is_zero()) continue;
    out << "R" << r << " = " << format_number(n) << "\n";
  }
  out << "pc = " << st.pc << ", Y positions =";
  for (int p : st.cyclic_pos) out << " " << p;
  out << "\n";
}

int interactive_run(MachineState& st, const PlugboardImage& img) {
  std::cout << "commands: step [n], run, regs, out, pc, quit\n";
  control::start(st);
  std::string line;
  std::size_t shown = 0;
  auto flush_output = [&] {
    for (; shown < st.output.size(); ++shown) std::cout << st.output[shown] << "\n";
  };
  while (std::cout << "> " << std::flush, std::getline(std::cin, line)) {
    std::istringstream in(line);
    std::string cmd;
    in >> cmd;
    try {
      if (cmd == "step" || cmd == "s") {
        long n = 1;
        in >> n;
        for (long i = 0; i < n && st.mode == Mode::running; ++i) std::cout << control::format_trace(control::step(st, img)) << "\n";
        flush_output();
        if (st.mode == Mode::idle) std::cout << "idle\n";
      } else if (cmd == "run" || cmd == "r") {
        const auto rep = control::run(st, img, {10'000'000, std::numeric_limits<std::int64_t>::max(), false});
        flush_output();
        std::cout << control::run_status_name(rep.status) << " after " << rep.steps << " steps\n";
      } else if (cmd == "regs") {
        print_registers(std::cout, st);
      } else if (cmd == "out") {
        for (const auto& s : st.output) std::cout << s << "\n";
      } else if (cmd == "pc") {
        std::cout << st.pc << " " << control::describe_row(img.row_bits(st.pc), st.pc, img) << "\n";
      } else if (cmd == "start") {
        control::start(st);
      } else if (cmd == "quit" || cmd == "q") {
        break;
      } else if (!cmd.empty()) {
        std::cout << "unknown command\n";
      }
    } catch (const Error& e) {
      std::cout << "error: " << e.what() << "\n";
    }
  }
  return kOk;
}

int cmd_run(const std::string& path, const StartOptions& so, const std::string& trace_file, bool trace_stdout, bool timing,
            bool interactive) {
  PlugboardImage img = load_program(path);
  apply_start(img, so);
  MachineState st = initial_state(img);
  if (interactive) return interactive_run(st, img);

  std::ofstream trace_out;
  if (!trace_file.empty()) {
    trace_out.open(trace_file);
    if (!trace_out) throw Error(Errc::malformed, "cannot write " + trace_file);
  }
  TimingTally tally;
  std::size_t shown = 0;
  auto observer = [&](const control::TraceRecord& r) {
    if (trace_out) trace_out << control::format_trace(r) << "\n";
    if (trace_stdout) std::cout << control::format_trace(r) << "\n";
    if (!trace_stdout)
      for (; shown < st.output.size(); ++shown) std::cout << st.output[shown] << "\n";
    if (timing) tally.add(r);
  };
  control::Limits limits{so.max_steps, so.max_pulses, false};
  const auto rep = control::run(st, img, limits, observer);
  for (const auto& d : st.diagnostics) std::cerr << "note: " << d << "\n";
  if (timing) tally.print(std::cerr, rep.steps, rep.pulses);
  if (rep.status == control::RunStatus::step_limit || rep.status == control::RunStatus::pulse_limit) {
    std::cerr << control::run_status_name(rep.status) << " reached after " << rep.steps << " steps at pc " << st.pc << "\n";
    return kLimit;
  }
  return kOk;
}

int cmd_twin(const std::string& path, const StartOptions& so, const std::vector<std::string>& injects, const std::string& policy_text,
             int max_retries, bool interactive) {
  PlugboardImage img = load_program(path);
  apply_start(img, so);
  twin::TwinSession session(img);
  for (const auto& spec : injects) session.inject(twin::parse_fault(spec));
  twin::TwinLimits limits;
  limits.max_steps = so.max_steps;
  limits.max_retries = max_retries;
  twin::TwinReport rep;
  if (interactive) {
    rep = twin::run_twin(
        session,
        [](const twin::MismatchRecord& m, std::size_t) {
          std::cerr << twin::format_mismatch(m) << "\n";
          for (;;) {
            std::cerr << "resolve (repeat | insert[:R<k>=<value>] | halt)? " << std::flush;
            std::string line;
            if (!std::getline(std::cin, line)) return twin::Resolution{twin::Action::halt, {}, {}};
            try {
              return twin::parse_resolution(line);
            } catch (const Error& e) {
              std::cerr << e.what() << "\n";
            }
          }
        },
        limits);
  } else {
    const twin::Policy policy{twin::parse_policy(policy_text)};
    rep = twin::run_twin(session, policy, limits);
  }
  for (const auto& s : session.machine(twin::Side::a).output) std::cout << s << "\n";
  for (const auto& m : rep.mismatches) std::cerr << twin::format_mismatch(m) << "\n";
  std::cerr << "twin: " << twin::twin_status_name(rep.status) << " after " << rep.steps << " lockstep steps, " << rep.mismatches.size()
            << " mismatch" << (rep.mismatches.size() == 1 ? "" : "es") << "\n";
  if (session.error()) std::cerr << "error: " << *session.error() << "\n";
  switch (rep.status) {
    case twin::TwinStatus::completed: return kOk;
    case twin::TwinStatus::step_limit: return kLimit;
    case twin::TwinStatus::machine_error: return kUser;
    case twin::TwinStatus::halted_on_mismatch:
    case twin::TwinStatus::retries_exhausted: return kMismatch;
  }
  return kMismatch;
}

int cmd_verify(bool table, bool mutant) {
  std::vector<verify::CheckResult> results;
  if (mutant) {
    const verify::RoundNormFn broken = verify::mutant_round_norm();
    results.push_back(verify::rounding_statistics(broken));
    if (table) std::cout << verify::rounding_table(broken) << "\n";
  } else {
    results = verify::run_all();
    if (table) std::cout << verify::rounding_table() << "\n";
  }
  bool ok = true;
  for (const auto& r : results) {
    std::cout << (r.passed ? "PASS" : "FAIL") << "  " << r.id << "  " << r.name << ": " << r.detail << "\n";
    ok = ok && r.passed;
  }
  return ok ? kOk : kUser;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Oprema relay computer emulator"};
  app.require_subcommand(1);

  std::string src, out, path, trace_file, policy = "halt";
  StartOptions so;
  bool timing = false, interactive = false, table = false, mutant = false, run_demo = false;
  std::vector<std::string> injects;
  int max_retries = 10;

  auto* asm_cmd = app.add_subcommand("asm", "assemble .oprema source into an .opimg image");
  asm_cmd->add_option("source", src, "source file")->required();
  asm_cmd->add_option("-o,--output", out, "image file (default: source name with .opimg)");

  auto* disasm_cmd = app.add_subcommand("disasm", "print the source text of an image");
  disasm_cmd->add_option("image", path, "image file")->required();
  disasm_cmd->add_option("-o,--output", out, "write to a file instead");

  auto* run_cmd = app.add_subcommand("run", "run a program to STOP");
  run_cmd->add_option("program", path, "image or source file")->required();
  run_cmd->add_option("--trace", trace_file, "write the step trace to FILE");
  run_cmd->add_flag("--timing", timing, "print pulse and millisecond totals");
  run_cmd->add_flag("--interactive", interactive, "step through the program from a prompt");
  add_start_options(run_cmd, so);

  auto* trace_cmd = app.add_subcommand("trace", "run a program and print its step trace");
  trace_cmd->add_option("program", path, "image or source file")->required();
  trace_cmd->add_flag("--timing", timing, "print pulse and millisecond totals");
  add_start_options(trace_cmd, so);

  auto* twin_cmd = app.add_subcommand("twin", "run two machines in lockstep");
  twin_cmd->add_option("program", path, "image or source file")->required();
  twin_cmd->add_option("--inject", injects, "fault A|B:step:location:transient|stuck (repeatable)");
  twin_cmd->add_option("--policy", policy, "mismatch resolutions: repeat, insert, insert:R<k>=<value>, halt; comma-separated script");
  twin_cmd->add_option("--max-retries", max_retries, "repeats of one instruction before giving up")->check(CLI::NonNegativeNumber);
  twin_cmd->add_flag("--interactive", interactive, "ask for each resolution");
  add_start_options(twin_cmd, so);

  auto* verify_cmd = app.add_subcommand("verify", "run the oracle property suites");
  verify_cmd->add_flag("--table", table, "print the rounding error table");
  verify_cmd->add_flag("--mutant", mutant, "check a deliberately broken roundNorm instead");

  std::string demo_name;
  auto* demo_cmd = app.add_subcommand("demo", "print or run a bundled demo program");
  demo_cmd->add_option("name", demo_name, "polynomial, raytrace, timing, specials, stop, or list")->required();
  demo_cmd->add_flag("--run", run_demo, "run it instead of printing the source");
  demo_cmd->add_flag("--timing", timing, "print pulse and millisecond totals when running");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUser;
  }

  std::string current = src.empty() ? path : src;
  try {
    if (*asm_cmd) {
      const PlugboardImage img = asm_::assemble(read_text(src));
      if (out.empty()) out = (has_suffix(src, ".oprema") ? src.substr(0, src.size() - 7) : src) + ".opimg";
      image::write_file(out, image::save_image(img));
      const auto u = asm_::usage(img);
      if (u.program == 0 && u.constants == 0) std::cerr << src << ": warning: empty program\n";
      std::cout << out << ": " << asm_::usage_summary(u) << "\n";
      return kOk;
    }
    if (*disasm_cmd) {
      const std::string text = asm_::disassemble(load_program(path));
      if (out.empty()) {
        std::cout << text;
      } else {
        std::ofstream f(out);
        if (!(f << text)) throw Error(Errc::malformed, "cannot write " + out);
      }
      return kOk;
    }
    if (*run_cmd) return cmd_run(path, so, trace_file, false, timing, interactive);
    if (*trace_cmd) return cmd_run(path, so, "", true, timing, false);
    if (*twin_cmd) return cmd_twin(path, so, injects, policy, max_retries, interactive);
    if (*verify_cmd) return cmd_verify(table, mutant);
    if (*demo_cmd) {
      const auto demos = demos::corpus();
      if (demo_name == "list") {
        for (const auto& d : demos) std::cout << d.name << "\n";
        return kOk;
      }
      const auto it = std::find_if(demos.begin(), demos.end(), [&](const auto& d) { return d.name == demo_name; });
      if (it == demos.end()) {
        std::cerr << "unknown demo '" << demo_name << "'\n";
        return kUser;
      }
      if (!run_demo) {
        std::cout << it->source;
        return kOk;
      }
      current = "demo " + demo_name;
      const PlugboardImage img = asm_::assemble(it->source);
      MachineState st = initial_state(img);
      TimingTally tally;
      const auto rep = control::run(st, img, {so.max_steps, so.max_pulses, false}, [&](const control::TraceRecord& r) { tally.add(r); });
      for (const auto& s : st.output) std::cout << s << "\n";
      if (timing) tally.print(std::cerr, rep.steps, rep.pulses);
      return rep.status == control::RunStatus::halted ? kOk : kLimit;
    }
  } catch (const Error& e) {
    std::cerr << current << (e.line() > 0 ? ":" : ": ") << e.what() << "\n";
    return kUser;
  }
  return kOk;
}
