// Stand-in for the walker's microcontroller: speaks the line protocol on
// stdin/stdout so the serial backend can be exercised without hardware.
// Reply behaviour per request type is selectable, which is what the protocol
// conformance tests drive.

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gaitevo/genome.hpp"

namespace {

using gaitevo::Genome;
using gaitevo::parse_genome;
using gaitevo::validate;

enum class Mode { Ok, Garbage, Silent };

Mode parse_mode(const std::string& s) {
  if (s == "ok") return Mode::Ok;
  if (s == "garbage") return Mode::Garbage;
  if (s == "silent") return Mode::Silent;
  throw CLI::ValidationError("mode must be ok, garbage or silent");
}

void reply(const std::string& line) { std::cout << line << "\n" << std::flush; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mock walker device for serial protocol tests"};
  std::string pong_mode = "ok";
  std::string prog_mode = "ok";
  std::string go_mode = "dist";
  int nack_code = 0;
  std::string dist_list = "3.5";
  app.add_option("--pong", pong_mode, "PING reply: ok, garbage or silent");
  app.add_option("--prog", prog_mode, "PROG reply: ok, garbage or silent");
  app.add_option("--nack", nack_code, "always reply ERR <code> to PROG");
  app.add_option("--go", go_mode, "GO reply: dist, fall, garbage or silent");
  app.add_option("--dist", dist_list, "comma-separated DIST values, cycled");
  CLI11_PARSE(app, argc, argv);

  std::vector<std::string> dists;
  std::stringstream ss(dist_list);
  for (std::string item; std::getline(ss, item, ',');) dists.push_back(item);
  if (dists.empty()) dists.push_back("3.5");
  std::size_t next_dist = 0;

  std::string line;
  while (std::getline(std::cin, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();

    if (line == "PING") {
      switch (parse_mode(pong_mode)) {
        case Mode::Ok: reply("PONG"); break;
        case Mode::Garbage: reply("BONK"); break;
        case Mode::Silent: break;
      }
      continue;
    }

    if (line.rfind("PROG ", 0) == 0) {
      if (nack_code != 0) {
        reply("ERR " + std::to_string(nack_code));
        continue;
      }
      switch (parse_mode(prog_mode)) {
        case Mode::Garbage: reply("?!#"); break;
        case Mode::Silent: break;
        case Mode::Ok: {
          try {
            const Genome g = parse_genome(line.substr(5));
            reply(validate(g).ok() ? "OK" : "ERR 2");
          } catch (const gaitevo::ParseError&) {
            reply("ERR 1");
          }
          break;
        }
      }
      continue;
    }

    if (line == "GO") {
      if (go_mode == "dist") {
        reply("DIST " + dists[next_dist]);
        next_dist = (next_dist + 1) % dists.size();
      } else if (go_mode == "fall") {
        reply("FALL");
      } else if (go_mode == "garbage") {
        reply("WOBBLE 7");
      }  // silent: no reply
      continue;
    }

    reply("ERR 1");
  }
  return 0;
}
